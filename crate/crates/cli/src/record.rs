use plurigreen_core::verify::ext_real;
use plurigreen_core::{CPoint, EnvelopeResult};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Zero of the witness disc in the unit disc with its weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub re: f64,
    pub im: f64,
    pub weight: f64,
}

/// Result of evaluating one point. Missing quantities are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: String,
    /// Real coordinates `x1r, x1i, x2r, ...`.
    pub point: Vec<f64>,
    pub inside: bool,
    #[serde(with = "ext_real")]
    pub closed_form: f64,
    #[serde(with = "ext_real")]
    pub lower: f64,
    #[serde(with = "ext_real")]
    pub upper: f64,
    /// `upper - lower`.
    #[serde(with = "ext_real")]
    pub bracket: f64,
    /// `upper - closed_form`.
    #[serde(with = "ext_real")]
    pub gap: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub clipped: bool,
    pub poles: Vec<Pole>,
}

/// Output document of `eval` and `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub config_hash: String,
    pub records: Vec<Record>,
}

pub const CSV_HEADER: [&str; 10] = [
    "key",
    "point",
    "inside",
    "closed_form",
    "lower",
    "upper",
    "bracket",
    "gap",
    "converged",
    "evaluations",
];

impl Record {
    pub fn csv_row(&self) -> Vec<String> {
        let point: Vec<String> = self.point.iter().map(|v| ext_real::to_string(*v)).collect();
        vec![
            self.key.clone(),
            point.join(" "),
            self.inside.to_string(),
            ext_real::to_string(self.closed_form),
            ext_real::to_string(self.lower),
            ext_real::to_string(self.upper),
            ext_real::to_string(self.bracket),
            ext_real::to_string(self.gap),
            self.converged.to_string(),
            self.evaluations.to_string(),
        ]
    }
}

fn reals(x: &CPoint) -> Vec<f64> {
    x.coords().iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Evaluates closed form, minorant and envelope at `x`. Points outside the
/// domain yield a record with `inside = false` and NaN values.
pub fn evaluate(cfg: &ExperimentConfig, key: String, x: &CPoint, seed: u64) -> Result<Record, CliError> {
    if x.dim() != cfg.domain.dim() {
        return Err(CliError::Usage(format!(
            "point has {} coordinates, the domain {}",
            x.dim(),
            cfg.domain.dim()
        )));
    }
    let inside = cfg.domain.contains(x, 0.0).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rec = Record {
        key,
        point: reals(x),
        inside,
        closed_form: f64::NAN,
        lower: f64::NAN,
        upper: f64::NAN,
        bracket: f64::NAN,
        gap: f64::NAN,
        converged: false,
        evaluations: 0,
        clipped: false,
        poles: Vec::new(),
    };
    if !inside {
        return Ok(rec);
    }
    let q = cfg.query(x.clone(), Some(seed))?;
    let mut result: EnvelopeResult =
        plurigreen_core::envelope::envelope_upper(&q).map_err(|e| CliError::Compute(e.to_string()))?;
    if let Some(l) = cfg.lower_bound(x) {
        // an infeasible bracket means the minorant is wrong, not the search
        result = result.with_lower(l).map_err(|e| CliError::Compute(e.to_string()))?;
    }
    rec.closed_form = cfg.closed_form(x).unwrap_or(f64::NAN);
    rec.upper = result.upper;
    rec.lower = result.lower.unwrap_or(f64::NAN);
    rec.bracket = match result.lower {
        Some(l) if l == result.upper => 0.0,
        Some(l) => result.upper - l,
        None => f64::NAN,
    };
    rec.gap = if rec.closed_form == rec.upper { 0.0 } else { rec.upper - rec.closed_form };
    rec.converged = result.converged;
    rec.evaluations = result.evaluations;
    rec.clipped = result.clipped;
    rec.poles = result
        .poles
        .entries
        .iter()
        .map(|(z, w)| Pole { re: z.re, im: z.im, weight: *w })
        .collect();
    Ok(rec)
}
