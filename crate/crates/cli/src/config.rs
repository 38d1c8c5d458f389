use std::collections::BTreeMap;
use std::path::Path;

use plurigreen_core::envelope::minorant_lower;
use plurigreen_core::reference::kobayashi;
use plurigreen_core::{
    BoundaryFunction, CPoint, ClosedForm, ComplexSubspace, Domain, EnvelopeQuery, FunctionalKind,
    OptimizerConfig, Payload, WeightFunction,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Experiment description read from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub functional: FunctionalKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<ComplexSubspace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryFunction>,
    /// Exact answer to report next to the bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForm>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Named grid specs usable as `--grid NAME`.
    #[serde(default)]
    pub grids: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            CliError::Usage(format!("config error at line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |e: plurigreen_core::Error| CliError::Usage(e.to_string());
        self.domain.validate().map_err(usage)?;
        self.optimizer.validate().map_err(usage)?;
        self.payload()?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn payload(&self) -> Result<Payload, CliError> {
        let given = [self.subspace.is_some(), self.weights.is_some(), self.boundary.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            return Err(CliError::Usage(
                "exactly one of subspace, weights or boundary must be given".into(),
            ));
        }
        let payload = match (self.functional, &self.subspace, &self.weights, &self.boundary) {
            (FunctionalKind::Lelong, Some(a), _, _) => Payload::Weights {
                weights: WeightFunction::multiplicity(a.clone()),
            },
            (FunctionalKind::Lelong, _, Some(w), _) => Payload::Weights { weights: w.clone() },
            (FunctionalKind::Riesz, Some(a), _, _) => Payload::Divisor { subspace: a.clone() },
            (FunctionalKind::Poisson, _, _, Some(h)) => Payload::Boundary { boundary: h.clone() },
            (kind, ..) => {
                return Err(CliError::Usage(format!(
                    "functional {kind:?} does not accept the given payload"
                )))
            }
        };
        Ok(payload)
    }

    pub fn query(&self, x: CPoint, seed: Option<u64>) -> Result<EnvelopeQuery, CliError> {
        let mut optimizer = self.optimizer.clone();
        if let Some(s) = seed {
            optimizer.seed = s;
        }
        Ok(EnvelopeQuery::new(self.functional, self.domain.clone(), self.payload()?, x, optimizer))
    }

    pub fn closed_form(&self, x: &CPoint) -> Option<f64> {
        self.closed_form.as_ref().and_then(|c| c.eval(&self.domain, x).ok())
    }

    /// Value of an explicit member of the competing class at `x`: the
    /// closed form when given, else a minorant built from the payload.
    pub fn lower_bound(&self, x: &CPoint) -> Option<f64> {
        if self.closed_form.is_some() {
            return self.closed_form(x).filter(|v| !v.is_nan());
        }
        self.payload_minorant(x)
    }

    fn payload_minorant(&self, x: &CPoint) -> Option<f64> {
        match (&self.weights, &self.subspace) {
            (Some(WeightFunction::Points { support }), _) => {
                let u = |z: &CPoint| -> f64 {
                    support
                        .iter()
                        .map(|(a, w)| kobayashi(&self.domain, z, a).map(|k| w * k))
                        .sum::<Result<f64, _>>()
                        .unwrap_or(f64::NAN)
                };
                Some(minorant_lower(u, x))
            }
            (Some(WeightFunction::Multiplicity { subspace } | WeightFunction::Indicator { subspace }), _)
            | (None, Some(subspace)) => {
                let bounds = subspace.sup_bounds(self.coordinate_radius());
                minorant_lower(|z: &CPoint| subspace.log_max_generators(z, &bounds).unwrap_or(f64::NAN), x)
                    .into()
            }
            _ => None,
        }
        .filter(|v| !v.is_nan())
    }

    /// Bound on every coordinate modulus over the domain.
    fn coordinate_radius(&self) -> f64 {
        fn radius(d: &Domain) -> f64 {
            match d {
                Domain::Ball { .. } | Domain::Polydisc { .. } => 1.0,
                Domain::Product { factors } => factors.iter().map(radius).fold(0.0, f64::max),
                Domain::AffineBall { center, radius } => center.max_modulus() + radius,
            }
        }
        radius(&self.domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HYPERPLANE: &str = r#"{
        "domain": {"kind": "ball", "dim": 2},
        "functional": "lelong",
        "subspace": [[[[1, 0], 1.0, 0.0]]],
        "closed_form": {"kind": "ball_hyperplane"}
    }"#;

    #[test]
    fn parses_and_hashes_canonically() {
        let a = ExperimentConfig::parse(HYPERPLANE).unwrap();
        let b = ExperimentConfig::parse(&HYPERPLANE.replace('\n', " ")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        assert_eq!(a.optimizer, OptimizerConfig::default());
    }

    #[test]
    fn lower_bound_is_below_closed_form() {
        let cfg = ExperimentConfig::parse(HYPERPLANE).unwrap();
        let x = CPoint::real(&[0.5, 0.6]);
        let minorant = cfg.payload_minorant(&x).unwrap();
        let exact = cfg.closed_form(&x).unwrap();
        assert!((minorant - 0.5f64.ln()).abs() < 1e-12);
        assert!(minorant <= exact);
        assert_eq!(cfg.lower_bound(&x), Some(exact));
    }

    #[test]
    fn rejects_bad_payloads() {
        let both = HYPERPLANE.replace(
            "\"closed_form\"",
            "\"boundary\": {\"kind\": \"constant\", \"value\": 0.0}, \"closed_form\"",
        );
        assert!(matches!(ExperimentConfig::parse(&both), Err(CliError::Usage(_))));
        let err = ExperimentConfig::parse("{\n \"domain\": 3 }").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
