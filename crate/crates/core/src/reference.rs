//! Closed-form Green functions and invariant distances on model domains.
//!
//! Nothing here touches the disc optimizer, so these values can be used to
//! judge it.

use serde::{Deserialize, Serialize};

use crate::complex::{ball_automorphism, mobius_modulus, CPoint};
use crate::domain::Domain;
use crate::error::{domain_err, Result};

fn check_ball(x: &CPoint, what: &str) -> Result<()> {
    if x.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(domain_err!("{what} = {x:?} is not in the open unit ball"))
    }
}

fn check_polydisc(x: &CPoint, what: &str) -> Result<()> {
    if x.max_modulus() < 1.0 {
        Ok(())
    } else {
        Err(domain_err!("{what} = {x:?} is not in the open unit polydisc"))
    }
}

/// Green function of the ball with a simple pole at `a`: `log |T_a(x)|`.
pub fn green_ball_point(a: &CPoint, x: &CPoint) -> Result<f64> {
    if a == x {
        check_ball(a, "a")?;
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ball_automorphism(a, x)?.norm().ln())
}

/// Green function of the ball along `{z_1 = 0}`:
/// `log(|z_1| / sqrt(1 - |z'|^2))`.
pub fn green_ball_hyperplane(x: &CPoint) -> Result<f64> {
    check_ball(x, "x")?;
    let tail: f64 = x.coords()[1..].iter().map(|c| c.norm_sqr()).sum();
    Ok(x[0].norm().ln() - 0.5 * (1.0 - tail).ln())
}

/// Green function of the polydisc along `{z_1 = 0}`: `log |z_1|`.
pub fn green_polydisc_hyperplane(x: &CPoint) -> Result<f64> {
    check_polydisc(x, "x")?;
    Ok(x[0].norm().ln())
}

/// Product formula: the largest factor value.
pub fn green_product(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `log tanh` of the Kobayashi distance of the ball, equal to `log |T_a(x)|`.
pub fn kobayashi_ball(x: &CPoint, a: &CPoint) -> Result<f64> {
    green_ball_point(a, x)
}

/// `log tanh` of the Kobayashi distance of the polydisc: the largest
/// coordinatewise `log` pseudo-hyperbolic distance.
pub fn kobayashi_polydisc(x: &CPoint, a: &CPoint) -> Result<f64> {
    check_polydisc(x, "x")?;
    check_polydisc(a, "a")?;
    if x.dim() != a.dim() {
        return Err(domain_err!("dimension mismatch"));
    }
    Ok(green_product(
        &x.coords()
            .iter()
            .zip(a.coords())
            .map(|(&xi, &ai)| mobius_modulus(xi, ai).ln())
            .collect::<Vec<_>>(),
    ))
}

/// `log tanh` of the Kobayashi distance on any supported model domain.
pub fn kobayashi(domain: &Domain, x: &CPoint, a: &CPoint) -> Result<f64> {
    if x.dim() != domain.dim() || a.dim() != domain.dim() {
        return Err(domain_err!("dimension mismatch"));
    }
    match domain {
        Domain::Ball { .. } => kobayashi_ball(x, a),
        Domain::Polydisc { .. } => kobayashi_polydisc(x, a),
        Domain::AffineBall { center, radius } => {
            let to_unit = |p: &CPoint| &(p - center) * (1.0 / radius);
            kobayashi_ball(&to_unit(x), &to_unit(a))
        }
        Domain::Product { factors } => {
            let mut start = 0;
            let mut vals = Vec::with_capacity(factors.len());
            for f in factors {
                let d = f.dim();
                let slice = |p: &CPoint| CPoint::new(p.coords()[start..start + d].to_vec());
                vals.push(kobayashi(f, &slice(x)?, &slice(a)?)?);
                start += d;
            }
            Ok(green_product(&vals))
        }
    }
}

/// Closed forms that configs can name as the exact answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    BallHyperplane,
    PolydiscHyperplane,
    /// Simple pole at `pole` on the domain of the query.
    Point { pole: CPoint },
    /// `max_i w_i log|z_i|` on the polydisc.
    WeightedMax { weights: Vec<f64> },
}

impl ClosedForm {
    pub fn eval(&self, domain: &Domain, x: &CPoint) -> Result<f64> {
        match self {
            ClosedForm::BallHyperplane => green_ball_hyperplane(x),
            ClosedForm::PolydiscHyperplane => green_polydisc_hyperplane(x),
            ClosedForm::Point { pole } => kobayashi(domain, x, pole),
            ClosedForm::WeightedMax { weights } => {
                check_polydisc(x, "x")?;
                if weights.len() != x.dim() {
                    return Err(domain_err!("one weight per coordinate expected"));
                }
                Ok(green_product(
                    &x.coords()
                        .iter()
                        .zip(weights)
                        .map(|(c, w)| w * c.norm().ln())
                        .collect::<Vec<_>>(),
                ))
            }
        }
    }
}
