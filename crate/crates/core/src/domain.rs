//! Bounded convex model domains described by their Minkowski gauge.
//!
//! Convexity makes `gauge o f` subharmonic for every analytic disc `f`, so a
//! disc lies in the domain once its boundary circle does.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::disc::AnalyticDisc;
use crate::error::{domain_err, Result};

/// Boundary circle samples used when none are requested.
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Unit ball of `C^dim`.
    Ball { dim: usize },
    /// Unit polydisc of `C^dim`.
    Polydisc { dim: usize },
    /// Cartesian product; coordinates are concatenated in factor order.
    Product { factors: Vec<Domain> },
    /// `{ z : |z - center| < radius }`.
    AffineBall { center: CPoint, radius: f64 },
}

impl Domain {
    pub fn ball(dim: usize) -> Self {
        Domain::Ball { dim }
    }

    pub fn polydisc(dim: usize) -> Self {
        Domain::Polydisc { dim }
    }

    pub fn product(factors: Vec<Domain>) -> Self {
        Domain::Product { factors }
    }

    pub fn affine_ball(center: CPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain_err!("ball radius must be positive, got {radius}"));
        }
        Ok(Domain::AffineBall { center, radius })
    }

    /// Rejects empty or zero-dimensional descriptors (e.g. from config files).
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Ball { dim } | Domain::Polydisc { dim } if *dim == 0 => {
                Err(domain_err!("domain dimension must be positive"))
            }
            Domain::Product { factors } => {
                if factors.is_empty() {
                    return Err(domain_err!("product with no factors"));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            Domain::AffineBall { radius, .. } if !(*radius > 0.0) => {
                Err(domain_err!("ball radius must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { dim } | Domain::Polydisc { dim } => *dim,
            Domain::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            Domain::AffineBall { center, .. } => center.dim(),
        }
    }

    /// Point playing the role of the origin for homogeneity.
    pub fn center(&self) -> CPoint {
        match self {
            Domain::AffineBall { center, .. } => center.clone(),
            _ => CPoint::origin(self.dim()),
        }
    }

    fn gauge_slice(&self, z: &[Complex64]) -> f64 {
        match self {
            Domain::Ball { .. } => z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            Domain::Polydisc { .. } => z.iter().map(|c| c.norm()).fold(0.0, f64::max),
            Domain::Product { factors } => {
                let mut start = 0;
                let mut g: f64 = 0.0;
                for f in factors {
                    let d = f.dim();
                    g = g.max(f.gauge_slice(&z[start..start + d]));
                    start += d;
                }
                g
            }
            Domain::AffineBall { center, radius } => {
                z.iter()
                    .zip(center.coords())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    / radius
            }
        }
    }

    /// Minkowski gauge about [`Domain::center`].
    pub fn gauge(&self, z: &CPoint) -> Result<f64> {
        if z.dim() != self.dim() {
            return Err(domain_err!(
                "point of dimension {} in a domain of dimension {}",
                z.dim(),
                self.dim()
            ));
        }
        Ok(self.gauge_slice(z.coords()))
    }

    pub(crate) fn gauge_unchecked(&self, z: &CPoint) -> f64 {
        self.gauge_slice(z.coords())
    }

    pub fn contains(&self, z: &CPoint, margin: f64) -> Result<bool> {
        Ok(self.gauge(z)? < 1.0 - margin)
    }

    /// Largest gauge over `samples` equispaced points of `|zeta| = R`.
    pub fn disc_gauge_max(&self, f: &AnalyticDisc, samples: usize) -> f64 {
        let r = f.overshoot();
        let samples = samples.max(1);
        (0..samples)
            .map(|k| {
                let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64);
                self.gauge_unchecked(&f.eval_unchecked(z))
            })
            .fold(0.0, f64::max)
    }

    /// Largest gauge over the given evaluation points of `f`.
    pub(crate) fn gauge_max_at(&self, f: &AnalyticDisc, nodes: &[Complex64]) -> f64 {
        nodes
            .iter()
            .map(|&z| self.gauge_unchecked(&f.eval_unchecked(z)))
            .fold(0.0, f64::max)
    }

    /// Certifies that the closed disc `|zeta| <= R` maps into the domain with
    /// gauge below `1 - margin`. Near-threshold verdicts are re-checked with
    /// twice as many samples.
    pub fn disc_contained(&self, f: &AnalyticDisc, margin: f64, samples: usize) -> Result<bool> {
        if f.dim() != self.dim() {
            return Err(domain_err!(
                "disc in C^{} against a domain in C^{}",
                f.dim(),
                self.dim()
            ));
        }
        if f.is_constant() {
            return self.contains(&f.center(), margin);
        }
        let threshold = 1.0 - margin;
        let g = self.disc_gauge_max(f, samples);
        if !(g < threshold) {
            return Ok(false);
        }
        if threshold - g <= 10.0 * margin {
            return Ok(self.disc_gauge_max(f, 2 * samples) < threshold);
        }
        Ok(true)
    }

    /// Largest `s >= 0` with `x + s u` in the closed domain, by bisection on
    /// the (convex) gauge along the ray.
    pub fn exit_distance(&self, x: &CPoint, u: &CPoint) -> Result<f64> {
        if !self.contains(x, 0.0)? {
            return Err(domain_err!("ray origin {x:?} is not interior"));
        }
        let at = |s: f64| self.gauge_unchecked(&(x + &(u * s)));
        let mut hi = 1.0;
        while at(hi) < 1.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(domain_err!("ray does not leave the domain"));
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if at(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Distance from `x` to the complement, measured in the Euclidean metric
    /// for ball-like pieces and coordinatewise for polydisc pieces.
    pub fn boundary_distance(&self, x: &CPoint) -> Result<f64> {
        let g = self.gauge(x)?;
        Ok(match self {
            Domain::Ball { .. } => 1.0 - g,
            Domain::AffineBall { radius, .. } => radius * (1.0 - g),
            Domain::Polydisc { .. } | Domain::Product { .. } => {
                let mut best = f64::INFINITY;
                let mut start = 0;
                for (piece, d) in self.pieces() {
                    let sub = CPoint::from_vec_unchecked(x.coords()[start..start + d].to_vec());
                    best = best.min(piece.boundary_distance(&sub)?);
                    start += d;
                }
                best
            }
        })
    }

    /// Irreducible pieces with their dimensions; a polydisc splits into discs.
    fn pieces(&self) -> Vec<(Domain, usize)> {
        match self {
            Domain::Polydisc { dim } => (0..*dim).map(|_| (Domain::ball(1), 1)).collect(),
            Domain::Product { factors } => factors.iter().flat_map(|f| f.pieces()).collect(),
            d => vec![(d.clone(), d.dim())],
        }
    }

    /// Factor domains of a product (a polydisc counts as a product of discs).
    pub fn factors(&self) -> Vec<Domain> {
        match self {
            Domain::Product { factors } => factors.clone(),
            Domain::Polydisc { dim } => (0..*dim).map(|_| Domain::ball(1)).collect(),
            d => vec![d.clone()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gauge_examples() {
        let b = Domain::ball(2);
        let g = b.gauge(&CPoint::real(&[0.5, 0.6])).unwrap();
        assert!((g - 0.61f64.sqrt()).abs() < 1e-15);
        let p = Domain::polydisc(2);
        assert_eq!(p.gauge(&CPoint::real(&[0.5, 1.1])).unwrap(), 1.1);
        let prod = Domain::product(vec![Domain::ball(1), Domain::ball(2)]);
        let z = CPoint::real(&[0.4, 0.3, 0.4]);
        assert!((prod.gauge(&z).unwrap() - 0.5).abs() < 1e-15);
        assert!(b.gauge(&CPoint::real(&[0.1])).is_err());
        let ab = Domain::affine_ball(CPoint::real(&[1.0, 0.0]), 2.0).unwrap();
        assert!((ab.gauge(&CPoint::real(&[2.0, 0.0])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn contains_examples() {
        assert!(Domain::ball(2).contains(&CPoint::real(&[0.5, 0.6]), 0.0).unwrap());
        assert!(!Domain::polydisc(2).contains(&CPoint::real(&[0.5, 1.1]), 0.0).unwrap());
        assert!(!Domain::ball(2).contains(&CPoint::real(&[0.99, 0.0]), 0.02).unwrap());
    }

    #[test]
    fn disc_containment_examples() {
        let f = AnalyticDisc::new(vec![vec![c(0.0), c(0.5)], vec![c(0.3)]], 1.05).unwrap();
        assert!(Domain::polydisc(2).disc_contained(&f, 0.01, 256).unwrap());
        let g = AnalyticDisc::new(vec![vec![c(0.0), c(1.0)], vec![c(0.0)]], 1.05).unwrap();
        assert!(!Domain::ball(2).disc_contained(&g, 0.0, 256).unwrap());
        let k = AnalyticDisc::constant(&CPoint::real(&[0.2, 0.1]), 1.05).unwrap();
        assert!(Domain::ball(2).disc_contained(&k, 0.0, 256).unwrap());
    }

    #[test]
    fn exit_distance_ball() {
        let b = Domain::ball(2);
        let s = b
            .exit_distance(&CPoint::real(&[0.0, 0.6]), &CPoint::real(&[1.0, 0.0]))
            .unwrap();
        assert!((s - 0.8).abs() < 1e-12);
    }

    fn pt4() -> impl Strategy<Value = CPoint> {
        prop::array::uniform4(-0.7..0.7f64)
            .prop_map(|v| CPoint::new(vec![Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])]).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn gauge_convexity(z in pt4(), w in pt4()) {
            for d in [Domain::ball(2), Domain::polydisc(2), Domain::product(vec![Domain::ball(1), Domain::polydisc(1)])] {
                let gz = d.gauge(&z).unwrap();
                let gw = d.gauge(&w).unwrap();
                let mid = &(&z + &w) * 0.5;
                prop_assert!(d.gauge(&mid).unwrap() < gz.max(gw) + 1e-12);
            }
        }

        #[test]
        fn containment_monotone_in_margin(a in 0.0..0.9f64, b in 0.0..0.9f64, m in 0.0..0.2f64, t in 0.0..1.0f64) {
            let f = AnalyticDisc::new(vec![vec![c(0.1), c(a)], vec![c(-0.2), c(0.0), c(b)]], 1.05).unwrap();
            let d = Domain::ball(2);
            if d.disc_contained(&f, m, 256).unwrap() {
                prop_assert!(d.disc_contained(&f, m * t, 256).unwrap());
            }
        }
    }
}
