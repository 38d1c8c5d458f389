//! Numerical probes of plurisubharmonicity, maximality, Lelong numbers and
//! boundary behaviour for pointwise-evaluable functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::envelope::{gaussian, EnvelopeResult};
use crate::error::{domain_err, Error, Result};
use crate::functionals::disc_potential;
use crate::multipoly::Polynomial;

/// Default number of sphere or circle samples.
pub const DEFAULT_SAMPLES: usize = 256;
/// Radius around witness poles skipped by [`extremal_harmonicity`].
pub const POLE_BAND: f64 = 0.05;

/// Seeded quasi-uniform points on the unit sphere of `C^n`. In one
/// dimension they are equally spaced on the circle.
pub fn sphere_points(n: usize, samples: usize) -> Vec<CPoint> {
    if n == 1 {
        return (0..samples)
            .map(|k| {
                CPoint::from_vec_unchecked(vec![Complex64::from_polar(
                    1.0,
                    2.0 * PI * k as f64 / samples as f64,
                )])
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5a3e ^ n as u64);
    (0..samples)
        .map(|_| {
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
                .collect();
            let p = CPoint::from_vec_unchecked(v);
            let r = p.norm();
            &p * (1.0 / r)
        })
        .collect()
}

fn circle(samples: usize) -> impl Iterator<Item = Complex64> {
    (0..samples).map(move |k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64))
}

/// Lelong number by least squares: the slope of `max_{|z-p|=r} u` against
/// `log r`. Negative slopes are reported as 0.
pub fn lelong_estimate<U>(u: U, p: &CPoint, radii: &[f64], samples: usize) -> Result<f64>
where
    U: Fn(&CPoint) -> f64 + Sync,
{
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(domain_err!("need at least two positive radii"));
    }
    if samples == 0 {
        return Err(domain_err!("need sphere samples"));
    }
    let sphere = sphere_points(p.dim(), samples);
    let mut pts = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = sphere
            .par_iter()
            .map(|s| u(&(p + &(s * r))))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Err(Error::Degenerate(format!("function is -inf on the whole sphere of radius {r}")));
        }
        pts.push((r.ln(), m));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(domain_err!("radii must be distinct"));
    }
    Ok((sxy / sxx).max(0.0))
}

/// Circle mean of `u` on `p + r e^{it} v` minus `u(p)`. Nonnegative for
/// plurisubharmonic `u`; `+inf` when `u(p) = -inf`.
pub fn submean_defect<U>(u: U, p: &CPoint, v: &CPoint, r: f64, samples: usize) -> f64
where
    U: Fn(&CPoint) -> f64,
{
    let center = u(p);
    if center == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let mean = circle(samples).map(|e| u(&(p + &v.scale(e * r)))).sum::<f64>() / samples as f64;
    mean - center
}

/// Smallest harmonicity defect over the given directions.
pub fn maximality_defect<U>(u: U, p: &CPoint, directions: &[CPoint], r: f64) -> f64
where
    U: Fn(&CPoint) -> f64,
{
    directions
        .iter()
        .map(|v| submean_defect(&u, p, v, r, DEFAULT_SAMPLES).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Largest gap between `green` along the witness disc and the potential of
/// its poles, sampled on circles of radius `0, 0.2, .., 0.8`.
pub fn extremal_harmonicity<G>(result: &EnvelopeResult, samples: usize, green: G) -> Result<f64>
where
    G: Fn(&CPoint) -> Result<f64>,
{
    if !result.upper.is_finite() {
        return Err(domain_err!("extremal harmonicity needs a finite envelope value"));
    }
    let f = &result.witness;
    let mut worst: f64 = 0.0;
    let mut zetas = vec![Complex64::new(0.0, 0.0)];
    for j in 1..5 {
        zetas.extend(circle(samples.max(1)).map(|e| e * (0.2 * j as f64)));
    }
    for z in zetas {
        if result.poles.entries.iter().any(|(c, _)| (z - c).norm() < POLE_BAND) {
            continue;
        }
        let g = green(&f.evaluate(z)?)?;
        let v = disc_potential(&result.poles, z)?;
        worst = worst.max((g - v).abs());
    }
    Ok(worst)
}

/// Supremum of `ga - log|h|` over the points off the zero set of `h`.
pub fn divisor_quotient_bound<G>(ga: G, h: &Polynomial, points: &[CPoint]) -> Result<f64>
where
    G: Fn(&CPoint) -> f64 + Sync,
{
    let vals: Vec<f64> = points
        .par_iter()
        .map(|z| {
            let lh = h.eval(z).norm().ln();
            if lh == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                ga(z) - lh
            }
        })
        .collect();
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::Numeric("quotient is undefined at a sample".into()));
    }
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Rectangular box in `C^n`, one rectangle per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl BoxRegion {
    /// `per_axis` nodes along every real axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<CPoint> {
        let axes: Vec<Vec<f64>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .flat_map(|(lo, hi)| [(lo.re, hi.re), (lo.im, hi.im)])
            .map(|(a, b)| {
                if per_axis <= 1 || a == b {
                    vec![0.5 * (a + b)]
                } else {
                    (0..per_axis).map(|k| a + (b - a) * k as f64 / (per_axis - 1) as f64).collect()
                }
            })
            .collect();
        let mut out = vec![Vec::<f64>::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    axis.iter().map(move |&v| {
                        let mut p = pre.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|c| CPoint::from_vec_unchecked(c.chunks(2).map(|q| Complex64::new(q[0], q[1])).collect()))
            .collect()
    }
}

/// Values of `ga` along the inward ray `(1 - d) p` for each distance `d`.
pub fn boundary_limit_scan<G>(ga: G, p: &CPoint, distances: &[f64]) -> Vec<(f64, f64)>
where
    G: Fn(&CPoint) -> f64,
{
    distances
        .iter()
        .map(|&d| (d, ga(&(p * (1.0 - d)))))
        .collect()
}

/// Number of points where the line `zeta v` meets `{z^2 + w^2 = c}` inside
/// the unit ball of `C^2`: always 0 or 2.
pub fn geodesic_intersection_count(c: Complex64, v: &CPoint) -> Result<u32> {
    if v.dim() != 2 || (v.norm() - 1.0).abs() > 1e-9 {
        return Err(domain_err!("direction must be a unit vector of C^2"));
    }
    if !(c.norm() > 0.0 && c.norm() < 1.0) {
        return Err(domain_err!("need 0 < |c| < 1"));
    }
    let s = v[0] * v[0] + v[1] * v[1];
    if s.norm() < 1e-14 {
        return Ok(0);
    }
    // both roots +-sqrt(c/s) share the modulus, which is the norm of zeta v
    Ok(if (c / s).norm() < 1.0 { 2 } else { 0 })
}

/// Empirical modulus of continuity: the largest `|u(z) - u(w)|` over pairs
/// of the given points at distance at most `h`.
pub fn continuity_modulus<U>(u: U, points: &[CPoint], h: f64) -> f64
where
    U: Fn(&CPoint) -> f64,
{
    let vals: Vec<f64> = points.iter().map(&u).collect();
    let mut worst: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (&points[i] - &points[j]).norm() <= h && vals[i].is_finite() && vals[j].is_finite() {
                worst = worst.max((vals[i] - vals[j]).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::AnalyticDisc;
    use crate::functionals::PoleData;
    use crate::reference;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];

    #[test]
    fn lelong_of_model_singularities() {
        let one = lelong_estimate(|z| z[0].norm().ln(), &CPoint::origin(1), &RADII, 64).unwrap();
        assert!((one - 1.0).abs() < 5e-2);
        let maxlog = lelong_estimate(
            |z| z[0].norm().max(z[1].norm()).ln(),
            &CPoint::origin(2),
            &RADII,
            256,
        )
        .unwrap();
        assert!((maxlog - 1.0).abs() < 5e-2, "{maxlog}");
        let square = lelong_estimate(|z| (z[0] * z[0]).norm().ln(), &CPoint::origin(2), &RADII, 256).unwrap();
        assert!((square - 2.0).abs() < 5e-2, "{square}");
        let smooth = lelong_estimate(|z| z.norm_sqr(), &CPoint::real(&[0.2, 0.1]), &RADII, 64).unwrap();
        assert!(smooth < 1e-3);
        assert!(lelong_estimate(|_| f64::NEG_INFINITY, &CPoint::origin(1), &RADII, 64).is_err());
    }

    #[test]
    fn submean_signs() {
        let p = CPoint::real(&[0.3, 0.2]);
        let e1 = CPoint::real(&[1.0, 0.0]);
        let h = submean_defect(|z| z[0].norm().ln(), &p, &e1, 0.1, 256);
        assert!(h.abs() < 1e-8);
        let diag = &CPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap() * (0.5f64.sqrt());
        assert!(submean_defect(|z| z[0].norm().ln(), &p, &diag, 0.1, 256) >= -1e-12);
        assert!(submean_defect(|z| -z.norm_sqr(), &p, &e1, 0.1, 64) < 0.0);
        assert_eq!(
            submean_defect(|z| z[0].norm().ln(), &CPoint::origin(2), &e1, 0.1, 64),
            f64::INFINITY
        );
    }

    #[test]
    fn maximality_examples() {
        let dirs = sphere_points(2, 64);
        let mut with_axes = dirs.clone();
        with_axes.push(CPoint::real(&[1.0, 0.0]));
        let poly = maximality_defect(|z| z[0].norm().ln(), &CPoint::real(&[0.3, 0.9]), &with_axes, 0.05);
        assert!(poly < 1e-10);
        let r = 0.05;
        let strict = maximality_defect(|z| z.norm_sqr(), &CPoint::real(&[0.2, 0.1]), &dirs, r);
        assert!(strict >= r * r / 2.0, "{strict}");
        // the ball hyperplane Green function is harmonic along z'-constant slices
        let x = CPoint::real(&[0.5, 0.6]);
        let g = |z: &CPoint| reference::green_ball_hyperplane(z).unwrap_or(f64::NAN);
        let m = maximality_defect(g, &x, &with_axes, 0.05);
        assert!(m <= 1e-3, "{m}");
    }

    #[test]
    fn extremal_harmonicity_on_geodesic() {
        // a linear disc through x = (0.18, 0.24) and the origin
        let x = CPoint::real(&[0.18, 0.24]);
        let u = &x * (1.0 / x.norm());
        let f = AnalyticDisc::linear(&x, &(&u * 0.6), 1.0001).unwrap();
        // f(zeta) = x + 0.6 zeta u hits 0 at zeta = -0.5
        let z0 = c(-0.5, 0.0);
        let result = EnvelopeResult {
            upper: z0.norm().ln(),
            witness: f,
            poles: PoleData {
                entries: vec![(z0, 1.0)],
            },
            lower: None,
            evaluations: 0,
            converged: true,
            restart: 0,
            clipped: false,
        };
        let d = extremal_harmonicity(&result, 32, |z| reference::green_ball_point(&CPoint::origin(2), z)).unwrap();
        // not the geodesic, so the defect is positive
        assert!(d >= (1.0f64 / 0.6).ln() - 1e-12, "{d}");

        let constant = EnvelopeResult {
            upper: 0.0,
            witness: AnalyticDisc::constant(&x, 1.0001).unwrap(),
            poles: PoleData::default(),
            ..result.clone()
        };
        assert_eq!(extremal_harmonicity(&constant, 16, |_| Ok(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn quotient_bounds() {
        let region = BoxRegion {
            lower: vec![c(1e-4, 0.0), c(-0.7 / 2f64.sqrt(), -0.7 / 2f64.sqrt())],
            upper: vec![c(0.1, 0.0), c(0.7 / 2f64.sqrt(), 0.7 / 2f64.sqrt())],
        };
        let pts: Vec<CPoint> = region.grid(7).into_iter().filter(|p| p[1].norm() <= 0.7).collect();
        let h = Polynomial::coordinate(2, 0);
        let ball = divisor_quotient_bound(|z| reference::green_ball_hyperplane(z).unwrap(), &h, &pts).unwrap();
        assert!((ball + 0.5 * (1.0f64 - 0.49).ln()).abs() < 1e-9, "{ball}");
        let bidisc = divisor_quotient_bound(|z| reference::green_polydisc_hyperplane(z).unwrap(), &h, &pts).unwrap();
        assert!(bidisc.abs() < 1e-15);
        assert_eq!(region.grid(1).len(), 1);
        assert_eq!(region.grid(3).len(), 27);
    }

    #[test]
    fn boundary_scans() {
        let dists = [0.1, 0.05, 0.01, 0.001];
        let p = CPoint::real(&[0.8, 0.6]);
        let ball = boundary_limit_scan(|z| reference::green_ball_hyperplane(z).unwrap(), &p, &dists);
        assert!(ball.last().unwrap().1.abs() < 5e-2);
        assert!(ball.windows(2).all(|w| w[1].1 >= w[0].1));
        let q = CPoint::real(&[0.3, 1.0]);
        let poly = boundary_limit_scan(|z| reference::green_polydisc_hyperplane(z).unwrap(), &q, &[0.01]);
        assert!((poly[0].1 - (0.3f64 * 0.99).ln()).abs() < 1e-12);
        assert!(poly[0].1.abs() > 5e-2);
    }

    #[test]
    fn geodesic_counts() {
        let c0 = c(0.25, 0.0);
        assert_eq!(geodesic_intersection_count(c0, &CPoint::real(&[1.0, 0.0])).unwrap(), 2);
        let iso = &CPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap() * (0.5f64.sqrt());
        assert_eq!(geodesic_intersection_count(c0, &iso).unwrap(), 0);
        // v1^2 + v2^2 small but nonzero pushes the roots outside
        let t = 0.05f64;
        let v = CPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0 - t)]).unwrap();
        let v = &v * (1.0 / v.norm());
        assert_eq!(geodesic_intersection_count(c0, &v).unwrap(), 0);
        assert!(geodesic_intersection_count(c0, &CPoint::real(&[1.0, 1.0])).is_err());
        assert!(geodesic_intersection_count(c(1.5, 0.0), &CPoint::real(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn modulus_of_continuity() {
        let pts: Vec<CPoint> = (0..11).map(|k| CPoint::real(&[0.1 * k as f64])).collect();
        let m = continuity_modulus(|z| 2.0 * z[0].re, &pts, 0.1 + 1e-12);
        assert!((m - 0.2).abs() < 1e-12);
    }
}
