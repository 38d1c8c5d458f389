//! Closed analytic discs given by polynomial maps of the unit disc.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::domain::Domain;
use crate::error::{domain_err, Error, Result};
use crate::multipoly::Polynomial;
use crate::poly::{Poly, TAYLOR_ZERO_TOL};

/// Preimages this close to the unit circle are dropped; they would
/// contribute `log|zeta| ~ 0` anyway.
pub const BOUNDARY_BAND: f64 = 1e-12;
/// Relative tolerance for deciding that a point of the image equals a pole.
pub const HIT_TOL: f64 = 1e-9;
/// Relative size below which a composition counts as identically zero.
pub const DEGENERATE_TOL: f64 = 1e-13;

/// `zeta -> (p_1(zeta), ..., p_n(zeta))` on `|zeta| <= overshoot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    coords: Vec<Poly>,
    degree: usize,
    overshoot: f64,
}

/// Distinct preimages in the open unit disc with their orders.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PreimageList {
    pub entries: Vec<(Complex64, u32)>,
}

impl PreimageList {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            (a.0.norm(), a.0.arg())
                .partial_cmp(&(b.0.norm(), b.0.arg()))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

impl AnalyticDisc {
    /// `coeffs[i][k]` is the coefficient of `zeta^k` in coordinate `i`.
    /// Shorter coefficient lists are zero-padded to the common degree.
    pub fn new(coeffs: Vec<Vec<Complex64>>, overshoot: f64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| c.is_empty()) {
            return Err(domain_err!("a disc needs at least one coordinate with a center"));
        }
        if !(overshoot > 1.0) || !overshoot.is_finite() {
            return Err(domain_err!("overshoot radius must exceed 1, got {overshoot}"));
        }
        if coeffs
            .iter()
            .flatten()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(domain_err!("non-finite disc coefficient"));
        }
        let degree = coeffs.iter().map(|c| c.len() - 1).max().unwrap_or(0);
        let coords = coeffs
            .into_iter()
            .map(|mut c| {
                c.resize(degree + 1, Complex64::new(0.0, 0.0));
                Poly::new(c)
            })
            .collect();
        Ok(AnalyticDisc {
            coords,
            degree,
            overshoot,
        })
    }

    pub fn constant(x: &CPoint, overshoot: f64) -> Result<Self> {
        Self::new(x.coords().iter().map(|&c| vec![c]).collect(), overshoot)
    }

    /// Affine disc `zeta -> x + zeta v`.
    pub fn linear(x: &CPoint, v: &CPoint, overshoot: f64) -> Result<Self> {
        Self::new(
            x.coords()
                .iter()
                .zip(v.coords())
                .map(|(&a, &b)| vec![a, b])
                .collect(),
            overshoot,
        )
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn overshoot(&self) -> f64 {
        self.overshoot
    }

    pub fn coordinate_polys(&self) -> &[Poly] {
        &self.coords
    }

    pub fn coefficients(&self) -> Vec<Vec<Complex64>> {
        self.coords.iter().map(|p| p.coeffs().to_vec()).collect()
    }

    pub fn center(&self) -> CPoint {
        CPoint::from_vec_unchecked(self.coords.iter().map(|p| p.coeffs()[0]).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.coords
            .iter()
            .all(|p| p.coeffs()[1..].iter().all(|c| c.norm() == 0.0))
    }

    /// Same map with zero coefficients appended up to degree `d`.
    pub fn with_degree(&self, d: usize) -> Result<Self> {
        if d < self.degree {
            return Err(domain_err!("cannot lower disc degree {} to {d}", self.degree));
        }
        Self::new(self.coefficients(), self.overshoot)
            .and_then(|mut f| {
                for p in &mut f.coords {
                    let mut c = p.coeffs().to_vec();
                    c.resize(d + 1, Complex64::new(0.0, 0.0));
                    *p = Poly::new(c);
                }
                f.degree = d;
                Ok(f)
            })
    }

    /// Horner evaluation of every coordinate.
    pub fn evaluate(&self, zeta: Complex64) -> Result<CPoint> {
        if zeta.norm() > self.overshoot * (1.0 + 1e-12) {
            return Err(domain_err!(
                "|zeta| = {} exceeds the disc radius {}",
                zeta.norm(),
                self.overshoot
            ));
        }
        Ok(self.eval_unchecked(zeta))
    }

    pub(crate) fn eval_unchecked(&self, zeta: Complex64) -> CPoint {
        CPoint::from_vec_unchecked(self.coords.iter().map(|p| p.eval(zeta)).collect())
    }

    /// Multiplicity of the map at `zeta0`: the least order among the
    /// coordinates of `f - f(zeta0)` expanded at `zeta0`. `None` means the
    /// disc is constant (infinite multiplicity).
    pub fn multiplicity(&self, zeta0: Complex64) -> Option<u32> {
        let shifted: Vec<Poly> = self.coords.iter().map(|p| p.taylor_shift(zeta0)).collect();
        // per-order scale shared by the coordinates, so that a coordinate
        // tiny next to the others counts as stationary
        let mut bounds: Vec<f64> = Vec::new();
        for p in &self.coords {
            for (k, b) in p.taylor_bounds(zeta0.norm()).into_iter().enumerate() {
                if k == bounds.len() {
                    bounds.push(b);
                } else {
                    bounds[k] = bounds[k].max(b);
                }
            }
        }
        if bounds.iter().skip(1).all(|&b| b == 0.0) {
            return None;
        }
        shifted
            .iter()
            .filter_map(|p| {
                p.coeffs()
                    .iter()
                    .zip(&bounds)
                    .skip(1)
                    .position(|(c, b)| c.norm() > TAYLOR_ZERO_TOL * b)
                    .map(|k| k as u32 + 1)
            })
            .min()
    }

    /// Size of the largest coordinate coefficient sum, used to judge
    /// compositions relative to the disc's scale.
    fn coefficient_radius(&self) -> f64 {
        self.coords
            .iter()
            .map(|p| p.coeffs().iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Roots of `g o f` in the open unit disc with their orders.
    pub fn preimages(&self, g: &Polynomial) -> Result<PreimageList> {
        if g.nvars() != self.dim() {
            return Err(domain_err!(
                "polynomial in {} variables on a disc in C^{}",
                g.nvars(),
                self.dim()
            ));
        }
        let comp = g.compose(&self.coords);
        let r = self.coefficient_radius().max(1.0);
        let reference = g.magnitude_bound(&CPoint::real(&vec![r; self.dim()]));
        if comp.negligible(DEGENERATE_TOL, reference) {
            return Err(Error::Degenerate(
                "composition vanishes identically on the disc".into(),
            ));
        }
        let mut out = PreimageList {
            entries: comp
                .root_clusters()?
                .into_iter()
                .filter(|(z, _)| z.norm() < 1.0 - BOUNDARY_BAND)
                .collect(),
        };
        out.sort();
        Ok(out)
    }

    /// Points of the open unit disc mapped to `a`, with multiplicities of
    /// the map there. Errors with `Degenerate` when the disc is constant at `a`.
    pub fn point_preimages(&self, a: &CPoint) -> Result<PreimageList> {
        if a.dim() != self.dim() {
            return Err(domain_err!("dimension mismatch"));
        }
        let diffs: Vec<Poly> = self
            .coords
            .iter()
            .zip(a.coords())
            .map(|(p, ai)| &Poly::constant(-ai) + p)
            .collect();
        let r = self.coefficient_radius().max(a.max_modulus()).max(1.0);
        let degenerate: Vec<bool> = diffs.iter().map(|d| d.negligible(DEGENERATE_TOL, r)).collect();
        if degenerate.iter().all(|&b| b) {
            return Err(Error::Degenerate("constant disc at the pole".into()));
        }
        // Root the coordinate difference with the most weight in positive degree.
        let lead = (0..diffs.len())
            .filter(|&i| !degenerate[i])
            .filter(|&i| diffs[i].coeffs()[1..].iter().any(|c| c.norm() > 0.0))
            .max_by(|&i, &j| {
                let si = diffs[i].coeffs()[1..].iter().map(|c| c.norm()).sum::<f64>();
                let sj = diffs[j].coeffs()[1..].iter().map(|c| c.norm()).sum::<f64>();
                si.partial_cmp(&sj).unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(lead) = lead else {
            // constant disc away from a
            return Ok(PreimageList::default());
        };
        let mut out = PreimageList::default();
        for (z, _) in diffs[lead].root_clusters()? {
            if z.norm() >= 1.0 - BOUNDARY_BAND {
                continue;
            }
            let hit = diffs.iter().all(|d| d.eval(z).norm() <= HIT_TOL * r);
            if hit {
                let m = self.multiplicity(z).unwrap_or(u32::MAX);
                out.entries.push((z, m));
            }
        }
        out.sort();
        Ok(out)
    }

    /// `zeta -> f(zeta / r)`, defined on the enlarged radius `r R`.
    pub fn surgery_shrink(&self, r: f64) -> Result<Self> {
        if !(r > 1.0) {
            return Err(domain_err!("shrink factor must exceed 1, got {r}"));
        }
        if r > self.overshoot {
            return Err(domain_err!(
                "shrink factor {r} exceeds the disc radius {}",
                self.overshoot
            ));
        }
        let s = Complex64::new(1.0 / r, 0.0);
        Ok(AnalyticDisc {
            coords: self.coords.iter().map(|p| p.rescale_argument(s)).collect(),
            degree: self.degree,
            overshoot: self.overshoot * r,
        })
    }

    /// `zeta -> f(zeta (zeta - a))`; hits the center at both `0` and `a`.
    pub fn surgery_zero_split(&self, a: Complex64) -> Result<Self> {
        let m = a.norm();
        if m == 0.0 || m >= 1.0 {
            return Err(domain_err!("split point must satisfy 0 < |a| < 1, got {a}"));
        }
        if 1.0 + m >= self.overshoot {
            return Err(domain_err!(
                "zeta(zeta - a) leaves the disc radius {} (need 1 + |a| < R)",
                self.overshoot
            ));
        }
        // largest rho with rho (rho + |a|) <= R
        let rho = 0.5 * (-m + (m * m + 4.0 * self.overshoot).sqrt());
        let q = Poly::new(vec![Complex64::new(0.0, 0.0), -a, Complex64::new(1.0, 0.0)]);
        let coords: Vec<Poly> = self.coords.iter().map(|p| p.compose(&q)).collect();
        Ok(AnalyticDisc {
            coords,
            degree: self.degree * 2,
            overshoot: rho,
        })
    }

    /// Nonconstant disc `zeta -> x + eps zeta (zeta - a) e_1` through `x` at
    /// `0` and `a`. `eps` is halved until the disc fits in `domain`.
    pub fn surgery_constant_replace(
        domain: &Domain,
        x: &CPoint,
        a: Complex64,
        eps: f64,
        overshoot: f64,
    ) -> Result<Self> {
        if !domain.contains(x, 0.0)? {
            return Err(domain_err!("center {x:?} is not interior"));
        }
        let m = a.norm();
        if m == 0.0 || m >= 1.0 {
            return Err(domain_err!("split point must satisfy 0 < |a| < 1, got {a}"));
        }
        if !(eps > 0.0) {
            return Err(domain_err!("perturbation size must be positive"));
        }
        let mut e = eps;
        for _ in 0..64 {
            let mut coeffs: Vec<Vec<Complex64>> =
                x.coords().iter().map(|&c| vec![c]).collect();
            coeffs[0] = vec![x[0], -a * e, Complex64::new(e, 0.0)];
            let f = AnalyticDisc::new(coeffs, overshoot)?;
            if domain.disc_contained(&f, 0.0, 256)? {
                return Ok(f);
            }
            e *= 0.5;
        }
        Err(domain_err!("no admissible perturbation size below {eps}"))
    }
}
