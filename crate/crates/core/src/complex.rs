//! Complex points, hyperbolic geometry of the unit disc, finite Blaschke
//! products and the involutive automorphisms of the unit ball.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Error, Result};

/// Modulus tolerance for Blaschke products on the unit circle.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// A point of `C^n`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(domain_err!("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(domain_err!("non-finite coordinate in {:?}", coords));
        }
        Ok(CPoint(coords))
    }

    /// Point with real coordinates.
    pub fn real(coords: &[f64]) -> Self {
        CPoint(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        CPoint(vec![Complex64::new(0.0, 0.0); dim.max(1)])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<Complex64>) -> Self {
        CPoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian product `<self, other> = sum self_i conj(other_i)`.
    pub fn inner(&self, other: &CPoint) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> CPoint {
        CPoint(self.0.iter().map(|c| c * s).collect())
    }

    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        f.write_str(")")
    }
}

impl Index<usize> for CPoint {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &CPoint {
    type Output = CPoint;
    fn add(self, rhs: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CPoint {
    type Output = CPoint;
    fn sub(self, rhs: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CPoint {
    type Output = CPoint;
    fn mul(self, s: f64) -> CPoint {
        CPoint(self.0.iter().map(|c| c * s).collect())
    }
}

fn check_in_disc(z: Complex64, what: &str) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(domain_err!("{what} = {z} is not in the open unit disc"))
    }
}

/// Pseudo-hyperbolic distance `|(z - w) / (1 - conj(w) z)|`.
pub fn mobius_modulus(z: Complex64, w: Complex64) -> f64 {
    ((z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z)).norm()
}

/// Poincare distance `artanh |(z - w)/(1 - conj(w) z)|` of the unit disc.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_disc(z, "z")?;
    check_in_disc(w, "w")?;
    Ok(mobius_modulus(z, w).atanh())
}

/// Green function of the unit disc, `(1/2pi) log |(z - w)/(1 - conj(w) z)|`.
pub fn disc_green(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_disc(z, "z")?;
    check_in_disc(w, "w")?;
    if z == w {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(mobius_modulus(z, w).ln() / (2.0 * PI))
}

/// One factor `((a - z)/(1 - conj(a) z))^k` of a Blaschke product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusFactor {
    zero: Complex64,
    exponent: u32,
}

impl MobiusFactor {
    pub fn new(zero: Complex64, exponent: u32) -> Result<Self> {
        check_in_disc(zero, "Blaschke zero")?;
        if exponent == 0 {
            return Err(domain_err!("Blaschke exponent must be positive"));
        }
        Ok(MobiusFactor { zero, exponent })
    }

    pub fn zero(&self) -> Complex64 {
        self.zero
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        ((self.zero - z) / (one - self.zero.conj() * z)).powu(self.exponent)
    }
}

/// Finite Blaschke product; unimodular on the unit circle.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    factors: Vec<MobiusFactor>,
}

impl BlaschkeProduct {
    pub fn new(factors: Vec<MobiusFactor>) -> Self {
        BlaschkeProduct { factors }
    }

    /// Builds the product from `(zero, exponent)` pairs.
    pub fn from_zeros(zeros: &[(Complex64, u32)]) -> Result<Self> {
        let factors = zeros
            .iter()
            .map(|&(a, k)| MobiusFactor::new(a, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlaschkeProduct { factors })
    }

    pub fn factors(&self) -> &[MobiusFactor] {
        &self.factors
    }

    /// Sum of the exponents.
    pub fn total_exponent(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).sum()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() <= 1.0 + UNIMODULAR_TOL) {
            return Err(domain_err!("Blaschke argument {z} outside the closed disc"));
        }
        Ok(self
            .factors
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(z)))
    }

    /// Checks `|c|^mu e^beta <= |b| < e^beta` with `b = B(0)`, `c` the zero of
    /// largest modulus and `mu` the total exponent.
    pub fn rescale_check(&self, beta: f64) -> Result<bool> {
        if self.factors.is_empty() {
            return Err(domain_err!("rescale check on an empty Blaschke product"));
        }
        if !(beta < 0.0) {
            return Err(domain_err!("rescale level must be negative, got {beta}"));
        }
        let b = self.eval(Complex64::new(0.0, 0.0))?.norm();
        let c = self
            .factors
            .iter()
            .map(|f| f.zero.norm())
            .fold(0.0, f64::max);
        let mu = self.total_exponent() as i32;
        let level = beta.exp();
        Ok(c.powi(mu) * level <= b && b < level)
    }
}

/// Free-function form of [`BlaschkeProduct::eval`].
pub fn blaschke_eval(b: &BlaschkeProduct, z: Complex64) -> Result<Complex64> {
    b.eval(z)
}

/// Free-function form of [`BlaschkeProduct::rescale_check`].
pub fn blaschke_rescale_check(b: &BlaschkeProduct, beta: f64) -> Result<bool> {
    b.rescale_check(beta)
}

fn check_in_ball(z: &CPoint, what: &str) -> Result<()> {
    if z.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(domain_err!("{what} = {z:?} is not in the open unit ball"))
    }
}

/// The automorphism `T_a` of the unit ball exchanging `a` and the origin:
///
/// `T_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`, `s_a = sqrt(1 - |a|^2)`,
///
/// where `P_a` projects onto `span(a)` and `Q_a = I - P_a`. `T_0` is `z -> -z`.
pub fn ball_automorphism(a: &CPoint, z: &CPoint) -> Result<CPoint> {
    if a.dim() != z.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch {} vs {}",
            a.dim(),
            z.dim()
        )));
    }
    check_in_ball(a, "a")?;
    check_in_ball(z, "z")?;
    let aa = a.norm_sqr();
    if aa == 0.0 {
        return Ok(z.scale(Complex64::new(-1.0, 0.0)));
    }
    let za = z.inner(a);
    let sa = (1.0 - aa).sqrt();
    let proj = a.scale(za / aa);
    let denom = Complex64::new(1.0, 0.0) - za;
    let coords = a
        .coords()
        .iter()
        .zip(proj.coords())
        .zip(z.coords())
        .map(|((ai, pi), zi)| (ai - pi - sa * (zi - pi)) / denom)
        .collect();
    Ok(CPoint(coords))
}
