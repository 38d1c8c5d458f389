//! Complex subspaces cut out by polynomial generators, and pole weights.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::error::{domain_err, Error, Result};
use crate::multipoly::Polynomial;

/// Relative size below which a Taylor coefficient counts as zero.
pub const VANISHING_TOL: f64 = 1e-9;
/// Two points closer than this are the same support point.
pub const POINT_TOL: f64 = 1e-9;

/// Zero set of a list of polynomials, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Polynomial>", into = "Vec<Polynomial>")]
pub struct ComplexSubspace {
    generators: Vec<Polynomial>,
}

impl TryFrom<Vec<Polynomial>> for ComplexSubspace {
    type Error = Error;
    fn try_from(g: Vec<Polynomial>) -> Result<Self> {
        ComplexSubspace::new(g)
    }
}

impl From<ComplexSubspace> for Vec<Polynomial> {
    fn from(a: ComplexSubspace) -> Self {
        a.generators
    }
}

impl ComplexSubspace {
    pub fn new(generators: Vec<Polynomial>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(domain_err!("a subspace needs at least one generator"));
        };
        let n = first.nvars();
        if generators.iter().any(|g| g.nvars() != n) {
            return Err(domain_err!("generators in different numbers of variables"));
        }
        if generators.iter().any(|g| g.is_zero()) {
            return Err(domain_err!("zero generator"));
        }
        Ok(ComplexSubspace { generators })
    }

    /// The hyperplane `{z_i = 0}` in `C^n`.
    pub fn coordinate_hyperplane(n: usize, i: usize) -> Self {
        ComplexSubspace {
            generators: vec![Polynomial::coordinate(n, i)],
        }
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn nvars(&self) -> usize {
        self.generators[0].nvars()
    }

    /// Principal ideals are the toolkit's divisors.
    pub fn is_divisor(&self) -> bool {
        self.generators.len() == 1
    }

    pub fn contains(&self, p: &CPoint) -> Result<bool> {
        Ok(self.multiplicity_nu(p)? > 0)
    }

    /// Minimal vanishing order of the generators at `p`.
    pub fn multiplicity_nu(&self, p: &CPoint) -> Result<u32> {
        let mut best = u32::MAX;
        for g in &self.generators {
            best = best.min(vanishing_order(g, p)?);
            if best == 0 {
                break;
            }
        }
        Ok(best)
    }

    /// `max_i log(|g_i(p)| / M_i)`, plurisubharmonic and `<= 0` when the
    /// `M_i` bound the generators on the domain.
    pub fn log_max_generators(&self, p: &CPoint, bounds: &[f64]) -> Result<f64> {
        if bounds.len() != self.generators.len() {
            return Err(domain_err!(
                "{} bounds for {} generators",
                bounds.len(),
                self.generators.len()
            ));
        }
        if bounds.iter().any(|&m| !(m > 0.0)) {
            return Err(domain_err!("generator bounds must be positive"));
        }
        Ok(self
            .generators
            .iter()
            .zip(bounds)
            .map(|(g, m)| (g.eval(p).norm() / m).ln())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Coefficient bounds `sum |c_alpha| r^|alpha|` valid on `max_i |z_i| <= r`.
    pub fn sup_bounds(&self, r: f64) -> Vec<f64> {
        let corner = CPoint::real(&vec![r; self.nvars()]);
        self.generators
            .iter()
            .map(|g| g.magnitude_bound(&corner))
            .collect()
    }

    /// A point of the zero set near `x`, by damped Gauss–Newton on
    /// `sum |g_i|^2` from several jittered starts; the closest result wins.
    pub fn nearest_point(&self, x: &CPoint, seed: u64) -> Result<CPoint> {
        let n = x.dim();
        if n != self.nvars() {
            return Err(domain_err!("dimension mismatch"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(f64, CPoint)> = None;
        for k in 0..24 {
            let start = if k == 0 {
                x.clone()
            } else {
                let jitter: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.2)
                    .collect();
                &CPoint::from_vec_unchecked(jitter) + x
            };
            if let Some(p) = self.project(&start) {
                let d = (&p - x).norm();
                if best.as_ref().map_or(true, |(bd, _)| d < *bd - 1e-12) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p)
            .ok_or_else(|| Error::Numeric("projection onto the subspace failed".into()))
    }

    fn residual(&self, z: &CPoint) -> f64 {
        self.generators.iter().map(|g| g.eval(z).norm_sqr()).sum::<f64>()
    }

    fn project(&self, start: &CPoint) -> Option<CPoint> {
        let n = start.dim();
        let mut z = start.clone();
        let mut lambda = 1e-8;
        for _ in 0..200 {
            let res = self.residual(&z);
            let scale: f64 = self
                .generators
                .iter()
                .map(|g| g.magnitude_bound(&z).powi(2))
                .sum::<f64>()
                .max(1e-300);
            if res <= 1e-26 * scale {
                return Some(z);
            }
            // J^* J + lambda I, J^* g with the holomorphic Jacobian
            let mut jtj = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            let mut jtg = vec![Complex64::new(0.0, 0.0); n];
            for g in &self.generators {
                let val = g.eval(&z);
                let grad: Vec<Complex64> = (0..n).map(|i| partial(g, i, &z)).collect();
                for i in 0..n {
                    jtg[i] += grad[i].conj() * val;
                    for j in 0..n {
                        jtj[i][j] += grad[i].conj() * grad[j];
                    }
                }
            }
            let diag = (0..n).map(|i| jtj[i][i].re).fold(0.0, f64::max).max(1e-300);
            let mut improved = false;
            for _ in 0..30 {
                let mut m = jtj.clone();
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] += lambda * diag.max(1e-12);
                }
                let Some(step) = solve(m, jtg.iter().map(|v| -v).collect()) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand = &z + &CPoint::from_vec_unchecked(step);
                if self.residual(&cand) < res {
                    z = cand;
                    lambda = (lambda * 0.1).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                return None;
            }
        }
        None
    }
}

/// Holomorphic partial derivative `dg/dz_i` at `z`.
fn partial(g: &Polynomial, i: usize, z: &CPoint) -> Complex64 {
    g.terms()
        .iter()
        .filter(|(e, _)| e[i] > 0)
        .map(|(e, c)| {
            e.iter().enumerate().fold(*c, |acc, (j, &k)| {
                if j == i {
                    acc * k as f64 * z[j].powu(k - 1)
                } else {
                    acc * z[j].powu(k)
                }
            })
        })
        .sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Order of the Taylor expansion of `g` at `p`: the least total degree with
/// a coefficient above `VANISHING_TOL` times the largest one.
pub fn vanishing_order(g: &Polynomial, p: &CPoint) -> Result<u32> {
    if g.is_zero() {
        return Err(Error::Degenerate("vanishing order of the zero polynomial".into()));
    }
    if g.nvars() != p.dim() {
        return Err(domain_err!("dimension mismatch"));
    }
    let shifted = g.taylor_shift(p);
    let scale = shifted.terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Degenerate("polynomial cancels identically".into()));
    }
    Ok(shifted
        .terms()
        .iter()
        .filter(|(_, c)| c.norm() > VANISHING_TOL * scale)
        .map(|(e, _)| e.iter().sum::<u32>())
        .min()
        .unwrap_or(0))
}

/// Pole weight `alpha: X -> [0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// Finitely many points with positive weights.
    Points { support: Vec<(CPoint, f64)> },
    /// `nu_A`, the minimal vanishing order of the generators.
    Multiplicity { subspace: ComplexSubspace },
    /// 1 on the zero set, 0 elsewhere.
    Indicator { subspace: ComplexSubspace },
}

impl WeightFunction {
    pub fn points(support: Vec<(CPoint, f64)>) -> Result<Self> {
        for (i, (p, w)) in support.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(domain_err!("support weight {w} is not positive"));
            }
            if support[..i].iter().any(|(q, _)| (p - q).norm() <= POINT_TOL) {
                return Err(domain_err!("repeated support point {p:?}"));
            }
            if p.dim() != support[0].0.dim() {
                return Err(domain_err!("support points of different dimensions"));
            }
        }
        Ok(WeightFunction::Points { support })
    }

    /// `chi_{a}`.
    pub fn single(a: CPoint) -> Self {
        WeightFunction::Points {
            support: vec![(a, 1.0)],
        }
    }

    pub fn multiplicity(subspace: ComplexSubspace) -> Self {
        WeightFunction::Multiplicity { subspace }
    }

    /// Checks the invariants of deserialized values.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::Points { support } => Self::points(support.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn subspace(&self) -> Option<&ComplexSubspace> {
        match self {
            WeightFunction::Points { .. } => None,
            WeightFunction::Multiplicity { subspace } | WeightFunction::Indicator { subspace } => {
                Some(subspace)
            }
        }
    }

    /// True when the weight vanishes identically.
    pub fn is_zero(&self) -> bool {
        matches!(self, WeightFunction::Points { support } if support.is_empty())
    }

    pub fn eval(&self, p: &CPoint) -> Result<f64> {
        match self {
            WeightFunction::Points { support } => Ok(support
                .iter()
                .find(|(q, _)| (p - q).norm() <= POINT_TOL * (1.0 + q.norm()))
                .map_or(0.0, |(_, w)| *w)),
            WeightFunction::Multiplicity { subspace } => Ok(subspace.multiplicity_nu(p)? as f64),
            WeightFunction::Indicator { subspace } => {
                Ok(if subspace.contains(p)? { 1.0 } else { 0.0 })
            }
        }
    }

    /// Pointwise comparison `self <= other` where it can be decided exactly.
    pub fn dominated_by(&self, other: &WeightFunction) -> Option<bool> {
        match (self, other) {
            (WeightFunction::Points { support: a }, _) => Some(
                a.iter()
                    .all(|(p, w)| other.eval(p).map_or(false, |v| *w <= v)),
            ),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mono(e: Vec<u32>) -> Polynomial {
        Polynomial::monomial(c(1.0), e)
    }

    fn cusp_pair() -> ComplexSubspace {
        ComplexSubspace::new(vec![mono(vec![2, 0]), mono(vec![1, 1])]).unwrap()
    }

    #[test]
    fn vanishing_order_examples() {
        assert_eq!(vanishing_order(&mono(vec![2]), &CPoint::origin(1)).unwrap(), 2);
        assert_eq!(vanishing_order(&mono(vec![1, 1]), &CPoint::real(&[0.0, 0.7])).unwrap(), 1);
        assert_eq!(vanishing_order(&mono(vec![1, 1]), &CPoint::real(&[0.2, 0.7])).unwrap(), 0);
        let zero = Polynomial::new(1, vec![]).unwrap();
        assert!(matches!(vanishing_order(&zero, &CPoint::origin(1)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn nu_examples() {
        let a = ComplexSubspace::coordinate_hyperplane(2, 0);
        assert_eq!(a.multiplicity_nu(&CPoint::origin(2)).unwrap(), 1);
        assert_eq!(cusp_pair().multiplicity_nu(&CPoint::origin(2)).unwrap(), 2);
        assert_eq!(cusp_pair().multiplicity_nu(&CPoint::real(&[0.0, 0.4])).unwrap(), 1);
        assert_eq!(cusp_pair().multiplicity_nu(&CPoint::real(&[0.1, 0.4])).unwrap(), 0);
    }

    #[test]
    fn log_max_examples() {
        let a = ComplexSubspace::coordinate_hyperplane(2, 0);
        let v = a.log_max_generators(&CPoint::real(&[0.5, 0.6]), &[1.0]).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(
            a.log_max_generators(&CPoint::real(&[0.0, 0.6]), &[1.0]).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(a.log_max_generators(&CPoint::origin(2), &[0.0]).is_err());
    }

    #[test]
    fn divisor_examples() {
        assert!(ComplexSubspace::coordinate_hyperplane(2, 0).is_divisor());
        let two = ComplexSubspace::new(vec![mono(vec![1, 0]), mono(vec![0, 1])]).unwrap();
        assert!(!two.is_divisor());
        let curve = Polynomial::new(
            2,
            vec![(vec![2, 0], c(1.0)), (vec![0, 2], c(1.0)), (vec![0, 0], c(-0.25))],
        )
        .unwrap();
        assert!(ComplexSubspace::new(vec![curve]).unwrap().is_divisor());
    }

    #[test]
    fn nu_independent_of_unit_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let unit = Polynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![1, 0], c(1.0))]).unwrap();
        let a = cusp_pair();
        for _ in 0..50 {
            let on_a = rng.gen_bool(0.5);
            let z1 = if on_a { 0.0 } else { rng.gen_range(-0.5..0.5) };
            let p = CPoint::new(vec![c(z1), Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.5..0.5))]).unwrap();
            let b = ComplexSubspace::new(vec![a.generators()[0].mul(&unit), a.generators()[1].clone()]).unwrap();
            let b2 = ComplexSubspace::new(vec![a.generators()[0].clone(), a.generators()[1].mul(&unit)]).unwrap();
            let nu = a.multiplicity_nu(&p).unwrap();
            assert_eq!(b.multiplicity_nu(&p).unwrap(), nu);
            assert_eq!(b2.multiplicity_nu(&p).unwrap(), nu);
        }
    }

    #[test]
    fn nearest_point_on_curve() {
        let curve = ComplexSubspace::new(vec![Polynomial::new(
            2,
            vec![(vec![2, 0], c(1.0)), (vec![0, 2], c(1.0)), (vec![0, 0], c(-0.25))],
        )
        .unwrap()])
        .unwrap();
        let p = curve.nearest_point(&CPoint::origin(2), 3).unwrap();
        assert!(curve.generators()[0].eval(&p).norm() < 1e-12);
        assert!(p.norm() < 0.6, "{p:?}");
        let h = ComplexSubspace::coordinate_hyperplane(2, 0);
        let q = h.nearest_point(&CPoint::real(&[0.5, 0.6]), 3).unwrap();
        assert!((&q - &CPoint::real(&[0.0, 0.6])).norm() < 1e-10);
    }

    #[test]
    fn weights() {
        let w = WeightFunction::points(vec![(CPoint::origin(2), 2.0)]).unwrap();
        assert_eq!(w.eval(&CPoint::origin(2)).unwrap(), 2.0);
        assert_eq!(w.eval(&CPoint::real(&[0.1, 0.0])).unwrap(), 0.0);
        assert!(WeightFunction::points(vec![(CPoint::origin(1), -1.0)]).is_err());
        let one = WeightFunction::single(CPoint::origin(2));
        assert_eq!(one.dominated_by(&w), Some(true));
        assert_eq!(w.dominated_by(&one), Some(false));
        let s: WeightFunction = serde_json::from_str(
            r#"{"kind":"multiplicity","subspace":[[[[1,0],1.0,0.0]]]}"#,
        )
        .unwrap();
        assert_eq!(s.eval(&CPoint::real(&[0.0, 0.3])).unwrap(), 1.0);
    }
}
