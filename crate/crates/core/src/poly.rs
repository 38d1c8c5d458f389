//! Univariate complex polynomials and simultaneous root finding.
//!
//! Roots come from Aberth–Ehrlich iteration. Multiple roots are recovered by
//! merging nearby iterates: anything closer than [`CLUSTER_TOL`] is merged
//! outright, and looser groups (up to [`MULTIPLE_ROOT_TOL`]) are merged only
//! when the Taylor coefficients at the group centroid confirm a zero of the
//! corresponding order.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Roots closer than this (relative to `max(1, |z|)`) are one root.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Candidate radius for multiple roots smeared out by rounding.
pub const MULTIPLE_ROOT_TOL: f64 = 1e-4;
/// Relative size below which a Taylor coefficient counts as zero.
pub const TAYLOR_ZERO_TOL: f64 = 1e-7;

const MAX_ABERTH_ITERS: usize = 800;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial with coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every coefficient is below `rel` times `reference`.
    pub fn negligible(&self, rel: f64, reference: f64) -> bool {
        self.scale() <= rel * reference
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        }
    }

    /// Coefficients of `h -> p(c + h)`.
    pub fn taylor_shift(&self, c: Complex64) -> Poly {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let hi = t[j + 1];
                t[j] += c * hi;
            }
        }
        Poly { coeffs: t }
    }

    /// Coefficients of `z -> p(s z)`.
    pub fn rescale_argument(&self, s: Complex64) -> Poly {
        let mut pw = ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * pw;
                pw *= s;
                v
            })
            .collect();
        Poly { coeffs }
    }

    /// Composition `p(q(z))`.
    pub fn compose(&self, q: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::default(), |acc, &c| &(&acc * q) + &Poly::constant(c))
    }

    pub fn powu(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(ONE), |acc, _| &acc * self)
    }

    /// Order of vanishing at `c`. The `k`-th Taylor coefficient counts as
    /// zero when it is below `rel_tol` times the same coefficient of
    /// `sum |a_i| z^i` at `|c|`, which bounds its evaluation error; a global
    /// scale would let high-degree terms swamp the low ones. `None` for the
    /// zero polynomial.
    pub fn order_at(&self, c: Complex64, rel_tol: f64) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let t = self.taylor_shift(c);
        t.coeffs
            .iter()
            .zip(self.taylor_bounds(c.norm()))
            .position(|(v, b)| v.norm() > rel_tol * b)
    }

    /// Taylor coefficients of `sum |a_i| z^i` at `r`: the `k`-th bounds the
    /// `k`-th Taylor coefficient at any point of modulus `r`.
    pub fn taylor_bounds(&self, r: f64) -> Vec<f64> {
        Poly::new(self.coeffs.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect())
            .taylor_shift(Complex64::new(r, 0.0))
            .coeffs
            .iter()
            .map(|b| b.re)
            .collect()
    }

    /// All complex roots, repeated according to the iteration's output.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let (zeros_at_origin, core) = self.split_trivial()?;
        let mut roots = vec![ZERO; zeros_at_origin];
        roots.extend(aberth(&core)?);
        Ok(roots)
    }

    /// Distinct roots with their orders.
    pub fn root_clusters(&self) -> Result<Vec<(Complex64, u32)>> {
        let (zeros_at_origin, core) = self.split_trivial()?;
        let mut out = Vec::new();
        if zeros_at_origin > 0 {
            out.push((ZERO, zeros_at_origin as u32));
        }
        let core_poly = Poly::new(core);
        let raw = aberth(&core_poly.coeffs)?;
        out.extend(cluster_roots(&core_poly, &raw)?);
        Ok(out)
    }

    /// Strips exact zeros at the origin and negligible leading coefficients
    /// (roots escaping to infinity).
    fn split_trivial(&self) -> Result<(usize, Vec<Complex64>)> {
        let Some(deg) = self.degree() else {
            return Err(Error::Degenerate("roots of the zero polynomial".into()));
        };
        let low = self.coeffs.iter().position(|c| *c != ZERO).unwrap_or(0);
        let scale = self.scale();
        let mut hi = deg;
        while hi > low && self.coeffs[hi].norm() <= 1e-14 * scale {
            hi -= 1;
        }
        Ok((low, self.coeffs[low..=hi].to_vec()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(ZERO)
                    + rhs.coeffs.get(i).copied().unwrap_or(ZERO)
            })
            .collect();
        Poly { coeffs }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::default();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }
}

/// Aberth–Ehrlich iteration on a polynomial with nonzero constant and
/// leading coefficients.
fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len().saturating_sub(1);
    match n {
        0 => return Ok(vec![]),
        1 => return Ok(vec![-c[0] / c[1]]),
        _ => {}
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let p = Poly::new(monic);
    let abs_coeffs: Vec<f64> = p.coeffs.iter().map(|v| v.norm()).collect();

    // Initial radius: geometric mean of root moduli, capped by the Fujiwara bound.
    let r0 = abs_coeffs[0].powf(1.0 / n as f64);
    let fujiwara = (0..n)
        .map(|k| {
            let v = abs_coeffs[k] / if k == 0 { 2.0 } else { 1.0 };
            v.powf(1.0 / (n - k) as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let r = r0.min(fujiwara).max(1e-300);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];

    let backward_small = |zk: Complex64, pk: Complex64| -> bool {
        let m = zk.norm();
        let bound = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * m + a);
        pk.norm() <= 16.0 * f64::EPSILON * bound
    };

    for _ in 0..MAX_ABERTH_ITERS {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (pk, dpk) = p.eval_with_derivative(z[k]);
            if pk == ZERO {
                done[k] = true;
                continue;
            }
            let ratio = pk / dpk;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == ZERO {
                        Complex64::new(1e300, 0.0)
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let w = ratio / (ONE - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // Perturb away from a collision or stationary point.
                let bump = Complex64::new(1e-7 * (1.0 + z[k].norm()), 1e-7);
                z[k] += bump;
                all_done = false;
                continue;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[k].norm() || backward_small(z[k], p.eval(z[k])) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    for &zk in &z {
        if !backward_small(zk, p.eval(zk)) {
            // Multiple roots stall at rounding level; accept a relaxed bound.
            let m = zk.norm();
            let bound = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * m + a);
            if p.eval(zk).norm() > 1e-10 * bound {
                return Err(Error::Numeric(format!(
                    "root iteration did not converge (degree {n}, residual {:.3e})",
                    p.eval(zk).norm() / bound
                )));
            }
        }
    }
    Ok(z)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Single-linkage grouping of `roots` at relative tolerance `tol`.
fn link_groups(roots: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if close(roots[i], roots[j], tol) {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut head: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match head[r] {
            Some(g) => groups[g].push(i),
            None => {
                head[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn centroid(roots: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| roots[i]).sum::<Complex64>() / idx.len() as f64
}

/// Merges raw iterates into distinct roots with orders.
///
/// Iterates within [`CLUSTER_TOL`] must form a root of matching order or the
/// call fails. Beyond that, clusters are merged level by level up to
/// [`MULTIPLE_ROOT_TOL`], each merge only when the Taylor coefficients at
/// the combined centroid confirm the combined order.
fn cluster_roots(p: &Poly, raw: &[Complex64]) -> Result<Vec<(Complex64, u32)>> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for tight in link_groups(raw, CLUSTER_TOL) {
        let c = centroid(raw, &tight);
        let k = tight.len();
        if k > 1 && p.order_at(c, TAYLOR_ZERO_TOL).map_or(true, |ord| ord < k) {
            return Err(Error::Numeric(format!(
                "root cluster of size {k} at {c} is not confirmed by derivatives"
            )));
        }
        clusters.push((c, k));
    }
    for tol in [1e-7, 1e-6, MULTIPLE_ROOT_TOL / 10.0, MULTIPLE_ROOT_TOL] {
        let centers: Vec<Complex64> = clusters.iter().map(|c| c.0).collect();
        let mut next = Vec::with_capacity(clusters.len());
        for group in link_groups(&centers, tol) {
            if group.len() == 1 {
                next.push(clusters[group[0]]);
                continue;
            }
            let m: usize = group.iter().map(|&i| clusters[i].1).sum();
            let c = group
                .iter()
                .map(|&i| clusters[i].0 * clusters[i].1 as f64)
                .sum::<Complex64>()
                / m as f64;
            let rel = TAYLOR_ZERO_TOL.max(10.0 * m as f64 * tol);
            if p.order_at(c, rel).is_some_and(|ord| ord >= m) {
                next.push((c, m));
            } else {
                next.extend(group.iter().map(|&i| clusters[i]));
            }
        }
        clusters = next;
    }
    Ok(clusters
        .into_iter()
        .map(|(c, k)| (polish(p, c, k), k as u32))
        .collect())
}

/// Newton on the `(k-1)`-th derivative, where a root of order `k` is simple.
/// Steps that would leave the cluster radius are rejected.
fn polish(p: &Poly, c: Complex64, k: usize) -> Complex64 {
    if k < 2 {
        return c;
    }
    let mut d = p.clone();
    for _ in 1..k {
        d = d.derivative();
    }
    let radius = MULTIPLE_ROOT_TOL * c.norm().max(1.0);
    let mut z = c;
    for _ in 0..8 {
        let (v, dv) = d.eval_with_derivative(z);
        if dv == ZERO {
            break;
        }
        let next = z - v / dv;
        if !(next.re.is_finite() && next.im.is_finite()) || (next - c).norm() > radius {
            break;
        }
        if next == z {
            break;
        }
        z = next;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_root_of_high_degree_polynomial_is_simple() {
        // (z - 0.875)(1 + 0.01 z^47): the shifted top term dwarfs p'(0.875)
        let root = Poly::new(vec![c(-0.875, 0.0), c(1.0, 0.0)]);
        let mut tail = vec![c(0.0, 0.0); 48];
        tail[0] = c(1.0, 0.0);
        tail[47] = c(0.01, 0.0);
        let p = &root * &Poly::new(tail);
        assert_eq!(p.order_at(c(0.875, 0.0), TAYLOR_ZERO_TOL), Some(1));
        let inside: Vec<_> = p
            .root_clusters()
            .unwrap()
            .into_iter()
            .filter(|(z, _)| z.norm() < 1.0)
            .collect();
        assert_eq!(inside.len(), 1);
        assert_eq!(inside[0].1, 1);
        assert!((inside[0].0 - c(0.875, 0.0)).norm() < 1e-12);
    }

    fn from_roots(roots: &[Complex64]) -> Poly {
        roots.iter().fold(Poly::constant(ONE), |acc, &r| {
            &acc * &Poly::new(vec![-r, ONE])
        })
    }

    #[test]
    fn eval_and_shift() {
        let p = Poly::new(vec![c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.eval(c(1.0, 0.0)), ZERO);
        let t = p.taylor_shift(c(1.0, 0.0));
        assert!(t.coeffs()[0].norm() < 1e-15 && t.coeffs()[1].norm() < 1e-15);
        assert_eq!(p.order_at(c(1.0, 0.0), 1e-9), Some(2));
        assert_eq!(Poly::default().order_at(ZERO, 1e-9), None);
        let q = Poly::new(vec![ZERO, c(2.0, 0.0)]);
        let pq = p.compose(&q);
        assert!((pq.eval(c(0.3, 0.0)) - p.eval(c(0.6, 0.0))).norm() < 1e-14);
    }

    #[test]
    fn simple_and_zero_roots() {
        let p = Poly::new(vec![ZERO, ZERO, c(-0.25, 0.0), ZERO, ONE]);
        let mut cl = p.root_clusters().unwrap();
        cl.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(cl.len(), 3);
        assert_eq!(cl[1], (ZERO, 2));
        assert!((cl[0].0 - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((cl[2].0 - c(0.5, 0.0)).norm() < 1e-14);
        assert!(Poly::default().roots().is_err());
        assert!(Poly::constant(ONE).roots().unwrap().is_empty());
    }

    #[test]
    fn multiple_roots_are_merged() {
        let r = [c(0.3, 0.2), c(0.3, 0.2), c(-0.5, 0.1), c(-0.5, 0.1), c(-0.5, 0.1), c(0.9, -0.4)];
        let cl = from_roots(&r).root_clusters().unwrap();
        let mut orders: Vec<u32> = cl.iter().map(|x| x.1).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 3]);
        for (z, k) in cl {
            let expected = r.iter().filter(|&&q| (q - z).norm() < 1e-4).count();
            assert_eq!(expected as u32, k);
        }
    }

    proptest! {
        #[test]
        fn recovers_random_simple_roots(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..9)) {
            let roots: Vec<Complex64> = v.iter().map(|&(a, b)| c(a, b)).collect();
            // keep roots well separated
            for i in 0..roots.len() {
                for j in 0..i {
                    prop_assume!((roots[i] - roots[j]).norm() > 1e-2);
                }
            }
            let p = from_roots(&roots);
            let found = p.root_clusters().unwrap();
            prop_assert_eq!(found.len(), roots.len());
            for r in &roots {
                let best = found.iter().map(|f| (f.0 - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-9, "{}", best);
            }
        }
    }
}
