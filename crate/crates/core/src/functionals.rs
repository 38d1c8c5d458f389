//! Disc functionals: Poisson means, Lelong sums, divisor Riesz sums, and the
//! disc potential built from pulled-back poles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{mobius_modulus, CPoint};
use crate::disc::{AnalyticDisc, PreimageList, BOUNDARY_BAND, DEGENERATE_TOL, HIT_TOL};
use crate::domain::{Domain, DEFAULT_SAMPLES};
use crate::error::{domain_err, Error, Result};
use crate::multipoly::Polynomial;
use crate::subspace::{ComplexSubspace, WeightFunction};

/// Floor substituted for `-inf` samples in Poisson quadrature.
pub const POISSON_CLIP: f64 = -1e6;
pub const DEFAULT_NODES: usize = 512;
/// Taylor threshold for multiplicities at numerically located hits.
const HIT_NU_TOL: f64 = 1e-6;

/// Weighted poles `(zeta_k, w_k)` pulled back to the unit disc.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoleData {
    pub entries: Vec<(Complex64, f64)>,
}

impl PoleData {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum w_k log |zeta_k|`.
    pub fn log_sum(&self) -> f64 {
        self.entries.iter().map(|(z, w)| w * z.norm().ln()).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    fn from_preimages(pre: &PreimageList, weight: impl Fn(Complex64, u32) -> f64) -> Self {
        PoleData {
            entries: pre
                .entries
                .iter()
                .map(|&(z, k)| (z, weight(z, k)))
                .filter(|(_, w)| *w > 0.0)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    /// Blaschke-type condition `sum w_k (1 - |zeta_k|) < inf`; automatic for
    /// finitely many poles.
    pub convergent: bool,
    /// Some quadrature samples were `-inf` and got clipped.
    pub clipped: bool,
}

impl FunctionalValue {
    fn finite_sum(value: f64) -> Self {
        FunctionalValue {
            value,
            convergent: true,
            clipped: false,
        }
    }
}

/// Circle mean of `phi o f` by the trapezoidal rule on `nodes` points.
pub fn poisson<F>(phi: F, f: &AnalyticDisc, nodes: usize, domain: &Domain) -> Result<FunctionalValue>
where
    F: Fn(&CPoint) -> f64,
{
    if nodes < 16 {
        return Err(domain_err!("Poisson quadrature needs at least 16 nodes, got {nodes}"));
    }
    if !domain.disc_contained(f, 0.0, DEFAULT_SAMPLES)? {
        return Err(domain_err!("disc is not contained in the domain"));
    }
    Ok(poisson_unchecked(&phi, f, nodes))
}

pub(crate) fn poisson_unchecked<F>(phi: &F, f: &AnalyticDisc, nodes: usize) -> FunctionalValue
where
    F: Fn(&CPoint) -> f64 + ?Sized,
{
    let mut clipped = false;
    let sum: f64 = (0..nodes)
        .map(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
            let v = phi(&f.eval_unchecked(z));
            if v < POISSON_CLIP {
                clipped = true;
                POISSON_CLIP
            } else {
                v
            }
        })
        .sum();
    FunctionalValue {
        value: sum / nodes as f64,
        convergent: true,
        clipped,
    }
}

fn neg_inf_value() -> (FunctionalValue, PoleData) {
    (FunctionalValue::finite_sum(f64::NEG_INFINITY), PoleData::default())
}

/// Lelong functional `sum_zeta alpha(f(zeta)) m_zeta(f) log |zeta|`.
pub fn lelong(alpha: &WeightFunction, f: &AnalyticDisc) -> Result<(FunctionalValue, PoleData)> {
    let poles = match alpha {
        WeightFunction::Points { support } => {
            let mut entries = Vec::new();
            for (a, w) in support {
                match f.point_preimages(a) {
                    Ok(pre) => entries.extend(pre.entries.iter().map(|&(z, m)| (z, w * m as f64))),
                    Err(Error::Degenerate(_)) => return Ok(neg_inf_value()),
                    Err(e) => return Err(e),
                }
            }
            PoleData { entries }
        }
        WeightFunction::Multiplicity { subspace } => {
            let Some(pre) = subspace_hits(subspace, f)? else {
                return Ok(neg_inf_value());
            };
            PoleData::from_preimages(&pre, |z, m| {
                let p = f.eval_unchecked(z);
                let nu = subspace
                    .generators()
                    .iter()
                    .map(|g| order_loose(g, &p))
                    .min()
                    .unwrap_or(0);
                nu as f64 * m as f64
            })
        }
        WeightFunction::Indicator { subspace } => {
            let Some(pre) = subspace_hits(subspace, f)? else {
                return Ok(neg_inf_value());
            };
            PoleData::from_preimages(&pre, |_, m| m as f64)
        }
    };
    let value = poles.log_sum();
    Ok((FunctionalValue::finite_sum(value), poles))
}

fn order_loose(g: &Polynomial, p: &CPoint) -> u32 {
    let shifted = g.taylor_shift(p);
    let scale = shifted.terms().iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    shifted
        .terms()
        .iter()
        .filter(|(_, c)| c.norm() > HIT_NU_TOL * scale)
        .map(|(e, _)| e.iter().sum::<u32>())
        .min()
        .unwrap_or(0)
}

/// Points of the open disc where every generator vanishes along `f`, with the
/// multiplicity of `f` there. `None` when `f` lies inside the zero set.
fn subspace_hits(a: &ComplexSubspace, f: &AnalyticDisc) -> Result<Option<PreimageList>> {
    if a.nvars() != f.dim() {
        return Err(domain_err!("subspace in C^{} for a disc in C^{}", a.nvars(), f.dim()));
    }
    let r = f
        .coordinate_polys()
        .iter()
        .map(|p| p.coeffs().iter().map(|c| c.norm()).sum::<f64>())
        .fold(1.0, f64::max);
    let corner = CPoint::real(&vec![r; f.dim()]);
    let comps: Vec<(crate::poly::Poly, f64)> = a
        .generators()
        .iter()
        .map(|g| (g.compose(f.coordinate_polys()), g.magnitude_bound(&corner)))
        .filter(|(c, reference)| !c.negligible(DEGENERATE_TOL, *reference))
        .collect();
    // fewest roots to sort through
    let Some((src, _)) = comps
        .iter()
        .min_by_key(|(c, _)| c.degree().unwrap_or(usize::MAX))
    else {
        return Ok(None);
    };
    let mut out = PreimageList::default();
    for (z, _) in src.root_clusters()? {
        if z.norm() >= 1.0 - BOUNDARY_BAND {
            continue;
        }
        let hit = comps.iter().all(|(c, reference)| c.eval(z).norm() <= HIT_TOL * reference);
        if hit {
            let m = f.multiplicity(z).unwrap_or(u32::MAX);
            out.entries.push((z, m));
        }
    }
    Ok(Some(out))
}

/// Riesz functional of the divisor `{h = 0}`: `sum order(zeta) log |zeta|`
/// over the roots of `h o f` in the open disc.
pub fn riesz_divisor(a: &ComplexSubspace, f: &AnalyticDisc) -> Result<(FunctionalValue, PoleData)> {
    if !a.is_divisor() {
        return Err(domain_err!("the Riesz functional needs a single generator"));
    }
    match f.preimages(&a.generators()[0]) {
        Ok(pre) => {
            let poles = PoleData::from_preimages(&pre, |_, k| k as f64);
            Ok((FunctionalValue::finite_sum(poles.log_sum()), poles))
        }
        // the pulled-back current is taken to be zero
        Err(Error::Degenerate(_)) => Ok((FunctionalValue::finite_sum(0.0), PoleData::default())),
        Err(e) => Err(e),
    }
}

/// `v(zeta) = sum w_k log |(zeta - zeta_k)/(1 - conj(zeta_k) zeta)|`.
pub fn disc_potential(poles: &PoleData, zeta: Complex64) -> Result<f64> {
    if !(zeta.norm() < 1.0) {
        return Err(domain_err!("potential evaluated at {zeta}, outside the open disc"));
    }
    Ok(poles
        .entries
        .iter()
        .map(|&(zk, w)| {
            if zk == zeta {
                f64::NEG_INFINITY
            } else {
                w * mobius_modulus(zeta, zk).ln()
            }
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BlaschkeProduct;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Degree-1 disc `zeta -> (x - zeta)` scaled: zero at `x`, center `x`.
    fn linear_zero_at(x: f64) -> AnalyticDisc {
        AnalyticDisc::new(vec![vec![c(x), c(-1.0)]], 1.2).unwrap()
    }

    #[test]
    fn poisson_examples() {
        let d1 = Domain::ball(1);
        let f = AnalyticDisc::new(vec![vec![c(0.1), c(0.5)]], 1.2).unwrap();
        assert!((poisson(|_| 3.5, &f, 512, &d1).unwrap().value - 3.5).abs() < 1e-14);
        let unit = AnalyticDisc::new(vec![vec![c(0.0), c(0.999)]], 1.0005).unwrap();
        let v = poisson(|z| z.norm_sqr(), &unit, 512, &d1).unwrap().value;
        assert!((v - 0.999f64.powi(2)).abs() < 1e-12);
        let d2 = Domain::ball(2);
        let g = AnalyticDisc::new(vec![vec![c(0.3), c(0.2)], vec![c(0.0)]], 1.2).unwrap();
        let v = poisson(|z| z[0].re, &g, 512, &d2).unwrap().value;
        let oracle: f64 = (0..4096)
            .map(|k| 0.3 + 0.2 * (2.0 * PI * k as f64 / 4096.0).cos())
            .sum::<f64>()
            / 4096.0;
        assert!((v - oracle).abs() < 1e-12 && (v - 0.3).abs() < 1e-12);
        let out = AnalyticDisc::new(vec![vec![c(0.5), c(0.9)]], 1.2).unwrap();
        assert!(poisson(|_| 0.0, &out, 512, &d1).is_err());
        let clipped = poisson(|_| f64::NEG_INFINITY, &f, 64, &d1).unwrap();
        assert!(clipped.clipped && clipped.value == POISSON_CLIP);
    }

    #[test]
    fn poisson_quadrature_converges() {
        let d = Domain::ball(2);
        let f = AnalyticDisc::new(
            vec![vec![c(0.1), c(0.3), c(-0.1)], vec![c(-0.2), Complex64::new(0.1, 0.2)]],
            1.05,
        )
        .unwrap();
        let phi = |z: &CPoint| (z[0] * z[1].conj()).re + z.norm_sqr().sin();
        let a = poisson(phi, &f, 256, &d).unwrap().value;
        let b = poisson(phi, &f, 512, &d).unwrap().value;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn lelong_examples() {
        let f = linear_zero_at(0.3);
        let alpha = WeightFunction::single(CPoint::origin(1));
        let (v, poles) = lelong(&alpha, &f).unwrap();
        assert!((v.value - 0.3f64.ln()).abs() < 1e-14);
        assert!((v.value + 1.203_972_804_325_936).abs() < 1e-12);
        assert_eq!(poles.entries.len(), 1);

        // diagonal Mobius disc through (0.5, 0.5) hitting the origin at 0.5
        let m = vec![c(0.5), c(-1.0)];
        let g = AnalyticDisc::new(vec![m.clone(), m], 1.5).unwrap();
        let alpha = WeightFunction::single(CPoint::origin(2));
        let (v, _) = lelong(&alpha, &g).unwrap();
        assert!((v.value - 0.5f64.ln()).abs() < 1e-14);

        let empty = WeightFunction::Points { support: vec![] };
        assert_eq!(lelong(&empty, &g).unwrap().0.value, 0.0);

        let k = AnalyticDisc::constant(&CPoint::origin(2), 1.5).unwrap();
        assert_eq!(lelong(&alpha, &k).unwrap().0.value, f64::NEG_INFINITY);
    }

    #[test]
    fn riesz_examples() {
        let f = linear_zero_at(0.3);
        let a = ComplexSubspace::coordinate_hyperplane(1, 0);
        assert!((riesz_divisor(&a, &f).unwrap().0.value - 0.3f64.ln()).abs() < 1e-14);

        let away = AnalyticDisc::new(vec![vec![c(0.5), c(0.2)], vec![c(0.0), c(0.3)]], 1.5).unwrap();
        let a2 = ComplexSubspace::coordinate_hyperplane(2, 0);
        assert_eq!(riesz_divisor(&a2, &away).unwrap().0.value, 0.0);

        let sq = ComplexSubspace::new(vec![Polynomial::monomial(c(1.0), vec![2, 0])]).unwrap();
        let m = AnalyticDisc::new(vec![vec![c(0.5), c(-1.0)], vec![c(0.3)]], 1.5).unwrap();
        let r = riesz_divisor(&sq, &m).unwrap().0.value;
        assert!((r - 2.0 * 0.5f64.ln()).abs() < 1e-10);
        let (l, _) = lelong(&WeightFunction::multiplicity(sq.clone()), &m).unwrap();
        assert!((l.value - 2.0 * 0.5f64.ln()).abs() < 1e-10);

        let inside = AnalyticDisc::new(vec![vec![c(0.0)], vec![c(0.1), c(0.5)]], 1.5).unwrap();
        assert_eq!(riesz_divisor(&a2, &inside).unwrap().0.value, 0.0);
        let two = ComplexSubspace::new(vec![Polynomial::coordinate(2, 0), Polynomial::coordinate(2, 1)]).unwrap();
        assert!(riesz_divisor(&two, &m).is_err());
    }

    #[test]
    fn potential_examples() {
        let p = PoleData { entries: vec![(c(0.3), 1.0)] };
        assert!((disc_potential(&p, c(0.0)).unwrap() - 0.3f64.ln()).abs() < 1e-15);
        assert_eq!(disc_potential(&p, c(0.3)).unwrap(), f64::NEG_INFINITY);
        let p = PoleData { entries: vec![(c(0.3), 1.0), (c(0.5), 2.0)] };
        let v = disc_potential(&p, c(0.0)).unwrap();
        assert!((v - (0.3f64.ln() + 2.0 * 0.5f64.ln())).abs() < 1e-14);
        assert!((v + 2.590_267_165_445_826).abs() < 1e-12);
        assert!(disc_potential(&p, c(1.0)).is_err());
    }

    /// Random disc in the bidisc with coefficients decaying like `rho^k`.
    fn random_disc(rng: &mut ChaCha8Rng, deg: usize) -> AnalyticDisc {
        let coeffs: Vec<Vec<Complex64>> = (0..2)
            .map(|_| {
                (0..=deg)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.3)
                    .collect()
            })
            .collect();
        let f = AnalyticDisc::new(coeffs, 1.01).unwrap();
        let g = Domain::polydisc(2).disc_gauge_max(&f, 256);
        let s = 0.95 / g.max(0.95);
        AnalyticDisc::new(
            f.coefficients()
                .into_iter()
                .map(|c| c.into_iter().map(|v| v * s).collect())
                .collect(),
            1.01,
        )
        .unwrap()
    }

    #[test]
    fn riesz_below_lelong_on_random_discs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let divisors = [
            ComplexSubspace::coordinate_hyperplane(2, 0),
            ComplexSubspace::new(vec![Polynomial::monomial(c(1.0), vec![2, 0])]).unwrap(),
        ];
        for _ in 0..300 {
            let deg = rng.gen_range(1..7);
            let f = random_disc(&mut rng, deg);
            for a in &divisors {
                let r = riesz_divisor(a, &f).unwrap().0.value;
                let (l, poles) = lelong(&WeightFunction::multiplicity(a.clone()), &f).unwrap();
                assert!(r <= l.value + 1e-6, "{r} > {}", l.value);
                let v0 = disc_potential(&poles, c(0.0)).unwrap();
                if l.value.is_finite() {
                    assert!((v0 - l.value).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn heavier_weights_lower_lelong() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let f = random_disc(&mut rng, 4);
            let a = f.evaluate(Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(0.0..6.0))).unwrap();
            let b = f.evaluate(Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(0.0..6.0))).unwrap();
            let light = WeightFunction::points(vec![(a.clone(), 1.0)]).unwrap();
            let heavy = WeightFunction::points(vec![(a, 1.5), (b, 0.5)]).unwrap();
            let l = lelong(&light, &f).unwrap().0.value;
            let h = lelong(&heavy, &f).unwrap().0.value;
            assert!(h <= l + 1e-12);
        }
    }

    #[test]
    fn blaschke_disc_poles() {
        // polynomial numerator of a Blaschke factor gives the same pole
        let b = BlaschkeProduct::from_zeros(&[(c(0.4), 1)]).unwrap();
        let f = linear_zero_at(0.4);
        let (v, _) = lelong(&WeightFunction::single(CPoint::origin(1)), &f).unwrap();
        assert!((v.value - b.eval(c(0.0)).unwrap().norm().ln()).abs() < 1e-14);
    }
}
