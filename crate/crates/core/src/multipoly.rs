//! Sparse polynomials in several complex variables.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::error::{domain_err, Result};
use crate::poly::Poly;

type Triple = (Vec<u32>, f64, f64);

/// `sum_k c_k z^{alpha_k}`; serialized as `(multi-index, re, im)` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Triple>", into = "Vec<Triple>")]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl TryFrom<Vec<Triple>> for Polynomial {
    type Error = crate::error::Error;
    fn try_from(v: Vec<Triple>) -> Result<Self> {
        let nvars = v.first().map(|t| t.0.len()).unwrap_or(0);
        Polynomial::new(
            nvars,
            v.into_iter()
                .map(|(e, re, im)| (e, Complex64::new(re, im)))
                .collect(),
        )
    }
}

impl From<Polynomial> for Vec<Triple> {
    fn from(p: Polynomial) -> Self {
        p.terms.into_iter().map(|(e, c)| (e, c.re, c.im)).collect()
    }
}

impl Polynomial {
    /// Collects like terms and drops exact zeros.
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Result<Self> {
        if nvars == 0 {
            return Err(domain_err!("polynomial needs at least one variable"));
        }
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(domain_err!(
                    "multi-index {e:?} does not have {nvars} entries"
                ));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(domain_err!("non-finite coefficient"));
            }
            *acc.entry(e).or_default() += c;
        }
        Ok(Polynomial {
            nvars,
            terms: acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect(),
        })
    }

    /// The coordinate function `z_i`.
    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Polynomial {
            nvars,
            terms: vec![(e, Complex64::new(1.0, 0.0))],
        }
    }

    /// `c z^e` with a single term.
    pub fn monomial(c: Complex64, e: Vec<u32>) -> Self {
        Polynomial {
            nvars: e.len(),
            terms: vec![(e, c)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        Polynomial {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial::new(self.nvars, terms).expect("same arity")
    }

    pub fn eval(&self, z: &CPoint) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z.coords())
                    .fold(*c, |acc, (&k, zi)| acc * zi.powu(k))
            })
            .sum()
    }

    /// Sum of `|c_alpha| |z|^alpha`, the natural size of `eval(z)`.
    pub fn magnitude_bound(&self, z: &CPoint) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z.coords())
                    .fold(c.norm(), |acc, (&k, zi)| acc * zi.norm().powi(k as i32))
            })
            .sum()
    }

    /// Expansion of `h -> g(p + h)` as a polynomial in `h`.
    pub fn taylor_shift(&self, p: &CPoint) -> Polynomial {
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, c) in &self.terms {
            // product over variables of sum_b binom(e_i, b) p_i^(e_i - b) h_i^b
            let mut partial: Vec<(Vec<u32>, Complex64)> = vec![(Vec::new(), *c)];
            for (i, &k) in e.iter().enumerate() {
                let pi = p[i];
                let mut next = Vec::with_capacity(partial.len() * (k as usize + 1));
                for (idx, coef) in &partial {
                    let mut binom = 1.0;
                    for b in 0..=k {
                        let mut idx2 = idx.clone();
                        idx2.push(b);
                        next.push((idx2, coef * binom * pi.powu(k - b)));
                        binom = binom * (k - b) as f64 / (b + 1) as f64;
                    }
                }
                partial = next;
            }
            for (idx, coef) in partial {
                *acc.entry(idx).or_default() += coef;
            }
        }
        Polynomial {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect(),
        }
    }

    /// Composition with a polynomial map `zeta -> (q_1(zeta), ..., q_n(zeta))`.
    pub fn compose(&self, map: &[Poly]) -> Poly {
        assert_eq!(map.len(), self.nvars, "arity mismatch in composition");
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for (i, q) in map.iter().enumerate() {
            let max_k = self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0);
            let mut pw = vec![Poly::constant(Complex64::new(1.0, 0.0))];
            for k in 1..=max_k as usize {
                let next = &pw[k - 1] * q;
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn serde_triples() {
        let p: Polynomial = serde_json::from_str("[[[2,0],1.0,0.0],[[0,2],1.0,0.0],[[0,0],-0.25,0.0]]").unwrap();
        assert_eq!(p.total_degree(), 2);
        assert!(p.eval(&CPoint::real(&[0.5, 0.0])).norm() < 1e-15);
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Polynomial>("[[[1],1.0,0.0],[[0,1],1.0,0.0]]").is_err());
    }

    #[test]
    fn shift_and_compose() {
        // z1 z2 at (0, 0.4): shifted = 0.4 h1 + h1 h2
        let g = Polynomial::monomial(c(1.0), vec![1, 1]);
        let s = g.taylor_shift(&CPoint::real(&[0.0, 0.4]));
        assert_eq!(s.terms().len(), 2);
        assert!(s.terms().iter().any(|(e, v)| e == &vec![1, 0] && (v - c(0.4)).norm() < 1e-15));
        let f = vec![Poly::new(vec![c(0.0), c(0.0), c(1.0)]), Poly::new(vec![c(0.1)])];
        let comp = g.compose(&f);
        assert!((comp.eval(c(0.5)) - c(0.025)).norm() < 1e-15);
    }
}
