//! Disc-functional envelopes by multistart simplex descent over polynomial
//! discs pinned at the base point.
//!
//! Every reported upper bound is the exact functional value of a disc that
//! passed the containment certificate at the configured margin, so it bounds
//! the envelope (and hence the Green function) from above up to root-finding
//! accuracy.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::disc::AnalyticDisc;
use crate::domain::Domain;
use crate::error::{domain_err, Error, Result};
use crate::functionals::{self, FunctionalValue, PoleData};
use crate::multipoly::Polynomial;
use crate::reference;
use crate::simplex::{self, SimplexOptions};
use crate::subspace::{vanishing_order, ComplexSubspace, WeightFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Lelong,
    Poisson,
    Riesz,
}

/// Boundary data for the Dirichlet problem.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryFunction {
    Constant { value: f64 },
    /// `Re p(z) + offset`; pluriharmonic, so it is its own extension.
    RealPart { poly: Polynomial, offset: f64 },
    /// `|Re z_i|` on the boundary circle of a one-dimensional domain.
    AbsRealPart { coordinate: usize },
    /// Arbitrary boundary values on a one-dimensional domain.
    #[serde(skip)]
    Custom(Arc<dyn Fn(&CPoint) -> f64 + Send + Sync>),
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryFunction::Constant { value } => write!(f, "Constant({value})"),
            BoundaryFunction::RealPart { poly, offset } => write!(f, "RealPart({poly:?} + {offset})"),
            BoundaryFunction::AbsRealPart { coordinate } => write!(f, "AbsRealPart({coordinate})"),
            BoundaryFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl BoundaryFunction {
    pub fn eval(&self, z: &CPoint) -> f64 {
        match self {
            BoundaryFunction::Constant { value } => *value,
            BoundaryFunction::RealPart { poly, offset } => poly.eval(z).re + offset,
            BoundaryFunction::AbsRealPart { coordinate } => z[*coordinate].re.abs(),
            BoundaryFunction::Custom(h) => h(z),
        }
    }
}

/// Harmonic extension of boundary data into the domain.
#[derive(Debug, Clone)]
enum Extension {
    Itself(BoundaryFunction),
    /// `Re(c_0 + 2 sum_k c_k w^k)` with `w = (z - center)/radius` clamped to
    /// the closed unit disc.
    Fourier {
        center: Complex64,
        radius: f64,
        coeffs: Vec<Complex64>,
    },
}

/// Boundary samples for the Fourier extension; the series keeps half of them.
const FOURIER_SAMPLES: usize = 1024;

impl Extension {
    fn new(domain: &Domain, h: &BoundaryFunction) -> Result<Self> {
        if matches!(h, BoundaryFunction::Constant { .. } | BoundaryFunction::RealPart { .. }) {
            return Ok(Extension::Itself(h.clone()));
        }
        let (center, radius) = match domain {
            Domain::Ball { dim: 1 } | Domain::Polydisc { dim: 1 } => (ZERO, 1.0),
            Domain::AffineBall { center, radius } if center.dim() == 1 => (center[0], *radius),
            _ => {
                return Err(domain_err!(
                    "general boundary data is supported on one-dimensional discs only"
                ))
            }
        };
        let m = FOURIER_SAMPLES;
        let samples: Vec<f64> = (0..m)
            .map(|k| {
                let z = center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64);
                h.eval(&CPoint::from_vec_unchecked(vec![z]))
            })
            .collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(domain_err!("boundary data must be finite"));
        }
        let coeffs = (0..m / 2)
            .map(|j| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| Complex64::from_polar(*v, -2.0 * PI * (j * k % m) as f64 / m as f64))
                    .sum::<Complex64>()
                    / m as f64
            })
            .collect();
        Ok(Extension::Fourier {
            center,
            radius,
            coeffs,
        })
    }

    fn eval(&self, z: &CPoint) -> f64 {
        match self {
            Extension::Itself(h) => h.eval(z),
            Extension::Fourier {
                center,
                radius,
                coeffs,
            } => {
                let mut w = (z[0] - center) / radius;
                let r = w.norm();
                if r > 1.0 {
                    w /= r;
                }
                let tail = coeffs[1..]
                    .iter()
                    .rev()
                    .fold(ZERO, |acc, &c| (acc + c) * w);
                coeffs[0].re + 2.0 * tail.re
            }
        }
    }
}

/// Pointwise function used as the Poisson integrand.
pub type PoissonTarget = Arc<dyn Fn(&CPoint) -> f64 + Send + Sync>;

/// What the functional is built from.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Weights { weights: WeightFunction },
    Divisor { subspace: ComplexSubspace },
    Boundary { boundary: BoundaryFunction },
    #[serde(skip)]
    Function(PoissonTarget),
}

impl fmt::Debug for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Weights { weights } => write!(f, "Weights({weights:?})"),
            Payload::Divisor { subspace } => write!(f, "Divisor({subspace:?})"),
            Payload::Boundary { boundary } => write!(f, "Boundary({boundary:?})"),
            Payload::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub degree: usize,
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub iterations: usize,
    pub seed: u64,
    pub margin: f64,
    pub penalty: f64,
    /// Bound on each coefficient modulus of a search disc.
    pub coefficient_cap: f64,
    /// Radius `R > 1` on which search discs must stay inside the domain.
    pub overshoot: f64,
    /// Boundary circle samples for the containment certificate.
    pub samples: usize,
    /// Quadrature nodes for Poisson integrals.
    pub nodes: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            degree: 6,
            restarts: 24,
            iterations: 400,
            seed: 0,
            margin: 1e-3,
            penalty: 1e3,
            coefficient_cap: 2.0,
            overshoot: 1.0001,
            samples: crate::domain::DEFAULT_SAMPLES,
            nodes: functionals::DEFAULT_NODES,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.restarts == 0 || self.iterations == 0 {
            return Err(domain_err!("degree, restarts and iterations must be positive"));
        }
        if !(self.margin >= 0.0 && self.margin < 1.0) {
            return Err(domain_err!("margin must lie in [0, 1)"));
        }
        if !(self.penalty > 0.0 && self.coefficient_cap > 0.0) {
            return Err(domain_err!("penalty and coefficient cap must be positive"));
        }
        if !(self.overshoot > 1.0) {
            return Err(domain_err!("overshoot must exceed 1"));
        }
        if self.samples == 0 || self.nodes < 16 {
            return Err(domain_err!("need samples > 0 and at least 16 quadrature nodes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopeQuery {
    pub kind: FunctionalKind,
    pub domain: Domain,
    pub payload: Payload,
    pub x: CPoint,
    pub optimizer: OptimizerConfig,
    /// Discs evaluated as-is and used as extra starting points.
    pub warm_start: Vec<AnalyticDisc>,
}

impl EnvelopeQuery {
    pub fn new(kind: FunctionalKind, domain: Domain, payload: Payload, x: CPoint, optimizer: OptimizerConfig) -> Self {
        EnvelopeQuery {
            kind,
            domain,
            payload,
            x,
            optimizer,
            warm_start: Vec::new(),
        }
    }

    pub fn lelong(domain: Domain, weights: WeightFunction, x: CPoint, optimizer: OptimizerConfig) -> Self {
        Self::new(FunctionalKind::Lelong, domain, Payload::Weights { weights }, x, optimizer)
    }

    pub fn riesz(domain: Domain, subspace: ComplexSubspace, x: CPoint, optimizer: OptimizerConfig) -> Self {
        Self::new(FunctionalKind::Riesz, domain, Payload::Divisor { subspace }, x, optimizer)
    }

    pub fn with_warm_start(mut self, f: AnalyticDisc) -> Self {
        self.warm_start.push(f);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    pub upper: f64,
    pub witness: AnalyticDisc,
    pub poles: PoleData,
    pub lower: Option<f64>,
    pub evaluations: usize,
    pub converged: bool,
    /// Index of the winning restart; warm starts come after the restarts.
    pub restart: usize,
    /// Poisson quadrature clipped `-inf` samples on the witness.
    pub clipped: bool,
}

impl EnvelopeResult {
    /// Attaches a certified lower bound; fails if it exceeds the upper bound.
    pub fn with_lower(mut self, lower: f64) -> Result<Self> {
        if lower > self.upper + 1e-9 {
            return Err(Error::Numeric(format!(
                "lower bound {lower} exceeds upper bound {}",
                self.upper
            )));
        }
        self.lower = Some(lower);
        Ok(self)
    }

    pub fn bracket_width(&self) -> Option<f64> {
        self.lower.map(|l| self.upper - l)
    }
}

/// Value of a certified member of the competing class at `x`.
pub fn minorant_lower<U>(u: U, x: &CPoint) -> f64
where
    U: Fn(&CPoint) -> f64,
{
    u(x)
}

/// `inf_a alpha(a) k_X(x, a)` over the support, or over points of the zero
/// set found by projection and refined by simplex descent.
pub fn k_alpha_upper(alpha: &WeightFunction, x: &CPoint, domain: &Domain) -> Result<f64> {
    match alpha {
        WeightFunction::Points { support } => {
            if support.is_empty() {
                return Err(domain_err!("empty support"));
            }
            let mut best = f64::INFINITY;
            for (a, w) in support {
                best = best.min(w * reference::kobayashi(domain, x, a)?);
            }
            Ok(best)
        }
        WeightFunction::Multiplicity { subspace } | WeightFunction::Indicator { subspace } => {
            let weight = |a: &CPoint| -> f64 {
                match alpha {
                    WeightFunction::Multiplicity { .. } => {
                        subspace.multiplicity_nu(a).map(|v| v.max(1) as f64).unwrap_or(1.0)
                    }
                    _ => 1.0,
                }
            };
            let cost = |p: &[f64]| -> f64 {
                let start = params_to_point(p);
                let Ok(a) = subspace.nearest_point(&start, 0) else {
                    return f64::INFINITY;
                };
                if !domain.contains(&a, 0.0).unwrap_or(false) {
                    return f64::INFINITY;
                }
                reference::kobayashi(domain, x, &a)
                    .map(|k| weight(&a) * k)
                    .unwrap_or(f64::INFINITY)
            };
            let n = x.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(0x6b61);
            let mut starts: Vec<(f64, Vec<f64>)> = (0..64)
                .map(|k| {
                    let p: Vec<f64> = if k == 0 {
                        point_to_params(x)
                    } else {
                        (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect()
                    };
                    (cost(&p), p)
                })
                .collect();
            starts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = starts[0].0;
            for (_, p) in starts.iter().take(4) {
                let r = simplex::minimize(
                    cost,
                    p,
                    &SimplexOptions {
                        step: 0.05,
                        max_iterations: 400,
                        ftol: 1e-12,
                        xtol: 1e-10,
                    },
                );
                best = best.min(r.value);
            }
            if best.is_infinite() {
                return Err(domain_err!("no point of the subspace found inside the domain"));
            }
            Ok(best)
        }
    }
}

fn point_to_params(p: &CPoint) -> Vec<f64> {
    p.coords().iter().flat_map(|c| [c.re, c.im]).collect()
}

fn params_to_point(p: &[f64]) -> CPoint {
    CPoint::from_vec_unchecked(p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// Dirichlet problem: the Poisson envelope of the harmonic extension of `h`.
pub fn poisson_dirichlet(
    domain: &Domain,
    h: &BoundaryFunction,
    x: &CPoint,
    cfg: &OptimizerConfig,
) -> Result<EnvelopeResult> {
    envelope_upper(&EnvelopeQuery::new(
        FunctionalKind::Poisson,
        domain.clone(),
        Payload::Boundary { boundary: h.clone() },
        x.clone(),
        cfg.clone(),
    ))
}

/// How parameter vectors become discs.
#[derive(Debug, Clone)]
enum Param {
    /// Coefficients of degrees `1..=d` of every coordinate.
    Free,
    /// `f(zeta) = x + zeta q(zeta)` with `f(zeta_0) = a` solved for `q_0`;
    /// parameters are `zeta_0` and `q_1..q_{d-1}`. Restart `i` anchors at
    /// `anchors[i % len]`; with `polish` a free stage follows.
    Anchored { anchors: Vec<CPoint>, polish: bool },
}

enum Objective {
    Lelong(WeightFunction),
    Riesz(ComplexSubspace),
    Poisson(Box<dyn Fn(&CPoint) -> f64 + Send + Sync>),
}

struct Problem<'a> {
    q: &'a EnvelopeQuery,
    objective: Objective,
    param: Param,
    /// Restart-0 target on the pole set.
    target: Option<CPoint>,
    nodes: Vec<Complex64>,
}

#[derive(Clone)]
struct Candidate {
    value: f64,
    disc: AnalyticDisc,
    poles: PoleData,
    clipped: bool,
}

struct RestartOutcome {
    best: Option<Candidate>,
    evaluations: usize,
    converged: bool,
}

/// Minimizes the configured functional over certified discs centered at `q.x`.
pub fn envelope_upper(q: &EnvelopeQuery) -> Result<EnvelopeResult> {
    let cfg = &q.optimizer;
    cfg.validate()?;
    q.domain.validate()?;
    if q.x.dim() != q.domain.dim() {
        return Err(domain_err!("base point dimension does not match the domain"));
    }
    if !q.domain.contains(&q.x, 0.0)? {
        return Err(domain_err!("base point {:?} is not interior", q.x));
    }
    let constant = AnalyticDisc::constant(&q.x, cfg.overshoot)?;
    let shortcut = |value: f64| EnvelopeResult {
        upper: value,
        witness: constant.clone(),
        poles: PoleData::default(),
        lower: None,
        evaluations: 0,
        converged: true,
        restart: 0,
        clipped: false,
    };

    let objective = match (q.kind, &q.payload) {
        (FunctionalKind::Lelong, Payload::Weights { weights }) => {
            weights.validate()?;
            if weights.is_zero() {
                return Ok(shortcut(0.0));
            }
            if let Some(a) = weights.subspace() {
                check_arity(a, &q.x)?;
            }
            if weights.eval(&q.x)? > 0.0 {
                return Ok(shortcut(f64::NEG_INFINITY));
            }
            Objective::Lelong(weights.clone())
        }
        (FunctionalKind::Riesz, Payload::Divisor { subspace }) => {
            check_arity(subspace, &q.x)?;
            if !subspace.is_divisor() {
                return Err(domain_err!("the Riesz functional needs a single generator"));
            }
            if vanishing_order(&subspace.generators()[0], &q.x)? > 0 {
                return Ok(shortcut(f64::NEG_INFINITY));
            }
            Objective::Riesz(subspace.clone())
        }
        (FunctionalKind::Poisson, Payload::Boundary { boundary }) => {
            let ext = Extension::new(&q.domain, boundary)?;
            Objective::Poisson(Box::new(move |z| ext.eval(z)))
        }
        (FunctionalKind::Poisson, Payload::Function(phi)) => {
            let phi = phi.clone();
            Objective::Poisson(Box::new(move |z| phi(z)))
        }
        (kind, payload) => {
            return Err(domain_err!("functional {kind:?} cannot use payload {payload:?}"))
        }
    };

    let (param, target) = plan(q, &objective)?;
    let nodes: Vec<Complex64> = (0..cfg.samples)
        .map(|k| Complex64::from_polar(cfg.overshoot, 2.0 * PI * k as f64 / cfg.samples as f64))
        .collect();
    let problem = Problem {
        q,
        objective,
        param,
        target,
        nodes,
    };

    let warm: Vec<AnalyticDisc> = q
        .warm_start
        .iter()
        .map(|f| {
            if f.dim() != q.x.dim() || f.center() != q.x {
                Err(domain_err!("warm-start disc is not centered at the base point"))
            } else {
                Ok(f.clone())
            }
        })
        .collect::<Result<_>>()?;

    let total = cfg.restarts + warm.len();
    let outcomes: Vec<RestartOutcome> = (0..total)
        .into_par_iter()
        .map(|i| {
            if i < cfg.restarts {
                problem.run_restart(i, None)
            } else {
                problem.run_restart(i, Some(&warm[i - cfg.restarts]))
            }
        })
        .collect();

    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let mut winner: Option<(usize, &Candidate, bool)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(c) = &o.best {
            if winner.map_or(true, |(_, w, _)| c.value < w.value) {
                winner = Some((i, c, o.converged));
            }
        }
    }
    let Some((restart, best, converged)) = winner else {
        return Err(Error::Infeasible(format!(
            "no restart produced a disc contained at margin {}",
            cfg.margin
        )));
    };
    Ok(EnvelopeResult {
        upper: best.value,
        witness: best.disc.clone(),
        poles: best.poles.clone(),
        lower: None,
        evaluations,
        converged,
        restart,
        clipped: best.clipped,
    })
}

fn check_arity(a: &ComplexSubspace, x: &CPoint) -> Result<()> {
    if a.nvars() != x.dim() {
        return Err(domain_err!(
            "subspace in {} variables at a point of C^{}",
            a.nvars(),
            x.dim()
        ));
    }
    Ok(())
}

/// True when lines through `x` in seeded random directions meet the zero set,
/// i.e. the subspace behaves like a hypersurface near `x`.
fn meets_generic_lines(a: &ComplexSubspace, x: &CPoint) -> bool {
    if a.is_divisor() {
        return true;
    }
    let n = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c69);
    (0..3).any(|_| {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let line: Vec<crate::poly::Poly> = x
            .coords()
            .iter()
            .zip(&v)
            .map(|(&xi, &vi)| crate::poly::Poly::new(vec![xi, vi]))
            .collect();
        let comps: Vec<crate::poly::Poly> = a
            .generators()
            .iter()
            .map(|g| g.compose(&line))
            .filter(|c| c.degree().is_some_and(|d| d > 0) || c.coeffs().iter().any(|v| v.norm() > 0.0))
            .collect();
        let Some(src) = comps.iter().filter(|c| c.degree().unwrap_or(0) > 0).min_by_key(|c| c.degree()) else {
            return false;
        };
        let Ok(roots) = src.root_clusters() else {
            return false;
        };
        roots.iter().any(|(z, _)| {
            comps.iter().all(|c| c.eval(*z).norm() <= 1e-8 * c.scale().max(1.0))
        })
    })
}

/// Chooses the parametrization and the restart-0 target.
fn plan(q: &EnvelopeQuery, objective: &Objective) -> Result<(Param, Option<CPoint>)> {
    let subspace = match objective {
        Objective::Poisson(_) => return Ok((Param::Free, None)),
        Objective::Lelong(WeightFunction::Points { support }) => {
            let mut ranked: Vec<(f64, CPoint)> = support
                .iter()
                .map(|(a, w)| {
                    let k = reference::kobayashi(&q.domain, &q.x, a).unwrap_or((&q.x - a).norm().ln());
                    (w * k, a.clone())
                })
                .collect();
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
            let anchors: Vec<CPoint> = ranked.into_iter().map(|(_, a)| a).collect();
            let first = anchors.first().cloned();
            return Ok((Param::Anchored { anchors, polish: false }, first));
        }
        Objective::Lelong(w) => w.subspace().expect("subspace weight"),
        Objective::Riesz(a) => a,
    };
    let anchors = subspace_anchors(subspace, q);
    if anchors.is_empty() {
        return Err(Error::Numeric("could not locate a point of the subspace".into()));
    }
    let first = anchors.first().cloned();
    let polish = meets_generic_lines(subspace, &q.x);
    Ok((Param::Anchored { anchors, polish }, first))
}

/// Points of the zero set inside the domain: the nearest one first, then
/// projections of seeded perturbations of `x` at growing radii.
fn subspace_anchors(a: &ComplexSubspace, q: &EnvelopeQuery) -> Vec<CPoint> {
    let seed = q.optimizer.seed;
    let inside = |p: &CPoint| q.domain.contains(p, q.optimizer.margin).unwrap_or(false);
    let mut out: Vec<CPoint> = Vec::new();
    let push = |p: CPoint, out: &mut Vec<CPoint>| {
        if inside(&p) && out.iter().all(|o| (o - &p).norm() > 1e-3) {
            out.push(p);
        }
    };
    let Ok(near) = a.nearest_point(&q.x, seed) else {
        return out;
    };
    let dist = (&near - &q.x).norm();
    push(near, &mut out);
    let n = q.x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x616e);
    let wanted = q.optimizer.restarts.clamp(1, MAX_ANCHORS);
    for k in 0..4 * MAX_ANCHORS {
        if out.len() >= wanted {
            break;
        }
        let radius = dist * (0.25 + 0.1 * k as f64);
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)) * (radius / (2.0 * n as f64).sqrt()))
            .collect();
        let start = &q.x + &CPoint::from_vec_unchecked(v);
        if let Ok(p) = a.nearest_point(&start, seed ^ k as u64) {
            push(p, &mut out);
        }
    }
    out
}

const MAX_ANCHORS: usize = 8;

impl Problem<'_> {
    fn cfg(&self) -> &OptimizerConfig {
        &self.q.optimizer
    }

    fn n(&self) -> usize {
        self.q.x.dim()
    }

    fn nparams(&self, anchored: bool) -> usize {
        let (n, d) = (self.n(), self.cfg().degree);
        if anchored {
            2 + 2 * n * (d - 1)
        } else {
            2 * n * d
        }
    }

    fn anchor(&self, restart: usize) -> Option<&CPoint> {
        match &self.param {
            Param::Anchored { anchors, .. } => Some(&anchors[restart % anchors.len()]),
            Param::Free => None,
        }
    }

    /// Coefficients (degrees `0..=d`) for a parameter vector.
    fn coefficients(&self, p: &[f64], anchor: Option<&CPoint>) -> Option<Vec<Vec<Complex64>>> {
        let (n, d) = (self.n(), self.cfg().degree);
        let cap = self.cfg().coefficient_cap;
        let c = |k: usize| Complex64::new(p[2 * k], p[2 * k + 1]);
        let x = &self.q.x;
        let mut out = Vec::with_capacity(n);
        match anchor {
            None => {
                for i in 0..n {
                    let mut row = Vec::with_capacity(d + 1);
                    row.push(x[i]);
                    for k in 0..d {
                        row.push(c(i * d + k));
                    }
                    out.push(row);
                }
            }
            Some(a) => {
                let z0 = c(0);
                let m = z0.norm();
                if !(m > 1e-9 && m < 1.0 - 1e-9) {
                    return None;
                }
                for i in 0..n {
                    let tail: Vec<Complex64> = (0..d - 1).map(|k| c(1 + i * (d - 1) + k)).collect();
                    // q_0 from x_i + z0 q(z0) = a_i
                    let mut acc = ZERO;
                    let mut pw = z0;
                    for t in &tail {
                        acc += t * pw;
                        pw *= z0;
                    }
                    let q0 = (a[i] - x[i]) / z0 - acc;
                    let mut row = Vec::with_capacity(d + 1);
                    row.push(x[i]);
                    row.push(q0);
                    row.extend(tail);
                    out.push(row);
                }
            }
        }
        if out.iter().flat_map(|r| r[1..].iter()).any(|v| !(v.norm() <= cap)) {
            return None;
        }
        Some(out)
    }

    fn functional(&self, f: &AnalyticDisc) -> Result<(FunctionalValue, PoleData)> {
        match &self.objective {
            Objective::Lelong(w) => functionals::lelong(w, f),
            Objective::Riesz(a) => functionals::riesz_divisor(a, f),
            Objective::Poisson(phi) => Ok((
                functionals::poisson_unchecked(phi.as_ref(), f, self.cfg().nodes),
                PoleData::default(),
            )),
        }
    }

    fn certified(&self, f: &AnalyticDisc) -> bool {
        self.q
            .domain
            .disc_contained(f, self.cfg().margin, self.cfg().samples)
            .unwrap_or(false)
    }

    /// Penalized objective; offers certified improvements to `best`.
    fn evaluate(&self, p: &[f64], anchor: Option<&CPoint>, best: &mut Option<Candidate>, evals: &mut usize) -> f64 {
        *evals += 1;
        let Some(coeffs) = self.coefficients(p, anchor) else {
            return f64::INFINITY;
        };
        let Ok(f) = AnalyticDisc::new(coeffs, self.cfg().overshoot) else {
            return f64::INFINITY;
        };
        let g = self.q.domain.gauge_max_at(&f, &self.nodes);
        let excess = (g - (1.0 - self.cfg().margin)).max(0.0);
        let Ok((v, poles)) = self.functional(&f) else {
            return f64::INFINITY;
        };
        if excess == 0.0
            && best.as_ref().map_or(true, |b| v.value < b.value)
            && self.certified(&f)
        {
            *best = Some(Candidate {
                value: v.value,
                disc: f,
                poles,
                clipped: v.clipped,
            });
        } else if excess > 0.0
            && excess < REPAIR_BAND
            && best.as_ref().map_or(true, |b| v.value < b.value)
        {
            // the penalized optimum sits just outside the domain; pull it in
            if let Some(g) = self.repair(&f) {
                self.offer(&g, best, evals);
            }
        }
        v.value + self.cfg().penalty * excess * excess
    }

    /// Largest radial contraction `zeta -> f(s zeta)` that meets the margin.
    fn repair(&self, f: &AnalyticDisc) -> Option<AnalyticDisc> {
        let limit = 1.0 - self.cfg().margin;
        let shrink = |s: f64| {
            let coeffs = f
                .coefficients()
                .into_iter()
                .map(|row| {
                    let mut pw = 1.0;
                    row.into_iter()
                        .map(|c| {
                            let v = c * pw;
                            pw *= s;
                            v
                        })
                        .collect()
                })
                .collect();
            AnalyticDisc::new(coeffs, f.overshoot()).ok()
        };
        let (mut lo, mut hi) = (0.5, 1.0);
        let mut fit = None;
        for _ in 0..REPAIR_STEPS {
            let mid = 0.5 * (lo + hi);
            let g = shrink(mid)?;
            if self.q.domain.gauge_max_at(&g, &self.nodes) < limit {
                lo = mid;
                fit = Some(g);
            } else {
                hi = mid;
            }
        }
        fit
    }

    fn offer(&self, f: &AnalyticDisc, best: &mut Option<Candidate>, evals: &mut usize) {
        *evals += 1;
        if !self.certified(f) {
            return;
        }
        if let Ok((v, poles)) = self.functional(f) {
            if best.as_ref().map_or(true, |b| v.value < b.value) {
                *best = Some(Candidate {
                    value: v.value,
                    disc: f.clone(),
                    poles,
                    clipped: v.clipped,
                });
            }
        }
    }

    fn run_restart(&self, index: usize, warm: Option<&AnalyticDisc>) -> RestartOutcome {
        let cfg = self.cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ index as u64);
        let mut best: Option<Candidate> = None;
        let mut evals = 0usize;
        let polish = matches!(self.param, Param::Anchored { polish: true, .. });
        // warm starts go straight to the free stage when there is one
        let anchor = match warm {
            Some(_) if polish => None,
            _ => self.anchor(index).cloned(),
        };
        let anchor = anchor.as_ref();

        let mut left = cfg.iterations;
        let polish_budget = if polish && anchor.is_some() { left / 2 } else { 0 };
        left -= polish_budget;

        let start = match warm {
            Some(f) => {
                self.offer(f, &mut best, &mut evals);
                self.params_of(f, anchor)
            }
            None if index == 0 => self.radial_seed().and_then(|(t, u)| {
                // most extremal discs we know lie in one complex line, so
                // search that slice first, starting with its overall shape
                let budget = left / 4;
                let shape_budget = (budget / 4).min(SHAPE_ITERATIONS);
                let (shape, _, _) = self.descend(vec![1.0, 1.0, 1.0], shape_budget, |q| {
                    let p = self.embed_slice(&shaped(&t, q), &u, false);
                    self.evaluate(&p, None, &mut best, &mut evals)
                });
                let (t, _, _) = self.descend(shaped(&t, &shape), budget - shape_budget, |q| {
                    let p = self.embed_slice(q, &u, false);
                    self.evaluate(&p, None, &mut best, &mut evals)
                });
                left -= budget;
                let from = best.as_ref().map(|b| b.disc.clone()).or_else(|| {
                    self.coefficients(&self.embed_slice(&t, &u, false), None)
                        .and_then(|c| AnalyticDisc::new(c, cfg.overshoot).ok())
                })?;
                self.params_of(&from, anchor)
            }),
            None => None,
        };
        let theta = start.unwrap_or_else(|| self.random_start(&mut rng, anchor));

        let (theta, _, mut converged) =
            self.descend(theta, left, |p| self.evaluate(p, anchor, &mut best, &mut evals));
        if polish_budget > 0 {
            // free coefficients let the hit point slide along the subspace
            let from = best.as_ref().map(|b| b.disc.clone()).or_else(|| {
                self.coefficients(&theta, anchor)
                    .and_then(|c| AnalyticDisc::new(c, cfg.overshoot).ok())
            });
            if let Some(free) = from.and_then(|f| self.params_of(&f, None)) {
                converged = self
                    .descend(free, polish_budget, |p| self.evaluate(p, None, &mut best, &mut evals))
                    .2;
            }
        }
        RestartOutcome {
            best,
            evaluations: evals,
            converged,
        }
    }

    /// Chunked simplex descent with shrinking initial steps. Returns the
    /// final point, its value and the convergence flag of the last chunk.
    fn descend<F>(&self, mut theta: Vec<f64>, iterations: usize, mut f: F) -> (Vec<f64>, f64, bool)
    where
        F: FnMut(&[f64]) -> f64,
    {
        let chunk = (5 * theta.len()).max(60);
        let mut used = 0;
        let mut step = INITIAL_STEP;
        let mut converged = false;
        let mut current = f(&theta);
        while used < iterations {
            let r = simplex::minimize(
                &mut f,
                &theta,
                &SimplexOptions {
                    step,
                    max_iterations: chunk.min(iterations - used),
                    ftol: 1e-13,
                    xtol: 1e-11,
                },
            );
            used += r.iterations.max(1);
            converged = r.converged;
            if r.value < current {
                current = r.value;
                theta = r.x;
            }
            step *= 0.5;
            if step < MIN_STEP {
                step = INITIAL_STEP * 0.25;
            }
        }
        (theta, current, converged)
    }

    /// Full parameters of the disc `x + t(zeta) u`. Slice parameters are the
    /// coefficients of `t` (degrees `1..=d`), or `zeta_0` followed by the tail
    /// `q_1..q_{d-1}` when anchored.
    fn embed_slice(&self, s: &[f64], u: &CPoint, anchored: bool) -> Vec<f64> {
        let n = self.n();
        let (head, tail) = if anchored { s.split_at(2) } else { s.split_at(0) };
        let mut p = head.to_vec();
        for i in 0..n {
            for c in tail.chunks(2) {
                let v = Complex64::new(c[0], c[1]) * u[i];
                p.push(v.re);
                p.push(v.im);
            }
        }
        p
    }

    /// Parameters reproducing `f` in the current parametrization, if any.
    fn params_of(&self, f: &AnalyticDisc, anchor: Option<&CPoint>) -> Option<Vec<f64>> {
        let d = self.cfg().degree;
        if f.degree() > d {
            return None;
        }
        let f = f.with_degree(d).ok()?;
        let coeffs = f.coefficients();
        match anchor {
            None => Some(
                coeffs
                    .iter()
                    .flat_map(|row| row[1..].iter().flat_map(|c| [c.re, c.im]))
                    .collect(),
            ),
            Some(a) => {
                let pre = f.point_preimages(a).ok()?;
                let (z0, _) = *pre
                    .entries
                    .iter()
                    .filter(|(z, _)| z.norm() > 1e-9 && z.norm() < 1.0)
                    .min_by(|a, b| a.0.norm().total_cmp(&b.0.norm()))?;
                let mut p = vec![z0.re, z0.im];
                for row in &coeffs {
                    p.extend(row[2..].iter().flat_map(|c| [c.re, c.im]));
                }
                Some(p)
            }
        }
    }

    /// Truncated Mobius disc along the complex line from `x` toward the
    /// target, inside the largest disc inscribed in that line's slice.
    /// Returns free slice parameters and the unit direction of the line.
    fn radial_seed(&self) -> Option<(Vec<f64>, CPoint)> {
        let cfg = self.cfg();
        let d = cfg.degree;
        let x = &self.q.x;
        let target = self.target.as_ref()?;
        let diff = target - x;
        let dist = diff.norm();
        if !(dist > 1e-12) {
            return None;
        }
        let u = &diff * (1.0 / dist);
        let (c, rho) = inscribed_slice_disc(&self.q.domain, x, &u)?;
        // t(zeta) = c + r m(mu zeta), m(zeta) = (zeta + w)/(1 + conj(w) zeta)
        // with t(0) = 0; truncation to degree d may leave the slice
        let candidate = |r: f64, mu: f64| -> Option<Vec<f64>> {
            let w = -c / r;
            if w.norm() >= mu {
                return None;
            }
            let mut t = Vec::with_capacity(2 * d);
            let mut pw = Complex64::new(1.0, 0.0);
            for k in 0..d {
                let tk = r * (1.0 - w.norm_sqr()) * pw * mu.powi(k as i32 + 1);
                t.extend([tk.re, tk.im]);
                pw *= -w.conj();
            }
            let p = self.embed_slice(&t, &u, false);
            let g = AnalyticDisc::new(self.coefficients(&p, None)?, cfg.overshoot).ok()?;
            (self.q.domain.gauge_max_at(&g, &self.nodes) < 1.0 - cfg.margin).then_some(t)
        };
        // shrink the radius, or damp the tail; keep the seed whose zero
        // `-w / mu` is closest to the center
        let mut seeds = Vec::new();
        let mut scale = 1.0;
        for _ in 0..300 {
            if let Some(t) = candidate(rho * scale, 1.0) {
                seeds.push((c.norm() / (rho * scale), t));
                break;
            }
            scale *= 0.98;
        }
        let r = rho * (1.0 - cfg.margin);
        let mut mu = 0.995;
        for _ in 0..200 {
            if let Some(t) = candidate(r, mu) {
                seeds.push((c.norm() / (r * mu), t));
                break;
            }
            mu *= 0.995;
        }
        seeds
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, t)| (t, u))
    }

    /// Uniform draw from the coefficient cap ball, pulled radially inside.
    fn random_start(&self, rng: &mut ChaCha8Rng, anchor: Option<&CPoint>) -> Vec<f64> {
        let cfg = self.cfg();
        let np = self.nparams(anchor.is_some());
        let mut p: Vec<f64> = (0..np).map(|_| gaussian(rng)).collect();
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let radius = cfg.coefficient_cap * rng.gen::<f64>().powf(1.0 / np as f64);
        p.iter_mut().for_each(|v| *v *= radius / norm);
        if anchor.is_some() {
            let z0 = Complex64::from_polar(rng.gen_range(0.2..0.95), rng.gen_range(0.0..2.0 * PI));
            p[0] = z0.re;
            p[1] = z0.im;
            for v in &mut p[2..] {
                *v *= 0.2;
            }
            return p;
        }
        // shrink toward the constant disc until contained
        let fits = |p: &[f64]| {
            self.coefficients(p, None)
                .and_then(|c| AnalyticDisc::new(c, cfg.overshoot).ok())
                .is_some_and(|f| self.q.domain.gauge_max_at(&f, &self.nodes) < 1.0 - 2.0 * cfg.margin)
        };
        if fits(&p) {
            return p;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let scaled: Vec<f64> = p.iter().map(|v| v * mid).collect();
            if fits(&scaled) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        p.iter().map(|v| v * lo).collect()
    }
}

const INITIAL_STEP: f64 = 0.05;
const REPAIR_BAND: f64 = 0.05;
const SHAPE_ITERATIONS: usize = 150;
const REPAIR_STEPS: usize = 16;
const MIN_STEP: f64 = 1e-5;

pub(crate) fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Rescales slice coefficients `t_k` to `lambda mu^(k-1) t_k`, with the top
/// coefficient further multiplied by `tau`. `shape = [lambda, mu, tau]`.
fn shaped(t: &[f64], shape: &[f64]) -> Vec<f64> {
    let d = t.len() / 2;
    let mut out = Vec::with_capacity(t.len());
    let mut factor = shape[0];
    for k in 0..d {
        let f = if k + 1 == d { factor * shape[2] } else { factor };
        out.extend([t[2 * k] * f, t[2 * k + 1] * f]);
        factor *= shape[1];
    }
    out
}

/// Disc `{c + r w : |w| < 1}` in the coordinate `t` of the line `x + t u`,
/// inscribed in the slice of the domain and containing `t = 0`.
fn inscribed_slice_disc(domain: &Domain, x: &CPoint, u: &CPoint) -> Option<(Complex64, f64)> {
    match domain {
        Domain::Ball { .. } | Domain::AffineBall { .. } => {
            let (y, r0) = match domain {
                Domain::AffineBall { center, radius } => (x - center, *radius),
                _ => (x.clone(), 1.0),
            };
            // |y + t u|^2 < r0^2 with |u| = 1
            let b = y.inner(u);
            let rad2 = r0 * r0 - y.norm_sqr() + b.norm_sqr();
            (rad2 > 0.0).then(|| (-b, rad2.sqrt()))
        }
        _ => {
            const RAYS: usize = 64;
            let boundary: Vec<Complex64> = (0..RAYS)
                .map(|k| {
                    let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / RAYS as f64);
                    domain
                        .exit_distance(x, &u.scale(e))
                        .map(|s| e * s)
                })
                .collect::<Result<_>>()
                .ok()?;
            let inradius = |c: Complex64| {
                boundary
                    .iter()
                    .map(|b| (b - c).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            let r = simplex::minimize(
                |p| -inradius(Complex64::new(p[0], p[1])),
                &[0.0, 0.0],
                &SimplexOptions {
                    step: 0.05,
                    max_iterations: 300,
                    ftol: 1e-12,
                    xtol: 1e-10,
                },
            );
            let c = Complex64::new(r.x[0], r.x[1]);
            let rho = -r.value;
            if c.norm() < 0.99 * rho {
                Some((c, rho * 0.999))
            } else {
                Some((ZERO, inradius(ZERO) * 0.999))
            }
        }
    }
}
