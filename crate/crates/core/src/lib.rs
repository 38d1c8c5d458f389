//! Numerical pluripotential theory on model domains.
//!
//! Pluricomplex Green functions are approximated from above as envelopes of
//! disc functionals (Lelong, Poisson, Riesz) over polynomial analytic discs,
//! and bracketed from below by certified plurisubharmonic minorants and the
//! closed forms in [`reference`].

pub mod complex;
pub mod diagnostics;
pub mod disc;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod functionals;
pub mod multipoly;
pub mod poly;
pub mod reference;
pub mod simplex;
pub mod subspace;
pub mod verify;

pub use complex::{BlaschkeProduct, CPoint, MobiusFactor};
pub use disc::{AnalyticDisc, PreimageList};
pub use domain::Domain;
pub use envelope::{
    BoundaryFunction, EnvelopeQuery, EnvelopeResult, FunctionalKind, OptimizerConfig, Payload,
};
pub use error::{Error, Result};
pub use functionals::{FunctionalValue, PoleData};
pub use multipoly::Polynomial;
pub use num_complex::Complex64;
pub use poly::Poly;
pub use reference::ClosedForm;
pub use subspace::{ComplexSubspace, WeightFunction};
