//! skewflow-core: discrete-time linear cocycles over driving semiflows.
//!
//! The crate represents skew-evolution systems (a driving semiflow paired
//! with an operator-valued evolution cocycle), verifies their defining
//! axioms numerically, and fits certificates for the asymptotic properties
//! of such systems: exponential stability and instability, exponential
//! dichotomy and trichotomy, via both the pointwise discrete
//! characterizations and the weighted-summation criteria, including the
//! adjoint (dual-norm) form.
//!
//! Organization:
//! * [`system`] - systems, axiom verification, the exponential shift,
//!   projector restriction and the adjoint action;
//! * [`criteria`] - stability/instability certificates, summation criteria,
//!   growth/decay envelopes, sharp-exponent search;
//! * [`spectra`] - projector families, dichotomy and trichotomy
//!   certificates, the three/four projector transforms;
//! * [`corpus`] - built-in example systems and seeded random cocycles with
//!   planted ground truth.
//!
//! Everything is deterministic: randomness is seeded, maxima are folded in
//! fixed order, and sums are compensated and accumulated ascending.

pub mod certificate;
pub mod corpus;
pub mod criteria;
pub mod error;
pub mod gauge;
pub mod horizon;
pub mod linalg;
pub mod spectra;
pub mod state;
pub mod sum;
pub mod system;

pub use certificate::{
    Certificate, EnvelopeBound, EnvelopeDirection, EnvelopePoint, SplitCertificate, Verdict,
    VerdictConfig, Witness,
};
pub use error::{Error, Result};
pub use gauge::MonotoneGauge;
pub use horizon::Horizon;
pub use linalg::{LinearOperator, NormKind};
pub use state::{Semiflow, StatePoint, TimePair, TranslationSemiflow};
pub use system::{
    adjoint_apply, AxiomReport, Cocycle, ConstantProjector, InvarianceCheck, ProjectorFn,
    SkewEvolutionSystem,
};
