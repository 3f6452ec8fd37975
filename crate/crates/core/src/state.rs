//! State-space points and the driving semiflow.
//!
//! Two point representations cover the whole corpus: a nonnegative scalar
//! parameter, and a shift amount `u` selecting the translate `f_u` of a fixed
//! base function. In both cases the driver acts by translating the parameter
//! by the elapsed time, which satisfies the semiflow axioms exactly.

use crate::error::{Error, Result};

/// An ordered time pair `t >= s >= 0`. Continuous-time operations accept
/// any such pair; the discrete analyses use integer-valued ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePair {
    t: f64,
    s: f64,
}

impl TimePair {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::NegativeTime(s));
        }
        if !(t >= s) {
            return Err(Error::TimeOrder { t, s });
        }
        Ok(Self { t, s })
    }

    pub fn later(&self) -> f64 {
        self.t
    }

    pub fn earlier(&self) -> f64 {
        self.s
    }

    pub fn elapsed(&self) -> f64 {
        self.t - self.s
    }

    /// Whether both endpoints are integers, i.e. the pair lives on the
    /// discrete grid.
    pub fn is_integer(&self) -> bool {
        self.t.fract() == 0.0 && self.s.fract() == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatePoint {
    /// A point of X = R_+.
    Scalar(f64),
    /// The translate x = f_u of the system's base function.
    FunctionShift { shift: f64 },
}

impl StatePoint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            StatePoint::Scalar(_) => "scalar",
            StatePoint::FunctionShift { .. } => "function-shift",
        }
    }

    /// Distance between two points of the same representation.
    pub fn distance(&self, other: &StatePoint) -> Option<f64> {
        match (self, other) {
            (StatePoint::Scalar(a), StatePoint::Scalar(b)) => Some((a - b).abs()),
            (StatePoint::FunctionShift { shift: a }, StatePoint::FunctionShift { shift: b }) => {
                Some((a - b).abs())
            }
            _ => None,
        }
    }
}

pub trait Semiflow: Send + Sync {
    /// phi(t, s, x) for t >= s.
    fn advance(&self, t: f64, s: f64, x: &StatePoint) -> Result<StatePoint>;
}

/// Translation by elapsed time on either point representation.
#[derive(Debug, Clone, Copy, Default)]
pub struct TranslationSemiflow;

impl Semiflow for TranslationSemiflow {
    fn advance(&self, t: f64, s: f64, x: &StatePoint) -> Result<StatePoint> {
        if t < s {
            return Err(Error::TimeOrder { t, s });
        }
        Ok(match *x {
            StatePoint::Scalar(v) => StatePoint::Scalar(v + (t - s)),
            StatePoint::FunctionShift { shift } => StatePoint::FunctionShift {
                shift: shift + (t - s),
            },
        })
    }
}
