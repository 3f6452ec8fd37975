//! Skew-evolution systems: a driving semiflow paired with an operator-valued
//! cocycle, plus the exponential shift and projector restriction decorations.
//!
//! Systems are immutable after construction and cheap to clone (the evaluator
//! trait objects sit behind `Arc`), so they can be shared freely across
//! threads. Every operation here is a pure function of its inputs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, NormKind};
use crate::state::{Semiflow, StatePoint, TimePair};

/// Raw operator family behind a system. Implementations return the matrix of
/// `Phi(t, s, x)` for `t >= s >= 0`; the identity at `t == s` must be exact.
pub trait Cocycle: Send + Sync {
    fn dim(&self) -> usize;

    fn entries(&self, t: f64, s: f64, x: &StatePoint) -> Result<Vec<f64>>;

    /// Systems built from one-step matrix sequences are only defined on
    /// integer times.
    fn discrete_only(&self) -> bool {
        false
    }

    /// Which state-point representation the evaluator expects.
    fn state_kind(&self) -> &'static str {
        "scalar"
    }
}

/// Projector-valued map over the state space.
pub trait ProjectorFn: Send + Sync {
    fn dim(&self) -> usize;
    fn at(&self, x: &StatePoint) -> Vec<f64>;
}

/// A projector that does not depend on the base point.
#[derive(Debug, Clone)]
pub struct ConstantProjector {
    dim: usize,
    entries: Vec<f64>,
}

impl ConstantProjector {
    pub fn new(matrix: &LinearOperator) -> Self {
        Self {
            dim: matrix.dim(),
            entries: matrix.entries().to_vec(),
        }
    }

    /// Coordinate projector selecting the index range `[start, start+len)`.
    pub fn coordinate(dim: usize, start: usize, len: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in start..start + len {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }
}

impl ProjectorFn for ConstantProjector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, _x: &StatePoint) -> Vec<f64> {
        self.entries.clone()
    }
}

/// Complement `I - P(x)` of another projector map.
pub struct ComplementProjector {
    pub inner: Arc<dyn ProjectorFn>,
}

impl ProjectorFn for ComplementProjector {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn at(&self, x: &StatePoint) -> Vec<f64> {
        let d = self.inner.dim();
        let mut m = self.inner.at(x);
        for v in m.iter_mut() {
            *v = -*v;
        }
        for i in 0..d {
            m[i * d + i] += 1.0;
        }
        m
    }
}

/// Pointwise product `A(x) B(x)` of two projector maps.
pub struct ProductProjector {
    pub left: Arc<dyn ProjectorFn>,
    pub right: Arc<dyn ProjectorFn>,
}

impl ProjectorFn for ProductProjector {
    fn dim(&self) -> usize {
        self.left.dim()
    }

    fn at(&self, x: &StatePoint) -> Vec<f64> {
        let d = self.left.dim();
        let a = self.left.at(x);
        let b = self.right.at(x);
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = a[i * d + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += aik * b[k * d + j];
                }
            }
        }
        out
    }
}

/// The pair (phi, Phi) with optional exponential shift and projector
/// restriction applied on evaluation.
#[derive(Clone)]
pub struct SkewEvolutionSystem {
    name: String,
    dim: usize,
    norm: NormKind,
    lambda: f64,
    projector: Option<Arc<dyn ProjectorFn>>,
    driver: Arc<dyn Semiflow>,
    cocycle: Arc<dyn Cocycle>,
}

impl std::fmt::Debug for SkewEvolutionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SkewEvolutionSystem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("norm", &self.norm)
            .field("lambda", &self.lambda)
            .field("projected", &self.projector.is_some())
            .finish()
    }
}

impl SkewEvolutionSystem {
    pub fn new(
        name: impl Into<String>,
        norm: NormKind,
        driver: Arc<dyn Semiflow>,
        cocycle: Arc<dyn Cocycle>,
    ) -> Self {
        let dim = cocycle.dim();
        Self {
            name: name.into(),
            dim,
            norm,
            lambda: 0.0,
            projector: None,
            driver,
            cocycle,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_projected(&self) -> bool {
        self.projector.is_some()
    }

    pub fn discrete_only(&self) -> bool {
        self.cocycle.discrete_only()
    }

    pub fn state_kind(&self) -> &'static str {
        self.cocycle.state_kind()
    }

    /// phi(t, s, x).
    pub fn advance(&self, t: f64, s: f64, x: &StatePoint) -> Result<StatePoint> {
        TimePair::new(t, s)?;
        self.check_state(x)?;
        self.driver.advance(t, s, x)
    }

    /// Phi(t, s, x), with the shift scale and the restriction projector
    /// applied. `evaluate(t, t, x)` of an unprojected system is the exact
    /// identity matrix.
    pub fn evaluate(&self, t: f64, s: f64, x: &StatePoint) -> Result<LinearOperator> {
        let pair = TimePair::new(t, s)?;
        self.check_state(x)?;
        if self.cocycle.discrete_only() && !pair.is_integer() {
            return Err(Error::NonIntegerTime(if t.fract() != 0.0 { t } else { s }));
        }
        let raw = self.cocycle.entries(t, s, x)?;
        let mut op = LinearOperator::from_entries(self.dim, self.norm, raw)?;
        if let Some(p) = &self.projector {
            let pm = LinearOperator::from_entries(self.dim, self.norm, p.at(x))?;
            op = op.matmul(&pm)?;
        }
        if self.lambda != 0.0 {
            // scale factor computed from the accumulated shift in one shot
            op = op.scaled((-self.lambda * (t - s)).exp());
        }
        Ok(op)
    }

    /// The projected vector `P(x) v` when a restriction is present,
    /// otherwise `v` itself.
    pub fn project_vector(&self, x: &StatePoint, v: &[f64]) -> Result<Vec<f64>> {
        match &self.projector {
            None => Ok(v.to_vec()),
            Some(p) => {
                let pm = LinearOperator::from_entries(self.dim, self.norm, p.at(x))?;
                pm.apply(v)
            }
        }
    }

    /// Spectral shift: the cocycle scaled by `e^{-lambda (t - s)}`.
    ///
    /// Repeated shifts accumulate into a single exponent, so
    /// `shift(shift(S, a), b)` equals `shift(S, a + b)` exactly.
    pub fn shift(&self, lambda: f64) -> SkewEvolutionSystem {
        let mut out = self.clone();
        out.lambda += lambda;
        out.name = if out.lambda == 0.0 {
            self.base_name().to_string()
        } else {
            format!("{}~shift({})", self.base_name(), out.lambda)
        };
        out
    }

    fn base_name(&self) -> &str {
        self.name.split('~').next().unwrap_or(&self.name)
    }

    /// Restriction to an invariant projector: the cocycle becomes
    /// `Phi(t, s, x) P(x)`. The projector is checked for invariance on the
    /// supplied grid first and rejected with the worst violation otherwise.
    pub fn restrict(
        &self,
        projector: Arc<dyn ProjectorFn>,
        check: &InvarianceCheck,
    ) -> Result<SkewEvolutionSystem> {
        if self.projector.is_some() {
            return Err(Error::AlreadyProjected);
        }
        if projector.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: projector.dim(),
            });
        }
        let (residual, witness) = invariance_residual(self, projector.as_ref(), check)?;
        if residual > check.tolerance {
            return Err(Error::ProjectorRejected {
                reason: format!(
                    "projector not invariant; worst violation at {}",
                    witness
                        .map(|w| format!("(t={}, s={}, state #{})", w.t, w.s, w.state_index))
                        .unwrap_or_else(|| "unknown".into())
                ),
                residual,
            });
        }
        let mut out = self.clone();
        out.projector = Some(projector);
        out.name = format!("{}~restricted", self.name);
        Ok(out)
    }

    /// Restriction without the invariance check, for projectors already
    /// validated by the caller.
    pub fn restrict_unchecked(&self, projector: Arc<dyn ProjectorFn>) -> Result<SkewEvolutionSystem> {
        if self.projector.is_some() {
            return Err(Error::AlreadyProjected);
        }
        if projector.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: projector.dim(),
            });
        }
        let mut out = self.clone();
        out.projector = Some(projector);
        out.name = format!("{}~restricted", self.name);
        Ok(out)
    }

    fn check_state(&self, x: &StatePoint) -> Result<()> {
        let expected = self.cocycle.state_kind();
        if x.kind_name() != expected {
            return Err(Error::IncompatibleState {
                expected,
                got: x.kind_name(),
            });
        }
        Ok(())
    }

    /// Check the semiflow and cocycle axioms on a grid of triples
    /// `t >= s >= t0`. A report is always produced; `passes` compares the
    /// worst relative composition residual against `tolerance`.
    pub fn verify_axioms(
        &self,
        triples: &[(f64, f64, f64)],
        states: &[StatePoint],
        tolerance: f64,
    ) -> Result<AxiomReport> {
        if triples.is_empty() {
            return Err(Error::EmptySamples("axiom grid".into()));
        }
        if states.is_empty() {
            return Err(Error::EmptySamples("axiom states".into()));
        }
        let mut report = AxiomReport {
            tolerance,
            ..AxiomReport::default()
        };
        for &(t, s, t0) in triples {
            if !(t >= s && s >= t0 && t0 >= 0.0) {
                return Err(Error::TimeOrder { t: s, s: t0 });
            }
            for (si, x) in states.iter().enumerate() {
                // (s1), (c1) at every node of the triple
                for &u in &[t, s, t0] {
                    let fixed = self.advance(u, u, x)?;
                    let d = fixed.distance(x).unwrap_or(f64::INFINITY);
                    report.max_semiflow_residual = report.max_semiflow_residual.max(d);
                    let id = self.evaluate(u, u, x)?;
                    let defect = id
                        .sub(&LinearOperator::identity(self.dim, self.norm))?
                        .max_abs_entry();
                    report.max_identity_residual = report.max_identity_residual.max(defect);
                }
                // (s2)
                let mid = self.advance(s, t0, x)?;
                let via = self.advance(t, s, &mid)?;
                let direct = self.advance(t, t0, x)?;
                let sres = via.distance(&direct).unwrap_or(f64::INFINITY);
                report.max_semiflow_residual = report.max_semiflow_residual.max(sres);
                // (c2)
                let left_outer = self.evaluate(t, s, &mid)?;
                let left_inner = self.evaluate(s, t0, x)?;
                let composed = left_outer.matmul(&left_inner)?;
                let direct_op = self.evaluate(t, t0, x)?;
                let abs = composed.sub(&direct_op)?.operator_norm();
                let scale = left_outer.operator_norm() * left_inner.operator_norm()
                    + direct_op.operator_norm();
                let rel = if scale > 0.0 { abs / scale } else { abs };
                if rel > report.max_cocycle_residual_rel {
                    report.max_cocycle_residual_rel = rel;
                    report.worst_triple = Some((t, s, t0));
                    report.worst_state_index = Some(si);
                }
                report.max_cocycle_residual_abs = report.max_cocycle_residual_abs.max(abs);
            }
        }
        report.passes = report.max_cocycle_residual_rel <= tolerance
            && report.max_semiflow_residual <= tolerance
            && report.max_identity_residual <= tolerance;
        Ok(report)
    }
}

/// Transpose action of an operator on a dual vector, with the norm of the
/// result taken in the dual of the operator's norm convention.
pub fn adjoint_apply(op: &LinearOperator, vstar: &[f64]) -> Result<(Vec<f64>, f64)> {
    if vstar.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: vstar.len(),
        });
    }
    let out = op.transpose().apply(vstar)?;
    let norm = op.norm_kind().dual().vector_norm(&out);
    Ok((out, norm))
}

/// Grid and tolerance for invariance checking.
#[derive(Debug, Clone)]
pub struct InvarianceCheck {
    pub pairs: Vec<(f64, f64)>,
    pub states: Vec<StatePoint>,
    pub tolerance: f64,
}

impl InvarianceCheck {
    /// Integer pairs `(t, s)` with `s < t <= n_max`, a small deterministic
    /// default that covers short and long elapsed times.
    pub fn integer_default(n_max: u32, states: Vec<StatePoint>) -> Self {
        let mut pairs = Vec::new();
        for s in 0..n_max {
            for t in [s + 1, (s + 2).min(n_max), n_max] {
                if t > s && t <= n_max {
                    pairs.push((t as f64, s as f64));
                }
            }
        }
        pairs.dedup();
        Self {
            pairs,
            states,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InvarianceWitness {
    pub t: f64,
    pub s: f64,
    pub state_index: usize,
    pub residual: f64,
}

/// Max relative residual of `P(phi(t,s,x)) Phi(t,s,x) - Phi(t,s,x) P(x)`
/// over the check grid.
pub fn invariance_residual(
    system: &SkewEvolutionSystem,
    projector: &dyn ProjectorFn,
    check: &InvarianceCheck,
) -> Result<(f64, Option<InvarianceWitness>)> {
    let mut worst = 0.0f64;
    let mut witness = None;
    for &(t, s) in &check.pairs {
        for (si, x) in check.states.iter().enumerate() {
            let phi = system.evaluate(t, s, x)?;
            let px = LinearOperator::from_entries(system.dim(), system.norm_kind(), projector.at(x))?;
            let moved = system.advance(t, s, x)?;
            let pmoved =
                LinearOperator::from_entries(system.dim(), system.norm_kind(), projector.at(&moved))?;
            let left = pmoved.matmul(&phi)?;
            let right = phi.matmul(&px)?;
            let abs = left.sub(&right)?.operator_norm();
            let scale = 1.0 + phi.operator_norm() * px.operator_norm().max(1.0);
            let rel = abs / scale;
            if rel > worst {
                worst = rel;
                witness = Some(InvarianceWitness {
                    t,
                    s,
                    state_index: si,
                    residual: rel,
                });
            }
        }
    }
    Ok((worst, witness))
}

/// Residuals of the defining axioms over a sampled grid.
#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub max_identity_residual: f64,
    pub max_cocycle_residual_abs: f64,
    pub max_cocycle_residual_rel: f64,
    pub max_semiflow_residual: f64,
    pub tolerance: f64,
    pub worst_triple: Option<(f64, f64, f64)>,
    pub worst_state_index: Option<usize>,
    pub passes: bool,
}
