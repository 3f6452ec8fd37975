//! Certificates and the boundedness verdicts behind them.
//!
//! A certificate stores the fitted coefficient sequence of one of the
//! discrete inequalities together with a verdict. On a finite horizon any
//! inequality can be satisfied by taking the per-index maxima, so the verdict
//! is about whether those maxima are consistent with the inequality holding
//! on an unbounded horizon. Three decision rules cover the inequality shapes
//! that occur:
//!
//! * start-indexed (coefficient attached to the earlier time, the other time
//!   unbounded): a sample diverges when its requirement profile peaks in the
//!   final quarter of the window and has grown since the window start. For
//!   summation criteria the profile is a partial-sum curve and the test
//!   compares the full sum against the half-window sum.
//! * end-indexed (coefficient attached to the later time, inner times all
//!   bounded by it): the needed coefficients of a sound system return to
//!   their early-horizon floor along the whole horizon; divergence shows up
//!   as a floor that keeps rising. The rule compares the minimum over the
//!   second half against the minimum over the second quarter.
//! * central (the two-sided inequalities on the middle block): the plain
//!   across-index trend test with factor K.

use crate::linalg::NormKind;

#[derive(Debug, Clone)]
pub struct Witness {
    /// Index the fitted coefficient is attached to.
    pub coefficient_index: u32,
    /// Inner time index where the violation peaked.
    pub inner_index: u32,
    pub state_index: usize,
    pub vector_index: usize,
    /// The offending requirement value.
    pub value: f64,
    pub description: String,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Holds,
    Fails(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// Fitted constants for one inequality: the exponent it was checked at and
/// the per-index coefficient sequence (clipped below at 1), plus the raw
/// unclipped maxima for reporting.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub label: String,
    pub exponent: f64,
    pub coefficients: Vec<f64>,
    pub raw_maxima: Vec<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Certificate bundle for the projector-split properties.
#[derive(Debug, Clone)]
pub struct SplitCertificate {
    pub label: String,
    pub exponents: Vec<f64>,
    pub parts: Vec<Certificate>,
    /// One sequence covering all the part inequalities (their pointwise max),
    /// reported for the trichotomy characterization which shares a single
    /// sequence across its four conditions.
    pub shared_coefficients: Option<Vec<f64>>,
    pub verdict: Verdict,
    /// Agreement with the equivalent certificate along the transformed
    /// projector family, when the operation defines such a cross-check.
    pub cross_check: Option<bool>,
    pub notes: Vec<String>,
}

impl SplitCertificate {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeDirection {
    Growth,
    Decay,
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopePoint {
    pub index: u32,
    /// Coefficient M at this index.
    pub coefficient: f64,
    /// Rate omega at this index.
    pub rate: f64,
}

/// Fitted exponential envelope: per-index smallest (M, omega) pair on the
/// rate grid, or a failure witness when no grid rate works.
#[derive(Debug, Clone)]
pub struct EnvelopeBound {
    pub direction: EnvelopeDirection,
    pub points: Vec<EnvelopePoint>,
    pub verdict: Verdict,
    pub norm: NormKind,
}

impl EnvelopeBound {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    /// Largest fitted rate, for uses that need a single constant.
    pub fn max_rate(&self) -> f64 {
        self.points.iter().fold(0.0f64, |m, p| m.max(p.rate))
    }
}

/// Thresholds of the boundedness rules. `central_trend_factor` is the K of
/// the across-index trend test; the judge fraction is the prefix of start
/// indices with windows long enough to judge.
#[derive(Debug, Clone, Copy)]
pub struct VerdictConfig {
    pub judge_fraction: f64,
    pub boundary_zone_fraction: f64,
    pub growth_tolerance: f64,
    pub sum_tail_factor: f64,
    pub end_ratio_pointwise: f64,
    pub end_ratio_sum: f64,
    pub central_trend_factor: f64,
    /// Coefficients within this of 1 are reported as uniform.
    pub uniform_tolerance: f64,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        Self {
            judge_fraction: 0.5,
            boundary_zone_fraction: 0.25,
            growth_tolerance: 1e-9,
            sum_tail_factor: 4.0,
            end_ratio_pointwise: 1.01,
            end_ratio_sum: 2.0,
            central_trend_factor: 10.0,
            uniform_tolerance: 1e-9,
        }
    }
}

impl VerdictConfig {
    /// Largest start index judged for divergence at horizon `n_max`.
    pub fn judge_limit(&self, n_max: u32) -> u32 {
        (n_max as f64 * self.judge_fraction).floor() as u32
    }
}

/// First index attaining the maximum of `values` within a relative tie
/// tolerance, together with the maximum itself.
pub(crate) fn max_scan(values: &[f64]) -> (f64, usize) {
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v > max {
            max = v;
        }
    }
    let tie = max.abs() * 1e-12;
    let first = values
        .iter()
        .position(|&v| v >= max - tie)
        .unwrap_or(0);
    (max, first)
}

/// Start-indexed pointwise rule. `values[k]` is the requirement at inner
/// offset k from the coefficient index; returns the offending offset.
pub(crate) fn start_pointwise_divergence(values: &[f64], cfg: &VerdictConfig) -> Option<usize> {
    let span = values.len().saturating_sub(1);
    if span < 4 {
        return None;
    }
    let (max, argmax) = max_scan(values);
    let zone = ((span as f64) * cfg.boundary_zone_fraction).ceil() as usize;
    let zone_start = values.len() - zone.max(1);
    if argmax >= zone_start && max > values[0] * (1.0 + cfg.growth_tolerance) {
        Some(argmax)
    } else {
        None
    }
}

/// Start-indexed summation rule on a partial-sum profile (nondecreasing for
/// the forward sums, saturating for the anchored ones): the tail past the
/// half-window must not multiply the sum by more than the configured factor.
pub(crate) fn sum_tail_divergence(values: &[f64], cfg: &VerdictConfig) -> Option<usize> {
    let span = values.len().saturating_sub(1);
    if span < 4 {
        return None;
    }
    let mid = span / 2;
    let last = values[values.len() - 1];
    if values[mid] > 0.0 && last > cfg.sum_tail_factor * values[mid] {
        Some(values.len() - 1)
    } else {
        None
    }
}

/// End-indexed rule on the fitted coefficient sequence (indexed 0..=n_max):
/// compares the floor over the second half against the floor over the second
/// quarter. Returns the index where the late floor is attained.
pub(crate) fn end_indexed_failure(coeffs: &[f64], ratio: f64) -> Option<usize> {
    let n_max = coeffs.len().saturating_sub(1);
    if n_max < 4 {
        return None;
    }
    let q1 = (n_max / 4).max(1);
    let q2 = n_max / 2;
    let early_floor = coeffs[q1..=q2]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut late_floor = f64::INFINITY;
    let mut late_idx = q2 + 1;
    for (off, &c) in coeffs[q2 + 1..].iter().enumerate() {
        if c < late_floor {
            late_floor = c;
            late_idx = q2 + 1 + off;
        }
    }
    if late_floor > ratio * early_floor.max(1.0) {
        Some(late_idx)
    } else {
        None
    }
}

/// Across-index trend test: an index in the second half must not exceed K
/// times the running maximum over its own half-prefix.
pub(crate) fn central_trend_failure(coeffs: &[f64], k: f64) -> Option<usize> {
    let n_max = coeffs.len().saturating_sub(1);
    if n_max < 4 {
        return None;
    }
    for j in (n_max / 2 + 1)..=n_max {
        let prefix_max = coeffs[..=(j / 2)]
            .iter()
            .copied()
            .fold(1.0f64, f64::max);
        if coeffs[j] > k * prefix_max {
            return Some(j);
        }
    }
    None
}

/// True when every coefficient sits at the uniform floor 1.
pub(crate) fn is_uniform(coeffs: &[f64], tol: f64) -> bool {
    coeffs.iter().all(|&c| c <= 1.0 + tol)
}

/// Clip the fitted coefficients below at 1, snapping values within a tiny
/// deadband of the floor; requirements that cancel exactly in real
/// arithmetic land at 1.0 instead of 1 + O(eps) rounding residue.
pub(crate) fn clip_coefficients(coeffs: &mut [f64]) {
    for c in coeffs.iter_mut() {
        if *c <= 1.0 + 1e-12 {
            *c = 1.0;
        }
    }
}
