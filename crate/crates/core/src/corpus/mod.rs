//! Built-in example systems and seeded random cocycle generators with
//! planted ground truth. These are the oracle layer for the acceptance and
//! property tests and are addressable from the CLI by name.

pub mod generator;

use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::spectra::ProjectorFamily;
use crate::state::{StatePoint, TranslationSemiflow};
use crate::system::{Cocycle, SkewEvolutionSystem};

/// Piecewise-linear function through a list of strictly increasing knots.
/// Evaluation at a knot returns the stored value exactly.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "piecewise-linear function needs at least two knots".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter(
                    "piecewise-linear knots must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            xs: points.iter().map(|p| p.0).collect(),
            ys: points.iter().map(|p| p.1).collect(),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ys[0];
        }
        if t >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|&x| x <= t);
        // xs[k-1] <= t < xs[k]
        if self.xs[k - 1] == t {
            return self.ys[k - 1];
        }
        let w = (t - self.xs[k - 1]) / (self.xs[k] - self.xs[k - 1]);
        self.ys[k - 1] + w * (self.ys[k] - self.ys[k - 1])
    }
}

/// Scalar cocycle `(f(s) / f(t)) e^{rate (t - s)}` over any driving semiflow
/// on R_+.
pub struct RatioExpCocycle {
    pub f: PiecewiseLinear,
    pub rate: f64,
}

impl Cocycle for RatioExpCocycle {
    fn dim(&self) -> usize {
        1
    }

    fn entries(&self, t: f64, s: f64, _x: &StatePoint) -> Result<Vec<f64>> {
        Ok(vec![
            self.f.eval(s) / self.f.eval(t) * (self.rate * (t - s)).exp(),
        ])
    }
}

/// The 2-d oscillating dichotomy example: diagonal exponents
/// `t sin t - s sin s - 2t + 2s` and `2t - 2s - 3t cos t + 3s cos s`.
pub struct OscillatingPairCocycle;

impl Cocycle for OscillatingPairCocycle {
    fn dim(&self) -> usize {
        2
    }

    fn entries(&self, t: f64, s: f64, _x: &StatePoint) -> Result<Vec<f64>> {
        let e1 = t * t.sin() - s * s.sin() - 2.0 * t + 2.0 * s;
        let e2 = 2.0 * t - 2.0 * s - 3.0 * t * t.cos() + 3.0 * s * s.cos();
        Ok(vec![e1.exp(), 0.0, 0.0, e2.exp()])
    }
}

/// Diagonal cocycle with fixed per-coordinate rates `e^{r_i (t - s)}`.
pub struct DiagRateCocycle {
    pub rates: Vec<f64>,
}

impl Cocycle for DiagRateCocycle {
    fn dim(&self) -> usize {
        self.rates.len()
    }

    fn entries(&self, t: f64, s: f64, _x: &StatePoint) -> Result<Vec<f64>> {
        let d = self.rates.len();
        let mut m = vec![0.0; d * d];
        for (i, r) in self.rates.iter().enumerate() {
            m[i * d + i] = (r * (t - s)).exp();
        }
        Ok(m)
    }
}

/// Block-diagonal direct sum of scalar ratio cocycles.
pub struct DirectSumCocycle {
    pub parts: Vec<RatioExpCocycle>,
}

impl Cocycle for DirectSumCocycle {
    fn dim(&self) -> usize {
        self.parts.len()
    }

    fn entries(&self, t: f64, s: f64, x: &StatePoint) -> Result<Vec<f64>> {
        let d = self.parts.len();
        let mut m = vec![0.0; d * d];
        for (i, part) in self.parts.iter().enumerate() {
            m[i * d + i] = part.entries(t, s, x)?[0];
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeVariant {
    /// The literal exponent formulas with the one-sided integral
    /// `int_0^t x(tau) dtau` and the boundary factors `(t - s) x(0)`.
    /// These do not satisfy the cocycle axioms; the variant exists so that
    /// axiom verification can demonstrate that.
    Paper,
    /// Every time-length coefficient integrated along the elapsed orbit
    /// segment: both `(t - s) x(0)` and the integral become
    /// `int_0^{t-s} x(tau) dtau`, which composes exactly.
    Corrected,
}

impl CeVariant {
    pub fn name(self) -> &'static str {
        match self {
            CeVariant::Paper => "paper",
            CeVariant::Corrected => "corrected",
        }
    }
}

impl FromStr for CeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CeVariant::Paper),
            "corrected" => Ok(CeVariant::Corrected),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant `{other}` (expected paper|corrected)"
            ))),
        }
    }
}

/// Base function for the function-space example: f(t) = 2 - e^{-t},
/// nondecreasing with limit l = 2, and a closed-form orbit integral.
#[derive(Debug, Clone, Copy, Default)]
pub struct CeBase;

impl CeBase {
    pub fn value(&self, t: f64) -> f64 {
        2.0 - (-t).exp()
    }

    pub fn limit(&self) -> f64 {
        2.0
    }

    /// `int_0^delta f(u + tau) dtau = 2 delta + e^{-(u+delta)} - e^{-u}`.
    pub fn integral(&self, u: f64, delta: f64) -> f64 {
        2.0 * delta + (-(u + delta)).exp() - (-u).exp()
    }
}

/// The 3-d function-space cocycle with stable / expanding / central
/// directions driven by the translate x = f_u.
pub struct FunctionSpaceCocycle {
    pub base: CeBase,
    pub variant: CeVariant,
}

impl Cocycle for FunctionSpaceCocycle {
    fn dim(&self) -> usize {
        3
    }

    fn state_kind(&self) -> &'static str {
        "function-shift"
    }

    fn entries(&self, t: f64, s: f64, x: &StatePoint) -> Result<Vec<f64>> {
        let u = match x {
            StatePoint::FunctionShift { shift } => *shift,
            other => {
                return Err(Error::IncompatibleState {
                    expected: "function-shift",
                    got: other.kind_name(),
                })
            }
        };
        let (a1, a2, a3) = match self.variant {
            CeVariant::Paper => {
                let x0 = self.base.value(u);
                let j = self.base.integral(u, t);
                (
                    -2.0 * (t - s) * x0 + j,
                    (t - s) + j,
                    -(t - s) * x0 + 2.0 * j,
                )
            }
            CeVariant::Corrected => {
                let k = self.base.integral(u, t - s);
                (-k, (t - s) + k, k)
            }
        };
        Ok(vec![
            a1.exp(),
            0.0,
            0.0,
            0.0,
            a2.exp(),
            0.0,
            0.0,
            0.0,
            a3.exp(),
        ])
    }
}

/// Cocycle generated by an explicit one-step matrix sequence; defined on
/// integer times only.
pub struct StepSequenceCocycle {
    dim: usize,
    steps: Vec<Vec<f64>>,
    norm: NormKind,
}

impl StepSequenceCocycle {
    pub fn new(dim: usize, norm: NormKind, steps: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if steps.is_empty() {
            return Err(Error::InvalidParameter(
                "step sequence must hold at least one matrix".into(),
            ));
        }
        for (k, s) in steps.iter().enumerate() {
            if s.len() != dim * dim {
                return Err(Error::InvalidParameter(format!(
                    "step {k} has {} entries, expected {}",
                    s.len(),
                    dim * dim
                )));
            }
        }
        Ok(Self { dim, steps, norm })
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

impl Cocycle for StepSequenceCocycle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn discrete_only(&self) -> bool {
        true
    }

    fn entries(&self, t: f64, s: f64, _x: &StatePoint) -> Result<Vec<f64>> {
        let m = t as usize;
        let n = s as usize;
        if m > self.steps.len() {
            return Err(Error::BeyondStepRange(t, self.steps.len() as u32));
        }
        let mut acc = crate::linalg::LinearOperator::identity(self.dim, self.norm);
        for k in n..m {
            let step =
                crate::linalg::LinearOperator::from_entries(self.dim, self.norm, self.steps[k].clone())?;
            acc = step.matmul(&acc)?;
        }
        Ok(acc.entries().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinName {
    ExCe,
    ExNues1,
    ExNueis1,
    ExNued,
    ExNuet,
    DiagFixture,
    DirectSum,
}

impl BuiltinName {
    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinName::ExCe => "ex_ce",
            BuiltinName::ExNues1 => "ex_nues1",
            BuiltinName::ExNueis1 => "ex_nueis1",
            BuiltinName::ExNued => "ex_nued",
            BuiltinName::ExNuet => "ex_nuet",
            BuiltinName::DiagFixture => "diag_fixture",
            BuiltinName::DirectSum => "direct_sum",
        }
    }

    pub fn all() -> &'static [BuiltinName] {
        &[
            BuiltinName::ExCe,
            BuiltinName::ExNues1,
            BuiltinName::ExNueis1,
            BuiltinName::ExNued,
            BuiltinName::ExNuet,
            BuiltinName::DiagFixture,
            BuiltinName::DirectSum,
        ]
    }
}

impl FromStr for BuiltinName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinName::all()
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownBuiltin(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedSource {
    WorkedExample,
    GeneratorTruth,
}

/// What a fixture is and what classification it should exhibit.
#[derive(Debug, Clone)]
pub struct FixtureDescriptor {
    pub name: String,
    pub parameters: String,
    pub expected: String,
    pub source: ExpectedSource,
}

#[derive(Debug, Clone)]
pub struct BuiltinParams {
    pub variant: CeVariant,
    pub norm: Option<NormKind>,
    /// Upper end of the precomputed knot range for the tabulated base
    /// functions; evaluations beyond it clamp to the last knot.
    pub t_max: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        Self {
            variant: CeVariant::Corrected,
            norm: None,
            t_max: 130.0,
        }
    }
}

/// Breakpoints for the stable example's base function: f(n) = e^{2n} and
/// f(n + e^{-n^2}) = 1. The secondary knot at n = 0 lands exactly on the
/// integer 1 and conflicts with f(1) = e^2; the integer rule wins there.
/// Secondary knots that collapse onto their integer at double precision are
/// dropped (n >= 6); only integer samples feed the discrete analyses.
fn nues_breakpoints(t_max: f64, stable: bool) -> Vec<(f64, f64)> {
    let top = t_max.ceil() as i64 + 1;
    let mut pts = Vec::new();
    for n in 0..=top {
        let nf = n as f64;
        let integer_value = if stable { (2.0 * nf).exp() } else { 1.0 };
        pts.push((nf, integer_value));
        if n == 0 {
            continue;
        }
        let offset = (-(nf * nf)).exp();
        let b = nf + offset;
        if b > nf && b < nf + 1.0 {
            let spike_value = if stable { 1.0 } else { (2.0 * nf).exp() };
            pts.push((b, spike_value));
        }
    }
    pts
}

fn descriptor(name: &str, parameters: String, expected: &str) -> FixtureDescriptor {
    FixtureDescriptor {
        name: name.to_string(),
        parameters,
        expected: expected.to_string(),
        source: ExpectedSource::WorkedExample,
    }
}

/// Construct a built-in fixture by name.
pub fn builtin(
    name: BuiltinName,
    params: &BuiltinParams,
) -> Result<(SkewEvolutionSystem, FixtureDescriptor)> {
    let norm = params.norm.unwrap_or(NormKind::L1);
    let driver = Arc::new(TranslationSemiflow);
    let (system, desc) = match name {
        BuiltinName::ExNues1 => {
            let f = PiecewiseLinear::new(&nues_breakpoints(params.t_max, true))?;
            let cocycle = Arc::new(RatioExpCocycle { f, rate: -1.0 });
            (
                SkewEvolutionSystem::new("ex_nues1", norm, driver, cocycle),
                descriptor(
                    "ex_nues1",
                    format!("scalar ratio cocycle, rate -1, f(n) = e^(2n); norm {}", norm.name()),
                    "exponentially stable; integer-time contraction rate 3",
                ),
            )
        }
        BuiltinName::ExNueis1 => {
            let f = PiecewiseLinear::new(&nues_breakpoints(params.t_max, false))?;
            let cocycle = Arc::new(RatioExpCocycle { f, rate: 1.0 });
            (
                SkewEvolutionSystem::new("ex_nueis1", norm, driver, cocycle),
                descriptor(
                    "ex_nueis1",
                    format!("scalar ratio cocycle, rate +1, f(n) = 1; norm {}", norm.name()),
                    "exponentially instable; integer-time expansion rate 1",
                ),
            )
        }
        BuiltinName::ExNued => (
            SkewEvolutionSystem::new("ex_nued", norm, driver, Arc::new(OscillatingPairCocycle)),
            descriptor(
                "ex_nued",
                format!("2-d oscillating diagonal cocycle; norm {}", norm.name()),
                "exponentially dichotomic with nu = 1 and coefficient function N(u) = e^(6u)",
            ),
        ),
        BuiltinName::ExCe | BuiltinName::ExNuet => {
            let cocycle = Arc::new(FunctionSpaceCocycle {
                base: CeBase,
                variant: params.variant,
            });
            let label = name.as_str();
            let expected = if name == BuiltinName::ExNuet {
                "exponentially trichotomic with nu1 = nu2 = -x(0), nu3 = x(0), nu4 = 1 \
                 on the coordinate triple"
            } else {
                "skew-evolution semiflow on R^3; the corrected variant satisfies the axioms, \
                 the literal variant does not"
            };
            (
                SkewEvolutionSystem::new(label, norm, driver, cocycle),
                descriptor(
                    label,
                    format!(
                        "3-d function-space cocycle, base f(t) = 2 - e^(-t), limit 2, variant {}; norm {}",
                        params.variant.name(),
                        norm.name()
                    ),
                    expected,
                ),
            )
        }
        BuiltinName::DiagFixture => (
            SkewEvolutionSystem::new(
                "diag_fixture",
                norm,
                driver,
                Arc::new(DiagRateCocycle {
                    rates: vec![-3.0, 1.0, 0.0],
                }),
            ),
            descriptor(
                "diag_fixture",
                format!("diagonal rates (-3, +1, 0); norm {}", norm.name()),
                "trichotomic reference: stable, unstable and constant central blocks",
            ),
        ),
        BuiltinName::DirectSum => {
            let stable = RatioExpCocycle {
                f: PiecewiseLinear::new(&nues_breakpoints(params.t_max, true))?,
                rate: -1.0,
            };
            let unstable = RatioExpCocycle {
                f: PiecewiseLinear::new(&nues_breakpoints(params.t_max, false))?,
                rate: 1.0,
            };
            (
                SkewEvolutionSystem::new(
                    "direct_sum",
                    norm,
                    driver,
                    Arc::new(DirectSumCocycle {
                        parts: vec![stable, unstable],
                    }),
                ),
                descriptor(
                    "direct_sum",
                    format!("stable rate-3 block + unstable rate-1 block; norm {}", norm.name()),
                    "exponentially dichotomic at integers with nu1 = -3, nu2 = 1 and a = 1",
                ),
            )
        }
    };
    Ok((system, desc))
}

/// The coordinate triple used by the trichotomy example.
pub fn ex_nuet_family() -> ProjectorFamily {
    ProjectorFamily::coordinate(3, &[1, 1, 1]).expect("static sizes")
}

/// One recorded condition of the trichotomy example's stated constants.
#[derive(Debug, Clone)]
pub struct ConstantCheck {
    pub name: String,
    pub holds: bool,
    /// Smallest log-domain slack observed over the grid (negative when the
    /// condition fails somewhere).
    pub min_slack: f64,
}

/// Evaluate the trichotomy example's claimed coefficient functions and
/// exponents as written, over a sampled real-time grid, and record whether
/// each of the four defining inequalities holds with exactly those
/// constants. Nothing is corrected here; the outcome is informational.
pub fn nuet_constants_report(
    system: &SkewEvolutionSystem,
    states: &[StatePoint],
    triples: &[(f64, f64, f64)],
) -> Result<Vec<ConstantCheck>> {
    let base = CeBase;
    let l = base.limit();
    let mut checks = vec![
        ConstantCheck {
            name: "stable side with N1(u) = e^(u x(0)), nu1 = -x(0)".into(),
            holds: true,
            min_slack: f64::INFINITY,
        },
        ConstantCheck {
            name: "expanding side with N4(u) = e^(-l u), nu4 = 1".into(),
            holds: true,
            min_slack: f64::INFINITY,
        },
        ConstantCheck {
            name: "central lower bound with N2(u) = e^(-2 l u), nu2 = -x(0)".into(),
            holds: true,
            min_slack: f64::INFINITY,
        },
        ConstantCheck {
            name: "central upper bound with N3(u) = e^(2 u x(0)), nu3 = x(0)".into(),
            holds: true,
            min_slack: f64::INFINITY,
        },
    ];
    let record = |idx: usize, slack: f64, checks: &mut Vec<ConstantCheck>| {
        if slack < checks[idx].min_slack {
            checks[idx].min_slack = slack;
        }
        if slack < -1e-12 {
            checks[idx].holds = false;
        }
    };
    for x in states {
        let u = match x {
            StatePoint::FunctionShift { shift } => *shift,
            other => {
                return Err(Error::IncompatibleState {
                    expected: "function-shift",
                    got: other.kind_name(),
                })
            }
        };
        let x0 = base.value(u);
        for &(t, s, t0) in triples {
            let at = system.evaluate(t, t0, x)?;
            let mid = system.evaluate(s, t0, x)?;
            // log-domain component norms of the diagonal operators
            let (d1t, d2t, d3t) = (at.get(0, 0).ln(), at.get(1, 1).ln(), at.get(2, 2).ln());
            let (d1s, d2s, d3s) = (mid.get(0, 0).ln(), mid.get(1, 1).ln(), mid.get(2, 2).ln());
            // |Phi P1| <= N1(s) |Phi_s P1| e^{nu1 (t-s)}
            record(0, s * x0 - x0 * (t - s) + d1s - d1t, &mut checks);
            // N4(t) |Phi_t P2| >= |Phi_s P2| e^{nu4 (t-s)}
            record(1, -l * t + d2t - d2s - (t - s), &mut checks);
            // N2(t) |Phi_t P3| >= |Phi_s P3| e^{nu2 (t-s)}
            record(2, -2.0 * l * t + d3t - d3s + x0 * (t - s), &mut checks);
            // |Phi_t P3| <= N3(s) |Phi_s P3| e^{nu3 (t-s)}
            record(3, 2.0 * s * x0 + x0 * (t - s) + d3s - d3t, &mut checks);
        }
    }
    Ok(checks)
}

/// Deterministic random axiom-check triples `t >= s >= t0 >= 0` below
/// `t_max`, integer-valued when `integer` is set.
pub fn random_triples(seed: u64, count: usize, t_max: f64, integer: bool) -> Vec<(f64, f64, f64)> {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = [
            crate::horizon::unit_f64(&mut rng) * t_max,
            crate::horizon::unit_f64(&mut rng) * t_max,
            crate::horizon::unit_f64(&mut rng) * t_max,
        ];
        if integer {
            for x in v.iter_mut() {
                *x = x.round();
            }
        }
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out.push((v[2], v[1], v[0]));
    }
    out
}

/// Evenly spread states of the representation the system expects.
pub fn default_states(system: &SkewEvolutionSystem, count: usize) -> Vec<StatePoint> {
    (0..count.max(1))
        .map(|i| {
            let v = i as f64 * 0.5;
            match system.state_kind() {
                "function-shift" => StatePoint::FunctionShift { shift: v },
                _ => StatePoint::Scalar(v),
            }
        })
        .collect()
}
