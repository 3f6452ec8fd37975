//! Seeded random one-step block cocycles with planted ground truth.
//!
//! Each step multiplies by `S D_k S^{-1}` where `D_k` is block diagonal with
//! one log-rate per block drawn uniformly from the block's interval. The
//! cocycle is evaluated through per-coordinate cumulative rate sums, so
//! `Phi(m, n, x)` is exact regardless of the distance `m - n`, and identical
//! seeds give bit-identical systems.

use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::horizon::unit_f64;
use crate::linalg::{LinearOperator, NormKind};
use crate::spectra::{FamilyKind, ProjectorFamily};
use crate::state::{StatePoint, TranslationSemiflow};
use crate::system::{Cocycle, ConstantProjector, ProjectorFn, SkewEvolutionSystem};

use super::{ExpectedSource, FixtureDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRole {
    Stable,
    Central,
    Unstable,
}

impl BlockRole {
    pub fn name(self) -> &'static str {
        match self {
            BlockRole::Stable => "stable",
            BlockRole::Central => "central",
            BlockRole::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BlockSpec {
    pub size: usize,
    pub rate_range: (f64, f64),
    pub role: BlockRole,
}

impl BlockSpec {
    pub fn new(size: usize, rate_range: (f64, f64), role: BlockRole) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("block size must be >= 1".into()));
        }
        let (lo, hi) = rate_range;
        if !(lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "rate interval [{lo}, {hi}] is empty"
            )));
        }
        let ok = match role {
            BlockRole::Stable => hi < 0.0,
            BlockRole::Unstable => lo > 0.0,
            BlockRole::Central => lo <= 0.0 && hi >= 0.0,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "rate interval [{lo}, {hi}] does not fit the {} role",
                role.name()
            )));
        }
        Ok(Self {
            size,
            rate_range,
            role,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conjugation {
    None,
    Similarity { condition_cap: f64 },
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub blocks: Vec<BlockSpec>,
    pub conjugation: Conjugation,
    pub seed: u64,
    pub n_steps: u32,
    pub norm: NormKind,
}

impl GeneratorSpec {
    pub fn new(blocks: Vec<BlockSpec>, conjugation: Conjugation, seed: u64) -> Self {
        Self {
            blocks,
            conjugation,
            seed,
            n_steps: 128,
            norm: NormKind::L1,
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// What the generator planted: per-block invariant projectors, roles and
/// rate intervals, and the (possibly conjugated) frame directions.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub block_projectors: Vec<LinearOperator>,
    pub roles: Vec<BlockRole>,
    pub rate_ranges: Vec<(f64, f64)>,
    /// Columns of the similarity frame, normalized; coordinate unit vectors
    /// when no conjugation was applied.
    pub frame_vectors: Vec<Vec<f64>>,
}

impl GroundTruth {
    fn role_projector(&self, norm: NormKind, want: impl Fn(BlockRole) -> bool) -> LinearOperator {
        let d = self.block_projectors[0].dim();
        let mut acc = LinearOperator::zero(d, norm);
        for (p, role) in self.block_projectors.iter().zip(&self.roles) {
            if want(*role) {
                acc = acc.add(p).expect("same dims");
            }
        }
        acc
    }

    /// Pair (stable part, everything else).
    pub fn dichotomy_pair(&self, norm: NormKind) -> Result<ProjectorFamily> {
        let p1 = self.role_projector(norm, |r| r == BlockRole::Stable);
        let p2 = self.role_projector(norm, |r| r != BlockRole::Stable);
        ProjectorFamily::new(
            FamilyKind::Pair,
            vec![
                Arc::new(ConstantProjector::new(&p1)),
                Arc::new(ConstantProjector::new(&p2)),
            ],
        )
    }

    /// Triple (stable, unstable, central).
    pub fn trichotomy_triple(&self, norm: NormKind) -> Result<ProjectorFamily> {
        let p1 = self.role_projector(norm, |r| r == BlockRole::Stable);
        let p2 = self.role_projector(norm, |r| r == BlockRole::Unstable);
        let p3 = self.role_projector(norm, |r| r == BlockRole::Central);
        ProjectorFamily::new(
            FamilyKind::Triple,
            vec![
                Arc::new(ConstantProjector::new(&p1)),
                Arc::new(ConstantProjector::new(&p2)),
                Arc::new(ConstantProjector::new(&p3)),
            ],
        )
    }
}

pub struct GeneratedFixture {
    pub system: SkewEvolutionSystem,
    pub truth: GroundTruth,
    pub descriptor: FixtureDescriptor,
}

struct BlockCocycle {
    dim: usize,
    frame: Option<(LinearOperator, LinearOperator)>,
    /// [coordinate][k]: cumulative log-rate sums, k in 0..=n_steps.
    cumulative: Vec<Vec<f64>>,
    n_steps: u32,
    norm: NormKind,
}

impl Cocycle for BlockCocycle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn discrete_only(&self) -> bool {
        true
    }

    fn entries(&self, t: f64, s: f64, _x: &StatePoint) -> Result<Vec<f64>> {
        if t > self.n_steps as f64 {
            return Err(Error::BeyondStepRange(t, self.n_steps));
        }
        let m = t as usize;
        let n = s as usize;
        let diag: Vec<f64> = (0..self.dim)
            .map(|i| (self.cumulative[i][m] - self.cumulative[i][n]).exp())
            .collect();
        let d = LinearOperator::diagonal(self.norm, &diag);
        match &self.frame {
            None => Ok(d.entries().to_vec()),
            Some((s_mat, s_inv)) => {
                let out = s_mat.matmul(&d)?.matmul(s_inv)?;
                Ok(out.entries().to_vec())
            }
        }
    }
}

/// Generate the system and its planted truth. With similarity conjugation,
/// frames whose condition number exceeds the cap are discarded and the next
/// deterministic substream is tried.
pub fn random_block_cocycle(spec: &GeneratorSpec) -> Result<GeneratedFixture> {
    if spec.blocks.is_empty() {
        return Err(Error::InvalidParameter("no blocks in generator spec".into()));
    }
    if spec.n_steps < 2 {
        return Err(Error::InvalidParameter("n_steps must be >= 2".into()));
    }
    for b in &spec.blocks {
        BlockSpec::new(b.size, b.rate_range, b.role)?;
    }
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // per-step, per-block rates expanded to per-coordinate cumulative sums
    let mut cumulative = vec![vec![0.0f64; spec.n_steps as usize + 1]; dim];
    for k in 0..spec.n_steps as usize {
        let mut coord = 0;
        for b in &spec.blocks {
            let (lo, hi) = b.rate_range;
            let rate = lo + (hi - lo) * unit_f64(&mut rng);
            for _ in 0..b.size {
                cumulative[coord][k + 1] = cumulative[coord][k] + rate;
                coord += 1;
            }
        }
    }

    let frame = match spec.conjugation {
        Conjugation::None => None,
        Conjugation::Similarity { condition_cap } => {
            let mut attempt: u64 = 0;
            loop {
                let mut frame_rng =
                    ChaCha8Rng::seed_from_u64(spec.seed ^ 0xA076_1D64_78BD_642F ^ attempt);
                let entries: Vec<f64> = (0..dim * dim)
                    .map(|_| 2.0 * unit_f64(&mut frame_rng) - 1.0)
                    .collect();
                if let Ok(s_mat) = LinearOperator::from_entries(dim, NormKind::L2, entries) {
                    if let Ok(s_inv) = s_mat.inverse() {
                        let cond = s_mat.operator_norm() * s_inv.operator_norm();
                        if cond <= condition_cap {
                            let s_mat =
                                LinearOperator::from_entries(dim, spec.norm, s_mat.entries().to_vec())?;
                            let s_inv =
                                LinearOperator::from_entries(dim, spec.norm, s_inv.entries().to_vec())?;
                            break Some((s_mat, s_inv));
                        }
                    }
                }
                attempt += 1;
                if attempt > 10_000 {
                    return Err(Error::InvalidParameter(
                        "could not draw a frame within the condition cap".into(),
                    ));
                }
            }
        }
    };

    // planted projectors: conjugated coordinate blocks
    let mut block_projectors = Vec::with_capacity(spec.blocks.len());
    let mut start = 0;
    for b in &spec.blocks {
        let coord = ConstantProjector::coordinate(dim, start, b.size);
        let base = LinearOperator::from_entries(dim, spec.norm, coord.at(&StatePoint::Scalar(0.0)))?;
        let planted = match &frame {
            None => base,
            Some((s_mat, s_inv)) => s_mat.matmul(&base)?.matmul(s_inv)?,
        };
        block_projectors.push(planted);
        start += b.size;
    }

    let frame_vectors: Vec<Vec<f64>> = (0..dim)
        .map(|j| {
            let mut col: Vec<f64> = match &frame {
                None => {
                    let mut e = vec![0.0; dim];
                    e[j] = 1.0;
                    e
                }
                Some((s_mat, _)) => (0..dim).map(|i| s_mat.get(i, j)).collect(),
            };
            let n = spec.norm.vector_norm(&col);
            for c in col.iter_mut() {
                *c /= n;
            }
            col
        })
        .collect();

    let truth = GroundTruth {
        block_projectors,
        roles: spec.blocks.iter().map(|b| b.role).collect(),
        rate_ranges: spec.blocks.iter().map(|b| b.rate_range).collect(),
        frame_vectors,
    };

    let cocycle = Arc::new(BlockCocycle {
        dim,
        frame,
        cumulative,
        n_steps: spec.n_steps,
        norm: spec.norm,
    });
    let system = SkewEvolutionSystem::new(
        format!("gen(seed={})", spec.seed),
        spec.norm,
        Arc::new(TranslationSemiflow),
        cocycle,
    );
    let roles: Vec<&str> = spec.blocks.iter().map(|b| b.role.name()).collect();
    let descriptor = FixtureDescriptor {
        name: format!("gen(seed={})", spec.seed),
        parameters: format!(
            "blocks {:?}, conjugation {:?}, {} steps",
            spec.blocks, spec.conjugation, spec.n_steps
        ),
        expected: format!("planted roles {roles:?} with rates inside the declared intervals"),
        source: ExpectedSource::GeneratorTruth,
    };
    Ok(GeneratedFixture {
        system,
        truth,
        descriptor,
    })
}
