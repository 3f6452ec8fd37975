//! Sampling horizon for the discrete certificates: how far in time to look
//! and which states and unit vectors to quantify over.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::state::StatePoint;

#[derive(Debug, Clone)]
pub struct Horizon {
    pub n_max: u32,
    pub states: Vec<StatePoint>,
    pub vectors: Vec<Vec<f64>>,
}

impl Horizon {
    pub fn new(n_max: u32, states: Vec<StatePoint>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "horizon n_max must be >= 2, got {n_max}"
            )));
        }
        if states.is_empty() {
            return Err(Error::EmptySamples("horizon states".into()));
        }
        if vectors.is_empty() {
            return Err(Error::EmptySamples("horizon vectors".into()));
        }
        Ok(Self {
            n_max,
            states,
            vectors,
        })
    }

    /// Default vector set: the signed coordinate unit vectors plus
    /// `n_random` random vectors normalized in `norm`.
    pub fn with_default_vectors(
        n_max: u32,
        dim: usize,
        norm: NormKind,
        n_random: usize,
        seed: u64,
        states: Vec<StatePoint>,
    ) -> Result<Self> {
        Self::new(n_max, states, default_unit_vectors(dim, norm, n_random, seed))
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> {
        0..=self.n_max
    }
}

/// Uniform f64 in [0, 1) from the raw stream; kept local so sampled values do
/// not depend on distribution internals of any particular rand release.
pub(crate) fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn default_unit_vectors(dim: usize, norm: NormKind, n_random: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim + n_random);
    for i in 0..dim {
        let mut plus = vec![0.0; dim];
        plus[i] = 1.0;
        out.push(plus);
        let mut minus = vec![0.0; dim];
        minus[i] = -1.0;
        out.push(minus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut produced = 0;
    while produced < n_random {
        let v: Vec<f64> = (0..dim).map(|_| 2.0 * unit_f64(&mut rng) - 1.0).collect();
        let n = norm.vector_norm(&v);
        if n < 1e-6 {
            continue;
        }
        out.push(v.iter().map(|c| c / n).collect());
        produced += 1;
    }
    out
}
