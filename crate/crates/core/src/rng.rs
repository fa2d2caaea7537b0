//! Counter-derived random streams.
//!
//! Every draw is keyed by `(run_seed, particle, step, kind)`, so particle
//! updates can run in any order (or on any thread) and still replay
//! bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// What a sub-stream is used for. Distinct kinds never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DrawKind {
    Init = 1,
    Diffusion = 2,
    IndependentKick = 3,
    Resample = 4,
}

/// Seed root for one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    run_seed: u64,
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(run_seed: u64) -> Self {
        Self { run_seed }
    }

    pub fn run_seed(&self) -> u64 {
        self.run_seed
    }

    /// Independent generator for one `(particle, step, kind)` key.
    pub fn substream(&self, particle: usize, step: u64, kind: DrawKind) -> ChaCha8Rng {
        let mut state = self.run_seed;
        let mut absorb = |word: u64| {
            let mut s = splitmix64(&mut state) ^ word;
            state = splitmix64(&mut s);
        };
        absorb(particle as u64);
        absorb(step);
        absorb(kind as u64);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }

    /// Fills `out` with standard normal draws from the keyed sub-stream.
    pub fn fill_normal(&self, particle: usize, step: u64, kind: DrawKind, out: &mut [f64]) {
        let mut rng = self.substream(particle, step, kind);
        for z in out.iter_mut() {
            *z = StandardNormal.sample(&mut rng);
        }
    }
}
