//! Reproducible uniform streams for parallel replicas.
//!
//! One master seed plus a stream id give a ChaCha stream that is bit-exactly
//! reproducible and statistically independent across stream ids, so replicas
//! can run in parallel and still aggregate deterministically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Anything that hands out uniforms in [0, 1). Walk kernels draw exactly one
/// uniform per step, which keeps coupled simulations aligned.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Counter-based splittable stream: `(master_seed, stream_id)` identifies the
/// sequence exactly.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
    master_seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self { inner, master_seed, stream_id }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random()
    }
}

impl UniformSource for RngStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        self.inner.random()
    }
}

/// Fixed list of uniforms; used to drive kernels through hand-picked
/// cylinder events in tests.
#[derive(Debug, Clone)]
pub struct ScriptedUniforms {
    values: Vec<f64>,
    next: usize,
}

impl ScriptedUniforms {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, next: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl UniformSource for ScriptedUniforms {
    fn next_uniform(&mut self) -> f64 {
        let u = self.values[self.next];
        self.next += 1;
        u
    }
}
