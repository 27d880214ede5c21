//! Deterministic random number generation.
//!
//! The generator is SplitMix64: a 64-bit counter advanced by a fixed odd
//! increment, pushed through an avalanching finalizer. It is fast, has a
//! guaranteed period of 2^64, cannot get stuck in a zero state, and — most
//! importantly for this crate — the entire recurrence fits in a few lines, so
//! a run can be replayed exactly in any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)          (all arithmetic mod 2^64)
//! ```
//!
//! Uniform doubles are mapped as `u = (output + 1) / 2^64`, which lands in the
//! half-open interval `(0, 1]`. Excluding zero means `ln(u)` is always finite,
//! so exponential and Box-Muller transforms need no special cases; including
//! 1.0 is harmless for every consumer in this crate because cumulative weight
//! scans treat the final bucket as closed.
//!
//! Gaussian variates use the Box-Muller transform and consume exactly two
//! uniforms per draw (the sine partner of each pair is discarded to keep the
//! stream accounting trivial).

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_CONST_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_CONST_2: u64 = 0x94D0_49BB_1331_11EB;

/// A seeded SplitMix64 stream.
///
/// Cloning the struct forks the stream at its current position; use
/// [`Rng::spawn`] to derive a statistically independent child stream instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng {
    seed: u64,
    state: u64,
}

impl Rng {
    /// Creates a generator whose counter starts at `seed`.
    pub fn new(seed: u64) -> Self {
        Rng { seed, state: seed }
    }

    /// The seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_CONST_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_CONST_2);
        z ^ (z >> 31)
    }

    /// Uniform double in `(0, 1]`, computed as `(next_u64() + 1) / 2^64`.
    pub fn next_uniform(&mut self) -> f64 {
        let x = self.next_u64();
        // u128 sidesteps the wrap at u64::MAX; the conversion to f64 rounds
        // to nearest, which keeps the result inside (0, 1].
        ((x as u128 + 1) as f64) * (1.0 / 18_446_744_073_709_551_616.0)
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn next_gaussian(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.next_standard_normal()
    }

    /// Derives a child stream seeded from the next raw output.
    ///
    /// Used to give independent components (e.g. particle propagation versus
    /// resampling) their own streams: drawing more values in one component
    /// then never shifts the other component's sequence.
    pub fn spawn(&mut self) -> Rng {
        Rng::new(self.next_u64())
    }
}
