use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest supply-induced frequency deviation the model accepts.
pub const MAX_CLOCK_OFFSET: f64 = 0.5;

/// Slow clock with a fixed multiplicative offset from nominal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockModel {
    pub nominal_hz: f64,
    pub epsilon: f64,
}

impl ClockModel {
    pub fn new(nominal_hz: f64, epsilon: f64) -> Result<Self, String> {
        if !(nominal_hz > 0.0 && nominal_hz.is_finite()) {
            return Err(format!("clock frequency {nominal_hz} must be positive"));
        }
        if !(epsilon.abs() <= MAX_CLOCK_OFFSET) {
            return Err(format!("clock offset {epsilon} exceeds ±{MAX_CLOCK_OFFSET}"));
        }
        Ok(ClockModel { nominal_hz, epsilon })
    }

    pub fn period_s(&self) -> f64 {
        1.0 / (self.nominal_hz * (1.0 + self.epsilon))
    }

    /// Start time of tick `k`.
    pub fn tick_time(&self, k: u64) -> f64 {
        k as f64 * self.period_s()
    }
}

/// Per-lablet random stream: the scenario seed picks the key, the lablet
/// index the stream.
pub fn lablet_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64);
    rng
}

/// Clock offset drawn uniformly from `[-jitter, jitter]`.
pub fn draw_offset(seed: u64, idx: usize, jitter: f64) -> f64 {
    if jitter == 0.0 {
        return 0.0;
    }
    lablet_rng(seed, idx).random_range(-jitter..=jitter)
}
