//! Addressable uniform draws.
//!
//! Every uniform is a pure function of `(master_seed, sim_index, race_index,
//! driver_index)`: the ChaCha8 key comes from the master seed, the stream id
//! is the simulation index and the block position is derived from the race
//! and driver slot. Splitting simulations across threads therefore cannot
//! change any draw.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Driver slots per race. A team uses both; a single driver uses slot 0.
pub const SLOTS_PER_RACE: u64 = 2;
/// ChaCha words consumed per uniform (one `u64`).
const WORDS_PER_DRAW: u128 = 2;

/// Sequential reader over one simulation's stream.
#[derive(Clone)]
pub struct DrawStream {
    rng: ChaCha8Rng,
}

impl DrawStream {
    pub fn new(master_seed: u64, sim_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(sim_index);
        Self { rng }
    }

    /// Jumps to the draw for `(race_index, driver_index)`.
    pub fn seek(&mut self, race_index: u64, driver_index: u64) {
        debug_assert!(driver_index < SLOTS_PER_RACE);
        let slot = u128::from(race_index) * u128::from(SLOTS_PER_RACE) + u128::from(driver_index);
        self.rng.set_word_pos(slot * WORDS_PER_DRAW);
    }

    /// Next uniform in the open interval `(0, 1)`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        open01(self.rng.next_u64())
    }
}

/// Top 52 bits, centred in their cell: never exactly 0 or 1 (the largest
/// value is `1 - 2^-53`, which is representable).
#[inline]
pub fn open01(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((bits >> 12) as f64 + 0.5) * SCALE
}

/// The uniform at `(master_seed, sim_index, race_index, driver_index)`.
pub fn uniform_at(master_seed: u64, sim_index: u64, race_index: u64, driver_index: u64) -> f64 {
    let mut s = DrawStream::new(master_seed, sim_index);
    s.seek(race_index, driver_index);
    s.next_open01()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_interval() {
        assert!(open01(0) > 0.0);
        assert!(open01(u64::MAX) < 1.0);
        assert_eq!(open01(u64::MAX), 1.0 - f64::EPSILON / 2.0);
    }

    #[test]
    fn sequential_matches_random_access() {
        let mut s = DrawStream::new(7, 12);
        s.seek(0, 0);
        for race in 0..30 {
            for slot in 0..SLOTS_PER_RACE {
                let seq = s.next_open01();
                assert_eq!(seq, uniform_at(7, 12, race, slot));
            }
        }
    }

    #[test]
    fn streams_differ() {
        assert_ne!(uniform_at(1, 0, 0, 0), uniform_at(1, 1, 0, 0));
        assert_ne!(uniform_at(1, 0, 0, 0), uniform_at(2, 0, 0, 0));
        assert_ne!(uniform_at(1, 0, 0, 0), uniform_at(1, 0, 0, 1));
        assert_ne!(uniform_at(1, 0, 0, 0), uniform_at(1, 0, 1, 0));
    }
}
