//! Fixed inputs shared by the benchmarks.

use qubit_coherence::states::random_mixed;
use qubit_coherence::{RngSeed, TwoQubitState};

/// `n` Ginibre states cycling through ranks 1 to 4.
pub fn fixture_states(n: u64) -> Vec<TwoQubitState> {
    (0..n)
        .map(|k| {
            random_mixed(&mut RngSeed(7).stream(k), 1 + (k % 4) as usize).expect("rank in 1..=4")
        })
        .collect()
}
