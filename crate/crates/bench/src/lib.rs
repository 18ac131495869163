//! Shared workloads for the criterion benchmarks.

use qss_core::{fraction_to_phase, Fraction, Phase, RandomStream};
use rand::Rng;

/// `n` counting phases drawn from uniformly distributed fractions.
pub fn uniform_phases(n: usize, seed: u64) -> Vec<Phase> {
    (0..n as u64)
        .map(|i| {
            let v: f64 = RandomStream::new(seed, i).rng().random();
            fraction_to_phase(Fraction::new(v).expect("unit interval"))
        })
        .collect()
}
