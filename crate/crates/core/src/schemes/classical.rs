use rand_distr::{Binomial, Distribution};

use super::{counting_phase, EstimateRecord, McConfig};
use crate::error::Result;
use crate::phase_dist::{fraction_of, phase_of, Phase};
use crate::rng::RandomStream;

/// Classical Monte Carlo: `n_shot` Bernoulli draws at `sin^2(pi*phi)`.
pub fn estimate_mc(phi: Phase, cfg: &McConfig, rng: &RandomStream) -> Result<EstimateRecord> {
    cfg.validate()?;
    let p = fraction_of(counting_phase(phi)?);
    let heads = Binomial::new(cfg.n_shot, p)
        .expect("probability clamped to [0, 1]")
        .sample(&mut rng.rng());
    let fraction = heads as f64 / cfg.n_shot as f64;
    Ok(EstimateRecord {
        phase_estimate: phase_of(fraction),
        fraction_estimate: fraction,
        queries: cfg.n_shot,
        shots: cfg.n_shot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities() {
        let cfg = McConfig { n_shot: 100 };
        for seed in 0..20 {
            let rng = RandomStream::new(seed, 3);
            let zero = estimate_mc(Phase::counting(0.0).unwrap(), &cfg, &rng).unwrap();
            assert_eq!(zero.fraction_estimate, 0.0);
            let one = estimate_mc(Phase::counting(0.5).unwrap(), &cfg, &rng).unwrap();
            assert_eq!(one.fraction_estimate, 1.0);
            assert_eq!(one.phase_estimate, 0.5);
        }
    }

    #[test]
    fn unbiased_mean() {
        let cfg = McConfig { n_shot: 1024 };
        let phi = Phase::counting(0.25).unwrap();
        let n = 10_000;
        let mean = (0..n)
            .map(|s| {
                estimate_mc(phi, &cfg, &RandomStream::new(s, 0))
                    .unwrap()
                    .fraction_estimate
            })
            .sum::<f64>()
            / n as f64;
        let bound = 3.0 * (0.25f64 / (1024.0 * n as f64)).sqrt();
        assert!((mean - 0.5).abs() < bound.min(0.005), "{mean}");
    }
}
