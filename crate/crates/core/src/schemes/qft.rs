//! QFT-based schemes, sampled from the analytic counting distribution.

use super::{counting_phase, record, AbpeaConfig, BpeaConfig, EstimateRecord, PeaConfig};
use crate::error::Result;
use crate::phase_dist::{argmax_indices, qc_pmf, GridSize, InverseCdf, Phase, DEFAULT_REFINEMENT};
use crate::rng::RandomStream;

fn sampler(phi: Phase, grid: GridSize) -> Result<InverseCdf> {
    counting_phase(phi)?;
    Ok(qc_pmf(phi, grid)?.sampler())
}

/// One phase estimation run: a single draw from the counting distribution.
pub fn estimate_qft_pea(phi: Phase, cfg: &PeaConfig, rng: &RandomStream) -> Result<EstimateRecord> {
    cfg.validate()?;
    let k = sampler(phi, cfg.grid)?.sample(&mut rng.rng());
    Ok(record(
        k as f64 / cfg.grid.len() as f64,
        cfg.grid.len() - 1,
        1,
    ))
}

/// `n_shot` independent phase estimation runs combined by maximum likelihood.
pub fn estimate_qft_bpea(
    phi: Phase,
    cfg: &BpeaConfig,
    rng: &RandomStream,
) -> Result<EstimateRecord> {
    cfg.validate()?;
    let cdf = sampler(phi, cfg.grid)?;
    let mut rng = rng.rng();
    let samples: Vec<u32> = (0..cfg.n_shot)
        .map(|_| cdf.sample(&mut rng) as u32)
        .collect();
    let est = argmax_indices(&samples, cfg.grid, DEFAULT_REFINEMENT);
    Ok(record(est, cfg.n_shot * (cfg.grid.len() - 1), cfg.n_shot))
}

/// Everything the adaptive scheme did on one run.
#[derive(Clone, Debug, PartialEq)]
pub struct AbpeaTrace {
    /// All drawn samples as grid indices, sorted.
    pub samples: Vec<u32>,
    /// Half-open index range of `samples` kept for the final estimate.
    pub retained: std::ops::Range<usize>,
    /// Whether a dense window was found (false: `n_max` hit, densest used).
    pub converged: bool,
    pub estimate: f64,
}

/// Window length `floor(alpha * n)`, never below one sample.
fn window_len(alpha: f64, n: usize) -> usize {
    ((alpha * n as f64 + 1e-9).floor() as usize).clamp(1, n)
}

/// Leftmost run of `w` consecutive sorted samples spanning at most two grid
/// steps.
fn first_dense_window(sorted: &[u32], w: usize) -> Option<usize> {
    (0..=sorted.len() - w).find(|&a| sorted[a + w - 1] - sorted[a] <= 2)
}

/// Leftmost run of `w` consecutive sorted samples with the smallest span.
fn densest_window(sorted: &[u32], w: usize) -> usize {
    (0..=sorted.len() - w)
        .min_by_key(|&a| (sorted[a + w - 1] - sorted[a], a))
        .expect("w <= len")
}

/// Adaptive Bayesian phase estimation, returning the full trace.
///
/// Starts from `n_min` sorted samples and keeps adding one at a time until
/// `floor(alpha * #S)` consecutive samples fit in an interval of `2/T` or
/// `n_max` samples are held. Samples outside the chosen interval are dropped
/// before the maximum-likelihood step.
pub fn abpea_trace(phi: Phase, cfg: &AbpeaConfig, rng: &RandomStream) -> Result<AbpeaTrace> {
    cfg.validate()?;
    let cdf = sampler(phi, cfg.grid)?;
    let mut rng = rng.rng();
    let mut samples: Vec<u32> = (0..cfg.n_min)
        .map(|_| cdf.sample(&mut rng) as u32)
        .collect();
    samples.sort_unstable();

    let (start, w, converged) = loop {
        let w = window_len(cfg.alpha, samples.len());
        if let Some(a) = first_dense_window(&samples, w) {
            break (a, w, true);
        }
        if samples.len() as u64 >= cfg.n_max {
            break (densest_window(&samples, w), w, false);
        }
        let s = cdf.sample(&mut rng) as u32;
        let at = samples.partition_point(|x| *x <= s);
        samples.insert(at, s);
    };

    // Keep every sample whose value lies in the window's interval, including
    // ties just outside the run itself.
    let (lo, hi) = (samples[start], samples[start + w - 1]);
    let retained = samples.partition_point(|x| *x < lo)..samples.partition_point(|x| *x <= hi);
    let estimate = argmax_indices(&samples[retained.clone()], cfg.grid, DEFAULT_REFINEMENT);
    Ok(AbpeaTrace {
        samples,
        retained,
        converged,
        estimate,
    })
}

pub fn estimate_qft_abpea(
    phi: Phase,
    cfg: &AbpeaConfig,
    rng: &RandomStream,
) -> Result<EstimateRecord> {
    let trace = abpea_trace(phi, cfg, rng)?;
    let shots = trace.samples.len() as u64;
    Ok(record(trace.estimate, shots * (cfg.grid.len() - 1), shots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_dist::fraction_of;

    fn grid(len: u64) -> GridSize {
        GridSize::from_len(len).unwrap()
    }

    #[test]
    fn pea_queries_and_on_grid() {
        let cfg = PeaConfig { grid: grid(2048) };
        let r = estimate_qft_pea(
            Phase::counting(0.3).unwrap(),
            &cfg,
            &RandomStream::new(1, 1),
        )
        .unwrap();
        assert_eq!((r.queries, r.shots), (2047, 1));

        let cfg = PeaConfig { grid: grid(64) };
        let phi = Phase::counting(13.0 / 64.0).unwrap();
        for s in 0..200 {
            let r = estimate_qft_pea(phi, &cfg, &RandomStream::new(s, 0)).unwrap();
            assert_eq!(r.phase_estimate, 13.0 / 64.0);
        }
    }

    #[test]
    fn pea_draw_is_inverse_cdf_of_table() {
        use rand::Rng;
        // Cumulative sums of the frozen state-vector table for phi = 0.1, T = 8.
        let cdf = [
            0.05653178107421711,
            0.9462724179292707,
            0.9792639207417971,
            0.9940317810742168,
            1.0,
        ];
        let cfg = PeaConfig { grid: grid(8) };
        let phi = Phase::counting(0.1).unwrap();
        for s in 0..50 {
            let stream = RandomStream::new(7, s);
            let u: f64 = stream.rng().random();
            let expect = cdf.iter().position(|c| u < *c).unwrap();
            let r = estimate_qft_pea(phi, &cfg, &stream).unwrap();
            assert_eq!(r.phase_estimate, expect as f64 / 8.0, "u = {u}");
        }
    }

    #[test]
    fn bpea_queries_and_on_grid() {
        let cfg = BpeaConfig {
            grid: grid(256),
            n_shot: 4,
        };
        let phi = Phase::counting(64.0 / 256.0).unwrap();
        let r = estimate_qft_bpea(phi, &cfg, &RandomStream::new(3, 9)).unwrap();
        assert_eq!((r.queries, r.shots), (1020, 4));
        assert_eq!(r.phase_estimate, 0.25);
    }

    #[test]
    fn bpea_beats_single_pea() {
        let phi = Phase::counting(0.3).unwrap();
        let truth = fraction_of(0.3);
        let pea = PeaConfig { grid: grid(32) };
        let bpea = BpeaConfig {
            grid: grid(32),
            n_shot: 8,
        };
        let n = 10_000;
        let (mut e_pea, mut e_bpea) = (0.0, 0.0);
        for s in 0..n {
            let rng = RandomStream::new(11, s);
            e_pea += (estimate_qft_pea(phi, &pea, &rng).unwrap().fraction_estimate - truth).abs();
            e_bpea += (estimate_qft_bpea(phi, &bpea, &rng)
                .unwrap()
                .fraction_estimate
                - truth)
                .abs();
        }
        assert!(
            e_bpea < e_pea,
            "bpea {} pea {}",
            e_bpea / n as f64,
            e_pea / n as f64
        );
    }

    #[test]
    fn window_helpers() {
        assert_eq!(window_len(0.8, 3), 2);
        assert_eq!(window_len(0.8, 5), 4);
        assert_eq!(window_len(0.8, 8), 6);
        assert_eq!(window_len(0.1, 3), 1);
        assert_eq!(first_dense_window(&[1, 5, 7, 20], 2), Some(1));
        assert_eq!(first_dense_window(&[1, 5, 9, 20], 2), None);
        assert_eq!(densest_window(&[1, 5, 9, 20], 2), 0);
        assert_eq!(densest_window(&[1, 6, 9, 12], 2), 1);
    }

    #[test]
    fn abpea_on_grid_stops_at_n_min() {
        let cfg = AbpeaConfig {
            grid: grid(512),
            alpha: 0.8,
            n_min: 3,
            n_max: 8,
        };
        let phi = Phase::counting(100.0 / 512.0).unwrap();
        for s in 0..50 {
            let r = estimate_qft_abpea(phi, &cfg, &RandomStream::new(s, 2)).unwrap();
            assert_eq!(r.shots, 3);
            assert_eq!(r.queries, 3 * 511);
            assert_eq!(r.phase_estimate, 100.0 / 512.0);
        }
    }

    #[test]
    fn abpea_trace_invariants() {
        let cfg = AbpeaConfig {
            grid: grid(64),
            alpha: 0.8,
            n_min: 3,
            n_max: 8,
        };
        for s in 0..400 {
            let phi = Phase::counting((s as f64 * 0.618).fract() / 2.0).unwrap();
            let tr = abpea_trace(phi, &cfg, &RandomStream::new(5, s)).unwrap();
            let n = tr.samples.len();
            assert!((3..=8).contains(&n));
            assert!(tr.samples.windows(2).all(|w| w[0] <= w[1]));
            let w = window_len(0.8, n);
            assert!(tr.retained.len() >= w);
            let kept = &tr.samples[tr.retained.clone()];
            if tr.converged {
                assert!(kept[kept.len() - 1] - kept[0] <= 2);
            } else {
                assert_eq!(n, 8);
            }
        }
    }

    #[test]
    fn abpea_smallest_case_trace() {
        // With n_min = 3 and alpha = 0.8 the window holds two samples; find a
        // stream whose first two draws already sit within 2/T and check that
        // the loop stops at three shots.
        let cfg = AbpeaConfig {
            grid: grid(16),
            alpha: 0.8,
            n_min: 3,
            n_max: 8,
        };
        let phi = Phase::counting(0.2).unwrap();
        let mut seen = 0;
        for s in 0..200 {
            let tr = abpea_trace(phi, &cfg, &RandomStream::new(1, s)).unwrap();
            if tr.samples.len() == 3 {
                seen += 1;
                assert!(tr.converged);
                assert!(first_dense_window(&tr.samples, 2).is_some());
            } else {
                // More than three shots means the first three had no close pair.
                let mut rng = RandomStream::new(1, s).rng();
                let cdf = sampler(phi, cfg.grid).unwrap();
                let mut first: Vec<u32> = (0..3).map(|_| cdf.sample(&mut rng) as u32).collect();
                first.sort_unstable();
                assert!(first_dense_window(&first, 2).is_none());
            }
        }
        assert!(seen > 0);
    }
}
