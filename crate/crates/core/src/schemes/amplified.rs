//! Amplitude-amplification schemes: repeated Bernoulli shots after `M`
//! Grover iterations, which succeed with probability `sin^2((2M+1)*pi*phi)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{counting_phase, record, EstimateRecord, MlaeConfig, QcoinConfig};
use crate::error::Result;
use crate::phase_dist::Phase;
use crate::rng::RandomStream;

const LOG_FLOOR: f64 = -745.0;

/// Heads observed at one amplification stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub stage: usize,
    /// Grover iterations applied before measuring.
    pub iterations: u64,
    pub heads: u64,
}

/// `sin^2((2M+1)*pi*phi)`.
pub fn amplified_probability(phi: f64, iterations: u64) -> f64 {
    let s = ((2 * iterations + 1) as f64 * PI * phi).sin();
    (s * s).clamp(0.0, 1.0)
}

fn amplified_complement(phi: f64, iterations: u64) -> f64 {
    let c = ((2 * iterations + 1) as f64 * PI * phi).cos();
    (c * c).clamp(0.0, 1.0)
}

/// `M = 0, 1, 2, 4, ..., 2^(t-2)`: `t` stages in total.
pub fn mlae_schedule(t: u32) -> Vec<u64> {
    std::iter::once(0)
        .chain((1..t).map(|k| 1u64 << (k - 1)))
        .collect()
}

/// `M = 0, 1, 2, 4, ..., 2^(t-1)`: a plain stage then `t` amplified ones.
pub fn qcoin_schedule(t: u32) -> Vec<u64> {
    std::iter::once(0)
        .chain((0..t).map(|k| 1u64 << k))
        .collect()
}

fn draw_heads<R: Rng>(phi: f64, iterations: u64, n_shot: u64, rng: &mut R) -> u64 {
    Binomial::new(n_shot, amplified_probability(phi, iterations))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// `count * ln(p)` with `0 * ln(0) = 0` and a floor on the logarithm.
fn weighted_log(count: u64, p: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * p.ln().max(LOG_FLOOR)
    }
}

fn stage_log_likelihood(heads: u64, n_shot: u64, iterations: u64, x: f64) -> f64 {
    weighted_log(heads, amplified_probability(x, iterations))
        + weighted_log(n_shot - heads, amplified_complement(x, iterations))
}

/// Binomial log-likelihood of the shot records at hypothesis `x`.
pub fn mlae_log_likelihood(shots: &[ShotRecord], n_shot: u64, x: f64) -> f64 {
    shots
        .iter()
        .map(|s| stage_log_likelihood(s.heads, n_shot, s.iterations, x))
        .sum()
}

/// Grid maximiser of [`mlae_log_likelihood`] on `[0, 1/2]`.
///
/// A uniform grid with 64 points per half-period of the fastest factor
/// locates the peak, then a 256-point grid over the two neighbouring cells
/// refines it. Ties go to the smaller hypothesis.
pub fn mlae_argmax(shots: &[ShotRecord], n_shot: u64) -> f64 {
    let max_m = shots.iter().map(|s| s.iterations).max().unwrap_or(0);
    let cells = 64 * (2 * max_m + 1);
    let step = 0.5 / cells as f64;
    let ll = |x: f64| mlae_log_likelihood(shots, n_shot, x);

    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=cells {
        let x = i as f64 * step;
        let v = ll(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let lo = (best.1 - step).max(0.0);
    let hi = (best.1 + step).min(0.5);
    const SUB: u32 = 256;
    for j in 0..=SUB {
        let x = lo + (hi - lo) * j as f64 / SUB as f64;
        let v = ll(x);
        if v > best.0 || (v == best.0 && x < best.1) {
            best = (v, x);
        }
    }
    best.1
}

/// Maximum likelihood amplitude estimation over the exponential schedule.
pub fn estimate_mlae(phi: Phase, cfg: &MlaeConfig, rng: &RandomStream) -> Result<EstimateRecord> {
    cfg.validate()?;
    let p = counting_phase(phi)?;
    let mut rng = rng.rng();
    let shots: Vec<ShotRecord> = mlae_schedule(cfg.t)
        .into_iter()
        .enumerate()
        .map(|(stage, m)| ShotRecord {
            stage,
            iterations: m,
            heads: draw_heads(p, m, cfg.n_shot, &mut rng),
        })
        .collect();
    let est = mlae_argmax(&shots, cfg.n_shot);
    let queries = cfg.n_shot * shots.iter().map(|s| s.iterations).sum::<u64>();
    Ok(record(est, queries, cfg.n_shot * cfg.t as u64))
}

/// Smallest index window `[a, b]` of `w` holding at least `target` mass;
/// ties go to the leftmost.
fn smallest_mass_window(w: &[f64], target: f64) -> (usize, usize) {
    let mut prefix = Vec::with_capacity(w.len() + 1);
    prefix.push(0.0);
    for x in w {
        prefix.push(prefix[prefix.len() - 1] + x);
    }
    let mut best = (0, w.len() - 1);
    let mut b = 0;
    for a in 0..w.len() {
        b = b.max(a);
        while b < w.len() && prefix[b + 1] - prefix[a] < target {
            b += 1;
        }
        if b == w.len() {
            break;
        }
        if b - a < best.1 - best.0 {
            best = (a, b);
        }
    }
    best
}

/// Stagewise interval refinement.
///
/// A posterior over a uniform phase grid is multiplied by each stage's
/// binomial likelihood; after every stage the support is cut down to the
/// narrowest interval holding `cfg.mass` of the posterior. The estimate is
/// the posterior mode inside the final interval.
pub fn estimate_qcoin(phi: Phase, cfg: &QcoinConfig, rng: &RandomStream) -> Result<EstimateRecord> {
    cfg.validate()?;
    let p = counting_phase(phi)?;
    let schedule = qcoin_schedule(cfg.t);
    let max_m = *schedule.last().expect("non-empty schedule");
    let cells = (128 * (2 * max_m + 1)).max(4096) as usize;
    let step = 0.5 / cells as f64;

    let mut rng = rng.rng();
    let mut log_post = vec![0.0; cells + 1];
    let (mut lo, mut hi) = (0usize, cells);
    for &m in &schedule {
        let heads = draw_heads(p, m, cfg.n_shot, &mut rng);
        for (i, lp) in log_post.iter_mut().enumerate().take(hi + 1).skip(lo) {
            *lp += stage_log_likelihood(heads, cfg.n_shot, m, i as f64 * step);
        }
        let live = &log_post[lo..=hi];
        let top = live.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = live.iter().map(|lp| (lp - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let (a, b) = smallest_mass_window(&weights, cfg.mass * total);
        (lo, hi) = (lo + a, lo + b);
    }

    let mut best = lo;
    for i in lo..=hi {
        if log_post[i] > log_post[best] {
            best = i;
        }
    }
    let queries = cfg.n_shot * schedule.iter().sum::<u64>();
    Ok(record(
        best as f64 * step,
        queries,
        cfg.n_shot * schedule.len() as u64,
    ))
}
