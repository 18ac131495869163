//! Statistical studies: error-vs-queries sweeps, per-fraction error
//! patterns and log-log slope fits.
//!
//! Every trial draws from its own [`RandomStream`], and results are reduced
//! in index order, so output does not depend on the rayon thread count.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase_dist::{phase_of, Phase};
use crate::rng::RandomStream;
use crate::schemes::SchemeConfig;

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.1, 0.01, 0.001];
pub const DEFAULT_N_TRUTHS: usize = 10_000;
pub const DEFAULT_PATTERN_STEP: f64 = 0.001;
pub const DEFAULT_N_TEST: usize = 10_000;

/// Streams with the top bit set are reserved for ground-truth draws.
const TRUTH_DOMAIN: u64 = 1 << 63;

/// Where estimation errors are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErrorSpace {
    /// `|v~ - v|` on the counted fraction.
    #[default]
    Fraction,
    /// `|phi~ - phi|` on the counting phase.
    Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Scheme configurations, normally with increasing query budgets.
    pub ladder: Vec<SchemeConfig>,
    pub n_truths: usize,
    pub seed: u64,
    /// Accuracy thresholds, strictly decreasing, each in `(0, 1)`.
    pub thresholds: Vec<f64>,
    pub error_space: ErrorSpace,
}

impl SweepSpec {
    pub fn new(ladder: Vec<SchemeConfig>, n_truths: usize, seed: u64) -> Self {
        Self {
            ladder,
            n_truths,
            seed,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            error_space: ErrorSpace::Fraction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_truths == 0 {
            return Err(Error::InvalidConfig("n_truths must be at least 1".into()));
        }
        if self.thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0))
            || self.thresholds.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(Error::InvalidConfig(format!(
                "thresholds must be strictly decreasing in (0, 1): {:?}",
                self.thresholds
            )));
        }
        self.ladder.iter().try_for_each(SchemeConfig::validate)
    }
}

/// Summary statistics of one ladder entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub scheme_name: String,
    pub params: String,
    pub mean_queries: f64,
    pub mae: f64,
    /// Fraction of trials whose error exceeds each threshold.
    pub pba: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternRow {
    /// Ground-truth fraction on the sweep grid.
    pub fraction: f64,
    /// Corresponding counting phase.
    pub phi: f64,
    pub bias: f64,
    pub mae: f64,
}

/// Ground-truth fractions shared by every ladder entry of a sweep.
pub fn truth_fractions(n: usize, seed: u64) -> Vec<f64> {
    (0..n as u64)
        .map(|i| {
            RandomStream::new(seed, TRUTH_DOMAIN | i)
                .rng()
                .random::<f64>()
        })
        .collect()
}

fn trial_stream(seed: u64, group: usize, trial: usize) -> RandomStream {
    RandomStream::new(seed, ((group as u64) << 40) | trial as u64)
}

/// Runs every ladder entry on the same `n_truths` uniform ground truths.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let truths = truth_fractions(spec.n_truths, spec.seed);
    spec.ladder
        .iter()
        .enumerate()
        .map(|(entry, scheme)| {
            let outcomes = truths
                .par_iter()
                .enumerate()
                .map(|(i, &v)| {
                    let phi = phase_of(v);
                    let rec = scheme
                        .estimate(Phase::counting(phi)?, &trial_stream(spec.seed, entry, i))?;
                    let err = match spec.error_space {
                        ErrorSpace::Fraction => (rec.fraction_estimate - v).abs(),
                        ErrorSpace::Phase => (rec.phase_estimate - phi).abs(),
                    };
                    Ok((err, rec.queries))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(summarise(scheme, &outcomes, &spec.thresholds))
        })
        .collect()
}

fn summarise(scheme: &SchemeConfig, outcomes: &[(f64, u64)], thresholds: &[f64]) -> SweepRow {
    let n = outcomes.len() as f64;
    let mae = outcomes.iter().map(|o| o.0).sum::<f64>() / n;
    let mean_queries = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / n;
    let pba: Vec<f64> = thresholds
        .iter()
        .map(|t| outcomes.iter().filter(|o| o.0 > *t).count() as f64 / n)
        .collect();
    debug_assert!(pba.windows(2).all(|w| w[0] <= w[1]));
    SweepRow {
        scheme_name: scheme.name().to_string(),
        params: scheme.params(),
        mean_queries,
        mae,
        pba,
    }
}

/// Bias and mean absolute error at every fraction `0, step, 2*step, ..., 1`.
pub fn run_pattern(
    scheme: &SchemeConfig,
    phi_step: f64,
    n_test: usize,
    seed: u64,
) -> Result<Vec<PatternRow>> {
    scheme.validate()?;
    if n_test == 0 {
        return Err(Error::InvalidConfig("n_test must be at least 1".into()));
    }
    if !(phi_step > 0.0 && phi_step <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "step {phi_step} not in (0, 1]"
        )));
    }
    let steps = (1.0 / phi_step).round();
    if (steps * phi_step - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "step {phi_step} does not divide 1"
        )));
    }
    let steps = steps as usize;
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let v = i as f64 / steps as f64;
            let phi = phase_of(v);
            let (mut sum, mut abs) = (0.0, 0.0);
            for trial in 0..n_test {
                let rec = scheme.estimate(Phase::counting(phi)?, &trial_stream(seed, i, trial))?;
                sum += rec.fraction_estimate - v;
                abs += (rec.fraction_estimate - v).abs();
            }
            Ok(PatternRow {
                fraction: v,
                phi,
                bias: sum / n_test as f64,
                mae: abs / n_test as f64,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(mae)` against `ln(queries)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(q, m)) = points.iter().find(|(q, m)| !(*q > 0.0 && *m > 0.0)) {
        return Err(Error::OutOfRange {
            what: "log-log point",
            value: if q > 0.0 { m } else { q },
        });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
