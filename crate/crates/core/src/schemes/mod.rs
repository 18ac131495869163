//! The six estimation schemes.
//!
//! Every scheme takes a ground-truth counting phase and a [`RandomStream`]
//! and returns an [`EstimateRecord`]. Costs are counted in applications of
//! the Grover iteration ("queries"); a Monte Carlo shot counts as one query.
//!
//! | scheme | queries            | shots            |
//! |--------|--------------------|------------------|
//! | MC     | `n_shot`           | `n_shot`         |
//! | PEA    | `T-1`              | 1                |
//! | BPEA   | `n_shot*(T-1)`     | `n_shot`         |
//! | ABPEA  | `shots*(T-1)`      | `n_min..=n_max`  |
//! | MLAE   | `n_shot*sum(M)`    | `n_shot*t`       |
//! | QCoin  | `n_shot*sum(M)`    | `n_shot*(t+1)`   |

mod amplified;
mod classical;
mod qft;

use std::fmt;

use crate::error::{Error, Result};
use crate::phase_dist::{GridSize, Phase};
use crate::rng::RandomStream;

pub use amplified::{
    amplified_probability, estimate_mlae, estimate_qcoin, mlae_argmax, mlae_log_likelihood,
    mlae_schedule, qcoin_schedule, ShotRecord,
};
pub use classical::estimate_mc;
pub use qft::{abpea_trace, estimate_qft_abpea, estimate_qft_bpea, estimate_qft_pea, AbpeaTrace};

/// Output of one scheme invocation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateRecord {
    /// Estimated counting phase in `[0, 1/2]`.
    pub phase_estimate: f64,
    /// `sin^2(pi * phase_estimate)`.
    pub fraction_estimate: f64,
    /// Grover iterations consumed.
    pub queries: u64,
    /// Measurement repetitions consumed.
    pub shots: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub n_shot: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeaConfig {
    pub grid: GridSize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpeaConfig {
    pub grid: GridSize,
    pub n_shot: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbpeaConfig {
    pub grid: GridSize,
    /// Fraction of samples that must fall inside a `2/T` window.
    pub alpha: f64,
    pub n_min: u64,
    pub n_max: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlaeConfig {
    /// Number of amplification stages.
    pub t: u32,
    pub n_shot: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcoinConfig {
    /// Amplified stages `M = 1, 2, ..., 2^(t-1)` follow a plain `M = 0` stage.
    pub t: u32,
    pub n_shot: u64,
    /// Posterior mass the interval must keep after each stage.
    pub mass: f64,
}

impl QcoinConfig {
    pub const DEFAULT_MASS: f64 = 0.999;
}

/// Largest amplification exponent accepted by the shot-based schemes.
pub const MAX_STAGES: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeConfig {
    Mc(McConfig),
    Pea(PeaConfig),
    Bpea(BpeaConfig),
    Abpea(AbpeaConfig),
    Mlae(MlaeConfig),
    Qcoin(QcoinConfig),
}

fn positive(what: &str, v: u64) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidConfig(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

fn stage_count(t: u32) -> Result<()> {
    if (1..=MAX_STAGES).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "t must be in 1..={MAX_STAGES}, got {t}"
        )))
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        positive("n_shot", self.n_shot)
    }
}

impl PeaConfig {
    pub fn validate(&self) -> Result<()> {
        Ok(())
    }
}

impl BpeaConfig {
    pub fn validate(&self) -> Result<()> {
        positive("n_shot", self.n_shot)
    }
}

impl AbpeaConfig {
    pub fn validate(&self) -> Result<()> {
        positive("n_min", self.n_min)?;
        if self.n_max < self.n_min {
            return Err(Error::InvalidConfig(format!(
                "n_max ({}) must be >= n_min ({})",
                self.n_max, self.n_min
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

impl MlaeConfig {
    pub fn validate(&self) -> Result<()> {
        stage_count(self.t)?;
        positive("n_shot", self.n_shot)
    }
}

impl QcoinConfig {
    pub fn validate(&self) -> Result<()> {
        stage_count(self.t)?;
        positive("n_shot", self.n_shot)?;
        if !(self.mass > 0.0 && self.mass < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mass must be in (0, 1), got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Mc(c) => c.validate(),
            Self::Pea(c) => c.validate(),
            Self::Bpea(c) => c.validate(),
            Self::Abpea(c) => c.validate(),
            Self::Mlae(c) => c.validate(),
            Self::Qcoin(c) => c.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mc(_) => "mc",
            Self::Pea(_) => "pea",
            Self::Bpea(_) => "bpea",
            Self::Abpea(_) => "abpea",
            Self::Mlae(_) => "mlae",
            Self::Qcoin(_) => "qcoin",
        }
    }

    /// Space-separated `key=value` parameter summary.
    pub fn params(&self) -> String {
        match self {
            Self::Mc(c) => format!("nshot={}", c.n_shot),
            Self::Pea(c) => format!("T={}", c.grid.len()),
            Self::Bpea(c) => format!("T={} nshot={}", c.grid.len(), c.n_shot),
            Self::Abpea(c) => format!(
                "T={} alpha={} nmin={} nmax={}",
                c.grid.len(),
                c.alpha,
                c.n_min,
                c.n_max
            ),
            Self::Mlae(c) => format!("t={} nshot={}", c.t, c.n_shot),
            Self::Qcoin(c) => format!("t={} nshot={} mass={}", c.t, c.n_shot, c.mass),
        }
    }

    /// Queries charged for a run that consumed `shots` shots, or `None` when
    /// `shots` is impossible for this configuration.
    pub fn expected_queries(&self, shots: u64) -> Option<u64> {
        match self {
            Self::Mc(c) => (shots == c.n_shot).then_some(c.n_shot),
            Self::Pea(c) => (shots == 1).then_some(c.grid.len() - 1),
            Self::Bpea(c) => (shots == c.n_shot).then_some(c.n_shot * (c.grid.len() - 1)),
            Self::Abpea(c) => (c.n_min..=c.n_max)
                .contains(&shots)
                .then_some(shots * (c.grid.len() - 1)),
            Self::Mlae(c) => (shots == c.n_shot * c.t as u64)
                .then(|| c.n_shot * mlae_schedule(c.t).iter().sum::<u64>()),
            Self::Qcoin(c) => (shots == c.n_shot * (c.t as u64 + 1))
                .then(|| c.n_shot * qcoin_schedule(c.t).iter().sum::<u64>()),
        }
    }

    /// Runs the configured scheme and checks the query ledger.
    pub fn estimate(&self, phi: Phase, rng: &RandomStream) -> Result<EstimateRecord> {
        let rec = match self {
            Self::Mc(c) => estimate_mc(phi, c, rng),
            Self::Pea(c) => estimate_qft_pea(phi, c, rng),
            Self::Bpea(c) => estimate_qft_bpea(phi, c, rng),
            Self::Abpea(c) => estimate_qft_abpea(phi, c, rng),
            Self::Mlae(c) => estimate_mlae(phi, c, rng),
            Self::Qcoin(c) => estimate_qcoin(phi, c, rng),
        }?;
        assert_eq!(
            Some(rec.queries),
            self.expected_queries(rec.shots),
            "query ledger violated by {self}"
        );
        Ok(rec)
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name(), self.params())
    }
}

pub(crate) fn counting_phase(phi: Phase) -> Result<f64> {
    let p = phi.value();
    if p > 0.5 {
        Err(Error::InvalidPhase(p))
    } else {
        Ok(p)
    }
}

pub(crate) fn record(phase: f64, queries: u64, shots: u64) -> EstimateRecord {
    EstimateRecord {
        phase_estimate: phase,
        fraction_estimate: crate::phase_dist::fraction_of(phase),
        queries,
        shots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(len: u64) -> GridSize {
        GridSize::from_len(len).unwrap()
    }

    fn all_schemes() -> Vec<SchemeConfig> {
        vec![
            SchemeConfig::Mc(McConfig { n_shot: 64 }),
            SchemeConfig::Pea(PeaConfig { grid: grid(64) }),
            SchemeConfig::Bpea(BpeaConfig {
                grid: grid(16),
                n_shot: 4,
            }),
            SchemeConfig::Abpea(AbpeaConfig {
                grid: grid(32),
                alpha: 0.8,
                n_min: 3,
                n_max: 8,
            }),
            SchemeConfig::Mlae(MlaeConfig { t: 4, n_shot: 16 }),
            SchemeConfig::Qcoin(QcoinConfig {
                t: 3,
                n_shot: 16,
                mass: QcoinConfig::DEFAULT_MASS,
            }),
        ]
    }

    #[test]
    fn validation() {
        assert!(McConfig { n_shot: 0 }.validate().is_err());
        let bad = AbpeaConfig {
            grid: grid(8),
            alpha: 0.8,
            n_min: 5,
            n_max: 4,
        };
        assert!(bad.validate().is_err());
        assert!(AbpeaConfig {
            alpha: 0.0,
            n_max: 8,
            ..bad
        }
        .validate()
        .is_err());
        assert!(AbpeaConfig {
            alpha: 1.5,
            n_max: 8,
            ..bad
        }
        .validate()
        .is_err());
        assert!(MlaeConfig { t: 0, n_shot: 1 }.validate().is_err());
        assert!(QcoinConfig {
            t: 3,
            n_shot: 1,
            mass: 1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn rejects_non_counting_phase() {
        let rng = RandomStream::new(1, 0);
        for s in all_schemes() {
            assert!(s.estimate(Phase::new(0.7).unwrap(), &rng).is_err());
        }
    }

    #[test]
    fn ledger_formulas() {
        let pea = SchemeConfig::Pea(PeaConfig { grid: grid(2048) });
        assert_eq!(pea.expected_queries(1), Some(2047));
        let bpea = SchemeConfig::Bpea(BpeaConfig {
            grid: grid(256),
            n_shot: 4,
        });
        assert_eq!(bpea.expected_queries(4), Some(1020));
        let mlae = SchemeConfig::Mlae(MlaeConfig { t: 6, n_shot: 64 });
        assert_eq!(mlae.expected_queries(6 * 64), Some(1984));
        let qcoin = SchemeConfig::Qcoin(QcoinConfig {
            t: 5,
            n_shot: 64,
            mass: 0.999,
        });
        assert_eq!(qcoin.expected_queries(6 * 64), Some(1984));
        assert_eq!(qcoin.expected_queries(5 * 64), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn estimates_in_range_and_deterministic(phi in 0.0f64..=0.5, seed: u64, stream: u64) {
            let phi = Phase::counting(phi).unwrap();
            let rng = RandomStream::new(seed, stream);
            for s in all_schemes() {
                let a = s.estimate(phi, &rng).unwrap();
                let b = s.estimate(phi, &rng).unwrap();
                prop_assert_eq!(a, b);
                prop_assert!((0.0..=0.5).contains(&a.phase_estimate));
                prop_assert!((0.0..=1.0).contains(&a.fraction_estimate));
                let f = crate::phase_dist::fraction_of(a.phase_estimate);
                prop_assert!((f - a.fraction_estimate).abs() < 1e-12);
            }
        }
    }
}
