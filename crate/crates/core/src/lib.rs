//! Simulation workbench for quantum-counting-based supersampling.
//!
//! The crate samples the exact output distributions of QFT phase estimation
//! and quantum counting, runs six estimator schemes with query accounting,
//! checks the analytic formulas against a small state-vector simulation, and
//! drives the statistical studies and imaging experiments built on top.
//!
//! * [`phase_dist`]: phase estimation / counting distributions, phase and
//!   fraction mapping, Bayesian likelihood maximisation.
//! * [`schemes`]: Monte Carlo, QFT-PEA, QFT-BPEA, QFT-ABPEA, MLAE and QCoin.
//! * [`oracle`]: brute-force state-vector and counting-reduction checks.
//! * [`harness`]: error-vs-queries sweeps, error patterns, slope fits.
//! * [`imaging`]: gray disk, HDR noise injection, tone map, PFM and PNG I/O.

pub mod error;
pub mod harness;
pub mod imaging;
pub mod oracle;
pub mod phase_dist;
pub mod rng;
pub mod schemes;

pub use error::{Error, Result};
pub use phase_dist::{
    bayes_argmax, fraction_to_phase, pea_pmf, pea_pmf_point, phase_to_fraction, qc_pmf,
    DistributionTable, Fraction, GridSize, Phase,
};
pub use rng::RandomStream;
pub use schemes::{
    AbpeaConfig, BpeaConfig, EstimateRecord, McConfig, MlaeConfig, PeaConfig, QcoinConfig,
    SchemeConfig,
};
