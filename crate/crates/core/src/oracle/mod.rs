//! Brute-force verification of the analytic formulas.
//!
//! [`simulate_pea`] runs phase estimation gate by gate on a dense state
//! vector and must reproduce [`crate::qc_pmf`]. The counting helpers evaluate
//! the fixed-point Boolean reduction and the Grover plane geometry by
//! exhaustive enumeration.

mod counting;
mod statevec;

pub use counting::{
    apply_grover, count_g, rotation_angle_of_marking, verify_counting_relation,
    verify_rotation_angle, OracleTable,
};
pub use statevec::{grover_rotation, simulate_pea, Mat2, StateVector, MAX_ANCILLAS};
