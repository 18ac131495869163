use crate::error::{Error, Result};
use crate::phase_dist::Phase;

/// Largest `n + b` enumerated by the brute-force checks.
const MAX_QUBITS: u32 = 24;

/// Explicit ray-energy table `f(j)` with its fixed-point format: `b` total
/// bits of which `b0` are integer bits, so the resolution is `2^(b0-b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleTable {
    n: u32,
    b: u32,
    b0: u32,
    values: Vec<f64>,
}

impl OracleTable {
    pub fn new(n: u32, b: u32, b0: u32, values: Vec<f64>) -> Result<Self> {
        if n == 0 || b == 0 || b0 > b || n + b > MAX_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "need n >= 1, b >= 1, b0 <= b and n + b <= {MAX_QUBITS}; got n={n} b={b} b0={b0}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidConfig(format!(
                "expected {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        let limit = (1u64 << b0) as f64;
        if let Some(v) = values
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0 && **v < limit))
        {
            return Err(Error::OutOfRange {
                what: "oracle value",
                value: *v,
            });
        }
        Ok(Self { n, b, b0, values })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn b0(&self) -> u32 {
        self.b0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fixed-point resolution `2^(b0-b)`.
    pub fn resolution(&self) -> f64 {
        (2.0f64).powi(self.b0 as i32 - self.b as i32)
    }

    /// `f(j)` truncated toward zero to the fixed-point grid.
    pub fn quantized(&self, j: usize) -> f64 {
        let r = self.resolution();
        (self.values[j] / r).floor() * r
    }

    /// `g(j, k) = 1` iff `f_quant(j) > 2^(b0-b) * k`.
    pub fn g(&self, j: usize, k: u64) -> bool {
        self.quantized(j) > self.resolution() * k as f64
    }

    /// The marking `g` laid out over index `j * 2^b + k`.
    pub fn marking(&self) -> Vec<bool> {
        let levels = 1u64 << self.b;
        (0..self.values.len())
            .flat_map(|j| (0..levels).map(move |k| (j, k)))
            .map(|(j, k)| self.g(j, k))
            .collect()
    }
}

/// `sum_{j,k} g(j, k)` by exhaustive enumeration.
pub fn count_g(tbl: &OracleTable) -> u64 {
    let levels = 1u64 << tbl.b;
    (0..tbl.values.len())
        .map(|j| (0..levels).filter(|&k| tbl.g(j, k)).count() as u64)
        .sum()
}

/// Both sides of the counting identity: the mean of the quantised energies
/// and the scaled count of marked `(j, k)` pairs. They agree exactly.
pub fn verify_counting_relation(tbl: &OracleTable) -> (f64, f64) {
    let direct = (0..tbl.values.len()).map(|j| tbl.quantized(j)).sum::<f64>()
        * (2.0f64).powi(-(tbl.n as i32));
    let shift = tbl.n as i32 + tbl.b as i32 - tbl.b0 as i32;
    let via_g = count_g(tbl) as f64 * (2.0f64).powi(-shift);
    (direct, via_g)
}

/// Angle (over pi) between the uniform state and the unmarked state
/// `|alpha>` for an arbitrary marking of the computational basis.
pub fn rotation_angle_of_marking(marks: &[bool]) -> Result<f64> {
    let marked = marks.iter().filter(|m| **m).count();
    if marked == 0 {
        return Err(Error::DegenerateOracle(0));
    }
    if marked == marks.len() {
        return Err(Error::DegenerateOracle(1));
    }
    let amp = 1.0 / (marks.len() as f64).sqrt();
    let norm_beta = (marked as f64).sqrt() * amp;
    let norm_alpha = ((marks.len() - marked) as f64).sqrt() * amp;
    // <alpha|u> and <beta|u>, accumulated over the explicit basis.
    let (mut ua, mut ub) = (0.0, 0.0);
    for &m in marks {
        if m {
            ub += amp * amp / norm_beta;
        } else {
            ua += amp * amp / norm_alpha;
        }
    }
    Ok(ub.atan2(ua) / std::f64::consts::PI)
}

/// Rotation angle of the Grover plane defined by the table's marking.
/// Fails on a constant marking, where the closed form gives 0 or 1/2.
pub fn verify_rotation_angle(tbl: &OracleTable) -> Result<Phase> {
    Phase::counting(rotation_angle_of_marking(&tbl.marking())?)
}

/// One Grover iteration `(I - 2|u><u|)(I - 2|alpha><alpha|)` on a full
/// real state vector, where `|alpha>` is the normalised unmarked part of the
/// uniform state.
pub fn apply_grover(marks: &[bool], state: &mut [f64]) {
    assert_eq!(marks.len(), state.len());
    let dim = marks.len() as f64;
    let unmarked = marks.iter().filter(|m| !**m).count() as f64;
    // |alpha> has amplitude 1/sqrt(unmarked) on unmarked states.
    if unmarked > 0.0 {
        let a = 1.0 / unmarked.sqrt();
        let overlap: f64 = marks
            .iter()
            .zip(state.iter())
            .filter(|(m, _)| !**m)
            .map(|(_, x)| a * x)
            .sum();
        for (m, x) in marks.iter().zip(state.iter_mut()) {
            if !*m {
                *x -= 2.0 * overlap * a;
            }
        }
    }
    let u = 1.0 / dim.sqrt();
    let overlap: f64 = state.iter().map(|x| u * x).sum();
    for x in state.iter_mut() {
        *x -= 2.0 * overlap * u;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn table(n: u32, b: u32, b0: u32, v: &[f64]) -> OracleTable {
        OracleTable::new(n, b, b0, v.to_vec()).unwrap()
    }

    fn random_table(rng: &mut ChaCha8Rng) -> OracleTable {
        let n = rng.random_range(1..=6);
        let b = rng.random_range(1..=6);
        let b0 = rng.random_range(0..=b);
        let limit = (1u64 << b0) as f64;
        let values = (0..1 << n).map(|_| rng.random::<f64>() * limit).collect();
        OracleTable::new(n, b, b0, values).unwrap()
    }

    #[test]
    fn worked_example() {
        let t = table(2, 2, 2, &[0.0, 1.0, 2.0, 3.0]);
        // Enumeration: f = 0 marks nothing, f = 1 marks k = 0, f = 2 marks
        // k = 0, 1, f = 3 marks k = 0, 1, 2.
        assert_eq!(count_g(&t), 6);
        assert_eq!(verify_counting_relation(&t), (1.5, 1.5));
    }

    #[test]
    fn zero_and_full_tables() {
        let t = table(3, 4, 2, &[0.0; 8]);
        assert_eq!(count_g(&t), 0);
        assert_eq!(verify_counting_relation(&t), (0.0, 0.0));
        assert!(matches!(
            verify_rotation_angle(&t),
            Err(Error::DegenerateOracle(0))
        ));

        let max = 4.0 - 0.25;
        let t = table(3, 4, 2, &[max; 8]);
        assert_eq!(count_g(&t), 8 * 15);
    }

    #[test]
    fn validation() {
        assert!(OracleTable::new(2, 2, 2, vec![0.0, 1.0, 2.0]).is_err());
        assert!(OracleTable::new(2, 2, 2, vec![0.0, 1.0, 2.0, 4.0]).is_err());
        assert!(OracleTable::new(2, 2, 3, vec![0.0; 4]).is_err());
        assert!(OracleTable::new(2, 2, 2, vec![0.0, -1.0, 2.0, 3.0]).is_err());
        assert!(OracleTable::new(2, 2, 2, vec![0.0, f64::NAN, 2.0, 3.0]).is_err());
    }

    #[test]
    fn random_tables_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let t = random_table(&mut rng);
            let (direct, via_g) = verify_counting_relation(&t);
            assert_eq!(direct, via_g);
            let raw = t.values().iter().sum::<f64>() / t.values().len() as f64;
            assert!((direct - raw).abs() < t.resolution());
            for j in 0..t.values().len() {
                assert!(t.values()[j] - t.quantized(j) < t.resolution());
                assert!(t.values()[j] >= t.quantized(j));
            }
        }
    }

    #[test]
    fn quarter_marked_gives_one_sixth() {
        let marks: Vec<bool> = (0..16).map(|i| i % 4 == 0).collect();
        assert!((rotation_angle_of_marking(&marks).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn random_marking_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let marks: Vec<bool> = (0..32).map(|_| rng.random_bool(0.3)).collect();
            let s = marks.iter().filter(|m| **m).count() as f64;
            let Ok(angle) = rotation_angle_of_marking(&marks) else {
                continue;
            };
            assert!((angle - (s / 32.0).sqrt().asin() / PI).abs() < 1e-12);
        }
    }

    #[test]
    fn table_rotation_angle() {
        let t = table(2, 2, 2, &[0.0, 1.0, 2.0, 3.0]);
        let phi = verify_rotation_angle(&t).unwrap().value();
        assert!((phi - (6.0f64 / 16.0).sqrt().asin() / PI).abs() < 1e-12);
    }

    #[test]
    fn grover_iteration_rotates_by_twice_the_angle() {
        let marks: Vec<bool> = (0..64).map(|i| i % 5 == 1 || i == 7).collect();
        let phi = rotation_angle_of_marking(&marks).unwrap();
        let s = marks.iter().filter(|m| **m).count() as f64;
        let mut state = vec![1.0 / 8.0; 64];
        for step in 1..=4 {
            apply_grover(&marks, &mut state);
            let theta = (2 * step + 1) as f64 * PI * phi;
            let beta: f64 = marks
                .iter()
                .zip(&state)
                .filter(|(m, _)| **m)
                .map(|(_, x)| x / s.sqrt())
                .sum();
            assert!((beta - theta.sin()).abs() < 1e-12);
            let norm: f64 = state.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }
}
