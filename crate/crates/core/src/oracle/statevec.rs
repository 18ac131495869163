use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_dist::{DistributionTable, GridSize, Phase};

pub const MAX_ANCILLAS: u32 = 12;
const NORM_TOL: f64 = 1e-10;

pub type Mat2 = [[f64; 2]; 2];

/// The Grover iteration restricted to the `{|alpha>, |beta>}` plane: a
/// rotation by `2*pi*phi`, with eigenvalues `exp(+-2*pi*i*phi)`.
pub fn grover_rotation(phi: Phase) -> Mat2 {
    let (s, c) = (2.0 * PI * phi.value()).sin_cos();
    [[c, -s], [s, c]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Dense state over `ancillas` qubits and a two-level system register.
/// Basis index is `2 * ancilla + system`.
#[derive(Clone, Debug)]
pub struct StateVector {
    ancillas: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on the ancillas tensored with `system`.
    pub fn new(ancillas: u32, system: [f64; 2]) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 << ancillas];
        amplitudes[0] = system[0].into();
        amplitudes[1] = system[1].into();
        Self {
            ancillas,
            amplitudes,
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_norm(&self, step: &str) {
        let n = self.norm_sqr();
        assert!(
            (n - 1.0).abs() < NORM_TOL,
            "norm drifted to {n} after {step}"
        );
    }

    /// Hadamard on ancilla bit `bit`.
    pub fn hadamard(&mut self, bit: u32) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mask = 2usize << bit;
        for i in 0..self.dim() {
            if i & mask == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | mask]);
                self.amplitudes[i] = (a + b) * h;
                self.amplitudes[i | mask] = (a - b) * h;
            }
        }
    }

    /// Phase `exp(i*angle)` on basis states where both ancilla bits are set.
    pub fn controlled_phase(&mut self, control: u32, target: u32, angle: f64) {
        let mask = (2usize << control) | (2usize << target);
        let phase = Complex64::from_polar(1.0, angle);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    pub fn swap(&mut self, a: u32, b: u32) {
        let (ma, mb) = (2usize << a, 2usize << b);
        for i in 0..self.dim() {
            if i & ma != 0 && i & mb == 0 {
                self.amplitudes.swap(i, (i & !ma) | mb);
            }
        }
    }

    /// Applies `m` to the system register when ancilla bit `control` is set.
    pub fn controlled_system(&mut self, control: u32, m: &Mat2) {
        let mask = 2usize << control;
        for i in (0..self.dim()).step_by(2) {
            if i & mask != 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i + 1]);
                self.amplitudes[i] = a * m[0][0] + b * m[0][1];
                self.amplitudes[i + 1] = a * m[1][0] + b * m[1][1];
            }
        }
    }

    /// Inverse quantum Fourier transform on the ancilla register, as the
    /// textbook circuit: bit reversal, then controlled `R_m^dagger` and
    /// Hadamards from the least significant qubit up.
    pub fn inverse_qft(&mut self) {
        let t = self.ancillas;
        for q in 0..t / 2 {
            self.swap(q, t - 1 - q);
        }
        // Qubit i (1-based, most significant first) lives at bit t - i.
        for i in (1..=t).rev() {
            for m in (2..=t - i + 1).rev() {
                let angle = -2.0 * PI / (1u64 << m) as f64;
                self.controlled_phase(t - (i + m - 1), t - i, angle);
            }
            self.hadamard(t - i);
        }
    }

    /// Probability of each ancilla outcome, summed over the system register.
    pub fn ancilla_marginal(&self) -> Vec<f64> {
        self.amplitudes
            .chunks(2)
            .map(|c| c[0].norm_sqr() + c[1].norm_sqr())
            .collect()
    }
}

/// Phase estimation of the Grover rotation started from `|u>`, simulated on
/// `t` ancilla qubits. Returns the measurement distribution folded onto
/// `{k/T : k = 0..=T/2}`.
pub fn simulate_pea(phi: Phase, t: u32) -> Result<DistributionTable> {
    if !(1..=MAX_ANCILLAS).contains(&t) {
        return Err(Error::OutOfRange {
            what: "ancilla count t",
            value: t as f64,
        });
    }
    let p = phi.value();
    if p > 0.5 {
        return Err(Error::InvalidPhase(p));
    }
    let grid = GridSize::from_t(t)?;
    let (s, c) = (PI * p).sin_cos();
    let mut state = StateVector::new(t, [c, s]);
    state.check_norm("preparation");
    for q in 0..t {
        state.hadamard(q);
    }
    state.check_norm("ancilla superposition");

    let mut power = grover_rotation(phi);
    for q in 0..t {
        state.controlled_system(q, &power);
        state.check_norm("controlled rotation");
        power = mat_mul(&power, &power);
    }
    state.inverse_qft();
    state.check_norm("inverse QFT");

    let raw = state.ancilla_marginal();
    let len = grid.len() as usize;
    let mut folded = vec![0.0; len / 2 + 1];
    for (x, m) in raw.into_iter().enumerate() {
        folded[x.min(len - x)] += m;
    }
    let support = (0..folded.len()).map(|k| k as f64 / len as f64).collect();
    DistributionTable::from_parts(grid, support, folded)
}
