//! Output distributions of QFT phase estimation and quantum counting.
//!
//! A phase estimation run with `t` ancillas and eigenphase `phi` returns
//! `k/T` (`T = 2^t`) with probability `K(k/T - phi)`, where
//! `K(d) = (sin(T*pi*d) / (T*sin(pi*d)))^2`. Counting folds the two
//! eigenphases `phi` and `1 - phi` of the Grover rotation onto `[0, 1/2]`.

mod bayes;

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};

pub(crate) use bayes::argmax_indices;
pub use bayes::{bayes_argmax, DEFAULT_REFINEMENT};

/// Tolerance for treating a phase as a multiple of `1/T`.
const GRID_TOL: f64 = 1e-9;
/// Threshold for the removable singularities of the kernel.
const KERNEL_EPS: f64 = 1e-15;

/// A phase in `[0, 1)`; arithmetic is modulo 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Phase(f64);

impl Phase {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidPhase(value))
        }
    }

    /// A counting-context phase, restricted to `[0, 1/2]`.
    pub fn counting(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=0.5).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidPhase(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A counted fraction `S/N` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Fraction(f64);

impl Fraction {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidFraction(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Number of ancilla qubits `t` and the grid size `T = 2^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSize {
    t: u32,
}

impl GridSize {
    pub const MAX_T: u32 = 30;

    pub fn from_t(t: u32) -> Result<Self> {
        if (1..=Self::MAX_T).contains(&t) {
            Ok(Self { t })
        } else {
            Err(Error::InvalidGrid(if t < 64 {
                1u64 << t
            } else {
                u64::MAX
            }))
        }
    }

    /// Build from `T` itself, which must be a power of two no smaller than 2.
    pub fn from_len(len: u64) -> Result<Self> {
        if len >= 2 && len.is_power_of_two() && len.trailing_zeros() <= Self::MAX_T {
            Ok(Self {
                t: len.trailing_zeros(),
            })
        } else {
            Err(Error::InvalidGrid(len))
        }
    }

    pub fn t(self) -> u32 {
        self.t
    }

    /// `T = 2^t`; never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> u64 {
        1u64 << self.t
    }

    /// Number of points `T/2 + 1` on the folded counting grid.
    pub fn counting_len(self) -> usize {
        (self.len() / 2 + 1) as usize
    }

    /// Index `k` such that `phase = k/T`, if it is on the grid.
    pub fn index_of(self, phase: f64) -> Option<u64> {
        let x = phase * self.len() as f64;
        let k = x.round();
        ((x - k).abs() < GRID_TOL * self.len() as f64 && k >= 0.0).then_some(k as u64)
    }
}

/// A discrete distribution over grid phases.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    grid: GridSize,
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl DistributionTable {
    /// Checks normalisation, non-negativity and strictly increasing support.
    pub fn from_parts(grid: GridSize, support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() || support.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "support has {} points but mass has {}",
                support.len(),
                mass.len()
            )));
        }
        if let Some(m) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::OutOfRange {
                what: "probability mass",
                value: *m,
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "support is not strictly increasing".into(),
            ));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfRange {
                what: "total probability mass",
                value: total,
            });
        }
        Ok(Self {
            grid,
            support,
            mass,
        })
    }

    pub fn grid(&self) -> GridSize {
        self.grid
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass on support points within `radius` of `center`. Circular distance
    /// is for unfolded phase estimation output, linear for folded counting.
    pub fn mass_within(&self, center: f64, radius: f64, circular: bool) -> f64 {
        self.support
            .iter()
            .zip(&self.mass)
            .filter(|(s, _)| {
                let d = (*s - center).abs();
                let d = if circular { d.min(1.0 - d) } else { d };
                d <= radius + 1e-12
            })
            .map(|(_, m)| m)
            .sum()
    }

    /// Largest pointwise mass difference, or `None` if the supports differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.support != other.support {
            return None;
        }
        Some(
            self.mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn sampler(&self) -> InverseCdf {
        InverseCdf::new(&self.mass)
    }
}

/// Inverse-CDF sampler over the indices of a mass vector.
#[derive(Clone, Debug)]
pub struct InverseCdf {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl InverseCdf {
    pub fn new(mass: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        let last_positive = mass.iter().rposition(|m| *m > 0.0).unwrap_or(0);
        Self { cdf, last_positive }
    }

    /// Smallest index whose cumulative mass exceeds `u`.
    pub fn index_for(&self, u: f64) -> usize {
        self.cdf
            .partition_point(|c| *c <= u)
            .min(self.last_positive)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index_for(rng.random::<f64>())
    }
}

/// `(sin(T*pi*delta) / (T*sin(pi*delta)))^2` with its removable
/// singularities resolved to their limits.
pub(crate) fn pea_kernel(delta: f64, len: u64) -> f64 {
    let d = delta.rem_euclid(1.0);
    if d < KERNEL_EPS || 1.0 - d < KERNEL_EPS {
        return 1.0;
    }
    let tf = len as f64;
    let x = tf * d;
    if (x - x.round()).abs() < KERNEL_EPS && x.round() != 0.0 {
        return 0.0;
    }
    let r = (PI * x).sin() / (tf * (PI * d).sin());
    (r * r).min(1.0)
}

/// Folded counting probability of grid index `k` in `0..=T/2` given `phi`.
pub(crate) fn qc_point_index(phi: f64, k: u64, grid: GridSize) -> f64 {
    let len = grid.len();
    let s = k as f64 / len as f64;
    if k == 0 || 2 * k == len {
        pea_kernel(s - phi, len)
    } else {
        pea_kernel(s - phi, len) + pea_kernel(s + phi, len)
    }
}

/// Probability that phase estimation with grid `grid` reports `phitilde` when
/// the eigenphase is `phi`.
pub fn pea_pmf_point(phi: Phase, phitilde: Phase, grid: GridSize) -> Result<f64> {
    grid.index_of(phitilde.value()).ok_or(Error::OffGrid {
        phase: phitilde.value(),
        grid: grid.len(),
    })?;
    Ok(pea_kernel(phitilde.value() - phi.value(), grid.len()))
}

/// Full phase estimation distribution over `{k/T : k = 0..T}`.
pub fn pea_pmf(phi: Phase, grid: GridSize) -> DistributionTable {
    let len = grid.len();
    let support: Vec<f64> = (0..len).map(|k| k as f64 / len as f64).collect();
    let mass = support
        .iter()
        .map(|s| pea_kernel(s - phi.value(), len))
        .collect();
    DistributionTable {
        grid,
        support,
        mass,
    }
}

/// Quantum counting distribution over `{k/T : k = 0..=T/2}`.
///
/// Interior points collect both the `phi` and the `1 - phi` branch; the two
/// endpoints carry a single kernel term.
pub fn qc_pmf(phi: Phase, grid: GridSize) -> Result<DistributionTable> {
    let p = phi.value();
    if p > 0.5 {
        return Err(Error::InvalidPhase(p));
    }
    let len = grid.len();
    let n = grid.counting_len() as u64;
    let support = (0..n).map(|k| k as f64 / len as f64).collect();
    let mass = (0..n).map(|k| qc_point_index(p, k, grid)).collect();
    Ok(DistributionTable {
        grid,
        support,
        mass,
    })
}

/// `arcsin(sqrt(v)) / pi`, the counting phase of a fraction.
pub fn fraction_to_phase(v: Fraction) -> Phase {
    Phase(phase_of(v.value()))
}

/// `sin^2(pi * phi)` for a counting phase.
pub fn phase_to_fraction(phi: Phase) -> Result<Fraction> {
    if phi.value() > 0.5 {
        return Err(Error::InvalidPhase(phi.value()));
    }
    Ok(Fraction(fraction_of(phi.value())))
}

pub(crate) fn phase_of(v: f64) -> f64 {
    (v.clamp(0.0, 1.0).sqrt().asin() / PI).clamp(0.0, 0.5)
}

pub(crate) fn fraction_of(phi: f64) -> f64 {
    let s = (PI * phi).sin();
    (s * s).clamp(0.0, 1.0)
}
