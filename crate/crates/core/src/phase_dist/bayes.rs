//! Maximum-likelihood phase from repeated counting samples.
//!
//! Hypotheses live on the refined grid `k / (r*T)`. For a hypothesis that is
//! not a multiple of `1/T`, every sample `m/T` shares the kernel numerator
//! `sin^2(pi*k/r)`, so the likelihood factor is
//! `sin^2(pi*k/r) / T^2 * (1/sin^2(pi*(s-c)) + 1/sin^2(pi*(s+c)))`
//! and only the reciprocal-sine terms depend on the sample. Those are read
//! from a table indexed by the refined-grid offset.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::rc::Rc;

use super::{GridSize, Phase};
use crate::error::{Error, Result};

pub const DEFAULT_REFINEMENT: u32 = 64;

/// Per-factor lower bound on the log-likelihood.
const LOG_FLOOR: f64 = -745.0;
/// Refined grids larger than this are evaluated without a table.
const MAX_TABLE: u64 = 1 << 22;

/// Hypothesis maximising the counting log-likelihood of `samples`, searched
/// exhaustively over `{k / (refinement*T) : k = 0..=refinement*T/2}`.
/// Ties go to the smallest hypothesis. `refinement` must be at least 2.
pub fn bayes_argmax(samples: &[Phase], grid: GridSize, refinement: u32) -> Result<Phase> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if refinement < 2 {
        // With r = 1 every hypothesis sits on the coarse grid, where split
        // samples have zero likelihood everywhere.
        return Err(Error::InvalidConfig("refinement must be at least 2".into()));
    }
    let half = grid.len() / 2;
    let indices = samples
        .iter()
        .map(|s| match grid.index_of(s.value()) {
            Some(k) if k <= half => Ok(k as u32),
            _ => Err(Error::OffGrid {
                phase: s.value(),
                grid: grid.len(),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Phase::counting(argmax_indices(&indices, grid, refinement))
}

/// Same as [`bayes_argmax`] on pre-validated grid indices in `0..=T/2`.
pub(crate) fn argmax_indices(indices: &[u32], grid: GridSize, refinement: u32) -> f64 {
    assert!(!indices.is_empty());
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted[0] == sorted[sorted.len() - 1] {
        // Point-mass likelihood: the shared sample is the only hypothesis with
        // likelihood one, and no other reaches it.
        return sorted[0] as f64 / grid.len() as f64;
    }
    let mut groups: Vec<(u64, f64)> = Vec::new();
    for &m in &sorted {
        match groups.last_mut() {
            Some((v, c)) if *v == m as u64 => *c += 1.0,
            _ => groups.push((m as u64, 1.0)),
        }
    }

    let table = likelihood_table(grid, refinement);
    let r = refinement as u64;
    let fine = r * grid.len();
    let half = grid.len() / 2;
    let mut best = f64::NEG_INFINITY;
    let mut best_k = None;
    for k in 0..=fine / 2 {
        let residue = (k % r) as usize;
        if residue == 0 {
            // On the coarse grid the likelihood vanishes unless every sample
            // coincides, which was handled above.
            continue;
        }
        let ln_num = table.ln_num[residue];
        let mut ll = 0.0;
        for &(m, count) in &groups {
            let base = m * r;
            let mut d = table.inv_sin2((base + fine - k) % fine);
            if m != 0 && m != half {
                d += table.inv_sin2((base + k) % fine);
            }
            ll += count * (ln_num + d.ln()).max(LOG_FLOOR);
        }
        if ll > best {
            best = ll;
            best_k = Some(k);
        }
    }
    let k = best_k.expect("every off-grid hypothesis has positive likelihood");
    k as f64 / fine as f64
}

struct LikelihoodTable {
    grid: GridSize,
    refinement: u32,
    /// `ln(sin^2(pi*j/r) / T^2)` for residue `j`.
    ln_num: Vec<f64>,
    /// `1/sin^2(pi*d/(r*T))`, empty when the grid is too large to tabulate.
    inv_sin2: Vec<f64>,
}

impl LikelihoodTable {
    fn new(grid: GridSize, refinement: u32) -> Self {
        let r = refinement as u64;
        let fine = r * grid.len();
        let tf = grid.len() as f64;
        let ln_num = (0..r)
            .map(|j| {
                let s = (PI * j as f64 / r as f64).sin();
                (s * s / (tf * tf)).ln()
            })
            .collect();
        let inv_sin2 = if fine <= MAX_TABLE {
            (0..fine).map(|d| inv_sin2_direct(d, fine)).collect()
        } else {
            Vec::new()
        };
        Self {
            grid,
            refinement,
            ln_num,
            inv_sin2,
        }
    }

    #[inline]
    fn inv_sin2(&self, d: u64) -> f64 {
        match self.inv_sin2.get(d as usize) {
            Some(v) => *v,
            None => inv_sin2_direct(d, self.refinement as u64 * self.grid.len()),
        }
    }
}

fn inv_sin2_direct(d: u64, fine: u64) -> f64 {
    let s = (PI * d as f64 / fine as f64).sin();
    1.0 / (s * s)
}

thread_local! {
    static TABLE: RefCell<Option<Rc<LikelihoodTable>>> = const { RefCell::new(None) };
}

fn likelihood_table(grid: GridSize, refinement: u32) -> Rc<LikelihoodTable> {
    TABLE.with(|cell| {
        let mut slot = cell.borrow_mut();
        match slot.as_ref() {
            Some(t) if t.grid == grid && t.refinement == refinement => t.clone(),
            _ => {
                let t = Rc::new(LikelihoodTable::new(grid, refinement));
                *slot = Some(t.clone());
                t
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::qc_point_index;
    use super::*;
    use proptest::prelude::*;

    /// Straight evaluation of the counting likelihood with the kernel formula.
    fn brute_log_likelihood(indices: &[u32], grid: GridSize, c: f64) -> Option<f64> {
        let mut ll = 0.0;
        for &m in indices {
            let p = qc_point_index(c, m as u64, grid);
            if p == 0.0 {
                return None;
            }
            ll += p.ln().max(LOG_FLOOR);
        }
        Some(ll)
    }

    fn brute_argmax(indices: &[u32], grid: GridSize, r: u32) -> (f64, f64) {
        let fine = r as u64 * grid.len();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..=fine / 2 {
            let c = k as f64 / fine as f64;
            if let Some(ll) = brute_log_likelihood(indices, grid, c) {
                if ll > best.0 {
                    best = (ll, c);
                }
            }
        }
        best
    }

    fn phases(v: &[f64]) -> Vec<Phase> {
        v.iter().map(|x| Phase::counting(*x).unwrap()).collect()
    }

    #[test]
    fn unanimous_samples() {
        let g = GridSize::from_len(4).unwrap();
        let est = bayes_argmax(&phases(&[0.25, 0.25, 0.25]), g, 64).unwrap();
        assert_eq!(est.value(), 0.25);
        let g = GridSize::from_len(8).unwrap();
        assert_eq!(bayes_argmax(&phases(&[0.0]), g, 64).unwrap().value(), 0.0);
    }

    #[test]
    fn split_samples_land_between() {
        // Exhaustive grid evaluation (numpy and the brute force below) puts the
        // maximum at 3/16.
        let g = GridSize::from_len(8).unwrap();
        let est = bayes_argmax(&phases(&[0.125, 0.25, 0.125, 0.25]), g, 64)
            .unwrap()
            .value();
        assert!(est > 0.125 && est < 0.25);
        assert_eq!(est, 0.1875);
    }

    #[test]
    fn errors() {
        let g = GridSize::from_len(8).unwrap();
        assert!(matches!(bayes_argmax(&[], g, 64), Err(Error::EmptySamples)));
        assert!(matches!(
            bayes_argmax(&phases(&[0.1]), g, 64),
            Err(Error::OffGrid { .. })
        ));
        assert!(matches!(
            bayes_argmax(&[Phase::new(0.75).unwrap()], g, 64),
            Err(Error::OffGrid { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn fast_path_matches_brute_force(
            t in 2u32..7,
            raw in proptest::collection::vec(0u32..64, 1..6),
            r in prop_oneof![Just(2u32), Just(4), Just(16)],
        ) {
            let g = GridSize::from_t(t).unwrap();
            let half = (g.len() / 2) as u32;
            let idx: Vec<u32> = raw.iter().map(|x| x % (half + 1)).collect();
            let fast = argmax_indices(&idx, g, r);
            let (best_ll, best) = brute_argmax(&idx, g, r);
            let fast_ll = brute_log_likelihood(&idx, g, fast).unwrap();
            prop_assert!((fast_ll - best_ll).abs() < 1e-9, "{} vs {}", fast, best);
        }
    }
}
