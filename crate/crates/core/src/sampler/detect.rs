//! Outcome probabilities for threshold and photon-number-resolving detectors.
//!
//! All formulas use `Σ = (σ + 1) / 2`, which is the identity for vacuum. A set of
//! spatial modes is entirely dark with probability `det(Σ_R)^{-1/2}`, where `R`
//! collects the rows of every spectral mode of those spatial modes.

use std::fmt;

use crate::error::{Error, Result};
use crate::gstate::{recover_kernel, CovarianceState};
use crate::linalg::{self, CMat};

use super::hafnian::hafnian;

/// Spatial modes that registered a click, as a bitmask of width `<= 64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClickPattern {
    bits: u64,
    width: usize,
}

impl ClickPattern {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width > 64 {
            return Err(Error::Capacity(format!("click patterns hold at most 64 modes, got {width}")));
        }
        if width < 64 && bits >> width != 0 {
            return Err(Error::Selection(format!("bitmask {bits:#x} exceeds width {width}")));
        }
        Ok(Self { bits, width })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    pub fn from_modes(modes: &[usize], width: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &m in modes {
            if m >= width {
                return Err(Error::Selection(format!("mode {m} out of range for width {width}")));
            }
            bits |= 1 << m;
        }
        Self::new(bits, width)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of clicks.
    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, mode: usize) -> bool {
        mode < self.width && self.bits >> mode & 1 == 1
    }

    /// Clicked modes in increasing order.
    pub fn modes(&self) -> Vec<usize> {
        (0..self.width).filter(|&m| self.contains(m)).collect()
    }
}

/// Bitstring with mode 0 first.
impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in 0..self.width {
            f.write_str(if self.contains(m) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `(σ + 1) / 2`.
pub(crate) fn shifted_covariance(state: &CovarianceState) -> CMat {
    let n = state.sigma().nrows();
    (state.sigma() + CMat::identity(n, n)).scale(0.5)
}

fn check_width(state: &CovarianceState, width: usize) -> Result<()> {
    if width != state.spatial_modes() {
        return Err(Error::Selection(format!(
            "pattern width {width} does not match {} spatial modes",
            state.spatial_modes()
        )));
    }
    Ok(())
}

fn rows_of_mask(state: &CovarianceState, mask: u64) -> Vec<usize> {
    (0..state.spatial_modes())
        .filter(|i| mask >> i & 1 == 1)
        .flat_map(|i| state.rows_of_spatial(i))
        .collect()
}

fn mode_blocks(state: &CovarianceState, modes: &[usize]) -> Vec<Vec<usize>> {
    modes.iter().map(|&i| state.rows_of_spatial(i)).collect()
}

/// Probability that every mode in `spatial_subset` is dark.
pub fn vacuum_probability(state: &CovarianceState, spatial_subset: u64) -> Result<f64> {
    let n = state.spatial_modes();
    if n < 64 && spatial_subset >> n != 0 {
        return Err(Error::Selection(format!("subset {spatial_subset:#x} exceeds {n} modes")));
    }
    let rows = rows_of_mask(state, spatial_subset);
    linalg::inv_sqrt_det(&shifted_covariance(state), &rows)
}

/// Probability of clicks on exactly the modes of `pattern`, by inclusion–exclusion
/// over vacuum projections. Cost `2^count` determinants.
pub fn threshold_probability(state: &CovarianceState, pattern: &ClickPattern) -> Result<f64> {
    check_width(state, pattern.width())?;
    let all = if pattern.width() == 64 { u64::MAX } else { (1u64 << pattern.width()) - 1 };
    let dark = rows_of_mask(state, all & !pattern.bits());
    let clicked = pattern.modes();
    let table = linalg::subset_inv_sqrt_dets_from(
        &shifted_covariance(state),
        &dark,
        &mode_blocks(state, &clicked),
    )?;
    // sum over W ⊆ C of (-1)^|W| P_vac(dark ∪ W)
    let p: f64 = table
        .iter()
        .enumerate()
        .map(|(w, v)| if w.count_ones() % 2 == 0 { *v } else { -v })
        .sum();
    Ok(p.max(0.0))
}

/// Largest mode count for [`threshold_distribution`].
pub const MAX_FULL_DISTRIBUTION_MODES: usize = 20;

/// Probabilities of all `2^n` click patterns, indexed by bitmask.
pub fn threshold_distribution(state: &CovarianceState) -> Result<Vec<f64>> {
    let n = state.spatial_modes();
    if n > MAX_FULL_DISTRIBUTION_MODES {
        return Err(Error::Capacity(format!(
            "full click distribution over {n} modes exceeds {MAX_FULL_DISTRIBUTION_MODES}"
        )));
    }
    let modes: Vec<usize> = (0..n).collect();
    let dark = linalg::subset_inv_sqrt_dets(&shifted_covariance(state), &mode_blocks(state, &modes))?;
    let full = (1usize << n) - 1;
    // g[T] = P_vac(complement of T), then P(C) = sum_{T ⊆ C} (-1)^{|C \ T|} g[T]
    let mut g: Vec<f64> = (0..=full).map(|t| dark[full ^ t]).collect();
    linalg::mobius_in_place(&mut g);
    for p in &mut g {
        *p = p.max(0.0);
    }
    Ok(g)
}

/// Total probability of each click count `0..=n`.
pub fn click_count_distribution(state: &CovarianceState) -> Result<Vec<f64>> {
    let table = threshold_distribution(state)?;
    let mut counts = vec![0.0; state.spatial_modes() + 1];
    for (mask, p) in table.iter().enumerate() {
        counts[mask.count_ones() as usize] += p;
    }
    Ok(counts)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Probability of the photon-number outcome `occupations` on a single-spectral-mode
/// state: `Haf(A_S) / (prod s_i! sqrt(det Σ))`, where `A_S` repeats rows and
/// columns of the kernel according to the counts.
pub fn pnr_probability(state: &CovarianceState, occupations: &[usize]) -> Result<f64> {
    let m = state.spatial_modes();
    if state.spectral_modes() != 1 {
        return Err(Error::Parameter("photon-number statistics need one spectral mode".into()));
    }
    if occupations.len() != m {
        return Err(Error::Selection(format!(
            "{} occupations given for {m} modes",
            occupations.len()
        )));
    }
    let kernel = recover_kernel(state)?;
    let total: usize = occupations.iter().sum();
    if total % 2 == 1 {
        let scale = kernel.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let block_diagonal = (0..m).all(|i| {
            (0..m).all(|j| {
                kernel[(i, j + m)].norm() <= 1e-12 * scale && kernel[(i + m, j)].norm() <= 1e-12 * scale
            })
        });
        if block_diagonal {
            return Ok(0.0);
        }
    }
    let mut idx: Vec<usize> = Vec::with_capacity(2 * total);
    for (i, &s) in occupations.iter().enumerate() {
        idx.extend(std::iter::repeat_n(i, s));
    }
    for (i, &s) in occupations.iter().enumerate() {
        idx.extend(std::iter::repeat_n(i + m, s));
    }
    let sub = linalg::submatrix(&kernel, &idx, &idx);
    let haf = hafnian(&sub)?;
    let norm = linalg::inv_sqrt_det(&shifted_covariance(state), &(0..2 * m).collect::<Vec<_>>())?;
    let denom: f64 = occupations.iter().map(|&s| factorial(s)).product();
    Ok((haf.re * norm / denom).max(0.0))
}
