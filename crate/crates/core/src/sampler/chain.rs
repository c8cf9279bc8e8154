//! Mode-by-mode threshold sampling.
//!
//! Modes are visited in index order. With `Z` the dark modes and `C` the clicked
//! modes so far, mode `j` is dark with probability
//!
//! `sum_{W ⊆ C} (-1)^|W| det(S_{W ∪ j})^{-1/2} / sum_{W ⊆ C} (-1)^|W| det(S_W)^{-1/2}`
//!
//! where `S` is the Schur complement of `Σ` on the rows of `C ∪ {j}` given the
//! rows of `Z`. The common factor `det(Σ_Z)^{-1/2}` cancels.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gstate::CovarianceState;
use crate::linalg::{self, CMat, GrowingCholesky};
use crate::rng::SimRng;

use super::detect::{shifted_covariance, ClickPattern};

/// Exact sampler of full click patterns for one state.
#[derive(Clone, Debug)]
pub struct ChainSampler {
    shifted: CMat,
    blocks: Vec<Vec<usize>>,
}

impl ChainSampler {
    pub fn new(state: &CovarianceState) -> Result<Self> {
        let n = state.spatial_modes();
        if n > 64 {
            return Err(Error::Capacity(format!("chain sampling supports 64 modes, got {n}")));
        }
        Ok(Self {
            shifted: shifted_covariance(state),
            blocks: (0..n).map(|i| state.rows_of_spatial(i)).collect(),
        })
    }

    pub fn modes(&self) -> usize {
        self.blocks.len()
    }

    /// One click pattern from the full outcome distribution.
    pub fn sample(&self, rng: &mut SimRng) -> Result<ClickPattern> {
        let all: Vec<usize> = (0..self.modes()).collect();
        let clicked = self.run(rng, &all, None)?.expect("unconstrained chains always finish");
        ClickPattern::from_modes(&clicked, self.modes())
    }

    /// Clicked modes of one draw from the marginal distribution of `modes`; the
    /// other modes are traced out.
    pub fn sample_subset(&self, rng: &mut SimRng, modes: &[usize]) -> Result<Vec<usize>> {
        if let Some(&m) = modes.iter().find(|&&m| m >= self.modes()) {
            return Err(Error::Selection(format!("mode {m} out of range for {} modes", self.modes())));
        }
        Ok(self.run(rng, modes, None)?.expect("unconstrained chains always finish"))
    }

    /// One pattern conditioned on exactly `k` clicks, by rejection. Chains are
    /// abandoned as soon as `k` becomes unreachable. Gives up with an
    /// empty-distribution error after `max_attempts` rejected chains.
    pub fn sample_with_clicks(&self, rng: &mut SimRng, k: usize, max_attempts: usize) -> Result<ClickPattern> {
        if k > self.modes() {
            return Err(Error::Parameter(format!("{k} clicks requested on {} modes", self.modes())));
        }
        let all: Vec<usize> = (0..self.modes()).collect();
        for _ in 0..max_attempts {
            if let Some(clicked) = self.run(rng, &all, Some(k))? {
                return ClickPattern::from_modes(&clicked, self.modes());
            }
        }
        Err(Error::EmptyDistribution(format!(
            "no {k}-click pattern in {max_attempts} attempts"
        )))
    }

    /// Runs one chain over `modes`; `None` when the click target became unreachable.
    fn run(&self, rng: &mut SimRng, modes: &[usize], target: Option<usize>) -> Result<Option<Vec<usize>>> {
        let n = modes.len();
        let mut chol = GrowingCholesky::new(&self.shifted);
        let mut clicked: Vec<usize> = Vec::new();
        for (step, &j) in modes.iter().enumerate() {
            if let Some(k) = target {
                if clicked.len() > k || clicked.len() + (n - step) < k {
                    return Ok(None);
                }
            }
            let p_dark = self.dark_probability(&chol, &clicked, j)?;
            if rng.random::<f64>() < p_dark {
                chol.push_rows(&self.blocks[j])?;
            } else {
                clicked.push(j);
            }
        }
        if target.is_some_and(|k| clicked.len() != k) {
            return Ok(None);
        }
        Ok(Some(clicked))
    }

    fn dark_probability(&self, chol: &GrowingCholesky<'_>, clicked: &[usize], j: usize) -> Result<f64> {
        let mut rows: Vec<usize> = Vec::new();
        let mut local: Vec<Vec<usize>> = Vec::with_capacity(clicked.len() + 1);
        for &m in clicked.iter().chain(std::iter::once(&j)) {
            let start = rows.len();
            rows.extend_from_slice(&self.blocks[m]);
            local.push((start..rows.len()).collect());
        }
        let schur = chol.schur_complement(&rows);
        if clicked.is_empty() {
            return Ok(linalg::inv_sqrt_det(&schur, &local[0])?.clamp(0.0, 1.0));
        }
        let table = linalg::subset_inv_sqrt_dets(&schur, &local)?;
        let jbit = 1usize << clicked.len();
        let (mut num, mut den) = (0.0, 0.0);
        for w in 0..jbit {
            let sign = if w.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            den += sign * table[w];
            num += sign * table[w | jbit];
        }
        if !(den > 0.0) {
            return Err(Error::Numerical(format!(
                "conditioning on a prefix of probability {den:.3e}"
            )));
        }
        Ok((num / den).clamp(0.0, 1.0))
    }
}

/// One click pattern drawn from the full outcome distribution of `state`.
pub fn sample_chain(state: &CovarianceState, rng: &mut SimRng) -> Result<ClickPattern> {
    ChainSampler::new(state)?.sample(rng)
}
