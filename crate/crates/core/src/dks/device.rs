use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::gstate::{apply_uniform_loss, embed_graph, expand_spectral, CovarianceState};
use crate::rng::SimRng;
use crate::sampler::{
    enumerate_subspace, optimize_scaling, ChainSampler, ClickPattern, ScalingChoice, SubspaceDistribution,
    MAX_ENUMERATION_MODES,
};

use super::NoiseConfig;

/// Rejected chains tolerated per postselected sample before giving up.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// A noisy GBS device programmed with one graph and tuned for `k` clicks.
///
/// Up to [`MAX_ENUMERATION_MODES`] modes, k-click samples come from the exact
/// subspace distribution; above that, from rejection over chain samples.
#[derive(Debug)]
pub struct GbsDevice {
    k: usize,
    noise: NoiseConfig,
    scaling: ScalingChoice,
    state: CovarianceState,
    chain: ChainSampler,
    subspace: Option<(SubspaceDistribution, Option<WeightedIndex<f64>>)>,
}

impl GbsDevice {
    /// Tunes `c` for `k` clicks at the configured loss, then builds the state.
    /// The scale ignores spectral impurity.
    pub fn prepare(g: &Graph, k: usize, noise: &NoiseConfig) -> Result<Self> {
        let scaling = optimize_scaling(g, k, noise.loss())?;
        Self::with_scaling(g, k, noise, scaling)
    }

    pub fn with_scaling(g: &Graph, k: usize, noise: &NoiseConfig, scaling: ScalingChoice) -> Result<Self> {
        if k > g.n() {
            return Err(Error::Parameter(format!("k = {k} exceeds {} vertices", g.n())));
        }
        let mut state = embed_graph(g, scaling.c)?;
        if let Some(profile) = noise.schmidt() {
            state = expand_spectral(&state, profile)?;
        }
        let state = apply_uniform_loss(&state, noise.loss())?;
        let subspace = if g.n() <= MAX_ENUMERATION_MODES {
            let dist = enumerate_subspace(&state, k)?;
            let index = WeightedIndex::new(dist.probabilities()).ok();
            Some((dist, index))
        } else {
            None
        };
        Ok(Self {
            k,
            noise: noise.clone(),
            scaling,
            chain: ChainSampler::new(&state)?,
            state,
            subspace,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn noise(&self) -> &NoiseConfig {
        &self.noise
    }

    pub fn scaling(&self) -> ScalingChoice {
        self.scaling
    }

    pub fn state(&self) -> &CovarianceState {
        &self.state
    }

    /// Exact k-click distribution, when the device is small enough to enumerate.
    pub fn subspace(&self) -> Option<&SubspaceDistribution> {
        self.subspace.as_ref().map(|(d, _)| d)
    }

    /// One sample postselected on `k` clicks.
    pub fn sample_k(&self, rng: &mut SimRng) -> Result<ClickPattern> {
        match &self.subspace {
            Some((dist, Some(index))) => Ok(dist.patterns()[index.sample(rng)]),
            Some((_, None)) => Err(Error::EmptyDistribution(format!(
                "the {}-click subspace carries no probability",
                self.k
            ))),
            None => self.chain.sample_with_clicks(rng, self.k, MAX_REJECTIONS),
        }
    }

    /// One sample with no postselection.
    pub fn sample_raw(&self, rng: &mut SimRng) -> Result<ClickPattern> {
        self.chain.sample(rng)
    }

    /// Clicked modes of one sample restricted to `modes`.
    pub fn sample_modes(&self, rng: &mut SimRng, modes: &[usize]) -> Result<Vec<usize>> {
        self.chain.sample_subset(rng, modes)
    }
}
