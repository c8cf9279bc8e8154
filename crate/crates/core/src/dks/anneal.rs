//! Simulated annealing with GBS or uniform exploration moves.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::graph::{grow_to_k, shrink_to_k, Graph, SubgraphSelection};
use crate::gstate::CovarianceState;
use crate::rng::{seeded, SimRng};
use crate::sampler::{vacuum_probability, ChainSampler};

use super::{check_search, uniform_subset, Algorithm, GbsDevice, RunRecord};

/// Geometric cooling `temp <- alpha * temp` from `t0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealingSchedule {
    t0: f64,
    alpha: f64,
}

impl AnnealingSchedule {
    pub const DEFAULT_T0: f64 = 0.05;
    pub const DEFAULT_ALPHA: f64 = 0.95;

    pub fn new(t0: f64, alpha: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::Parameter(format!("initial temperature must be positive, got {t0}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("cooling factor must lie in (0, 1), got {alpha}")));
        }
        Ok(Self { t0, alpha })
    }

    /// Zero temperature: only non-worsening moves are accepted.
    pub fn greedy() -> Self {
        Self {
            t0: 0.0,
            alpha: Self::DEFAULT_ALPHA,
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        Self {
            t0: Self::DEFAULT_T0,
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// Source of exploration moves.
pub enum Tweak<'a> {
    /// One GBS sample on the modes outside the current subgraph.
    Gbs(&'a GbsDevice),
    /// A uniform subset of the outside vertices whose size is
    /// `Binomial(n - k, mean_clicks / n)`.
    Uniform { mean_clicks: f64 },
}

impl<'a> Tweak<'a> {
    /// Classical moves sized like the GBS moves of `device`.
    pub fn matching(device: &GbsDevice) -> Result<Tweak<'static>> {
        let state = device.state();
        let mut mean = 0.0;
        for i in 0..state.spatial_modes() {
            mean += 1.0 - vacuum_probability(state, 1 << i)?;
        }
        Ok(Tweak::Uniform { mean_clicks: mean })
    }

    fn draw(&self, rng: &mut SimRng, outside: &[usize], n: usize) -> Result<Vec<usize>> {
        match self {
            Tweak::Gbs(device) => device.sample_modes(rng, outside),
            Tweak::Uniform { mean_clicks } => {
                let p = (mean_clicks / n as f64).clamp(0.0, 1.0);
                let size = Binomial::new(outside.len() as u64, p)
                    .map_err(|e| Error::Parameter(e.to_string()))?
                    .sample(rng) as usize;
                let mut chosen: Vec<usize> = index::sample(rng, outside.len(), size)
                    .iter()
                    .map(|i| outside[i])
                    .collect();
                chosen.sort_unstable();
                Ok(chosen)
            }
        }
    }
}

/// Clicked vertices of one sample of `state` on the modes outside `current`.
pub fn gbs_tweak(state: &CovarianceState, current: &SubgraphSelection, rng: &mut SimRng) -> Result<Vec<usize>> {
    let outside: Vec<usize> = (0..state.spatial_modes()).filter(|&v| !current.contains(v)).collect();
    if outside.is_empty() {
        return Err(Error::Parameter("the current subgraph leaves no modes to sample".into()));
    }
    ChainSampler::new(state)?.sample_subset(rng, &outside)
}

/// Annealing run with GBS moves (or uniform moves of matching size for the
/// classical variant) on a prepared device.
pub fn simulated_annealing(
    g: &Graph,
    k: usize,
    steps: usize,
    device: &GbsDevice,
    quantum: bool,
    schedule: AnnealingSchedule,
    seed: u64,
) -> Result<RunRecord> {
    let tweak = if quantum { Tweak::Gbs(device) } else { Tweak::matching(device)? };
    let mut record = simulated_annealing_with(g, k, steps, &tweak, quantum.then_some(device), schedule, seed)?;
    record.noise = Some(device.noise().clone());
    Ok(record)
}

/// Annealing with an explicit move source. The initial subgraph is a GBS
/// k-sample from `init` when given, otherwise uniform.
///
/// Each step draws a move `T` outside the current `S`; an empty move leaves the
/// state unchanged. Otherwise `S ∪ T` is peeled back to `k` vertices and the
/// candidate is accepted when it is no worse, or with probability
/// `exp(Δρ / temp)`.
pub fn simulated_annealing_with(
    g: &Graph,
    k: usize,
    steps: usize,
    tweak: &Tweak<'_>,
    init: Option<&GbsDevice>,
    schedule: AnnealingSchedule,
    seed: u64,
) -> Result<RunRecord> {
    check_search(g, k, steps)?;
    let n = g.n();
    let mut rng = seeded(seed);
    let start = match init {
        Some(device) => device.sample_k(&mut rng)?.bits(),
        None => uniform_subset(&mut rng, n, k),
    };
    let mut current = SubgraphSelection::from_mask(start, n)?;
    let mut rho = g.density_of(current.vertices());
    let mut best = rho;
    let mut temp = schedule.t0;
    let mut trajectory = Vec::with_capacity(steps);
    for _ in 0..steps {
        let outside: Vec<usize> = (0..n).filter(|&v| !current.contains(v)).collect();
        let moved = if outside.is_empty() { Vec::new() } else { tweak.draw(&mut rng, &outside, n)? };
        if !moved.is_empty() {
            let mut merged = current.vertices().to_vec();
            merged.extend(moved);
            merged.sort_unstable();
            let union = SubgraphSelection::new(merged, n)?;
            let candidate = if union.len() >= k {
                shrink_to_k(g, &union, k)?
            } else {
                grow_to_k(g, &union, k)?
            };
            let next = g.density_of(candidate.vertices());
            let delta = next - rho;
            let accept = if delta >= 0.0 {
                true
            } else {
                let u: f64 = rng.random();
                temp > 0.0 && u < (delta / temp).exp()
            };
            if accept {
                current = candidate;
                rho = next;
                best = best.max(rho);
            }
        }
        trajectory.push(best);
        temp *= schedule.alpha;
    }
    Ok(RunRecord {
        algorithm: if init.is_some() { Algorithm::SaGbs } else { Algorithm::SaClassical },
        seed,
        n,
        k,
        noise: None,
        trajectory,
        retained: steps,
    })
}
