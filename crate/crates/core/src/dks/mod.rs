//! Densest-k-subgraph search driven by uniform or GBS samples.
//!
//! Every search returns a [`RunRecord`] whose trajectory holds the best density
//! seen after each step. Runs are fully determined by their seed.

mod anneal;
mod device;

use std::fmt;
use std::io::Write;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{density, greedy_peel, Graph};
use crate::gstate::SchmidtProfile;
use crate::harness::format_number;
use crate::rng::{seeded, SimRng};

pub use anneal::{gbs_tweak, simulated_annealing, simulated_annealing_with, AnnealingSchedule, Tweak};
pub use device::{GbsDevice, MAX_REJECTIONS};

/// Loss and source impurity applied to a GBS device.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    loss: f64,
    schmidt: Option<SchmidtProfile>,
}

impl NoiseConfig {
    pub fn new(loss: f64, schmidt: Option<SchmidtProfile>) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::Parameter(format!("loss must lie in [0, 1], got {loss}")));
        }
        Ok(Self { loss, schmidt })
    }

    pub fn ideal() -> Self {
        Self {
            loss: 0.0,
            schmidt: None,
        }
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn schmidt(&self) -> Option<&SchmidtProfile> {
        self.schmidt.as_ref()
    }

    /// Source purity, 1 for pure sources.
    pub fn purity(&self) -> f64 {
        self.schmidt.as_ref().map_or(1.0, |p| p.purity())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Uniform,
    Gbs,
    Greedy,
    SaClassical,
    SaGbs,
    Raw,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Uniform => "uniform",
            Algorithm::Gbs => "gbs",
            Algorithm::Greedy => "greedy",
            Algorithm::SaClassical => "sa-classical",
            Algorithm::SaGbs => "sa-gbs",
            Algorithm::Raw => "raw",
        }
    }

    /// Whether the algorithm draws from a GBS device.
    pub fn is_quantum(&self) -> bool {
        matches!(self, Algorithm::Gbs | Algorithm::SaGbs | Algorithm::Raw)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Best-density-so-far trajectory of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    /// Noise of the device, absent for classical runs with no device.
    pub noise: Option<NoiseConfig>,
    pub trajectory: Vec<f64>,
    /// Samples that reached the density evaluation. Equal to the step count
    /// except for raw search, where only `k`-click samples count.
    pub retained: usize,
}

pub const RUN_CSV_HEADER: &str = "algorithm,seed,loss,purity,step,best_density";

impl RunRecord {
    pub fn final_density(&self) -> f64 {
        self.trajectory.last().copied().unwrap_or(0.0)
    }

    /// One CSV row per step, columns as in [`RUN_CSV_HEADER`]. Steps count from 1;
    /// loss and purity are empty for runs without a device.
    pub fn write_csv_rows(&self, mut out: impl Write) -> Result<()> {
        let (loss, purity) = match &self.noise {
            Some(n) => (format_number(n.loss()), format_number(n.purity())),
            None => (String::new(), String::new()),
        };
        for (step, d) in self.trajectory.iter().enumerate() {
            writeln!(
                out,
                "{},{},{loss},{purity},{},{}",
                self.algorithm,
                self.seed,
                step + 1,
                format_number(*d)
            )?;
        }
        Ok(())
    }
}

fn check_search(g: &Graph, k: usize, steps: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::Parameter(format!("k must lie in 1..={}, got {k}", g.n())));
    }
    if g.n() > 64 {
        return Err(Error::Capacity(format!("searches support 64 vertices, got {}", g.n())));
    }
    if steps == 0 {
        return Err(Error::Parameter("a search needs at least one step".into()));
    }
    Ok(())
}

fn running_max(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut best = 0.0f64;
    values
        .into_iter()
        .map(|v| {
            best = best.max(v);
            best
        })
        .collect()
}

/// Uniform random `k`-subset as a bitmask.
pub(crate) fn uniform_subset(rng: &mut SimRng, n: usize, k: usize) -> u64 {
    index::sample(rng, n, k).iter().fold(0u64, |m, v| m | 1 << v)
}

/// Running best density of `steps` uniformly drawn `k`-subsets.
pub fn random_search_uniform(g: &Graph, k: usize, steps: usize, seed: u64) -> Result<RunRecord> {
    check_search(g, k, steps)?;
    let mut rng = seeded(seed);
    let trajectory = running_max((0..steps).map(|_| g.density_of_mask(uniform_subset(&mut rng, g.n(), k))));
    Ok(RunRecord {
        algorithm: Algorithm::Uniform,
        seed,
        n: g.n(),
        k,
        noise: None,
        trajectory,
        retained: steps,
    })
}

/// Random search over GBS samples postselected on `k` clicks.
pub fn random_search_gbs(g: &Graph, k: usize, steps: usize, noise: &NoiseConfig, seed: u64) -> Result<RunRecord> {
    check_search(g, k, steps)?;
    random_search_with(g, &GbsDevice::prepare(g, k, noise)?, steps, seed)
}

/// As [`random_search_gbs`] on an already prepared device.
pub fn random_search_with(g: &Graph, device: &GbsDevice, steps: usize, seed: u64) -> Result<RunRecord> {
    let k = device.k();
    check_search(g, k, steps)?;
    let mut rng = seeded(seed);
    let mut densities = Vec::with_capacity(steps);
    for _ in 0..steps {
        densities.push(g.density_of_mask(device.sample_k(&mut rng)?.bits()));
    }
    Ok(RunRecord {
        algorithm: Algorithm::Gbs,
        seed,
        n: g.n(),
        k,
        noise: Some(device.noise().clone()),
        trajectory: running_max(densities),
        retained: steps,
    })
}

/// Search over unpostselected GBS samples; samples without exactly `k` clicks
/// are drawn and discarded.
pub fn raw_search(g: &Graph, k: usize, steps: usize, noise: &NoiseConfig, seed: u64) -> Result<RunRecord> {
    check_search(g, k, steps)?;
    raw_search_with(g, &GbsDevice::prepare(g, k, noise)?, steps, seed)
}

/// As [`raw_search`] on an already prepared device.
pub fn raw_search_with(g: &Graph, device: &GbsDevice, steps: usize, seed: u64) -> Result<RunRecord> {
    let k = device.k();
    check_search(g, k, steps)?;
    let mut rng = seeded(seed);
    let mut best = 0.0f64;
    let mut retained = 0;
    let mut trajectory = Vec::with_capacity(steps);
    for _ in 0..steps {
        let p = device.sample_raw(&mut rng)?;
        if p.count() == k {
            retained += 1;
            best = best.max(g.density_of_mask(p.bits()));
        }
        trajectory.push(best);
    }
    Ok(RunRecord {
        algorithm: Algorithm::Raw,
        seed,
        n: g.n(),
        k,
        noise: Some(device.noise().clone()),
        trajectory,
        retained,
    })
}

/// The deterministic greedy baseline as a constant series.
pub fn greedy_baseline(g: &Graph, k: usize, steps: usize) -> Result<RunRecord> {
    check_search(g, k, steps)?;
    let d = g.density_of(greedy_peel(g, k)?.vertices());
    Ok(RunRecord {
        algorithm: Algorithm::Greedy,
        seed: 0,
        n: g.n(),
        k,
        noise: None,
        trajectory: vec![d; steps],
        retained: steps,
    })
}

/// Mean density of a uniformly drawn `k`-subset, which equals the graph density.
pub fn expected_uniform_density(g: &Graph, k: usize) -> Result<f64> {
    if k < 2 || k > g.n() {
        return Err(Error::Parameter(format!("k must lie in 2..={}, got {k}", g.n())));
    }
    density(g)
}

/// Exact mean density of one postselected sample from an enumerable device.
pub fn expected_gbs_density(g: &Graph, device: &GbsDevice) -> Result<f64> {
    let dist = device.subspace().ok_or_else(|| {
        Error::Capacity(format!("exact expectations need at most 14 modes, got {}", g.n()))
    })?;
    if !(dist.norm() > 0.0) {
        return Err(Error::EmptyDistribution(format!("the {}-click subspace is empty", dist.k())));
    }
    Ok(dist.expectation(|p| g.density_of_mask(p.bits())))
}
