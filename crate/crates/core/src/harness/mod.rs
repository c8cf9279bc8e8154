//! Experiment configuration, execution and CSV output.
//!
//! An experiment fans out independent (series, iteration) runs over a worker
//! pool. Every run seeds its own stream from the master seed and a series
//! label, and results are folded in task order, so output bytes do not depend
//! on the number of workers.

mod io;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dks::{
    greedy_baseline, random_search_uniform, random_search_with, raw_search_with, simulated_annealing,
    uniform_subset, AnnealingSchedule, GbsDevice, NoiseConfig, RunRecord, RUN_CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::graph::{erdos_renyi_seeded, plant_clique, Graph, SubgraphSelection, MAX_SAMPLING_VERTICES};
use crate::gstate::schmidt_profile;
use crate::rng::{derive_seed, seeded};
use crate::sampler::MAX_ENUMERATION_MODES;

pub use io::{format_number, graph_from_json, graph_to_json, load_graph, save_graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Best density against step for uniform and GBS random search.
    Fig1,
    /// Mean sampled density against graph size.
    ScalingN,
    /// Exact k-click distributions per noise point.
    Distribution,
    /// Classical and GBS simulated annealing.
    Annealing,
    /// GBS search without postselection.
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KRule {
    /// Closest integer to `sqrt(n)`.
    #[serde(rename = "sqrt_n")]
    SqrtN,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sizes {
    One(usize),
    Many(Vec<usize>),
}

/// Where the graph comes from: a file, or an Erdős–Rényi draw. A clique on the
/// listed vertices is planted in either.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Sizes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clique: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuritySpec {
    pub l: usize,
    pub b: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSpec {
    pub t0: f64,
    pub alpha: f64,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub graph: GraphSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_rule: Option<KRule>,
    #[serde(default = "one")]
    pub steps: usize,
    #[serde(default = "one")]
    pub iterations: usize,
    /// Loss values, each run with pure sources.
    #[serde(default)]
    pub loss: Vec<f64>,
    /// Source profiles, each run without loss.
    #[serde(default)]
    pub purity: Vec<PuritySpec>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anneal: Option<AnnealSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Loss points with pure sources followed by impure points without loss.
    pub fn noise_points(&self) -> Result<Vec<NoiseConfig>> {
        let mut points = Vec::new();
        for &l in &self.loss {
            points.push(NoiseConfig::new(l, None).map_err(config_error)?);
        }
        for spec in &self.purity {
            let profile = schmidt_profile(spec.l, spec.b, spec.p).map_err(config_error)?;
            points.push(NoiseConfig::new(0.0, Some(profile)).map_err(config_error)?);
        }
        if points.is_empty() {
            return Err(Error::Config("the noise grid is empty; give loss or purity values".into()));
        }
        Ok(points)
    }

    fn schedule(&self) -> Result<AnnealingSchedule> {
        match self.anneal {
            Some(s) => AnnealingSchedule::new(s.t0, s.alpha).map_err(config_error),
            None => Ok(AnnealingSchedule::default()),
        }
    }

    /// The graphs of the experiment with their target sizes.
    pub fn instances(&self) -> Result<Vec<(Graph, usize)>> {
        let src = &self.graph;
        let graphs: Vec<Graph> = match (&src.path, &src.n) {
            (Some(path), None) => vec![load_graph(path)?],
            (Some(_), Some(_)) => return Err(Error::Config("graph takes either a path or n, not both".into())),
            (None, Some(sizes)) => {
                let rho = src.rho.ok_or_else(|| Error::Config("generated graphs need rho".into()))?;
                let ns = match sizes {
                    Sizes::One(n) => vec![*n],
                    Sizes::Many(ns) => ns.clone(),
                };
                if ns.is_empty() {
                    return Err(Error::Config("graph.n lists no sizes".into()));
                }
                let mut out = Vec::with_capacity(ns.len());
                for n in ns {
                    if n > MAX_SAMPLING_VERTICES {
                        return Err(Error::Config(format!(
                            "n = {n} exceeds the {MAX_SAMPLING_VERTICES}-vertex limit"
                        )));
                    }
                    out.push(erdos_renyi_seeded(n, rho, src.seed.unwrap_or(0)).map_err(config_error)?);
                }
                out
            }
            (None, None) => return Err(Error::Config("graph needs a path or n".into())),
        };
        let mut out = Vec::with_capacity(graphs.len());
        for mut g in graphs {
            if g.n() > MAX_SAMPLING_VERTICES {
                return Err(Error::Config(format!(
                    "n = {} exceeds the {MAX_SAMPLING_VERTICES}-vertex limit",
                    g.n()
                )));
            }
            if let Some(members) = &src.clique {
                let sel = SubgraphSelection::new(members.clone(), g.n()).map_err(config_error)?;
                g = plant_clique(&g, &sel)?;
            }
            let k = match (self.k, self.k_rule) {
                (Some(k), None) => k,
                (None, Some(KRule::SqrtN)) => (g.n() as f64).sqrt().round() as usize,
                (Some(_), Some(_)) => return Err(Error::Config("give k or k_rule, not both".into())),
                (None, None) => return Err(Error::Config("k or k_rule is required".into())),
            };
            if k == 0 || k > g.n() {
                return Err(Error::Config(format!("k = {k} out of range for n = {}", g.n())));
            }
            out.push((g, k));
        }
        Ok(out)
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<Vec<(Graph, usize)>> {
        if self.iterations == 0 || self.steps == 0 {
            return Err(Error::Config("iterations and steps must be at least 1".into()));
        }
        self.noise_points()?;
        self.schedule()?;
        let instances = self.instances()?;
        if self.kind != ExperimentKind::ScalingN && instances.len() != 1 {
            return Err(Error::Config("only scaling-n experiments take several graph sizes".into()));
        }
        if self.kind == ExperimentKind::Distribution {
            let n = instances[0].0.n();
            if n > MAX_ENUMERATION_MODES {
                return Err(Error::Config(format!(
                    "distribution experiments enumerate at most {MAX_ENUMERATION_MODES} modes, got {n}"
                )));
            }
        }
        Ok(instances)
    }
}

fn config_error(e: Error) -> Error {
    Error::Config(e.to_string())
}

/// Rows of strings under named columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn write(&self, header: &[String], out: &mut String) {
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
    }
}

/// Scale chosen for one noise point.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisePointReport {
    pub n: usize,
    pub noise: NoiseConfig,
    pub c: f64,
    pub objective: f64,
    pub exact: bool,
    pub warning: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    /// Comment lines, without the leading `#`.
    pub header: Vec<String>,
    /// Per-run rows, or the result table for scaling and distribution kinds.
    pub table: ResultTable,
    /// Per-step mean and variance for the trajectory kinds.
    pub summary: Option<ResultTable>,
    pub runs: Vec<RunRecord>,
    pub noise_points: Vec<NoisePointReport>,
}

impl ExperimentOutput {
    pub fn main_csv(&self) -> String {
        let mut s = String::new();
        self.table.write(&self.header, &mut s);
        s
    }

    pub fn summary_csv(&self) -> Option<String> {
        self.summary.as_ref().map(|t| {
            let mut s = String::new();
            t.write(&self.header, &mut s);
            s
        })
    }

    /// Writes the main CSV to `path` and the summary, if any, next to it as
    /// `<stem>.summary.csv`.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.main_csv())?;
        if let Some(summary) = self.summary_csv() {
            fs::write(summary_path(path), summary)?;
        }
        Ok(())
    }
}

pub fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.csv")
}

fn noise_label(noise: &NoiseConfig) -> String {
    match noise.schmidt() {
        Some(p) => format!(
            "loss={};l={};b={};P={}",
            format_number(noise.loss()),
            p.l(),
            format_number(p.b()),
            format_number(p.purity())
        ),
        None => format!("loss={};pure", format_number(noise.loss())),
    }
}

fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

#[derive(Clone, Copy)]
enum Job {
    Uniform,
    Gbs(usize),
    Raw(usize),
    SaGbs(usize),
    SaClassical(usize),
}

impl Job {
    fn label(&self, noise: &[NoiseConfig]) -> String {
        match *self {
            Job::Uniform => "uniform".into(),
            Job::Gbs(p) => format!("gbs|{}", noise_label(&noise[p])),
            Job::Raw(p) => format!("raw|{}", noise_label(&noise[p])),
            Job::SaGbs(p) => format!("sa-gbs|{}", noise_label(&noise[p])),
            Job::SaClassical(p) => format!("sa-classical|{}", noise_label(&noise[p])),
        }
    }
}

/// Runs a configured experiment on `workers` threads.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<ExperimentOutput> {
    let instances = config.validate()?;
    let noise = config.noise_points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| match config.kind {
        ExperimentKind::ScalingN => run_scaling(config, &instances, &noise),
        ExperimentKind::Distribution => run_distribution(config, &instances[0], &noise),
        _ => run_trajectories(config, &instances[0], &noise),
    })
}

fn prepare_devices(g: &Graph, k: usize, noise: &[NoiseConfig]) -> Result<Vec<GbsDevice>> {
    noise.par_iter().map(|p| GbsDevice::prepare(g, k, p)).collect()
}

fn report(n: usize, device: &GbsDevice) -> NoisePointReport {
    let s = device.scaling();
    NoisePointReport {
        n,
        noise: device.noise().clone(),
        c: s.c,
        objective: s.objective,
        exact: s.exact,
        warning: s.warning,
    }
}

fn header(config: &ExperimentConfig, instances: &[(Graph, usize)], reports: &[NoisePointReport]) -> Vec<String> {
    let mut echo = config.clone();
    echo.out = None;
    let mut lines = vec![format!(
        "config {}",
        serde_json::to_string(&echo).expect("config serialises")
    )];
    for (g, k) in instances {
        lines.push(format!(
            "graph n={} edges={} density={} k={k}",
            g.n(),
            g.edge_count(),
            crate::graph::density(g).map(format_number).unwrap_or_default()
        ));
    }
    for r in reports {
        lines.push(format!(
            "noise n={} {} c={} objective={} exact={} warning={}",
            r.n,
            noise_label(&r.noise),
            format_number(r.c),
            format_number(r.objective),
            r.exact,
            r.warning
        ));
    }
    lines
}

fn run_trajectories(
    config: &ExperimentConfig,
    instance: &(Graph, usize),
    noise: &[NoiseConfig],
) -> Result<ExperimentOutput> {
    let (g, k) = (&instance.0, instance.1);
    let devices = prepare_devices(g, k, noise)?;
    let schedule = config.schedule()?;
    let mut series: Vec<Job> = Vec::new();
    match config.kind {
        ExperimentKind::Fig1 => {
            series.push(Job::Uniform);
            series.extend((0..noise.len()).map(Job::Gbs));
        }
        ExperimentKind::Raw => {
            series.push(Job::Uniform);
            series.extend((0..noise.len()).map(Job::Raw));
        }
        ExperimentKind::Annealing => {
            for p in 0..noise.len() {
                series.push(Job::SaClassical(p));
                series.push(Job::SaGbs(p));
            }
        }
        _ => unreachable!("trajectory kinds only"),
    }
    let tasks: Vec<(Job, u64)> = series
        .iter()
        .flat_map(|&job| (0..config.iterations as u64).map(move |it| (job, it)))
        .collect();
    let steps = config.steps;
    let runs: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(job, it)| {
            let seed = derive_seed(config.master_seed, &job.label(noise), it);
            match job {
                Job::Uniform => random_search_uniform(g, k, steps, seed),
                Job::Gbs(p) => random_search_with(g, &devices[p], steps, seed),
                Job::Raw(p) => raw_search_with(g, &devices[p], steps, seed),
                Job::SaGbs(p) => simulated_annealing(g, k, steps, &devices[p], true, schedule, seed),
                Job::SaClassical(p) => simulated_annealing(g, k, steps, &devices[p], false, schedule, seed),
            }
        })
        .collect::<Result<_>>()?;
    let greedy = greedy_baseline(g, k, steps)?;

    let mut table = ResultTable::new(&RUN_CSV_HEADER.split(',').collect::<Vec<_>>());
    let mut buf = Vec::new();
    greedy.write_csv_rows(&mut buf)?;
    for r in &runs {
        r.write_csv_rows(&mut buf)?;
    }
    let text = String::from_utf8(buf).expect("CSV rows are UTF-8");
    table.rows = text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect();

    let mut summary = ResultTable::new(&["algorithm", "loss", "purity", "step", "mean", "variance"]);
    let mut push_series = |records: &[&RunRecord]| {
        let first = records[0];
        let (loss, purity) = match &first.noise {
            Some(n) => (format_number(n.loss()), format_number(n.purity())),
            None => (String::new(), String::new()),
        };
        for step in 0..steps {
            let values: Vec<f64> = records.iter().map(|r| r.trajectory[step]).collect();
            let (mean, var) = mean_variance(&values);
            summary.rows.push(vec![
                first.algorithm.to_string(),
                loss.clone(),
                purity.clone(),
                (step + 1).to_string(),
                format_number(mean),
                format_number(var),
            ]);
        }
    };
    push_series(&[&greedy]);
    for chunk in runs.chunks(config.iterations) {
        push_series(&chunk.iter().collect::<Vec<_>>());
    }

    let reports: Vec<NoisePointReport> = devices.iter().map(|d| report(g.n(), d)).collect();
    let mut all_runs = vec![greedy];
    all_runs.extend(runs);
    Ok(ExperimentOutput {
        header: header(config, std::slice::from_ref(instance), &reports),
        table,
        summary: Some(summary),
        runs: all_runs,
        noise_points: reports,
    })
}

fn run_scaling(
    config: &ExperimentConfig,
    instances: &[(Graph, usize)],
    noise: &[NoiseConfig],
) -> Result<ExperimentOutput> {
    let mut table = ResultTable::new(&[
        "n",
        "k",
        "algorithm",
        "loss",
        "purity",
        "mean",
        "variance",
        "diff_vs_uniform",
    ]);
    let mut reports = Vec::new();
    for (g, k) in instances {
        let (g, k) = (g, *k);
        let devices = prepare_devices(g, k, noise)?;
        let series: Vec<Option<usize>> = std::iter::once(None).chain((0..noise.len()).map(Some)).collect();
        let tasks: Vec<(Option<usize>, u64)> = series
            .iter()
            .flat_map(|&s| (0..config.iterations as u64).map(move |it| (s, it)))
            .collect();
        // mean density of `steps` independent samples per iteration
        let means: Vec<f64> = tasks
            .par_iter()
            .map(|&(s, it)| {
                let label = match s {
                    None => format!("scaling|n={}|uniform", g.n()),
                    Some(p) => format!("scaling|n={}|gbs|{}", g.n(), noise_label(&noise[p])),
                };
                let mut rng = seeded(derive_seed(config.master_seed, &label, it));
                let mut total = 0.0;
                for _ in 0..config.steps {
                    let mask = match s {
                        None => uniform_subset(&mut rng, g.n(), k),
                        Some(p) => devices[p].sample_k(&mut rng)?.bits(),
                    };
                    total += g.density_of_mask(mask);
                }
                Ok(total / config.steps as f64)
            })
            .collect::<Result<_>>()?;
        let stats: Vec<(f64, f64)> = means.chunks(config.iterations).map(mean_variance).collect();
        let uniform_mean = stats[0].0;
        for (s, (mean, var)) in series.iter().zip(&stats) {
            let (algorithm, loss, purity) = match s {
                None => ("uniform", String::new(), String::new()),
                Some(p) => ("gbs", format_number(noise[*p].loss()), format_number(noise[*p].purity())),
            };
            table.rows.push(vec![
                g.n().to_string(),
                k.to_string(),
                algorithm.to_string(),
                loss,
                purity,
                format_number(*mean),
                format_number(*var),
                format_number(mean - uniform_mean),
            ]);
        }
        reports.extend(devices.iter().map(|d| report(g.n(), d)));
    }
    Ok(ExperimentOutput {
        header: header(config, instances, &reports),
        table,
        summary: None,
        runs: Vec::new(),
        noise_points: reports,
    })
}

fn run_distribution(
    config: &ExperimentConfig,
    instance: &(Graph, usize),
    noise: &[NoiseConfig],
) -> Result<ExperimentOutput> {
    let (g, k) = (&instance.0, instance.1);
    let devices = prepare_devices(g, k, noise)?;
    let mut columns = vec!["pattern".to_string()];
    columns.extend(noise.iter().map(noise_label));
    let mut table = ResultTable {
        columns,
        rows: Vec::new(),
    };
    let dists: Vec<_> = devices
        .iter()
        .map(|d| d.subspace().expect("distribution graphs are enumerable"))
        .collect();
    let weights: Vec<Vec<f64>> = dists.iter().map(|d| d.weights()).collect();
    for (i, pattern) in dists[0].patterns().iter().enumerate() {
        let mut row = vec![pattern.to_string()];
        row.extend(weights.iter().map(|w| format_number(w[i])));
        table.rows.push(row);
    }
    let reports: Vec<NoisePointReport> = devices.iter().map(|d| report(g.n(), d)).collect();
    Ok(ExperimentOutput {
        header: header(config, std::slice::from_ref(instance), &reports),
        table,
        summary: None,
        runs: Vec::new(),
        noise_points: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json, "test").unwrap()
    }

    #[test]
    fn config_parsing_and_resolution() {
        let c = config(
            r#"{"kind": "scaling-n", "graph": {"n": [9, 16, 25], "rho": 0.4, "seed": 3},
                "k_rule": "sqrt_n", "steps": 4, "iterations": 2, "loss": [0.0, 0.5],
                "purity": [{"l": 2, "b": 1.0, "P": 0.7}], "master_seed": 11}"#,
        );
        let inst = c.validate().unwrap();
        assert_eq!(inst.iter().map(|(g, k)| (g.n(), *k)).collect::<Vec<_>>(), vec![(9, 3), (16, 4), (25, 5)]);
        let noise = c.noise_points().unwrap();
        assert_eq!(noise.len(), 3);
        assert_eq!(noise[2].loss(), 0.0);
        assert!((noise[2].purity() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn config_errors_precede_compute() {
        let bad = [
            r#"{"kind": "fig1", "graph": {"n": 70, "rho": 0.4}, "k": 3, "loss": [0]}"#,
            r#"{"kind": "distribution", "graph": {"n": 15, "rho": 0.4}, "k": 3, "loss": [0]}"#,
            r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.4}, "k": 3}"#,
            r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.4}, "k": 11, "loss": [0]}"#,
            r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.4}, "loss": [0]}"#,
            r#"{"kind": "fig1", "graph": {"n": [9, 10], "rho": 0.4}, "k": 3, "loss": [0]}"#,
            r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.4}, "k": 3, "purity": [{"l": 2, "b": 1, "P": 0.4}]}"#,
            r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.4}, "k": 3, "loss": [0], "iterations": 0}"#,
        ];
        for json in bad {
            let err = run_experiment(&config(json), 1).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{json}: {err:?}");
        }
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"kind": "fig9"}"#, "c.json"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn fig1_on_complete_graph() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k5.json");
        save_graph(&Graph::complete(5).unwrap(), &path).unwrap();
        let c = ExperimentConfig {
            kind: ExperimentKind::Fig1,
            graph: GraphSource {
                path: Some(path),
                ..Default::default()
            },
            k: Some(3),
            k_rule: None,
            steps: 1,
            iterations: 1,
            loss: vec![0.0, 0.5],
            purity: vec![],
            master_seed: 1,
            anneal: None,
            out: None,
        };
        let out = run_experiment(&c, 1).unwrap();
        let d = out.table.column("best_density").unwrap();
        assert_eq!(out.table.rows.len(), 4);
        assert!(out.table.rows.iter().all(|r| r[d] == "1"));
        assert!(out.main_csv().starts_with("# config {"));
        assert_eq!(out.noise_points.len(), 2);
    }

    #[test]
    fn row_counts_and_summary() {
        let c = config(
            r#"{"kind": "annealing", "graph": {"n": 10, "rho": 0.5, "seed": 2}, "k": 4,
                "steps": 3, "iterations": 2, "loss": [0.2], "master_seed": 5}"#,
        );
        let out = run_experiment(&c, 2).unwrap();
        // greedy, then 2 series x 2 iterations, 3 steps each
        assert_eq!(out.table.rows.len(), 3 + 2 * 2 * 3);
        assert_eq!(out.summary.as_ref().unwrap().rows.len(), 3 * 3);
        let csv = out.main_csv();
        assert!(csv.lines().any(|l| l == RUN_CSV_HEADER));
    }

    #[test]
    fn distribution_columns_are_normalised() {
        let c = config(
            r#"{"kind": "distribution", "graph": {"n": 8, "rho": 0.5, "seed": 4}, "k": 3,
                "loss": [0.0, 0.4]}"#,
        );
        let out = run_experiment(&c, 1).unwrap();
        assert_eq!(out.table.rows.len(), 56);
        assert_eq!(out.table.columns.len(), 3);
        for col in 1..3 {
            let total: f64 = out.table.rows.iter().map(|r| r[col].parse::<f64>().unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let c = config(
            r#"{"kind": "raw", "graph": {"n": 9, "rho": 0.5, "seed": 1}, "k": 3,
                "steps": 5, "iterations": 4, "loss": [0.0, 0.3], "master_seed": 9}"#,
        );
        let a = run_experiment(&c, 1).unwrap();
        let b = run_experiment(&c, 3).unwrap();
        assert_eq!(a.main_csv(), b.main_csv());
        assert_eq!(a.summary_csv(), b.summary_csv());
    }

    #[test]
    fn adding_a_noise_point_keeps_other_series() {
        let base = r#"{"kind": "fig1", "graph": {"n": 9, "rho": 0.5, "seed": 1}, "k": 3,
                "steps": 4, "iterations": 2, "master_seed": 9, "loss": "#;
        let one = run_experiment(&config(&format!("{base}[0.1]}}")), 1).unwrap();
        let two = run_experiment(&config(&format!("{base}[0.3, 0.1]}}")), 1).unwrap();
        let pick = |o: &ExperimentOutput| -> Vec<RunRecord> {
            o.runs.iter().filter(|r| r.noise.as_ref().is_some_and(|n| n.loss() == 0.1)).cloned().collect()
        };
        assert_eq!(pick(&one), pick(&two));
    }
}
