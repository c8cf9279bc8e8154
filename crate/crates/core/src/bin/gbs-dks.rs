use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use gbs_dks::dks::NoiseConfig;
use gbs_dks::graph::{density, erdos_renyi_seeded, greedy_peel, plant_random_clique};
use gbs_dks::gstate::{
    adjacency_spectrum, apply_uniform_loss, bloch_messiah, embed_graph, expand_spectral, scaling_bound,
    schmidt_profile, williamson_pure,
};
use gbs_dks::harness::{format_number, load_graph, run_experiment, save_graph, summary_path, ExperimentConfig};
use gbs_dks::rng::seeded;
use gbs_dks::sampler::{enumerate_subspace, optimize_scaling};
use gbs_dks::{Error, Graph, Result};

/// Gaussian boson sampling emulator for densest-k-subgraph experiments.
#[derive(Parser, Debug)]
#[command(name = "gbs-dks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an Erdős–Rényi graph, optionally with a planted clique.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plant a clique on this many random vertices.
        #[arg(long)]
        clique: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report the scaling bound and squeezing of a graph embedding.
    Embed {
        #[arg(long)]
        graph: PathBuf,
        /// Scaling parameter; tuned for `--k` clicks at `--loss` when omitted.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
    },
    /// Exact k-click distribution as CSV.
    Dist {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Scaling parameter; tuned for `k` clicks at the given loss when omitted.
        #[arg(long)]
        c: Option<f64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file, overriding `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Density of the greedy peeling baseline.
    Greedy {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args, Debug)]
struct NoiseArgs {
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Source profile as `l,b,P`.
    #[arg(long, value_parser = parse_purity)]
    purity: Option<(usize, f64, f64)>,
}

fn parse_purity(s: &str) -> std::result::Result<(usize, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected l,b,P".into());
    }
    let l = parts[0].parse().map_err(|e| format!("l: {e}"))?;
    let b = parts[1].parse().map_err(|e| format!("b: {e}"))?;
    let p = parts[2].parse().map_err(|e| format!("P: {e}"))?;
    Ok((l, b, p))
}

impl NoiseArgs {
    fn resolve(&self) -> Result<NoiseConfig> {
        let profile = match self.purity {
            Some((l, b, p)) => Some(schmidt_profile(l, b, p)?),
            None => None,
        };
        NoiseConfig::new(self.loss, profile)
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    load_graph(path).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
        other => other,
    })
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Gen { n, rho, seed, clique, out: path } => {
            let mut g = erdos_renyi_seeded(n, rho, seed)?;
            if let Some(size) = clique {
                let mut rng = seeded(seed ^ 0x636c_6971_7565);
                g = plant_random_clique(&g, size, &mut rng)?.0;
            }
            save_graph(&g, &path)?;
            writeln!(out, "wrote {} (n={}, edges={}, density={})", path.display(), g.n(), g.edge_count(), format_number(density(&g)?))?;
        }
        Command::Embed { graph, c, k, loss } => {
            let g = read_graph(&graph)?;
            let bound = scaling_bound(&g);
            let c = match (c, k) {
                (Some(c), None) => c,
                (None, Some(k)) => optimize_scaling(&g, k, loss)?.c,
                _ => return Err(Error::Config("give exactly one of --c and --k".into())),
            };
            let state = embed_graph(&g, c)?;
            let factors = bloch_messiah(&williamson_pure(&state)?)?;
            let mut tanh = factors.squeezers.tanh();
            tanh.sort_by(|a, b| b.total_cmp(a));
            let mut t: Vec<f64> = adjacency_spectrum(&g).iter().map(|l| c * l.abs()).collect();
            t.sort_by(|a, b| b.total_cmp(a));
            writeln!(out, "# bound={} c={}", format_number(bound), format_number(c))?;
            writeln!(out, "mode,t,tanh_r")?;
            for (i, (t, r)) in t.iter().zip(&tanh).enumerate() {
                writeln!(out, "{i},{},{}", format_number(*t), format_number(*r))?;
            }
        }
        Command::Dist { graph, k, noise, c, out: path } => {
            let g = read_graph(&graph)?;
            let noise = noise.resolve()?;
            let c = match c {
                Some(c) => c,
                None => optimize_scaling(&g, k, noise.loss())?.c,
            };
            let mut state = embed_graph(&g, c)?;
            if let Some(profile) = noise.schmidt() {
                state = expand_spectral(&state, profile)?;
            }
            let state = apply_uniform_loss(&state, noise.loss())?;
            let dist = enumerate_subspace(&state, k)?;
            let header = format!("# c={} mass={}\n", format_number(c), format_number(dist.norm()));
            match path {
                Some(p) => {
                    let mut buf = header.into_bytes();
                    dist.write_csv(&mut buf)?;
                    std::fs::write(p, buf)?;
                }
                None => {
                    out.write_all(header.as_bytes())?;
                    dist.write_csv(&mut out)?;
                }
            }
        }
        Command::Run { config, out: path, workers } => {
            let cfg = ExperimentConfig::load(&config)?;
            let path = path
                .or_else(|| cfg.out.clone())
                .ok_or_else(|| Error::Config("no output path; set `out` or pass --out".into()))?;
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            info!("running {:?} on {workers} workers", cfg.kind);
            let result = run_experiment(&cfg, workers)?;
            result.write(&path)?;
            writeln!(out, "wrote {}", path.display())?;
            if result.summary.is_some() {
                writeln!(out, "wrote {}", summary_path(&path).display())?;
            }
            for p in result.noise_points.iter().filter(|p| p.warning) {
                eprintln!(
                    "warning: k clicks are not the most likely count within the scaling bound (n={}, loss={})",
                    p.n,
                    format_number(p.noise.loss())
                );
            }
        }
        Command::Greedy { graph, k } => {
            let g = read_graph(&graph)?;
            let sel = greedy_peel(&g, k)?;
            writeln!(out, "{}", format_number(g.density_of(sel.vertices())))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
