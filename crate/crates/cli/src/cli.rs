//! Command-line interface.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use moqubo_core::qap::{generate_instance, parse_instance, write_instance, QapInstance};

use crate::compare::{compare_results, render_tables, write_comparison};
use crate::config::{AcceptanceArg, Algorithm, ArchiveArg, PartialConfig};
use crate::enumerate::{enumerate_front, DEFAULT_CAP};
use crate::output::{front_csv_with_permutations, load_result_dir, read_front_points, write_run_set};
use crate::run::run_all;

#[derive(Debug, Parser)]
#[command(name = "moqubo", version, about = "Multi-objective QUBO annealing benchmarks on bi-objective QAP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm over a range of seeds and write fronts and metrics.
    Run(RunArgs),
    /// Compare result directories produced on the same instance.
    Compare(CompareArgs),
    /// Enumerate the true Pareto front of a small instance.
    Enumerate(EnumerateArgs),
    /// Generate a random correlated instance.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Instance file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    pub instance: Option<PathBuf>,
    /// Generate the instance in memory from `N:RHO:SEED`.
    #[arg(long, value_name = "N:RHO:SEED")]
    pub generate: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// TOML file with any of the tunables below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "algo", value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long, value_enum)]
    pub acceptance: Option<AcceptanceArg>,
    #[arg(long, value_enum)]
    pub archive_policy: Option<ArchiveArg>,
    /// Scale objective QUBOs to a maximum coefficient of 2^23.
    #[arg(long, overrides_with = "no_normalize")]
    pub normalize: bool,
    #[arg(long, overrides_with = "normalize")]
    pub no_normalize: bool,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Seed of run 0; run i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub i_max: Option<u64>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub delta_f: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Choose the decay so the temperature reaches its floor after this
    /// fraction of the iterations. Excludes --xi.
    #[arg(long)]
    pub cooling_fraction: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Comma-separated scalarisation weights in [0, 1].
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    /// 1-based objective optimised by `--algo da`.
    #[arg(long)]
    pub objective: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "MOQUBO_JOBS")]
    pub jobs: Option<usize>,
    /// Known front (`c1,c2` lines) included in the normalisation bounds.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also write per-iteration traces.
    #[arg(long)]
    pub trace: bool,
}

impl RunArgs {
    pub fn flags(&self) -> PartialConfig {
        let normalize = if self.normalize {
            Some(true)
        } else if self.no_normalize {
            Some(false)
        } else {
            None
        };
        PartialConfig {
            algorithm: self.algorithm,
            acceptance: self.acceptance,
            archive_policy: self.archive_policy,
            normalize,
            runs: self.runs,
            seed: self.seed,
            i_max: self.i_max,
            delta0: self.delta0,
            delta_f: self.delta_f,
            xi: self.xi,
            beta: self.beta,
            capacity: self.capacity,
            gammas: self.gammas.clone(),
            objective: self.objective,
            cooling_fraction: self.cooling_fraction,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Result directories written by `run`.
    #[arg(required = true, num_args = 2..)]
    pub dirs: Vec<PathBuf>,
    /// Known front included in the normalisation bounds and reported.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Directory for compare_runs.csv and compare_summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Largest n accepted.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Correlation between the two flow matrices, in [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub objectives: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_instance(path: &Path) -> Result<QapInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading instance {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing instance {}", path.display()))
}

/// Parses `N:RHO:SEED`.
pub fn parse_generator_spec(spec: &str) -> Result<(usize, f64, u64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [n, rho, seed] = parts.as_slice() else {
        bail!("generator spec `{spec}` must look like N:RHO:SEED");
    };
    Ok((
        n.parse().with_context(|| format!("bad N in `{spec}`"))?,
        rho.parse().with_context(|| format!("bad RHO in `{spec}`"))?,
        seed.parse().with_context(|| format!("bad SEED in `{spec}`"))?,
    ))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let inst = match (&args.instance, &args.generate) {
        (Some(p), _) => load_instance(p)?,
        (None, Some(spec)) => {
            let (n, rho, seed) = parse_generator_spec(spec)?;
            generate_instance(n, 2, rho, seed)?
        }
        (None, None) => bail!("either --instance or --generate is required"),
    };
    let file = match &args.config {
        Some(p) => PartialConfig::from_toml_file(p)?,
        None => PartialConfig::default(),
    };
    let config = args.flags().or(file).resolve(inst.qubo_size())?;
    let reference = args.reference.as_deref().map(read_front_points).transpose()?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let set = run_all(&inst, &config, jobs, reference.as_deref(), args.trace)?;
    let agg = write_run_set(&args.out, &inst, &set, args.trace)?;
    eprintln!(
        "{}: {} runs, mean front size {:.2}, union front {} points{}",
        agg.label,
        agg.runs.len(),
        agg.summary.front_size_mean,
        agg.union_front.len(),
        agg.union_hypervolume.map(|h| format!(", union hypervolume {h:.4}")).unwrap_or_default()
    );
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let results = args.dirs.iter().map(|d| load_result_dir(d)).collect::<Result<Vec<_>>>()?;
    let reference = args.reference.as_deref().map(read_front_points).transpose()?;
    let cmp = compare_results(&results, reference.as_deref())?;
    print!("{}", render_tables(&cmp));
    if let Some(dir) = &args.out {
        write_comparison(dir, &cmp, &results)?;
    }
    Ok(())
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let front = enumerate_front(&inst, args.cap)?;
    emit(args.out.as_deref(), &front_csv_with_permutations(&front))
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    let inst = generate_instance(args.n, args.objectives, args.rho, args.seed)?;
    emit(args.out.as_deref(), &write_instance(&inst))
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Gen(a) => cmd_gen(a),
    }
}
