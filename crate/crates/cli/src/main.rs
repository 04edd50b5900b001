mod config;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use pidf_core::benchmark::{run_benchmark, BenchConfig, BenchRow};
use pidf_core::datasets::{self, DatasetId, GeneratorSpec, TercRule};
use pidf_core::oracle::{check_theorems, oracle_pidf, JointTable, THEOREM_CAP};
use pidf_core::pidf::{default_eps_zero, run_pidf, DEFAULT_ALPHA};
use pidf_core::report::{render_svg, ReportJson};
use pidf_core::selection::select_features;
use pidf_core::{
    Dataset, Error, ErrorClass, EstimatorConfig, MineConfig, PidfConfig, Unit, ValidateOptions,
};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "pidf",
    version,
    about = "Feature-wise information decomposition and selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Decompose every feature of a dataset and select a subset.
    Analyze(AnalyzeArgs),
    /// Selection accuracy on the synthetic benchmark datasets.
    Bench(BenchArgs),
    /// Check a small discrete dataset against the exhaustive oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row.
    input: Option<PathBuf>,
    /// Generate this synthetic dataset instead of reading a file.
    #[arg(long)]
    dataset: Option<String>,
    /// Rows to generate.
    #[arg(long)]
    n: Option<usize>,
    /// Generator seed, also the base seed for estimator repetitions.
    #[arg(long)]
    seed: Option<u64>,
    /// TERC target rule: all_equal or last_pair.
    #[arg(long)]
    terc_rule: Option<TercRule>,
    /// Append a copy of this feature (repeatable).
    #[arg(long)]
    dup: Vec<usize>,
    /// Name of the target column in CSV input.
    #[arg(long)]
    target: Option<String>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EstimatorArgs {
    /// exact, binned, ksg or mine. Defaults to exact for discrete data, ksg otherwise.
    #[arg(long)]
    estimator: Option<Choice>,
    /// Repetitions per estimate.
    #[arg(long)]
    reps: Option<usize>,
    /// Significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Dead band in nats for deterministic estimates. Defaults per estimator.
    #[arg(long)]
    eps_zero: Option<f64>,
    /// nats or bits.
    #[arg(long)]
    units: Option<Unit>,
    /// KSG neighbour count.
    #[arg(long)]
    k: Option<usize>,
    /// Bins per continuous column for the binned estimator.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    mine_iterations: Option<usize>,
    #[arg(long)]
    mine_batch: Option<usize>,
    #[arg(long)]
    mine_lr: Option<f64>,
    #[arg(long)]
    mine_hidden: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    est: EstimatorArgs,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the stacked bar chart here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated dataset names; the eight benchmark datasets by default.
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<DatasetId>,
    /// Number of seeds, starting at --first-seed.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = datasets::DEFAULT_SAMPLES)]
    n: usize,
    /// Override the per-dataset default estimator.
    #[arg(long)]
    estimator: Option<Choice>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps_zero: Option<f64>,
    /// Write every per-seed outcome as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Exact,
    Binned,
    Ksg,
    Mine,
}

impl FromStr for Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Choice::Exact),
            "binned" => Ok(Choice::Binned),
            "ksg" => Ok(Choice::Ksg),
            "mine" => Ok(Choice::Mine),
            other => Err(Error::Config(format!(
                "unknown estimator `{other}` (expected exact, binned, ksg or mine)"
            ))),
        }
    }
}

struct Loaded {
    data: Dataset,
    source: String,
    seed: u64,
}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    Error::Config(msg.into()).into()
}

impl DataArgs {
    fn load(&self, file: &FileConfig) -> anyhow::Result<Loaded> {
        let input: Option<PathBuf> = file.pick(self.input.clone(), "input")?;
        let dataset: Option<DatasetId> = match &self.dataset {
            Some(name) => Some(name.parse()?),
            None => file.pick(None, "dataset")?,
        };
        let seed = file.pick(self.seed, "seed")?.unwrap_or(0);
        let (mut data, mut source) = match (input, dataset) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "give either an input file or --dataset, not both",
                ))
            }
            (None, None) => return Err(config_err("no input: give a CSV path or --dataset")),
            (Some(path), None) => {
                let opts = ValidateOptions {
                    target: file
                        .pick(self.target.clone(), "target")?
                        .unwrap_or_else(|| "target".to_string()),
                    ..ValidateOptions::default()
                };
                let data = pidf_core::io::read_dataset_path(&path, &opts)
                    .with_context(|| format!("reading {}", path.display()))?;
                (data, path.display().to_string())
            }
            (None, Some(id)) => {
                let spec = GeneratorSpec {
                    id,
                    n_samples: file.pick(self.n, "n")?.unwrap_or(datasets::DEFAULT_SAMPLES),
                    seed,
                    terc_rule: file.pick(self.terc_rule, "terc-rule")?.unwrap_or_default(),
                };
                let data = datasets::generate(&spec)?;
                (
                    data,
                    format!("generated:{} n={} seed={}", id, spec.n_samples, seed),
                )
            }
        };
        for index in file.pick_list(self.dup.clone(), "dup")? {
            data = datasets::duplicate_feature(&data, index)?;
            source.push_str(&format!(" dup={index}"));
        }
        Ok(Loaded { data, source, seed })
    }
}

impl EstimatorArgs {
    fn build(
        &self,
        file: &FileConfig,
        data: &Dataset,
        seed: u64,
    ) -> anyhow::Result<EstimatorConfig> {
        let choice: Option<Choice> = file.pick(self.estimator, "estimator")?;
        let base = match choice {
            None => EstimatorConfig::default_for(data),
            Some(Choice::Exact) => EstimatorConfig::exact(),
            Some(Choice::Ksg) => EstimatorConfig::ksg(
                file.pick(self.k, "k")?
                    .unwrap_or(pidf_core::estimators::DEFAULT_KSG_K),
            ),
            Some(Choice::Binned) => EstimatorConfig::binned(
                file.pick(self.bins, "bins")?
                    .unwrap_or(pidf_core::estimators::DEFAULT_BINS),
            ),
            Some(Choice::Mine) => {
                let d = MineConfig::default();
                EstimatorConfig::mine(MineConfig {
                    iterations: file
                        .pick(self.mine_iterations, "mine-iterations")?
                        .unwrap_or(d.iterations),
                    batch_size: file
                        .pick(self.mine_batch, "mine-batch")?
                        .unwrap_or(d.batch_size),
                    learning_rate: file
                        .pick(self.mine_lr, "mine-lr")?
                        .unwrap_or(d.learning_rate),
                    hidden: file
                        .pick(self.mine_hidden, "mine-hidden")?
                        .unwrap_or(d.hidden),
                    ..d
                })
            }
        };
        let reps = file
            .pick(self.reps, "reps")?
            .unwrap_or(pidf_core::estimators::DEFAULT_REPETITIONS);
        Ok(base.with_repetitions(reps).with_seed(seed))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(Error::from)
            .with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(Error::from)?,
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    if args.data.input.is_some() {
        bail!(config_err("gen takes --dataset, not an input file"));
    }
    let loaded = args.data.load(&file)?;
    let out: Option<PathBuf> = file.pick(args.out.clone(), "out")?;
    let mut buf = Vec::new();
    pidf_core::io::write_dataset(&loaded.data, &mut buf)?;
    write_output(out.as_deref(), &String::from_utf8(buf)?)?;
    info!(
        "wrote {} rows of {}",
        loaded.data.n_samples(),
        loaded.source
    );
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let loaded = args.data.load(&file)?;
    let estimator = args.est.build(&file, &loaded.data, loaded.seed)?;
    let alpha = file.pick(args.est.alpha, "alpha")?.unwrap_or(DEFAULT_ALPHA);
    let eps_zero = match file.pick(args.est.eps_zero, "eps-zero")? {
        Some(e) => e,
        None => default_eps_zero(&loaded.data, &estimator, alpha),
    };
    let unit = file.pick(args.est.units, "units")?.unwrap_or_default();
    let cfg = PidfConfig {
        alpha,
        eps_zero,
        unit,
        ..PidfConfig::new(estimator)
    };
    info!(
        "analysing {} ({} features, {} rows) with {} x{}, eps_zero {eps_zero:.4}",
        loaded.source,
        loaded.data.n_features(),
        loaded.data.n_samples(),
        cfg.estimator.kind.name(),
        cfg.estimator.repetitions
    );
    let (report, _trace) = run_pidf(&loaded.data, &cfg)?;
    let selection = select_features(&report, alpha, eps_zero);
    let json = ReportJson::build(&report, &selection, loaded.source).to_json();
    let out: Option<PathBuf> = file.pick(args.out.clone(), "out")?;
    write_output(out.as_deref(), &json)?;
    if let Some(svg) = file.pick::<PathBuf>(args.svg.clone(), "svg")? {
        write_output(Some(&svg), &render_svg(&report))?;
    }
    Ok(())
}

struct Counts([usize; 4]);

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [tp, fp, tn, fn_] = self.0;
        write!(f, "{tp}/{fp}/{tn}/{fn_}")
    }
}

fn print_bench(rows: &[BenchRow]) {
    println!(
        "{:<8} {:>5} {:>5} {:>5} {:>5}  {:<9} matching",
        "dataset", "TP", "FP", "TN", "FN", "expected"
    );
    for row in rows {
        let [tp, fp, tn, fn_] = row.mean;
        let expected = row.expected.map_or("-".to_string(), |c| {
            let (a, b, c, d) = c.as_tuple();
            Counts([a, b, c, d]).to_string()
        });
        println!(
            "{:<8} {tp:>5.2} {fp:>5.2} {tn:>5.2} {fn_:>5.2}  {expected:<9} {}/{}",
            row.id.name(),
            row.matching,
            row.outcomes.len()
        );
    }
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let ids = if args.datasets.is_empty() {
        DatasetId::BENCHMARK.to_vec()
    } else {
        args.datasets.clone()
    };
    let estimator = match args.estimator {
        None => None,
        Some(Choice::Exact) => Some(EstimatorConfig::exact()),
        Some(Choice::Ksg) => Some(EstimatorConfig::ksg(
            args.k.unwrap_or(pidf_core::estimators::DEFAULT_KSG_K),
        )),
        Some(Choice::Binned) => Some(EstimatorConfig::binned(
            args.bins.unwrap_or(pidf_core::estimators::DEFAULT_BINS),
        )),
        Some(Choice::Mine) => Some(EstimatorConfig::mine(MineConfig::default())),
    };
    let cfg = BenchConfig {
        n_samples: args.n,
        estimator,
        alpha: args.alpha.unwrap_or(DEFAULT_ALPHA),
        eps_zero: args.eps_zero,
        ..BenchConfig::new((args.first_seed..args.first_seed + args.seeds).collect())
    };
    let rows = run_benchmark(&ids, &cfg)?;
    print_bench(&rows);
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n";
        write_output(Some(path), &json)?;
    }
    Ok(())
}

fn subsets(list: &[pidf_core::FeatureSubset]) -> String {
    list.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Returns whether every theorem check passed.
fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let loaded = args.data.load(&file)?;
    let table = JointTable::from_dataset(&loaded.data)?;
    let oracle = oracle_pidf(&table)?;
    println!(
        "{}: {} features, {} rows",
        loaded.source,
        loaded.data.n_features(),
        loaded.data.n_samples()
    );

    let mut passed = true;
    if loaded.data.n_features() <= THEOREM_CAP {
        let t = check_theorems(&table)?;
        println!(
            "identity residual max |MCI - FWR - OCI|: {:.3e}",
            t.max_identity_residual
        );
        println!(
            "theta bounds over {} triples: {} upper violations, {} lower violations",
            t.triples, t.upper_violations, t.lower_violations
        );
        println!(
            "lower-bound assumption fails on {} triples ({} of them breach the bound)",
            t.assumption_failures, t.lower_breaches_without_assumption
        );
        passed = t.passed();
    } else {
        println!("theorem checks skipped: more than {THEOREM_CAP} features");
    }

    let cfg = PidfConfig::new(EstimatorConfig::exact().with_seed(loaded.seed));
    let (report, _) = run_pidf(&loaded.data, &cfg)?;
    let names = loaded.data.feature_names();
    println!(
        "{:<10} {:>10} {:>12} {:>12} {:>10}  maximizers",
        "feature", "mi", "fws oracle", "fws pidf", "delta"
    );
    for (o, h) in oracle.iter().zip(&report.features) {
        println!(
            "{:<10} {:>10.6} {:>12.6} {:>12.6} {:>10.2e}  {}",
            names[o.feature],
            o.mi,
            o.fws,
            h.fws,
            h.fws - o.fws,
            subsets(&o.maximizers)
        );
    }
    println!(
        "{}",
        if passed {
            "verify: ok"
        } else {
            "verify: FAILED"
        }
    );
    Ok(passed)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let class = err
        .chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map(Error::class);
    match class {
        Some(ErrorClass::Config) => 2,
        Some(ErrorClass::Ingestion) => 3,
        Some(ErrorClass::Estimator) => 4,
        Some(ErrorClass::OracleCap) => 5,
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PIDF_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Analyze(a) => cmd_analyze(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
