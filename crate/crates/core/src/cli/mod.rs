//! The `gar` command line: `discretize`, `mine`, `sweep` and `stats`.
//!
//! Errors are printed to stderr as one JSON object per failure and mapped to
//! exit codes: 0 success, 1 usage, 2 data, 3 internal.

pub mod output;
pub mod pipeline;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::dataio::{write_generic, SchemaConfig, WriteOptions};
use crate::discretize::DiscretizerRegistry;
use crate::error::{Error, Result};
use crate::measures::Thresholds;
use crate::miner::{count_summary, mine_with_threads, MiningResult};
use crate::model::Mmer;
use output::{grid_csv, rules_jsonl, tool_version, write_file, write_json, RunConfig, RunReport};
use pipeline::{apply_plan, load_dataset, DatasetConfig, Loaded, Plan, SideChains, SpecFile};
use sweep::{parse_range, run_sweep, DatasetSource, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gar", version, about = "Granular association rule mining over two-table relational data")]
pub struct Cli {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reserved; every command is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretize numeric columns and write the tables in the generic format.
    Discretize(DiscretizeArgs),
    /// Mine rules and write rules.jsonl plus report.json.
    Mine(MineArgs),
    /// Count candidates and rules over a grid of interval numbers.
    Sweep(SweepArgs),
    /// Print a JSON summary of a dataset.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct DatasetArgs {
    /// Schema file describing a generic two-table dataset.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Directory holding u.user, u.item and u.data.
    #[arg(long)]
    pub movielens_dir: Option<PathBuf>,
}

impl DatasetArgs {
    fn source(&self) -> DatasetSource {
        match (&self.schema, &self.movielens_dir) {
            (Some(schema), _) => DatasetSource::Generic { schema: schema.clone() },
            (None, Some(dir)) => DatasetSource::Movielens { data_dir: dir.clone() },
            (None, None) => unreachable!("clap requires one dataset flag"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DiscretizationArgs {
    /// equal_width, equal_frequency, manual or none (aliases: width, ew, frequency, ef).
    #[arg(long, conflicts_with = "spec")]
    pub method: Option<String>,
    /// Interval number for both sides.
    #[arg(long)]
    pub k: Option<usize>,
    /// Interval number for source-side numeric columns.
    #[arg(long)]
    pub k1: Option<usize>,
    /// Interval number for target-side numeric columns.
    #[arg(long)]
    pub k2: Option<usize>,
    /// TOML file with `[[source]]` and `[[target]]` discretizer entries.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Minimal source coverage.
    #[arg(long)]
    pub ms: String,
    /// Minimal target coverage.
    #[arg(long)]
    pub mt: String,
    /// Minimal source confidence.
    #[arg(long)]
    pub mc: String,
    /// Minimal target confidence.
    #[arg(long)]
    pub tc: String,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Result<Thresholds> {
        Thresholds::parse(&self.ms, &self.mt, &self.mc, &self.tc).map_err(usage)
    }
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub discretization: DiscretizationArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "mine_dataset", multiple = false)]
pub struct MineArgs {
    /// Schema file describing a generic two-table dataset.
    #[arg(long, group = "mine_dataset", required_unless_present_any = ["movielens_dir", "from_report"])]
    pub schema: Option<PathBuf>,
    /// Directory holding u.user, u.item and u.data.
    #[arg(long, group = "mine_dataset")]
    pub movielens_dir: Option<PathBuf>,
    #[command(flatten)]
    pub discretization: DiscretizationArgs,
    /// Minimal source coverage.
    #[arg(long, required_unless_present = "from_report")]
    pub ms: Option<String>,
    /// Minimal target coverage.
    #[arg(long, required_unless_present = "from_report")]
    pub mt: Option<String>,
    /// Minimal source confidence.
    #[arg(long, required_unless_present = "from_report")]
    pub mc: Option<String>,
    /// Minimal target confidence.
    #[arg(long, required_unless_present = "from_report")]
    pub tc: Option<String>,
    /// Rerun the configuration recorded in a previous report.json.
    #[arg(long, conflicts_with_all = ["schema", "movielens_dir", "method", "k", "k1", "k2", "spec", "ms", "mt", "mc", "tc"])]
    pub from_report: Option<PathBuf>,
    /// Output directory for rules.jsonl and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

impl MineArgs {
    fn dataset(&self) -> Option<DatasetArgs> {
        (self.schema.is_some() || self.movielens_dir.is_some()).then(|| DatasetArgs {
            schema: self.schema.clone(),
            movielens_dir: self.movielens_dir.clone(),
        })
    }

    fn thresholds(&self) -> Option<ThresholdArgs> {
        Some(ThresholdArgs {
            ms: self.ms.clone()?,
            mt: self.mt.clone()?,
            mc: self.mc.clone()?,
            tc: self.tc.clone()?,
        })
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Comma-separated methods, e.g. `equal_width,equal_frequency`.
    #[arg(long, default_value = "equal_width,equal_frequency")]
    pub method: String,
    /// Source-side interval numbers, `a..b` inclusive or a single value.
    #[arg(long)]
    pub k1: String,
    /// Target-side interval numbers, `a..b` inclusive or a single value.
    #[arg(long)]
    pub k2: String,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Output directory for grid.csv and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
}

fn usage(e: Error) -> Error {
    match e {
        Error::Parameter(_) => e,
        other => Error::Parameter(other.to_string()),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

/// Single-line JSON error record.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    })
    .to_string()
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `stdout`, error records to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let record = serde_json::json!({
                    "error": "usage",
                    "message": text.lines().next().unwrap_or_default(),
                    "exit_code": EXIT_USAGE,
                });
                let _ = writeln!(stderr, "{record}");
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let invocation: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &invocation, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_record(&e));
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, invocation: &[String], stdout: &mut dyn Write) -> Result<()> {
    let registry = DiscretizerRegistry::with_builtins();
    match &cli.command {
        Command::Discretize(args) => cmd_discretize(args, invocation, &registry),
        Command::Mine(args) => cmd_mine(args, cli, invocation, &registry).map(|_| ()),
        Command::Sweep(args) => cmd_sweep(args, cli, invocation, &registry),
        Command::Stats(args) => cmd_stats(args, stdout),
    }
}

fn resolve_plan(
    args: &DiscretizationArgs,
    dataset: &DatasetConfig,
    loaded: &Loaded,
    registry: &DiscretizerRegistry,
) -> Result<Plan> {
    if let Some(spec) = &args.spec {
        return Ok(Plan::from_spec(SpecFile::from_path(spec)?));
    }
    let method = args
        .method
        .as_deref()
        .ok_or_else(|| Error::Parameter("give --method or --spec".into()))?;
    Plan::uniform(
        dataset,
        &loaded.mmer,
        method,
        args.k1.or(args.k),
        args.k2.or(args.k),
        registry,
    )
}

fn dataset_config(args: &DatasetArgs, discretization: &DiscretizationArgs) -> DatasetConfig {
    let method = discretization.method.as_deref().unwrap_or_default();
    let canonical = DiscretizerRegistry::with_builtins()
        .get(method)
        .map(|d| d.name())
        .unwrap_or(method);
    args.source().config_for(canonical)
}

fn report(
    command: &str,
    invocation: &[String],
    config: RunConfig,
    loaded: &Loaded,
    chains: SideChains,
    started: Instant,
) -> RunReport {
    let mut warnings = loaded.warnings.clone();
    warnings.extend(chains.warnings());
    RunReport {
        tool: tool_version(),
        command: command.into(),
        invocation: invocation.to_vec(),
        config,
        inputs: loaded.inputs.clone(),
        dataset: loaded.stats.clone(),
        chains,
        counts: None,
        k_floor_clamps: 0,
        warnings,
        outputs: Vec::new(),
        wall_time_ms: started.elapsed().as_millis() as u64,
    }
}

fn write_options(dataset: &DatasetConfig) -> Result<WriteOptions> {
    Ok(match dataset {
        DatasetConfig::Generic { schema } => {
            let schema = SchemaConfig::from_path(schema)?;
            WriteOptions {
                source_id: schema.id_column(true).to_string(),
                target_id: schema.id_column(false).to_string(),
                ..WriteOptions::default()
            }
        }
        DatasetConfig::Movielens(_) => WriteOptions {
            source_id: "user_id".into(),
            target_id: "movie_id".into(),
            source_file: "users.csv".into(),
            target_file: "movies.csv".into(),
            relation_file: "ratings.csv".into(),
        },
    })
}

pub fn cmd_discretize(args: &DiscretizeArgs, invocation: &[String], registry: &DiscretizerRegistry) -> Result<()> {
    let started = Instant::now();
    let dataset = dataset_config(&args.dataset, &args.discretization);
    let loaded = load_dataset(&dataset)?;
    let plan = resolve_plan(&args.discretization, &dataset, &loaded, registry)?;
    let (mmer, chains) = apply_plan(&loaded.mmer, &plan, registry)?;
    let schema = write_generic(&mmer, &args.out, &write_options(&dataset)?)?;
    let config = RunConfig {
        dataset,
        plan,
        thresholds: None,
    };
    let mut rep = report("discretize", invocation, config, &loaded, chains, started);
    rep.outputs.push(output::OutputFile {
        sha256: crate::dataio::file_sha256(&schema)?,
        path: schema,
    });
    write_json(&args.out.join("report.json"), &rep)?;
    Ok(())
}

/// Result of one `mine` run, kept for callers that want more than the files.
#[derive(Debug)]
pub struct MineOutcome {
    pub mmer: Mmer,
    pub result: MiningResult,
    pub report: RunReport,
}

/// Loads, discretizes and mines as described by `config`, then writes
/// `rules.jsonl` and `report.json` into `out`.
pub fn mine_to_dir(
    config: RunConfig,
    out: &Path,
    threads: Option<usize>,
    invocation: &[String],
    registry: &DiscretizerRegistry,
) -> Result<MineOutcome> {
    let started = Instant::now();
    let thresholds = config
        .thresholds
        .ok_or_else(|| Error::Parameter("mining needs thresholds".into()))?;
    let loaded = load_dataset(&config.dataset)?;
    let (mmer, chains) = apply_plan(&loaded.mmer, &config.plan, registry)?;
    let result = mine_with_threads(&mmer, &thresholds, threads)?;
    let rules = write_file(&out.join("rules.jsonl"), rules_jsonl(&result.rules, &mmer)?.as_bytes())?;
    let mut rep = report("mine", invocation, config, &loaded, chains, started);
    rep.counts = Some(count_summary(&result));
    rep.k_floor_clamps = result.k_floor_clamps;
    if result.k_floor_clamps > 0 {
        rep.warnings.push(format!(
            "{} candidate pairs had floor(mc * |LH|) = 0; their K was read at rank 1",
            result.k_floor_clamps
        ));
    }
    rep.outputs.push(rules);
    rep.wall_time_ms = started.elapsed().as_millis() as u64;
    write_json(&out.join("report.json"), &rep)?;
    Ok(MineOutcome {
        mmer,
        result,
        report: rep,
    })
}

pub fn cmd_mine(
    args: &MineArgs,
    cli: &Cli,
    invocation: &[String],
    registry: &DiscretizerRegistry,
) -> Result<MineOutcome> {
    let config = match (&args.from_report, args.dataset(), args.thresholds()) {
        (Some(path), _, _) => {
            let previous = RunReport::from_path(path)?;
            let config = previous.config;
            let loaded = load_dataset(&config.dataset)?;
            for (now, then) in loaded.inputs.iter().zip(&previous.inputs) {
                if now.sha256 != then.sha256 {
                    return Err(Error::Data {
                        path: now.path.clone(),
                        row: None,
                        message: format!("input changed since the report (sha256 {} != {})", now.sha256, then.sha256),
                    });
                }
            }
            config
        }
        (None, Some(dataset_args), Some(thresholds)) => {
            let dataset = dataset_config(&dataset_args, &args.discretization);
            let loaded = load_dataset(&dataset)?;
            let plan = resolve_plan(&args.discretization, &dataset, &loaded, registry)?;
            RunConfig {
                dataset,
                plan,
                thresholds: Some(thresholds.thresholds()?),
            }
        }
        _ => {
            return Err(Error::Parameter(
                "mine needs --schema or --movielens-dir plus --ms --mt --mc --tc, or --from-report".into(),
            ))
        }
    };
    mine_to_dir(config, &args.out, cli.threads, invocation, registry)
}

#[derive(serde::Serialize)]
struct SweepReport<'a> {
    tool: String,
    command: &'static str,
    invocation: &'a [String],
    dataset: &'a DatasetSource,
    config: &'a SweepConfig,
    outputs: Vec<output::OutputFile>,
    wall_time_ms: u64,
}

pub fn cmd_sweep(args: &SweepArgs, cli: &Cli, invocation: &[String], registry: &DiscretizerRegistry) -> Result<()> {
    let started = Instant::now();
    let config = SweepConfig {
        methods: args.method.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect(),
        k1: parse_range(&args.k1)?,
        k2: parse_range(&args.k2)?,
        thresholds: args.thresholds.thresholds()?,
    };
    let source = args.dataset.source();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| run_sweep(&source, &config, registry))?;
    let grid = write_file(&args.out.join("grid.csv"), grid_csv(&rows)?.as_bytes())?;
    let report = SweepReport {
        tool: tool_version(),
        command: "sweep",
        invocation,
        dataset: &source,
        config: &config,
        outputs: vec![grid],
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    write_json(&args.out.join("report.json"), &report)?;
    Ok(())
}

pub fn cmd_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<()> {
    let dataset = args.dataset.source().config_for("");
    let loaded = load_dataset(&dataset)?;
    let side = |is: &crate::model::InformationSystem| {
        let attributes: Vec<serde_json::Value> = is
            .attributes()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                serde_json::json!({
                    "name": a.name,
                    "kind": a.kind,
                    "distinct_values": is.value_blocks(i).len(),
                })
            })
            .collect();
        serde_json::json!({ "objects": is.len(), "attributes": attributes })
    };
    let summary = serde_json::json!({
        "source": side(&loaded.mmer.source),
        "target": side(&loaded.mmer.target),
        "relation_pairs": loaded.mmer.relation.pair_count(),
        "dataset": loaded.stats,
        "inputs": loaded.inputs,
        "warnings": loaded.warnings,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(stdout, "{text}").map_err(|e| Error::io("<stdout>", e))
}
