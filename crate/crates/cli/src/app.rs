//! Command-line driver. Option precedence is flags over config-file entries
//! over built-in defaults; the config file is a plain `key=value` listing.

use std::collections::HashMap;
use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrt_core::exec::{self, Parallelism};
use rrt_core::functionals::FunctionalRecord;
use rrt_core::limits::{fixed_point_rhs, LimitTree, SeriesConfig};
use rrt_core::oracle;
use rrt_core::rng::StreamKey;
use rrt_core::stats::ks_two_sample;
use rrt_core::verify;
use rrt_core::HarrisTree;

type DynError = Box<dyn Error>;

#[derive(Parser)]
#[command(
    name = "rrt",
    version,
    about = "Random recursive tree laboratory: exact enumeration, seeded simulation, limit-object sampling, verification"
)]
struct Cli {
    /// key=value config file; flags take precedence over its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// worker threads (default: RRT_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distribution of a functional over all trees of size n
    Enumerate(EnumerateArgs),
    /// Exact joint (tpl, hpl) counts over all trees of size n
    JointTable(JointTableArgs),
    /// Sample functional records of grown trees, one CSV row per replication
    Simulate(SimulateArgs),
    /// Sample the limit series (y, z, w) per replication
    Limits(LimitsArgs),
    /// Distributional fixed-point and symmetry diagnostics
    FixedPoint(FixedPointArgs),
    /// Run the verification suite; nonzero exit on failure
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: Option<u64>,
    /// tpl | hpl | wiener | tpl+hpl
    #[arg(long)]
    functional: Option<String>,
    /// output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JointTableArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LimitMode {
    Unconditional,
    Conditional,
    FromInput,
}

#[derive(Args)]
struct LimitsArgs {
    #[arg(long, value_enum)]
    mode: Option<LimitMode>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    weight_cut: Option<u64>,
    #[arg(long)]
    mass_floor: Option<f64>,
    /// cap on materialised sticks per node
    #[arg(long)]
    stick_cut: Option<usize>,
    /// conditional mode: JSON array of word strings, inline or a file path
    #[arg(long)]
    tree: Option<String>,
    /// from-input mode: CSV file with the input values
    #[arg(long)]
    input: Option<PathBuf>,
    /// column to read from --input
    #[arg(long)]
    input_column: Option<String>,
    /// from-input mode without --input: per-replication prefix length
    #[arg(long)]
    prefix_len: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixedPointArgs {
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    weight_cut: Option<u64>,
    #[arg(long)]
    mass_floor: Option<f64>,
    #[arg(long)]
    stick_cut: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    level: Option<VerifyLevel>,
    /// also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Plain key=value settings, lowest-precedence option source.
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, DynError> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| format!("config line {} is not key=value", lineno + 1))?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, DynError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| format!("config value {key}={raw} does not parse").into()),
        }
    }
}

/// flag > config > default
fn resolve<T: FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: T,
) -> Result<T, DynError> {
    Ok(flag.or(config.get(key)?).unwrap_or(default))
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, DynError> {
    let config = Config::load(cli.config.as_deref())?;
    let threads = match cli.threads.or(config.get("threads")?) {
        Some(t) => Some(t),
        None => std::env::var("RRT_THREADS")
            .ok()
            .map(|v| v.parse())
            .transpose()?,
    };
    exec::configure_threads(threads);
    let par = Parallelism::default();

    match cli.command {
        Command::Enumerate(args) => enumerate(args, &config, par),
        Command::JointTable(args) => joint_table(args, &config, par),
        Command::Simulate(args) => simulate(args, &config, par),
        Command::Limits(args) => limits(args, &config, par),
        Command::FixedPoint(args) => fixed_point(args, &config, par),
        Command::Verify(args) => do_verify(args, &config, par),
    }
}

fn parse_functional(name: &str) -> Result<oracle::Functional, DynError> {
    match name {
        "tpl" => Ok(oracle::Functional::Tpl),
        "hpl" => Ok(oracle::Functional::Hpl),
        "wiener" => Ok(oracle::Functional::Wiener),
        "tpl+hpl" | "comparisons" => Ok(oracle::Functional::Comparisons),
        other => Err(format!("unknown functional {other:?} (tpl, hpl, wiener, tpl+hpl)").into()),
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), DynError> {
    match path {
        Some(path) => fs::write(path, contents)
            .map_err(|e| format!("cannot write {}: {e}", path.display()).into()),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn enumerate(args: EnumerateArgs, config: &Config, par: Parallelism) -> Result<ExitCode, DynError> {
    let n = resolve(args.n, config, "n", 7)?;
    let name = resolve(args.functional, config, "functional", "tpl".to_string())?;
    let functional = parse_functional(&name)?;
    let dist = oracle::exact_dist(functional, n, par)?;
    let mut out = String::from("value,numerator,denominator\n");
    for (value, weight) in dist.support() {
        out.push_str(&format!("{value},{},{}\n", weight.numer(), weight.denom()));
    }
    write_output(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn joint_table(
    args: JointTableArgs,
    config: &Config,
    par: Parallelism,
) -> Result<ExitCode, DynError> {
    let n = resolve(args.n, config, "n", 7)?;
    let table = oracle::joint_table(n, par)?;
    let mut out = String::from("tpl,hpl,count\n");
    for ((tpl, hpl), count) in &table {
        out.push_str(&format!("{tpl},{hpl},{count}\n"));
    }
    write_output(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn require_at_least_one(value: u64, what: &str) -> Result<(), DynError> {
    if value >= 1 {
        Ok(())
    } else {
        Err(format!("{what} must be at least 1").into())
    }
}

fn simulate(args: SimulateArgs, config: &Config, par: Parallelism) -> Result<ExitCode, DynError> {
    let n = resolve(args.n, config, "n", 1000)?;
    let reps = resolve(args.reps, config, "reps", 100)?;
    let seed = resolve(args.seed, config, "seed", 0)?;
    require_at_least_one(n, "--n")?;
    require_at_least_one(reps, "--reps")?;
    let rows = exec::run_indexed(reps, par, |r| {
        rrt_core::functionals::sample_record(n, &mut StreamKey::replication(seed, r).stream())
            .csv_row()
    });
    let mut out = String::from(FunctionalRecord::csv_header());
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    write_output(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_tree(spec: &str) -> Result<HarrisTree, DynError> {
    let json = if spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| format!("cannot read tree file {spec}: {e}"))?
    };
    let tree: HarrisTree = serde_json::from_str(&json)?;
    Ok(tree)
}

fn read_input_column(path: &Path, column: &str) -> Result<Vec<f64>, DynError> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let index = reader
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| format!("input file has no column {column:?}"))?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        values.push(record[index].parse::<f64>()?);
    }
    Ok(values)
}

fn series_config(
    weight_cut: Option<u64>,
    mass_floor: Option<f64>,
    stick_cut: Option<usize>,
    config: &Config,
    default_floor: f64,
) -> Result<SeriesConfig, DynError> {
    let weight_cut = resolve(weight_cut, config, "weight_cut", 24)?;
    let mass_floor = resolve(mass_floor, config, "mass_floor", default_floor)?;
    let stick_cut = resolve(stick_cut, config, "stick_cut", 4096)?;
    require_at_least_one(stick_cut as u64, "--stick-cut")?;
    let mut cfg = SeriesConfig::default()
        .with_weight_cut(weight_cut)
        .with_mass_floor(mass_floor);
    cfg.max_sticks = stick_cut;
    Ok(cfg)
}

fn limits(args: LimitsArgs, config: &Config, par: Parallelism) -> Result<ExitCode, DynError> {
    let mode = args.mode.unwrap_or(LimitMode::Unconditional);
    let reps = resolve(args.reps, config, "reps", 100)?;
    let seed = resolve(args.seed, config, "seed", 0)?;
    let cfg = series_config(
        args.weight_cut,
        args.mass_floor,
        args.stick_cut,
        config,
        1e-6,
    )?;
    require_at_least_one(reps, "--reps")?;

    let tree = match (mode, &args.tree) {
        (LimitMode::Conditional, Some(spec)) => Some(parse_tree(spec)?),
        (LimitMode::Conditional, None) => {
            return Err("conditional mode needs --tree".into());
        }
        _ => None,
    };
    let fixed_prefix = match (mode, &args.input) {
        (LimitMode::FromInput, Some(path)) => {
            let column = args.input_column.clone().unwrap_or_else(|| "t".to_string());
            Some(read_input_column(path, &column)?)
        }
        _ => None,
    };
    let prefix_len = resolve(args.prefix_len, config, "prefix_len", 64)?;

    let rows = exec::run_indexed(reps, par, |r| {
        let key = StreamKey::replication(seed, r);
        let lt = match mode {
            LimitMode::Unconditional => LimitTree::unconditional(key),
            LimitMode::Conditional => {
                LimitTree::conditional(tree.clone().expect("checked above"), key)
            }
            LimitMode::FromInput => {
                let prefix = match &fixed_prefix {
                    Some(p) => p.clone(),
                    None => {
                        let mut s = key.child(u64::MAX).stream();
                        rrt_core::rt::uniform_inputs(prefix_len, &mut s)
                    }
                };
                LimitTree::from_input(prefix, key).expect("valid prefix")
            }
        };
        let s = lt.series(&cfg);
        format!("{},{},{},{},{}", r, s.y, s.z, s.w, s.y + s.z)
    });
    let mut out = String::from("replication,y,z,w,y_plus_z\n");
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    write_output(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn fixed_point(
    args: FixedPointArgs,
    config: &Config,
    par: Parallelism,
) -> Result<ExitCode, DynError> {
    let reps = resolve(args.reps, config, "reps", 10_000)?;
    let seed = resolve(args.seed, config, "seed", 0)?;
    let cfg = series_config(
        args.weight_cut,
        args.mass_floor,
        args.stick_cut,
        config,
        1e-4,
    )?;
    require_at_least_one(reps, "--reps")?;

    let draw = |salt: u64| {
        exec::run_indexed(reps, par, move |r| {
            LimitTree::unconditional(StreamKey::replication(seed ^ salt, r)).series(&cfg)
        })
    };
    let left = draw(0x01);
    let sum_side = draw(0x02);
    let pairs = draw(0x03);
    let pairs2 = draw(0x04);

    let y: Vec<f64> = left.iter().map(|s| s.y).collect();
    let u_key = StreamKey::root(seed ^ 0x05);
    let rhs: Vec<f64> = pairs
        .iter()
        .zip(&pairs2)
        .enumerate()
        .map(|(i, (a, b))| fixed_point_rhs(a.y, b.y, u_key.unit(i as u64)))
        .collect();
    let y_plus_z: Vec<f64> = sum_side.iter().map(|s| s.y + s.z).collect();

    println!("replications per sample: {reps}");
    println!("KS(y, recursion rhs)    = {:.5}", ks_two_sample(&y, &rhs));
    println!(
        "KS(y, y + z)            = {:.5}",
        ks_two_sample(&y, &y_plus_z)
    );
    println!(
        "1% critical value       = {:.5}",
        rrt_core::stats::ks_critical_1pct(reps as usize, reps as usize)
    );
    Ok(ExitCode::SUCCESS)
}

fn do_verify(args: VerifyArgs, config: &Config, par: Parallelism) -> Result<ExitCode, DynError> {
    let level = match args.level {
        Some(VerifyLevel::Fast) => verify::Level::Fast,
        Some(VerifyLevel::Full) => verify::Level::Full,
        None => match config.get::<String>("level")?.as_deref() {
            Some("fast") => verify::Level::Fast,
            Some("full") | None => verify::Level::Full,
            Some(other) => return Err(format!("unknown level {other:?}").into()),
        },
    };
    let reports = verify::run(level, par);
    for report in &reports {
        println!("{}", report.line());
    }
    let passed = reports
        .iter()
        .filter(|r| r.status == verify::Status::Pass)
        .count();
    let skipped = reports
        .iter()
        .filter(|r| r.status == verify::Status::Skipped)
        .count();
    let failed = reports.len() - passed - skipped;
    println!("summary: {passed} passed, {failed} failed, {skipped} skipped");
    if let Some(path) = args.json {
        fs::write(&path, serde_json::to_string_pretty(&reports)?)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
