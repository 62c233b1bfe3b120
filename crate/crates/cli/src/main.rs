use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hmext::random::{random_instance, GenMode};
use hmext::verify::{compare_operators, render_table, run_invariant_suite, Comparison, COMPARED_OPERATORS};
use hmext::{CheckStatus, DiagVariant, Domain, Extender, LoadedInstance, OperatorKind, PairFunction, SuiteConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hmext", version, about = "Extend pair functions and metrics from a subset of a finite metric space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an extension operator and write the matrix over Y.
    Extend(ExtendArgs),
    /// Run the invariant suite for one operator.
    Verify(VerifyArgs),
    /// Run the suite for T, S, S1 and S2 and compare their outputs.
    Compare(CompareArgs),
    /// Write a random instance.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct Common {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Diagonal convention of the operator E.
    #[arg(long, default_value_t = DiagVariant::BaseDiagonal)]
    variant: DiagVariant,
    /// Input function over X as a JSON matrix; overrides `p` in the instance.
    #[arg(long)]
    p: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = OperatorKind::T)]
    op: OperatorKind,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also report the partial sum of the T series to this depth.
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = OperatorKind::T)]
    op: OperatorKind,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryMode {
    Points,
    Matrix,
}

#[derive(Args)]
struct GenArgs {
    /// Number of points in Y.
    #[arg(long)]
    n: usize,
    /// Size of the subset X.
    #[arg(long)]
    x: usize,
    /// Dimension of the point cloud (points mode).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = GeometryMode::Points)]
    mode: GeometryMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(common: &Common) -> Result<(LoadedInstance<f64>, Option<PairFunction<f64>>)> {
    let file = hmext::InstanceFile::read(&common.instance)
        .with_context(|| format!("cannot load {}", common.instance.display()))?;
    let loaded = file
        .load::<f64>()
        .with_context(|| format!("invalid instance {}", common.instance.display()))?;
    for w in &loaded.group_warnings {
        eprintln!("warning: {w}");
    }
    let p = match &common.p {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(&text).with_context(|| format!("{} is not a JSON matrix", path.display()))?;
            let p = PairFunction::from_rows(Domain::OverX, &rows)?;
            p.expect_shape(Domain::OverX, loaded.instance.subset().len())?;
            Some(p)
        }
        None => loaded.p.clone(),
    };
    Ok((loaded, p))
}

fn require_p(p: Option<PairFunction<f64>>) -> Result<PairFunction<f64>> {
    p.context("no input function: add `p` to the instance or pass --p")
}

#[derive(Serialize)]
struct PartialSum {
    depth: u32,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ExtendOutput {
    operator: OperatorKind,
    variant: DiagVariant,
    stabilization_level: u32,
    scale: f64,
    points: usize,
    subset: Vec<usize>,
    matrix: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial_sum: Option<PartialSum>,
}

fn write_csv(out: Box<dyn Write>, m: &PairFunction<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((0..m.size()).map(|i| i.to_string()))?;
    for row in m.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn run_extend(args: &ExtendArgs) -> Result<ExitCode> {
    if args.format == Format::Table {
        bail!("extend writes json or csv");
    }
    if args.depth.is_some() && args.format != Format::Json {
        bail!("--depth is only reported in json output");
    }
    let (loaded, p) = load(&args.common)?;
    if args.op == OperatorKind::I && loaded.group.is_none() {
        bail!(hmext::Error::GroupRequired);
    }
    let p = require_p(p)?;
    let ext = Extender::new(&loaded.instance);
    let res = ext.extend(args.op, &p, args.common.variant, loaded.group.as_ref())?;
    let out = open_output(args.common.output.as_deref())?;
    if args.format == Format::Csv {
        write_csv(out, &res.output)?;
        return Ok(ExitCode::SUCCESS);
    }
    let partial_sum = match args.depth {
        None => None,
        Some(depth) => {
            if args.op != OperatorKind::T {
                bail!("--depth applies to the series operator T");
            }
            let m = ext.partial_sum_matrix(&p, depth, args.common.variant)?;
            Some(PartialSum { depth, matrix: m.rows() })
        }
    };
    let doc = ExtendOutput {
        operator: res.operator,
        variant: res.variant,
        stabilization_level: res.stabilization_level,
        scale: res.scale,
        points: loaded.instance.len(),
        subset: loaded.instance.subset().members().to_vec(),
        matrix: res.output.rows(),
        partial_sum,
    };
    write_json(out, &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn write_json<T: Serialize>(mut out: Box<dyn Write>, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode> {
    if args.format == Format::Csv {
        bail!("verify writes json or table");
    }
    let (loaded, _) = load(&args.common)?;
    let cfg = SuiteConfig {
        operator: args.op,
        variant: args.common.variant,
        seed: args.seed,
        trials: args.trials,
    };
    let reports = run_invariant_suite(&loaded.instance, loaded.group.as_ref(), &cfg)?;
    let mut out = open_output(args.common.output.as_deref())?;
    match args.format {
        Format::Json => write_json(out, &reports)?,
        _ => write!(out, "{}", render_table(&reports))?,
    }
    let failed = reports.iter().any(|r| r.status == CheckStatus::Fail);
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::ExpectedFail => "expected-fail",
        CheckStatus::NotApplicable => "n/a",
    }
}

fn comparison_table(cmp: &Comparison) -> String {
    let mut s = format!("{:<26}", "check");
    for op in COMPARED_OPERATORS {
        s.push_str(&format!(" {:<14}", op.to_string()));
    }
    s.push('\n');
    for (name, row) in &cmp.claims {
        s.push_str(&format!("{name:<26}"));
        for op in COMPARED_OPERATORS {
            s.push_str(&format!(" {:<14}", row.get(&op).map_or("-", |&st| status_word(st))));
        }
        s.push('\n');
    }
    s.push_str(&format!("\n{:<10} {:>14} {:>14}\n", "pair", "max |diff|", "frobenius"));
    for d in &cmp.differences {
        s.push_str(&format!(
            "{:<10} {:>14.6e} {:>14.6e}\n",
            format!("{}-{}", d.left, d.right),
            d.max_abs,
            d.frobenius
        ));
    }
    s
}

fn run_compare(args: &CompareArgs) -> Result<ExitCode> {
    if args.format == Format::Csv {
        bail!("compare writes json or table");
    }
    let (loaded, p) = load(&args.common)?;
    let p = require_p(p)?;
    let cmp = compare_operators(&loaded.instance, &p, args.common.variant, args.seed, args.trials)?;
    let mut out = open_output(args.common.output.as_deref())?;
    match args.format {
        Format::Json => write_json(out, &cmp)?,
        _ => write!(out, "{}", comparison_table(&cmp))?,
    }
    let failed = cmp
        .claims
        .values()
        .flat_map(BTreeMap::values)
        .any(|&s| s == CheckStatus::Fail);
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn run_gen(args: &GenArgs) -> Result<ExitCode> {
    let mode = match args.mode {
        GeometryMode::Points => GenMode::Points { dim: args.dim },
        GeometryMode::Matrix => GenMode::Matrix,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let file = random_instance(&mut rng, args.n, args.x, mode)?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{}", file.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    if let Some(io) = e.downcast_ref::<io::Error>() {
        return io.kind() == io::ErrorKind::BrokenPipe;
    }
    e.downcast_ref::<serde_json::Error>()
        .and_then(|j| j.io_error_kind())
        .is_some_and(|k| k == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extend(a) => run_extend(a),
        Command::Verify(a) => run_verify(a),
        Command::Compare(a) => run_compare(a),
        Command::Gen(a) => run_gen(a),
    };
    match result {
        Ok(code) => code,
        // downstream closed early, e.g. `| head`
        Err(e) if e.chain().any(is_broken_pipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
