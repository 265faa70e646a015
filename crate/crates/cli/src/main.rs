//! `fracorbit` command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fracorbit::census::{count_upto, enumerate_window, first_elements, Q1Element};
use fracorbit::cover::{
    build_cover, verify_orbit, Cover, CoverPlan, OrbitVerdict, RatioParam, DEFAULT_INTERVAL_BUDGET,
};
use fracorbit::survivor::{
    leaves_per_depth, preset_dubickas_gap, preset_es, preset_mahler_z, preset_pollington, search,
    Certificate, ChildMode, DepthStats, PresetInfo, Strategy, TargetSpec, DEFAULT_NODE_BUDGET,
};
use fracorbit::waring::{rows, scan};
use fracorbit::{CircleSet, Error, Interval, Rational};

const DIGITS: u32 = 12;

const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_NO_SURVIVORS: u8 = 4;
const EXIT_VIOLATION: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "fracorbit",
    version,
    about = "Exact covers and survivor sets for frac(lambda (p/q)^n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (0 picks the number of CPUs).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cover A(epsilon) for the ratio p/q.
    Cover(CoverArgs),
    /// Search a survivor tree and emit certificates and per-depth statistics.
    Survivors(SurvivorArgs),
    /// Check that frac(lambda (p/q)^n) stays in A(epsilon) for n <= n-max.
    Verify(VerifyArgs),
    /// Enumerate Q1 = { p/q : p > q^2 }.
    Q1(Q1Args),
    /// Scan the integer threshold conditions for g(n).
    Waring(WaringArgs),
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
}

#[derive(Args, Debug)]
struct CoverArgs {
    #[command(flatten)]
    ratio: RatioArgs,
    #[arg(long)]
    epsilon: Rational,
    /// Maximum raw interval count to materialize.
    #[arg(long, default_value_t = DEFAULT_INTERVAL_BUDGET)]
    budget: u64,
    /// Emit the full interval list and exact measure.
    #[arg(long)]
    materialize: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Es,
    MahlerZ,
    Pollington,
    DubickasGap,
    Custom,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Rightmost,
    Bits,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    AllChildren,
    FullComponentOnly,
}

#[derive(Args, Debug)]
struct SurvivorArgs {
    #[arg(long, value_enum, default_value_t = Preset::Es)]
    preset: Preset,
    /// Ratio numerator (es preset).
    #[arg(long)]
    p: Option<u64>,
    /// Ratio denominator (es preset).
    #[arg(long)]
    q: Option<u64>,
    /// Power of p/q used as s (es preset); defaults to the least k for --epsilon.
    #[arg(long)]
    k: Option<u32>,
    /// Take k from the cover for this epsilon (es preset).
    #[arg(long)]
    epsilon: Option<Rational>,
    /// Integer the starting band is centred on (es preset).
    #[arg(long, default_value_t = 1)]
    band_index: u64,
    /// Ratio for the custom preset.
    #[arg(long)]
    ratio: Option<Rational>,
    /// Target arcs for the custom preset, e.g. "0:1/3,2/3:1".
    #[arg(long)]
    target: Option<String>,
    /// Window of admissible lambda, e.g. "1:2".
    #[arg(long)]
    window: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = 0)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
    strategy: StrategyArg,
    /// Branch code for --strategy bits, e.g. "0110".
    #[arg(long)]
    bits: Option<String>,
    #[arg(long, default_value_t = 1)]
    max_leaves: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    /// Skip the per-depth census.
    #[arg(long)]
    no_stats: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    lambda: Rational,
    #[command(flatten)]
    ratio: RatioArgs,
    #[arg(long)]
    epsilon: Rational,
    #[arg(long)]
    n_max: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Q1Mode {
    List,
    Window,
    Density,
}

#[derive(Args, Debug)]
struct Q1Args {
    #[arg(long, value_enum, default_value_t = Q1Mode::List)]
    mode: Q1Mode,
    #[arg(long)]
    n: u64,
}

#[derive(Args, Debug)]
struct WaringArgs {
    #[arg(long)]
    from: u32,
    #[arg(long)]
    to: u32,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::HypothesisViolated { .. }) => EXIT_HYPOTHESIS,
            Failure::Lib(
                Error::IntervalBudgetExceeded { .. }
                | Error::NodeBudgetExceeded { .. }
                | Error::KCapExceeded { .. },
            ) => EXIT_BUDGET,
            Failure::Lib(Error::NoSurvivors { .. }) => EXIT_NO_SURVIVORS,
            Failure::Lib(_) | Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
        }
    }
}

/// Rendered output plus the exit code to finish with.
struct Output {
    body: Vec<u8>,
    code: u8,
}

impl Output {
    fn ok(body: Vec<u8>) -> Self {
        Output { body, code: 0 }
    }
}

fn decimal(x: &Rational) -> String {
    x.to_decimal(DIGITS)
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    Ok(body)
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

fn ratio_param(args: &RatioArgs) -> Result<RatioParam, Failure> {
    Ok(RatioParam::new(args.p, args.q)?)
}

#[derive(Serialize)]
struct CoverRow {
    p: u64,
    q: u64,
    epsilon: Rational,
    k: u32,
    s: Rational,
    measure: Option<Rational>,
    measure_decimal: Option<String>,
    measure_bound: Rational,
    measure_bound_decimal: String,
    raw_interval_count: String,
}

#[derive(Serialize)]
struct IntervalRow {
    lo: Rational,
    hi: Rational,
    lo_decimal: String,
    hi_decimal: String,
}

fn cmd_cover(args: &CoverArgs, format: Format) -> Result<Output, Failure> {
    let plan = CoverPlan::new(ratio_param(&args.ratio)?, args.epsilon.clone())?;
    let cover = if args.materialize {
        build_cover(&plan, args.budget)?
    } else {
        Cover::implicit(plan)
    };
    let report = cover.report();
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => match &report.intervals {
            Some(set) => csv_rows(set.components().iter().map(|iv| IntervalRow {
                lo: iv.lo.clone(),
                hi: iv.hi.clone(),
                lo_decimal: decimal(&iv.lo),
                hi_decimal: decimal(&iv.hi),
            }))?,
            None => csv_rows([CoverRow {
                p: report.params.p(),
                q: report.params.q(),
                epsilon: report.epsilon.clone(),
                k: report.k,
                s: report.s.clone(),
                measure: report.measure.clone(),
                measure_decimal: report.measure.as_ref().map(decimal),
                measure_bound_decimal: decimal(&report.measure_bound),
                measure_bound: report.measure_bound.clone(),
                raw_interval_count: report.raw_interval_count.clone(),
            }])?,
        },
    };
    Ok(Output::ok(body))
}

/// Parses `lo:hi`.
fn parse_interval(text: &str) -> Result<Interval, Failure> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("expected lo:hi, got {text:?}")))?;
    Ok(Interval::new(lo.trim().parse()?, hi.trim().parse()?)?)
}

/// Parses a comma-separated list of `lo:hi` arcs.
fn parse_target(text: &str) -> Result<CircleSet, Failure> {
    let raw = text
        .split(',')
        .map(parse_interval)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CircleSet::normalize(raw)?)
}

fn build_spec(args: &SurvivorArgs) -> Result<(PresetInfo, TargetSpec), Failure> {
    let (info, mut spec) = match args.preset {
        Preset::Es => {
            let (Some(p), Some(q)) = (args.p, args.q) else {
                return Err(Failure::Usage("the es preset needs --p and --q".into()));
            };
            let params = RatioParam::new(p, q)?;
            let k = match (args.k, &args.epsilon) {
                (Some(k), None) => k,
                (None, Some(eps)) => CoverPlan::new(params, eps.clone())?.k,
                _ => {
                    return Err(Failure::Usage(
                        "the es preset needs exactly one of --k and --epsilon".into(),
                    ))
                }
            };
            (PresetInfo::es(), preset_es(&params, k, args.band_index)?)
        }
        Preset::MahlerZ => (PresetInfo::mahler_z(), preset_mahler_z()),
        Preset::Pollington => (PresetInfo::pollington(), preset_pollington()),
        Preset::DubickasGap => (PresetInfo::dubickas_gap(), preset_dubickas_gap()),
        Preset::Custom => {
            let (Some(ratio), Some(target), Some(window)) =
                (&args.ratio, &args.target, &args.window)
            else {
                return Err(Failure::Usage(
                    "the custom preset needs --ratio, --target and --window".into(),
                ));
            };
            let spec = TargetSpec::new(
                ratio.clone(),
                parse_target(target)?,
                parse_interval(window)?,
                0,
                ChildMode::AllChildren,
            )?;
            (PresetInfo::custom(), spec)
        }
    };
    if args.preset != Preset::Custom {
        if let Some(window) = &args.window {
            let iv = parse_interval(window)?;
            spec = spec.with_window(iv.lo, iv.hi)?;
        }
    }
    if let Some(mode) = args.mode {
        spec = spec.with_mode(match mode {
            ModeArg::AllChildren => ChildMode::AllChildren,
            ModeArg::FullComponentOnly => ChildMode::FullComponentOnly,
        });
    }
    Ok((info, spec.with_depth(args.depth)))
}

fn strategy(args: &SurvivorArgs) -> Result<Strategy, Failure> {
    match (args.strategy, &args.bits) {
        (StrategyArg::Bits, Some(code)) => Ok(Strategy::from_bits(code)?),
        (StrategyArg::Bits, None) => Err(Failure::Usage("--strategy bits needs --bits".into())),
        (_, Some(_)) => Err(Failure::Usage("--bits needs --strategy bits".into())),
        (StrategyArg::Leftmost, None) => Ok(Strategy::Leftmost),
        (StrategyArg::Rightmost, None) => Ok(Strategy::Rightmost),
    }
}

#[derive(Serialize)]
struct SurvivorReport {
    preset: PresetInfo,
    certificates: Vec<Certificate>,
    stats: Option<Vec<DepthStats>>,
}

#[derive(Serialize)]
struct StatsRow {
    depth: usize,
    leaves: usize,
    measure: Rational,
    measure_decimal: String,
}

#[derive(Serialize)]
struct CertificateRow {
    index: usize,
    lambda_lo: Rational,
    lambda_hi: Rational,
    representative: Rational,
    representative_decimal: String,
    path: String,
}

fn path_text(cert: &Certificate) -> String {
    cert.path
        .iter()
        .map(|step| format!("{}:{}", step.m, step.component))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_survivors(args: &SurvivorArgs, format: Format) -> Result<Output, Failure> {
    let (preset, spec) = build_spec(args)?;
    let strategy = strategy(args)?;
    let certificates = search(&spec, &strategy, args.max_leaves, args.node_budget)?;
    let stats = if args.no_stats {
        None
    } else {
        Some(leaves_per_depth(&spec, args.node_budget)?)
    };
    let body =
        match format {
            Format::Json => json(&SurvivorReport {
                preset,
                certificates,
                stats,
            })?,
            Format::Csv => {
                match stats {
                    Some(stats) => csv_rows(stats.into_iter().map(|row| StatsRow {
                        measure_decimal: decimal(&row.measure),
                        depth: row.depth,
                        leaves: row.leaves,
                        measure: row.measure,
                    }))?,
                    None => csv_rows(certificates.iter().enumerate().map(|(index, cert)| {
                        CertificateRow {
                            index,
                            lambda_lo: cert.lambda_interval.lo.clone(),
                            lambda_hi: cert.lambda_interval.hi.clone(),
                            representative: cert.representative.clone(),
                            representative_decimal: decimal(&cert.representative),
                            path: path_text(cert),
                        }
                    }))?,
                }
            }
        };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct VerifyRow {
    lambda: Rational,
    p: u64,
    q: u64,
    epsilon: Rational,
    k: u32,
    n_max: usize,
    holds: bool,
    violated_at: Option<usize>,
    point: Option<Rational>,
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Output, Failure> {
    let plan = CoverPlan::new(ratio_param(&args.ratio)?, args.epsilon.clone())?;
    let verdict = verify_orbit(&args.lambda, &plan, args.n_max)?;
    let code = if verdict.holds() { 0 } else { EXIT_VIOLATION };
    let (violated_at, point) = match &verdict {
        OrbitVerdict::Holds { .. } => (None, None),
        OrbitVerdict::ViolatedAt { n, point } => (Some(*n), Some(point.clone())),
    };
    let row = VerifyRow {
        lambda: args.lambda.clone(),
        p: plan.params.p(),
        q: plan.params.q(),
        epsilon: plan.epsilon.clone(),
        k: plan.k,
        n_max: args.n_max,
        holds: verdict.holds(),
        violated_at,
        point,
    };
    let body = match format {
        Format::Json => json(&row)?,
        Format::Csv => csv_rows([row])?,
    };
    Ok(Output { body, code })
}

#[derive(Serialize)]
struct Q1Row {
    index: usize,
    p: u64,
    q: u64,
    value: Rational,
    value_decimal: String,
    window: u64,
}

fn q1_rows(elements: &[Q1Element]) -> Vec<Q1Row> {
    elements
        .iter()
        .enumerate()
        .map(|(i, e)| Q1Row {
            index: i + 1,
            p: e.p(),
            q: e.q(),
            value: e.value(),
            value_decimal: decimal(&e.value()),
            window: e.window(),
        })
        .collect()
}

#[derive(Serialize)]
struct DensityRow {
    n: u64,
    count: u64,
    ratio: Rational,
    ratio_decimal: String,
    distance_to_limit: Rational,
    distance_decimal: String,
}

fn cmd_q1(args: &Q1Args, format: Format) -> Result<Output, Failure> {
    if args.n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let body = match args.mode {
        Q1Mode::List | Q1Mode::Window => {
            let elements = match args.mode {
                Q1Mode::List => first_elements(args.n as usize),
                _ => enumerate_window(args.n)?,
            };
            let rows = q1_rows(&elements);
            match format {
                Format::Json => json(&rows)?,
                Format::Csv => csv_rows(rows)?,
            }
        }
        Q1Mode::Density => {
            let report = count_upto(args.n)?;
            let row = DensityRow {
                n: report.n,
                count: report.count,
                ratio_decimal: decimal(&report.ratio),
                ratio: report.ratio,
                distance_decimal: decimal(&report.distance_to_limit),
                distance_to_limit: report.distance_to_limit,
            };
            match format {
                Format::Json => json(&row)?,
                Format::Csv => csv_rows([row])?,
            }
        }
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct WaringCsvRow {
    n: u32,
    a: String,
    b: String,
    star: bool,
    norm: bool,
    g: String,
}

fn cmd_waring(args: &WaringArgs, format: Format) -> Result<Output, Failure> {
    let body = match format {
        Format::Json => json(&scan(args.from, args.to)?)?,
        Format::Csv => csv_rows(rows(args.from, args.to)?.map(|row| WaringCsvRow {
            n: row.decomp.n,
            a: row.decomp.a.to_string(),
            b: row.decomp.b.to_string(),
            star: row.star,
            norm: row.norm,
            g: row.g.to_string(),
        }))?,
    };
    Ok(Output::ok(body))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Cover(args) => cmd_cover(args, cli.format),
        Command::Survivors(args) => cmd_survivors(args, cli.format),
        Command::Verify(args) => cmd_verify(args, cli.format),
        Command::Q1(args) => cmd_q1(args, cli.format),
        Command::Waring(args) => cmd_waring(args, cli.format),
    }
}

fn emit(cli: &Cli, body: &[u8]) -> io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, body),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body)?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| run(&cli));
    match result {
        Ok(output) => {
            if let Err(e) = emit(&cli, &output.body) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if output.code == EXIT_VIOLATION {
                eprintln!("orbit leaves the cover");
            }
            ExitCode::from(output.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
