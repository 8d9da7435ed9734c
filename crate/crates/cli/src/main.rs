use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use widthlab_core::bounds::verify_with_report;
use widthlab_core::problem::ProblemOptions;
use widthlab_core::{
    compare, invariants_ext, invariants_free, oracle, parse_problem, pullback2, random_corpus,
    CoreGraph, CorpusConfig, ExtensionSpec, GroupSpec, InvariantReport, OracleComparison,
    OracleConfig, OracleReport, Problem, ProblemFile, VerificationReport,
};

// Writes to stdout; a closed pipe (e.g. `| head`) ends the run quietly.
macro_rules! out {
    ($($arg:tt)*) => { write_stdout(format_args!($($arg)*)) };
}

macro_rules! outln {
    ($($arg:tt)*) => { write_stdout(format_args!("{}\n", format_args!($($arg)*))) };
}

fn write_stdout(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(2);
    }
}

#[derive(Parser)]
#[command(
    name = "widthlab",
    version,
    about = "Height, width and weak width of subgroups of free groups and their cyclic extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Oracle radius (overrides the problem file).
    #[arg(long, global = true)]
    radius: Option<usize>,

    /// Corpus seed (overrides the problem file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for DOT files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Add wall-clock timings under a separate `timing` key.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exact weak width, width and height with certificates.
    Compute,
    /// Check the weak-width and double-coset length bounds, for one
    /// subgroup or a random corpus.
    Verify(CorpusArgs),
    /// Compare the exact engine with brute-force enumeration.
    Oracle {
        #[arg(long)]
        tuple_cap: Option<usize>,
    },
    /// Recompute the two built-in extension examples.
    Examples,
    /// Write DOT files for the core and pullback components.
    ExportDot {
        #[arg(long, value_enum, default_value_t = Pullbacks::Nontree)]
        pullbacks: Pullbacks,
    },
}

#[derive(clap::Args)]
struct CorpusArgs {
    /// Run on a seeded random corpus instead of `--input`.
    #[arg(long)]
    corpus: bool,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    rank_min: usize,
    #[arg(long, default_value_t = 4)]
    rank_max: usize,
    #[arg(long, default_value_t = 1)]
    gens_min: usize,
    #[arg(long, default_value_t = 3)]
    gens_max: usize,
    #[arg(long, default_value_t = 6)]
    len_max: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pullbacks {
    None,
    Nontree,
    All,
}

/// Exit code 2: the input could not be used.
struct InputError(anyhow::Error);

enum Failure {
    Input(anyhow::Error),
    /// Exit code 1: a check failed.
    Mismatch(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunReport {
    command: &'static str,
    problem: ProblemFile,
    report: InvariantReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OracleSection {
    config: OracleConfig,
    result: OracleReport,
    comparison: OracleComparison,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Timing {
    total_ms: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("WIDTHLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .with_context(|| format!("WIDTHLAB_THREADS={value:?} is not a count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compute => compute(cli),
        Command::Verify(args) if args.corpus => verify_corpus(cli, args),
        Command::Verify(_) => verify_one(cli),
        Command::Oracle { tuple_cap } => run_oracle(cli, *tuple_cap),
        Command::Examples => examples(cli),
        Command::ExportDot { pullbacks } => export_dot(cli, *pullbacks),
    }
}

fn load(cli: &Cli) -> Result<Problem, InputError> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| InputError(anyhow!("--input FILE is required")))?;
    let bytes = fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(InputError)?;
    parse_problem(&bytes).map_err(|e| InputError(anyhow!("{}:\n{e}", path.display())))
}

fn invariants(problem: &Problem) -> anyhow::Result<InvariantReport> {
    Ok(if problem.is_extension() {
        invariants_ext(&problem.core, &problem.spec)?
    } else {
        invariants_free(&problem.core)
    })
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    outln!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Re-checks certificates after output has been written.
fn recheck(problem: &Problem, report: &InvariantReport) -> Result<(), Failure> {
    let problems = report
        .verify(&problem.core, &problem.spec)
        .map_err(anyhow::Error::from)?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "certificate check failed:\n  {}",
            problems.join("\n  ")
        )))
    }
}

fn timing(cli: &Cli, start: Instant) -> Option<Timing> {
    cli.timing.then(|| Timing {
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn compute(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let problem = load(cli)?;
    let report = invariants(&problem)?;
    match cli.format {
        Format::Json => emit(&RunReport {
            command: "compute",
            problem: problem.file.clone(),
            report: report.clone(),
            verification: None,
            oracle: None,
            timing: timing(cli, start),
        })?,
        Format::Text => out!("{}", report_text(&report)),
    }
    recheck(&problem, &report)
}

fn flag(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "bound"
    }
}

fn report_text(r: &InvariantReport) -> String {
    let mut s = String::new();
    s += &format!(
        "weak width  {} ({})\n",
        r.weak_width,
        flag(r.exact.weak_width)
    );
    s += &format!("width       {} ({})\n", r.width, flag(r.exact.width));
    s += &format!("height      {} ({})\n", r.height, flag(r.exact.height));
    if r.per_twist_weak_width.len() > 1 {
        s += &format!("per twist   {:?}\n", r.per_twist_weak_width);
    }
    let reps: Vec<String> = r
        .certificates
        .weak_width
        .iter()
        .map(|c| c.shortest.to_string())
        .collect();
    s += &format!("double cosets      {}\n", reps.join(", "));
    let members = |ms: &[widthlab_core::report::MemberNode]| {
        ms.iter()
            .map(|m| m.coset_rep.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    s += &format!(
        "width conjugates   {}\n",
        members(&r.certificates.width.members)
    );
    s += &format!(
        "height conjugates  {}",
        members(&r.certificates.height.members)
    );
    if let Some(w) = &r.certificates.height.witness {
        s += &format!(" (common element {w})");
    }
    s + "\n"
}

fn verification_text(v: &VerificationReport) -> String {
    let mut s = format!(
        "K = {}, delta = {}, N = {}, weak width = {}\n",
        v.context.qc_constant, v.context.delta, v.context.ball_bound, v.weak_width
    );
    for c in &v.checks {
        s += &format!(
            "{} {}: {}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.details
        );
    }
    s
}

fn verify_one(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let problem = load(cli)?;
    // Bounds are certified in the free kernel only.
    let free_report = invariants_free(&problem.core);
    let verification = verify_with_report(&problem.core, &free_report);
    let report = invariants(&problem)?;
    match cli.format {
        Format::Json => emit(&RunReport {
            command: "verify",
            problem: problem.file.clone(),
            report: report.clone(),
            verification: Some(verification.clone()),
            oracle: None,
            timing: timing(cli, start),
        })?,
        Format::Text => out!("{}", verification_text(&verification)),
    }
    recheck(&problem, &report)?;
    if verification.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "{} bound violations",
            verification.violations.len()
        )))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CorpusSummary {
    config: CorpusConfig,
    instances: usize,
    max_weak_width: usize,
    max_qc_constant: usize,
    ball_bound_violations: usize,
    short_representative_violations: usize,
    failures: Vec<CorpusFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CorpusFailure {
    index: usize,
    rank: usize,
    generators: Vec<String>,
    report: VerificationReport,
}

fn verify_corpus(cli: &Cli, args: &CorpusArgs) -> Result<(), Failure> {
    use rayon::prelude::*;
    use widthlab_core::bounds::{BALL_BOUND_CHECK, SHORT_REPRESENTATIVE_CHECK};

    let start = Instant::now();
    let defaults = CorpusConfig::default();
    let file_seed = match cli.input {
        Some(_) => load(cli)?.file.options.seed,
        None => None,
    };
    let config = CorpusConfig {
        count: args.count,
        rank_min: args.rank_min,
        rank_max: args.rank_max,
        gens_min: args.gens_min,
        gens_max: args.gens_max,
        len_max: args.len_max,
        seed: cli.seed.or(file_seed).unwrap_or(defaults.seed),
    };
    if config.rank_min == 0
        || config.rank_min > config.rank_max
        || config.gens_min > config.gens_max
    {
        return Err(Failure::Input(anyhow!("empty corpus ranges")));
    }
    let corpus = random_corpus(&config);
    let reports: Vec<VerificationReport> = corpus
        .par_iter()
        .map(|e| {
            let h = CoreGraph::build(
                widthlab_core::Alphabet::new(e.rank).expect("rank checked"),
                &e.generators,
            )
            .expect("corpus words fit their alphabet");
            widthlab_core::verify_bounds(&h)
        })
        .collect();
    let count = |name: &str| {
        reports
            .iter()
            .flat_map(|r| &r.violations)
            .filter(|v| v.check == name)
            .count()
    };
    let failures: Vec<CorpusFailure> = corpus
        .iter()
        .zip(&reports)
        .enumerate()
        .filter(|(_, (_, r))| !r.passed())
        .map(|(index, (e, r))| CorpusFailure {
            index,
            rank: e.rank,
            generators: e.generators.iter().map(|g| g.to_string()).collect(),
            report: r.clone(),
        })
        .collect();
    let summary = CorpusSummary {
        config,
        instances: corpus.len(),
        max_weak_width: reports.iter().map(|r| r.weak_width).max().unwrap_or(0),
        max_qc_constant: reports
            .iter()
            .map(|r| r.context.qc_constant)
            .max()
            .unwrap_or(0),
        ball_bound_violations: count(BALL_BOUND_CHECK),
        short_representative_violations: count(SHORT_REPRESENTATIVE_CHECK),
        failures,
        timing: timing(cli, start),
    };
    match cli.format {
        Format::Json => emit(&summary)?,
        Format::Text => outln!(
            "{} subgroups, {} weak-width bound violations, {} double-coset length violations, {} failing",
            summary.instances,
            summary.ball_bound_violations,
            summary.short_representative_violations,
            summary.failures.len()
        ),
    }
    if summary.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "{} corpus members failed",
            summary.failures.len()
        )))
    }
}

fn oracle_config(
    options: &ProblemOptions,
    radius: Option<usize>,
    tuple_cap: Option<usize>,
) -> OracleConfig {
    let mut config = OracleConfig::default();
    config.radius = radius.or(options.radius).unwrap_or(config.radius);
    config.tuple_cap = tuple_cap.or(options.tuple_cap).unwrap_or(config.tuple_cap);
    config
}

fn run_oracle(cli: &Cli, tuple_cap: Option<usize>) -> Result<(), Failure> {
    let start = Instant::now();
    let problem = load(cli)?;
    let config = oracle_config(&problem.file.options, cli.radius, tuple_cap);
    let report = invariants(&problem)?;
    let result =
        oracle(&problem.spec, &problem.generators, &config).map_err(anyhow::Error::from)?;
    let comparison = compare(&report, &result);
    match cli.format {
        Format::Json => emit(&RunReport {
            command: "oracle",
            problem: problem.file.clone(),
            report: report.clone(),
            verification: None,
            oracle: Some(OracleSection {
                config,
                result: result.clone(),
                comparison: comparison.clone(),
            }),
            timing: timing(cli, start),
        })?,
        Format::Text => {
            outln!(
                "engine  weak width {}, width {}, height {}",
                report.weak_width,
                report.width,
                report.height
            );
            outln!(
                "oracle  weak width {}, width {}, height {} (radius {}, {} elements{})",
                result.weak_width,
                result.width,
                result.height,
                result.radius,
                result.ball_size,
                if result.width_complete && result.height_complete {
                    ""
                } else {
                    ", lower bounds"
                }
            );
            for note in &result.notes {
                outln!("note    {note}");
            }
            outln!("agreement: {}", comparison.agreement);
        }
    }
    recheck(&problem, &report)?;
    if comparison.agreement {
        Ok(())
    } else {
        Err(Failure::Mismatch("engine and oracle disagree".into()))
    }
}

struct Example {
    name: &'static str,
    generators: &'static [&'static str],
    expected: (usize, usize, usize),
}

const EXAMPLES: [Example; 2] = [
    Example {
        name: "<x1,x2>",
        generators: &["x1", "x2"],
        expected: (3, 2, 2),
    },
    Example {
        name: "<x1,x2,x3>",
        generators: &["x1", "x2", "x3"],
        expected: (4, 4, 3),
    },
];

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExampleOutcome {
    subgroup: String,
    group: GroupSpec,
    expected: [usize; 3],
    computed: [usize; 3],
    matches: bool,
    report: InvariantReport,
}

fn examples(cli: &Cli) -> Result<(), Failure> {
    // F_4 extended by t of order 4 with t^-1 x_i t = x_(i+1 mod 4).
    let group = GroupSpec::CyclicExtension {
        rank: 4,
        order: 4,
        perm: vec![2, 3, 4, 1],
    };
    let spec = ExtensionSpec::new(vec![2, 3, 4, 1], 4).map_err(anyhow::Error::from)?;
    let mut outcomes = Vec::new();
    for ex in &EXAMPLES {
        let gens: Vec<_> = ex
            .generators
            .iter()
            .map(|g| spec.alphabet().parse(g))
            .collect::<Result<_, _>>()
            .map_err(anyhow::Error::from)?;
        let core = CoreGraph::build(spec.alphabet(), &gens).map_err(anyhow::Error::from)?;
        let report = invariants_ext(&core, &spec).map_err(anyhow::Error::from)?;
        let computed = [report.weak_width, report.width, report.height];
        let expected = [ex.expected.0, ex.expected.1, ex.expected.2];
        let problems = report.verify(&core, &spec).map_err(anyhow::Error::from)?;
        if !problems.is_empty() {
            return Err(Failure::Mismatch(format!(
                "{}: certificate check failed: {problems:?}",
                ex.name
            )));
        }
        outcomes.push(ExampleOutcome {
            subgroup: ex.name.to_string(),
            group: group.clone(),
            expected,
            computed,
            matches: computed == expected,
            report,
        });
    }
    match cli.format {
        Format::Json => emit(&outcomes)?,
        Format::Text => {
            for o in &outcomes {
                outln!(
                    "{:<11} in F4 x| Z/4  (weak width, width, height) = ({}, {}, {})  expected ({}, {}, {})  {}",
                    o.subgroup,
                    o.computed[0],
                    o.computed[1],
                    o.computed[2],
                    o.expected[0],
                    o.expected[1],
                    o.expected[2],
                    if o.matches { "ok" } else { "MISMATCH" }
                );
            }
        }
    }
    if outcomes.iter().all(|o| o.matches) {
        Ok(())
    } else {
        Err(Failure::Mismatch(
            "computed invariants differ from the expected values".into(),
        ))
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn export_dot(cli: &Cli, which: Pullbacks) -> Result<(), Failure> {
    let problem = load(cli)?;
    let dir = cli
        .out
        .clone()
        .ok_or_else(|| anyhow!("--out DIR is required"))?;
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = vec![write(&dir, "core.dot", &problem.core.to_dot("core"))?];
    if which != Pullbacks::None {
        let cores = problem
            .spec
            .twisted_cores(&problem.core)
            .map_err(anyhow::Error::from)?;
        for (k, twisted) in cores.iter().enumerate() {
            let comps = pullback2(&cores[0], twisted).map_err(anyhow::Error::from)?;
            for (i, c) in comps.iter().enumerate() {
                if which == Pullbacks::Nontree && c.is_tree() {
                    continue;
                }
                let name = format!("pullback_t{k}_{i}");
                written.push(write(
                    &dir,
                    &format!("{name}.dot"),
                    &c.to_dot(&[&cores[0], twisted], &name),
                )?);
            }
        }
    }
    let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    match cli.format {
        Format::Json => emit(&names)?,
        Format::Text => names.iter().for_each(|n| outln!("{n}")),
    }
    Ok(())
}
