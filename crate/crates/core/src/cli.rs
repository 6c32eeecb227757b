//! Command-line interface.
//!
//! Exit codes: 0 success, 1 verification found a difference, 2 usage or
//! input error, 3 the search limits prevented a verdict.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::engine::{apply_cascade, compare_cascades, Limits, Side, Verdict};
use crate::fst::{Cascade, Fst};
use crate::gen::{random_cascade, GenParams};
use crate::reduce::{reduce_cascade, ReductionReport};
use crate::symbol::{join, tokens, Symbol};
use crate::textio::{
    parse_fst, parse_manifest, serialize_fst, write_manifest, write_report, Manifest,
};
use crate::PROBE_TOKEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    Usage = 2,
    LimitsExceeded = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fstcascade",
    version,
    about = "Intermediate alphabet reduction for transducer cascades"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce the intermediate alphabets of a cascade or a pair.
    Reduce(ReduceArgs),
    /// Apply a cascade to one input string.
    Apply(ApplyArgs),
    /// Compare the bounded relations of two cascades.
    Verify(VerifyArgs),
    /// Print size statistics.
    Stats(StatsArgs),
    /// Generate a random cascade.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(
        long,
        value_name = "MANIFEST",
        required_unless_present = "pair",
        conflicts_with = "pair"
    )]
    cascade: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["T1", "T2"])]
    pair: Option<Vec<PathBuf>>,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 10_000)]
    max_outputs: usize,
    #[arg(long, default_value_t = 64)]
    epsilon_bound: usize,
    #[arg(long, default_value_t = 64)]
    max_output_len: usize,
}

impl LimitArgs {
    fn limits(&self) -> Result<Limits, Failure> {
        Limits::new(self.max_outputs, self.epsilon_bound, self.max_output_len)
            .map_err(|e| Failure(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct ApplyArgs {
    #[arg(long, value_name = "MANIFEST")]
    cascade: PathBuf,
    /// Space-separated input tokens.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_name = "MANIFEST")]
    before: PathBuf,
    #[arg(long, value_name = "MANIFEST")]
    after: PathBuf,
    #[arg(long, value_name = "L")]
    max_len: usize,
    /// `auto` (input alphabet of the first stage) or a comma/space separated list.
    #[arg(long, default_value = "auto")]
    vocab: String,
    /// Add a token that no transducer knows.
    #[arg(long)]
    probe: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(
        long,
        value_name = "FILE",
        required_unless_present = "cascade",
        conflicts_with = "cascade"
    )]
    fst: Option<PathBuf>,
    #[arg(long, value_name = "MANIFEST")]
    cascade: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    stages: usize,
    /// States per stage, `N` or `LO-HI`.
    #[arg(long, default_value = "2-6", value_parser = parse_range)]
    states: RangeInclusive<usize>,
    /// Symbols per tape, `N` or `LO-HI`.
    #[arg(long, default_value = "2-5", value_parser = parse_range)]
    alphabet: RangeInclusive<usize>,
    /// Arcs drawn per state, `N` or `LO-HI`.
    #[arg(long, default_value = "1-3", value_parser = parse_range)]
    arcs: RangeInclusive<usize>,
    #[arg(long, default_value_t = 0.3)]
    redundancy: f64,
    #[arg(long, default_value_t = 0.3)]
    final_prob: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon_prob: f64,
    #[arg(long, default_value_t = 0.05)]
    unknown_prob: f64,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('-') {
        Some((lo, hi)) => Ok(num(lo)?..=num(hi)?),
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

/// A user-facing error; always exit code 2.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit status. All output goes to the given writers.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                ExitStatus::Usage
            } else {
                let _ = write!(out, "{}", e.render());
                ExitStatus::Success
            };
            return status;
        }
    };
    let result = match &cli.command {
        Command::Reduce(a) => cmd_reduce(a, out),
        Command::Apply(a) => cmd_apply(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(status) => status,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitStatus::Usage
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_fst(path: &Path) -> Result<Fst, Failure> {
    parse_fst(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Stage files of a manifest, resolved against the manifest's directory.
fn manifest_paths(manifest: &Path) -> Result<Vec<PathBuf>, Failure> {
    let m = parse_manifest(&read(manifest)?)
        .map_err(|e| Failure(format!("{}: {e}", manifest.display())))?;
    let dir = manifest.parent().unwrap_or(Path::new(""));
    Ok(m.paths.iter().map(|p| dir.join(p)).collect())
}

fn load_cascade(paths: &[PathBuf]) -> Result<Cascade, Failure> {
    let stages = paths
        .iter()
        .map(|p| load_fst(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cascade::new(stages)?)
}

fn percent(before: usize, after: usize) -> String {
    if before == 0 {
        return "0.0%".to_string();
    }
    format!("{:.1}%", (before - after) as f64 * 100.0 / before as f64)
}

fn cmd_reduce(a: &ReduceArgs, out: &mut dyn Write) -> Result<ExitStatus, Failure> {
    let (paths, manifest_name) = match (&a.cascade, &a.pair) {
        (Some(m), _) => (
            manifest_paths(m)?,
            m.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "cascade.lst".to_string()),
        ),
        (None, Some(pair)) => (pair.clone(), "cascade.lst".to_string()),
        (None, None) => return Err(Failure("one of --cascade or --pair is required".into())),
    };
    let names: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .ok_or_else(|| Failure(format!("{}: not a file path", p.display())))
        })
        .collect::<Result<_, _>>()?;
    let distinct: BTreeSet<&String> = names.iter().collect();
    if distinct.len() != names.len() || distinct.contains(&manifest_name) {
        return Err(Failure(
            "transducer and manifest file names must be distinct".into(),
        ));
    }

    let original = load_cascade(&paths)?;
    let reduction = reduce_cascade(&original);
    let rows = reduction.stage_reports(&original);

    fs::create_dir_all(&a.out_dir).map_err(|e| Failure(format!("{}: {e}", a.out_dir.display())))?;
    let write = |name: &str, text: String| {
        let path = a.out_dir.join(name);
        fs::write(&path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
    };
    for (name, fst) in names.iter().zip(reduction.cascade.stages()) {
        write(name, serialize_fst(fst))?;
    }
    write(
        &manifest_name,
        write_manifest(&Manifest {
            paths: names.clone(),
        }),
    )?;
    if let Some(report) = &a.report {
        fs::write(report, write_report(&rows))
            .map_err(|e| Failure(format!("{}: {e}", report.display())))?;
    }

    print_shrinkage(out, &names, &rows)?;
    Ok(ExitStatus::Success)
}

fn print_shrinkage(
    out: &mut dyn Write,
    names: &[String],
    rows: &[ReductionReport],
) -> Result<(), Failure> {
    let (mut before, mut after) = (0, 0);
    for (name, r) in names.iter().zip(rows) {
        writeln!(
            out,
            "{} {}: arcs {} -> {} ({} reduction)",
            r.stage_index + 1,
            name,
            r.before.arcs,
            r.after.arcs,
            percent(r.before.arcs, r.after.arcs)
        )?;
        before += r.before.arcs;
        after += r.after.arcs;
    }
    writeln!(
        out,
        "total: arcs {before} -> {after} ({} reduction)",
        percent(before, after)
    )?;
    Ok(())
}

fn cmd_apply(
    a: &ApplyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<ExitStatus, Failure> {
    let cascade = load_cascade(&manifest_paths(&a.cascade)?)?;
    let input = tokens(&a.input)?;
    let result = apply_cascade(&cascade, &input, &a.limits.limits()?)?;
    let mut lines: Vec<String> = result.strings.iter().map(|o| join(o)).collect();
    lines.sort();
    for line in lines {
        writeln!(out, "{line}")?;
    }
    if result.truncated {
        writeln!(err, "warning: output truncated by search limits")?;
    }
    Ok(ExitStatus::Success)
}

fn cmd_verify(
    a: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<ExitStatus, Failure> {
    let before = load_cascade(&manifest_paths(&a.before)?)?;
    let after = load_cascade(&manifest_paths(&a.after)?)?;
    let limits = a.limits.limits()?;

    let mut vocab: BTreeSet<Symbol> = if a.vocab == "auto" {
        let mut v = before.stages()[0].input_alphabet();
        v.extend(after.stages()[0].input_alphabet());
        v
    } else {
        a.vocab
            .split([',', ' ', '\t'])
            .filter(|t| !t.is_empty())
            .map(Symbol::new)
            .collect::<Result<_, _>>()?
    };
    if a.probe {
        vocab.insert(Symbol::new(PROBE_TOKEN).expect("probe token is a valid symbol"));
    }

    match compare_cascades(&before, &after, a.max_len, &vocab, &limits)? {
        Verdict::Equal { pairs } => {
            writeln!(
                out,
                "equal: {pairs} pairs, inputs up to length {} over {} tokens",
                a.max_len,
                vocab.len()
            )?;
            Ok(ExitStatus::Success)
        }
        Verdict::Different(w) => {
            let side = match w.side {
                Side::Left => "before",
                Side::Right => "after",
            };
            writeln!(
                out,
                "mismatch: input \"{}\" output \"{}\" only in {side}",
                join(&w.input),
                join(&w.output)
            )?;
            Ok(ExitStatus::VerificationFailed)
        }
        Verdict::Inconclusive { truncated_inputs } => {
            writeln!(
                err,
                "inconclusive: search limits truncated the outputs of {truncated_inputs} inputs"
            )?;
            Ok(ExitStatus::LimitsExceeded)
        }
    }
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<ExitStatus, Failure> {
    let stages = match (&a.fst, &a.cascade) {
        (Some(f), _) => vec![load_fst(f)?],
        (None, Some(m)) => load_cascade(&manifest_paths(m)?)?.into_stages(),
        (None, None) => return Err(Failure("one of --fst or --cascade is required".into())),
    };
    let rows: Vec<ReductionReport> = stages
        .iter()
        .enumerate()
        .map(|(i, f)| ReductionReport {
            stage_index: i,
            before: f.stats(),
            after: f.stats(),
            classes_merged: 0,
            symbols_eliminated: 0,
        })
        .collect();
    out.write_all(write_report(&rows).as_bytes())?;
    Ok(ExitStatus::Success)
}

fn cmd_gen(a: &GenArgs) -> Result<ExitStatus, Failure> {
    let params = GenParams {
        seed: a.seed,
        stages: a.stages,
        states_per_stage: a.states.clone(),
        alphabet_size: a.alphabet.clone(),
        arcs_per_state: a.arcs.clone(),
        redundancy: a.redundancy,
        final_prob: a.final_prob,
        epsilon_prob: a.epsilon_prob,
        unknown_prob: a.unknown_prob,
    };
    let cascade = random_cascade(&params)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Failure(format!("{}: {e}", a.out_dir.display())))?;
    let mut names = Vec::new();
    for (i, fst) in cascade.stages().iter().enumerate() {
        let name = format!("t{}.fst", i + 1);
        fs::write(a.out_dir.join(&name), serialize_fst(fst))?;
        names.push(name);
    }
    fs::write(
        a.out_dir.join("cascade.lst"),
        write_manifest(&Manifest { paths: names }),
    )?;
    Ok(ExitStatus::Success)
}
