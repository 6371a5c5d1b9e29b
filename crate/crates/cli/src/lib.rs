//! The `ueber` command: collection, well-formedness checking and
//! verification of a repository, with a text or JSON report.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use ueber_core::checker::check_each;
use ueber_core::{collect, standard_registry, CollectedModel, Decl, HostConfig, Mode, PluginHost, Problem, Severity, Verifier};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROBLEMS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Check,
    Override,
    Create,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Check => Mode::Check,
            ModeArg::Override => Mode::Override,
            ModeArg::Create => Mode::Create,
        }
    }
}

/// Check and maintain the declared relationships of a language repository.
#[derive(Debug, Parser)]
#[command(name = "ueber", version)]
pub struct Args {
    /// Repository root.
    #[arg(long, default_value = ".")]
    pub root: PathBuf,
    /// check: report only; override: rewrite disagreeing baselines;
    /// create: write missing baselines.
    #[arg(long, value_enum, default_value = "check")]
    mode: ModeArg,
    /// Foreign plugin languages allowed to run (python, exec, java, haskell).
    #[arg(long = "enable-ffi", value_delimiter = ',', value_name = "TAG")]
    pub enable_ffi: Vec<String>,
    /// Verify only declarations whose origin or subject files match.
    #[arg(long, value_name = "GLOB")]
    pub filter: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub report: Format,
    /// Per-invocation limit for foreign plugins.
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<f64>,
    /// Interpreter for python plugins.
    #[arg(long, value_name = "PATH")]
    pub python: Option<String>,
}

impl Args {
    pub fn mode(&self) -> Mode {
        self.mode.into()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub files: usize,
    pub declarations: usize,
    pub languages: usize,
    pub functions: usize,
    pub applications: usize,
    /// Foreign invocations not run because their language is not enabled.
    pub skipped: usize,
}

impl Counts {
    fn of(m: &CollectedModel) -> Counts {
        let count = |f: fn(&Decl) -> bool| m.decls.iter().filter(|sd| f(&sd.decl)).count();
        Counts {
            files: m.files,
            declarations: m.decls.len(),
            languages: count(|d| matches!(d, Decl::Language { .. })),
            functions: count(|d| matches!(d, Decl::Function { .. })),
            applications: count(|d| matches!(d, Decl::MapsTo { .. })),
            skipped: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProblemRecord {
    pub severity: Severity,
    pub message: String,
    pub details: Vec<String>,
    pub decl: Option<String>,
    pub origin: String,
    pub line: usize,
}

impl From<&Problem> for ProblemRecord {
    fn from(p: &Problem) -> Self {
        ProblemRecord {
            severity: p.severity,
            message: p.message.clone(),
            details: p.details.clone(),
            decl: p.decl.as_ref().map(Decl::to_string),
            origin: p.origin.to_string(),
            line: p.line,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub counts: Counts,
    pub mode: Mode,
    pub elapsed_s: f64,
    pub problems: Vec<ProblemRecord>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.problems.iter().filter(|p| p.severity.is_failure()).count()
    }

    pub fn warnings(&self) -> usize {
        self.problems.len() - self.failures()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            EXIT_OK
        } else {
            EXIT_PROBLEMS
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("bad --filter pattern: {0}")]
    Filter(#[from] glob::PatternError),
    #[error("cannot read repository {}: {source}", root.display())]
    Io { root: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Filter(_) => EXIT_USAGE,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

fn host_config(args: &Args) -> HostConfig {
    let mut cfg = HostConfig::new(&args.root);
    for tag in &args.enable_ffi {
        cfg = cfg.enable(tag.trim());
    }
    if let Some(secs) = args.timeout {
        cfg.timeout = Duration::from_secs_f64(secs);
    }
    if let Some(py) = &args.python {
        cfg.python = py.clone();
    }
    cfg
}

fn severity_rank(s: Severity) -> u8 {
    match s {
        Severity::IllFormed => 0,
        Severity::Unverified => 1,
        Severity::Warning => 2,
    }
}

/// Runs the full pipeline and assembles the report.
pub fn build_report(args: &Args) -> Result<Report, RunError> {
    let start = Instant::now();
    let filter = args.filter.as_deref().map(glob::Pattern::new).transpose()?;
    if !args.root.is_dir() {
        let source = std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory");
        return Err(RunError::Io { root: args.root.clone(), source });
    }
    let model = collect(&args.root).map_err(|source| RunError::Io { root: args.root.clone(), source })?;

    let checked = check_each(&model);
    let ill_formed: Vec<bool> = checked.iter().map(|fs| fs.iter().any(|f| f.severity == Severity::IllFormed)).collect();
    let selected = |i: usize| {
        let sd = &model.decls[i];
        let matching = match &filter {
            None => true,
            Some(g) => g.matches(sd.origin.as_str()) || sd.decl.subject_files().iter().any(|f| g.matches(f.as_str())),
        };
        !ill_formed[i] && matching
    };

    let host = PluginHost::new(standard_registry(), host_config(args));
    let verified = Verifier::new(&model, &host, args.mode()).run(selected);

    let mut problems: Vec<&Problem> = model.problems.iter().collect();
    let check_problems: Vec<Problem> = checked
        .into_iter()
        .zip(&model.decls)
        .flat_map(|(fs, sd)| fs.into_iter().map(move |f| f.at(sd)))
        .collect();
    problems.extend(&check_problems);
    problems.extend(&verified);
    problems.sort_by_key(|p| severity_rank(p.severity));

    let mut counts = Counts::of(&model);
    counts.skipped = host.skipped();
    Ok(Report {
        counts,
        mode: args.mode(),
        elapsed_s: start.elapsed().as_secs_f64(),
        problems: problems.into_iter().map(ProblemRecord::from).collect(),
    })
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Text lists each problem as `SEVERITY: <declaration>` with indented
/// location, message and details, then one summary line. JSON is the
/// serialized report.
pub fn render_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            for p in &r.problems {
                let subject = p.decl.as_deref().unwrap_or(&p.origin);
                out.push_str(&format!("{}: {subject}\n", p.severity));
                out.push_str(&format!("  at {}:{}\n", p.origin, p.line));
                out.push_str(&format!("  {}\n", p.message));
                for d in &p.details {
                    out.push_str(&format!("    {d}\n"));
                }
            }
            let failures = r.failures();
            let verdict = if failures == 0 { "OK" } else { "NOT OK" };
            let mut summary = format!("{verdict}: {}", plural(failures, "problem"));
            if r.warnings() > 0 {
                summary.push_str(&format!(", {}", plural(r.warnings(), "warning")));
            }
            if r.counts.skipped > 0 {
                summary.push_str(&format!(", {} skipped", plural(r.counts.skipped, "foreign invocation")));
            }
            out.push_str(&format!("{summary} ({} checked)\n", plural(r.counts.declarations, "declaration")));
            out
        }
    }
}

/// Parses `argv`, runs and prints; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match build_report(&args) {
        Ok(r) => match out.write_all(render_report(&r, args.report).as_bytes()) {
            Ok(()) => r.exit_code(),
            Err(_) => EXIT_IO,
        },
        Err(e) => {
            let _ = writeln!(err, "ueber: {e}");
            e.exit_code()
        }
    }
}
