//! Predicate resolution and invocation.
//!
//! A declaration's goal term names either a native built-in (looked up in a
//! [`NativeRegistry`]) or a foreign unit run as a subprocess. Foreign goals
//! are compounds whose functor is a foreign language tag, e.g.
//! `python('accept.py')`; every other goal is native, and its compound
//! arguments are preapplied.
//!
//! # Foreign protocol
//!
//! For each invocation a fresh scratch directory receives the inputs as
//! `in.<i>.<ext>` and empty output files `out.<j>.<ext>` (0-based, `ext` is
//! the base representation type of the language, e.g. `text` or `term`).
//! The command line is
//!
//! ```text
//! runner... unit preapplied... static-args... input-paths... output-paths...
//! ```
//!
//! with preapplied arguments printed as terms and every path absolute. The
//! process runs in the declaring directory with `UEBER_INLANGS`,
//! `UEBER_OUTLANGS` (comma-separated printed languages) and `UEBER_ROOT`
//! set. Exit status 0 means success, after which the output files are read
//! back; anything else is a failure carrying the captured stderr.

mod foreign;
mod manifest;
mod native;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

pub use manifest::{PluginManifest, MANIFEST_FILE_NAME, STAMP_FILE_NAME};
pub use native::{NativeCall, NativeError, NativeFn, NativeRegistry, StaticArg};

use crate::content::Content;
use crate::megamodel::Lang;
use crate::path::RepoPath;
use crate::term::{write_term, Term};

/// Default per-invocation timeout for foreign predicates.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// Captured stderr in failure reports is cut to this many bytes.
pub const STDERR_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForeignLang {
    Python,
    Exec,
    Java,
    Haskell,
}

impl ForeignLang {
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "python" => Some(ForeignLang::Python),
            "exec" => Some(ForeignLang::Exec),
            "java" => Some(ForeignLang::Java),
            "haskell" => Some(ForeignLang::Haskell),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ForeignLang::Python => "python",
            ForeignLang::Exec => "exec",
            ForeignLang::Java => "java",
            ForeignLang::Haskell => "haskell",
        }
    }
}

/// How a declaration's goal is executed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredicateSpec {
    Native {
        name: String,
        preapplied: Vec<Term>,
    },
    Foreign {
        lang: ForeignLang,
        unit: String,
        preapplied: Vec<Term>,
        /// Directory of the declaring `.ueber` file.
        dir: RepoPath,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredicateError {
    #[error("Predicate {0}: malformed.")]
    Malformed(Term),
    #[error("Predicate {0}: foreign unit must be an atom.")]
    BadUnit(Term),
}

impl PredicateSpec {
    pub fn from_goal(goal: &Term, dir: &RepoPath) -> Result<Self, PredicateError> {
        match goal {
            Term::Atom(name) => Ok(PredicateSpec::Native { name: name.clone(), preapplied: Vec::new() }),
            Term::Compound(f, args) => match ForeignLang::from_tag(f) {
                Some(lang) => {
                    let unit = args[0].as_atom().ok_or_else(|| PredicateError::BadUnit(goal.clone()))?;
                    Ok(PredicateSpec::Foreign {
                        lang,
                        unit: unit.to_string(),
                        preapplied: args[1..].to_vec(),
                        dir: dir.clone(),
                    })
                }
                None => Ok(PredicateSpec::Native { name: f.clone(), preapplied: args.clone() }),
            },
            _ => Err(PredicateError::Malformed(goal.clone())),
        }
    }

    pub fn is_foreign(&self) -> bool {
        matches!(self, PredicateSpec::Foreign { .. })
    }

    /// The goal term this spec was parsed from.
    pub fn to_goal(&self) -> Term {
        match self {
            PredicateSpec::Native { name, preapplied } => Term::compound(name.clone(), preapplied.clone()),
            PredicateSpec::Foreign { lang, unit, preapplied, .. } => {
                let mut args = vec![Term::atom(unit.clone())];
                args.extend(preapplied.iter().cloned());
                Term::compound(lang.tag(), args)
            }
        }
    }
}

impl fmt::Display for PredicateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_goal().fmt(f)
    }
}

/// Host settings shared by all invocations of a run.
#[derive(Debug, Clone)]
pub struct HostConfig {
    /// Repository root on disk.
    pub root: PathBuf,
    /// Foreign language tags allowed to run; all others are skipped.
    pub enabled_ffi: BTreeSet<String>,
    /// Interpreter command for `python` units.
    pub python: String,
    pub timeout: Duration,
}

impl HostConfig {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        HostConfig {
            root: root.into(),
            enabled_ffi: BTreeSet::new(),
            python: "python3".to_string(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn enable(mut self, tag: &str) -> Self {
        self.enabled_ffi.insert(tag.to_string());
        self
    }
}

/// `true` if `pred` may run under `cfg`. Natives always may.
pub fn is_enabled(cfg: &HostConfig, pred: &PredicateSpec) -> bool {
    match pred {
        PredicateSpec::Native { .. } => true,
        PredicateSpec::Foreign { lang, .. } => cfg.enabled_ffi.contains(lang.tag()),
    }
}

/// One call of a predicate.
#[derive(Debug, Clone)]
pub struct InvocationRequest<'a> {
    pub pred: &'a PredicateSpec,
    pub static_args: &'a [RepoPath],
    pub inlangs: &'a [Lang],
    pub outlangs: &'a [Lang],
    pub inputs: &'a [Content],
}

/// Faults of the host itself, as opposed to a predicate failing.
#[derive(Debug, thiserror::Error)]
pub enum HostError {
    #[error("native predicate {0} is not registered")]
    UnknownNative(String),
    #[error("native predicate {name}: {message}")]
    Native { name: String, message: String },
    #[error("no runner for foreign language {0}")]
    NoRunner(&'static str),
    #[error("cannot start `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("build in {} failed: {stderr}", dir.display())]
    BuildFailed { dir: PathBuf, stderr: String },
    #[error("bad plugin manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

impl HostError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HostError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InvokeError {
    /// The predicate ran and reported failure.
    #[error("{reason}")]
    Failed {
        reason: String,
        /// Scratch directory kept for inspection.
        scratch: Option<PathBuf>,
    },
    /// The predicate is gated off by configuration and was not run.
    #[error("foreign language {0} is not enabled")]
    Disabled(&'static str),
    #[error(transparent)]
    Host(#[from] HostError),
}

impl InvokeError {
    pub(crate) fn failed(reason: impl Into<String>) -> Self {
        InvokeError::Failed { reason: reason.into(), scratch: None }
    }
}

/// Runs predicates. Shareable across threads; foreign builds are serialized
/// per manifest directory.
pub struct PluginHost {
    registry: NativeRegistry,
    cfg: HostConfig,
    scratch_root: Mutex<Option<PathBuf>>,
    next_invocation: AtomicUsize,
    retain_scratch: AtomicBool,
    build_locks: Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>,
    spawned: AtomicUsize,
    skipped: AtomicUsize,
}

impl PluginHost {
    pub fn new(registry: NativeRegistry, cfg: HostConfig) -> Self {
        PluginHost {
            registry,
            cfg,
            scratch_root: Mutex::new(None),
            next_invocation: AtomicUsize::new(0),
            retain_scratch: AtomicBool::new(false),
            build_locks: Mutex::new(HashMap::new()),
            spawned: AtomicUsize::new(0),
            skipped: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &HostConfig {
        &self.cfg
    }

    pub fn registry(&self) -> &NativeRegistry {
        &self.registry
    }

    pub fn is_enabled(&self, pred: &PredicateSpec) -> bool {
        is_enabled(&self.cfg, pred)
    }

    /// Like [`PluginHost::is_enabled`], but a gated predicate counts as
    /// skipped.
    pub fn admit(&self, pred: &PredicateSpec) -> bool {
        let ok = self.is_enabled(pred);
        if !ok {
            self.skipped.fetch_add(1, Ordering::Relaxed);
        }
        ok
    }

    /// Number of foreign processes started so far.
    pub fn spawned(&self) -> usize {
        self.spawned.load(Ordering::Relaxed)
    }

    /// Number of invocations skipped because of gating.
    pub fn skipped(&self) -> usize {
        self.skipped.load(Ordering::Relaxed)
    }

    pub fn invoke(&self, req: &InvocationRequest<'_>) -> Result<Vec<Content>, InvokeError> {
        debug_assert_eq!(req.inputs.len(), req.inlangs.len());
        match req.pred {
            PredicateSpec::Native { name, preapplied } => self.invoke_native(name, preapplied, req),
            PredicateSpec::Foreign { lang, .. } => {
                if !self.is_enabled(req.pred) {
                    self.skipped.fetch_add(1, Ordering::Relaxed);
                    return Err(InvokeError::Disabled(lang.tag()));
                }
                self.invoke_foreign(req)
            }
        }
    }

    fn invoke_native(&self, name: &str, preapplied: &[Term], req: &InvocationRequest<'_>) -> Result<Vec<Content>, InvokeError> {
        let f = self.registry.get(name).ok_or_else(|| HostError::UnknownNative(name.to_string()))?;
        let static_args = req
            .static_args
            .iter()
            .map(|p| StaticArg { path: p.clone(), fs_path: p.to_fs(&self.cfg.root) })
            .collect();
        let call = NativeCall {
            preapplied,
            static_args,
            inputs: req.inputs,
            inlangs: req.inlangs,
            outlangs: req.outlangs,
        };
        let outputs = f(&call).map_err(|e| match e {
            NativeError::Failed(reason) => InvokeError::failed(reason),
            NativeError::Fault(message) => InvokeError::Host(HostError::Native { name: name.to_string(), message }),
        })?;
        if outputs.len() != req.outlangs.len() {
            return Err(InvokeError::Host(HostError::Native {
                name: name.to_string(),
                message: format!("produced {} outputs, expected {}", outputs.len(), req.outlangs.len()),
            }));
        }
        Ok(outputs)
    }

    fn scratch_root(&self) -> Result<PathBuf, HostError> {
        let mut guard = self.scratch_root.lock().unwrap();
        if let Some(p) = guard.as_ref() {
            return Ok(p.clone());
        }
        let dir = tempfile::Builder::new()
            .prefix("ueber-run-")
            .tempdir()
            .map_err(|e| HostError::io(&std::env::temp_dir(), e))?;
        let path = dir.keep();
        *guard = Some(path.clone());
        Ok(path)
    }

    fn fresh_scratch_dir(&self) -> Result<PathBuf, HostError> {
        let n = self.next_invocation.fetch_add(1, Ordering::Relaxed);
        let dir = self.scratch_root()?.join(format!("inv-{n:05}"));
        std::fs::create_dir_all(&dir).map_err(|e| HostError::io(&dir, e))?;
        Ok(dir)
    }

    /// Runs the manifest's build command if its sources are newer than the
    /// stamp. Concurrent calls for one directory are serialized.
    pub fn ensure_built(&self, manifest: &PluginManifest) -> Result<bool, HostError> {
        let lock = {
            let mut locks = self.build_locks.lock().unwrap();
            locks.entry(manifest.dir.clone()).or_default().clone()
        };
        let _guard = lock.lock().unwrap();
        manifest.ensure_built()
    }
}

impl Drop for PluginHost {
    fn drop(&mut self) {
        if let Some(root) = self.scratch_root.get_mut().ok().and_then(Option::take) {
            if !self.retain_scratch.load(Ordering::Relaxed) {
                let _ = std::fs::remove_dir_all(root);
            }
        }
    }
}

/// Joins printed languages for the `UEBER_INLANGS`/`UEBER_OUTLANGS` variables.
pub fn langs_env(langs: &[Lang]) -> String {
    langs.iter().map(|l| write_term(l.term())).collect::<Vec<_>>().join(",")
}
