use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use crate::content::Content;
use crate::megamodel::Lang;
use crate::path::RepoPath;
use crate::term::{read_term, Term};

/// Static argument of a call: a repository file passed by path.
#[derive(Debug, Clone)]
pub struct StaticArg {
    pub path: RepoPath,
    pub fs_path: PathBuf,
}

/// Everything a native predicate sees.
#[derive(Debug)]
pub struct NativeCall<'a> {
    pub preapplied: &'a [Term],
    pub static_args: Vec<StaticArg>,
    pub inputs: &'a [Content],
    pub inlangs: &'a [Lang],
    pub outlangs: &'a [Lang],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NativeError {
    /// The predicate does not hold.
    Failed(String),
    /// The predicate could not be evaluated.
    Fault(String),
}

impl NativeError {
    pub fn fail(msg: impl Into<String>) -> Self {
        NativeError::Failed(msg.into())
    }

    pub fn fault(msg: impl Into<String>) -> Self {
        NativeError::Fault(msg.into())
    }
}

impl fmt::Display for NativeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NativeError::Failed(m) | NativeError::Fault(m) => f.write_str(m),
        }
    }
}

pub type NativeFn = Arc<dyn Fn(&NativeCall<'_>) -> Result<Vec<Content>, NativeError> + Send + Sync>;

impl<'a> NativeCall<'a> {
    pub fn output_slots(&self) -> usize {
        self.outlangs.len()
    }

    pub fn preapplied_atom(&self, i: usize) -> Result<&'a str, NativeError> {
        self.preapplied
            .get(i)
            .and_then(Term::as_atom)
            .ok_or_else(|| NativeError::fault(format!("preapplied argument {} must be an atom", i + 1)))
    }

    pub fn input(&self, i: usize) -> Result<&'a Content, NativeError> {
        self.inputs.get(i).ok_or_else(|| NativeError::fault(format!("missing input {}", i + 1)))
    }

    pub fn input_text(&self, i: usize) -> Result<&'a str, NativeError> {
        self.input(i)?.text().map_err(|e| NativeError::fail(format!("input {}: {e}", i + 1)))
    }

    pub fn input_term(&self, i: usize) -> Result<&'a Term, NativeError> {
        self.input(i)?
            .term()
            .ok_or_else(|| NativeError::fault(format!("input {} is not term content", i + 1)))
    }

    fn static_arg(&self, i: usize) -> Result<&StaticArg, NativeError> {
        self.static_args
            .get(i)
            .ok_or_else(|| NativeError::fault(format!("missing static argument {}", i + 1)))
    }

    pub fn static_text(&self, i: usize) -> Result<String, NativeError> {
        let arg = self.static_arg(i)?;
        std::fs::read_to_string(&arg.fs_path).map_err(|e| NativeError::fault(format!("{}: {e}", arg.path)))
    }

    pub fn static_term(&self, i: usize) -> Result<Term, NativeError> {
        let path = &self.static_arg(i)?.path;
        read_term(&self.static_text(i)?).map_err(|e| NativeError::fault(format!("{path}: {e}")))
    }

    fn outlang(&self, j: usize) -> Result<&'a Lang, NativeError> {
        self.outlangs.get(j).ok_or_else(|| NativeError::fault(format!("no output slot {}", j + 1)))
    }

    pub fn out_term(&self, j: usize, term: Term) -> Result<Content, NativeError> {
        Ok(Content::from_term(self.outlang(j)?.clone(), term))
    }

    pub fn out_text(&self, j: usize, text: impl Into<String>) -> Result<Content, NativeError> {
        Content::from_text(self.outlang(j)?.clone(), text)
            .map_err(|e| NativeError::fault(format!("output {}: {e}", j + 1)))
    }
}

/// Named native predicates.
#[derive(Clone, Default)]
pub struct NativeRegistry {
    fns: HashMap<String, NativeFn>,
}

impl fmt::Debug for NativeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.fns.keys().collect();
        names.sort();
        f.debug_struct("NativeRegistry").field("fns", &names).finish()
    }
}

impl NativeRegistry {
    pub fn new() -> Self {
        NativeRegistry::default()
    }

    /// Registers `f` under `name`, replacing any earlier entry.
    pub fn register<F>(&mut self, name: &str, f: F) -> &mut Self
    where
        F: Fn(&NativeCall<'_>) -> Result<Vec<Content>, NativeError> + Send + Sync + 'static,
    {
        self.fns.insert(name.to_string(), Arc::new(f));
        self
    }

    pub fn get(&self, name: &str) -> Option<&NativeFn> {
        self.fns.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.fns.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<NativeFn> {
        self.fns.remove(name)
    }

    pub fn names(&self) -> Vec<&str> {
        let mut ns: Vec<&str> = self.fns.keys().map(String::as_str).collect();
        ns.sort_unstable();
        ns
    }
}
