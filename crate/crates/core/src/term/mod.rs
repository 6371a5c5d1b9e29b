//! Ground symbolic terms.
//!
//! Terms name languages, carry declarations, and are the content of every
//! `.term` artifact. The syntax is a small Prolog-like subset: atoms, integers,
//! floats, compounds, lists, and the arithmetic operators `+`, `-` (infix and
//! prefix) and `^`.

mod printer;
mod reader;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

pub use printer::write_term;
pub use reader::{read_term, read_term_file, read_terms, SpannedTerm};

/// Operator fixity in the fixed operator table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixity {
    InfixLeft,
    InfixRight,
    Prefix,
}

/// One entry of the operator table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorDef {
    pub symbol: &'static str,
    pub precedence: u16,
    pub fixity: Fixity,
}

/// The complete operator table. It is not extensible at run time.
pub const OPERATORS: &[OperatorDef] = &[
    OperatorDef { symbol: "+", precedence: 500, fixity: Fixity::InfixLeft },
    OperatorDef { symbol: "-", precedence: 500, fixity: Fixity::InfixLeft },
    OperatorDef { symbol: "^", precedence: 200, fixity: Fixity::InfixRight },
    OperatorDef { symbol: "-", precedence: 200, fixity: Fixity::Prefix },
];

pub(crate) const MAX_PRECEDENCE: u16 = 1200;
pub(crate) const ARG_PRECEDENCE: u16 = 999;

pub(crate) fn infix_op(symbol: &str) -> Option<OperatorDef> {
    OPERATORS
        .iter()
        .copied()
        .find(|op| op.symbol == symbol && op.fixity != Fixity::Prefix)
}

pub(crate) fn prefix_op(symbol: &str) -> Option<OperatorDef> {
    OPERATORS
        .iter()
        .copied()
        .find(|op| op.symbol == symbol && op.fixity == Fixity::Prefix)
}

/// A ground term.
///
/// `Compound` always has at least one argument; use [`Term::compound`] to
/// build one, which falls back to an `Atom` for an empty argument list.
/// Floats are compared and hashed by bit pattern so that `Term` can be a
/// map key; they are expected to be finite.
#[derive(Debug, Clone)]
pub enum Term {
    Atom(String),
    Int(i64),
    Float(f64),
    Compound(String, Vec<Term>),
    List(Vec<Term>),
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Term {
        Term::Atom(name.into())
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor.into())
        } else {
            Term::Compound(functor.into(), args)
        }
    }

    pub fn list(items: Vec<Term>) -> Term {
        Term::List(items)
    }

    /// Binary operator application, e.g. `Term::op("+", a, b)`.
    pub fn op(symbol: &str, left: Term, right: Term) -> Term {
        Term::Compound(symbol.to_string(), vec![left, right])
    }

    pub fn neg(arg: Term) -> Term {
        Term::Compound("-".to_string(), vec![arg])
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Term::Atom(name) => Some(name),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Term]> {
        match self {
            Term::List(items) => Some(items),
            _ => None,
        }
    }

    /// Name of an atom or compound.
    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Atom(name) | Term::Compound(name, _) => Some(name),
            _ => None,
        }
    }

    /// Arguments of a compound; empty for everything else.
    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    /// `true` if this is an atom or compound with the given name and arity.
    pub fn is_callable(&self, name: &str, arity: usize) -> bool {
        self.functor() == Some(name) && self.arity() == arity
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Term::Int(i) => Some(*i as f64),
            Term::Float(f) => Some(*f),
            _ => None,
        }
    }

    /// Canonical text followed by the clause terminator and a newline, as
    /// written to a term file.
    pub fn to_file_string(&self) -> String {
        format!("{}.\n", write_term(self))
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Atom(a), Term::Atom(b)) => a == b,
            (Term::Int(a), Term::Int(b)) => a == b,
            (Term::Float(a), Term::Float(b)) => a.to_bits() == b.to_bits(),
            (Term::Compound(f, xs), Term::Compound(g, ys)) => f == g && xs == ys,
            (Term::List(xs), Term::List(ys)) => xs == ys,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Atom(a) => a.hash(state),
            Term::Int(i) => i.hash(state),
            Term::Float(f) => f.to_bits().hash(state),
            Term::Compound(f, args) => {
                f.hash(state);
                args.hash(state);
            }
            Term::List(items) => items.hash(state),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_term(self))
    }
}

impl From<&str> for Term {
    fn from(name: &str) -> Self {
        Term::Atom(name.to_string())
    }
}

impl From<i64> for Term {
    fn from(value: i64) -> Self {
        Term::Int(value)
    }
}

/// Errors from reading terms.
#[derive(Debug, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at {line}:{column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl TermError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        TermError::Io { path: path.to_path_buf(), source }
    }
}
