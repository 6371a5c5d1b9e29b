use std::fmt;

use super::lang::{Lang, MalformedLang};
use crate::path::RepoPath;
use crate::term::Term;

/// One declaration. `P` is the path representation: raw strings as written
/// in a `.ueber` file or produced by a macro, and [`RepoPath`] once resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decl<P = RepoPath> {
    Language { lang: Lang },
    ElementOf { file: P, lang: Lang },
    NotElementOf { file: P, lang: Lang },
    Membership { lang: Lang, goal: Term, args: Vec<P> },
    Relation { name: String, langs: Vec<Lang>, goal: Term, args: Vec<P> },
    RelatesTo { name: String, files: Vec<P> },
    Function { name: String, inlangs: Vec<Lang>, outlangs: Vec<Lang>, goal: Term, args: Vec<P> },
    MapsTo { name: String, infiles: Vec<P>, outfiles: Vec<P> },
    Equivalence { lang: Lang, goal: Term, args: Vec<P> },
    Normalization { lang: Lang, goal: Term, args: Vec<P> },
    Macro { goal: Term },
}

/// A term that is not one of the declaration forms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeclError {
    #[error("Declaration {0}: unknown form.")]
    UnknownForm(Term),
    #[error("Declaration {decl}: {reason}.")]
    BadArgument { decl: Term, reason: String },
    #[error("Language {0}: malformed.")]
    MalformedLang(Term),
}

impl From<MalformedLang> for DeclError {
    fn from(e: MalformedLang) -> Self {
        DeclError::MalformedLang(e.0)
    }
}

/// Names and arities of the declaration forms.
pub const DECL_FORMS: &[(&str, usize)] = &[
    ("language", 1),
    ("elementOf", 2),
    ("notElementOf", 2),
    ("membership", 3),
    ("relation", 4),
    ("relatesTo", 2),
    ("function", 5),
    ("mapsTo", 3),
    ("equivalence", 3),
    ("normalization", 3),
    ("macro", 1),
];

fn bad(decl: &Term, reason: impl Into<String>) -> DeclError {
    DeclError::BadArgument { decl: decl.clone(), reason: reason.into() }
}

fn name_arg(decl: &Term, t: &Term, what: &str) -> Result<String, DeclError> {
    t.as_atom().map(str::to_string).ok_or_else(|| bad(decl, format!("{what} must be an atom, found {t}")))
}

fn file_arg(decl: &Term, t: &Term) -> Result<String, DeclError> {
    name_arg(decl, t, "file name")
}

fn files_arg(decl: &Term, t: &Term) -> Result<Vec<String>, DeclError> {
    let items = t.as_list().ok_or_else(|| bad(decl, format!("expected a list of file names, found {t}")))?;
    items.iter().map(|f| file_arg(decl, f)).collect()
}

fn lang_arg(t: &Term) -> Result<Lang, DeclError> {
    Ok(Lang::new(t.clone())?)
}

fn langs_arg(decl: &Term, t: &Term) -> Result<Vec<Lang>, DeclError> {
    let items = t.as_list().ok_or_else(|| bad(decl, format!("expected a list of languages, found {t}")))?;
    items.iter().map(lang_arg).collect()
}

fn goal_arg(decl: &Term, t: &Term) -> Result<Term, DeclError> {
    match t {
        Term::Atom(_) | Term::Compound(..) => Ok(t.clone()),
        _ => Err(bad(decl, format!("goal must be an atom or compound, found {t}"))),
    }
}

impl Decl<String> {
    /// Maps a declaration term onto its form, checking argument shapes.
    pub fn from_term(t: &Term) -> Result<Self, DeclError> {
        let Some(functor) = t.functor() else {
            return Err(DeclError::UnknownForm(t.clone()));
        };
        let a = t.args();
        let decl = match (functor, a.len()) {
            ("language", 1) => Decl::Language { lang: lang_arg(&a[0])? },
            ("elementOf", 2) => Decl::ElementOf { file: file_arg(t, &a[0])?, lang: lang_arg(&a[1])? },
            ("notElementOf", 2) => Decl::NotElementOf { file: file_arg(t, &a[0])?, lang: lang_arg(&a[1])? },
            ("membership", 3) => Decl::Membership {
                lang: lang_arg(&a[0])?,
                goal: goal_arg(t, &a[1])?,
                args: files_arg(t, &a[2])?,
            },
            ("relation", 4) => Decl::Relation {
                name: name_arg(t, &a[0], "relation name")?,
                langs: langs_arg(t, &a[1])?,
                goal: goal_arg(t, &a[2])?,
                args: files_arg(t, &a[3])?,
            },
            ("relatesTo", 2) => Decl::RelatesTo {
                name: name_arg(t, &a[0], "relation name")?,
                files: files_arg(t, &a[1])?,
            },
            ("function", 5) => Decl::Function {
                name: name_arg(t, &a[0], "function name")?,
                inlangs: langs_arg(t, &a[1])?,
                outlangs: langs_arg(t, &a[2])?,
                goal: goal_arg(t, &a[3])?,
                args: files_arg(t, &a[4])?,
            },
            ("mapsTo", 3) => Decl::MapsTo {
                name: name_arg(t, &a[0], "function name")?,
                infiles: files_arg(t, &a[1])?,
                outfiles: files_arg(t, &a[2])?,
            },
            ("equivalence", 3) => Decl::Equivalence {
                lang: lang_arg(&a[0])?,
                goal: goal_arg(t, &a[1])?,
                args: files_arg(t, &a[2])?,
            },
            ("normalization", 3) => Decl::Normalization {
                lang: lang_arg(&a[0])?,
                goal: goal_arg(t, &a[1])?,
                args: files_arg(t, &a[2])?,
            },
            ("macro", 1) => Decl::Macro { goal: goal_arg(t, &a[0])? },
            _ => return Err(DeclError::UnknownForm(t.clone())),
        };
        Ok(decl)
    }
}

impl<P> Decl<P> {
    /// Rewrites every embedded path, failing on the first error.
    pub fn try_map_paths<Q, E>(self, mut f: impl FnMut(P) -> Result<Q, E>) -> Result<Decl<Q>, E> {
        let mut many = |v: Vec<P>| v.into_iter().map(&mut f).collect::<Result<Vec<Q>, E>>();
        Ok(match self {
            Decl::Language { lang } => Decl::Language { lang },
            Decl::ElementOf { file, lang } => Decl::ElementOf { file: many(vec![file])?.pop().unwrap(), lang },
            Decl::NotElementOf { file, lang } => Decl::NotElementOf { file: many(vec![file])?.pop().unwrap(), lang },
            Decl::Membership { lang, goal, args } => Decl::Membership { lang, goal, args: many(args)? },
            Decl::Relation { name, langs, goal, args } => Decl::Relation { name, langs, goal, args: many(args)? },
            Decl::RelatesTo { name, files } => Decl::RelatesTo { name, files: many(files)? },
            Decl::Function { name, inlangs, outlangs, goal, args } => {
                Decl::Function { name, inlangs, outlangs, goal, args: many(args)? }
            }
            Decl::MapsTo { name, infiles, outfiles } => {
                let infiles = many(infiles)?;
                Decl::MapsTo { name, infiles, outfiles: many(outfiles)? }
            }
            Decl::Equivalence { lang, goal, args } => Decl::Equivalence { lang, goal, args: many(args)? },
            Decl::Normalization { lang, goal, args } => Decl::Normalization { lang, goal, args: many(args)? },
            Decl::Macro { goal } => Decl::Macro { goal },
        })
    }

    /// Relations become output-less functions; relatesTo becomes mapsTo
    /// without outputs.
    pub fn desugar(self) -> Self {
        match self {
            Decl::Relation { name, langs, goal, args } => {
                Decl::Function { name, inlangs: langs, outlangs: Vec::new(), goal, args }
            }
            Decl::RelatesTo { name, files } => Decl::MapsTo { name, infiles: files, outfiles: Vec::new() },
            other => other,
        }
    }

    /// Files whose contents a declaration talks about (not predicate arguments).
    pub fn subject_files(&self) -> Vec<&P> {
        match self {
            Decl::ElementOf { file, .. } | Decl::NotElementOf { file, .. } => vec![file],
            Decl::RelatesTo { files, .. } => files.iter().collect(),
            Decl::MapsTo { infiles, outfiles, .. } => infiles.iter().chain(outfiles).collect(),
            _ => Vec::new(),
        }
    }

    pub fn form(&self) -> &'static str {
        match self {
            Decl::Language { .. } => "language",
            Decl::ElementOf { .. } => "elementOf",
            Decl::NotElementOf { .. } => "notElementOf",
            Decl::Membership { .. } => "membership",
            Decl::Relation { .. } => "relation",
            Decl::RelatesTo { .. } => "relatesTo",
            Decl::Function { .. } => "function",
            Decl::MapsTo { .. } => "mapsTo",
            Decl::Equivalence { .. } => "equivalence",
            Decl::Normalization { .. } => "normalization",
            Decl::Macro { .. } => "macro",
        }
    }
}

pub(crate) fn path_term<P: fmt::Display>(p: &P) -> Term {
    Term::Atom(p.to_string())
}

pub(crate) fn paths_term<P: fmt::Display>(ps: &[P]) -> Term {
    Term::List(ps.iter().map(path_term).collect())
}

pub(crate) fn langs_term(ls: &[Lang]) -> Term {
    Term::List(ls.iter().map(|l| l.term().clone()).collect())
}

impl<P: fmt::Display> Decl<P> {
    /// The declaration as written in a `.ueber` file.
    pub fn to_term(&self) -> Term {
        let c = |args: Vec<Term>| Term::compound(self.form(), args);
        match self {
            Decl::Language { lang } => c(vec![lang.term().clone()]),
            Decl::ElementOf { file, lang } | Decl::NotElementOf { file, lang } => {
                c(vec![path_term(file), lang.term().clone()])
            }
            Decl::Membership { lang, goal, args }
            | Decl::Equivalence { lang, goal, args }
            | Decl::Normalization { lang, goal, args } => c(vec![lang.term().clone(), goal.clone(), paths_term(args)]),
            Decl::Relation { name, langs, goal, args } => {
                c(vec![Term::atom(name), langs_term(langs), goal.clone(), paths_term(args)])
            }
            Decl::RelatesTo { name, files } => c(vec![Term::atom(name), paths_term(files)]),
            Decl::Function { name, inlangs, outlangs, goal, args } => c(vec![
                Term::atom(name),
                langs_term(inlangs),
                langs_term(outlangs),
                goal.clone(),
                paths_term(args),
            ]),
            Decl::MapsTo { name, infiles, outfiles } => {
                c(vec![Term::atom(name), paths_term(infiles), paths_term(outfiles)])
            }
            Decl::Macro { goal } => c(vec![goal.clone()]),
        }
    }
}

impl<P: fmt::Display> fmt::Display for Decl<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}
