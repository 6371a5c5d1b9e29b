//! Relationship patterns: named expanders that generate groups of
//! declarations.

use std::collections::HashMap;
use std::sync::Arc;

use super::decl::{Decl, DeclError};
use super::lang::Lang;
use crate::path::split_extension;
use crate::term::Term;

pub const MAX_EXPANSION_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MacroError {
    #[error("Macro {name}/{arity}: missing.")]
    UnknownMacro { name: String, arity: usize },
    #[error("Macro {goal}: {reason}.")]
    BadArgument { goal: Term, reason: String },
    #[error("Macro {0}: expansion depth exceeded.")]
    ExpansionDepthExceeded(Term),
    #[error(transparent)]
    Decl(#[from] DeclError),
}

/// An expander receives the macro goal's arguments and returns declarations,
/// which may contain further `macro(...)` declarations.
pub type Expander = Arc<dyn Fn(&[Term]) -> Result<Vec<Decl<String>>, String> + Send + Sync>;

#[derive(Clone)]
pub struct MacroRegistry {
    expanders: HashMap<(String, usize), Expander>,
}

impl Default for MacroRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl MacroRegistry {
    pub fn empty() -> Self {
        MacroRegistry { expanders: HashMap::new() }
    }

    /// `fxy`, `parseFile`, `parseable`, `unparseable`, `well_formed`,
    /// `ill_formed` and `basicSyntax`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("fxy", 5, fxy);
        r.register("parseFile", 1, |a| parse_file(&a[0]));
        r.register("parseable", 1, |a| parseable(&a[0]));
        r.register("unparseable", 1, |a| unparseable(&a[0]));
        r.register("well_formed", 1, |a| sample_with_ok(&a[0], false));
        r.register("ill_formed", 1, |a| sample_with_ok(&a[0], true));
        r.register("basicSyntax", 1, |a| basic_syntax(&a[0]));
        r
    }

    /// Adds or replaces an expander for `name/arity`.
    pub fn register<F>(&mut self, name: &str, arity: usize, f: F)
    where
        F: Fn(&[Term]) -> Result<Vec<Decl<String>>, String> + Send + Sync + 'static,
    {
        self.expanders.insert((name.to_string(), arity), Arc::new(f));
    }

    /// Expands `goal` recursively until no macro declarations remain.
    pub fn expand(&self, goal: &Term) -> Result<Vec<Decl<String>>, MacroError> {
        let mut out = Vec::new();
        self.expand_into(goal, 0, &mut out)?;
        Ok(out)
    }

    fn expand_into(&self, goal: &Term, depth: usize, out: &mut Vec<Decl<String>>) -> Result<(), MacroError> {
        if depth >= MAX_EXPANSION_DEPTH {
            return Err(MacroError::ExpansionDepthExceeded(goal.clone()));
        }
        let name = goal.functor().unwrap_or_default().to_string();
        let key = (name, goal.arity());
        let expander = self
            .expanders
            .get(&key)
            .ok_or_else(|| MacroError::UnknownMacro { name: key.0.clone(), arity: key.1 })?;
        let decls = expander(goal.args())
            .map_err(|reason| MacroError::BadArgument { goal: goal.clone(), reason })?;
        for d in decls {
            match d {
                Decl::Macro { goal: inner } => self.expand_into(&inner, depth + 1, out)?,
                other => out.push(other),
            }
        }
        Ok(())
    }
}

/// Expands a macro goal with the built-in expanders.
pub fn expand_macro(goal: &Term) -> Result<Vec<Decl<String>>, MacroError> {
    MacroRegistry::builtin().expand(goal)
}

fn atom_arg(t: &Term, what: &str) -> Result<String, String> {
    t.as_atom().map(str::to_string).ok_or_else(|| format!("{what} must be an atom, found {t}"))
}

fn lang_arg(t: &Term) -> Result<Lang, String> {
    Lang::new(t.clone()).map_err(|e| e.to_string())
}

fn text_lang(l: &str) -> Lang {
    Lang::wrap(l, &Lang::base_type("text"))
}

fn term_lang(l: &str) -> Lang {
    Lang::wrap(l, &Lang::base_type("term"))
}

/// `(base, extension)` of a file argument.
fn file_ext(t: &Term) -> Result<(String, String, String), String> {
    let file = atom_arg(t, "file name")?;
    let (base, ext) = split_extension(&file).ok_or_else(|| format!("file {file} has no extension"))?;
    Ok((file.clone(), base.to_string(), ext.to_string()))
}

fn fxy(a: &[Term]) -> Result<Vec<Decl<String>>, String> {
    let fun = atom_arg(&a[0], "function name")?;
    let fx = atom_arg(&a[1], "file name")?;
    let lx = lang_arg(&a[2])?;
    let fy = atom_arg(&a[3], "file name")?;
    let ly = lang_arg(&a[4])?;
    Ok(vec![
        Decl::ElementOf { file: fx.clone(), lang: lx },
        Decl::ElementOf { file: fy.clone(), lang: ly },
        Decl::MapsTo { name: fun, infiles: vec![fx], outfiles: vec![fy] },
    ])
}

fn fxy_macro(fun: &str, fx: &str, lx: &Lang, fy: &str, ly: &Lang) -> Decl<String> {
    Decl::Macro {
        goal: Term::compound(
            "fxy",
            vec![Term::atom(fun), Term::atom(fx), lx.term().clone(), Term::atom(fy), ly.term().clone()],
        ),
    }
}

fn parse_file(text_file: &Term) -> Result<Vec<Decl<String>>, String> {
    let (file, base, l) = file_ext(text_file)?;
    let term_file = format!("{base}.term");
    Ok(vec![fxy_macro("parse", &file, &text_lang(&l), &term_file, &term_lang(&l))])
}

fn parseable(text_file: &Term) -> Result<Vec<Decl<String>>, String> {
    let (file, _, l) = file_ext(text_file)?;
    Ok(vec![Decl::ElementOf { file, lang: text_lang(&l) }])
}

fn unparseable(text_file: &Term) -> Result<Vec<Decl<String>>, String> {
    let (file, _, l) = file_ext(text_file)?;
    Ok(vec![
        Decl::ElementOf { file: file.clone(), lang: Lang::base_type("text") },
        Decl::NotElementOf { file, lang: text_lang(&l) },
    ])
}

fn sample_with_ok(text_file: &Term, negated: bool) -> Result<Vec<Decl<String>>, String> {
    let (_, base, l) = file_ext(text_file)?;
    let file = format!("{base}.term");
    let lang = Lang::wrap("ok", &term_lang(&l));
    let check = if negated { Decl::NotElementOf { file, lang } } else { Decl::ElementOf { file, lang } };
    Ok(vec![Decl::Macro { goal: Term::compound("parseFile", vec![text_file.clone()]) }, check])
}

fn basic_syntax(l: &Term) -> Result<Vec<Decl<String>>, String> {
    let l = atom_arg(l, "language functor")?;
    let text = text_lang(&l);
    let tokens = Lang::wrap(&l, &Lang::wrap("tokens", &Lang::base_type("term")));
    let tree = Lang::wrap(&l, &Lang::wrap("bcl", &Lang::base_type("term")));
    let term = term_lang(&l);
    let scanner = Term::atom(format!("{l}Scanner"));
    let bgl_text = text_lang("bgl");
    let bgl_term = term_lang("bgl");
    let bsl_text = text_lang("bsl");
    let bsl_term = term_lang("bsl");
    let cs = || vec!["cs.term".to_string()];
    let goal = |name: &str, args: Vec<Term>| Term::compound(name, args);
    let function = |name: &str, inl: &Lang, outl: &Lang, g: Term, args: Vec<String>| Decl::Function {
        name: name.to_string(),
        inlangs: vec![inl.clone()],
        outlangs: vec![outl.clone()],
        goal: g,
        args,
    };
    Ok(vec![
        Decl::Language { lang: text.clone() },
        Decl::Language { lang: tokens.clone() },
        Decl::Language { lang: tree.clone() },
        Decl::Language { lang: term.clone() },
        fxy_macro("parse", "cs.bgl", &bgl_text, "cs.term", &bgl_term),
        fxy_macro("parse", "as.bsl", &bsl_text, "as.term", &bsl_term),
        fxy_macro("project", "cs.term", &bgl_term, "as.term", &bsl_term),
        Decl::Membership { lang: text.clone(), goal: goal("bglAcceptor", vec![scanner.clone()]), args: cs() },
        Decl::Membership { lang: tokens.clone(), goal: Term::atom("bglAcceptor"), args: cs() },
        Decl::Membership { lang: tree.clone(), goal: Term::atom("bclOk"), args: cs() },
        Decl::Membership { lang: term.clone(), goal: Term::atom("bslTerm"), args: vec!["as.term".to_string()] },
        function("scan", &text, &tokens, scanner.clone(), vec![]),
        function("parse", &tokens, &term, Term::atom("bglParser"), cs()),
        function("parse", &text, &term, goal("bglParser", vec![scanner]), cs()),
        function("cstToAst", &tree, &term, Term::atom("cstToAst"), vec![]),
        function("astToCst", &term, &tree, Term::atom("astToCst"), cs()),
        function("unparse", &tree, &tokens, Term::atom("bglTreeToTokens"), vec![]),
        function("unparse", &tree, &text, Term::atom("bglTreeToText"), vec![]),
    ])
}
