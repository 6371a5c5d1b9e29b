//! Well-formedness checking and overload resolution.
//!
//! Checks consult declarations only; no artifact is opened.

use rayon::prelude::*;

use crate::megamodel::{paths_term, CollectedModel, Decl, FunctionDecl, Lang, ModelIndex, SourcedDecl};
use crate::path::RepoPath;
use crate::plugin_host::PredicateSpec;
use crate::problem::{Finding, Problem};
use crate::term::write_term;

/// One applicable implementation of a function for a concrete application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overload {
    pub name: String,
    /// Position of the function declaration in the model.
    pub decl_index: usize,
    pub pred: PredicateSpec,
    pub static_args: Vec<RepoPath>,
    pub inlangs: Vec<Lang>,
    pub outlangs: Vec<Lang>,
}

impl Overload {
    fn signature(&self) -> (&[Lang], &[Lang]) {
        (&self.inlangs, &self.outlangs)
    }
}

/// The first language declared for `file` that lies within `param`.
pub fn file_lang_for<'m>(ix: &ModelIndex<'m>, file: &RepoPath, param: &Lang) -> Option<&'m Lang> {
    ix.declared_langs(file).iter().copied().find(|l| l.is_within(param))
}

fn fits(ix: &ModelIndex<'_>, files: &[RepoPath], params: &[Lang]) -> bool {
    files.len() == params.len() && files.iter().zip(params).all(|(f, p)| file_lang_for(ix, f, p).is_some())
}

/// `true` if every language of `a` lies within the corresponding one of `b`.
fn below_or_equal(a: &[Lang], b: &[Lang]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.is_within(y))
}

/// Overloads of `name` applicable to the given files: functions whose
/// parameter languages contain a declared language of each file, minus
/// those shadowed by a strictly more specific candidate.
pub fn overloads_for(ix: &ModelIndex<'_>, name: &str, infiles: &[RepoPath], outfiles: &[RepoPath]) -> Vec<Overload> {
    let candidates: Vec<Overload> = ix
        .functions
        .get(name)
        .into_iter()
        .flatten()
        .filter(|f| fits(ix, infiles, f.inlangs) && fits(ix, outfiles, f.outlangs))
        .filter_map(|f| to_overload(f))
        .collect();
    candidates
        .iter()
        .filter(|c1| {
            !candidates.iter().any(|c2| {
                c2.signature() != c1.signature()
                    && below_or_equal(&c2.inlangs, &c1.inlangs)
                    && below_or_equal(&c2.outlangs, &c1.outlangs)
            })
        })
        .cloned()
        .collect()
}

fn to_overload(f: &FunctionDecl<'_>) -> Option<Overload> {
    let pred = PredicateSpec::from_goal(f.goal, &f.source.dir()).ok()?;
    Some(Overload {
        name: f.name.to_string(),
        decl_index: f.index,
        pred,
        static_args: f.args.to_vec(),
        inlangs: f.inlangs.to_vec(),
        outlangs: f.outlangs.to_vec(),
    })
}

fn lang_missing(l: &Lang) -> Finding {
    Finding::ill_formed(format!("Language {l}: missing."))
}

fn require_langs<'a>(ix: &ModelIndex<'_>, langs: impl IntoIterator<Item = &'a Lang>, out: &mut Vec<Finding>) {
    for l in langs {
        if !ix.is_declared(l) {
            out.push(lang_missing(l));
        }
    }
}

fn require_pred(goal: &crate::term::Term, sd: &SourcedDecl, out: &mut Vec<Finding>) {
    if let Err(e) = PredicateSpec::from_goal(goal, &sd.dir()) {
        out.push(Finding::ill_formed(e.to_string()));
    }
}

fn check_element_of(ix: &ModelIndex<'_>, lang: &Lang) -> Vec<Finding> {
    let chain = lang.towards_base();
    if !chain.iter().any(|l| ix.is_declared(l)) {
        return vec![lang_missing(lang)];
    }
    if ModelIndex::applicable(&ix.memberships, lang).is_empty() {
        return vec![Finding::warning(format!("Membership test for language {lang}: missing."))];
    }
    Vec::new()
}

fn check_maps_to(ix: &ModelIndex<'_>, name: &str, infiles: &[RepoPath], outfiles: &[RepoPath]) -> Vec<Finding> {
    if !ix.functions.contains_key(name) {
        return vec![Finding::ill_formed(format!("Function {name}: missing."))];
    }
    if let Some(f) = infiles.iter().chain(outfiles).find(|f| ix.declared_langs(f).is_empty()) {
        return vec![Finding::ill_formed(format!("Language of file {f}: missing."))];
    }
    if overloads_for(ix, name, infiles, outfiles).is_empty() {
        return vec![Finding::ill_formed(format!(
            "Overload {name}:({}) \u{2192} ({}): missing.",
            write_term(&paths_term(infiles)),
            write_term(&paths_term(outfiles)),
        ))];
    }
    Vec::new()
}

/// Findings for one declaration.
pub fn check_decl(ix: &ModelIndex<'_>, sd: &SourcedDecl) -> Vec<Finding> {
    let mut out = Vec::new();
    match &sd.decl {
        Decl::Language { lang } => require_langs(ix, lang.towards_base().iter().skip(1), &mut out),
        Decl::ElementOf { lang, .. } | Decl::NotElementOf { lang, .. } => out = check_element_of(ix, lang),
        Decl::Membership { lang, goal, .. }
        | Decl::Equivalence { lang, goal, .. }
        | Decl::Normalization { lang, goal, .. } => {
            require_langs(ix, [lang], &mut out);
            require_pred(goal, sd, &mut out);
        }
        Decl::Function { inlangs, outlangs, goal, .. } => {
            require_langs(ix, inlangs.iter().chain(outlangs), &mut out);
            require_pred(goal, sd, &mut out);
        }
        Decl::Relation { langs, goal, .. } => {
            require_langs(ix, langs, &mut out);
            require_pred(goal, sd, &mut out);
        }
        Decl::MapsTo { name, infiles, outfiles } => out = check_maps_to(ix, name, infiles, outfiles),
        Decl::RelatesTo { name, files } => out = check_maps_to(ix, name, files, &[]),
        Decl::Macro { goal } => out.push(Finding::ill_formed(format!("Macro {goal}: unexpanded."))),
    }
    out
}

/// Findings per declaration, indexed like `m.decls`.
pub fn check_each(m: &CollectedModel) -> Vec<Vec<Finding>> {
    let ix = ModelIndex::new(&m.decls);
    m.decls.par_iter().map(|sd| check_decl(&ix, sd)).collect()
}

/// All well-formedness problems of a model, in declaration order.
pub fn check_model(m: &CollectedModel) -> Vec<Problem> {
    check_each(m)
        .into_iter()
        .zip(&m.decls)
        .flat_map(|(fs, sd)| fs.into_iter().map(move |f| f.at(sd)))
        .collect()
}
