//! Declarations, the language hierarchy and repository-wide collection.

mod collect;
mod decl;
mod lang;
mod macros;

use std::collections::{HashMap, HashSet};

pub use collect::{
    collect, collect_with, discover, parse_ueber_file, parse_ueber_source, CollectedModel, SourcedDecl,
    UEBER_FILE_NAME,
};
pub use decl::{Decl, DeclError, DECL_FORMS};
pub(crate) use decl::paths_term;
pub use lang::{towards_base, Lang, MalformedLang};
pub use macros::{expand_macro, Expander, MacroError, MacroRegistry, MAX_EXPANSION_DEPTH};

use crate::path::RepoPath;
use crate::term::Term;

/// A predicate-valued declaration (membership, equivalence or normalization)
/// keyed by language.
#[derive(Debug, Clone)]
pub struct LangPredicate<'m> {
    pub index: usize,
    pub lang: &'m Lang,
    pub goal: &'m Term,
    pub args: &'m [RepoPath],
    pub source: &'m SourcedDecl,
}

/// A function declaration.
#[derive(Debug, Clone)]
pub struct FunctionDecl<'m> {
    pub index: usize,
    pub name: &'m str,
    pub inlangs: &'m [Lang],
    pub outlangs: &'m [Lang],
    pub goal: &'m Term,
    pub args: &'m [RepoPath],
    pub source: &'m SourcedDecl,
}

/// Lookup tables over a collected model.
#[derive(Debug, Default)]
pub struct ModelIndex<'m> {
    pub languages: HashSet<&'m Lang>,
    /// Languages a file is declared an element of, in declaration order.
    pub file_langs: HashMap<&'m RepoPath, Vec<&'m Lang>>,
    pub functions: HashMap<&'m str, Vec<FunctionDecl<'m>>>,
    pub memberships: Vec<LangPredicate<'m>>,
    pub equivalences: Vec<LangPredicate<'m>>,
    pub normalizations: Vec<LangPredicate<'m>>,
}

impl<'m> ModelIndex<'m> {
    pub fn new(decls: &'m [SourcedDecl]) -> Self {
        let mut ix = ModelIndex::default();
        for (index, sd) in decls.iter().enumerate() {
            let pred = |lang, goal, args: &'m Vec<RepoPath>| LangPredicate { index, lang, goal, args, source: sd };
            match &sd.decl {
                Decl::Language { lang } => {
                    ix.languages.insert(lang);
                }
                Decl::ElementOf { file, lang } => {
                    let langs = ix.file_langs.entry(file).or_default();
                    if !langs.contains(&lang) {
                        langs.push(lang);
                    }
                }
                Decl::Function { name, inlangs, outlangs, goal, args } => {
                    ix.functions.entry(name.as_str()).or_default().push(FunctionDecl {
                        index,
                        name,
                        inlangs,
                        outlangs,
                        goal,
                        args,
                        source: sd,
                    });
                }
                Decl::Membership { lang, goal, args } => ix.memberships.push(pred(lang, goal, args)),
                Decl::Equivalence { lang, goal, args } => ix.equivalences.push(pred(lang, goal, args)),
                Decl::Normalization { lang, goal, args } => ix.normalizations.push(pred(lang, goal, args)),
                _ => {}
            }
        }
        ix
    }

    pub fn is_declared(&self, lang: &Lang) -> bool {
        self.languages.contains(lang)
    }

    pub fn declared_langs(&self, file: &RepoPath) -> &[&'m Lang] {
        self.file_langs.get(file).map_or(&[], Vec::as_slice)
    }

    /// Predicates applicable to `lang`: those declared on it or on any
    /// language up its chain, outermost first, then in declaration order.
    pub fn applicable<'a>(preds: &'a [LangPredicate<'m>], lang: &Lang) -> Vec<&'a LangPredicate<'m>> {
        lang.towards_base()
            .iter()
            .flat_map(|l| preds.iter().filter(move |p| p.lang == l))
            .collect()
    }
}
