use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use super::decl::Decl;
use super::macros::MacroRegistry;
use crate::path::RepoPath;
use crate::problem::{Problem, Severity};
use crate::term::{read_terms, TermError};

pub const UEBER_FILE_NAME: &str = ".ueber";

/// A resolved declaration with the file and line it came from. Declarations
/// produced by a macro carry the macro's position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcedDecl {
    pub decl: Decl,
    pub origin: RepoPath,
    pub line: usize,
}

impl SourcedDecl {
    /// Directory of the declaring `.ueber` file.
    pub fn dir(&self) -> RepoPath {
        self.origin.parent()
    }
}

/// All declarations of a repository after expansion, resolution,
/// desugaring and deduplication, together with collection problems.
#[derive(Debug, Clone)]
pub struct CollectedModel {
    pub root: PathBuf,
    pub decls: Vec<SourcedDecl>,
    pub problems: Vec<Problem>,
    /// Number of `.ueber` files read.
    pub files: usize,
}

impl CollectedModel {
    /// A model built directly from declarations, mainly for tests and
    /// programmatic use.
    pub fn from_decls(root: impl Into<PathBuf>, decls: Vec<SourcedDecl>) -> Self {
        CollectedModel { root: root.into(), decls, problems: Vec::new(), files: 0 }
    }
}

/// Parses one `.ueber` file; `origin` is its repository path.
///
/// Macros are expanded and paths resolved against the file's directory.
/// Problems are returned alongside whatever declarations could be read.
pub fn parse_ueber_file(
    root: &Path,
    origin: &RepoPath,
    macros: &MacroRegistry,
) -> (Vec<SourcedDecl>, Vec<Problem>) {
    let fs_path = origin.to_fs(root);
    let text = match std::fs::read_to_string(&fs_path) {
        Ok(t) => t,
        Err(e) => {
            let msg = format!("File {origin}: {}", TermError::io(&fs_path, e));
            return (Vec::new(), vec![Problem::in_file(Severity::IllFormed, msg, origin.clone(), 0)]);
        }
    };
    parse_ueber_source(&text, origin, macros)
}

/// As [`parse_ueber_file`], over already loaded text.
pub fn parse_ueber_source(
    text: &str,
    origin: &RepoPath,
    macros: &MacroRegistry,
) -> (Vec<SourcedDecl>, Vec<Problem>) {
    let mut decls = Vec::new();
    let mut problems = Vec::new();
    let terms = match read_terms(text) {
        Ok(ts) => ts,
        Err(e) => {
            let line = match &e {
                TermError::Syntax { line, .. } => *line,
                TermError::Io { .. } => 0,
            };
            problems.push(Problem::in_file(Severity::IllFormed, format!("File {origin}: {e}"), origin.clone(), line));
            return (decls, problems);
        }
    };
    let dir = origin.parent();
    for st in terms {
        let ill = |msg: String| Problem::in_file(Severity::IllFormed, msg, origin.clone(), st.line);
        let raw = match Decl::from_term(&st.term) {
            Ok(d) => d,
            Err(e) => {
                problems.push(ill(e.to_string()));
                continue;
            }
        };
        let expanded = match raw {
            Decl::Macro { goal } => match macros.expand(&goal) {
                Ok(ds) => ds,
                Err(e) => {
                    problems.push(ill(e.to_string()));
                    continue;
                }
            },
            other => vec![other],
        };
        for d in expanded {
            let printed = d.to_string();
            match d.try_map_paths(|p| dir.join(&p)) {
                Ok(resolved) => decls.push(SourcedDecl { decl: resolved.desugar(), origin: origin.clone(), line: st.line }),
                Err(e) => problems.push(ill(format!("Declaration {printed}: {e}."))),
            }
        }
    }
    (decls, problems)
}

/// Lists every `.ueber` file below `root` in lexicographic path order.
/// Symbolic links are not followed.
pub fn discover(root: &Path) -> std::io::Result<Vec<RepoPath>> {
    let mut found = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() && entry.file_name() == UEBER_FILE_NAME {
            if let Some(p) = RepoPath::from_fs(root, entry.path()) {
                found.push(p);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Collects the declarations of the repository at `root`.
pub fn collect(root: &Path) -> std::io::Result<CollectedModel> {
    collect_with(root, &MacroRegistry::builtin())
}

pub fn collect_with(root: &Path, macros: &MacroRegistry) -> std::io::Result<CollectedModel> {
    if !root.is_dir() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} is not a directory", root.display()),
        ));
    }
    let files = discover(root)?;
    let per_file: Vec<_> = files.par_iter().map(|f| parse_ueber_file(root, f, macros)).collect();
    let mut seen = HashSet::new();
    let mut decls = Vec::new();
    let mut problems = Vec::new();
    for (ds, ps) in per_file {
        problems.extend(ps);
        for d in ds {
            if seen.insert(d.decl.clone()) {
                decls.push(d);
            }
        }
    }
    Ok(CollectedModel { root: root.to_path_buf(), decls, problems, files: files.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str, origin: &str) -> (Vec<SourcedDecl>, Vec<Problem>) {
        parse_ueber_source(src, &RepoPath::new(origin).unwrap(), &MacroRegistry::builtin())
    }

    #[test]
    fn paths_resolve_against_declaring_directory() {
        let (ds, ps) = parse("elementOf('samples/x.bnl', bnl(text)).", "languages/BNL/.ueber");
        assert!(ps.is_empty());
        assert_eq!(ds[0].decl.to_string(), "elementOf('languages/BNL/samples/x.bnl',bnl(text))");
        assert_eq!(ds[0].line, 1);
    }

    #[test]
    fn dot_argument_is_declaring_directory() {
        let (ds, _) = parse(
            "membership(bnl(text), python('accept.py'), ['.']).",
            "languages/BNL/ANTLR/.ueber",
        );
        match &ds[0].decl {
            Decl::Membership { args, .. } => assert_eq!(args[0].as_str(), "languages/BNL/ANTLR"),
            other => panic!("{other:?}"),
        }
        let (ds, _) = parse("membership(text, utf8Text, ['.']).", ".ueber");
        assert_eq!(ds[0].decl.to_string(), "membership(text,utf8Text,['.'])");
    }

    #[test]
    fn unknown_forms_become_problems() {
        let (ds, ps) = parse("language(text).\nfrobnicate(a).\nlanguage(term).", ".ueber");
        assert_eq!(ds.len(), 2);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].severity, Severity::IllFormed);
        assert_eq!(ps[0].line, 2);
        assert!(ps[0].message.contains("frobnicate(a)"));
    }

    #[test]
    fn syntax_errors_become_problems() {
        let (ds, ps) = parse("language(text).\nlanguage(", "a/.ueber");
        assert!(ds.is_empty());
        assert_eq!(ps.len(), 1);
        assert!(ps[0].message.starts_with("File a/.ueber: syntax error"));
    }

    #[test]
    fn escaping_paths_are_problems() {
        let (ds, ps) = parse("elementOf('../../x', text).", "a/.ueber");
        assert!(ds.is_empty());
        assert!(ps[0].message.contains("leaves the repository"));
    }

    #[test]
    fn macros_expand_in_place_and_relations_desugar() {
        let src = "[ language(text), macro(parseFile('s/a.bnl')), relatesTo(r, ['x', 'y']) ].";
        let (ds, ps) = parse(src, "d/.ueber");
        assert!(ps.is_empty());
        let printed: Vec<String> = ds.iter().map(|d| d.decl.to_string()).collect();
        assert_eq!(
            printed,
            [
                "language(text)",
                "elementOf('d/s/a.bnl',bnl(text))",
                "elementOf('d/s/a.term',bnl(term))",
                "mapsTo(parse,['d/s/a.bnl'],['d/s/a.term'])",
                "mapsTo(r,['d/x','d/y'],[])",
            ]
        );
    }
}
