//! Repository verification: declarations evaluated against artifacts.

pub mod builtins;

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

pub use builtins::standard_registry;

use crate::checker::{file_lang_for, overloads_for, Overload};
use crate::content::Content;
use crate::megamodel::{paths_term, CollectedModel, Decl, Lang, LangPredicate, ModelIndex, SourcedDecl};
use crate::path::RepoPath;
use crate::plugin_host::{HostConfig, InvocationRequest, InvokeError, PluginHost, PredicateSpec};
use crate::problem::{Finding, Problem};
use crate::term::write_term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Check,
    Override,
    Create,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::Override => "override",
            Mode::Create => "create",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "check" => Ok(Mode::Check),
            "override" => Ok(Mode::Override),
            "create" => Ok(Mode::Create),
            _ => Err(format!("unknown mode {s}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub mode: Mode,
    pub host: HostConfig,
}

impl VerifyConfig {
    pub fn new(root: impl Into<std::path::PathBuf>, mode: Mode) -> Self {
        VerifyConfig { mode, host: HostConfig::new(root) }
    }

    pub fn root(&self) -> &Path {
        &self.host.root
    }
}

enum Baseline {
    Missing,
    Present(Content),
    Unreadable(String),
}

/// Verification state for one run over one model.
pub struct Verifier<'a> {
    model: &'a CollectedModel,
    ix: ModelIndex<'a>,
    host: &'a PluginHost,
    mode: Mode,
    written: Mutex<HashSet<RepoPath>>,
}

fn failure_details(f: Finding, e: &InvokeError) -> Finding {
    match e {
        InvokeError::Failed { reason, scratch } => {
            let f = f.with_detail(reason.clone());
            match scratch {
                Some(s) => f.with_detail(format!("scratch files kept in {}", s.display())),
                None => f,
            }
        }
        other => f.with_detail(other.to_string()),
    }
}

impl<'a> Verifier<'a> {
    pub fn new(model: &'a CollectedModel, host: &'a PluginHost, mode: Mode) -> Self {
        Verifier { model, ix: ModelIndex::new(&model.decls), host, mode, written: Mutex::new(HashSet::new()) }
    }

    pub fn index(&self) -> &ModelIndex<'a> {
        &self.ix
    }

    fn spec(&self, p: &LangPredicate<'_>) -> Option<PredicateSpec> {
        PredicateSpec::from_goal(p.goal, &p.source.dir()).ok()
    }

    fn read(&self, file: &RepoPath) -> std::io::Result<Option<Vec<u8>>> {
        match std::fs::read(file.to_fs(&self.model.root)) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn read_input(&self, file: &RepoPath, lang: &Lang) -> Result<Content, Finding> {
        match self.read(file) {
            Ok(Some(bytes)) => Content::from_bytes(lang.clone(), bytes)
                .map_err(|e| Finding::unverified(format!("File {file}: not readable as {lang}.")).with_detail(e.to_string())),
            Ok(None) => Err(Finding::unverified(format!("File {file}: no such file"))),
            Err(e) => Err(Finding::unverified(format!("File {file}: not readable.")).with_detail(e.to_string())),
        }
    }

    fn read_baseline(&self, file: &RepoPath, lang: &Lang) -> Baseline {
        match self.read(file) {
            Ok(None) => Baseline::Missing,
            Ok(Some(bytes)) => match Content::from_bytes(lang.clone(), bytes) {
                Ok(c) => Baseline::Present(c),
                Err(e) => Baseline::Unreadable(e.to_string()),
            },
            Err(e) => Baseline::Unreadable(e.to_string()),
        }
    }

    /// Applies every enabled normalization on `lang`'s chain in
    /// declaration order.
    pub fn normalize(&self, file: &RepoPath, lang: &Lang, c: Content) -> Result<Content, Finding> {
        let mut c = c;
        let mut preds = ModelIndex::applicable(&self.ix.normalizations, lang);
        preds.sort_by_key(|p| p.index);
        for p in preds {
            let Some(spec) = self.spec(p) else { continue };
            if !self.host.admit(&spec) {
                continue;
            }
            let langs = [lang.clone()];
            let inputs = [c];
            let req = InvocationRequest { pred: &spec, static_args: p.args, inlangs: &langs, outlangs: &langs, inputs: &inputs };
            match self.host.invoke(&req) {
                Ok(mut out) => c = out.remove(0),
                Err(e) => {
                    let f = Finding::unverified(format!("Normalization {spec} of file {file}: failed."));
                    return Err(failure_details(f, &e));
                }
            }
        }
        Ok(c)
    }

    /// Whether `actual` is equivalent to `expected`: decided by the first
    /// enabled equivalence on the chain, or structural/byte equality of
    /// the normalized contents.
    pub fn equivalent(&self, file: &RepoPath, lang: &Lang, expected: &Content, actual: &Content) -> Result<bool, Finding> {
        let expected = self.normalize(file, lang, expected.clone())?;
        let actual = self.normalize(file, lang, actual.clone())?;
        for p in ModelIndex::applicable(&self.ix.equivalences, lang) {
            let Some(spec) = self.spec(p) else { continue };
            if !self.host.admit(&spec) {
                continue;
            }
            let langs = [lang.clone(), lang.clone()];
            let inputs = [expected, actual];
            let req = InvocationRequest { pred: &spec, static_args: p.args, inlangs: &langs, outlangs: &[], inputs: &inputs };
            return match self.host.invoke(&req) {
                Ok(_) => Ok(true),
                Err(InvokeError::Failed { .. }) => Ok(false),
                Err(e) => Err(failure_details(Finding::unverified(format!("Equivalence {spec} of file {file}: failed.")), &e)),
            };
        }
        Ok(expected.same_as(&actual))
    }

    pub fn verify_element_of(&self, file: &RepoPath, lang: &Lang, negated: bool) -> Vec<Finding> {
        let bytes = match self.read(file) {
            Ok(Some(b)) => b,
            Ok(None) => return vec![Finding::unverified(format!("File {file}: no such file"))],
            Err(e) => return vec![Finding::unverified(format!("File {file}: not readable.")).with_detail(e.to_string())],
        };
        let content = match Content::from_bytes(lang.clone(), bytes) {
            Ok(c) => c,
            Err(_) if negated => return Vec::new(),
            Err(e) => {
                return vec![Finding::unverified(format!("File {file}: not readable as {lang}.")).with_detail(e.to_string())]
            }
        };
        let content = match self.normalize(file, lang, content) {
            Ok(c) => c,
            Err(f) => return vec![f],
        };

        let mut findings = Vec::new();
        let (mut active, mut gated, mut failed) = (0, 0, 0);
        for p in ModelIndex::applicable(&self.ix.memberships, lang) {
            let Some(spec) = self.spec(p) else { continue };
            if !self.host.admit(&spec) {
                gated += 1;
                continue;
            }
            active += 1;
            let langs = [lang.clone()];
            let inputs = [content.clone()];
            let req = InvocationRequest { pred: &spec, static_args: p.args, inlangs: &langs, outlangs: &[], inputs: &inputs };
            let msg = || format!("File {file} element of language {} according to {spec}: failed.", p.lang);
            match self.host.invoke(&req) {
                Ok(_) => {}
                Err(e @ InvokeError::Failed { .. }) => {
                    failed += 1;
                    if !negated {
                        findings.push(failure_details(Finding::unverified(msg()), &e));
                    }
                }
                Err(InvokeError::Disabled(_)) => gated += 1,
                Err(e) => findings.push(failure_details(Finding::unverified(msg()), &e)),
            }
        }
        if negated {
            if failed > 0 {
                return Vec::new();
            }
            if !findings.is_empty() {
                return findings;
            }
            if active == 0 {
                return vec![if gated > 0 {
                    Finding::warning(format!("File {file} not element of language {lang}: no active membership test."))
                } else {
                    Finding::unverified(format!("File {file} not element of language {lang}: no membership test."))
                }];
            }
            return vec![Finding::unverified(format!("File {file} unexpectedly element of language {lang}."))];
        }
        if active == 0 && gated > 0 {
            findings.push(Finding::warning(format!("File {file} element of language {lang}: no active membership test.")));
        }
        findings
    }

    pub fn verify_maps_to(&self, name: &str, infiles: &[RepoPath], outfiles: &[RepoPath]) -> Vec<Finding> {
        let overloads = overloads_for(&self.ix, name, infiles, outfiles);
        if overloads.is_empty() {
            return vec![Finding::unverified(format!(
                "Overload {name}:({}) \u{2192} ({}): missing.",
                write_term(&paths_term(infiles)),
                write_term(&paths_term(outfiles)),
            ))];
        }
        let enabled: Vec<&Overload> = overloads.iter().filter(|o| self.host.admit(&o.pred)).collect();
        if enabled.is_empty() {
            return vec![Finding::warning(format!("Function {name}: no active overload."))];
        }
        enabled.into_iter().flat_map(|o| self.apply_overload(name, infiles, outfiles, o)).collect()
    }

    fn write_baseline(&self, file: &RepoPath, c: &Content) -> Result<(), Finding> {
        let path = file.to_fs(&self.model.root);
        let res = match path.parent() {
            Some(dir) => std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, c.bytes())),
            None => std::fs::write(&path, c.bytes()),
        };
        res.map_err(|e| Finding::unverified(format!("File {file}: cannot write baseline.")).with_detail(e.to_string()))?;
        self.written.lock().unwrap().insert(file.clone());
        Ok(())
    }

    fn compare_output(&self, file: &RepoPath, lang: &Lang, actual: &Content) -> Option<Finding> {
        let already_written = self.written.lock().unwrap().contains(file);
        let disagreeing = |detail: Option<String>| {
            let f = Finding::unverified(format!("disagreeing baseline {file}"));
            Some(match detail {
                Some(d) => f.with_detail(d),
                None => f,
            })
        };
        match self.read_baseline(file, lang) {
            Baseline::Present(expected) => match self.equivalent(file, lang, &expected, actual) {
                Ok(true) => None,
                Ok(false) if self.mode == Mode::Override && !already_written => self.write_baseline(file, actual).err(),
                Ok(false) => disagreeing(None),
                Err(f) => Some(f),
            },
            Baseline::Missing if self.mode == Mode::Create => self.write_baseline(file, actual).err(),
            Baseline::Missing => Some(Finding::unverified(format!("missing baseline {file}"))),
            Baseline::Unreadable(_) if self.mode == Mode::Override && !already_written => {
                self.write_baseline(file, actual).err()
            }
            Baseline::Unreadable(why) => disagreeing(Some(why)),
        }
    }

    pub fn apply_overload(&self, name: &str, infiles: &[RepoPath], outfiles: &[RepoPath], o: &Overload) -> Vec<Finding> {
        let file_langs = |files: &[RepoPath], params: &[Lang]| -> Vec<Lang> {
            files
                .iter()
                .zip(params)
                .map(|(f, p)| file_lang_for(&self.ix, f, p).cloned().unwrap_or_else(|| p.clone()))
                .collect()
        };
        let inlangs = file_langs(infiles, &o.inlangs);
        let outlangs = file_langs(outfiles, &o.outlangs);

        let mut inputs = Vec::with_capacity(infiles.len());
        for (f, l) in infiles.iter().zip(&inlangs) {
            match self.read_input(f, l).and_then(|c| self.normalize(f, l, c)) {
                Ok(c) => inputs.push(c),
                Err(finding) => return vec![finding],
            }
        }
        let req = InvocationRequest {
            pred: &o.pred,
            static_args: &o.static_args,
            inlangs: &inlangs,
            outlangs: &outlangs,
            inputs: &inputs,
        };
        let actual = match self.host.invoke(&req) {
            Ok(out) => out,
            Err(InvokeError::Disabled(_)) => return Vec::new(),
            Err(e) => {
                let f = Finding::unverified(format!(
                    "Overload {name}#{}({})->({}): failed.",
                    o.pred,
                    write_term(&paths_term(infiles)),
                    write_term(&paths_term(outfiles)),
                ));
                return vec![failure_details(f, &e)];
            }
        };
        outfiles
            .iter()
            .zip(&outlangs)
            .zip(actual)
            .filter_map(|((f, l), a)| {
                let a = match a.retag(l.clone()) {
                    Ok(a) => a,
                    Err(e) => return Some(Finding::unverified(format!("File {f}: output not readable as {l}.")).with_detail(e.to_string())),
                };
                self.compare_output(f, l, &a)
            })
            .collect()
    }

    /// Findings of one declaration. Forms other than element and mapping
    /// claims have nothing to verify.
    pub fn verify_decl(&self, sd: &SourcedDecl) -> Vec<Finding> {
        match &sd.decl {
            Decl::ElementOf { file, lang } => self.verify_element_of(file, lang, false),
            Decl::NotElementOf { file, lang } => self.verify_element_of(file, lang, true),
            Decl::MapsTo { name, infiles, outfiles } => self.verify_maps_to(name, infiles, outfiles),
            Decl::RelatesTo { name, files } => self.verify_maps_to(name, files, &[]),
            _ => Vec::new(),
        }
    }

    /// Order in which mappings run when baselines may be written: a mapping
    /// producing a file precedes those reading it (as input or static
    /// argument); ties and cycles fall back to declaration order.
    fn mapping_order(&self, selected: &[usize]) -> Vec<usize> {
        let decls = &self.model.decls;
        let mut producers: HashMap<&RepoPath, Vec<usize>> = HashMap::new();
        for &i in selected {
            if let Decl::MapsTo { outfiles, .. } = &decls[i].decl {
                for f in outfiles {
                    producers.entry(f).or_default().push(i);
                }
            }
        }
        let mut indegree: HashMap<usize, usize> = selected.iter().map(|&i| (i, 0)).collect();
        let mut successors: HashMap<usize, Vec<usize>> = HashMap::new();
        for &i in selected {
            let (name, infiles) = match &decls[i].decl {
                Decl::MapsTo { name, infiles, .. } => (name, infiles),
                _ => continue,
            };
            let statics = self.ix.functions.get(name.as_str()).into_iter().flatten().flat_map(|f| f.args.iter());
            let mut deps: Vec<usize> = infiles
                .iter()
                .chain(statics)
                .flat_map(|f| producers.get(f).into_iter().flatten().copied())
                .filter(|&p| p != i)
                .collect();
            deps.sort_unstable();
            deps.dedup();
            for p in deps {
                successors.entry(p).or_default().push(i);
                *indegree.get_mut(&i).unwrap() += 1;
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            indegree.iter().filter(|(_, &d)| d == 0).map(|(&i, _)| Reverse(i)).collect();
        let mut order = Vec::with_capacity(selected.len());
        let mut done = HashSet::new();
        while order.len() < selected.len() {
            let next = match ready.pop() {
                Some(Reverse(i)) => i,
                None => *selected.iter().find(|i| !done.contains(*i)).expect("unfinished mapping"),
            };
            if !done.insert(next) {
                continue;
            }
            order.push(next);
            for &s in successors.get(&next).into_iter().flatten() {
                let d = indegree.get_mut(&s).unwrap();
                *d = d.saturating_sub(1);
                if *d == 0 && !done.contains(&s) {
                    ready.push(Reverse(s));
                }
            }
        }
        order
    }

    /// Verifies the declarations for which `selected` holds. Problems are
    /// returned in declaration order.
    pub fn run(&self, selected: impl Fn(usize) -> bool + Sync) -> Vec<Problem> {
        let decls = &self.model.decls;
        let chosen: Vec<usize> = (0..decls.len()).filter(|&i| selected(i)).collect();
        let mut findings: Vec<Vec<Finding>> = vec![Vec::new(); decls.len()];
        if self.mode == Mode::Check {
            let results: Vec<(usize, Vec<Finding>)> =
                chosen.par_iter().map(|&i| (i, self.verify_decl(&decls[i]))).collect();
            for (i, fs) in results {
                findings[i] = fs;
            }
        } else {
            let (mappings, rest): (Vec<usize>, Vec<usize>) =
                chosen.iter().partition(|&&i| matches!(decls[i].decl, Decl::MapsTo { .. } | Decl::RelatesTo { .. }));
            for i in self.mapping_order(&mappings) {
                findings[i] = self.verify_decl(&decls[i]);
            }
            let results: Vec<(usize, Vec<Finding>)> = rest.par_iter().map(|&i| (i, self.verify_decl(&decls[i]))).collect();
            for (i, fs) in results {
                findings[i] = fs;
            }
        }
        findings
            .into_iter()
            .zip(decls)
            .flat_map(|(fs, sd)| fs.into_iter().map(move |f| f.at(sd)))
            .collect()
    }
}

/// Verifies every declaration of `m` with the standard native registry.
pub fn verify_model(m: &CollectedModel, cfg: &VerifyConfig) -> Vec<Problem> {
    let host = PluginHost::new(standard_registry(), cfg.host.clone());
    Verifier::new(m, &host, cfg.mode).run(|_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::megamodel::collect;
    use crate::plugin_host::NativeError;
    use crate::problem::Severity;
    use crate::term::Term;
    use std::fs;

    const BASE: &str = "
        language(text). language(term). language(json). language(value(term)).
        language(bnl(text)). language(bnl(value(term))). language(bnl(json)).
        membership(text, utf8Text, []). membership(term, termOk, []). membership(json, jsonOk, []).
        membership(bnl(text), bnlTextOk, []).
        equivalence(bnl(value(term)), numericTolerance(0.000000001), []).
        normalization(json, jsonCanonical, []).
        function(evaluate, [bnl(text)], [bnl(value(term))], bnlEvaluateText, []).
    ";

    fn registry() -> crate::plugin_host::NativeRegistry {
        let mut reg = standard_registry();
        reg.register("bnlTextOk", |c| {
            crate::langkit::bnl::evaluate_text(c.input_text(0)?).map(|_| Vec::new()).map_err(|e| NativeError::fail(e.to_string()))
        });
        reg.register("broken", |_| Err(NativeError::fail("always fails")));
        reg.register("bnlEvaluateTextWrong", |c| {
            let v = crate::langkit::bnl::evaluate_text(c.input_text(0)?).map_err(|e| NativeError::fail(e.to_string()))?;
            Ok(vec![c.out_term(0, Term::Float(v + 1.0))?])
        });
        reg
    }

    struct Repo(tempfile::TempDir);

    impl Repo {
        fn new(decls: &str, files: &[(&str, &str)]) -> Repo {
            let dir = tempfile::tempdir().unwrap();
            fs::write(dir.path().join(".ueber"), format!("{BASE}\n{decls}")).unwrap();
            for (name, text) in files {
                fs::write(dir.path().join(name), text).unwrap();
            }
            Repo(dir)
        }

        fn root(&self) -> &Path {
            self.0.path()
        }

        fn run_with(&self, mode: Mode, cfg: impl FnOnce(&mut HostConfig)) -> Vec<Problem> {
            let m = collect(self.root()).unwrap();
            assert!(m.problems.is_empty(), "{:?}", m.problems);
            assert!(crate::checker::check_model(&m).iter().all(|p| !p.severity.is_failure()), "{:?}", crate::checker::check_model(&m));
            let mut hc = HostConfig::new(self.root());
            cfg(&mut hc);
            let host = PluginHost::new(registry(), hc);
            Verifier::new(&m, &host, mode).run(|_| true)
        }

        fn run(&self, mode: Mode) -> Vec<String> {
            self.run_with(mode, |_| {}).into_iter().map(|p| p.message).collect()
        }

        fn read(&self, name: &str) -> Option<String> {
            fs::read_to_string(self.root().join(name)).ok()
        }

        fn snapshot(&self) -> Vec<(String, Vec<u8>)> {
            let mut out: Vec<_> = walkdir::WalkDir::new(self.root())
                .into_iter()
                .map(Result::unwrap)
                .filter(|e| e.file_type().is_file())
                .map(|e| (e.path().display().to_string(), fs::read(e.path()).unwrap()))
                .collect();
            out.sort();
            out
        }
    }

    const EVAL: &str = "elementOf('a.bnl', bnl(text)). elementOf('a.value', bnl(value(term))). mapsTo(evaluate, ['a.bnl'], ['a.value']).";

    #[test]
    fn element_of() {
        let r = Repo::new("elementOf('a.bnl', bnl(text)). elementOf('b.bnl', bnl(text)). elementOf('c.bnl', bnl(text)).", &[("a.bnl", "101.01\n"), ("b.bnl", "10x1\n")]);
        let msgs = r.run(Mode::Check);
        assert_eq!(
            msgs,
            [
                "File b.bnl element of language bnl(text) according to bnlTextOk: failed.",
                "File c.bnl: no such file",
            ]
        );
    }

    #[test]
    fn not_element_of() {
        let r = Repo::new("notElementOf('a.bnl', bnl(text)). notElementOf('b.bnl', bnl(text)).", &[("a.bnl", "101.01\n"), ("b.bnl", "10x1\n")]);
        assert_eq!(r.run(Mode::Check), ["File a.bnl unexpectedly element of language bnl(text)."]);
    }

    #[test]
    fn negated_claim_on_unparseable_term_holds() {
        let r = Repo::new("notElementOf('a.value', bnl(value(term))).", &[("a.value", "5.25 )\n")]);
        assert!(r.run(Mode::Check).is_empty());
        let r = Repo::new("elementOf('a.value', bnl(value(term))).", &[("a.value", "5.25 )\n")]);
        assert_eq!(r.run(Mode::Check).len(), 1);
    }

    #[test]
    fn create_then_check_converges() {
        let r = Repo::new(EVAL, &[("a.bnl", "101.01\n")]);
        assert_eq!(r.run(Mode::Check), ["File a.value: no such file", "missing baseline a.value"]);
        assert_eq!(r.read("a.value"), None);
        assert!(r.run(Mode::Create).is_empty());
        assert_eq!(r.read("a.value").unwrap(), "5.25.\n");
        assert!(r.run(Mode::Check).is_empty());
    }

    #[test]
    fn tolerance_equivalence_accepts_close_baseline() {
        let r = Repo::new(EVAL, &[("a.bnl", "101.01\n"), ("a.value", "5.2500000001.\n")]);
        assert!(r.run(Mode::Check).is_empty());
        let before = r.snapshot();
        assert!(r.run(Mode::Override).is_empty());
        assert_eq!(r.snapshot(), before);
    }

    #[test]
    fn disagreeing_baseline_and_override() {
        let r = Repo::new(EVAL, &[("a.bnl", "101.01\n"), ("a.value", "5.5.\n")]);
        let before = r.snapshot();
        assert_eq!(r.run(Mode::Check), ["disagreeing baseline a.value"]);
        assert_eq!(r.snapshot(), before);
        assert_eq!(r.run(Mode::Create), ["disagreeing baseline a.value"]);
        assert!(r.run(Mode::Override).is_empty());
        assert_eq!(r.read("a.value").unwrap(), "5.25.\n");
        let once = r.snapshot();
        assert!(r.run(Mode::Override).is_empty());
        assert_eq!(r.snapshot(), once);
    }

    #[test]
    fn unreadable_baseline_disagrees() {
        let r = Repo::new(EVAL, &[("a.bnl", "101.01\n"), ("a.value", "5.25 )\n")]);
        let ps = r.run_with(Mode::Check, |_| {});
        assert_eq!(ps.len(), 2);
        assert!(ps[0].message.starts_with("File a.value: not readable as"), "{}", ps[0].message);
        assert_eq!(ps[1].message, "disagreeing baseline a.value");
        assert!(!ps[1].details.is_empty());
    }

    #[test]
    fn broken_overload_is_named() {
        let decls = format!("{EVAL} function(evaluate, [bnl(text)], [bnl(value(term))], broken, []).");
        let r = Repo::new(&decls, &[("a.bnl", "101.01\n"), ("a.value", "5.25.\n")]);
        assert_eq!(r.run(Mode::Check), ["Overload evaluate#broken(['a.bnl'])->(['a.value']): failed."]);
    }

    #[test]
    fn overloads_must_agree_and_first_writes() {
        let decls = format!("{EVAL} function(evaluate, [bnl(text)], [bnl(value(term))], bnlEvaluateTextWrong, []).");
        let r = Repo::new(&decls, &[("a.bnl", "101.01\n")]);
        assert_eq!(r.run(Mode::Create), ["disagreeing baseline a.value"]);
        assert_eq!(r.read("a.value").unwrap(), "5.25.\n");
        fs::remove_file(r.root().join("a.value")).unwrap();
        assert_eq!(r.run(Mode::Override), ["File a.value: no such file", "missing baseline a.value", "missing baseline a.value"]);
    }

    #[test]
    fn missing_input_and_overload() {
        let r = Repo::new(EVAL, &[]);
        assert_eq!(r.run(Mode::Check), ["File a.bnl: no such file", "File a.value: no such file", "File a.bnl: no such file"]);
        let r = Repo::new(
            "function(render, [json], [], jsonOk, []). elementOf('a.bnl', bnl(text)). mapsTo(render, ['a.bnl'], []).",
            &[("a.bnl", "1\n")],
        );
        let m = collect(r.root()).unwrap();
        let host = PluginHost::new(registry(), HostConfig::new(r.root()));
        let ps = Verifier::new(&m, &host, Mode::Check).run(|_| true);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].message, "Overload render:(['a.bnl']) \u{2192} ([]): missing.");
    }

    #[test]
    fn normalized_json_compares_canonically() {
        let decls = "
            function(toJson, [bnl(text)], [bnl(json)], toJsonNative, []).
            elementOf('a.bnl', bnl(text)). elementOf('a.json', bnl(json)).
            mapsTo(toJson, ['a.bnl'], ['a.json']).
        ";
        let r = Repo::new(decls, &[("a.bnl", "1\n"), ("a.json", "{ \"b\" : 1,\n\"a\": [ 2 ] }")]);
        let m = collect(r.root()).unwrap();
        let mut reg = registry();
        reg.register("toJsonNative", |c| Ok(vec![c.out_text(0, "{\"a\":[2],\"b\":1}")?]));
        let host = PluginHost::new(reg, HostConfig::new(r.root()));
        let v = Verifier::new(&m, &host, Mode::Check);
        assert!(v.run(|_| true).is_empty());
    }

    #[test]
    fn relation_without_outputs() {
        let decls = "
            relation(sameValue, [bnl(text), bnl(value(term))], sameValueNative, []).
            elementOf('a.bnl', bnl(text)). elementOf('a.value', bnl(value(term))).
            relatesTo(sameValue, ['a.bnl', 'a.value']).
        ";
        let r = Repo::new(decls, &[("a.bnl", "1\n"), ("a.value", "2.\n")]);
        let m = collect(r.root()).unwrap();
        let mut reg = registry();
        reg.register("sameValueNative", |c| {
            let v = crate::langkit::bnl::evaluate_text(c.input_text(0)?).map_err(|e| NativeError::fail(e.to_string()))?;
            if c.input_term(1)?.as_number() == Some(v) { Ok(Vec::new()) } else { Err(NativeError::fail("values differ")) }
        });
        let host = PluginHost::new(reg, HostConfig::new(r.root()));
        let ps = Verifier::new(&m, &host, Mode::Check).run(|_| true);
        assert_eq!(ps.len(), 1);
        assert!(ps[0].message.starts_with("Overload sameValue#sameValueNative"), "{}", ps[0].message);
        assert_eq!(ps[0].details[0], "values differ");
    }

    #[test]
    fn gated_membership_warns() {
        let decls = "
            language(bin). language(py(bin)). membership(py(bin), python('accept.py'), []).
            elementOf('a.py', py(bin)). notElementOf('b.py', py(bin)).
            elementOf('c.bnl', bnl(text)).
        ";
        let r = Repo::new(decls, &[("a.py", "x\n"), ("b.py", "y\n"), ("c.bnl", "1\n")]);
        let ps = r.run_with(Mode::Check, |_| {});
        let summary: Vec<_> = ps.iter().map(|p| (p.severity, p.message.as_str())).collect();
        assert_eq!(
            summary,
            [
                (Severity::Warning, "File a.py element of language py(bin): no active membership test."),
                (Severity::Warning, "File b.py not element of language py(bin): no active membership test."),
            ]
        );
    }

    #[test]
    fn create_follows_data_dependencies() {
        let decls = "
            language(formula(term)). language(bnl(formula(term))).
            function(convert, [bnl(text)], [bnl(formula(term))], bnlConvert, []).
            function(solve, [bnl(formula(term))], [bnl(value(term))], formulaSolve, []).
            elementOf('a.bnl', bnl(text)). elementOf('a.formula', bnl(formula(term))). elementOf('a.value', bnl(value(term))).
            mapsTo(solve, ['a.formula'], ['a.value']).
            mapsTo(convert, ['a.bnl'], ['a.formula']).
        ";
        let r = Repo::new(decls, &[("a.bnl", "101.01\n")]);
        let msgs = r.run(Mode::Create);
        assert!(msgs.iter().all(|m| !m.contains("no such file")), "{msgs:?}");
        assert!(msgs.is_empty(), "{msgs:?}");
        assert_eq!(r.read("a.formula").unwrap(), "2^(1+1+1-1)+(0+2^(1+1+1-1-1-1))+(0+2^(-1-1)).\n");
        assert_eq!(r.read("a.value").unwrap(), "5.25.\n");
        assert!(r.run(Mode::Check).is_empty());
    }

    #[test]
    fn problems_follow_declaration_order() {
        let decls = "
            elementOf('z.bnl', bnl(text)). elementOf('y.bnl', bnl(text)). elementOf('x.bnl', bnl(text)).
        ";
        let r = Repo::new(decls, &[]);
        assert_eq!(r.run(Mode::Check), ["File z.bnl: no such file", "File y.bnl: no such file", "File x.bnl: no such file"]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("create".parse::<Mode>().unwrap(), Mode::Create);
        assert!("force".parse::<Mode>().is_err());
        assert_eq!(Mode::Override.to_string(), "override");
    }
}
