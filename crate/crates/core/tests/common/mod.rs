#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tempfile::TempDir;
use ueber_core::checker::check_each;
use ueber_core::plugin_host::NativeRegistry;
use ueber_core::{collect, standard_registry, HostConfig, Mode, PluginHost, Problem, Severity, Verifier};

pub const SAMPLES: &str = "languages/BNL/samples";

/// Files the fixture can regenerate from its sources.
pub const DERIVED: &[&str] = &[
    "languages/BNL/cs.term",
    "languages/BNL/as.term",
    "languages/BNL/samples/5comma25.tokens",
    "languages/BNL/samples/5comma25.term",
    "languages/BNL/samples/5comma25.tree",
    "languages/BNL/samples/5comma25.value",
    "languages/BNL/samples/5comma25.formula",
    "languages/BNL/samples/5comma25.json",
    "languages/BNL/samples/3.term",
    "languages/BNL/samples/3.value",
];

pub fn fixture_source() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/yas-mini")
}

pub fn fixture() -> TempDir {
    let src = fixture_source();
    let dst = tempfile::tempdir().unwrap();
    for e in walkdir::WalkDir::new(&src) {
        let e = e.unwrap();
        let to = dst.path().join(e.path().strip_prefix(&src).unwrap());
        if e.file_type().is_dir() {
            fs::create_dir_all(&to).unwrap();
        } else {
            fs::copy(e.path(), &to).unwrap();
        }
    }
    dst
}

pub struct Outcome {
    pub problems: Vec<Problem>,
    pub skipped: usize,
}

impl Outcome {
    pub fn failures(&self) -> Vec<&Problem> {
        self.problems.iter().filter(|p| p.severity.is_failure()).collect()
    }

    pub fn messages(&self) -> Vec<&str> {
        self.failures().into_iter().map(|p| p.message.as_str()).collect()
    }
}

/// Collection, checking and verification; ill-formed declarations are not
/// verified.
pub fn pipeline_with(root: &Path, mode: Mode, reg: NativeRegistry) -> Outcome {
    let m = collect(root).unwrap();
    let checked = check_each(&m);
    let skip: Vec<bool> = checked.iter().map(|fs| fs.iter().any(|f| f.severity == Severity::IllFormed)).collect();
    let host = PluginHost::new(reg, HostConfig::new(root));
    let verified = Verifier::new(&m, &host, mode).run(|i| !skip[i]);
    let mut problems = m.problems.clone();
    problems.extend(checked.into_iter().zip(&m.decls).flat_map(|(fs, sd)| fs.into_iter().map(move |f| f.at(sd))));
    problems.extend(verified);
    Outcome { problems, skipped: host.skipped() }
}

pub fn pipeline(root: &Path, mode: Mode) -> Outcome {
    pipeline_with(root, mode, standard_registry())
}

pub fn tree_hash(root: &Path) -> String {
    let mut entries: Vec<(String, Vec<u8>)> = walkdir::WalkDir::new(root)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| (e.path().strip_prefix(root).unwrap().display().to_string(), fs::read(e.path()).unwrap()))
        .collect();
    entries.sort();
    let mut h = Sha256::new();
    for (p, b) in entries {
        h.update(p.as_bytes());
        h.update([0]);
        h.update((b.len() as u64).to_le_bytes());
        h.update(&b);
    }
    format!("{:x}", h.finalize())
}
