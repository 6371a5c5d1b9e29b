use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::SystemTime;

use walkdir::WalkDir;

use super::{HostError, STDERR_LIMIT};
use crate::term::{read_terms, Term};

pub const MANIFEST_FILE_NAME: &str = ".ueber-plugin";
pub const STAMP_FILE_NAME: &str = ".ueber-plugin.stamp";

/// Build and run instructions for the foreign units of one directory.
///
/// ```text
/// build('javac -d out BnlAcceptor.java').
/// run('java -cp out').
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluginManifest {
    pub dir: PathBuf,
    pub build: Option<String>,
    pub run: Option<String>,
}

impl PluginManifest {
    /// Reads the manifest of `dir`, if there is one.
    pub fn load(dir: &Path) -> Result<Option<Self>, HostError> {
        let path = dir.join(MANIFEST_FILE_NAME);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(HostError::io(&path, e)),
        };
        let bad = |message: String| HostError::Manifest { path: path.clone(), message };
        let mut m = PluginManifest { dir: dir.to_path_buf(), build: None, run: None };
        for st in read_terms(&text).map_err(|e| bad(e.to_string()))? {
            let value = match st.term.args() {
                [Term::Atom(s)] => s.clone(),
                _ => return Err(bad(format!("line {}: expected build('..') or run('..')", st.line))),
            };
            match st.term.functor() {
                Some("build") => m.build = Some(value),
                Some("run") => m.run = Some(value),
                _ => return Err(bad(format!("line {}: unknown entry {}", st.line, st.term))),
            }
        }
        Ok(Some(m))
    }

    /// The runner prefix from `run`, split on whitespace.
    pub fn runner(&self) -> Option<Vec<String>> {
        self.run.as_ref().map(|r| r.split_whitespace().map(str::to_string).collect())
    }

    pub fn stamp_path(&self) -> PathBuf {
        self.dir.join(STAMP_FILE_NAME)
    }

    /// `true` if some file of the directory is newer than the stamp, or
    /// there is no stamp.
    pub fn is_stale(&self) -> bool {
        let stamp = match std::fs::metadata(self.stamp_path()).and_then(|m| m.modified()) {
            Ok(t) => t,
            Err(_) => return true,
        };
        newest_source(&self.dir).is_some_and(|t| t > stamp)
    }

    /// Runs `build` through `sh -c` in the directory if stale and records a
    /// stamp. Returns whether a build ran.
    pub fn ensure_built(&self) -> Result<bool, HostError> {
        let Some(build) = &self.build else { return Ok(false) };
        if !self.is_stale() {
            return Ok(false);
        }
        let out = Command::new("sh")
            .arg("-c")
            .arg(build)
            .current_dir(&self.dir)
            .output()
            .map_err(|source| HostError::Spawn { command: build.clone(), source })?;
        if !out.status.success() {
            return Err(HostError::BuildFailed { dir: self.dir.clone(), stderr: truncate_lossy(&out.stderr) });
        }
        let stamp = self.stamp_path();
        std::fs::write(&stamp, b"").map_err(|e| HostError::io(&stamp, e))?;
        Ok(true)
    }
}

fn newest_source(dir: &Path) -> Option<SystemTime> {
    WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.file_name() != STAMP_FILE_NAME)
        .filter_map(|e| e.metadata().ok()?.modified().ok())
        .max()
}

pub(crate) fn truncate_lossy(bytes: &[u8]) -> String {
    let cut = &bytes[..bytes.len().min(STDERR_LIMIT)];
    let mut s = String::from_utf8_lossy(cut).into_owned();
    if bytes.len() > STDERR_LIMIT {
        s.push_str("...");
    }
    s.trim_end().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn absent_manifest() {
        let d = tempfile::tempdir().unwrap();
        assert_eq!(PluginManifest::load(d.path()).unwrap(), None);
    }

    #[test]
    fn parse_entries() {
        let d = tempfile::tempdir().unwrap();
        std::fs::write(d.path().join(MANIFEST_FILE_NAME), "build('make all').\nrun('java -cp out').\n").unwrap();
        let m = PluginManifest::load(d.path()).unwrap().unwrap();
        assert_eq!(m.build.as_deref(), Some("make all"));
        assert_eq!(m.runner().unwrap(), ["java", "-cp", "out"]);
        std::fs::write(d.path().join(MANIFEST_FILE_NAME), "compile(x).\n").unwrap();
        assert!(matches!(PluginManifest::load(d.path()), Err(HostError::Manifest { .. })));
    }

    #[test]
    fn build_runs_only_when_stale() {
        let d = tempfile::tempdir().unwrap();
        std::fs::write(d.path().join(MANIFEST_FILE_NAME), "build('echo built >> build.log').\n").unwrap();
        let m = PluginManifest::load(d.path()).unwrap().unwrap();
        assert!(m.ensure_built().unwrap());
        assert!(!m.ensure_built().unwrap());
        assert_eq!(std::fs::read_to_string(d.path().join("build.log")).unwrap(), "built\n");

        std::thread::sleep(Duration::from_millis(20));
        let src = d.path().join("Src.java");
        std::fs::write(&src, "class Src {}").unwrap();
        let later = SystemTime::now() + Duration::from_secs(5);
        std::fs::File::options().write(true).open(&src).unwrap().set_modified(later).unwrap();
        assert!(m.is_stale());
        assert!(m.ensure_built().unwrap());
        assert_eq!(std::fs::read_to_string(d.path().join("build.log")).unwrap(), "built\nbuilt\n");
    }

    #[test]
    fn failing_build_reports_stderr() {
        let d = tempfile::tempdir().unwrap();
        std::fs::write(d.path().join(MANIFEST_FILE_NAME), "build('echo nope >&2; exit 3').\n").unwrap();
        let m = PluginManifest::load(d.path()).unwrap().unwrap();
        match m.ensure_built() {
            Err(HostError::BuildFailed { stderr, .. }) => assert_eq!(stderr, "nope"),
            other => panic!("{other:?}"),
        }
        assert!(!m.stamp_path().exists());
    }

    #[test]
    fn truncation() {
        assert_eq!(truncate_lossy(b"abc\n"), "abc");
        let long = vec![b'x'; STDERR_LIMIT + 10];
        assert_eq!(truncate_lossy(&long).len(), STDERR_LIMIT + 3);
    }
}
