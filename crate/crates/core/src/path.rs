use std::fmt;
use std::path::{Component, Path, PathBuf};

/// A normalized, repository-root-relative path with `/` separators.
///
/// The repository root itself is `.`. Values never contain `..` or `.`
/// segments and never escape the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct RepoPath(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path `{0}` leaves the repository")]
    Escapes(String),
    #[error("path `{0}` is absolute")]
    Absolute(String),
    #[error("path `{0}` is empty")]
    Empty(String),
}

impl RepoPath {
    pub fn root() -> Self {
        RepoPath(".".to_string())
    }

    /// Parses a root-relative path, normalizing `.` and `..` segments.
    pub fn new(path: &str) -> Result<Self, PathError> {
        RepoPath::root().join(path)
    }

    pub fn is_root(&self) -> bool {
        self.0 == "."
    }

    fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('/').filter(|s| !s.is_empty() && *s != ".")
    }

    /// Resolves `rel` against this path, which is taken to be a directory.
    pub fn join(&self, rel: &str) -> Result<Self, PathError> {
        if rel.is_empty() {
            return Err(PathError::Empty(rel.to_string()));
        }
        if rel.starts_with('/') {
            return Err(PathError::Absolute(rel.to_string()));
        }
        let mut stack: Vec<&str> = self.segments().collect();
        for seg in rel.split('/') {
            match seg {
                "" | "." => {}
                ".." => {
                    if stack.pop().is_none() {
                        return Err(PathError::Escapes(rel.to_string()));
                    }
                }
                s => stack.push(s),
            }
        }
        if stack.is_empty() {
            Ok(RepoPath::root())
        } else {
            Ok(RepoPath(stack.join("/")))
        }
    }

    /// The containing directory; the root is its own parent.
    pub fn parent(&self) -> Self {
        match self.0.rfind('/') {
            Some(idx) => RepoPath(self.0[..idx].to_string()),
            None => RepoPath::root(),
        }
    }

    pub fn file_name(&self) -> &str {
        match self.0.rfind('/') {
            Some(idx) => &self.0[idx + 1..],
            None => &self.0,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_fs(&self, root: &Path) -> PathBuf {
        let mut p = root.to_path_buf();
        for seg in self.segments() {
            p.push(seg);
        }
        p
    }

    /// Converts a filesystem path below `root` back into a `RepoPath`.
    pub fn from_fs(root: &Path, path: &Path) -> Option<Self> {
        let rel = path.strip_prefix(root).ok()?;
        let mut parts = Vec::new();
        for c in rel.components() {
            match c {
                Component::Normal(s) => parts.push(s.to_str()?.to_string()),
                Component::CurDir => {}
                _ => return None,
            }
        }
        Some(if parts.is_empty() { RepoPath::root() } else { RepoPath(parts.join("/")) })
    }
}

impl fmt::Display for RepoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits a file name into base and extension at the last `.` of its final
/// segment.
pub fn split_extension(file: &str) -> Option<(&str, &str)> {
    let name_start = file.rfind('/').map_or(0, |i| i + 1);
    let dot = file[name_start..].rfind('.')? + name_start;
    if dot == name_start || dot + 1 == file.len() {
        return None;
    }
    Some((&file[..dot], &file[dot + 1..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_resolves_against_directory() {
        let dir = RepoPath::new("languages/BNL").unwrap();
        assert_eq!(dir.join("samples/x.bnl").unwrap().as_str(), "languages/BNL/samples/x.bnl");
        assert_eq!(dir.join(".").unwrap(), dir);
        assert_eq!(dir.join("../BGL/./cs.bgl").unwrap().as_str(), "languages/BGL/cs.bgl");
        assert_eq!(dir.join("../..").unwrap(), RepoPath::root());
        assert_eq!(RepoPath::root().join(".").unwrap(), RepoPath::root());
    }

    #[test]
    fn join_rejects_escapes_and_absolutes() {
        let dir = RepoPath::new("a").unwrap();
        assert_eq!(dir.join("../../x"), Err(PathError::Escapes("../../x".into())));
        assert!(matches!(dir.join("/etc/passwd"), Err(PathError::Absolute(_))));
        assert!(matches!(dir.join(""), Err(PathError::Empty(_))));
    }

    #[test]
    fn parent_and_name() {
        let p = RepoPath::new("a/b/.ueber").unwrap();
        assert_eq!(p.parent().as_str(), "a/b");
        assert_eq!(p.file_name(), ".ueber");
        assert_eq!(RepoPath::new(".ueber").unwrap().parent(), RepoPath::root());
    }

    #[test]
    fn fs_round_trip() {
        let root = Path::new("/repo");
        let p = RepoPath::new("x/y.term").unwrap();
        assert_eq!(RepoPath::from_fs(root, &p.to_fs(root)), Some(p));
        assert_eq!(RepoPath::from_fs(root, root), Some(RepoPath::root()));
    }

    #[test]
    fn extensions() {
        assert_eq!(split_extension("d/5comma25.bnl"), Some(("d/5comma25", "bnl")));
        assert_eq!(split_extension("a.b/c"), None);
        assert_eq!(split_extension(".ueber"), None);
        assert_eq!(split_extension("x."), None);
    }
}
