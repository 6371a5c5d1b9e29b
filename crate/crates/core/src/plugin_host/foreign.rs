use std::io::Read;
use std::path::{Path, PathBuf};
use std::os::unix::process::CommandExt;
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::atomic::Ordering;
use std::thread;
use std::time::{Duration, Instant};

use super::manifest::truncate_lossy;
use super::{langs_env, ForeignLang, HostError, InvocationRequest, InvokeError, PluginHost, PluginManifest, PredicateSpec};
use crate::content::Content;
use crate::megamodel::Lang;
use crate::term::write_term;

fn ext(lang: &Lang) -> String {
    lang.base().to_string()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HostError> {
    std::fs::write(path, bytes).map_err(|e| HostError::io(path, e))
}

enum Outcome {
    Exited(ExitStatus, Vec<u8>),
    TimedOut(Vec<u8>),
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut r) = r {
            let _ = r.read_to_end(&mut buf);
        }
        buf
    })
}

fn wait_with_timeout(mut child: Child, timeout: Duration) -> std::io::Result<Outcome> {
    let stdout = drain(child.stdout.take());
    let stderr = drain(child.stderr.take());
    let deadline = Instant::now() + timeout;
    let mut pause = Duration::from_millis(1);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if Instant::now() >= deadline {
            // SAFETY: the child leads its own process group, so this only
            // signals the plugin and whatever it spawned.
            unsafe {
                libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
            }
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(pause);
        pause = (pause * 2).min(Duration::from_millis(25));
    };
    let _ = stdout.join();
    let err = stderr.join().unwrap_or_default();
    Ok(match status {
        Some(s) => Outcome::Exited(s, err),
        None => Outcome::TimedOut(err),
    })
}

impl PluginHost {
    pub(super) fn invoke_foreign(&self, req: &InvocationRequest<'_>) -> Result<Vec<Content>, InvokeError> {
        let PredicateSpec::Foreign { lang, unit, preapplied, dir } = req.pred else {
            unreachable!("invoke_foreign on a native predicate")
        };
        let cfg = self.config();
        let root = std::fs::canonicalize(&cfg.root).unwrap_or_else(|_| cfg.root.clone());
        let decl_dir = dir.to_fs(&root);

        let manifest = PluginManifest::load(&decl_dir)?;
        if let Some(m) = &manifest {
            self.ensure_built(m)?;
        }
        let runner = match manifest.as_ref().and_then(PluginManifest::runner) {
            Some(r) => r,
            None => match lang {
                ForeignLang::Python => cfg.python.split_whitespace().map(str::to_string).collect(),
                ForeignLang::Exec => Vec::new(),
                ForeignLang::Java | ForeignLang::Haskell => return Err(HostError::NoRunner(lang.tag()).into()),
            },
        };

        let scratch = self.fresh_scratch_dir()?;
        let mut in_paths = Vec::with_capacity(req.inputs.len());
        for (i, (c, l)) in req.inputs.iter().zip(req.inlangs).enumerate() {
            let p = scratch.join(format!("in.{i}.{}", ext(l)));
            write_file(&p, c.bytes())?;
            in_paths.push(p);
        }
        let mut out_paths = Vec::with_capacity(req.outlangs.len());
        for (j, l) in req.outlangs.iter().enumerate() {
            let p = scratch.join(format!("out.{j}.{}", ext(l)));
            write_file(&p, b"")?;
            out_paths.push(p);
        }

        let unit_path = decl_dir.join(unit);
        let unit_arg = if unit_path.exists() { unit_path.display().to_string() } else { unit.clone() };
        let mut argv: Vec<String> = runner;
        argv.push(unit_arg);
        argv.extend(preapplied.iter().map(write_term));
        argv.extend(req.static_args.iter().map(|p| p.to_fs(&root).display().to_string()));
        argv.extend(in_paths.iter().chain(&out_paths).map(|p| p.display().to_string()));

        let child = Command::new(&argv[0])
            .args(&argv[1..])
            .current_dir(&decl_dir)
            .env("UEBER_INLANGS", langs_env(req.inlangs))
            .env("UEBER_OUTLANGS", langs_env(req.outlangs))
            .env("UEBER_ROOT", &root)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .process_group(0)
            .spawn()
            .map_err(|source| HostError::Spawn { command: argv.join(" "), source })?;
        self.spawned.fetch_add(1, Ordering::Relaxed);

        let outcome = wait_with_timeout(child, cfg.timeout).map_err(|e| HostError::io(&decl_dir, e))?;
        let failure = |reason: String| {
            self.retain_scratch.store(true, Ordering::Relaxed);
            Err(InvokeError::Failed { reason, scratch: Some(scratch.clone()) })
        };
        match outcome {
            Outcome::TimedOut(err) => {
                let mut reason = format!("timed out after {}s", cfg.timeout.as_secs_f64());
                let stderr = truncate_lossy(&err);
                if !stderr.is_empty() {
                    reason = format!("{reason}: {stderr}");
                }
                return failure(reason);
            }
            Outcome::Exited(status, err) if !status.success() => {
                let code = status.code().map_or_else(|| "signal".to_string(), |c| c.to_string());
                let stderr = truncate_lossy(&err);
                let reason = if stderr.is_empty() {
                    format!("exit status {code}")
                } else {
                    format!("exit status {code}: {stderr}")
                };
                return failure(reason);
            }
            Outcome::Exited(..) => {}
        }

        let mut outputs = Vec::with_capacity(out_paths.len());
        for (j, (p, l)) in out_paths.iter().zip(req.outlangs).enumerate() {
            let bytes = std::fs::read(p).map_err(|e| HostError::io(p, e))?;
            match Content::from_bytes(l.clone(), bytes) {
                Ok(c) => outputs.push(c),
                Err(e) => return failure(format!("output {}: {e}", j + 1)),
            }
        }
        let _ = std::fs::remove_dir_all(&scratch);
        Ok(outputs)
    }

    /// Root of this host's scratch directories, if one was created.
    pub fn scratch_location(&self) -> Option<PathBuf> {
        self.scratch_root.lock().unwrap().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{HostConfig, NativeRegistry};
    use super::*;
    use crate::path::RepoPath;
    use crate::term::{read_term, Term};
    use std::os::unix::fs::PermissionsExt;

    fn script(dir: &Path, name: &str, body: &str) {
        let p = dir.join(name);
        std::fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
        std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
    }

    fn lang(s: &str) -> Lang {
        Lang::new(read_term(s).unwrap()).unwrap()
    }

    fn host(root: &Path) -> PluginHost {
        let mut cfg = HostConfig::new(root).enable("exec").enable("python").enable("java");
        cfg.timeout = Duration::from_secs(10);
        PluginHost::new(NativeRegistry::new(), cfg)
    }

    fn exec(unit: &str, extra: Vec<Term>) -> PredicateSpec {
        PredicateSpec::Foreign { lang: ForeignLang::Exec, unit: unit.into(), preapplied: extra, dir: RepoPath::new("p").unwrap() }
    }

    fn setup() -> tempfile::TempDir {
        let d = tempfile::tempdir().unwrap();
        std::fs::create_dir(d.path().join("p")).unwrap();
        d
    }

    #[test]
    fn argv_order_and_environment() {
        let d = setup();
        let p = d.path().join("p");
        std::fs::write(p.join("grammar.bgl"), "x").unwrap();
        script(
            &p,
            "echo.sh",
            "out=\"\"; for a in \"$@\"; do out=\"$a\"; done\n\
             { echo \"$#\"; for a in \"$@\"; do basename \"$a\"; done; echo \"$UEBER_INLANGS|$UEBER_OUTLANGS\"; \
             basename \"$(pwd)\"; cat \"$3\"; } > \"$out\"",
        );
        let h = host(d.path());
        let pred = exec("echo.sh", vec![read_term("opt(1)").unwrap()]);
        let inl = [lang("bnl(text)")];
        let outl = [lang("report(text)")];
        let inputs = [Content::from_text(inl[0].clone(), "101\n").unwrap()];
        let statics = [RepoPath::new("p/grammar.bgl").unwrap()];
        let req = InvocationRequest { pred: &pred, static_args: &statics, inlangs: &inl, outlangs: &outl, inputs: &inputs };
        let out = h.invoke(&req).unwrap();
        assert_eq!(
            out[0].text().unwrap(),
            "4\nopt(1)\ngrammar.bgl\nin.0.text\nout.0.text\nbnl(text)|report(text)\np\n101\n"
        );
        assert_eq!(h.spawned(), 1);
    }

    #[test]
    fn term_outputs_are_parsed() {
        let d = setup();
        script(&d.path().join("p"), "t.sh", "echo 'f( a , [1,2] ).' > \"$1\"");
        let h = host(d.path());
        let pred = exec("t.sh", vec![]);
        let outl = [lang("ast(term)")];
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &outl, inputs: &[] };
        let out = h.invoke(&req).unwrap();
        assert_eq!(out[0].term().unwrap(), &read_term("f(a,[1,2])").unwrap());
        assert_eq!(out[0].bytes(), b"f(a,[1,2]).\n");
    }

    #[test]
    fn failure_keeps_scratch_and_stderr() {
        let d = setup();
        script(&d.path().join("p"), "no.sh", "echo 'rejected input' >&2; exit 1");
        let h = host(d.path());
        let pred = exec("no.sh", vec![]);
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &[], inputs: &[] };
        let root = match h.invoke(&req) {
            Err(InvokeError::Failed { reason, scratch }) => {
                assert_eq!(reason, "exit status 1: rejected input");
                let s = scratch.unwrap();
                assert!(s.is_dir());
                h.scratch_location().unwrap()
            }
            other => panic!("{other:?}"),
        };
        drop(h);
        assert!(root.is_dir());
        std::fs::remove_dir_all(root).unwrap();
    }

    #[test]
    fn success_cleans_scratch() {
        let d = setup();
        script(&d.path().join("p"), "ok.sh", "exit 0");
        let h = host(d.path());
        let pred = exec("ok.sh", vec![]);
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &[], inputs: &[] };
        h.invoke(&req).unwrap();
        let root = h.scratch_location().unwrap();
        drop(h);
        assert!(!root.exists());
    }

    #[test]
    fn timeout_kills_process() {
        let d = setup();
        script(&d.path().join("p"), "slow.sh", "sleep 30");
        let mut h = host(d.path());
        h.cfg.timeout = Duration::from_millis(200);
        let pred = exec("slow.sh", vec![]);
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &[], inputs: &[] };
        let t = Instant::now();
        match h.invoke(&req) {
            Err(InvokeError::Failed { reason, .. }) => assert!(reason.starts_with("timed out"), "{reason}"),
            other => panic!("{other:?}"),
        }
        assert!(t.elapsed() < Duration::from_secs(10));
        if let Some(r) = h.scratch_location() {
            let _ = std::fs::remove_dir_all(r);
        }
    }

    #[test]
    fn concurrent_invocations_use_distinct_scratch() {
        let d = setup();
        script(&d.path().join("p"), "where.sh", "dirname \"$1\" > \"$1\"");
        let h = host(d.path());
        let pred = exec("where.sh", vec![]);
        let outl = [lang("text")];
        let dirs: Vec<String> = thread::scope(|s| {
            let hs: Vec<_> = (0..8)
                .map(|_| {
                    s.spawn(|| {
                        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &outl, inputs: &[] };
                        h.invoke(&req).unwrap()[0].text().unwrap().to_string()
                    })
                })
                .collect();
            hs.into_iter().map(|j| j.join().unwrap()).collect()
        });
        let unique: std::collections::HashSet<_> = dirs.iter().collect();
        assert_eq!(unique.len(), 8);
    }

    #[test]
    fn python_units_use_configured_interpreter() {
        let d = setup();
        std::fs::write(
            d.path().join("p/up.py"),
            "import sys\nsrc, dst = sys.argv[1], sys.argv[2]\nopen(dst, 'w').write(open(src).read().upper())\n",
        )
        .unwrap();
        let h = host(d.path());
        let pred = PredicateSpec::Foreign {
            lang: ForeignLang::Python,
            unit: "up.py".into(),
            preapplied: vec![],
            dir: RepoPath::new("p").unwrap(),
        };
        let l = [lang("text")];
        let inputs = [Content::from_text(l[0].clone(), "abc").unwrap()];
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &l, outlangs: &l, inputs: &inputs };
        assert_eq!(h.invoke(&req).unwrap()[0].text().unwrap(), "ABC");
    }

    #[test]
    fn manifest_supplies_runner_and_build() {
        let d = setup();
        let p = d.path().join("p");
        std::fs::write(p.join(".ueber-plugin"), "build('printf \"exit 0\" > Gen.sh').\nrun('sh').\n").unwrap();
        let h = host(d.path());
        let pred = PredicateSpec::Foreign {
            lang: ForeignLang::Java,
            unit: "Gen.sh".into(),
            preapplied: vec![],
            dir: RepoPath::new("p").unwrap(),
        };
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &[], inputs: &[] };
        h.invoke(&req).unwrap();
        assert!(p.join(".ueber-plugin.stamp").exists());
    }

    #[test]
    fn java_without_manifest_has_no_runner() {
        let d = setup();
        let h = host(d.path());
        let pred = PredicateSpec::Foreign {
            lang: ForeignLang::Java,
            unit: "org.example.Acceptor".into(),
            preapplied: vec![],
            dir: RepoPath::new("p").unwrap(),
        };
        let mut cfg = h.config().clone();
        cfg.enabled_ffi.insert("java".into());
        let h = PluginHost::new(NativeRegistry::new(), cfg);
        let req = InvocationRequest { pred: &pred, static_args: &[], inlangs: &[], outlangs: &[], inputs: &[] };
        assert!(matches!(h.invoke(&req), Err(InvokeError::Host(HostError::NoRunner("java")))));
    }
}
