//! Generic equivalences, normalizations and membership tests.
//!
//! Equivalences receive `[expected, actual]` and succeed iff the two are
//! equivalent. Normalizations map one input to one output of the same
//! language.

use serde_json::Value;

use crate::content::Content;
use crate::plugin_host::{NativeCall, NativeError, NativeRegistry};
use crate::term::Term;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

fn ok_if(holds: bool, why: impl FnOnce() -> String) -> Result<Vec<Content>, NativeError> {
    if holds {
        Ok(Vec::new())
    } else {
        Err(NativeError::fail(why()))
    }
}

fn json_input(c: &NativeCall<'_>, i: usize) -> Result<Value, NativeError> {
    serde_json::from_str(c.input_text(i)?).map_err(|e| NativeError::fail(format!("input {}: invalid JSON: {e}", i + 1)))
}

/// Key-sorted, two-space indented JSON with a final newline.
pub fn json_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn trim_trailing_whitespace(text: &str) -> String {
    let mut out: String = text.lines().map(str::trim_end).collect::<Vec<_>>().join("\n");
    if text.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn tolerance(c: &NativeCall<'_>) -> Result<f64, NativeError> {
    match c.preapplied.first() {
        None => Ok(DEFAULT_TOLERANCE),
        Some(t) => t
            .as_number()
            .filter(|x| *x >= 0.0)
            .ok_or_else(|| NativeError::fault(format!("tolerance must be a non-negative number, found {t}"))),
    }
}

fn numbers(t: &Term, out: &mut Vec<f64>) -> bool {
    match t {
        Term::Int(_) | Term::Float(_) => {
            out.push(t.as_number().unwrap());
            true
        }
        Term::List(items) => items.iter().all(|i| numbers(i, out)),
        _ => false,
    }
}

/// Equal up to `tol` per number; numbers may be nested in lists. Other
/// terms must be structurally equal.
pub fn within_tolerance(a: &Term, b: &Term, tol: f64) -> bool {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    if numbers(a, &mut xs) && numbers(b, &mut ys) {
        xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| (x - y).abs() <= tol)
    } else {
        a == b
    }
}

pub fn register(reg: &mut NativeRegistry) {
    reg.register("byteEqual", |c| ok_if(c.input(0)?.bytes() == c.input(1)?.bytes(), || "contents differ".into()));
    reg.register("termEqual", |c| ok_if(c.input_term(0)? == c.input_term(1)?, || "terms differ".into()));
    reg.register("numericTolerance", |c| {
        let tol = tolerance(c)?;
        let (a, b) = (c.input_term(0)?, c.input_term(1)?);
        ok_if(within_tolerance(a, b, tol), || format!("{a} and {b} differ by more than {tol}"))
    });
    reg.register("jsonEqual", |c| ok_if(json_input(c, 0)? == json_input(c, 1)?, || "JSON documents differ".into()));

    reg.register("identity", |c| Ok(vec![c.input(0)?.clone()]));
    reg.register("jsonCanonical", |c| Ok(vec![c.out_text(0, json_canonical(&json_input(c, 0)?))?]));
    reg.register("trimTrailingWhitespace", |c| Ok(vec![c.out_text(0, trim_trailing_whitespace(c.input_text(0)?))?]));

    reg.register("utf8Text", |c| c.input_text(0).map(|_| Vec::new()));
    reg.register("termOk", |c| c.input_term(0).map(|_| Vec::new()));
    reg.register("jsonOk", |c| json_input(c, 0).map(|_| Vec::new()));
}

/// Generic built-ins plus the language processors of [`crate::langkit`].
pub fn standard_registry() -> NativeRegistry {
    let mut reg = NativeRegistry::new();
    register(&mut reg);
    crate::langkit::register(&mut reg);
    reg
}
