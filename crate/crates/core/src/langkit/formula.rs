//! Arithmetic formulas over integers with `+`, `-`, `^` and negation.

use super::LangkitError;
use crate::term::Term;

pub fn solve(f: &Term) -> Result<f64, LangkitError> {
    match f {
        Term::Int(i) => Ok(*i as f64),
        Term::Float(x) => Ok(*x),
        Term::Compound(op, args) => match (op.as_str(), args.as_slice()) {
            ("+", [a, b]) => Ok(solve(a)? + solve(b)?),
            ("-", [a, b]) => Ok(solve(a)? - solve(b)?),
            ("^", [a, b]) => Ok(solve(a)?.powf(solve(b)?)),
            ("-", [a]) => Ok(-solve(a)?),
            _ => Err(malformed(f)),
        },
        _ => Err(malformed(f)),
    }
}

fn malformed(f: &Term) -> LangkitError {
    LangkitError::Rejected(format!("malformed formula {f}"))
}

/// `true` if `f` is built from numbers and the formula operators only.
pub fn is_formula(f: &Term) -> bool {
    match f {
        Term::Int(_) | Term::Float(_) => true,
        Term::Compound(op, args) => match (op.as_str(), args.as_slice()) {
            ("+" | "-" | "^", [a, b]) => is_formula(a) && is_formula(b),
            ("-", [a]) => is_formula(a),
            _ => false,
        },
        _ => false,
    }
}
