//! Synthetic repositories for benchmarks.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

const DECLS: &str = "
language(text). language(term). language(value(term)). language(formula(term)).
language(bnl(text)). language(bnl(value(term))). language(bnl(formula(term))).
membership(text, utf8Text, []). membership(term, termOk, []).
membership(bnl(value(term)), isNumber, []). membership(bnl(formula(term)), formulaOk, []).
equivalence(bnl(value(term)), numericTolerance(0.000000001), []).
function(evaluate, [bnl(text)], [bnl(value(term))], bnlEvaluateText, []).
function(convert, [bnl(text)], [bnl(formula(term))], bnlConvert, []).
function(solve, [bnl(formula(term))], [bnl(value(term))], formulaSolve, []).
";

/// Binary text of `i` with a two-bit fraction.
pub fn binary_sample(i: usize) -> String {
    format!("{:b}.{:02b}\n", i / 4, i % 4)
}

/// Writes a repository with `n` binary number samples, each evaluated
/// directly and through a formula. Baselines are not written.
pub fn write_repo(root: &Path, n: usize) -> io::Result<()> {
    fs::write(root.join(".ueber"), DECLS)?;
    let samples = root.join("samples");
    fs::create_dir_all(&samples)?;
    let mut decls = String::new();
    for i in 0..n {
        fs::write(samples.join(format!("s{i}.bnl")), binary_sample(i))?;
        writeln!(
            decls,
            "macro(fxy(evaluate, 's{i}.bnl', bnl(text), 's{i}.value', bnl(value(term)))).\n\
             macro(fxy(convert, 's{i}.bnl', bnl(text), 's{i}.formula', bnl(formula(term)))).\n\
             mapsTo(solve, ['s{i}.formula'], ['s{i}.value'])."
        )
        .expect("writing to a String");
    }
    fs::write(samples.join(".ueber"), decls)
}
