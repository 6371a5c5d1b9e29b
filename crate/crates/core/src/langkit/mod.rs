//! Sample language processors for the binary number language and its
//! syntax definition notations, exposed as native predicates.

pub mod bnl;
pub mod cst;
pub mod formula;
pub mod grammar;
pub mod signature;

pub use cst::{explode, Cst};
pub use grammar::{read_bgl, GSym, Grammar, Rule};
pub use signature::{read_bsl, Signature, Symbol};

use crate::plugin_host::{NativeCall, NativeError, NativeRegistry};
use crate::term::Term;
use crate::Content;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangkitError {
    #[error("bad grammar: {0}")]
    Grammar(String),
    #[error("bad signature: {0}")]
    Signature(String),
    #[error("bad tree: {0}")]
    Tree(String),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Rejected(String),
}

/// A scanner by the name used in goals, e.g. `bnlScanner`.
pub type Scanner = fn(&str) -> Result<Vec<String>, LangkitError>;

pub fn scanner(name: &str) -> Option<Scanner> {
    match name {
        "bnlScanner" => Some(bnl::scan),
        _ => None,
    }
}

fn fail(e: LangkitError) -> NativeError {
    NativeError::fail(e.to_string())
}

fn fault(e: LangkitError) -> NativeError {
    NativeError::fault(e.to_string())
}

fn ok_if(holds: bool, why: impl FnOnce() -> String) -> Result<Vec<Content>, NativeError> {
    if holds {
        Ok(Vec::new())
    } else {
        Err(NativeError::fail(why()))
    }
}

fn static_grammar(c: &NativeCall<'_>) -> Result<Grammar, NativeError> {
    Grammar::from_term(&c.static_term(0)?).map_err(fault)
}

fn static_signature(c: &NativeCall<'_>) -> Result<Signature, NativeError> {
    Signature::from_term(&c.static_term(0)?).map_err(fault)
}

/// Tokens of the first input: scanned text when a scanner is preapplied,
/// a token list term otherwise.
fn input_tokens(c: &NativeCall<'_>) -> Result<Vec<String>, NativeError> {
    match c.preapplied.first() {
        Some(_) => {
            let name = c.preapplied_atom(0)?;
            let scan = scanner(name).ok_or_else(|| NativeError::fault(format!("unknown scanner {name}")))?;
            scan(c.input_text(0)?).map_err(fail)
        }
        None => bnl::tokens_from_term(c.input_term(0)?).map_err(fail),
    }
}

fn input_tree(c: &NativeCall<'_>) -> Result<Cst, NativeError> {
    Cst::from_term(c.input_term(0)?).map_err(fail)
}

fn parse_tree(c: &NativeCall<'_>) -> Result<Cst, NativeError> {
    let g = static_grammar(c)?;
    let toks = input_tokens(c)?;
    g.parse(&toks).ok_or_else(|| NativeError::fail("no derivation"))
}

fn bnl_tokens_or_text(c: &NativeCall<'_>) -> Result<Vec<String>, NativeError> {
    let input = c.input(0)?;
    match input.term() {
        Some(t) => bnl::tokens_from_term(t).map_err(fail),
        None => bnl::scan(c.input_text(0)?).map_err(fail),
    }
}

pub fn register(reg: &mut NativeRegistry) {
    reg.register("bnlScanner", |c| {
        let toks = bnl::scan(c.input_text(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, bnl::tokens_term(&toks))?])
    });
    for name in ["bglAcceptor", "bglTopDownAcceptor"] {
        reg.register(name, |c| {
            let g = static_grammar(c)?;
            let toks = input_tokens(c)?;
            ok_if(g.accepts(&toks), || "no derivation".into())
        });
    }
    for name in ["bglParser", "bglTopDownParser"] {
        reg.register(name, |c| Ok(vec![c.out_term(0, parse_tree(c)?.implode())?]));
    }
    reg.register("bglTreeParser", |c| Ok(vec![c.out_term(0, parse_tree(c)?.to_term())?]));
    reg.register("bclOk", |c| {
        let g = static_grammar(c)?;
        ok_if(input_tree(c)?.conforms_to(&g), || "tree is not a derivation of the grammar".into())
    });
    reg.register("cstToAst", |c| Ok(vec![c.out_term(0, input_tree(c)?.implode())?]));
    reg.register("astToCst", |c| {
        let g = static_grammar(c)?;
        let tree = explode(&g, c.input_term(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, tree.to_term())?])
    });
    reg.register("bglTreeToTokens", |c| Ok(vec![c.out_term(0, bnl::tokens_term(&input_tree(c)?.leaves()))?]));
    reg.register("bglTreeToText", |c| Ok(vec![c.out_text(0, input_tree(c)?.leaves().concat() + "\n")?]));

    reg.register("bslTerm", |c| {
        let sig = static_signature(c)?;
        ok_if(sig.conforms(c.input_term(0)?), || "term does not conform to the signature".into())
    });
    reg.register("bslConformance", |c| {
        let sig = Signature::from_term(c.input_term(1)?).map_err(fail)?;
        ok_if(sig.conforms(c.input_term(0)?), || "term does not conform to the signature".into())
    });
    reg.register("bglReader", |c| Ok(vec![c.out_term(0, read_bgl(c.input_text(0)?).map_err(fail)?.to_term())?]));
    reg.register("bslReader", |c| Ok(vec![c.out_term(0, read_bsl(c.input_text(0)?).map_err(fail)?.to_term())?]));
    reg.register("bglTextOk", |c| read_bgl(c.input_text(0)?).map(|_| Vec::new()).map_err(fail));
    reg.register("bslTextOk", |c| read_bsl(c.input_text(0)?).map(|_| Vec::new()).map_err(fail));
    reg.register("bglGrammarOk", |c| Grammar::from_term(c.input_term(0)?).map(|_| Vec::new()).map_err(fail));
    reg.register("bslSignatureOk", |c| Signature::from_term(c.input_term(0)?).map(|_| Vec::new()).map_err(fail));
    reg.register("bglToBsl", |c| {
        let g = Grammar::from_term(c.input_term(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, Signature::project(&g).map_err(fail)?.to_term())?])
    });

    reg.register("bnlEvaluateText", |c| {
        let v = bnl::evaluate_text(c.input_text(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, bnl::value_term(v))?])
    });
    reg.register("bnlEvaluateTokens", |c| {
        let toks = bnl::tokens_from_term(c.input_term(0)?).map_err(fail)?;
        let v = bnl::evaluate_tokens(&toks).map_err(fail)?;
        Ok(vec![c.out_term(0, bnl::value_term(v))?])
    });
    reg.register("bnlEvaluateTerm", |c| {
        let v = bnl::evaluate_ast(c.input_term(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, bnl::value_term(v))?])
    });
    reg.register("bnlConvert", |c| Ok(vec![c.out_term(0, bnl::convert(&bnl_tokens_or_text(c)?).map_err(fail)?)?]));
    reg.register("formulaSolve", |c| {
        let v = formula::solve(c.input_term(0)?).map_err(fail)?;
        Ok(vec![c.out_term(0, bnl::value_term(v))?])
    });
    reg.register("formulaOk", |c| {
        let f = c.input_term(0)?;
        ok_if(formula::is_formula(f), || format!("{f} is not a formula"))
    });
    reg.register("isNumber", |c| {
        let v = c.input_term(0)?;
        ok_if(matches!(v, Term::Int(_) | Term::Float(_)), || format!("{v} is not a number"))
    });
    reg.register("bnlTermToJson", |c| {
        let j = bnl::ast_to_json(c.input_term(0)?).map_err(fail)?;
        Ok(vec![c.out_text(0, bnl::render_json(&j))?])
    });
    reg.register("bnlJsonOk", |c| {
        let v: serde_json::Value =
            serde_json::from_str(c.input_text(0)?).map_err(|e| NativeError::fail(format!("invalid JSON: {e}")))?;
        ok_if(bnl::json_ok(&v), || "not a binary number document".into())
    });
}
