//! Concrete syntax trees: implode to abstract terms, explode back, unparse.

use super::grammar::{GSym, Grammar};
use super::LangkitError;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cst {
    Node { label: String, lhs: String, children: Vec<Cst> },
    Leaf(String),
}

impl Cst {
    /// `node(Label, Lhs, [..])` or `leaf('tok')`.
    pub fn to_term(&self) -> Term {
        match self {
            Cst::Leaf(t) => Term::compound("leaf", vec![Term::atom(t.clone())]),
            Cst::Node { label, lhs, children } => Term::compound(
                "node",
                vec![Term::atom(label.clone()), Term::atom(lhs.clone()), Term::list(children.iter().map(Cst::to_term).collect())],
            ),
        }
    }

    pub fn from_term(t: &Term) -> Result<Self, LangkitError> {
        let bad = || LangkitError::Tree(format!("malformed tree node {t}"));
        match (t.functor(), t.args()) {
            (Some("leaf"), [Term::Atom(x)]) => Ok(Cst::Leaf(x.clone())),
            (Some("node"), [Term::Atom(label), Term::Atom(lhs), Term::List(cs)]) => Ok(Cst::Node {
                label: label.clone(),
                lhs: lhs.clone(),
                children: cs.iter().map(Cst::from_term).collect::<Result<_, _>>()?,
            }),
            _ => Err(bad()),
        }
    }

    /// Tokens in left-to-right order.
    pub fn leaves(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<String>) {
        match self {
            Cst::Leaf(t) => out.push(t.clone()),
            Cst::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Drops leaves; a node becomes its label applied to its imploded
    /// non-leaf children.
    pub fn implode(&self) -> Term {
        match self {
            Cst::Leaf(t) => Term::atom(t.clone()),
            Cst::Node { label, children, .. } => Term::compound(
                label.clone(),
                children.iter().filter(|c| matches!(c, Cst::Node { .. })).map(Cst::implode).collect(),
            ),
        }
    }

    /// `true` if the tree is a derivation of `g` from its start symbol.
    pub fn conforms_to(&self, g: &Grammar) -> bool {
        matches!(self, Cst::Node { lhs, .. } if lhs == g.start()) && self.node_ok(g)
    }

    fn node_ok(&self, g: &Grammar) -> bool {
        let Cst::Node { label, lhs, children } = self else { return false };
        let Some(rule) = g.rule(label) else { return false };
        rule.lhs == *lhs
            && rule.rhs.len() == children.len()
            && rule.rhs.iter().zip(children).all(|(s, c)| match (s, c) {
                (GSym::Terminal(t), Cst::Leaf(x)) => t == x,
                (GSym::Nonterminal(n), c @ Cst::Node { lhs, .. }) => n == lhs && c.node_ok(g),
                _ => false,
            })
    }
}

/// Rebuilds the parse tree of an abstract term against `g`.
pub fn explode(g: &Grammar, t: &Term) -> Result<Cst, LangkitError> {
    explode_at(g, g.start(), t)
}

fn explode_at(g: &Grammar, expected: &str, t: &Term) -> Result<Cst, LangkitError> {
    let mismatch = || LangkitError::Tree(format!("term {t} does not match any rule for {expected}"));
    let label = t.functor().ok_or_else(mismatch)?;
    let rule = g.rule(label).filter(|r| r.lhs == expected).ok_or_else(mismatch)?;
    let nonterminals = rule.rhs.iter().filter(|s| matches!(s, GSym::Nonterminal(_))).count();
    if nonterminals != t.arity() {
        return Err(mismatch());
    }
    let mut args = t.args().iter();
    let children = rule
        .rhs
        .iter()
        .map(|s| match s {
            GSym::Terminal(x) => Ok(Cst::Leaf(x.clone())),
            GSym::Nonterminal(n) => explode_at(g, n, args.next().expect("arity checked")),
        })
        .collect::<Result<_, _>>()?;
    Ok(Cst::Node { label: rule.label.clone(), lhs: rule.lhs.clone(), children })
}
