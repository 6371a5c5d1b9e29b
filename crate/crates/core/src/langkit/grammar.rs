//! BNF-style grammars as data, with a backtracking top-down interpreter.

use std::collections::{HashMap, HashSet};

use super::cst::Cst;
use super::LangkitError;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GSym {
    Terminal(String),
    Nonterminal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub label: String,
    pub lhs: String,
    pub rhs: Vec<GSym>,
}

/// A grammar whose first rule's left-hand side is the start symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
}

impl Grammar {
    /// Validates `rules`: non-empty, unique labels, every nonterminal
    /// defined, and no left recursion.
    pub fn new(rules: Vec<Rule>) -> Result<Self, LangkitError> {
        if rules.is_empty() {
            return Err(LangkitError::Grammar("no rules".into()));
        }
        let mut labels = HashSet::new();
        for r in &rules {
            if !labels.insert(r.label.as_str()) {
                return Err(LangkitError::Grammar(format!("duplicate label {}", r.label)));
            }
        }
        let defined: HashSet<&str> = rules.iter().map(|r| r.lhs.as_str()).collect();
        for r in &rules {
            for s in &r.rhs {
                if let GSym::Nonterminal(n) = s {
                    if !defined.contains(n.as_str()) {
                        return Err(LangkitError::Grammar(format!("undefined nonterminal {n} in rule {}", r.label)));
                    }
                }
            }
        }
        let g = Grammar { rules };
        if let Some(n) = g.left_recursive() {
            return Err(LangkitError::Grammar(format!("left recursion through {n}")));
        }
        Ok(g)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.rules[0].lhs
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    fn nullable(&self) -> HashSet<&str> {
        let mut set = HashSet::new();
        loop {
            let before = set.len();
            for r in &self.rules {
                if r.rhs.iter().all(|s| matches!(s, GSym::Nonterminal(n) if set.contains(n.as_str()))) {
                    set.insert(r.lhs.as_str());
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    /// A nonterminal that can derive itself without consuming input, if any.
    fn left_recursive(&self) -> Option<String> {
        let nullable = self.nullable();
        let mut edges: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.rules {
            for s in &r.rhs {
                match s {
                    GSym::Terminal(_) => break,
                    GSym::Nonterminal(n) => {
                        edges.entry(r.lhs.as_str()).or_default().push(n);
                        if !nullable.contains(n.as_str()) {
                            break;
                        }
                    }
                }
            }
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit<'a>(n: &'a str, edges: &HashMap<&'a str, Vec<&'a str>>, marks: &mut HashMap<&'a str, Mark>) -> Option<&'a str> {
            match marks.get(n) {
                Some(Mark::Active) => return Some(n),
                Some(Mark::Done) => return None,
                None => {}
            }
            marks.insert(n, Mark::Active);
            for m in edges.get(n).into_iter().flatten() {
                if let Some(c) = visit(m, edges, marks) {
                    return Some(c);
                }
            }
            marks.insert(n, Mark::Done);
            None
        }
        let mut marks = HashMap::new();
        self.rules.iter().find_map(|r| visit(&r.lhs, &edges, &mut marks).map(str::to_string))
    }

    /// The first parse tree of `tokens` in rule order.
    pub fn parse(&self, tokens: &[String]) -> Option<Cst> {
        let mut result = None;
        self.parse_nt(self.start(), tokens, 0, &mut |c, end| {
            if end == tokens.len() {
                result = Some(c);
                true
            } else {
                false
            }
        });
        result
    }

    pub fn accepts(&self, tokens: &[String]) -> bool {
        self.parse(tokens).is_some()
    }

    fn parse_nt(&self, nt: &str, toks: &[String], pos: usize, k: &mut dyn FnMut(Cst, usize) -> bool) -> bool {
        for r in self.rules.iter().filter(|r| r.lhs == nt) {
            let mut acc = Vec::with_capacity(r.rhs.len());
            if self.parse_seq(r, 0, toks, pos, &mut acc, k) {
                return true;
            }
        }
        false
    }

    fn parse_seq(
        &self,
        r: &Rule,
        i: usize,
        toks: &[String],
        pos: usize,
        acc: &mut Vec<Cst>,
        k: &mut dyn FnMut(Cst, usize) -> bool,
    ) -> bool {
        let Some(sym) = r.rhs.get(i) else {
            let node = Cst::Node { label: r.label.clone(), lhs: r.lhs.clone(), children: acc.clone() };
            return k(node, pos);
        };
        match sym {
            GSym::Terminal(t) => {
                if toks.get(pos) != Some(t) {
                    return false;
                }
                acc.push(Cst::Leaf(t.clone()));
                let done = self.parse_seq(r, i + 1, toks, pos + 1, acc, k);
                acc.pop();
                done
            }
            GSym::Nonterminal(n) => self.parse_nt(n, toks, pos, &mut |c, end| {
                acc.push(c);
                let done = self.parse_seq(r, i + 1, toks, end, acc, k);
                acc.pop();
                done
            }),
        }
    }

    /// Reads the term form `[rule(Label, Lhs, [t('x') | n(name), ...]), ...]`.
    pub fn from_term(t: &Term) -> Result<Self, LangkitError> {
        let bad = |what: &Term| LangkitError::Grammar(format!("malformed rule {what}"));
        let items = t.as_list().ok_or_else(|| LangkitError::Grammar(format!("expected a list of rules, found {t}")))?;
        let mut rules = Vec::with_capacity(items.len());
        for it in items {
            let [label, lhs, rhs] = it.args() else { return Err(bad(it)) };
            if !it.is_callable("rule", 3) {
                return Err(bad(it));
            }
            let (Some(label), Some(lhs), Some(rhs)) = (label.as_atom(), lhs.as_atom(), rhs.as_list()) else {
                return Err(bad(it));
            };
            let rhs = rhs
                .iter()
                .map(|s| match (s.functor(), s.args()) {
                    (Some("t"), [Term::Atom(x)]) => Ok(GSym::Terminal(x.clone())),
                    (Some("n"), [Term::Atom(x)]) => Ok(GSym::Nonterminal(x.clone())),
                    _ => Err(bad(it)),
                })
                .collect::<Result<_, _>>()?;
            rules.push(Rule { label: label.into(), lhs: lhs.into(), rhs });
        }
        Grammar::new(rules)
    }

    pub fn to_term(&self) -> Term {
        Term::list(
            self.rules
                .iter()
                .map(|r| {
                    let rhs = r
                        .rhs
                        .iter()
                        .map(|s| match s {
                            GSym::Terminal(x) => Term::compound("t", vec![Term::atom(x.clone())]),
                            GSym::Nonterminal(x) => Term::compound("n", vec![Term::atom(x.clone())]),
                        })
                        .collect();
                    Term::compound("rule", vec![Term::atom(r.label.clone()), Term::atom(r.lhs.clone()), Term::list(rhs)])
                })
                .collect(),
        )
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads grammar text of the form `[label] lhs : sym ... ;` where a symbol
/// is a nonterminal name or a quoted terminal.
pub fn read_bgl(text: &str) -> Result<Grammar, LangkitError> {
    let mut rules = Vec::new();
    let mut rest = text.trim_start();
    let syntax = |line: usize, msg: &str| LangkitError::Syntax { line, message: msg.to_string() };
    while !rest.is_empty() {
        let line = text[..text.len() - rest.len()].matches('\n').count() + 1;
        let end = rest.find(';').ok_or_else(|| syntax(line, "rule without ';'"))?;
        let rule = &rest[..end];
        rest = rest[end + 1..].trim_start();

        let rule = rule.trim().strip_prefix('[').ok_or_else(|| syntax(line, "expected '['"))?;
        let close = rule.find(']').ok_or_else(|| syntax(line, "expected ']'"))?;
        let label = rule[..close].trim();
        let body = &rule[close + 1..];
        let colon = body.find(':').ok_or_else(|| syntax(line, "expected ':'"))?;
        let lhs = body[..colon].trim();
        if !is_ident(label) || !is_ident(lhs) {
            return Err(syntax(line, "expected identifiers for label and left-hand side"));
        }
        let mut rhs = Vec::new();
        let mut syms = body[colon + 1..].trim();
        while !syms.is_empty() {
            if let Some(q) = syms.strip_prefix('\'') {
                let close = q.find('\'').ok_or_else(|| syntax(line, "unterminated terminal"))?;
                rhs.push(GSym::Terminal(q[..close].to_string()));
                syms = q[close + 1..].trim_start();
            } else {
                let w = syms.split_whitespace().next().unwrap_or("");
                if !is_ident(w) {
                    return Err(syntax(line, &format!("unexpected symbol {w}")));
                }
                rhs.push(GSym::Nonterminal(w.to_string()));
                syms = syms[w.len()..].trim_start();
            }
        }
        rules.push(Rule { label: label.to_string(), lhs: lhs.to_string(), rhs });
    }
    Grammar::new(rules)
}
