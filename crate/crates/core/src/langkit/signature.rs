//! Algebraic signatures and term conformance.

use std::collections::HashSet;

use super::grammar::{GSym, Grammar};
use super::LangkitError;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, LangkitError> {
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert((s.name.as_str(), s.args.len())) {
                return Err(LangkitError::Signature(format!("duplicate symbol {}/{}", s.name, s.args.len())));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Derives the abstract syntax of a grammar: one symbol per rule, named
    /// by the label, over the rule's nonterminals.
    pub fn project(g: &Grammar) -> Result<Self, LangkitError> {
        Signature::new(
            g.rules()
                .iter()
                .map(|r| Symbol {
                    name: r.label.clone(),
                    args: r
                        .rhs
                        .iter()
                        .filter_map(|s| match s {
                            GSym::Nonterminal(n) => Some(n.clone()),
                            GSym::Terminal(_) => None,
                        })
                        .collect(),
                    result: r.lhs.clone(),
                })
                .collect(),
        )
    }

    /// `true` if `t` has some result sort of the signature.
    pub fn conforms(&self, t: &Term) -> bool {
        let sorts: HashSet<&str> = self.symbols.iter().map(|s| s.result.as_str()).collect();
        sorts.into_iter().any(|s| self.has_sort(t, s))
    }

    pub fn has_sort(&self, t: &Term, sort: &str) -> bool {
        let Some(f) = t.functor() else { return false };
        let args = t.args();
        self.symbols.iter().any(|s| {
            s.name == f
                && s.result == sort
                && s.args.len() == args.len()
                && s.args.iter().zip(args).all(|(sort, a)| self.has_sort(a, sort))
        })
    }

    /// `[symbol(Name, [Sorts...], Result), ...]`.
    pub fn from_term(t: &Term) -> Result<Self, LangkitError> {
        let items = t
            .as_list()
            .ok_or_else(|| LangkitError::Signature(format!("expected a list of symbols, found {t}")))?;
        let symbols = items
            .iter()
            .map(|it| {
                let bad = || LangkitError::Signature(format!("malformed symbol {it}"));
                if !it.is_callable("symbol", 3) {
                    return Err(bad());
                }
                let [name, args, result] = it.args() else { return Err(bad()) };
                let args = args
                    .as_list()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|a| a.as_atom().map(str::to_string).ok_or_else(bad))
                    .collect::<Result<_, _>>()?;
                Ok(Symbol {
                    name: name.as_atom().ok_or_else(bad)?.to_string(),
                    args,
                    result: result.as_atom().ok_or_else(bad)?.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Signature::new(symbols)
    }

    pub fn to_term(&self) -> Term {
        Term::list(
            self.symbols
                .iter()
                .map(|s| {
                    Term::compound(
                        "symbol",
                        vec![
                            Term::atom(s.name.clone()),
                            Term::list(s.args.iter().map(|a| Term::atom(a.clone())).collect()),
                            Term::atom(s.result.clone()),
                        ],
                    )
                })
                .collect(),
        )
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads signature text of the form `symbol name : s1 × s2 → result ;`.
/// `*` and `->` are accepted for `×` and `→`.
pub fn read_bsl(text: &str) -> Result<Signature, LangkitError> {
    let mut symbols = Vec::new();
    let mut offset = 0;
    for chunk in text.split(';') {
        let lead = chunk.len() - chunk.trim_start().len();
        let line = text[..offset + lead].matches('\n').count() + 1;
        offset += chunk.len() + 1;
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let syntax = |message: &str| LangkitError::Syntax { line, message: message.to_string() };
        let body = chunk.strip_prefix("symbol").ok_or_else(|| syntax("expected 'symbol'"))?;
        let (name, sig) = body.split_once(':').ok_or_else(|| syntax("expected ':'"))?;
        let sig = sig.replace("->", "\u{2192}").replace('*', "\u{d7}");
        let (args, result) = sig.split_once('\u{2192}').ok_or_else(|| syntax("expected '\u{2192}'"))?;
        let name = name.trim();
        let result = result.trim();
        let args: Vec<String> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split('\u{d7}').map(|a| a.trim().to_string()).collect()
        };
        if !is_ident(name) || !is_ident(result) || !args.iter().all(|a| is_ident(a)) {
            return Err(syntax("expected identifiers"));
        }
        symbols.push(Symbol { name: name.to_string(), args, result: result.to_string() });
    }
    if !text.trim_end().is_empty() && !text.trim_end().ends_with(';') {
        return Err(LangkitError::Syntax { line: text.lines().count(), message: "symbol without ';'".into() });
    }
    Signature::new(symbols)
}

#[cfg(test)]
mod tests {
    use super::super::grammar::read_bgl;
    use super::*;
    use crate::term::read_term;

    const BNL_BSL: &str = "symbol number: bits \u{d7} rest \u{2192} number ;
symbol single: bit \u{2192} bits ;
symbol many: bit \u{d7} bits \u{2192} bits ;
symbol zero: \u{2192} bit ;
symbol one: \u{2192} bit ;
symbol integer: \u{2192} rest ;
symbol rational: bits \u{2192} rest ;
";

    #[test]
    fn reads_bnl_signature() {
        let s = read_bsl(BNL_BSL).unwrap();
        assert_eq!(s.symbols().len(), 7);
        assert_eq!(s.symbols()[0], Symbol { name: "number".into(), args: vec!["bits".into(), "rest".into()], result: "number".into() });
        assert!(s.symbols()[3].args.is_empty());
        assert_eq!(Signature::from_term(&s.to_term()).unwrap(), s);
        assert_eq!(read_bsl("symbol f: a * b -> c;").unwrap().symbols()[0].args, ["a", "b"]);
    }

    #[test]
    fn conformance() {
        let s = read_bsl(BNL_BSL).unwrap();
        let t = |x: &str| read_term(x).unwrap();
        assert!(s.conforms(&t("number(many(one,many(zero,single(one))),rational(many(zero,single(one))))")));
        assert!(!s.conforms(&t("number(one)")));
        assert!(s.has_sort(&t("zero"), "bit"));
        assert!(!s.has_sort(&t("zero"), "bits"));
        assert!(!s.conforms(&t("number(single(one),3)")));
        assert!(!s.conforms(&t("[zero]")));
    }

    #[test]
    fn projection_of_grammar_is_signature() {
        let g = read_bgl(
            "[number] number : bits rest ; [single] bits : bit ; [many] bits : bit bits ;
             [zero] bit : '0' ; [one] bit : '1' ; [integer] rest : ; [rational] rest : '.' bits ;",
        )
        .unwrap();
        assert_eq!(Signature::project(&g).unwrap(), read_bsl(BNL_BSL).unwrap());
    }

    #[test]
    fn syntax_errors() {
        assert!(read_bsl("symbol f a \u{2192} b ;").is_err());
        assert!(read_bsl("sym f: \u{2192} b ;").is_err());
        assert!(read_bsl("symbol f: \u{2192} b").is_err());
        assert!(read_bsl("symbol f: \u{2192} b ; symbol f: \u{2192} c ;").is_err());
        match read_bsl("symbol a: \u{2192} b ;\nsymbol f b ;") {
            Err(LangkitError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
