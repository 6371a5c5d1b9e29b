use std::fmt;

use crate::term::Term;

/// A language name: a base atom such as `text`, or an arity-1 functor
/// applied to another language, e.g. `bnl(tree(term))`.
///
/// Each functor application names a subset of its argument language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lang(Term);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed language name `{0}`")]
pub struct MalformedLang(pub Term);

impl Lang {
    pub fn new(term: Term) -> Result<Self, MalformedLang> {
        let mut cur = &term;
        loop {
            match cur {
                Term::Atom(_) => return Ok(Lang(term)),
                Term::Compound(_, args) if args.len() == 1 => cur = &args[0],
                _ => return Err(MalformedLang(term)),
            }
        }
    }

    /// A base representation type.
    pub fn base_type(name: &str) -> Self {
        Lang(Term::atom(name))
    }

    /// `functor(inner)`, a sublanguage of `inner`.
    pub fn wrap(functor: &str, inner: &Lang) -> Self {
        Lang(Term::compound(functor, vec![inner.0.clone()]))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    /// The next language up the subset chain, or `None` for a base atom.
    pub fn parent(&self) -> Option<Lang> {
        match &self.0 {
            Term::Compound(_, args) => Some(Lang(args[0].clone())),
            _ => None,
        }
    }

    /// `[self, parent, ..., base]`, outermost first.
    pub fn towards_base(&self) -> Vec<Lang> {
        let mut chain = vec![self.clone()];
        while let Some(p) = chain.last().unwrap().parent() {
            chain.push(p);
        }
        chain
    }

    /// The base representation type at the end of the chain.
    pub fn base(&self) -> &str {
        let mut cur = &self.0;
        while let Term::Compound(_, args) = cur {
            cur = &args[0];
        }
        cur.as_atom().expect("validated language ends in an atom")
    }

    /// The outermost functor name.
    pub fn head(&self) -> &str {
        self.0.functor().expect("validated language is callable")
    }

    pub fn is_term_based(&self) -> bool {
        self.base() == "term"
    }

    /// `true` if `other` lies on this language's chain (including itself).
    pub fn is_within(&self, other: &Lang) -> bool {
        let mut cur = &self.0;
        loop {
            if cur == &other.0 {
                return true;
            }
            match cur {
                Term::Compound(_, args) => cur = &args[0],
                _ => return false,
            }
        }
    }
}

/// Validating form of [`Lang::towards_base`] over an arbitrary term.
pub fn towards_base(term: &Term) -> Result<Vec<Lang>, MalformedLang> {
    Ok(Lang::new(term.clone())?.towards_base())
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<Term> for Lang {
    type Error = MalformedLang;

    fn try_from(t: Term) -> Result<Self, Self::Error> {
        Lang::new(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::read_term;

    fn lang(s: &str) -> Lang {
        Lang::new(read_term(s).unwrap()).unwrap()
    }

    fn chain(s: &str) -> Vec<String> {
        lang(s).towards_base().iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn chains() {
        assert_eq!(chain("bnl(term)"), ["bnl(term)", "term"]);
        assert_eq!(chain("text"), ["text"]);
        assert_eq!(chain("bnl(tree(term))"), ["bnl(tree(term))", "tree(term)", "term"]);
    }

    #[test]
    fn malformed() {
        for bad in ["f(a,b)", "3", "[text]", "bnl(g(x,y))", "bnl(1)"] {
            assert!(towards_base(&read_term(bad).unwrap()).is_err(), "{bad}");
        }
    }

    #[test]
    fn containment() {
        assert!(lang("bnl(text)").is_within(&lang("text")));
        assert!(lang("bnl(text)").is_within(&lang("bnl(text)")));
        assert!(!lang("text").is_within(&lang("bnl(text)")));
        assert!(!lang("bnl(term)").is_within(&lang("text")));
        assert_eq!(lang("bnl(value(term))").base(), "term");
        assert_eq!(lang("bnl(value(term))").head(), "bnl");
    }
}
