use crate::megamodel::Lang;
use crate::term::{read_term, Term, TermError};

/// The content of an artifact, tagged with the language it is read as.
///
/// For term-based languages the content is parsed and `bytes` hold the
/// canonical serialization of `parsed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Content {
    lang: Lang,
    bytes: Vec<u8>,
    parsed: Option<Term>,
}

#[derive(Debug, thiserror::Error)]
pub enum ContentError {
    #[error("not valid UTF-8")]
    Utf8,
    #[error(transparent)]
    Term(#[from] TermError),
}

impl Content {
    /// Interprets raw bytes as content of `lang`.
    pub fn from_bytes(lang: Lang, bytes: Vec<u8>) -> Result<Self, ContentError> {
        if lang.is_term_based() {
            let text = std::str::from_utf8(&bytes).map_err(|_| ContentError::Utf8)?;
            let term = read_term(text)?;
            Ok(Content::from_term(lang, term))
        } else {
            Ok(Content { lang, bytes, parsed: None })
        }
    }

    /// Content of a term-based language. For other languages the printed
    /// term becomes the raw content.
    pub fn from_term(lang: Lang, term: Term) -> Self {
        let bytes = term.to_file_string().into_bytes();
        let parsed = lang.is_term_based().then_some(term);
        Content { lang, bytes, parsed }
    }

    pub fn from_text(lang: Lang, text: impl Into<String>) -> Result<Self, ContentError> {
        Content::from_bytes(lang, text.into().into_bytes())
    }

    pub fn lang(&self) -> &Lang {
        &self.lang
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn term(&self) -> Option<&Term> {
        self.parsed.as_ref()
    }

    pub fn text(&self) -> Result<&str, ContentError> {
        std::str::from_utf8(&self.bytes).map_err(|_| ContentError::Utf8)
    }

    /// Same bytes, read as another language.
    pub fn retag(self, lang: Lang) -> Result<Self, ContentError> {
        if lang.is_term_based() == self.lang.is_term_based() {
            Ok(Content { lang, ..self })
        } else {
            Content::from_bytes(lang, self.bytes)
        }
    }

    /// Structural equality for term-based content, byte equality otherwise.
    pub fn same_as(&self, other: &Content) -> bool {
        match (&self.parsed, &other.parsed) {
            (Some(a), Some(b)) => a == b,
            _ => self.bytes == other.bytes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(s: &str) -> Lang {
        Lang::new(read_term(s).unwrap()).unwrap()
    }

    #[test]
    fn term_content_is_canonical() {
        let c = Content::from_text(lang("bnl(value(term))"), "5.25 )\n").unwrap_err();
        assert!(matches!(c, ContentError::Term(_)));
        let a = Content::from_text(lang("bnl(term)"), "number(\n  single(one),\n  integer\n).\n").unwrap();
        let b = Content::from_text(lang("bnl(term)"), "number(single(one),integer).").unwrap();
        assert_eq!(a.bytes(), b"number(single(one),integer).\n");
        assert!(a.same_as(&b));
    }

    #[test]
    fn text_content_is_raw() {
        let c = Content::from_text(lang("bnl(text)"), "101.01\n").unwrap();
        assert_eq!(c.text().unwrap(), "101.01\n");
        assert!(c.term().is_none());
        assert!(Content::from_bytes(lang("bin"), vec![0xff, 0xfe]).unwrap().text().is_err());
    }
}
