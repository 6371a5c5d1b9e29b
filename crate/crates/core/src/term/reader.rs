use std::path::Path;

use super::{infix_op, prefix_op, Fixity, Term, TermError, ARG_PRECEDENCE, MAX_PRECEDENCE};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Symbol(char),
    Int(String),
    Float(String),
    Open,
    Close,
    OpenList,
    CloseList,
    Comma,
    End,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("atom `{n}`"),
            Tok::Quoted(n) => format!("quoted atom '{n}'"),
            Tok::Symbol(c) => format!("operator `{c}`"),
            Tok::Int(s) | Tok::Float(s) => format!("number `{s}`"),
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::OpenList => "`[`".into(),
            Tok::CloseList => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of clause `.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
    line: usize,
    column: usize,
}

fn lex(input: &str) -> Result<Vec<Token>, TermError> {
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let byte_at = |i: usize| chars.get(i).map_or(input.len(), |&(b, _)| b);

    while i < chars.len() {
        let (start, c) = chars[i];
        let column = i - line_start + 1;
        let mut push = |tok: Tok, end: usize| {
            tokens.push(Token { tok, start, end, line, column });
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                line_start = i;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                while i < chars.len() && chars[i].1 != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | '[' | ']' | ',' => {
                let tok = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '[' => Tok::OpenList,
                    ']' => Tok::CloseList,
                    _ => Tok::Comma,
                };
                i += 1;
                push(tok, byte_at(i));
            }
            '+' | '-' | '^' => {
                i += 1;
                push(Tok::Symbol(c), byte_at(i));
            }
            '.' => {
                let next = chars.get(i + 1).map(|&(_, c)| c);
                match next {
                    None => {}
                    Some(n) if n.is_whitespace() || n == '%' => {}
                    Some(n) => {
                        return Err(TermError::Syntax {
                            line,
                            column,
                            expected: "whitespace after `.`".into(),
                            found: format!("`{n}`"),
                        })
                    }
                }
                i += 1;
                push(Tok::End, byte_at(i));
            }
            '\'' => {
                let mut name = String::new();
                let (qline, qcol) = (line, column);
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(TermError::Syntax {
                                line: qline,
                                column: qcol,
                                expected: "closing quote".into(),
                                found: "end of input".into(),
                            })
                        }
                        Some(&(_, '\'')) => {
                            if chars.get(i + 1).map(|&(_, c)| c) == Some('\'') {
                                name.push('\'');
                                i += 2;
                            } else {
                                i += 1;
                                break;
                            }
                        }
                        Some(&(_, ch)) => {
                            if ch == '\n' {
                                line += 1;
                                line_start = i + 1;
                            }
                            name.push(ch);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token { tok: Tok::Quoted(name), start, end: byte_at(i), line: qline, column: qcol });
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let is_float = chars.get(j).map(|&(_, c)| c) == Some('.')
                    && chars.get(j + 1).is_some_and(|&(_, c)| c.is_ascii_digit());
                if is_float {
                    j += 1;
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        j += 1;
                    }
                }
                let text = input[start..byte_at(j)].to_string();
                i = j;
                push(if is_float { Tok::Float(text) } else { Tok::Int(text) }, byte_at(i));
            }
            c if c.is_ascii_lowercase() => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let text = input[start..byte_at(j)].to_string();
                i = j;
                push(Tok::Name(text), byte_at(i));
            }
            other => {
                return Err(TermError::Syntax {
                    line,
                    column,
                    expected: "a term".into(),
                    found: if other.is_ascii_uppercase() || other == '_' {
                        format!("`{other}` (variables are not supported)")
                    } else {
                        format!("`{other}`")
                    },
                })
            }
        }
    }
    let end = input.len();
    tokens.push(Token { tok: Tok::Eof, start: end, end, line, column: chars.len() - line_start + 1 });
    Ok(tokens)
}

/// A term together with the line on which it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannedTerm {
    pub term: Term,
    pub line: usize,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self, TermError> {
        Ok(Parser { tokens: lex(input)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> TermError {
        let t = self.peek();
        TermError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.into(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), TermError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    /// `true` if the token after the current one starts immediately after it.
    fn next_is_adjacent(&self, tok: &Tok) -> bool {
        let here = self.peek();
        let there = self.peek_at(1);
        there.tok == *tok && there.start == here.end
    }

    fn next_adjacent_number(&self) -> bool {
        let here = self.peek();
        let there = self.peek_at(1);
        matches!(there.tok, Tok::Int(_) | Tok::Float(_)) && there.start == here.end
    }

    fn expr(&mut self, max: u16) -> Result<(Term, u16), TermError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let Tok::Symbol(c) = self.peek().tok else { break };
            let Some(op) = infix_op(&c.to_string()) else { break };
            let (left_max, right_max) = match op.fixity {
                Fixity::InfixLeft => (op.precedence, op.precedence - 1),
                Fixity::InfixRight => (op.precedence - 1, op.precedence),
                Fixity::Prefix => unreachable!(),
            };
            if op.precedence > max || left_prec > left_max {
                break;
            }
            self.next();
            let (right, _) = self.expr(right_max)?;
            left = Term::op(op.symbol, left, right);
            left_prec = op.precedence;
        }
        Ok((left, left_prec))
    }

    fn primary(&mut self, max: u16) -> Result<(Term, u16), TermError> {
        let token = self.peek().clone();
        match token.tok {
            Tok::Int(_) | Tok::Float(_) => {
                self.next();
                Ok((number(&token, false)?, 0))
            }
            Tok::Open => {
                self.next();
                let (t, _) = self.expr(MAX_PRECEDENCE)?;
                self.expect(Tok::Close, "`)`")?;
                Ok((t, 0))
            }
            Tok::OpenList => {
                self.next();
                let items = self.list_items()?;
                Ok((Term::List(items), 0))
            }
            Tok::Name(ref name) | Tok::Quoted(ref name) => {
                let name = name.clone();
                if self.next_is_adjacent(&Tok::Open) {
                    self.next();
                    self.next();
                    let args = self.args()?;
                    Ok((Term::Compound(name, args), 0))
                } else {
                    self.next();
                    Ok((Term::Atom(name), 0))
                }
            }
            Tok::Symbol(c) => {
                if self.next_is_adjacent(&Tok::Open) {
                    self.next();
                    self.next();
                    let args = self.args()?;
                    return Ok((Term::Compound(c.to_string(), args), 0));
                }
                if c == '-' && self.next_adjacent_number() {
                    self.next();
                    let digits = self.next();
                    return Ok((number(&digits, true)?, 0));
                }
                let standalone = matches!(
                    self.peek_at(1).tok,
                    Tok::Comma | Tok::Close | Tok::CloseList | Tok::End | Tok::Eof
                );
                if standalone {
                    self.next();
                    return Ok((Term::Atom(c.to_string()), 0));
                }
                match prefix_op(&c.to_string()) {
                    Some(op) if op.precedence <= max => {
                        self.next();
                        let (arg, _) = self.expr(op.precedence)?;
                        Ok((Term::neg(arg), op.precedence))
                    }
                    _ => Err(self.error("a term")),
                }
            }
            _ => Err(self.error("a term")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, TermError> {
        let mut args = vec![self.expr(ARG_PRECEDENCE)?.0];
        while self.peek().tok == Tok::Comma {
            self.next();
            args.push(self.expr(ARG_PRECEDENCE)?.0);
        }
        self.expect(Tok::Close, "`,` or `)`")?;
        Ok(args)
    }

    /// Items after an opening `[`, consuming the closing `]`.
    fn list_items(&mut self) -> Result<Vec<Term>, TermError> {
        Ok(self.spanned_list_items()?.into_iter().map(|s| s.term).collect())
    }

    fn spanned_list_items(&mut self) -> Result<Vec<SpannedTerm>, TermError> {
        let mut items = Vec::new();
        if self.peek().tok == Tok::CloseList {
            self.next();
            return Ok(items);
        }
        loop {
            let line = self.peek().line;
            items.push(SpannedTerm { term: self.expr(ARG_PRECEDENCE)?.0, line });
            match self.peek().tok {
                Tok::Comma => {
                    self.next();
                }
                Tok::CloseList => {
                    self.next();
                    return Ok(items);
                }
                _ => return Err(self.error("`,` or `]`")),
            }
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }
}

fn number(token: &Token, negative: bool) -> Result<Term, TermError> {
    let overflow = || TermError::Syntax {
        line: token.line,
        column: token.column,
        expected: "a 64-bit integer".into(),
        found: token.tok.describe(),
    };
    match &token.tok {
        Tok::Int(digits) => {
            let text = if negative { format!("-{digits}") } else { digits.clone() };
            text.parse::<i64>().map(Term::Int).map_err(|_| overflow())
        }
        Tok::Float(digits) => {
            let value: f64 = digits.parse().map_err(|_| overflow())?;
            Ok(Term::Float(if negative { -value } else { value }))
        }
        _ => unreachable!("number() called on non-number token"),
    }
}

/// Reads a single term, optionally followed by a terminating `.`.
pub fn read_term(input: &str) -> Result<Term, TermError> {
    let mut p = Parser::new(input)?;
    let (t, _) = p.expr(MAX_PRECEDENCE)?;
    if p.peek().tok == Tok::End {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

/// Reads the contents of a term file: either a single period-terminated list
/// (whose items are returned) or a sequence of period-terminated terms.
pub fn read_terms(input: &str) -> Result<Vec<SpannedTerm>, TermError> {
    if let Some(items) = try_list_form(input)? {
        return Ok(items);
    }
    let mut p = Parser::new(input)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        let line = p.peek().line;
        let (term, _) = p.expr(MAX_PRECEDENCE)?;
        p.expect(Tok::End, "`.` after term")?;
        out.push(SpannedTerm { term, line });
    }
    Ok(out)
}

fn try_list_form(input: &str) -> Result<Option<Vec<SpannedTerm>>, TermError> {
    let mut p = Parser::new(input)?;
    if p.peek().tok != Tok::OpenList {
        return Ok(None);
    }
    p.next();
    let Ok(items) = p.spanned_list_items() else { return Ok(None) };
    if p.peek().tok != Tok::End {
        return Ok(None);
    }
    p.next();
    Ok(p.at_eof().then_some(items))
}

/// Reads and parses a term file from disk.
pub fn read_term_file(path: &Path) -> Result<Vec<SpannedTerm>, TermError> {
    let text = std::fs::read_to_string(path).map_err(|e| TermError::io(path, e))?;
    read_terms(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Term {
        Term::atom(s)
    }
    fn c(f: &str, args: Vec<Term>) -> Term {
        Term::compound(f, args)
    }
    fn i(v: i64) -> Term {
        Term::Int(v)
    }

    #[test]
    fn value_artifact() {
        assert_eq!(read_term("5.25.").unwrap(), Term::Float(5.25));
        assert_eq!(read_term("5.").unwrap(), i(5));
    }

    #[test]
    fn term_artifact() {
        let src = "number(\n  many(one, many(zero, single(one))),\n  rational(many(zero, single(one)))\n).\n";
        let expected = c(
            "number",
            vec![
                c("many", vec![a("one"), c("many", vec![a("zero"), c("single", vec![a("one")])])]),
                c("rational", vec![c("many", vec![a("zero"), c("single", vec![a("one")])])]),
            ],
        );
        assert_eq!(read_term(src).unwrap(), expected);
    }

    #[test]
    fn tokens_artifact() {
        let t = read_term("['1', '0', '1', '.', '0', '1'].").unwrap();
        let expected: Vec<Term> = ["1", "0", "1", ".", "0", "1"].iter().map(|s| a(s)).collect();
        assert_eq!(t, Term::List(expected));
    }

    // Hand trace with `+`/`-` left-assoc at 500, `^` right-assoc at 200,
    // prefix `-` on a literal folded into the number.
    #[test]
    fn formula_artifact_shape() {
        let src = "2^ (1+1+1-1)+ (0+2^ (1+1+1-1-1-1))+ (0+2^ (-1-1)).";
        let plus = |l, r| Term::op("+", l, r);
        let minus = |l, r| Term::op("-", l, r);
        let pow = |l, r| Term::op("^", l, r);
        let three = plus(plus(i(1), i(1)), i(1));
        let e1 = minus(three.clone(), i(1));
        let e2 = minus(minus(minus(three, i(1)), i(1)), i(1));
        let e3 = minus(i(-1), i(1));
        let expected = plus(
            plus(pow(i(2), e1), plus(i(0), pow(i(2), e2))),
            plus(i(0), pow(i(2), e3)),
        );
        assert_eq!(read_term(src).unwrap(), expected);
    }

    #[test]
    fn prefix_minus_with_space_is_operator() {
        assert_eq!(read_term("- 1").unwrap(), Term::neg(i(1)));
        assert_eq!(read_term("-1").unwrap(), i(-1));
        assert_eq!(read_term("-a^2").unwrap(), Term::neg(Term::op("^", a("a"), i(2))));
        assert_eq!(read_term("-1^2").unwrap(), Term::op("^", i(-1), i(2)));
        assert_eq!(read_term("1-1").unwrap(), Term::op("-", i(1), i(1)));
    }

    #[test]
    fn power_is_right_associative() {
        let t = read_term("2^3^4").unwrap();
        assert_eq!(t, Term::op("^", i(2), Term::op("^", i(3), i(4))));
    }

    #[test]
    fn operator_functor_notation() {
        assert_eq!(read_term("+(a,b)").unwrap(), Term::op("+", a("a"), a("b")));
        assert_eq!(read_term("'+'(a,b,c)").unwrap(), c("+", vec![a("a"), a("b"), a("c")]));
        assert_eq!(read_term("[-, +]").unwrap(), Term::List(vec![a("-"), a("+")]));
    }

    #[test]
    fn quote_escape() {
        assert_eq!(read_term("'it''s'").unwrap(), a("it's"));
    }

    #[test]
    fn comments_are_skipped() {
        let ts = read_terms("% header\na. % trailing\nb(c).\n").unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].line, 3);
    }

    #[test]
    fn file_forms_agree() {
        let list = read_terms("[a, b(c)].").unwrap();
        let seq = read_terms("a. b(c).").unwrap();
        let terms = |v: Vec<SpannedTerm>| v.into_iter().map(|s| s.term).collect::<Vec<_>>();
        let expected = vec![a("a"), c("b", vec![a("c")])];
        assert_eq!(terms(list), expected);
        assert_eq!(terms(seq), expected);
    }

    #[test]
    fn list_followed_by_more_clauses_is_sequence() {
        let ts = read_terms("[a]. b.").unwrap();
        assert_eq!(ts[0].term, Term::List(vec![a("a")]));
        assert_eq!(ts[1].term, a("b"));
    }

    #[test]
    fn empty_file() {
        assert!(read_terms("").unwrap().is_empty());
        assert!(read_terms("  % nothing\n").unwrap().is_empty());
    }

    #[test]
    fn list_form_lines() {
        let ts = read_terms("[\n  a,\n  b\n].").unwrap();
        assert_eq!(ts.iter().map(|s| s.line).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match read_term("f(a,").unwrap_err() {
            TermError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 5)),
            other => panic!("{other:?}"),
        }
        assert!(read_term("f (a)").is_err());
        assert!(read_term("X").is_err());
        assert!(read_term("a.b").is_err());
        assert!(read_term("'open").is_err());
        assert!(read_terms("a").is_err());
        assert!(read_term("99999999999999999999").is_err());
    }

    #[test]
    fn dot_atom_versus_terminator() {
        assert_eq!(read_term("'.'.").unwrap(), a("."));
        assert_eq!(read_term("f('.')").unwrap(), c("f", vec![a(".")]));
    }
}
