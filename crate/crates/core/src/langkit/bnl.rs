//! Binary numbers: scanning, direct evaluation, symbolic conversion and a
//! JSON form.

use serde_json::{json, Value};

use super::LangkitError;
use crate::term::Term;

/// One token per `0`, `1` or `.`; blanks are skipped.
pub fn scan(text: &str) -> Result<Vec<String>, LangkitError> {
    let mut out = Vec::new();
    for (i, c) in text.chars().enumerate() {
        match c {
            '0' | '1' | '.' => out.push(c.to_string()),
            ' ' | '\t' | '\r' | '\n' => {}
            _ => return Err(LangkitError::Rejected(format!("unexpected character {c:?} at offset {i}"))),
        }
    }
    Ok(out)
}

pub fn tokens_term(tokens: &[String]) -> Term {
    Term::list(tokens.iter().map(|t| Term::atom(t.clone())).collect())
}

pub fn tokens_from_term(t: &Term) -> Result<Vec<String>, LangkitError> {
    let items = t.as_list().ok_or_else(|| LangkitError::Rejected(format!("expected a token list, found {t}")))?;
    items
        .iter()
        .map(|i| i.as_atom().map(str::to_string).ok_or_else(|| LangkitError::Rejected(format!("bad token {i}"))))
        .collect()
}

/// Integer and optional fraction bits of a token list.
pub type Bits = (Vec<bool>, Option<Vec<bool>>);

pub fn split_bits(tokens: &[String]) -> Result<Bits, LangkitError> {
    let reject = |why: &str| LangkitError::Rejected(why.to_string());
    let bit = |t: &String| match t.as_str() {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(reject("unexpected token")),
    };
    let (int, frac) = match tokens.iter().position(|t| t == ".") {
        Some(p) => (&tokens[..p], Some(&tokens[p + 1..])),
        None => (tokens, None),
    };
    if int.is_empty() {
        return Err(reject("no integer bits"));
    }
    let int = int.iter().map(bit).collect::<Result<Vec<_>, _>>()?;
    let frac = match frac {
        Some([]) => return Err(reject("no fraction bits")),
        Some(f) => Some(f.iter().map(bit).collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    Ok((int, frac))
}

fn weigh((int, frac): &Bits) -> f64 {
    let whole = int.iter().fold(0.0, |acc, &b| acc * 2.0 + f64::from(u8::from(b)));
    let part = frac.iter().flatten().enumerate().filter(|(_, &b)| b).map(|(j, _)| 2f64.powi(-(j as i32 + 1))).sum::<f64>();
    whole + part
}

/// Positional value of a binary number given as tokens.
pub fn evaluate_tokens(tokens: &[String]) -> Result<f64, LangkitError> {
    Ok(weigh(&split_bits(tokens)?))
}

pub fn evaluate_text(text: &str) -> Result<f64, LangkitError> {
    evaluate_tokens(&scan(text)?)
}

fn bits_of_term(t: &Term, out: &mut Vec<bool>) -> Result<(), LangkitError> {
    let bit = |b: &Term| match b.as_atom() {
        Some("zero") => Ok(false),
        Some("one") => Ok(true),
        _ => Err(LangkitError::Rejected(format!("bad bit {b}"))),
    };
    match (t.functor(), t.args()) {
        (Some("single"), [b]) => out.push(bit(b)?),
        (Some("many"), [b, rest]) => {
            out.push(bit(b)?);
            bits_of_term(rest, out)?;
        }
        _ => return Err(LangkitError::Rejected(format!("bad bits {t}"))),
    }
    Ok(())
}

/// Bits of an abstract syntax term `number(Bits, Rest)`.
pub fn bits_of_ast(t: &Term) -> Result<Bits, LangkitError> {
    let bad = || LangkitError::Rejected(format!("not a number term: {t}"));
    let [bits, rest] = t.args() else { return Err(bad()) };
    if !t.is_callable("number", 2) {
        return Err(bad());
    }
    let mut int = Vec::new();
    bits_of_term(bits, &mut int)?;
    let frac = match (rest.functor(), rest.args()) {
        (Some("integer"), []) => None,
        (Some("rational"), [b]) => {
            let mut f = Vec::new();
            bits_of_term(b, &mut f)?;
            Some(f)
        }
        _ => return Err(bad()),
    };
    Ok((int, frac))
}

pub fn evaluate_ast(t: &Term) -> Result<f64, LangkitError> {
    Ok(weigh(&bits_of_ast(t)?))
}

/// A value as a term: an integer when integral, a float otherwise.
pub fn value_term(v: f64) -> Term {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Term::Int(v as i64)
    } else {
        Term::Float(v)
    }
}

fn one() -> Term {
    Term::Int(1)
}

fn bit_formula(pos: &Term, b: bool) -> Term {
    if b {
        Term::op("^", Term::Int(2), pos.clone())
    } else {
        Term::Int(0)
    }
}

fn bits_formula(bits: &[bool], pos: Term) -> Term {
    let head = bit_formula(&pos, bits[0]);
    if bits.len() == 1 {
        head
    } else {
        Term::op("+", head, bits_formula(&bits[1..], Term::op("-", pos, one())))
    }
}

/// The symbolic conversion formula of an attribute grammar for binary
/// numbers, keeping lengths as sums of ones and positions as differences.
pub fn convert(tokens: &[String]) -> Result<Term, LangkitError> {
    let (int, frac) = split_bits(tokens)?;
    let len = (1..int.len()).fold(one(), |acc, _| Term::op("+", acc, one()));
    let whole = bits_formula(&int, Term::op("-", len, one()));
    let part = match frac {
        None => Term::Int(0),
        Some(f) => bits_formula(&f, Term::Int(-1)),
    };
    Ok(Term::op("+", whole, part))
}

fn bit_names(bits: &[bool]) -> Value {
    Value::Array(bits.iter().map(|&b| Value::from(if b { "one" } else { "zero" })).collect())
}

/// `{"bits": [...], "rest": [...]}` with bit names; `rest` is empty for
/// integers.
pub fn ast_to_json(t: &Term) -> Result<Value, LangkitError> {
    let (int, frac) = bits_of_ast(t)?;
    Ok(json!({ "bits": bit_names(&int), "rest": bit_names(frac.as_deref().unwrap_or(&[])) }))
}

/// Renders in the layout used for checked-in samples: one line per key.
pub fn render_json(v: &Value) -> String {
    match v.as_object() {
        Some(obj) if !obj.is_empty() => {
            let lines: Vec<String> = obj.iter().map(|(k, v)| format!("  {}: {}", Value::from(k.as_str()), compact(v))).collect();
            format!("{{\n{}\n}}\n", lines.join(",\n"))
        }
        _ => format!("{}\n", compact(v)),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(compact).collect::<Vec<_>>().join(", ")),
        Value::Object(obj) => {
            let fields: Vec<String> = obj.iter().map(|(k, v)| format!("{}: {}", Value::from(k.as_str()), compact(v))).collect();
            format!("{{{}}}", fields.join(", "))
        }
        other => other.to_string(),
    }
}

/// `true` if `v` has exactly the keys `bits` (non-empty) and `rest`, both
/// arrays of bit names.
pub fn json_ok(v: &Value) -> bool {
    let names = |x: &Value| x.as_array().is_some_and(|a| a.iter().all(|n| n == "one" || n == "zero"));
    v.as_object().is_some_and(|o| {
        o.len() == 2
            && o.get("bits").is_some_and(|b| names(b) && !b.as_array().unwrap().is_empty())
            && o.get("rest").is_some_and(names)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{read_term, write_term};

    fn toks(s: &str) -> Vec<String> {
        s.chars().map(String::from).collect()
    }

    #[test]
    fn scanning() {
        assert_eq!(scan("101.01\n").unwrap(), ["1", "0", "1", ".", "0", "1"]);
        assert!(scan("").unwrap().is_empty());
        assert!(scan("10x1").is_err());
        assert_eq!(write_term(&tokens_term(&scan("1.0").unwrap())), "['1','.','0']");
        assert_eq!(tokens_from_term(&read_term("['1','0']").unwrap()).unwrap(), ["1", "0"]);
    }

    #[test]
    fn paper_formula() {
        let f = convert(&toks("101.01")).unwrap();
        let expected = read_term("2^ (1+1+1-1)+ (0+2^ (1+1+1-1-1-1))+ (0+2^ (-1-1)).").unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn small_formulas() {
        assert_eq!(convert(&toks("1")).unwrap(), read_term("2^(1-1)+0").unwrap());
        assert_eq!(convert(&toks("0")).unwrap(), read_term("0+0").unwrap());
        assert_eq!(write_term(&convert(&toks("10")).unwrap()), "2^(1+1-1)+0+0");
        assert!(convert(&toks(".1")).is_err());
        assert!(convert(&toks("1.")).is_err());
        assert!(convert(&[]).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(evaluate_text("101.01").unwrap(), 5.25);
        assert_eq!(evaluate_text("0").unwrap(), 0.0);
        assert_eq!(evaluate_text("0.1").unwrap(), 0.5);
        assert!(evaluate_text("1..1").is_err());
        let t = read_term("number(many(one,many(zero,single(one))),rational(many(zero,single(one))))").unwrap();
        assert_eq!(evaluate_ast(&t).unwrap(), 5.25);
        assert!(evaluate_ast(&read_term("number(one)").unwrap()).is_err());
        assert_eq!(value_term(5.25), Term::Float(5.25));
        assert_eq!(value_term(5.0), Term::Int(5));
    }

    #[test]
    fn json_form() {
        let t = read_term("number(many(one,many(zero,single(one))),rational(many(zero,single(one))))").unwrap();
        let j = ast_to_json(&t).unwrap();
        assert_eq!(render_json(&j), "{\n  \"bits\": [\"one\", \"zero\", \"one\"],\n  \"rest\": [\"zero\", \"one\"]\n}\n");
        assert!(json_ok(&j));
        assert!(json_ok(&ast_to_json(&read_term("number(single(zero),integer)").unwrap()).unwrap()));
        assert!(!json_ok(&json!({"bits": [], "rest": []})));
        assert!(!json_ok(&json!({"bits": ["two"], "rest": []})));
        assert!(!json_ok(&json!([1])));
    }

    proptest::proptest! {
        #[test]
        fn symbolic_and_direct_evaluation_agree(int in "[01]{1,12}", frac in proptest::option::of("[01]{1,12}")) {
            let text = match &frac {
                Some(f) => format!("{int}.{f}"),
                None => int.clone(),
            };
            let toks = scan(&text).unwrap();
            let direct = evaluate_tokens(&toks).unwrap();
            let symbolic = crate::langkit::formula::solve(&convert(&toks).unwrap()).unwrap();
            proptest::prop_assert!((direct - symbolic).abs() <= 1e-9);
            let ast = read_term(&format!("number({},{})", bits_term(&int), frac.as_deref().map_or("integer".to_string(), |f| format!("rational({})", bits_term(f))))).unwrap();
            proptest::prop_assert_eq!(evaluate_ast(&ast).unwrap(), direct);
        }
    }

    fn bits_term(bits: &str) -> String {
        let name = |c: char| if c == '1' { "one" } else { "zero" };
        let chars: Vec<char> = bits.chars().collect();
        let mut t = format!("single({})", name(chars[chars.len() - 1]));
        for &c in chars[..chars.len() - 1].iter().rev() {
            t = format!("many({},{t})", name(c));
        }
        t
    }
}
