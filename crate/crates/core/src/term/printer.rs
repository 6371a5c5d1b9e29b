use super::{infix_op, prefix_op, Fixity, Term, ARG_PRECEDENCE, MAX_PRECEDENCE};

/// Canonical text of a term, without the clause terminator.
///
/// Atoms are quoted only when they are not plain `[a-z][A-Za-z0-9_]*` names,
/// binary `+ - ^` and unary `-` print as operators, and parentheses appear
/// only where precedence demands them.
pub fn write_term(t: &Term) -> String {
    let mut out = String::new();
    write(t, MAX_PRECEDENCE, &mut out);
    out
}

fn operator_precedence(t: &Term) -> u16 {
    match t {
        Term::Compound(f, args) if args.len() == 2 => infix_op(f).map_or(0, |op| op.precedence),
        Term::Compound(f, args) if args.len() == 1 => prefix_op(f).map_or(0, |op| op.precedence),
        _ => 0,
    }
}

fn write(t: &Term, max: u16, out: &mut String) {
    let prec = operator_precedence(t);
    if prec > max {
        out.push('(');
        write(t, MAX_PRECEDENCE, out);
        out.push(')');
        return;
    }
    match t {
        Term::Atom(name) => write_atom(name, out),
        Term::Int(v) => out.push_str(&v.to_string()),
        Term::Float(v) => out.push_str(&format_float(*v)),
        Term::List(items) => {
            out.push('[');
            write_args(items, out);
            out.push(']');
        }
        Term::Compound(f, args) if prec > 0 && args.len() == 2 => {
            let op = infix_op(f).expect("infix precedence implies table entry");
            let (left_max, right_max) = match op.fixity {
                Fixity::InfixLeft => (op.precedence, op.precedence - 1),
                _ => (op.precedence - 1, op.precedence),
            };
            write(&args[0], left_max, out);
            out.push_str(f);
            write(&args[1], right_max, out);
        }
        Term::Compound(f, args) if prec > 0 => {
            out.push_str(f);
            let mut arg = String::new();
            write(&args[0], prec, &mut arg);
            // `-1` would read back as a literal and `-(` as functor notation.
            if arg.starts_with(|c: char| c.is_ascii_digit() || c == '(') {
                out.push(' ');
            }
            out.push_str(&arg);
        }
        Term::Compound(f, args) => {
            write_atom(f, out);
            out.push('(');
            write_args(args, out);
            out.push(')');
        }
    }
}

fn write_args(items: &[Term], out: &mut String) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write(item, ARG_PRECEDENCE, out);
    }
}

pub(crate) fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_atom(name: &str, out: &mut String) {
    if is_plain_atom(name) {
        out.push_str(name);
    } else {
        out.push('\'');
        out.push_str(&name.replace('\'', "''"));
        out.push('\'');
    }
}

fn format_float(v: f64) -> String {
    let s = v.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}
