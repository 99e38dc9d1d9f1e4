//! Canonical text rendering. The output reparses to the same tree up to the
//! flattening of directly nested quantifier blocks.

use std::fmt::{self, Write};

use super::ast::{Formula, Term, VarName};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Power,
}

fn write_term(out: &mut String, t: &Term, ctx: Prec) {
    let own = match t {
        Term::Add(..) | Term::Sub(..) => Prec::Sum,
        Term::Mul(..) => Prec::Product,
        Term::Int(n) if n.sign() == num_bigint::Sign::Minus => Prec::Sum,
        _ => Prec::Power,
    };
    let wrap = own < ctx;
    if wrap {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(v.as_str()),
        Term::Const(c) => {
            out.push_str("c:");
            out.push_str(c.as_str());
        }
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Add(a, b) => {
            write_term(out, a, Prec::Sum);
            out.push_str(" + ");
            write_term(out, b, Prec::Product);
        }
        Term::Sub(a, b) => {
            write_term(out, a, Prec::Sum);
            out.push_str(" - ");
            write_term(out, b, Prec::Product);
        }
        Term::Mul(a, b) => {
            write_term(out, a, Prec::Product);
            out.push('*');
            write_term(out, b, Prec::Power);
        }
        Term::Pow(a, e) => {
            // the base of a power must be atomic, so powers of powers get parentheses
            let base_needs_parens = !matches!(a.as_ref(), Term::Var(_) | Term::Const(_))
                && !matches!(a.as_ref(), Term::Int(n) if n.sign() != num_bigint::Sign::Minus);
            if base_needs_parens {
                out.push('(');
                write_term(out, a, Prec::Sum);
                out.push(')');
            } else {
                write_term(out, a, Prec::Power);
            }
            let _ = write!(out, "^{e}");
        }
    }
    if wrap {
        out.push(')');
    }
}

pub fn format_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, Prec::Sum);
    s
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum FPrec {
    Quant,
    Or,
    And,
    Unary,
}

fn write_formula(out: &mut String, f: &Formula, ctx: FPrec) {
    match f {
        Formula::True => out.push('T'),
        Formula::False => out.push('F'),
        Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => {
            let op = match f {
                Formula::Eq(..) => " = ",
                Formula::Ne(..) => " != ",
                _ => " < ",
            };
            write_term(out, a, Prec::Sum);
            out.push_str(op);
            write_term(out, b, Prec::Sum);
        }
        Formula::Not(a) => {
            out.push_str("!(");
            write_formula(out, a, FPrec::Quant);
            out.push(')');
        }
        Formula::And(a, b) => {
            let wrap = ctx > FPrec::And;
            if wrap {
                out.push('(');
            }
            write_formula(out, a, FPrec::And);
            out.push_str(" & ");
            write_formula(out, b, FPrec::Unary);
            if wrap {
                out.push(')');
            }
        }
        Formula::Or(a, b) => {
            let wrap = ctx > FPrec::Or;
            if wrap {
                out.push('(');
            }
            write_formula(out, a, FPrec::Or);
            out.push_str(" | ");
            write_formula(out, b, FPrec::And);
            if wrap {
                out.push(')');
            }
        }
        Formula::Exists(..) => {
            let wrap = ctx > FPrec::Quant;
            if wrap {
                out.push('(');
            }
            let (vars, body) = flatten_block(f);
            out.push('E');
            for v in &vars {
                out.push(' ');
                out.push_str(v.as_str());
            }
            out.push_str(" . ");
            write_formula(out, body, FPrec::Quant);
            if wrap {
                out.push(')');
            }
        }
    }
}

/// Collects directly nested quantifier blocks as long as their variables
/// stay distinct.
fn flatten_block(f: &Formula) -> (Vec<VarName>, &Formula) {
    let mut vars: Vec<VarName> = Vec::new();
    let mut cur = f;
    while let Formula::Exists(vs, body) = cur {
        if vs.iter().any(|v| vars.contains(v)) {
            break;
        }
        vars.extend(vs.iter().cloned());
        cur = body;
    }
    (vars, cur)
}

pub fn format_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, FPrec::Quant);
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse::parse_formula;

    fn roundtrip(s: &str) {
        let f = parse_formula(s, true).unwrap();
        assert_eq!(format_formula(&f), s);
    }

    #[test]
    fn canonical_spellings() {
        roundtrip("E y . x = y^2");
        roundtrip("T");
        roundtrip("F");
        roundtrip("x != 0 | x = 1");
        roundtrip("E z . y - x = z^2 & !(x = y)");
        roundtrip("E y . x1 = (y^2)^2");
        roundtrip("x*z - 1 = 0");
        roundtrip("x - (y - z) = (-3)*x");
        roundtrip("(x = 1 | x = 2) & (E y . y = x)");
        roundtrip("c:t*x = 1");
    }

    #[test]
    fn nested_blocks_print_flattened() {
        let inner = Formula::Exists(
            vec![VarName::new("b")],
            Box::new(Formula::eq(Term::var("a"), Term::var("b"))),
        );
        let f = Formula::Exists(vec![VarName::new("a")], Box::new(inner));
        assert_eq!(format_formula(&f), "E a b . a = b");
    }

    #[test]
    fn shadowing_blocks_stay_nested() {
        let inner = Formula::Exists(
            vec![VarName::new("a")],
            Box::new(Formula::eq(Term::var("a"), Term::int(0))),
        );
        let f = Formula::Exists(vec![VarName::new("a")], Box::new(inner));
        assert_eq!(format_formula(&f), "E a . E a . a = 0");
        assert_eq!(parse_formula(&format_formula(&f), false).unwrap(), f);
    }
}
