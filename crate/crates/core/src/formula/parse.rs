//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := "E" var+ "." formula | disj
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "!" neg | atom | "(" formula ")" | "T" | "F"
//! atom    := term ("=" | "!=" | "<") term
//! term    := prod (("+" | "-") prod)*
//! prod    := power ("*" power)*
//! power   := factor ("^" nat)?
//! factor  := var | "c:" name | ["-"] integer | "(" term ")"
//! ```

use num_bigint::BigInt;

use super::ast::{ConstSym, Formula, Term, VarName};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(String),
    Int(BigInt),
    Exists,
    True,
    False,
    Eq,
    Ne,
    Lt,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    And,
    Or,
    Bang,
    Dot,
    Comma,
    Slash,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Const(s) => format!("constant `c:{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Exists => "E",
            Tok::True => "T",
            Tok::False => "F",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Bang => "!",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Slash => "/",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let n: BigInt = digits.parse().expect("digits parse as integer");
            push(&mut out, Tok::Int(n));
            continue;
        }
        if c == 'c' && chars.get(i + 1) == Some(&':') {
            let start = i + 2;
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            if j == start {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: "empty constant name after `c:`".into(),
                });
            }
            let name: String = chars[start..j].iter().collect();
            col += j - i;
            i = j;
            push(&mut out, Tok::Const(name));
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "E" => Tok::Exists,
                "T" => Tok::True,
                "F" => Tok::False,
                _ => Tok::Ident(word),
            };
            push(&mut out, tok);
            continue;
        }
        let (tok, len) = match c {
            '!' if chars.get(i + 1) == Some(&'=') => (Tok::Ne, 2),
            '!' => (Tok::Bang, 1),
            '=' => (Tok::Eq, 1),
            '<' => (Tok::Lt, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '^' => (Tok::Caret, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '.' => (Tok::Dot, 1),
            ',' => (Tok::Comma, 1),
            '/' => (Tok::Slash, 1),
            other => {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        push(&mut out, tok);
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    order_enabled: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Syntax {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected `{}`, found {}",
                tok.symbol(),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Exists {
            self.bump();
            let mut vars: Vec<VarName> = Vec::new();
            while let Tok::Ident(name) = self.peek().clone() {
                let v = VarName::new(&name);
                if vars.contains(&v) {
                    return Err(self.error_here(format!(
                        "variable `{name}` bound twice in one quantifier block"
                    )));
                }
                vars.push(v);
                self.bump();
            }
            if vars.is_empty() {
                return Err(self.error_here(format!(
                    "expected a variable after `E`, found {}",
                    self.peek().describe()
                )));
            }
            self.expect(Tok::Dot)?;
            let body = self.formula()?;
            return Ok(Formula::Exists(vars, Box::new(body)));
        }
        self.disj()
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut acc = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut acc = self.neg()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.neg()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn neg(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.neg()?))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                let save = self.pos;
                match self.atom() {
                    Ok(a) => Ok(a),
                    Err(atom_err) => {
                        let atom_pos = self.pos;
                        self.pos = save;
                        self.bump();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen)?;
                            Ok(f)
                        });
                        match inner {
                            Ok(f) => Ok(f),
                            Err(e) => {
                                // report whichever attempt got further
                                if atom_pos > self.pos {
                                    Err(atom_err)
                                } else {
                                    Err(e)
                                }
                            }
                        }
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
        let op = self.bump();
        let rhs_ctor: fn(Term, Term) -> Formula = match op {
            Tok::Eq => Formula::Eq,
            Tok::Ne => Formula::Ne,
            Tok::Lt => {
                if !self.order_enabled {
                    return Err(Error::OrderDisabled { line, column });
                }
                Formula::Lt
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("expected `=`, `!=` or `<`, found {}", other.describe()),
                })
            }
        };
        let rhs = self.term()?;
        Ok(rhs_ctor(lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Term::add(acc, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Term::sub(acc, self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut acc = self.power()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Term::mul(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Term> {
        let base = self.factor()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            match self.bump() {
                Tok::Int(n) => {
                    let e: u32 = u32::try_from(&n)
                        .map_err(|_| self.error_here(format!("exponent {n} is too large")))?;
                    Ok(Term::pow(base, e))
                }
                other => Err(self.error_here(format!(
                    "expected a natural number exponent, found {}",
                    other.describe()
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Term::Var(VarName::new(name)))
            }
            Tok::Const(name) => {
                self.bump();
                Ok(Term::Const(ConstSym::new(name)))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Int(n))
            }
            Tok::Minus => {
                self.bump();
                match self.bump() {
                    Tok::Int(n) => Ok(Term::Int(-n)),
                    other => Err(self.error_here(format!(
                        "unary minus only applies to integer literals, found {}",
                        other.describe()
                    ))),
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.error_here(format!("expected a term, found {}", other.describe()))),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error_here(format!("unexpected {}", self.peek().describe())))
        }
    }
}

/// Parses a formula. `<` atoms are rejected unless `order_enabled`.
pub fn parse_formula(text: &str, order_enabled: bool) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        order_enabled,
    };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        order_enabled: false,
    };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a quotient `num / den` of terms, or a single term (denominator `None`).
pub fn parse_fraction(text: &str) -> Result<(Term, Option<Term>)> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        order_enabled: false,
    };
    let num = p.term()?;
    let den = if *p.peek() == Tok::Slash {
        p.bump();
        Some(p.term()?)
    } else {
        None
    };
    p.finish()?;
    Ok((num, den))
}

/// Splits a comma separated list at top level (outside parentheses and brackets).
pub fn split_top_level(text: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}
