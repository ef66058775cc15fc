//! Recursive-descent parser for hand-transcribed polynomial displays.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*'? factor)*          juxtaposition multiplies
//! factor := base ('^' nat)?
//! base   := nat | symbol | '(' expr ')'
//! ```
//!
//! Whitespace and line breaks are insignificant. A leading minus is only
//! accepted at the start of an expression or right after `(`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::{MultiPoly, Vars};
use crate::scalar::Rational;

pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UndeclaredSymbol(String),
    ExponentOverflow(String),
    TrailingInput(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            Self::UnexpectedToken(t) => write!(f, "unexpected `{t}`"),
            Self::UnexpectedEnd => write!(f, "unexpected end of input"),
            Self::UndeclaredSymbol(s) => write!(f, "undeclared symbol `{s}`"),
            Self::ExponentOverflow(e) => write!(f, "exponent {e} exceeds {MAX_EXPONENT}"),
            Self::TrailingInput(t) => write!(f, "trailing input starting at `{t}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Nat(BigInt),
    Sym(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Nat(n) => write!(f, "{n}"),
            Tok::Sym(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::End => f.write_str("<end>"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l0, column: c0 });
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
                column += 1;
            }
            push(&mut out, Tok::Nat(s.parse().expect("digits")));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                chars.next();
                column += 1;
            }
            push(&mut out, Tok::Sym(s));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::UnexpectedChar(other),
                });
            }
        };
        chars.next();
        column += 1;
        push(&mut out, tok);
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::End => self.err_here(ParseErrorKind::UnexpectedEnd),
            t => self.err_here(ParseErrorKind::UnexpectedToken(t.to_string())),
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_base(&self) -> bool {
        matches!(self.peek(), Tok::Nat(_) | Tok::Sym(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
                acc = &acc * &self.factor()?;
            } else if self.starts_base() {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Nat(n) => {
                let e = u32::try_from(&n)
                    .ok()
                    .filter(|e| *e <= MAX_EXPONENT)
                    .ok_or_else(|| self.err_here(ParseErrorKind::ExponentOverflow(n.to_string())))?;
                self.bump();
                Ok(base.pow(e))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn base(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(MultiPoly::constant(self.vars, Rational::from_integer(n)))
            }
            Tok::Sym(s) => {
                let p = MultiPoly::var(self.vars, &s)
                    .map_err(|_| self.err_here(ParseErrorKind::UndeclaredSymbol(s.clone())))?;
                self.bump();
                Ok(p)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses `text` into an exact polynomial over `vars`.
pub fn parse_expression(text: &str, vars: &Vars) -> Result<MultiPoly, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        let t = p.peek().to_string();
        return Err(p.err_here(ParseErrorKind::TrailingInput(t)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::scalar::rat;

    fn bg() -> Vars {
        vars(&["beta", "gamma"])
    }

    #[test]
    fn printed_top_term_expands() {
        let v = bg();
        let p = parse_expression("16 beta^6 (1 + gamma)^4", &v).unwrap();
        assert_eq!(p.num_terms(), 5);
        assert_eq!(
            p.to_string(),
            "16*beta^6*gamma^4 + 64*beta^6*gamma^3 + 96*beta^6*gamma^2 + 64*beta^6*gamma + 16*beta^6"
        );
    }

    #[test]
    fn zero_exponent_is_one() {
        let p = parse_expression("(1+beta)^0", &bg()).unwrap();
        assert_eq!(p, MultiPoly::one(&bg()));
    }

    #[test]
    fn evaluates_short_display() {
        let p = parse_expression("3 + 28 gamma + 96 gamma^2", &bg()).unwrap();
        assert_eq!(p.evaluate(&[rat(5), rat(1)]).unwrap(), rat(127));
    }

    #[test]
    fn subtraction_is_left_associative() {
        let p = parse_expression("10 - 3 - 2", &bg()).unwrap();
        assert_eq!(p.constant_value(), Some(rat(5)));
        let q = parse_expression("-(beta - 1)\n  - gamma", &bg()).unwrap();
        assert_eq!(q.to_string(), "-beta - gamma + 1");
    }

    #[test]
    fn juxtaposition_equals_star() {
        let v = bg();
        let a = parse_expression("2 beta (gamma + 1)^2 gamma", &v).unwrap();
        let b = parse_expression("2*beta*(gamma+1)^2*gamma", &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        let v = bg();
        let e = parse_expression("1 +\n  delta", &v).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol("delta".into()));

        let e = parse_expression("beta^65", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExponentOverflow("65".into()));

        let e = parse_expression("1 + -beta", &v).unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));

        let e = parse_expression("(1 + beta", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);

        let e = parse_expression("1 ) 2", &v).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::TrailingInput(_)));

        let e = parse_expression("2 / 3", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar('/'));
    }
}
