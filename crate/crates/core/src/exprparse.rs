//! The model expression language: parsing into [`MultiPoly`] and canonical
//! formatting back to text.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary ('^' uint)?
//! primary := number | 'i' | identifier | '(' expr ')'
//! ```
//!
//! A leading minus binds looser than `^`, so `-a^2` is `-(a^2)`.

use crate::error::{Error, Result};
use crate::polycore::{parse_decimal, GaussRational, MultiPoly, Rational, Vars};

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Literal(Rational),
    ImaginaryUnit,
    Identifier { name: String, offset: usize },
    Negate(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div {
        num: Box<ExprAst>,
        den: Box<ExprAst>,
        offset: usize,
    },
    Pow(Box<ExprAst>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let start = pos;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                    pos += 1;
                }
                let lit = &text[start..pos];
                let value = parse_decimal(lit)
                    .filter(|_| !lit.starts_with('.') && !lit.ends_with('.'))
                    .ok_or_else(|| Error::Syntax {
                        offset: start,
                        message: format!("malformed number `{lit}`"),
                    })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                out.push((Tok::Ident(text[start..pos].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        pos += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            t => format!("`{}`", tok_text(t)),
        };
        Error::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    let (_, offset) = self.bump();
                    lhs = ExprAst::Div {
                        num: Box::new(lhs),
                        den: Box::new(self.factor()?),
                        offset,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(ExprAst::Negate(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let offset = self.offset();
        match self.bump().0 {
            Tok::Num(n) if n.is_integer() && !n.is_negative() => {
                let e = u32::try_from(n.numer()).map_err(|_| Error::BadExponent { offset })?;
                Ok(ExprAst::Pow(Box::new(base), e))
            }
            _ => Err(Error::BadExponent { offset }),
        }
    }

    fn primary(&mut self) -> Result<ExprAst> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ExprAst::Literal(n))
            }
            Tok::Ident(name) => {
                let (_, offset) = self.bump();
                if name == "i" {
                    Ok(ExprAst::ImaginaryUnit)
                } else {
                    Ok(ExprAst::Identifier { name, offset })
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, identifier or `(`")),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        _ => "",
    }
}

/// Parses `text` into a syntax tree without resolving identifiers.
pub fn parse_ast(text: &str) -> Result<ExprAst> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(ast)
}

impl ExprAst {
    /// Evaluates the tree to an exact polynomial over `vars`.
    pub fn to_poly(&self, vars: &Vars) -> Result<MultiPoly> {
        Ok(match self {
            ExprAst::Literal(r) => MultiPoly::constant(vars, r.clone().into()),
            ExprAst::ImaginaryUnit => MultiPoly::constant(vars, GaussRational::i()),
            ExprAst::Identifier { name, offset } => {
                MultiPoly::var(vars, name).map_err(|_| Error::UnknownIdentifier {
                    name: name.clone(),
                    offset: *offset,
                })?
            }
            ExprAst::Negate(a) => -&a.to_poly(vars)?,
            ExprAst::Add(a, b) => &a.to_poly(vars)? + &b.to_poly(vars)?,
            ExprAst::Sub(a, b) => &a.to_poly(vars)? - &b.to_poly(vars)?,
            ExprAst::Mul(a, b) => &a.to_poly(vars)? * &b.to_poly(vars)?,
            ExprAst::Div { num, den, offset } => {
                let d = den.to_poly(vars)?;
                let c = d.as_constant().ok_or_else(|| Error::BadDivision {
                    offset: *offset,
                    message: format!("divisor `{d}` is not a constant"),
                })?;
                let inv = c.inv().map_err(|_| Error::BadDivision {
                    offset: *offset,
                    message: "divisor is zero".into(),
                })?;
                num.to_poly(vars)?.scale(&inv)
            }
            ExprAst::Pow(a, e) => a.to_poly(vars)?.pow(*e),
        })
    }
}

/// Parses an expression into an exact polynomial over `vars`.
pub fn parse_expr(text: &str, vars: &Vars) -> Result<MultiPoly> {
    parse_ast(text)?.to_poly(vars)
}

/// Canonical text: terms in descending graded-lex order, e.g.
/// `x^2 - 1/2*x*y + (1 + 2*i)*y + 3`.
pub fn format_poly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let names = p.vars().names();
    let mut out = String::new();
    for (k, (e, c)) in p.terms().rev().enumerate() {
        let monomial: Vec<String> = e
            .exps()
            .iter()
            .zip(names)
            .filter(|(d, _)| **d > 0)
            .map(|(d, n)| if *d == 1 { n.clone() } else { format!("{n}^{d}") })
            .collect();
        let monomial = monomial.join("*");
        let (negative, coeff) = if c.is_real() {
            (c.re.is_negative(), c.re.abs().to_string())
        } else if c.re.is_zero() {
            let m = c.im.abs();
            let text = if m.is_one() { "i".to_string() } else { format!("{m}*i") };
            (c.im.is_negative(), text)
        } else {
            (false, format!("({c})"))
        };
        let body = match (monomial.is_empty(), coeff.as_str()) {
            (true, _) => coeff,
            (false, "1") => monomial,
            (false, _) => format!("{coeff}*{monomial}"),
        };
        match (k, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}
