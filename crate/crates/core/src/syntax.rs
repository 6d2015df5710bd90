//! Text syntax for polynomials and monomials.
//!
//! ```text
//! poly   := term ('+' term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' integer)?
//! atom   := identifier | '1' | '0' | '(' poly ')'
//! ```
//!
//! Negative powers are only accepted on monomials. Columns in errors are
//! 1-based character offsets into the parsed text.

use crate::poly::{LaurentPoly, Monomial, PolyError, Result, VarContext};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(column: usize, message: impl Into<String>) -> PolyError {
    PolyError::Parse {
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                if s == "-" {
                    return Err(err(col, "expected digits after `-`"));
                }
                let v = s.parse::<i64>().map_err(|_| err(col, format!("integer `{s}` out of range")))?;
                out.push((Tok::Int(v), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a VarContext,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Int(_) | Tok::LParen))
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        if !self.starts_factor() {
            return Err(match self.peek() {
                Some(_) => err(self.col(), "expected a term"),
                None => err(self.col(), "unexpected end of input, expected a term"),
            });
        }
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                if !self.starts_factor() {
                    return Err(err(self.col(), "expected a factor after `*`"));
                }
            } else if !self.starts_factor() {
                break;
            }
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPoly> {
        let col = self.col();
        let base = match self.toks.get(self.pos).cloned() {
            Some((Tok::Ident(name), _)) => {
                self.pos += 1;
                let i = self
                    .ctx
                    .index_of(&name)
                    .ok_or_else(|| err(col, format!("undeclared variable `{name}`")))?;
                LaurentPoly::monomial(self.ctx, Monomial::var(self.ctx.dim(), i))?
            }
            Some((Tok::Int(1), _)) => {
                self.pos += 1;
                LaurentPoly::one(self.ctx)
            }
            Some((Tok::Int(0), _)) => {
                self.pos += 1;
                LaurentPoly::zero(self.ctx)
            }
            Some((Tok::Int(v), _)) => {
                return Err(err(col, format!("coefficient `{v}` not allowed; coefficients are implicitly 1")));
            }
            Some((Tok::LParen, _)) => {
                self.pos += 1;
                let inner = self.poly()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(err(self.col(), "expected `)`"));
                }
                self.pos += 1;
                inner
            }
            _ => return Err(err(col, "expected a factor")),
        };
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let ecol = self.col();
        let e = match self.peek() {
            Some(Tok::Int(e)) => *e,
            _ => return Err(err(ecol, "expected an integer exponent after `^`")),
        };
        self.pos += 1;
        if let Some(m) = base.as_monomial() {
            LaurentPoly::monomial(self.ctx, m.pow(e)?)
        } else if e >= 0 {
            let e = u32::try_from(e).map_err(|_| err(ecol, "exponent too large"))?;
            base.pow(e)
        } else {
            Err(err(ecol, "negative powers are only defined for monomials"))
        }
    }
}

pub fn parse_poly(ctx: &VarContext, text: &str) -> Result<LaurentPoly> {
    let toks = lex(text)?;
    let mut p = Parser {
        ctx,
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
    };
    let out = p.poly()?;
    if p.pos != p.toks.len() {
        return Err(err(p.col(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Parses an expression that must evaluate to a single monomial.
pub fn parse_monomial(ctx: &VarContext, text: &str) -> Result<Monomial> {
    let p = parse_poly(ctx, text)?;
    p.as_monomial()
        .cloned()
        .ok_or_else(|| err(1, format!("`{}` is not a single monomial", text.trim())))
}
