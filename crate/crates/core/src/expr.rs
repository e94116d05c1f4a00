//! Family input: `<x-expr> ; <y-expr>` over `xi`, `t` and rationals.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' natural)?
//! base   := 'xi' | 't' | rational | '(' expr ')'
//! ```

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, GermError, ParseError};
use crate::germ::{to_prenormal, validate_tangential, MapGerm, PrenormalForm};
use crate::series::{rat_from_str, rat_to_string, Coefficient, Series2, Truncation};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Xi,
    T,
    /// Nonnegative literal; signs are `Neg` nodes.
    Num(Coefficient),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyExpr {
    pub x: Expr,
    pub y: Expr,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Xi,
    T,
    Num(Coefficient),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Xi => write!(f, "`xi`"),
            Tok::T => write!(f, "`t`"),
            Tok::Num(n) => write!(f, "`{}`", rat_to_string(n)),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
    text: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
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
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
                text: c.to_string(),
            });
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let d0 = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if d0 == i {
                    return Err(err(l0, c0 + (i - start), "expected denominator after `/`"));
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = rat_from_str(&text).ok_or_else(|| err(l0, c0, format!("invalid rational `{text}`")))?;
            out.push(Spanned {
                tok: Tok::Num(value),
                line: l0,
                column: c0,
                text,
            });
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let tok = match text.as_str() {
                "xi" => Tok::Xi,
                "t" => Tok::T,
                _ => return Err(err(l0, c0, format!("unknown identifier `{text}`"))),
            };
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
                text,
            });
        } else {
            return Err(err(l0, c0, format!("unexpected character `{c}`")));
        }
        col += i - start;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
        text: String::new(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let s = self.peek();
        err(s.line, s.column, format!("expected {wanted}, found {}", s.tok))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let s = self.bump();
        match &s.tok {
            Tok::Num(_) if !s.text.contains('/') => {
                let e: u32 = s
                    .text
                    .parse()
                    .map_err(|_| err(s.line, s.column, format!("exponent `{}` is too large", s.text)))?;
                Ok(Expr::Pow(Box::new(base), e))
            }
            Tok::Num(_) => Err(err(s.line, s.column, format!("exponent `{}` is not a natural number", s.text))),
            _ => Err(err(s.line, s.column, format!("expected natural exponent, found {}", s.tok))),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Xi => {
                self.bump();
                Ok(Expr::Xi)
            }
            Tok::T => {
                self.bump();
                Ok(Expr::T)
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("`xi`, `t`, a number or `(`")),
        }
    }
}

/// Parses a single expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

pub fn parse_family(src: &str) -> Result<FamilyExpr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let x = p.expr()?;
    if p.peek().tok != Tok::Semi {
        return Err(p.unexpected("`;`"));
    }
    p.bump();
    let y = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(FamilyExpr { x, y })
}

impl Expr {
    pub fn eval(&self, tr: Truncation) -> Result<Series2, crate::error::SeriesError> {
        Ok(match self {
            Expr::Xi => Series2::xi(tr),
            Expr::T => Series2::t(tr),
            Expr::Num(c) => Series2::constant(c.clone(), tr),
            Expr::Neg(e) => e.eval(tr)?.neg(),
            Expr::Add(a, b) => a.eval(tr)?.add(&b.eval(tr)?)?,
            Expr::Sub(a, b) => a.eval(tr)?.sub(&b.eval(tr)?)?,
            Expr::Mul(a, b) => a.eval(tr)?.mul(&b.eval(tr)?)?,
            Expr::Pow(a, e) => a.eval(tr)?.pow(*e),
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Pow(..) => 3,
            Expr::Num(n) if !n.is_integer() => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.prec() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Xi => write!(f, "xi"),
            Expr::T => write!(f, "t"),
            Expr::Num(n) if n.is_negative() => write!(f, "-{}", rat_to_string(&-n.clone())),
            Expr::Num(n) => write!(f, "{}", rat_to_string(n)),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, 2)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 0)?;
                write!(f, " + ")?;
                wrap(f, b, 1)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 0)?;
                write!(f, " - ")?;
                wrap(f, b, 1)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 1)?;
                write!(f, "*")?;
                wrap(f, b, 2)
            }
            Expr::Pow(a, e) => {
                // a fraction literal binds as one token, so `1/2^3` is (1/2)^3
                wrap(f, a, 4)?;
                write!(f, "^{e}")
            }
        }
    }
}

impl fmt::Display for FamilyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {}", self.x, self.y)
    }
}

impl FamilyExpr {
    pub fn to_germ(&self, tr: Truncation) -> Result<MapGerm, GermError> {
        MapGerm::new(self.x.eval(tr)?, self.y.eval(tr)?)
    }
}

/// Parses, validates and presents a family at truncation `tr`. With
/// `xi_form` the text is `xi ; psi`, read as `(xi + t, psi(xi + t, t))`.
pub fn prenormal_from_text(text: &str, xi_form: bool, tr: Truncation) -> Result<PrenormalForm, Error> {
    let fam = parse_family(text)?;
    let germ = if xi_form {
        if fam.x != Expr::Xi {
            return Err(Error::Usage("xi form expects `xi ; psi`".into()));
        }
        let psi = fam.y.eval(tr)?;
        if !psi.constant_term().is_zero() {
            return Err(GermError::NotAtOrigin.into());
        }
        MapGerm::from_xi_psi(&psi)
    } else {
        fam.to_germ(tr)?
    };
    let tf = validate_tangential(&germ, tr.bound().saturating_sub(1))?;
    Ok(to_prenormal(&tf)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;
    use proptest::prelude::*;

    const N: Truncation = Truncation::TotalDegree(12);

    #[test]
    fn parses_normal_forms() {
        let f = parse_family("xi + t ; t^2*(t+xi) + t^5 + t^6").unwrap();
        assert_eq!(f.x, Expr::Add(Box::new(Expr::Xi), Box::new(Expr::T)));
        let y = f.y.eval(N).unwrap();
        assert_eq!(y, Series2::from_ints(&[(0, 3, 1), (1, 2, 1), (0, 5, 1), (0, 6, 1)], N));
        let f = parse_family("xi ; t").unwrap();
        assert_eq!((f.x, f.y), (Expr::Xi, Expr::T));
    }

    #[test]
    fn error_positions() {
        let e = parse_family("xi + ; t").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        let e = parse_family("xi ; t^x").unwrap_err();
        assert_eq!(e.column, 8);
        let e = parse_family("xi ; t^1/2").unwrap_err();
        assert!(e.message.contains("natural"), "{}", e.message);
        let e = parse_family("xi ;\n  t t").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        assert!(parse_family("xi ; 1/0").is_err());
        assert!(parse_family("xi t ; t").is_err());
        assert!(parse_family("xi ; t ; t").is_err());
    }

    #[test]
    fn unary_minus_and_rationals() {
        let y = parse_expr("-t^2 + -3/4*t*xi").unwrap().eval(N).unwrap();
        assert_eq!(y.coeff_ij(0, 2), rat(-1, 1));
        assert_eq!(y.coeff_ij(1, 1), rat(-3, 4));
        let y = parse_expr("1/2^2").unwrap().eval(N).unwrap();
        assert_eq!(y.constant_term(), rat(1, 4));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Xi),
            Just(Expr::T),
            (0i64..20, 1i64..5).prop_map(|(n, d)| Expr::Num(rat(n, d))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner, 0u32..4).prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_round_trips(x in arb_expr(), y in arb_expr()) {
            let f = FamilyExpr { x, y };
            let text = f.to_string();
            prop_assert_eq!(parse_family(&text).unwrap(), f, "{}", text);
        }
    }
}
