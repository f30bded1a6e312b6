//! Text format for rational maps.
//!
//! Two forms are accepted: an arithmetic expression in `z` (with named
//! parameters, complex literals, integer powers and implicit multiplication)
//! or explicit coefficient lists `[a0, a1, ...] / [b0, b1, ...]`.
//! See `docs/grammar.md` for the full grammar.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::map::RationalMap;
use super::point::SpherePoint;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Parameter bindings for [`parse_map`].
pub type Params = BTreeMap<String, Complex64>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Complex64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match ch {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
        } else if ch.is_ascii_digit() || ch == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part, only if followed by digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| parse_err(start, format!("malformed number `{text}`")))?;
            let imaginary = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes
                    .get(i + 1)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            let z = if imaginary {
                i += 1;
                Complex64::new(0.0, value)
            } else {
                Complex64::new(value, 0.0)
            };
            out.push(Token {
                tok: Tok::Num(z),
                offset: start,
            });
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                offset: start,
            });
        } else {
            let c = src[start..].chars().next().unwrap_or('?');
            return Err(parse_err(start, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        offset: src.len(),
    });
    Ok(out)
}

/// Expression tree over `z` with parameters already substituted.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// Pointwise complex evaluation (non-finite on poles).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(a, k) => a.eval(z).powi(*k),
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.contains_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    /// Symbolic expansion as a fraction of polynomials (not reduced).
    fn to_fraction(&self) -> Result<(Poly, Poly)> {
        Ok(match self {
            Expr::Const(c) => (Poly::constant(*c), Poly::one()),
            Expr::Var => (Poly::identity(), Poly::one()),
            Expr::Neg(a) => {
                let (n, d) = a.to_fraction()?;
                (-&n, d)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (an, ad) = a.to_fraction()?;
                let (bn, bd) = b.to_fraction()?;
                let sub = matches!(self, Expr::Sub(..));
                if ad == bd {
                    let n = if sub { &an - &bn } else { &an + &bn };
                    (n, ad)
                } else {
                    let l = &an * &bd;
                    let r = &bn * &ad;
                    let n = if sub { &l - &r } else { &l + &r };
                    (n, &ad * &bd)
                }
            }
            Expr::Mul(a, b) => {
                let (an, ad) = a.to_fraction()?;
                let (bn, bd) = b.to_fraction()?;
                (&an * &bn, &ad * &bd)
            }
            Expr::Div(a, b) => {
                let (an, ad) = a.to_fraction()?;
                let (bn, bd) = b.to_fraction()?;
                if bn.is_zero() {
                    return Err(Error::DegenerateMap(
                        "division by an identically zero expression".into(),
                    ));
                }
                (&an * &bd, &ad * &bn)
            }
            Expr::Pow(a, k) => {
                let (n, d) = a.to_fraction()?;
                if *k >= 0 {
                    (n.pow(*k as u32), d.pow(*k as u32))
                } else {
                    if n.is_zero() {
                        return Err(Error::DegenerateMap(
                            "negative power of an identically zero expression".into(),
                        ));
                    }
                    (d.pow(k.unsigned_abs()), n.pow(k.unsigned_abs()))
                }
            }
        })
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    params: &'a Params,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(parse_err(self.offset(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
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

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                // implicit multiplication binds like `*` but takes no sign
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let k = self.integer_exponent()?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn integer_exponent(&mut self) -> Result<i32> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let mut sign = 1i32;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                sign = -1;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let at = self.offset();
        let k = match self.bump().tok {
            Tok::Num(v) if v.im == 0.0 && v.re.fract() == 0.0 && v.re.abs() <= 64.0 => v.re as i32,
            _ => return Err(parse_err(at, "exponent must be an integer between -64 and 64")),
        };
        if paren {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(sign * k)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump().tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                _ => match self.params.get(&name) {
                    Some(v) => Ok(Expr::Const(*v)),
                    None => Err(Error::UnboundParameter { name, offset: at }),
                },
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::End => Err(parse_err(at, "unexpected end of input")),
            other => Err(parse_err(at, format!("unexpected token {}", describe(&other)))),
        }
    }

    fn coefficient_list(&mut self) -> Result<Poly> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut coeffs = Vec::new();
        loop {
            let at = self.offset();
            let e = self.expr()?;
            if e.contains_var() {
                return Err(parse_err(at, "coefficients may not depend on z"));
            }
            coeffs.push(e.eval(Complex64::new(0.0, 0.0)));
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBracket => {
                    self.bump();
                    return Ok(Poly::new(coeffs));
                }
                _ => return Err(parse_err(self.offset(), "expected `,` or `]`")),
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses an expression in `z` into its tree, substituting `params`.
pub fn parse_expr(src: &str, params: &Params) -> Result<Expr> {
    let mut parser = Parser {
        toks: lex(src)?,
        pos: 0,
        params,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parse_err(
            parser.offset(),
            format!("unexpected token {}", describe(parser.peek())),
        ));
    }
    Ok(e)
}

/// Parses a map description into a reduced [`RationalMap`].
pub fn parse_map(src: &str, params: &Params) -> Result<RationalMap> {
    let toks = lex(src)?;
    if toks[0].tok == Tok::LBracket {
        let mut parser = Parser { toks, pos: 0, params };
        let p = parser.coefficient_list()?;
        let q = if *parser.peek() == Tok::Slash {
            parser.bump();
            parser.coefficient_list()?
        } else {
            Poly::one()
        };
        parser.expect(Tok::End, "end of input")?;
        return RationalMap::new(p, q);
    }
    let expr = parse_expr(src, params)?;
    let (p, q) = expr.to_fraction()?;
    if p.is_zero() && !q.is_zero() {
        return Err(Error::DegenerateMap("map is constant".into()));
    }
    let map = RationalMap::new(p, q)?;
    spot_check(&expr, &map)?;
    Ok(map)
}

/// Compares the reduced map against direct evaluation of the expression at
/// a fixed set of sample points.
fn spot_check(expr: &Expr, map: &RationalMap) -> Result<()> {
    for k in 0..12 {
        let z = Complex64::from_polar(0.31 + 0.23 * k as f64, 0.7 + 1.9 * k as f64);
        let direct = expr.eval(z);
        if !(direct.re.is_finite() && direct.im.is_finite()) || direct.norm() > 1e8 {
            continue;
        }
        let reduced = map.eval(&SpherePoint::Finite(z));
        let dist = reduced.chordal_distance(&SpherePoint::Finite(direct));
        if dist > 1e-7 {
            return Err(Error::Internal(format!(
                "reduced map disagrees with the expression at {z} (chordal gap {dist:e})"
            )));
        }
    }
    Ok(())
}
