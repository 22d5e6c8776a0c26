//! Text syntax for quantities, series expressions and congruences.
//!
//! ```text
//! congruence := expr '=' expr 'mod' 'p' '^' int
//! expr       := term (('+' | '-') term)*
//! term       := unary ('*' unary)*
//! unary      := '-' unary | atom
//! atom       := int ['/' int] | 'p' ['^' ['-'] int] | 'H(' parts ')' | 'hp(' parts ')'
//!             | 'O(p^' int ')' | 'inv(' expr ')' | quantity | '(' expr ')'
//! ```
//!
//! The canonical rendering of an [`MhsSeries`] is accepted as input, so
//! printed series can be pasted back in.

use std::fmt;

use mhs_core::{Composition, IntPoly, QuantitySpec, Rational};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub const QUANTITY_NAMES: &[&str] = &[
    "binp", "binpoly", "apery", "zetap", "psum", "hres", "curious", "sumpoly", "half", "alt", "rat",
];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("column {}: {msg}", .pos + 1)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    /// `p^k`.
    PPow(i64),
    /// `H_{p-1}(s)`.
    H(Composition),
    /// `p^{|s|} H_{p-1}(s)`.
    Weighted(Composition),
    /// Error term `O(p^n)`.
    BigO(i64),
    Quantity(QuantitySpec),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Inv(Box<Expr>),
}

/// `lhs == rhs mod p^modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub lhs: Expr,
    pub rhs: Expr,
    pub modulus: i64,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write!(f, "{}", mhs_core::arith::fmt_rational(q)),
            Expr::PPow(k) => write!(f, "p^{k}"),
            Expr::H(s) => write!(f, "H{s}"),
            Expr::Weighted(s) => write!(f, "hp{s}"),
            Expr::BigO(n) => write!(f, "O(p^{n})"),
            Expr::Quantity(q) => write!(f, "{q}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a} * {b}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Inv(a) => write!(f, "inv({a})"),
        }
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} mod p^{}", self.lhs, self.rhs, self.modulus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^(),;=".contains(ch) {
            out.push((i, Tok::Sym(ch)));
            i += 1;
        } else {
            return err(i, format!("unexpected character '{ch}'"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    i: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [(usize, Tok)], end: usize) -> Self {
        Parser { toks, i: 0, end }
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            err(self.pos(), format!("expected '{c}'"))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == name => {
                self.i += 1;
                Ok(())
            }
            _ => err(self.pos(), format!("expected '{name}'")),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        if self.i < self.toks.len() {
            return err(self.pos(), "unexpected trailing input");
        }
        Ok(())
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.i += 1;
                Ok(n)
            }
            _ => err(self.pos(), "expected an integer"),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        let neg = self.eat('-');
        let n = self.int()?;
        let n = if neg { -n } else { n };
        n.to_i64().map_or_else(|| err(pos, "integer out of range"), Ok)
    }

    fn small(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        let n = self.int()?;
        n.to_u32().map_or_else(|| err(pos, "integer out of range"), Ok)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn parts(&mut self) -> Result<Composition, ParseError> {
        self.expect('(')?;
        let mut parts = Vec::new();
        if !self.eat(')') {
            loop {
                let pos = self.pos();
                let s = self.small()?;
                if s == 0 {
                    return err(pos, "composition parts must be positive");
                }
                parts.push(s);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(Composition::new(parts))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                if self.peek() == Some(&Tok::Sym('/')) && matches!(self.peek_at(1), Some(Tok::Int(_))) {
                    self.i += 1;
                    let d = self.int()?;
                    if d.is_zero() {
                        return err(pos, "zero denominator");
                    }
                    return Ok(Expr::Num(Rational::new(n, d)));
                }
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                match name.as_str() {
                    "p" => {
                        if self.eat('^') {
                            Ok(Expr::PPow(self.signed_int()?))
                        } else {
                            Ok(Expr::PPow(1))
                        }
                    }
                    "H" => Ok(Expr::H(self.parts()?)),
                    "hp" => Ok(Expr::Weighted(self.parts()?)),
                    "O" => {
                        self.expect('(')?;
                        self.expect_ident("p")?;
                        let n = if self.eat('^') { self.signed_int()? } else { 1 };
                        self.expect(')')?;
                        Ok(Expr::BigO(n))
                    }
                    "inv" => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Inv(Box::new(e)))
                    }
                    _ if QUANTITY_NAMES.contains(&name.as_str()) => {
                        Ok(Expr::Quantity(self.quantity_args(&name, pos)?))
                    }
                    _ => err(
                        pos,
                        format!(
                            "unknown atom '{name}'; known: p, H, hp, O, inv, {}",
                            QUANTITY_NAMES.join(", ")
                        ),
                    ),
                }
            }
            Some(Tok::Sym(c)) => err(pos, format!("unexpected '{c}'")),
            None => err(pos, "unexpected end of input"),
        }
    }

    /// Splits the parenthesised argument list at top-level `;`.
    fn fields(&mut self) -> Result<Vec<(usize, &'a [(usize, Tok)])>, ParseError> {
        self.expect('(')?;
        let mut out = Vec::new();
        let mut depth = 0;
        let mut start = self.i;
        loop {
            let pos = self.pos();
            match self.peek() {
                None => return err(pos, "unclosed '('"),
                Some(Tok::Sym('(')) => depth += 1,
                Some(Tok::Sym(')')) if depth == 0 => {
                    out.push((self.toks.get(start).map_or(pos, |t| t.0), &self.toks[start..self.i]));
                    self.i += 1;
                    return Ok(out);
                }
                Some(Tok::Sym(')')) => depth -= 1,
                Some(Tok::Sym(';')) if depth == 0 => {
                    out.push((self.toks.get(start).map_or(pos, |t| t.0), &self.toks[start..self.i]));
                    start = self.i + 1;
                }
                _ => {}
            }
            self.i += 1;
        }
    }

    fn quantity_args(&mut self, name: &str, pos: usize) -> Result<QuantitySpec, ParseError> {
        let fields = self.fields()?;
        let nf = fields.len();
        let arity = |want: &[usize]| -> Result<(), ParseError> {
            if want.contains(&nf) {
                Ok(())
            } else {
                err(pos, format!("{name} takes {want:?} ';'-separated fields, got {nf}"))
            }
        };
        let end = self.pos();
        let ints = |k: usize| -> Result<Vec<i64>, ParseError> { int_list(fields[k].1, fields[k].0, end) };
        let nums = |k: usize, count: usize| -> Result<Vec<u32>, ParseError> {
            let v = ints(k)?;
            if v.len() != count || v.iter().any(|&x| x < 0) {
                return err(fields[k].0, format!("{name} expects {count} nonnegative integers"));
            }
            Ok(v.into_iter().map(|x| x as u32).collect())
        };
        let poly = |k: usize| -> Result<IntPoly, ParseError> { int_poly(fields[k].1, fields[k].0, end) };
        Ok(match name {
            "binp" => {
                arity(&[1])?;
                let v = ints(0)?;
                if !(v.len() == 2 || v.len() == 3) || v.iter().any(|&x| x < 0) {
                    return err(fields[0].0, "binp expects a,b or a,b,r (nonnegative)");
                }
                let r = if v.len() == 3 { v[2] as u32 } else { 1 };
                QuantitySpec::BinomialPP { a: v[0] as u64, b: v[1] as u64, r }
            }
            "binpoly" => {
                arity(&[2])?;
                QuantitySpec::BinomialPoly { f: poly(0)?, g: poly(1)? }
            }
            "apery" => {
                if nf != 1 || !fields[0].1.is_empty() {
                    return err(pos, "apery takes no arguments");
                }
                QuantitySpec::Apery
            }
            "zetap" | "hres" | "half" | "alt" => {
                arity(&[1])?;
                let k = nums(0, 1)?[0];
                match name {
                    "zetap" => QuantitySpec::ZetaP(k),
                    "hres" => QuantitySpec::RestrictedHarmonic(k),
                    "half" => QuantitySpec::HalfHarmonic(k),
                    _ => QuantitySpec::AlternatingHarmonic(k),
                }
            }
            "curious" => {
                arity(&[1])?;
                let v = nums(0, 2)?;
                QuantitySpec::Curious { r: v[0], k: v[1] }
            }
            "psum" => {
                arity(&[3, 4])?;
                let restricted = if nf == 4 {
                    match fields[3].1 {
                        [(_, Tok::Ident(s))] if s == "restricted" || s == "r" => true,
                        [] => false,
                        _ => return err(fields[3].0, "expected 'restricted'"),
                    }
                } else {
                    false
                };
                QuantitySpec::PowerSum { f: poly(0)?, g: poly(1)?, exps: ints(2)?, restricted }
            }
            "sumpoly" => {
                arity(&[2])?;
                let mut p = Parser::new(fields[0].1, end);
                let coeffs = p.poly("k")?;
                p.done()?;
                let s = ints(1)?;
                if s.iter().any(|&x| x <= 0) {
                    return err(fields[1].0, "composition parts must be positive");
                }
                QuantitySpec::SumPolyMhs {
                    poly: coeffs,
                    s: Composition::new(s.into_iter().map(|x| x as u32).collect()),
                }
            }
            "rat" => {
                arity(&[1])?;
                let mut p = Parser::new(fields[0].1, end);
                let num = p.poly("p")?;
                let den = if p.eat('/') { p.poly("p")? } else { vec![Rational::one()] };
                p.done()?;
                QuantitySpec::RationalFn {
                    num: to_int_poly(&num, fields[0].0)?,
                    den: to_int_poly(&den, fields[0].0)?,
                }
            }
            _ => unreachable!("checked against QUANTITY_NAMES"),
        })
    }

    /// Polynomial in `var` with rational coefficients (coefficients from degree 0).
    fn poly(&mut self, var: &str) -> Result<Vec<Rational>, ParseError> {
        let mut acc = self.poly_term(var)?;
        loop {
            if self.eat('+') {
                acc = padd(&acc, &self.poly_term(var)?);
            } else if self.peek() == Some(&Tok::Sym('-')) {
                self.i += 1;
                let t = self.poly_term(var)?;
                acc = padd(&acc, &t.iter().map(|c| -c).collect::<Vec<_>>());
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_term(&mut self, var: &str) -> Result<Vec<Rational>, ParseError> {
        let mut acc = self.poly_unary(var)?;
        while self.eat('*') {
            acc = pmul(&acc, &self.poly_unary(var)?);
        }
        Ok(acc)
    }

    fn poly_unary(&mut self, var: &str) -> Result<Vec<Rational>, ParseError> {
        if self.eat('-') {
            return Ok(self.poly_unary(var)?.iter().map(|c| -c).collect());
        }
        let pos = self.pos();
        let base = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                if self.peek() == Some(&Tok::Sym('/')) && matches!(self.peek_at(1), Some(Tok::Int(_))) {
                    self.i += 1;
                    let d = self.int()?;
                    if d.is_zero() {
                        return err(pos, "zero denominator");
                    }
                    vec![Rational::new(n, d)]
                } else {
                    vec![Rational::from_integer(n)]
                }
            }
            Some(Tok::Ident(v)) if v == var => {
                self.i += 1;
                vec![Rational::zero(), Rational::one()]
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.poly(var)?;
                self.expect(')')?;
                e
            }
            _ => return err(pos, format!("expected a polynomial in {var}")),
        };
        if self.eat('^') {
            let e = self.small()?;
            let mut out = vec![Rational::one()];
            for _ in 0..e {
                out = pmul(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }
}

fn padd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn pmul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn to_int_poly(c: &[Rational], pos: usize) -> Result<IntPoly, ParseError> {
    let mut v = Vec::new();
    for q in c {
        if !q.is_integer() {
            return err(pos, "polynomial in p must have integer coefficients");
        }
        match q.to_integer().to_i64() {
            Some(x) => v.push(x),
            None => return err(pos, "coefficient out of range"),
        }
    }
    Ok(IntPoly::new(v))
}

fn int_poly(toks: &[(usize, Tok)], pos: usize, end: usize) -> Result<IntPoly, ParseError> {
    if toks.is_empty() {
        return err(pos, "empty polynomial");
    }
    let mut p = Parser::new(toks, end);
    let c = p.poly("p")?;
    p.done()?;
    to_int_poly(&c, pos)
}

fn int_list(toks: &[(usize, Tok)], pos: usize, end: usize) -> Result<Vec<i64>, ParseError> {
    let mut p = Parser::new(toks, end);
    let mut out = Vec::new();
    if toks.is_empty() {
        return err(pos, "expected integers");
    }
    loop {
        out.push(p.signed_int()?);
        if p.i == toks.len() {
            return Ok(out);
        }
        p.expect(',')?;
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.len());
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

pub fn parse_congruence(text: &str) -> Result<Congruence, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.len());
    let lhs = p.expr()?;
    p.expect('=')?;
    let rhs = p.expr()?;
    p.expect_ident("mod")?;
    p.expect_ident("p")?;
    let modulus = if p.eat('^') { p.signed_int()? } else { 1 };
    p.done()?;
    Ok(Congruence { lhs, rhs, modulus })
}

pub fn parse_quantity(text: &str) -> Result<QuantitySpec, ParseError> {
    match parse_expr(text)? {
        Expr::Quantity(q) => Ok(q),
        _ => err(0, "expected a single quantity"),
    }
}

/// Congruences from a statement file: one per line, `#` starts a comment.
pub fn parse_statement_file(text: &str) -> Result<Vec<(usize, Congruence)>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let c = parse_congruence(body).map_err(|e| ParseError {
            pos: e.pos,
            msg: format!("line {}: {}", ln + 1, e.msg),
        })?;
        out.push((ln + 1, c));
    }
    Ok(out)
}
