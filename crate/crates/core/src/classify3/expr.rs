//! Arithmetic over matrix entries, used by the table's conditions and recipes.
//!
//! ```text
//! cond  := cmp ("&&" cmp)*
//! cmp   := sum ("<" | ">" | "<=" | ">=") sum
//! sum   := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := number | aIJ | k1 | k2 | ("max" | "min") "(" sum ("," sum)* ")" | "(" sum ")"
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// Zero-based `(row, col)`.
    Entry(usize, usize),
    K1,
    K2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Max(Vec<Expr>),
    Min(Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

/// A conjunction of comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub clauses: Vec<Comparison>,
}

impl Expr {
    pub fn eval(&self, env: &dyn Fn(Var) -> f64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var(v) => env(*v),
            Expr::Neg(e) => -e.eval(env),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env), b.eval(env));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Max(xs) => xs.iter().map(|e| e.eval(env)).fold(f64::NEG_INFINITY, f64::max),
            Expr::Min(xs) => xs.iter().map(|e| e.eval(env)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Neg(e) => e.vars(out),
            Expr::Bin(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::Max(xs) | Expr::Min(xs) => xs.iter().for_each(|e| e.vars(out)),
        }
    }
}

impl Comparison {
    pub fn holds(&self, env: &dyn Fn(Var) -> f64) -> bool {
        let (l, r) = (self.lhs.eval(env), self.rhs.eval(env));
        match self.op {
            CmpOp::Lt => l < r,
            CmpOp::Gt => l > r,
            CmpOp::Le => l <= r,
            CmpOp::Ge => l >= r,
        }
    }

    /// Signed distance to the boundary relative to the larger side; positive
    /// when the comparison holds strictly.
    pub fn slack(&self, env: &dyn Fn(Var) -> f64) -> f64 {
        let (l, r) = (self.lhs.eval(env), self.rhs.eval(env));
        let d = match self.op {
            CmpOp::Lt | CmpOp::Le => r - l,
            CmpOp::Gt | CmpOp::Ge => l - r,
        };
        let scale = l.abs().max(r.abs());
        if scale > 0.0 {
            d / scale
        } else {
            0.0
        }
    }
}

impl Condition {
    pub fn holds(&self, env: &dyn Fn(Var) -> f64) -> bool {
        self.clauses.iter().all(|c| c.holds(env))
    }

    /// Smallest clause slack. Near zero means the verdict could flip under rounding.
    pub fn slack(&self, env: &dyn Fn(Var) -> f64) -> f64 {
        self.clauses
            .iter()
            .map(|c| c.slack(env))
            .fold(f64::INFINITY, |m, s| if s.abs() < m.abs() { s } else { m })
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for c in &self.clauses {
            c.lhs.vars(&mut out);
            c.rhs.vars(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    const OPS: [&str; 13] = ["&&", "<=", ">=", "<", ">", "+", "-", "*", "/", "^", "(", ")", ","];
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            let text = &s[start..i];
            out.push(Tok::Num(
                text.parse().map_err(|_| Error::Parse(format!("bad number {text:?}")))?,
            ));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < b.len() && (b[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(s[start..i].to_string()));
            continue;
        }
        for op in OPS {
            if s[i..].starts_with(op) {
                out.push(Tok::Op(op));
                i += op.len();
                continue 'outer;
            }
        }
        return Err(Error::Parse(format!("unexpected {c:?} in expression {s:?}")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(o)) => Some(o),
            _ => None,
        }
    }

    fn eat(&mut self, op: &str) -> bool {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {op:?}")))
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} of {:?}", self.pos, self.src))
    }

    fn condition(&mut self) -> Result<Condition> {
        let mut clauses = vec![self.comparison()?];
        while self.eat("&&") {
            clauses.push(self.comparison()?);
        }
        Ok(Condition { clauses })
    }

    fn comparison(&mut self) -> Result<Comparison> {
        let lhs = self.sum()?;
        let op = match self.peek_op() {
            Some("<") => CmpOp::Lt,
            Some(">") => CmpOp::Gt,
            Some("<=") => CmpOp::Le,
            Some(">=") => CmpOp::Ge,
            _ => return Err(self.error("expected a comparison")),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(Comparison { lhs, op, rhs })
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            e = Expr::Bin(op, Box::new(e), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(e);
            };
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(x)) => Ok(Expr::Num(x)),
            Some(Tok::Op("(")) => {
                let e = self.sum()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "max" | "min" => {
                    self.expect("(")?;
                    let mut args = vec![self.sum()?];
                    while self.eat(",") {
                        args.push(self.sum()?);
                    }
                    self.expect(")")?;
                    Ok(if name == "max" { Expr::Max(args) } else { Expr::Min(args) })
                }
                "k1" => Ok(Expr::Var(Var::K1)),
                "k2" => Ok(Expr::Var(Var::K2)),
                _ => parse_entry(&name)
                    .map(|(i, j)| Expr::Var(Var::Entry(i, j)))
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {name:?} in {:?}", self.src))),
            },
            _ => {
                self.pos -= 1;
                Err(self.error("expected a value"))
            }
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

/// `aIJ` with one-based single-digit indices.
fn parse_entry(name: &str) -> Option<(usize, usize)> {
    let b = name.as_bytes();
    if b.len() != 3 || b[0] != b'a' {
        return None;
    }
    let d = |c: u8| (b'1'..=b'9').contains(&c).then(|| (c - b'1') as usize);
    Some((d(b[1])?, d(b[2])?))
}

fn parser(s: &str) -> Result<Parser<'_>> {
    Ok(Parser {
        toks: lex(s)?,
        pos: 0,
        src: s,
    })
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = parser(s)?;
        let e = p.sum()?;
        p.finish()?;
        Ok(e)
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = parser(s)?;
        let c = p.condition()?;
        p.finish()?;
        Ok(c)
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Entry(i, j) => write!(f, "a{}{}", i + 1, j + 1),
            Var::K1 => f.write_str("k1"),
            Var::K2 => f.write_str("k2"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                // left-associative: the right operand of - and / needs a strictly higher level
                let right_min = if matches!(op, BinOp::Sub | BinOp::Div) { p + 1 } else { p };
                let left_min = if *op == BinOp::Pow { p + 1 } else { p };
                write_operand(f, a, left_min)?;
                f.write_str(sym)?;
                write_operand(f, b, right_min)
            }
            Expr::Max(xs) | Expr::Min(xs) => {
                f.write_str(if matches!(self, Expr::Max(_)) { "max(" } else { "min(" })?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            let op = match c.op {
                CmpOp::Lt => "<",
                CmpOp::Gt => ">",
                CmpOp::Le => "<=",
                CmpOp::Ge => ">=",
            };
            write!(f, "{} {op} {}", c.lhs, c.rhs)?;
        }
        Ok(())
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Expr);
string_serde!(Condition);

#[cfg(test)]
mod tests {
    use super::*;

    fn env(vals: [[f64; 3]; 3]) -> impl Fn(Var) -> f64 {
        move |v| match v {
            Var::Entry(i, j) => vals[i][j],
            Var::K1 => 0.5,
            Var::K2 => -1.0,
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let e = env([[0.0; 3]; 3]);
        let x = |s: &str| s.parse::<Expr>().unwrap().eval(&e);
        assert_eq!(x("1 - 2 - 3"), -4.0);
        assert_eq!(x("8 / 4 / 2"), 1.0);
        assert_eq!(x("-2^2"), -4.0);
        assert_eq!(x("2^-1"), 0.5);
        assert_eq!(x("max(1, 3, 2) - min(4, -1)"), 4.0);
        assert_eq!(x("k1*k2"), -0.5);
    }

    #[test]
    fn entry_condition() {
        let c: Condition = "a11*a21 + a23*a31 > 0".parse().unwrap();
        let fails = env([[1.0, 1.0, 0.0], [-1.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        assert!(!c.holds(&fails));
        assert_eq!(c.slack(&fails), 0.0);
        let holds = env([[1.0, 1.0, 0.0], [-1.0, 0.0, 10.0], [10.0, 0.0, 0.0]]);
        assert!(c.holds(&holds));
        assert!(c.slack(&holds) > 0.0);
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "max(-(a12*a31)/a32, -a11 - a21*a32/a31) < -a11 - a23*a31/a21",
            "a23*a31^2 < a21^2*a32 && a21*a31^2 < a21*a32^2",
            "a11 - (a22 - a33) >= 0.5",
        ] {
            let c: Condition = s.parse().unwrap();
            let again: Condition = c.to_string().parse().unwrap();
            assert_eq!(c, again, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["a1 > 0", "b12 < 1", "a11 <", "a11 > 0 &&", "(a11 > 0", "a11 $ 0"] {
            assert!(s.parse::<Condition>().is_err(), "{s}");
        }
        assert!("a11 < 0".parse::<Expr>().is_err());
    }
}
