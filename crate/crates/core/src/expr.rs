//! Expression trees, symbolic differentiation and compiled interval evaluators.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::interval::{Interval, IntervalError};

/// Constant as written in the source: a decimal numeral or an `lo..hi` literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constant(pub String);

impl Constant {
    pub fn int(v: i64) -> Self {
        Constant(v.to_string())
    }

    /// Exact interval for an arbitrary enclosure (written as `lo..hi`).
    pub fn enclosure(iv: Interval) -> Self {
        if iv.is_point() {
            Constant(crate::interval::exact_decimal(iv.lo()))
        } else {
            Constant(format!(
                "{}..{}",
                crate::interval::exact_decimal(iv.lo()),
                crate::interval::exact_decimal(iv.hi())
            ))
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        let s = self.0.as_str();
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }

    pub fn is_literal_interval(&self) -> bool {
        self.0.contains("..")
    }

    pub fn interval(&self) -> Result<Interval, IntervalError> {
        Interval::parse_literal(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Constant),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    /// `atan(num / den)`.
    Atan(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared variable x{index} at offset {offset} (arity {arity})")]
    UndeclaredVariable {
        index: usize,
        offset: usize,
        arity: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("expression depth {depth} exceeds the limit {limit}")]
    TooDeep { depth: usize, limit: usize },
    #[error("variable x{index} out of range for arity {arity}")]
    Arity { index: usize, arity: usize },
    #[error("bad constant `{text}`: {source}")]
    Constant { text: String, source: IntervalError },
}

/// Evaluation failure on a box (division by an interval containing zero, ...).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation failed: {0}")]
pub struct EvalError(pub String);

impl From<IntervalError> for EvalError {
    fn from(e: IntervalError) -> Self {
        EvalError(e.to_string())
    }
}

// Smart constructors ----------------------------------------------------------

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Const(Constant::int(v))
    }

    pub fn constant(text: impl Into<String>) -> Expr {
        Expr::Const(Constant(text.into()))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_int(&self) -> Option<i64> {
        match self {
            Expr::Const(c) => c.as_int(),
            _ => None,
        }
    }

    fn is_int(&self, v: i64) -> bool {
        self.as_int() == Some(v)
    }

    pub fn neg(a: Expr) -> Expr {
        match a.as_int().and_then(i64::checked_neg) {
            Some(v) => Expr::int(v),
            None => match a {
                Expr::Neg(inner) => *inner,
                a => Expr::Neg(Box::new(a)),
            },
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
            if let Some(v) = x.checked_add(y) {
                return Expr::int(v);
            }
        }
        if a.is_int(0) {
            return b;
        }
        if b.is_int(0) {
            return a;
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
            if let Some(v) = x.checked_sub(y) {
                return Expr::int(v);
            }
        }
        if b.is_int(0) {
            return a;
        }
        if a.is_int(0) {
            return Expr::neg(b);
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
            if let Some(v) = x.checked_mul(y) {
                return Expr::int(v);
            }
        }
        if a.is_int(0) || b.is_int(0) {
            return Expr::int(0);
        }
        if a.is_int(1) {
            return b;
        }
        if b.is_int(1) {
            return a;
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_int(1) {
            return a;
        }
        if a.is_int(0) && b.as_int().is_some_and(|v| v != 0) {
            return Expr::int(0);
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match k {
            0 => Expr::int(1),
            1 => a,
            _ => {
                if let Some(x) = a.as_int() {
                    if k > 0 {
                        if let Some(v) = x.checked_pow(k as u32) {
                            return Expr::int(v);
                        }
                    }
                }
                Expr::Pow(Box::new(a), k)
            }
        }
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(Box::new(a))
    }

    pub fn atan(num: Expr, den: Expr) -> Expr {
        Expr::Atan(Box::new(num), Box::new(den))
    }

    /// Sum of terms (0 when empty).
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        terms.into_iter().fold(Expr::int(0), Expr::add)
    }
}

// Structure ------------------------------------------------------------------

impl Expr {
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Atan(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// One more than the largest variable index used (0 for constants).
    pub fn min_arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => a.min_arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Atan(a, b) => {
                a.min_arity().max(b.min_arity())
            }
        }
    }

    /// Replaces every variable `xi` by `map[i]`.
    pub fn substitute(&self, map: &[Expr]) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(i) => map[*i].clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(map))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(map)), *k),
            Expr::Sqrt(a) => Expr::Sqrt(Box::new(a.substitute(map))),
            Expr::Atan(a, b) => Expr::Atan(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
        }
    }

    /// Symbolic partial derivative with respect to `xi`.
    pub fn differentiate(&self, i: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::int(0),
            Expr::Var(j) => Expr::int(if *j == i { 1 } else { 0 }),
            Expr::Neg(a) => Expr::neg(a.differentiate(i)),
            Expr::Add(a, b) => Expr::add(a.differentiate(i), b.differentiate(i)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(i), b.differentiate(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(i), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate(i)),
            ),
            Expr::Div(a, b) => {
                let da = a.differentiate(i);
                let db = b.differentiate(i);
                if db.is_int(0) {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                    Expr::pow((**b).clone(), 2),
                )
            }
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::int(*k as i64), Expr::pow((**a).clone(), k - 1)),
                a.differentiate(i),
            ),
            Expr::Sqrt(a) => Expr::div(
                a.differentiate(i),
                Expr::mul(Expr::int(2), Expr::sqrt((**a).clone())),
            ),
            Expr::Atan(a, b) => {
                let num = Expr::sub(
                    Expr::mul(a.differentiate(i), (**b).clone()),
                    Expr::mul(b.differentiate(i), (**a).clone()),
                );
                if num.is_int(0) {
                    return num;
                }
                Expr::div(
                    num,
                    Expr::add(Expr::pow((**b).clone(), 2), Expr::pow((**a).clone(), 2)),
                )
            }
        }
    }

    /// Plain floating-point evaluation; no rigor, used for sampling.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => c.interval().map(|v| v.mid()).unwrap_or(f64::NAN),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Div(a, b) => a.eval_f64(x) / b.eval_f64(x),
            Expr::Pow(a, k) => a.eval_f64(x).powi(*k),
            Expr::Sqrt(a) => a.eval_f64(x).sqrt(),
            Expr::Atan(a, b) => (a.eval_f64(x) / b.eval_f64(x)).atan(),
        }
    }
}

// Parsing --------------------------------------------------------------------

const MAX_NESTING: usize = 256;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    arity: usize,
    nesting: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return self.err("nesting too deep");
        }
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.nesting -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                let text = self.number_text()?;
                return Ok(Expr::constant(format!("-{text}")));
            }
            self.nesting += 1;
            if self.nesting > MAX_NESTING {
                return self.err("nesting too deep");
            }
            let inner = self.unary()?;
            self.nesting -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn number_text(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let b = rest.as_bytes();
        let mut i = 0;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            // Stop before `..` so interval literals split correctly.
            if b[i] == b'.' && i + 1 < b.len() && b[i + 1] == b'.' {
                break;
            }
            i += 1;
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            if j < b.len() && b[j].is_ascii_digit() {
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &rest[..i];
        if Interval::from_decimal_string(text).is_err() {
            return self.err(format!("malformed number `{text}`"));
        }
        self.pos += i;
        Ok(text.to_string())
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let n = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        self.pos += n;
        &rest[..n]
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat('-');
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let n = rest.bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            self.pos = start;
            return self.err("expected an integer exponent");
        }
        let v: i32 = match rest[..n].parse() {
            Ok(v) => v,
            Err(_) => return self.err("exponent out of range"),
        };
        self.pos += n;
        Ok(if neg { -v } else { v })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let lo = self.signed_number()?;
                self.skip_ws();
                if !self.src[self.pos..].starts_with("..") {
                    return self.err("expected `..` in interval literal");
                }
                self.pos += 2;
                let hi = self.signed_number()?;
                self.expect(']')?;
                let text = format!("{lo}..{hi}");
                if Interval::parse_literal(&text).is_err() {
                    return self.err("empty interval literal");
                }
                Ok(Expr::constant(text))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Const(Constant(self.number_text()?))),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                if let Some(idx) = name.strip_prefix('x') {
                    if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) {
                        let index: usize = match idx.parse() {
                            Ok(v) => v,
                            Err(_) => {
                                self.pos = start;
                                return self.err("variable index out of range");
                            }
                        };
                        if index >= self.arity {
                            return Err(ParseError::UndeclaredVariable {
                                index,
                                offset: start,
                                arity: self.arity,
                            });
                        }
                        return Ok(Expr::Var(index));
                    }
                }
                match name {
                    "sqrt" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Sqrt(Box::new(a)))
                    }
                    "atan" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Atan(Box::new(a), Box::new(b)))
                    }
                    "pow" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let k = self.integer()?;
                        self.expect(')')?;
                        Ok(Expr::Pow(Box::new(a), k))
                    }
                    _ => {
                        self.pos = start;
                        self.err(format!("unknown identifier `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected character `{c}`")),
        }
    }

    fn signed_number(&mut self) -> Result<String, ParseError> {
        let neg = self.eat('-');
        let t = self.number_text()?;
        Ok(if neg { format!("-{t}") } else { t })
    }
}

impl Expr {
    /// Parses expression text over variables `x0..x{arity-1}`.
    pub fn parse(text: &str, arity: usize) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: text,
            pos: 0,
            arity,
            nesting: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return p.err("unexpected trailing input");
        }
        Ok(e)
    }
}

// Display --------------------------------------------------------------------

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if c.0.starts_with('-') && !c.is_literal_interval() => 3,
        _ => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_literal_interval() => {
                let (lo, hi) = c.0.split_once("..").unwrap();
                write!(f, "[{lo}..{hi}]")
            }
            Expr::Const(c) if c.0.starts_with('-') => write!(f, "({})", c.0),
            Expr::Const(c) => write!(f, "{}", c.0),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) if matches!(**a, Expr::Const(_)) => write!(f, "-({a})"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, k) => write!(f, "pow({a}, {k})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Atan(a, b) => write!(f, "atan({a}, {b})"),
        }
    }
}

// Compiled evaluator ---------------------------------------------------------

/// Interval value together with an interval gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorGerm {
    pub f: Interval,
    pub df: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Op {
    Const(u64, u64),
    Var(usize),
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, i32),
    Sqrt(usize),
    Atan(usize, usize),
}

/// Default bound on expression depth accepted by [`Evaluator::compile`].
pub const DEFAULT_DEPTH_LIMIT: usize = 200;

#[derive(Debug, Default)]
struct TapeBuilder {
    ops: Vec<Op>,
    index: HashMap<Op, usize>,
}

impl TapeBuilder {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.index.get(&op) {
            return i;
        }
        let i = self.ops.len();
        self.ops.push(op.clone());
        self.index.insert(op, i);
        i
    }

    fn insert(&mut self, e: &Expr, arity: usize) -> Result<usize, CompileError> {
        let op = match e {
            Expr::Const(c) => {
                let v = c.interval().map_err(|source| CompileError::Constant {
                    text: c.0.clone(),
                    source,
                })?;
                Op::Const(v.lo().to_bits(), v.hi().to_bits())
            }
            Expr::Var(i) => {
                if *i >= arity {
                    return Err(CompileError::Arity { index: *i, arity });
                }
                Op::Var(*i)
            }
            Expr::Neg(a) => Op::Neg(self.insert(a, arity)?),
            Expr::Add(a, b) => Op::Add(self.insert(a, arity)?, self.insert(b, arity)?),
            Expr::Sub(a, b) => Op::Sub(self.insert(a, arity)?, self.insert(b, arity)?),
            Expr::Mul(a, b) => Op::Mul(self.insert(a, arity)?, self.insert(b, arity)?),
            Expr::Div(a, b) => Op::Div(self.insert(a, arity)?, self.insert(b, arity)?),
            Expr::Pow(a, k) => Op::Pow(self.insert(a, arity)?, *k),
            Expr::Sqrt(a) => Op::Sqrt(self.insert(a, arity)?),
            Expr::Atan(a, b) => Op::Atan(self.insert(a, arity)?, self.insert(b, arity)?),
        };
        Ok(self.push(op))
    }
}

/// Evaluation plan for a function, its gradient and its Hessian.
///
/// Expressions are hash-consed into one instruction tape; the value root is
/// inserted first, so evaluating the value touches only a prefix of the tape.
#[derive(Debug, Clone)]
pub struct Evaluator {
    arity: usize,
    expr: Arc<Expr>,
    ops: Arc<Vec<Op>>,
    value_root: usize,
    grad_roots: Vec<usize>,
    /// Lower triangle, row-major: (i, j) with j <= i.
    hess_roots: Vec<usize>,
}

fn sqrt_strict(a: Interval) -> Result<Interval, EvalError> {
    let (r, clamped) = a.sqrt_flagged()?;
    if clamped {
        return Err(EvalError(format!("sqrt of interval {a} reaching below 0")));
    }
    Ok(r)
}

fn atan_quotient(a: Interval, b: Interval) -> Result<Interval, EvalError> {
    Ok(a.div(&b)?.atan()?)
}

impl Evaluator {
    pub fn compile(expr: &Expr, arity: usize) -> Result<Self, CompileError> {
        Self::compile_with_limit(expr, arity, DEFAULT_DEPTH_LIMIT)
    }

    pub fn compile_with_limit(expr: &Expr, arity: usize, limit: usize) -> Result<Self, CompileError> {
        let depth = expr.depth();
        if depth > limit {
            return Err(CompileError::TooDeep { depth, limit });
        }
        let mut b = TapeBuilder::default();
        let value_root = b.insert(expr, arity)?;
        let grads: Vec<Expr> = (0..arity).map(|i| expr.differentiate(i)).collect();
        let grad_roots = grads
            .iter()
            .map(|g| b.insert(g, arity))
            .collect::<Result<Vec<_>, _>>()?;
        let mut hess_roots = Vec::with_capacity(arity * (arity + 1) / 2);
        for (i, g) in grads.iter().enumerate() {
            for j in 0..=i {
                hess_roots.push(b.insert(&g.differentiate(j), arity)?);
            }
        }
        Ok(Evaluator {
            arity,
            expr: Arc::new(expr.clone()),
            ops: Arc::new(b.ops),
            value_root,
            grad_roots,
            hess_roots,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn tape_len(&self) -> usize {
        self.ops.len()
    }

    fn check_box(&self, x: &[Interval]) -> Result<(), EvalError> {
        if x.len() != self.arity {
            return Err(EvalError(format!(
                "box has {} components, evaluator arity is {}",
                x.len(),
                self.arity
            )));
        }
        Ok(())
    }

    /// Evaluates tape entries `0..=last`; each slot holds its own result.
    fn run(&self, x: &[Interval], last: usize) -> Vec<Result<Interval, EvalError>> {
        let mut vals: Vec<Result<Interval, EvalError>> = Vec::with_capacity(last + 1);
        for op in &self.ops[..=last] {
            let get = |i: usize| vals[i].clone();
            let r = (|| -> Result<Interval, EvalError> {
                Ok(match *op {
                    Op::Const(lo, hi) => Interval::new(f64::from_bits(lo), f64::from_bits(hi))?,
                    Op::Var(i) => x[i],
                    Op::Neg(a) => get(a)?.neg(),
                    Op::Add(a, b) => get(a)?.add(&get(b)?)?,
                    Op::Sub(a, b) => get(a)?.sub(&get(b)?)?,
                    Op::Mul(a, b) => {
                        if a == b {
                            get(a)?.sqr()?
                        } else {
                            get(a)?.mul(&get(b)?)?
                        }
                    }
                    Op::Div(a, b) => get(a)?.div(&get(b)?)?,
                    Op::Pow(a, k) => get(a)?.powi(k)?,
                    Op::Sqrt(a) => sqrt_strict(get(a)?)?,
                    Op::Atan(a, b) => atan_quotient(get(a)?, get(b)?)?,
                })
            })();
            vals.push(r);
        }
        vals
    }

    /// Interval enclosure of the function over the box `x`.
    pub fn value(&self, x: &[Interval]) -> Result<Interval, EvalError> {
        self.check_box(x)?;
        self.run(x, self.value_root)[self.value_root].clone()
    }

    /// Interval gradient from the symbolic partial derivatives.
    pub fn gradient(&self, x: &[Interval]) -> Result<Vec<Interval>, EvalError> {
        self.check_box(x)?;
        let last = self.grad_roots.iter().copied().max().unwrap_or(0).max(self.value_root);
        let vals = self.run(x, last);
        self.grad_roots.iter().map(|&r| vals[r].clone()).collect()
    }

    /// Forward-mode value and gradient over the box.
    pub fn germ(&self, x: &[Interval]) -> Result<TaylorGerm, EvalError> {
        self.check_box(x)?;
        let n = self.arity;
        let zero = vec![Interval::ZERO; n];
        let mut fs: Vec<Interval> = Vec::with_capacity(self.value_root + 1);
        let mut ds: Vec<Vec<Interval>> = Vec::with_capacity(self.value_root + 1);
        for op in &self.ops[..=self.value_root] {
            let (f, d) = match *op {
                Op::Const(lo, hi) => (Interval::new(f64::from_bits(lo), f64::from_bits(hi))?, zero.clone()),
                Op::Var(i) => {
                    let mut d = zero.clone();
                    d[i] = Interval::ONE;
                    (x[i], d)
                }
                Op::Neg(a) => (fs[a].neg(), ds[a].iter().map(Interval::neg).collect()),
                Op::Add(a, b) => (
                    fs[a].add(&fs[b])?,
                    ds[a].iter().zip(&ds[b]).map(|(p, q)| p.add(q)).collect::<Result<_, _>>()?,
                ),
                Op::Sub(a, b) => (
                    fs[a].sub(&fs[b])?,
                    ds[a].iter().zip(&ds[b]).map(|(p, q)| p.sub(q)).collect::<Result<_, _>>()?,
                ),
                Op::Mul(a, b) => {
                    let f = if a == b { fs[a].sqr()? } else { fs[a].mul(&fs[b])? };
                    let d = ds[a]
                        .iter()
                        .zip(&ds[b])
                        .map(|(da, db)| da.mul(&fs[b])?.add(&fs[a].mul(db)?))
                        .collect::<Result<_, _>>()?;
                    (f, d)
                }
                Op::Div(a, b) => {
                    let f = fs[a].div(&fs[b])?;
                    let d = ds[a]
                        .iter()
                        .zip(&ds[b])
                        .map(|(da, db)| da.sub(&f.mul(db)?)?.div(&fs[b]))
                        .collect::<Result<_, _>>()?;
                    (f, d)
                }
                Op::Pow(a, k) => {
                    let f = fs[a].powi(k)?;
                    let slope = fs[a].powi(k - 1)?.scale(k as f64)?;
                    let d = ds[a].iter().map(|da| slope.mul(da)).collect::<Result<_, _>>()?;
                    (f, d)
                }
                Op::Sqrt(a) => {
                    let f = sqrt_strict(fs[a])?;
                    let twice = f.scale(2.0)?;
                    let d = ds[a].iter().map(|da| da.div(&twice)).collect::<Result<_, _>>()?;
                    (f, d)
                }
                Op::Atan(a, b) => {
                    let f = atan_quotient(fs[a], fs[b])?;
                    let rden = fs[a].sqr()?.add(&fs[b].sqr()?)?.recip()?;
                    let d = ds[a]
                        .iter()
                        .zip(&ds[b])
                        .map(|(da, db)| rden.mul(&da.mul(&fs[b])?.sub(&db.mul(&fs[a])?)?))
                        .collect::<Result<_, _>>()?;
                    (f, d)
                }
            };
            fs.push(f);
            ds.push(d);
        }
        Ok(TaylorGerm {
            f: fs[self.value_root],
            df: ds.swap_remove(self.value_root),
        })
    }

    /// Full symmetric interval Hessian over the box.
    pub fn hessian(&self, x: &[Interval]) -> Result<Vec<Vec<Interval>>, EvalError> {
        self.check_box(x)?;
        let n = self.arity;
        if n == 0 {
            return Ok(Vec::new());
        }
        let last = self.hess_roots.iter().copied().max().unwrap_or(0);
        let vals = self.run(x, last.max(self.value_root));
        let mut h = vec![vec![Interval::ZERO; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                let v = vals[self.hess_roots[k]].clone()?;
                h[i][j] = v;
                h[j][i] = v;
                k += 1;
            }
        }
        Ok(h)
    }

    /// Human-readable listing of the evaluation plan.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "# arity {}", self.arity);
        let _ = writeln!(out, "# expr {}", self.expr);
        for (i, op) in self.ops.iter().enumerate() {
            let text = match op {
                Op::Const(lo, hi) => {
                    let iv = Interval::new(f64::from_bits(*lo), f64::from_bits(*hi)).expect("valid");
                    format!("const {iv}")
                }
                Op::Var(v) => format!("var x{v}"),
                Op::Neg(a) => format!("neg %{a}"),
                Op::Add(a, b) => format!("add %{a} %{b}"),
                Op::Sub(a, b) => format!("sub %{a} %{b}"),
                Op::Mul(a, b) => format!("mul %{a} %{b}"),
                Op::Div(a, b) => format!("div %{a} %{b}"),
                Op::Pow(a, k) => format!("pow %{a} {k}"),
                Op::Sqrt(a) => format!("sqrt %{a}"),
                Op::Atan(a, b) => format!("atan %{a} %{b}"),
            };
            let _ = writeln!(out, "%{i} = {text}");
        }
        let _ = writeln!(out, "value %{}", self.value_root);
        for (i, r) in self.grad_roots.iter().enumerate() {
            let _ = writeln!(out, "grad {i} %{r}");
        }
        let mut k = 0;
        for i in 0..self.arity {
            for j in 0..=i {
                let _ = writeln!(out, "hess {i} {j} %{}", self.hess_roots[k]);
                k += 1;
            }
        }
        out
    }
}
