//! Outward-rounded interval arithmetic over binary64.
//!
//! Every operation computes in the default round-to-nearest mode and then
//! moves each endpoint outward when the nearest result is not exact. Exactness
//! is decided with error-free transformations (TwoSum, fused multiply-add
//! residuals); outside the range where those are exact the endpoint is moved
//! unconditionally by one step. No rounding-mode register is ever touched, so
//! intervals are plain `Copy` values usable from any thread.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

/// Magnitudes inside `[TINY, HUGE]` keep FMA residuals exact.
const TINY: f64 = 1.0e-270;
const HUGE: f64 = 1.0e270;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero ({0})")]
    DivisionByZeroInterval(Interval),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot parse `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("intersection is empty")]
    EmptyIntersection,
    #[error("arithmetic on an unbounded interval ({0})")]
    Unbounded(Interval),
    #[error("invalid endpoints [{0}, {1}]")]
    InvalidEndpoints(f64, f64),
}

pub type Result<T> = std::result::Result<T, IntervalError>;

/// A closed interval `[lo, hi]` of reals with binary64 endpoints.
///
/// `lo <= hi` always holds and neither endpoint is NaN. Infinite endpoints
/// are accepted for bound bookkeeping, but arithmetic on them is refused.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

// Directed scalar operations -------------------------------------------------

fn in_exact_range(x: f64) -> bool {
    let a = x.abs();
    (TINY..=HUGE).contains(&a)
}

/// Round-to-nearest sum and its exact error (TwoSum).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn down_from(r: f64, err_sign: Ordering) -> f64 {
    if err_sign == Ordering::Less {
        r.next_down()
    } else {
        r
    }
}

fn up_from(r: f64, err_sign: Ordering) -> f64 {
    if err_sign == Ordering::Greater {
        r.next_up()
    } else {
        r
    }
}

fn overflow_down(r: f64) -> f64 {
    if r == f64::INFINITY {
        f64::MAX
    } else {
        r
    }
}

fn overflow_up(r: f64) -> f64 {
    if r == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        r
    }
}

pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return overflow_down(s);
    }
    down_from(s, e.partial_cmp(&0.0).unwrap_or(Ordering::Less))
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return overflow_up(s);
    }
    up_from(s, e.partial_cmp(&0.0).unwrap_or(Ordering::Greater))
}

/// Sign of `exact(a*b) - fl(a*b)`, or `None` when it cannot be decided exactly.
fn mul_residual(a: f64, b: f64, p: f64) -> Option<Ordering> {
    if a == 0.0 || b == 0.0 {
        return Some(Ordering::Equal);
    }
    if !in_exact_range(p) || !in_exact_range(a) || !in_exact_range(b) {
        return None;
    }
    a.mul_add(b, -p).partial_cmp(&0.0)
}

pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return overflow_down(p);
    }
    match mul_residual(a, b, p) {
        Some(ord) => down_from(p, ord),
        None => p.next_down(),
    }
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return overflow_up(p);
    }
    match mul_residual(a, b, p) {
        Some(ord) => up_from(p, ord),
        None => p.next_up(),
    }
}

/// Sign of `exact(a/b) - fl(a/b)`.
fn div_residual(a: f64, b: f64, q: f64) -> Option<Ordering> {
    if a == 0.0 {
        return Some(Ordering::Equal);
    }
    if !in_exact_range(q) || !in_exact_range(a) || !in_exact_range(b) {
        return None;
    }
    // a - q*b is exactly representable here; its sign times sign(b) is the
    // sign of the quotient error.
    let r = (-q).mul_add(b, a);
    let ord = r.partial_cmp(&0.0)?;
    Some(if b < 0.0 { ord.reverse() } else { ord })
}

pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_down(q);
    }
    match div_residual(a, b, q) {
        Some(ord) => down_from(q, ord),
        None => q.next_down(),
    }
}

pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_up(q);
    }
    match div_residual(a, b, q) {
        Some(ord) => up_from(q, ord),
        None => q.next_up(),
    }
}

fn sqrt_residual(x: f64, s: f64) -> Option<Ordering> {
    if x == 0.0 {
        return Some(Ordering::Equal);
    }
    if !in_exact_range(x) {
        return None;
    }
    (-s).mul_add(s, x).partial_cmp(&0.0)
}

pub(crate) fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s == f64::INFINITY {
        return f64::MAX;
    }
    match sqrt_residual(x, s) {
        Some(ord) => down_from(s, ord).max(0.0),
        None => s.next_down().max(0.0),
    }
}

pub(crate) fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s == f64::INFINITY {
        return s;
    }
    match sqrt_residual(x, s) {
        Some(ord) => up_from(s, ord),
        None => s.next_up(),
    }
}

/// `x^k` for `x >= 0`, rounded down.
fn pow_nonneg_down(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| mul_down(acc, x)).max(0.0)
}

fn pow_nonneg_up(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| mul_up(acc, x))
}

// Upper enclosure of atan on a scalar: the platform atan is accurate to
// about one ulp, so two steps outward cover it.
fn atan_up(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let r = x.atan().next_up().next_up();
    r.min(std::f64::consts::FRAC_PI_2.next_up())
}

fn atan_down(x: f64) -> f64 {
    -atan_up(-x)
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        // Debug formatting is the shortest representation that round-trips.
        format!("{x:?}")
    }
}

/// Shortest round-trip decimal text of a binary64 value (`inf` spelled out).
pub fn format_f64(x: f64) -> String {
    fmt_endpoint(x)
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`, rejecting NaN and reversed endpoints.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidEndpoints(lo, hi));
        }
        // Normalise signed zeros so equality is purely numeric.
        Ok(Self {
            lo: lo + 0.0,
            hi: hi + 0.0,
        })
    }

    /// The degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// Panics if `x` is NaN or infinite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval needs a finite value, got {x}");
        Self { lo: x + 0.0, hi: x + 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Width rounded upward.
    pub fn width_up(&self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// A representable point inside the interval (not a rigorous quantity).
    pub fn mid(&self) -> f64 {
        let m = if self.lo.abs() > 1e300 || self.hi.abs() > 1e300 {
            0.5 * self.lo + 0.5 * self.hi
        } else {
            0.5 * (self.lo + self.hi)
        };
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// True when `other` is a subset of `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            return Err(IntervalError::EmptyIntersection);
        }
        Ok(Interval { lo, hi })
    }

    /// Certainly less than: every element of `self` is below every element of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    fn bounded(self) -> Result<Self> {
        if self.is_bounded() {
            Ok(self)
        } else {
            Err(IntervalError::Unbounded(self))
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi + 0.0,
            hi: -self.lo + 0.0,
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn add(&self, other: &Interval) -> Result<Interval> {
        let (a, b) = (self.bounded()?, other.bounded()?);
        Ok(Interval {
            lo: add_down(a.lo, b.lo),
            hi: add_up(a.hi, b.hi),
        })
    }

    pub fn sub(&self, other: &Interval) -> Result<Interval> {
        let (a, b) = (self.bounded()?, other.bounded()?);
        Ok(Interval {
            lo: add_down(a.lo, -b.hi),
            hi: add_up(a.hi, -b.lo),
        })
    }

    pub fn mul(&self, other: &Interval) -> Result<Interval> {
        let (a, b) = (self.bounded()?, other.bounded()?);
        let pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let lo = pairs
            .iter()
            .map(|&(x, y)| mul_down(x, y))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(x, y)| mul_up(x, y))
            .fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        let (a, b) = (self.bounded()?, other.bounded()?);
        if b.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval(b));
        }
        let pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let lo = pairs
            .iter()
            .map(|&(x, y)| div_down(x, y))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(x, y)| div_up(x, y))
            .fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    pub fn recip(&self) -> Result<Interval> {
        Interval::ONE.div(self)
    }

    /// Scales by an exact binary64 factor.
    pub fn scale(&self, k: f64) -> Result<Interval> {
        self.mul(&Interval::point(k))
    }

    /// `self^2`, tight when the interval straddles zero.
    pub fn sqr(&self) -> Result<Interval> {
        self.powi(2)
    }

    /// Integer power. Negative exponents require `0 ∉ self`.
    pub fn powi(&self, k: i32) -> Result<Interval> {
        let a = self.bounded()?;
        if k == 0 {
            return Ok(Interval::ONE);
        }
        if k < 0 {
            if a.contains_zero() {
                return Err(IntervalError::DivisionByZeroInterval(a));
            }
            let p = a.powi(-k)?;
            // When the power overflows or underflows, invert first instead.
            return if p.is_bounded() && !p.contains_zero() {
                p.recip()
            } else {
                a.recip()?.powi(-k)
            };
        }
        let n = k as u32;
        if n.is_multiple_of(2) {
            let (m, big) = (a.mig(), a.mag());
            Interval::new(pow_nonneg_down(m, n), pow_nonneg_up(big, n))
        } else {
            let lo = if a.lo >= 0.0 {
                pow_nonneg_down(a.lo, n)
            } else {
                -pow_nonneg_up(-a.lo, n)
            };
            let hi = if a.hi >= 0.0 {
                pow_nonneg_up(a.hi, n)
            } else {
                -pow_nonneg_down(-a.hi, n)
            };
            Interval::new(lo, hi)
        }
    }

    /// Square root of the nonnegative part; see [`Interval::sqrt_flagged`].
    pub fn sqrt(&self) -> Result<Interval> {
        self.sqrt_flagged().map(|(r, _)| r)
    }

    /// Square root returning whether a negative lower endpoint was clamped to 0.
    pub fn sqrt_flagged(&self) -> Result<(Interval, bool)> {
        let a = self.bounded()?;
        if a.hi < 0.0 {
            return Err(IntervalError::Domain(format!("sqrt of negative interval {a}")));
        }
        let clamped = a.lo < 0.0;
        let lo = if clamped { 0.0 } else { sqrt_down(a.lo) };
        Ok((
            Interval {
                lo,
                hi: sqrt_up(a.hi),
            },
            clamped,
        ))
    }

    /// Arctangent, using monotonicity: only the endpoints are evaluated.
    pub fn atan(&self) -> Result<Interval> {
        let a = self.bounded()?;
        Interval::new(atan_down(a.lo), atan_up(a.hi))
    }

    /// Maximum of two intervals (pointwise max of the sets).
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Parses a decimal numeral into a tight enclosure of its exact value.
    ///
    /// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`. The nearest binary64
    /// value is obtained with the (software, correctly rounded) standard
    /// parser and then compared exactly against the decimal using big
    /// integers, so the result contains the decimal and has width at most one
    /// ulp (zero when the decimal is representable).
    pub fn from_decimal_string(text: &str) -> Result<Interval> {
        let s = text.trim();
        let dec = DecimalLiteral::parse(s).map_err(|reason| IntervalError::Parse {
            text: text.to_string(),
            reason,
        })?;
        if dec.digits.is_zero() {
            return Ok(Interval::ZERO);
        }
        let nearest: f64 = s.parse().map_err(|e| IntervalError::Parse {
            text: text.to_string(),
            reason: format!("{e}"),
        })?;
        if !nearest.is_finite() {
            return Err(IntervalError::Parse {
                text: text.to_string(),
                reason: "magnitude exceeds the binary64 range".into(),
            });
        }
        let neg = dec.negative;
        if nearest == 0.0 {
            // Underflow: the value is strictly between 0 and the smallest subnormal.
            let tiny = f64::from_bits(1);
            return Ok(if neg {
                Interval { lo: -tiny, hi: 0.0 }
            } else {
                Interval { lo: 0.0, hi: tiny }
            });
        }
        match compare_f64_with_decimal(nearest.abs(), &dec) {
            Ordering::Equal => Ok(Interval::point(nearest)),
            Ordering::Less => {
                // |nearest| < |exact|
                if neg {
                    Ok(Interval { lo: nearest.next_down(), hi: nearest })
                } else {
                    Ok(Interval { lo: nearest, hi: nearest.next_up() })
                }
            }
            Ordering::Greater => {
                if neg {
                    Ok(Interval { lo: nearest, hi: nearest.next_up() })
                } else {
                    Ok(Interval { lo: nearest.next_down(), hi: nearest })
                }
            }
        }
    }

    /// Parses either a bare decimal (tight enclosure) or an explicit `lo..hi`.
    pub fn parse_literal(text: &str) -> Result<Interval> {
        let s = text.trim();
        match s.split_once("..") {
            Some((a, b)) => {
                let lo = parse_endpoint(a, text)?;
                let hi = parse_endpoint(b, text)?;
                let lo = if lo.0 { lo.1 } else { Interval::from_decimal_string(a)?.lo };
                let hi = if hi.0 { hi.1 } else { Interval::from_decimal_string(b)?.hi };
                Interval::new(lo, hi).map_err(|_| IntervalError::Parse {
                    text: text.to_string(),
                    reason: "lower endpoint exceeds upper endpoint".into(),
                })
            }
            None => Interval::from_decimal_string(s),
        }
    }

    /// Parses a scalar bound: a decimal or `inf`/`+inf`/`-inf`. Returns the
    /// enclosure for decimals and a degenerate infinite interval otherwise.
    pub fn parse_bound(text: &str) -> Result<Interval> {
        match text.trim() {
            "inf" | "+inf" => Ok(Interval {
                lo: f64::MAX,
                hi: f64::INFINITY,
            }),
            "-inf" => Ok(Interval {
                lo: f64::NEG_INFINITY,
                hi: -f64::MAX,
            }),
            other => Interval::parse_literal(other),
        }
    }
}

/// Returns `(is_infinite_keyword, value)` for an explicit endpoint.
fn parse_endpoint(s: &str, whole: &str) -> Result<(bool, f64)> {
    match s.trim() {
        "inf" | "+inf" => Ok((true, f64::INFINITY)),
        "-inf" => Ok((true, f64::NEG_INFINITY)),
        "" => Err(IntervalError::Parse {
            text: whole.to_string(),
            reason: "missing endpoint".into(),
        }),
        _ => Ok((false, 0.0)),
    }
}

/// A decimal numeral as `(-1)^negative * digits * 10^exponent`.
#[derive(Debug)]
struct DecimalLiteral {
    negative: bool,
    digits: BigInt,
    exponent: i64,
}

impl DecimalLiteral {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        let bytes = s.as_bytes();
        let mut i = 0;
        let mut negative = false;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            negative = bytes[i] == b'-';
            i += 1;
        }
        let mut digits = String::new();
        let mut frac_len: i64 = 0;
        let mut seen_digit = false;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            seen_digit = true;
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                digits.push(bytes[i] as char);
                frac_len += 1;
                seen_digit = true;
                i += 1;
            }
        }
        if !seen_digit {
            return Err("expected a digit".into());
        }
        let mut exp: i64 = 0;
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            let mut eneg = false;
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                eneg = bytes[i] == b'-';
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err("expected exponent digits".into());
            }
            exp = s[start..i]
                .parse::<i64>()
                .map_err(|_| "exponent out of range".to_string())?;
            if eneg {
                exp = -exp;
            }
        }
        if i != bytes.len() {
            return Err(format!("unexpected character at offset {i}"));
        }
        let digits: BigInt = digits.parse().map_err(|_| "bad digits".to_string())?;
        Ok(DecimalLiteral {
            negative,
            digits,
            exponent: exp - frac_len,
        })
    }
}

/// Exact comparison of a positive finite binary64 with `|dec|`.
fn compare_f64_with_decimal(x: f64, dec: &DecimalLiteral) -> Ordering {
    let (mantissa, exp2) = decompose(x);
    // x = mantissa * 2^exp2, d = digits * 10^exponent.
    let mut lhs = BigInt::from(mantissa);
    let mut rhs = dec.digits.clone();
    if exp2 >= 0 {
        lhs <<= exp2 as usize;
    } else {
        rhs <<= (-exp2) as usize;
    }
    let ten = BigInt::from(10u32);
    if dec.exponent >= 0 {
        rhs *= num_traits::pow(ten, dec.exponent as usize);
    } else {
        lhs *= num_traits::pow(ten, (-dec.exponent) as usize);
    }
    lhs.cmp(&rhs)
}

/// Splits a positive finite double into `(mantissa, exponent)` with x = m * 2^e.
pub(crate) fn decompose(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

/// Exact decimal expansion of a finite binary64 value.
///
/// Unlike the shortest round-trip form, parsing this text with
/// [`Interval::from_decimal_string`] yields a degenerate interval.
pub fn exact_decimal(x: f64) -> String {
    assert!(x.is_finite());
    if x == 0.0 {
        return "0".into();
    }
    let (m, e) = decompose(x.abs());
    let sign = if x < 0.0 { "-" } else { "" };
    if e >= 0 {
        let v = BigInt::from(m) << (e as usize);
        return format!("{sign}{v}");
    }
    // m / 2^k = m * 5^k / 10^k
    let k = (-e) as usize;
    let v = BigInt::from(m) * num_traits::pow(BigInt::from(5u32), k);
    let mut digits = v.to_string();
    if digits.len() <= k {
        digits = "0".repeat(k - digits.len() + 1) + &digits;
    }
    let split = digits.len() - k;
    let (int, frac) = digits.split_at(split);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", fmt_endpoint(self.lo), fmt_endpoint(self.hi))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self> {
        Interval::parse_bound(s)
    }
}

impl std::ops::Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval::neg(&self)
    }
}

/// Sum of interval terms; errors propagate.
pub fn sum<'a>(terms: impl IntoIterator<Item = &'a Interval>) -> Result<Interval> {
    terms
        .into_iter()
        .try_fold(Interval::ZERO, |acc, t| acc.add(t))
}

/// Dot product of an interval vector with a scalar vector.
pub fn dot_scalar(a: &[Interval], x: &[f64]) -> Result<Interval> {
    a.iter()
        .zip(x)
        .try_fold(Interval::ZERO, |acc, (ai, &xi)| acc.add(&ai.mul(&Interval::point(xi))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn exact_sums_stay_exact() {
        assert_eq!(iv(1.0, 2.0).add(&iv(3.0, 4.0)).unwrap(), iv(4.0, 6.0));
        let a = iv(-0.3, 7.25);
        assert_eq!(Interval::ZERO.add(&a).unwrap(), a);
    }

    #[test]
    fn inexact_sum_is_widened() {
        let a = Interval::point(0.1);
        let b = Interval::point(0.2);
        let s = a.add(&b).unwrap();
        assert!(s.lo() < s.hi());
        assert!(s.contains(0.1 + 0.2));
    }

    #[test]
    fn scalar_scaling_and_exact_division() {
        assert_eq!(iv(-1.0, 2.0).mul(&iv(3.0, 3.0)).unwrap(), iv(-3.0, 6.0));
        assert_eq!(iv(1.0, 1.0).div(&iv(2.0, 2.0)).unwrap(), iv(0.5, 0.5));
    }

    #[test]
    fn division_by_zero_interval() {
        let err = iv(1.0, 2.0).div(&iv(-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, IntervalError::DivisionByZeroInterval(_)));
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(iv(4.0, 4.0).sqrt().unwrap(), iv(2.0, 2.0));
        assert!(matches!(
            iv(-1.0, -0.5).sqrt().unwrap_err(),
            IntervalError::Domain(_)
        ));
        let (r, clamped) = iv(-1.0, 4.0).sqrt_flagged().unwrap();
        assert!(clamped);
        assert_eq!(r, iv(0.0, 2.0));
        let r8 = iv(8.0, 8.0).sqrt().unwrap();
        assert!(r8.contains(2.8284271247461903));
        assert!(r8.width() <= 2.0 * f64::EPSILON * 4.0);
    }

    #[test]
    fn atan_cases() {
        let q = iv(1.0, 1.0).atan().unwrap();
        assert!(q.contains(std::f64::consts::FRAC_PI_4));
        assert!(q.hi() - q.lo() <= 4.0 * f64::EPSILON);
        assert_eq!(iv(0.0, 0.0).atan().unwrap(), Interval::ZERO);
        let s = iv(-5.0, 5.0).atan().unwrap();
        assert_eq!(s.lo(), -s.hi());
    }

    #[test]
    fn powers() {
        assert_eq!(iv(-2.0, 1.0).sqr().unwrap(), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3).unwrap(), iv(-8.0, 1.0));
        assert_eq!(iv(2.0, 4.0).powi(-1).unwrap(), iv(0.25, 0.5));
        assert!(iv(-1.0, 1.0).powi(-2).is_err());
    }

    #[test]
    fn unbounded_arithmetic_is_refused() {
        let big = Interval::parse_bound("inf").unwrap();
        assert!(matches!(
            big.add(&Interval::ONE),
            Err(IntervalError::Unbounded(_))
        ));
        assert!(big.intersect(&iv(0.0, 1.0)).is_err());
        assert_eq!(
            Interval::new(0.0, f64::INFINITY)
                .unwrap()
                .intersect(&iv(1.0, 2.0))
                .unwrap(),
            iv(1.0, 2.0)
        );
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Interval::from_decimal_string("1").unwrap(), Interval::ONE);
        assert_eq!(Interval::from_decimal_string("-2.5e1").unwrap(), Interval::point(-25.0));
        let tenth = Interval::from_decimal_string("0.1").unwrap();
        assert_eq!(tenth.hi(), tenth.lo().next_up());
        let x = Interval::from_decimal_string("1.000000000000000000001").unwrap();
        assert_eq!(x.lo(), 1.0);
        assert!(x.hi() > 1.0);
        assert!(Interval::from_decimal_string("1.2.3").is_err());
        assert!(Interval::from_decimal_string("").is_err());
        assert!(Interval::from_decimal_string("1e999").is_err());
        let t = Interval::from_decimal_string("1e-400").unwrap();
        assert!(t.lo() == 0.0 && t.hi() > 0.0);
    }

    #[test]
    fn literals() {
        assert_eq!(Interval::parse_literal("0..2").unwrap(), iv(0.0, 2.0));
        let lit = Interval::parse_literal("0.1..0.2").unwrap();
        assert!(lit.lo() < 0.1 || lit.lo() == 0.1);
        assert!(Interval::parse_literal("2..1").is_err());
        let half = Interval::parse_literal("1..inf").unwrap();
        assert_eq!(half.hi(), f64::INFINITY);
    }

    #[test]
    fn exact_decimal_round_trip() {
        for x in [0.1, -3.75, 1e-300, 2f64.powi(80), 5e-324, 123456.789] {
            let text = exact_decimal(x);
            assert_eq!(Interval::from_decimal_string(&text).unwrap(), Interval::point(x));
        }
    }

    #[test]
    fn display_round_trips() {
        let a = iv(1e-300, 0.1);
        let b = Interval::parse_literal(&a.to_string()).unwrap();
        assert!(b.encloses(&a));
    }
}
