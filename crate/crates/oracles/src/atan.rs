//! Arctangent of a rational with rigorous rational bounds.
//!
//! Uses Euler's series
//!   atan(x) = Σ_n 2^{2n}(n!)^2/(2n+1)! · x^{2n+1}/(1+x^2)^{n+1}
//! whose terms are positive for x > 0 and shrink by at least x²/(1+x²) each
//! step, so the tail after a term t is at most t·(1+x²). Arguments above 1
//! are folded with atan(x) = π/2 − atan(1/x); π comes from Machin's formula.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rational lower and upper bounds.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Bounds {
    pub fn contains_in(&self, lo: f64, hi: f64) -> bool {
        crate::rational::encloses(lo, hi, &self.lo) && crate::rational::encloses(lo, hi, &self.hi)
    }

    fn neg(self) -> Bounds {
        Bounds {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

/// Working precision in bits beyond the leading bit of the result.
const PREC: u64 = 256;

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Bounds on atan(p/q) for 0 < p/q <= 1, as fixed-point numerators over 2^scale.
fn euler_series(p: &BigInt, q: &BigInt, scale: u64) -> (BigInt, BigInt) {
    let p2 = p * p;
    let s = &p2 + q * q;
    let unit = BigInt::one() << scale as usize;
    // t0 = p q / (p² + q²)
    let num0 = p * q * &unit;
    let mut t_lo = floor_div(&num0, &s);
    let mut t_hi = ceil_div(&num0, &s);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut n: u64 = 0;
    loop {
        sum_lo += &t_lo;
        sum_hi += &t_hi;
        // t_{n+1} = t_n (2n+2) p² / ((2n+3) s)
        let a = BigInt::from(2 * n + 2) * &p2;
        let b = BigInt::from(2 * n + 3) * &s;
        t_lo = floor_div(&(&t_lo * &a), &b);
        t_hi = ceil_div(&(&t_hi * &a), &b);
        n += 1;
        if t_hi <= BigInt::one() {
            break;
        }
    }
    // Remaining tail from term n onward: t_n (1 + x²) <= 2 t_n <= 2 units.
    sum_hi += BigInt::from(2);
    (sum_lo, sum_hi)
}

fn to_rational(v: BigInt, scale: u64) -> BigRational {
    BigRational::new(v, BigInt::one() << scale as usize)
}

/// Rigorous bounds on π.
pub fn pi() -> Bounds {
    let scale = PREC + 8;
    let (a_lo, a_hi) = euler_series(&BigInt::one(), &BigInt::from(5), scale);
    let (b_lo, b_hi) = euler_series(&BigInt::one(), &BigInt::from(239), scale);
    let lo = BigInt::from(16) * a_lo - BigInt::from(4) * b_hi;
    let hi = BigInt::from(16) * a_hi - BigInt::from(4) * b_lo;
    Bounds {
        lo: to_rational(lo, scale),
        hi: to_rational(hi, scale),
    }
}

/// Rigorous bounds on atan(x) with relative width about 2^-250.
pub fn atan(x: &BigRational) -> Bounds {
    if x.is_zero() {
        return Bounds {
            lo: BigRational::zero(),
            hi: BigRational::zero(),
        };
    }
    if x.is_negative() {
        return atan(&-x).neg();
    }
    if *x > BigRational::one() {
        let inner = atan(&x.recip());
        let pi = pi();
        let two = BigRational::from_integer(2.into());
        return Bounds {
            lo: &pi.lo / &two - inner.hi,
            hi: &pi.hi / &two - inner.lo,
        };
    }
    // atan(x) >= x/2 on (0, 1]; choose the fixed-point scale so the absolute
    // error is tiny relative to x.
    let log2x = x.numer().bits() as i64 - x.denom().bits() as i64;
    let scale = (PREC as i64 + 4 - log2x.min(0)) as u64;
    let (lo, hi) = euler_series(x.numer(), x.denom(), scale);
    Bounds {
        lo: to_rational(lo, scale),
        hi: to_rational(hi, scale),
    }
}

/// atan of a double, as rational bounds.
pub fn atan_f64(x: f64) -> Bounds {
    atan(&crate::rational::from_f64(x))
}
