//! Exact conversions between decimal text, binary64 and rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> BigRational {
    assert!(x.is_finite(), "non-finite value {x}");
    BigRational::from_float(x).expect("finite")
}

/// Exact value of a decimal numeral `[+-]d*[.d*][e[+-]d+]`.
pub fn from_decimal(text: &str) -> Option<BigRational> {
    let s = text.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.as_bytes().first()? {
        b'-' => (true, &mant[1..]),
        b'+' => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let e = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut v = if e >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-e) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

/// True when `lo <= v <= hi` exactly.
pub fn encloses(lo: f64, hi: f64, v: &BigRational) -> bool {
    let lo_ok = lo == f64::NEG_INFINITY || (lo.is_finite() && from_f64(lo) <= *v);
    let hi_ok = hi == f64::INFINITY || (hi.is_finite() && *v <= from_f64(hi));
    lo_ok && hi_ok
}

/// True when `[lo, hi]` certainly contains the square root of `v >= 0`.
pub fn encloses_sqrt(lo: f64, hi: f64, v: &BigRational) -> bool {
    assert!(!v.is_negative());
    let lo_ok = lo <= 0.0 || {
        let l = from_f64(lo);
        &l * &l <= *v
    };
    let hi_ok = hi.is_finite() && hi >= 0.0 && {
        let h = from_f64(hi);
        &h * &h >= *v
    };
    lo_ok && hi_ok
}

/// Number of doubles strictly between `a` and `b` plus one (ulp distance).
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

/// Exact rational to nearest-ish double (truncating), for reporting only.
pub fn to_f64_approx(v: &BigRational) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let n = v.numer().bits() as i64;
    let d = v.denom().bits() as i64;
    let shift = 60 - (n - d);
    let scaled = if shift >= 0 {
        (v.numer() << shift as usize) / v.denom()
    } else {
        v.numer() / (v.denom() << (-shift) as usize)
    };
    let mut f: f64 = scaled.to_string().parse().unwrap();
    // Apply 2^-shift in steps that stay within the exponent range.
    let mut e = -shift;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        f *= 2f64.powi(step as i32);
        e -= step;
    }
    f
}
