//! Exact rational helpers: parsing, conversion and decimal formatting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.175` or `1e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?
    };
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Q::from_integer(num);
    if shift >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -value } else { value })
}

pub fn to_f64(x: &Q) -> f64 {
    // Scale into range before dividing so huge numerators and denominators survive.
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        Q::new(n.clone(), d.clone() << (shift as usize))
    } else {
        Q::new(n.clone() << ((-shift) as usize), d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn sqrt_f64(x: &Q) -> f64 {
    to_f64(x).sqrt()
}

/// Decimal string with `digits` significant figures, computed exactly.
pub fn to_decimal_string(x: &Q, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let ten = Q::from_integer(BigInt::from(10));
    // Find e with 10^e <= a < 10^(e+1).
    let mut e = (to_f64(&a).log10().floor()) as i64;
    let pow10 = |k: i64| -> Q {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            Q::one() / num_traits::pow(ten.clone(), (-k) as usize)
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scale = digits as i64 - 1 - e;
    let scaled = &a * pow10(scale);
    let mut m = scaled.round().to_integer();
    if m >= num_traits::pow(BigInt::from(10), digits) {
        m /= 10;
        e += 1;
    }
    let ms = m.to_string();
    let point = e + 1;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&ms);
    } else if point as usize >= ms.len() {
        out.push_str(&ms);
        out.push_str(&"0".repeat(point as usize - ms.len()));
    } else {
        out.push_str(&ms[..point as usize]);
        out.push('.');
        out.push_str(&ms[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// `%.{digits}g`-style formatting for floats, used by CSV writers.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    to_decimal_string(&from_f64(x), digits)
}

pub fn rational_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
