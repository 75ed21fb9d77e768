//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::to_f64;

/// Coefficients in ascending order, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Poly::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division over the rationals. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Integer coefficients with unit content and positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Same polynomial up to a positive constant, with primitive integer coefficients.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let p = Poly::from_bigints(&self.primitive_integer());
        if self.leading().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.primitive_integer();
        let mut b = other.primitive_integer();
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_ints(pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        if a.is_empty() {
            return Poly::zero();
        }
        let lead = BigRational::from_integer(a.last().unwrap().clone());
        Poly::from_bigints(&a).scale(&(BigRational::one() / lead))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Sign of the value at `x` in {-1, 0, 1}.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.coeffs.iter().all(|c| c.denom().is_one()) {
            let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            int_sign_at(&ints, x)
        } else {
            let flip = if self.leading().is_negative() { -1 } else { 1 };
            flip * int_sign_at(&self.primitive_integer(), x)
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    /// Yun's square-free factorization: `factors[i]` has multiplicity `i + 1`.
    pub fn square_free_factors(&self) -> Vec<Poly> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let f = self.primitive();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        loop {
            let a = b.gcd(&d);
            out.push(a.primitive());
            b = b.div_rem(&a).0;
            if b.degree() == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
        }
        out
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free_part(&self) -> Poly {
        let f = self.primitive();
        let g = f.gcd(&f.derivative());
        if g.degree() == 0 {
            return f;
        }
        f.div_rem(&g).0.primitive()
    }

    /// True when the polynomial has no repeated complex root.
    pub fn is_square_free(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }
}

/// Sign of an integer-coefficient polynomial at a rational point.
fn int_sign_at(ints: &[BigInt], x: &BigRational) -> i32 {
    // Homogenized evaluation: d^deg * p(n/d) keeps the sign since d > 0.
    let n = x.numer();
    let d = x.denom();
    let mut acc = BigInt::zero();
    if d.is_one() {
        for c in ints.iter().rev() {
            acc = acc * n + c;
        }
    } else {
        let mut dpow = BigInt::one();
        for c in ints.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
    }
    sign_of(&acc)
}

/// A positive multiple of the remainder of `a` divided by `b`, in integers.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let (b, lead): (Vec<BigInt>, BigInt) = if b[db].is_negative() {
        (b.iter().map(|c| -c).collect(), -b[db].clone())
    } else {
        (b.to_vec(), b[db].clone())
    };
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let top = r.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        for c in r.iter_mut() {
            *c *= &lead;
        }
        for (j, bj) in b[..db].iter().enumerate() {
            r[k + j] -= &top * bj;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Divides out the positive content; the sign is kept.
fn primitive_ints(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    v
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "x")?,
                1 => write!(f, "{a}*x")?,
                _ if a.is_one() => write!(f, "x^{k}")?,
                _ => write!(f, "{a}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Sturm chain of a polynomial, each member scaled by a positive constant.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let lead_sign = |q: &Poly, v: Vec<BigInt>| {
            if q.leading().is_negative() {
                v.into_iter().map(|c| -c).collect()
            } else {
                v
            }
        };
        let mut chain = vec![lead_sign(p, p.primitive_integer())];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(lead_sign(&d, d.primitive_integer()));
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let r = primitive_ints(pseudo_rem(&chain[n - 2], &chain[n - 1]));
            if r.is_empty() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        SturmChain { chain }
    }

    /// The last member: a constant exactly when the polynomial is square-free.
    pub fn last_degree(&self) -> usize {
        self.chain.last().map_or(0, |c| c.len().saturating_sub(1))
    }

    pub fn sign_variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = int_sign_at(p, x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Distinct roots in the half-open interval (lo, hi].
    pub fn count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.sign_variations(lo).saturating_sub(self.sign_variations(hi))
    }
}

/// Power of two strictly exceeding every root's modulus (Cauchy bound).
pub fn cauchy_bound(p: &Poly) -> BigRational {
    let lead = p.leading().abs();
    let max_ratio = p.coeffs()[..p.degree()]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    let bound = BigRational::one() + max_ratio;
    let mut pow = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    while pow <= bound {
        pow *= &two;
    }
    pow
}
