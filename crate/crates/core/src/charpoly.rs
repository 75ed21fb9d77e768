//! Characteristic polynomials `d_{N+1}(x) = 0` in the accessory parameter.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{qi, rational_string, Q};

/// Which parameter is quantized together with the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// Quadratic strength `c`, with `a` and `b` fixed.
    QuantizeC,
    /// Scaled linear strength with the scaled Coulomb strength fixed.
    QuantizeB,
    /// Ratio `b / m^2` of the quark equation.
    QuantizeTension,
}

impl Mode {
    pub fn variable(self) -> Variable {
        match self {
            Mode::QuantizeC => Variable::CTilde,
            Mode::QuantizeB => Variable::BBold,
            Mode::QuantizeTension => Variable::TensionRatio,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Mode::QuantizeC => "c",
            Mode::QuantizeB => "B",
            Mode::QuantizeTension => "tension",
        }
    }

    /// Upper bound on the characteristic polynomial degree at radial number `n`.
    pub fn degree_bound(self, n: usize) -> usize {
        match self {
            Mode::QuantizeC => (3 * (n + 1)).div_ceil(2),
            Mode::QuantizeB => n + 1,
            Mode::QuantizeTension => (n + 1) / 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variable {
    CTilde,
    BBold,
    TensionRatio,
}

/// Fixed inputs of each mode, all exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FixedParams {
    C { a: Q, b: Q },
    B { a_bold: Q },
    Tension { m: Q },
}

impl FixedParams {
    pub fn mode(&self) -> Mode {
        match self {
            FixedParams::C { .. } => Mode::QuantizeC,
            FixedParams::B { .. } => Mode::QuantizeB,
            FixedParams::Tension { .. } => Mode::QuantizeTension,
        }
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        match self {
            FixedParams::C { a, b } => vec![("a", rational_string(a)), ("b", rational_string(b))],
            FixedParams::B { a_bold } => vec![("A", rational_string(a_bold))],
            FixedParams::Tension { m } => vec![("m", rational_string(m))],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizationProblem {
    pub n: usize,
    pub l: u32,
    pub fixed: FixedParams,
}

impl QuantizationProblem {
    pub fn new(n: usize, l: u32, fixed: FixedParams) -> Self {
        QuantizationProblem { n, l, fixed }
    }

    pub fn mode(&self) -> Mode {
        self.fixed.mode()
    }
}

/// `Omega = -mu N`, which makes `B_{N+1}` vanish.
pub fn quantized_omega(n: usize, mu: &Q) -> Q {
    -(mu * qi(n as i64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharPolynomial {
    pub problem: QuantizationProblem,
    pub poly: Poly,
    pub variable: Variable,
    /// Power of `c^{1/2}` multiplied in to clear half-integer powers (zero outside `QuantizeC`).
    pub clearing_power: u32,
}

impl CharPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn integer_coeffs(&self) -> Vec<String> {
        self.poly.primitive_integer().iter().map(ToString::to_string).collect()
    }

    pub fn to_document(&self) -> CharPolyDocument {
        CharPolyDocument {
            mode: self.problem.mode().tag().to_string(),
            n: self.problem.n,
            l: self.problem.l,
            fixed: self
                .problem
                .fixed
                .entries()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            coeffs: self.integer_coeffs(),
            clearing_power: self.clearing_power,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharPolyDocument {
    pub mode: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: u32,
    pub fixed: std::collections::BTreeMap<String, String>,
    pub coeffs: Vec<String>,
    pub clearing_power: u32,
}

/// Runs `d_{n+1} = A_n d_n + B_n d_{n-1}` with polynomial `A_n` and `B_n`.
fn run_recurrence(n_top: usize, a: impl Fn(usize) -> Poly, b: impl Fn(usize) -> Poly) -> Poly {
    let mut prev = Poly::constant(qi(1));
    let mut cur = a(0);
    for n in 1..=n_top.saturating_sub(1) {
        let next = a(n).mul(&cur).add(&b(n).mul(&prev));
        prev = cur;
        cur = next;
    }
    cur
}

pub fn build_charpoly(q: &QuantizationProblem) -> Result<CharPolynomial> {
    let n_big = q.n as i64;
    let l = q.l as i64;
    let nu = 2 * (l + 1);
    let den = |n: usize| qi((n as i64 + 1) * (n as i64 + nu));
    let (poly, clearing_power) = match &q.fixed {
        FixedParams::C { a, b } => {
            // In s = c^{-1/2}: epsilon = -b s^3, epsilon*omega = a s - b (L+1) s^3.
            let d = run_recurrence(
                q.n + 1,
                |n| {
                    let k = den(n);
                    Poly::new(vec![
                        Q::zero(),
                        -(a / &k),
                        Q::zero(),
                        b * qi(n as i64 + l + 1) / &k,
                    ])
                },
                |n| Poly::constant(qi(2 * (n as i64 - 1 - n_big)) / den(n)),
            );
            // Multiply by c^{3(N+1)/2} = s^{-3(N+1)}: s^k becomes c^{(3(N+1)-k)/2}.
            let top = 3 * (q.n + 1);
            let mut coeffs = vec![Q::zero(); top / 2 + 1];
            for (k, c) in d.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                debug_assert_eq!((top - k) % 2, 0, "parity of surviving powers");
                coeffs[(top - k) / 2] += c;
            }
            (Poly::new(coeffs), top as u32)
        }
        FixedParams::B { a_bold } => {
            let d = run_recurrence(
                q.n + 1,
                |n| {
                    let k = den(n);
                    Poly::new(vec![-(a_bold / &k), qi(n as i64 + l + 1) / &k])
                },
                |n| Poly::constant(qi(2 * (n as i64 - 1 - n_big)) / den(n)),
            );
            (d, 0)
        }
        FixedParams::Tension { m } => {
            if m.is_zero() {
                return Err(Error::InvalidParameter(
                    "m = 0 leaves b/m^2 undefined; the massless spectrum is E^2 = 4b(N+L+3/2)".into(),
                ));
            }
            // d_n = m^n e_n turns the recurrence into a polynomial one in x = b/m^2.
            let d = run_recurrence(
                q.n + 1,
                |n| Poly::constant(qi(2 * (n as i64 + l + 1)) / den(n)),
                |n| Poly::new(vec![Q::zero(), qi(n as i64 - 1 - n_big) / den(n)]),
            );
            (d, 0)
        }
    };
    if poly.degree() == 0 {
        return Err(Error::DegreeZero { identically_zero: poly.is_zero() });
    }
    let mut poly = poly.primitive();
    if poly.leading().is_negative() {
        poly = poly.neg();
    }
    Ok(CharPolynomial { problem: q.clone(), poly, variable: q.mode().variable(), clearing_power })
}
