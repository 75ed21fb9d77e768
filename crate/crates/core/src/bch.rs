//! The modified biconfluent Heun equation
//!
//! ```text
//! z y'' + (mu z^2 + epsilon z + nu) y' + (Omega z + epsilon omega) y = 0
//! ```
//!
//! its Frobenius recurrence at the origin, and the maps from the physical
//! problems (Cornell-type potential, its scaled form, and the quark equation).

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::BigRational;
use num_traits::{FromPrimitive, NumOps, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{qi, to_f64, Q};

/// Field operations needed by the recurrence.
pub trait Scalar: Clone + Debug + PartialEq + Zero + One + NumOps + Neg<Output = Self> + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Zero + One + NumOps + Neg<Output = T> + FromPrimitive {}

fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("index fits the scalar type")
}

/// Parameters of the modified equation. The product `epsilon * omega` is
/// stored directly so that `epsilon = 0` with finite product stays representable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedBchParams<T = f64> {
    pub mu: T,
    pub epsilon: T,
    pub nu: T,
    pub eps_omega: T,
    pub big_omega: T,
}

impl<T: Scalar> ModifiedBchParams<T> {
    pub fn new(mu: T, epsilon: T, nu: T, omega: T, big_omega: T) -> Self {
        let eps_omega = epsilon.clone() * omega;
        ModifiedBchParams { mu, epsilon, nu, eps_omega, big_omega }
    }

    pub fn with_eps_omega(mu: T, epsilon: T, nu: T, eps_omega: T, big_omega: T) -> Self {
        ModifiedBchParams { mu, epsilon, nu, eps_omega, big_omega }
    }

    /// `omega` itself, which needs `epsilon != 0`.
    pub fn omega(&self) -> Result<T> {
        if self.epsilon.is_zero() {
            return Err(Error::DegenerateOmega);
        }
        Ok(self.eps_omega.clone() / self.epsilon.clone())
    }

    fn denominator(&self, n: usize) -> Result<T> {
        let den = from_usize::<T>(n + 1) * (from_usize::<T>(n) + self.nu.clone());
        if den.is_zero() {
            return Err(Error::ZeroDenominator { n });
        }
        Ok(den)
    }

    /// Checks that no recurrence denominator up to `nmax` vanishes.
    pub fn validate(&self, nmax: usize) -> Result<()> {
        (0..=nmax).try_for_each(|n| self.denominator(n).map(|_| ()))
    }
}

impl ModifiedBchParams<BigRational> {
    pub fn to_f64(&self) -> ModifiedBchParams<f64> {
        ModifiedBchParams {
            mu: to_f64(&self.mu),
            epsilon: to_f64(&self.epsilon),
            nu: to_f64(&self.nu),
            eps_omega: to_f64(&self.eps_omega),
            big_omega: to_f64(&self.big_omega),
        }
    }
}

/// `A_n = -(epsilon n + epsilon omega) / ((n+1)(n+nu))`.
pub fn coeff_a<T: Scalar>(n: usize, p: &ModifiedBchParams<T>) -> Result<T> {
    let den = p.denominator(n)?;
    let num = p.epsilon.clone() * from_usize::<T>(n) + p.eps_omega.clone();
    Ok(-num / den)
}

/// `B_n = -(Omega + mu (n-1)) / ((n+1)(n+nu))` for `n >= 1`.
pub fn coeff_b<T: Scalar>(n: usize, p: &ModifiedBchParams<T>) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter("B_n is defined for n >= 1".into()));
    }
    let den = p.denominator(n)?;
    let num = p.big_omega.clone() + p.mu.clone() * from_usize::<T>(n - 1);
    Ok(-num / den)
}

/// Frobenius coefficients `d_0 = 1, ..., d_nmax` of the analytic solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCoefficients<T = f64> {
    pub d: Vec<T>,
}

impl<T: Scalar> SeriesCoefficients<T> {
    pub fn nmax(&self) -> usize {
        self.d.len() - 1
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.d.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

pub fn series_coefficients<T: Scalar>(p: &ModifiedBchParams<T>, nmax: usize) -> Result<SeriesCoefficients<T>> {
    p.validate(nmax)?;
    let mut d = Vec::with_capacity(nmax + 1);
    d.push(T::one());
    if nmax >= 1 {
        d.push(coeff_a(0, p)?);
    }
    for n in 1..nmax {
        let next = coeff_a(n, p)? * d[n].clone() + coeff_b(n, p)? * d[n - 1].clone();
        d.push(next);
    }
    Ok(SeriesCoefficients { d })
}

pub fn evaluate_series<T: Scalar>(coeffs: &SeriesCoefficients<T>, z: &T) -> T {
    coeffs.d.iter().rev().fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
}

/// Value and first derivative of the truncated series.
pub fn evaluate_series_with_derivative(coeffs: &SeriesCoefficients<f64>, z: f64) -> (f64, f64) {
    coeffs.d.iter().enumerate().rev().fold((0.0, 0.0), |(y, dy), (_, c)| (y * z + c, dy * z + y))
}

/// Fixed inputs of the Cornell-type radial problem, in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Coulomb strength.
    pub a: Q,
    /// Linear strength.
    pub b: Q,
    /// Quadratic strength.
    pub c: Q,
    pub l: u32,
    pub energy: Q,
    /// Length scale `hbar^2 / 2m`; radii are divided by it.
    pub alpha: Q,
}

impl PhysicalParams {
    pub fn new(a: Q, b: Q, c: Q, l: u32, energy: Q) -> Self {
        PhysicalParams { a, b, c, l, energy, alpha: Q::one() }
    }

    fn check_c(&self) -> Result<()> {
        if !self.c.is_positive() {
            return Err(Error::NonPositiveC(self.c.to_string()));
        }
        Ok(())
    }

    /// Exact `Omega = (E + b^2/(4c^2))/c - (2L+3)`.
    pub fn big_omega_exact(&self) -> Result<Q> {
        self.check_c()?;
        let c = &self.c;
        let four = qi(4);
        Ok((&self.energy + &self.b * &self.b / (four * c * c)) / c - qi(2 * self.l as i64 + 3))
    }

    /// Exact numerator `a c - b (L+1)` of `epsilon omega = (a c - b(L+1)) / c^{3/2}`.
    pub fn eps_omega_numerator(&self) -> Q {
        &self.a * &self.c - &self.b * qi(self.l as i64 + 1)
    }

    pub fn to_scaled(&self) -> Result<ScaledParams> {
        self.check_c()?;
        let c = to_f64(&self.c);
        Ok(ScaledParams {
            a_bold: to_f64(&self.a) / c.sqrt(),
            b_bold: to_f64(&self.b) / c.powf(1.5),
            e_script: to_f64(&(&self.energy / &self.c)),
            l: self.l,
        })
    }
}

/// Parameters after the rescaling `rho = sqrt(c) r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledParams {
    pub a_bold: f64,
    pub b_bold: f64,
    pub e_script: f64,
    pub l: u32,
}

/// Cornell-type radial equation in the variable `rho = sqrt(c) r`.
pub fn map_cornell(p: &PhysicalParams) -> Result<ModifiedBchParams> {
    let big_omega = p.big_omega_exact()?;
    let c32 = to_f64(&p.c).powf(1.5);
    let l = p.l as f64;
    Ok(ModifiedBchParams {
        mu: -2.0,
        epsilon: -to_f64(&p.b) / c32,
        nu: 2.0 * (l + 1.0),
        eps_omega: to_f64(&p.eps_omega_numerator()) / c32,
        big_omega: to_f64(&big_omega),
    })
}

pub fn map_scaled(s: &ScaledParams) -> ModifiedBchParams {
    let l = s.l as f64;
    ModifiedBchParams {
        mu: -2.0,
        epsilon: -s.b_bold,
        nu: 2.0 * (l + 1.0),
        eps_omega: s.a_bold - s.b_bold * (l + 1.0),
        big_omega: s.e_script + s.b_bold * s.b_bold / 4.0 - (2.0 * l + 3.0),
    }
}

/// Quark equation with mass `m`, tension `b > 0` and energy `E`.
pub fn map_quark(m: &Q, b: &Q, energy: f64, l: u32) -> Result<ModifiedBchParams> {
    let exact = map_quark_squared(m, b, &Q::zero(), l)?.to_f64();
    Ok(ModifiedBchParams { big_omega: energy * energy / 4.0 + exact.big_omega, ..exact })
}

/// Quark equation given `E^2` exactly.
pub fn map_quark_squared(m: &Q, b: &Q, energy_sq: &Q, l: u32) -> Result<ModifiedBchParams<Q>> {
    if !b.is_positive() {
        return Err(Error::NonPositiveTension(b.to_string()));
    }
    let lq = qi(l as i64);
    let epsilon = -(qi(2) * m);
    Ok(ModifiedBchParams::new(
        -b.clone(),
        epsilon,
        qi(2) * (&lq + qi(1)),
        &lq + qi(1),
        energy_sq / qi(4) - b * (&lq + Q::new(3.into(), 2.into())),
    ))
}
