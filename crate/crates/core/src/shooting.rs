//! Outward shooting from the origin for the radial equation and its
//! confluent two-term reduction, with energy bisection.
//!
//! Both equations are written as
//! `x y'' + (p2 x^2 + p1 x + p0) y' + (q1 x + q0) y = 0`
//! and advanced by local Taylor series, which keeps the scheme generic over
//! the floating type so that deep bisections can run in double-double.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};
use serde::Serialize;
use twofloat::TwoFloat;

use crate::bch::PhysicalParams;
use crate::error::{Error, Result};
use crate::rational::{from_f64, q, qi, to_decimal_string, to_f64, Q};

/// Floating types the integrator runs in.
pub trait Real: Float + Debug {
    fn from_double(x: f64) -> Self;
    fn to_double(self) -> f64;
}

impl Real for f64 {
    fn from_double(x: f64) -> Self {
        x
    }
    fn to_double(self) -> f64 {
        self
    }
}

// The primitive conversions of `TwoFloat` go through integers, so they are avoided.
impl Real for TwoFloat {
    fn from_double(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_double(self) -> f64 {
        self.hi() + self.lo()
    }
}

fn real<T: Real>(x: f64) -> T {
    T::from_double(x)
}

/// Nearest value of `x` as a sum of two doubles.
fn rational_to<T: Real>(x: &Q) -> T {
    let hi = to_f64(x);
    let lo = to_f64(&(x - from_f64(hi)));
    real::<T>(hi) + real::<T>(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equation {
    /// The three-term radial equation in `rho = sqrt(c) r`.
    Radial,
    /// The `a = b = 0` reduction in `xi = rho^2` (Kummer form).
    Confluent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitialCondition {
    /// `y = 1`, `y' = 0` imposed at the starting point.
    Flat,
    /// Values of the regular Frobenius solution at the starting point.
    SeriesConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arithmetic {
    Double,
    DoubleDouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Diverges towards negative values.
    Overshoot,
    /// Diverges towards positive values.
    Undershoot,
    Flat,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_step: f64,
    pub max_step: f64,
}

impl StepControl {
    fn for_arithmetic(arith: Arithmetic) -> Self {
        let tol = match arith {
            Arithmetic::Double => 1e-15,
            Arithmetic::DoubleDouble => 1e-30,
        };
        StepControl { rel_tol: tol, abs_tol: tol, min_step: 1e-14, max_step: 0.25 }
    }
}

/// One outward integration. The trial energy is `params.energy`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub params: PhysicalParams,
    pub equation: Equation,
    pub ic_mode: InitialCondition,
    pub rho_start: f64,
    pub rho_max: f64,
    /// Flatness is judged on `[rho_start, flat_window]`.
    pub flat_window: f64,
    pub flat_tol: f64,
    /// `|y|` beyond this ends the run as over- or undershooting.
    pub blowup: f64,
    /// Ascending coefficients of the polynomial the solution should follow.
    pub target: Vec<f64>,
    pub sample_step: f64,
    pub arithmetic: Arithmetic,
    pub step: StepControl,
}

impl ShootingConfig {
    /// Defaults: window `[0, 8]` in `rho` (`[0, 64]` in `xi`), target `y = 1`.
    pub fn new(params: PhysicalParams, equation: Equation, ic_mode: InitialCondition) -> Self {
        let (rho_max, flat_window) = match equation {
            Equation::Radial => (8.0, 6.0),
            Equation::Confluent => (64.0, 36.0),
        };
        ShootingConfig {
            params,
            equation,
            ic_mode,
            rho_start: 1e-6,
            rho_max,
            flat_window,
            flat_tol: 1e-6,
            blowup: 1e6,
            target: vec![1.0],
            sample_step: rho_max / 400.0,
            arithmetic: Arithmetic::Double,
            step: StepControl::for_arithmetic(Arithmetic::Double),
        }
    }

    pub fn with_energy(&self, energy: Q) -> Self {
        let mut cfg = self.clone();
        cfg.params.energy = energy;
        cfg
    }

    pub fn with_arithmetic(&self, arithmetic: Arithmetic) -> Self {
        let mut cfg = self.clone();
        cfg.arithmetic = arithmetic;
        cfg.step = StepControl::for_arithmetic(arithmetic);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.rho_start > 0.0) {
            return bad("rho_start must be positive");
        }
        if !(self.rho_max > self.rho_start) {
            return bad("rho_max must exceed rho_start");
        }
        if !self.params.c.is_positive() {
            return Err(Error::NonPositiveC(self.params.c.to_string()));
        }
        if !(self.flat_tol > 0.0 && self.blowup > 0.0 && self.sample_step > 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    fn target_at(&self, x: f64) -> f64 {
        self.target.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Coefficients of `x y'' + (p2 x^2 + p1 x + p0) y' + (q1 x + q0) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearOde<T> {
    pub p2: T,
    pub p1: T,
    pub p0: T,
    pub q1: T,
    pub q0: T,
}

impl<T: Real> LinearOde<T> {
    pub fn from_config(cfg: &ShootingConfig) -> Result<Self> {
        let p = &cfg.params;
        let l = p.l as i64;
        match cfg.equation {
            Equation::Radial => {
                let c: T = rational_to(&p.c);
                let c32 = c * c.sqrt();
                Ok(LinearOde {
                    p2: real(-2.0),
                    p1: -rational_to::<T>(&p.b) / c32,
                    p0: rational_to(&qi(2 * (l + 1))),
                    q1: rational_to(&p.big_omega_exact()?),
                    q0: rational_to::<T>(&p.eps_omega_numerator()) / c32,
                })
            }
            Equation::Confluent => {
                if !p.c.is_positive() {
                    return Err(Error::NonPositiveC(p.c.to_string()));
                }
                let q0 = &p.energy / (qi(4) * &p.c) - q(2 * l + 3, 4);
                Ok(LinearOde {
                    p2: T::zero(),
                    p1: real(-1.0),
                    p0: rational_to(&q(2 * l + 3, 2)),
                    q1: T::zero(),
                    q0: rational_to(&q0),
                })
            }
        }
    }

    /// Taylor coefficients about a regular point `x0 > 0`.
    pub fn taylor(&self, x0: T, y0: T, yp0: T, order: usize) -> Vec<T> {
        let a0 = (self.p2 * x0 + self.p1) * x0 + self.p0;
        let a1 = real::<T>(2.0) * self.p2 * x0 + self.p1;
        let a2 = self.p2;
        let b0 = self.q1 * x0 + self.q0;
        let b1 = self.q1;
        let mut c = Vec::with_capacity(order + 1);
        c.push(y0);
        c.push(yp0);
        for k in 0..order.saturating_sub(1) {
            let kf: T = real(k as f64);
            let one = T::one();
            let prev = if k == 0 { T::zero() } else { c[k - 1] };
            let num = (kf + one) * (kf + a0) * c[k + 1] + (a1 * kf + b0) * c[k] + (a2 * (kf - one) + b1) * prev;
            c.push(-num / (x0 * (kf + one) * (kf + real(2.0))));
        }
        c
    }

    /// Regular Frobenius solution `sum c_k x^k` with `c_0 = 1`, evaluated with its derivative.
    pub fn frobenius(&self, x: T, terms: usize) -> (T, T) {
        let mut c = vec![T::one()];
        for k in 0..terms {
            let kf: T = real(k as f64);
            let prev = if k == 0 { T::zero() } else { c[k - 1] };
            let num = (self.p1 * kf + self.q0) * c[k] + (self.p2 * (kf - T::one()) + self.q1) * prev;
            c.push(-num / ((kf + T::one()) * (kf + self.p0)));
        }
        eval_taylor(&c, x)
    }
}

fn eval_taylor<T: Real>(c: &[T], s: T) -> (T, T) {
    let mut y = T::zero();
    let mut yp = T::zero();
    for (k, ck) in c.iter().enumerate().rev() {
        y = y * s + *ck;
        if k > 0 {
            yp = yp * s + *ck * real(k as f64);
        }
    }
    (y, yp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub rho: f64,
    pub y: f64,
    pub yprime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub classification: Classification,
    pub blowup_rho: Option<f64>,
    /// Largest `|y - target|` seen inside the flatness window.
    pub max_deviation: f64,
    /// Where `|y - target|` first reaches `flat_tol`; the window end if never.
    pub flat_reach: f64,
    /// `y - target` at the last point reached.
    pub terminal_deviation: f64,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,y,yprime\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e},{:e}\n", s.rho, s.y, s.yprime));
        }
        out
    }

    /// `+1` on the side that diverges upwards, `-1` downwards, `0` only when
    /// the run ends exactly on target.
    fn side(&self) -> i32 {
        match self.classification {
            Classification::Undershoot => 1,
            Classification::Overshoot => -1,
            Classification::Flat | Classification::Indeterminate => {
                if self.terminal_deviation > 0.0 {
                    1
                } else if self.terminal_deviation < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

const TAYLOR_ORDER_DOUBLE: usize = 24;
const TAYLOR_ORDER_DD: usize = 36;

pub fn integrate(cfg: &ShootingConfig) -> Result<Trajectory> {
    cfg.validate()?;
    match cfg.arithmetic {
        Arithmetic::Double => integrate_in::<f64>(cfg, TAYLOR_ORDER_DOUBLE),
        Arithmetic::DoubleDouble => integrate_in::<TwoFloat>(cfg, TAYLOR_ORDER_DD),
    }
}

struct Tracker<'a> {
    cfg: &'a ShootingConfig,
    samples: Vec<Sample>,
    max_deviation: f64,
    flat_reach: Option<f64>,
    last_x: f64,
}

impl Tracker<'_> {
    fn observe(&mut self, x: f64, y: f64, yp: f64, keep: bool) {
        if keep {
            self.samples.push(Sample { rho: x, y, yprime: yp });
        }
        if x <= self.cfg.flat_window {
            let dev = (y - self.cfg.target_at(x)).abs();
            let dev = if dev.is_finite() { dev } else { f64::INFINITY };
            self.max_deviation = self.max_deviation.max(dev);
            if dev >= self.cfg.flat_tol && self.flat_reach.is_none() {
                self.flat_reach = Some(self.last_x);
            }
        }
        self.last_x = x;
    }
}

fn integrate_in<T: Real>(cfg: &ShootingConfig, order: usize) -> Result<Trajectory> {
    let ode = LinearOde::<T>::from_config(cfg)?;
    let mut x: T = real(cfg.rho_start);
    let (mut y, mut yp) = match cfg.ic_mode {
        InitialCondition::Flat => (T::one(), T::zero()),
        InitialCondition::SeriesConsistent => ode.frobenius(x, 60),
    };
    let mut tr = Tracker { cfg, samples: Vec::new(), max_deviation: 0.0, flat_reach: None, last_x: cfg.rho_start };
    let f = |v: T| v.to_double();
    tr.observe(cfg.rho_start, f(y), f(yp), true);
    let mut next_sample = cfg.sample_step;
    let mut blowup_rho = None;
    while f(x) < cfg.rho_max {
        let c = ode.taylor(x, y, yp, order);
        let xf = f(x);
        let scale = f(y).abs().max(f(yp).abs() * xf.min(1.0));
        let tol = cfg.step.abs_tol + cfg.step.rel_tol * scale;
        let mut h = (0.5 * xf).min(cfg.step.max_step);
        for j in [order - 1, order] {
            let cj = f(c[j]).abs();
            if cj > 0.0 {
                h = h.min((tol / cj).powf(1.0 / j as f64));
            }
        }
        h = (0.9 * h).min(cfg.rho_max - xf);
        if !(h >= cfg.step.min_step * xf.max(1.0)) {
            return Err(Error::StepFailure { rho: xf });
        }
        while next_sample < xf + h {
            if next_sample > xf {
                let (ys, yps) = eval_taylor(&c, real::<T>(next_sample) - x);
                tr.observe(next_sample, f(ys), f(yps), true);
            }
            next_sample += cfg.sample_step;
        }
        let ht: T = real(h);
        (y, yp) = eval_taylor(&c, ht);
        x = x + ht;
        let (xf, yf) = (f(x), f(y));
        tr.observe(xf, yf, f(yp), false);
        if !yf.is_finite() {
            return Err(Error::StepFailure { rho: xf });
        }
        if yf.abs() > cfg.blowup {
            tr.samples.push(Sample { rho: xf, y: yf, yprime: f(yp) });
            blowup_rho = Some(xf);
            break;
        }
    }
    let (x_end, y_end) = (f(x), f(y));
    if tr.samples.last().map(|s| s.rho) != Some(x_end) {
        tr.samples.push(Sample { rho: x_end, y: y_end, yprime: f(yp) });
    }
    let terminal_deviation = y_end - cfg.target_at(x_end);
    let classification = match blowup_rho {
        Some(_) if y_end > 0.0 => Classification::Undershoot,
        Some(_) => Classification::Overshoot,
        None if tr.max_deviation < cfg.flat_tol => Classification::Flat,
        None => Classification::Indeterminate,
    };
    Ok(Trajectory {
        samples: tr.samples,
        classification,
        blowup_rho,
        max_deviation: tr.max_deviation,
        flat_reach: tr.flat_reach.unwrap_or(cfg.flat_window.min(x_end)),
        terminal_deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionStep {
    #[serde(serialize_with = "ser_q")]
    pub energy: Q,
    /// `-log10` of the bracket width after this step.
    pub digits: f64,
    pub classification: Classification,
    pub max_deviation: f64,
    pub flat_reach: f64,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_decimal_string(x, 30))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecadeSummary {
    pub digits: u32,
    pub best_deviation: f64,
    pub best_reach: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionReport {
    pub e_star: Q,
    pub e_lo: Q,
    pub e_hi: Q,
    /// The trial energy itself gave a flat solution.
    pub exact_hit: bool,
    pub steps: Vec<BisectionStep>,
}

impl BisectionReport {
    /// Significant digits resolved by the final bracket.
    pub fn digits(&self) -> u32 {
        if self.exact_hit {
            return 30;
        }
        let width = to_f64(&(&self.e_hi - &self.e_lo)).abs();
        let mag = to_f64(&self.e_star).abs().max(1.0);
        (mag / width).log10().floor().max(0.0) as u32
    }

    pub fn e_star_f64(&self) -> f64 {
        to_f64(&self.e_star)
    }

    pub fn e_star_decimal(&self) -> String {
        to_decimal_string(&self.e_star, self.digits().max(1) as usize + 1)
    }

    /// Best flatness and reach over the steps of each decade of bracket width.
    pub fn decade_profile(&self) -> Vec<DecadeSummary> {
        let mut out: Vec<DecadeSummary> = Vec::new();
        for s in &self.steps {
            let d = s.digits.floor().max(0.0) as u32;
            match out.iter_mut().find(|x| x.digits == d) {
                Some(x) => {
                    x.best_deviation = x.best_deviation.min(s.max_deviation);
                    x.best_reach = x.best_reach.max(s.flat_reach);
                }
                None => out.push(DecadeSummary { digits: d, best_deviation: s.max_deviation, best_reach: s.flat_reach }),
            }
        }
        out.sort_by_key(|x| x.digits);
        out
    }

    /// True when the last `decades` decades did not halve the best deviation
    /// reached before them.
    pub fn saturated(&self, decades: u32) -> bool {
        let profile = self.decade_profile();
        let Some(last) = profile.last().map(|x| x.digits) else { return false };
        let cut = last.saturating_sub(decades);
        let before = profile.iter().filter(|x| x.digits < cut).map(|x| x.best_deviation).fold(f64::INFINITY, f64::min);
        let after = profile.iter().filter(|x| x.digits >= cut).map(|x| x.best_deviation).fold(f64::INFINITY, f64::min);
        before.is_finite() && after >= 0.5 * before
    }

    pub fn to_json(&self) -> String {
        let saturation_rho: Vec<f64> = self.decade_profile().iter().map(|d| d.best_reach).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "E_star_decimal": self.e_star_decimal(),
            "digits": self.digits(),
            "saturation_rho": saturation_rho,
            "steps": self.steps,
        }))
        .expect("serializable")
    }
}

fn midpoint(a: &Q, b: &Q) -> Q {
    (a + b) / qi(2)
}

/// Bisects the trial energy between two differently classified endpoints.
///
/// Steps switch to double-double once the bracket is narrower than double
/// precision can resolve.
pub fn bisect_energy(template: &ShootingConfig, e_lo: Q, e_hi: Q, max_iter: usize) -> Result<BisectionReport> {
    let (mut lo, mut hi) = if e_lo <= e_hi { (e_lo, e_hi) } else { (e_hi, e_lo) };
    let run = |e: &Q, width: &Q| {
        let mag = to_f64(e).abs().max(1.0);
        let arith = if to_f64(width) < 1e-13 * mag { Arithmetic::DoubleDouble } else { template.arithmetic };
        integrate(&template.with_energy(e.clone()).with_arithmetic(arith))
    };
    let width0 = &hi - &lo;
    let t_lo = run(&lo, &width0)?;
    let t_hi = run(&hi, &width0)?;
    for (t, e) in [(&t_lo, &lo), (&t_hi, &hi)] {
        if t.side() == 0 {
            return Ok(BisectionReport { e_star: e.clone(), e_lo: e.clone(), e_hi: e.clone(), exact_hit: true, steps: Vec::new() });
        }
    }
    let side_lo = t_lo.side();
    if side_lo == t_hi.side() {
        return Err(Error::SameClassification(format!("{:?} at both ends", t_lo.classification)));
    }
    let mut steps = Vec::new();
    for _ in 0..max_iter {
        let mid = midpoint(&lo, &hi);
        let t = run(&mid, &(&hi - &lo))?;
        let side = t.side();
        let exact = side == 0;
        if exact {
            lo = mid.clone();
            hi = mid.clone();
        } else if side == side_lo {
            lo = mid.clone();
        } else {
            hi = mid.clone();
        }
        let width = to_f64(&(&hi - &lo));
        let mag = to_f64(&mid).abs().max(1.0);
        steps.push(BisectionStep {
            energy: mid,
            digits: if width > 0.0 { (mag / width).log10() } else { 30.0 },
            classification: t.classification,
            max_deviation: t.max_deviation,
            flat_reach: t.flat_reach,
        });
        if exact {
            break;
        }
    }
    let exact_hit = lo == hi;
    Ok(BisectionReport { e_star: midpoint(&lo, &hi), e_lo: lo, e_hi: hi, exact_hit, steps })
}

/// Scans `[e_min, e_max]` in `count` equal steps for the first change of side.
pub fn find_bracket(template: &ShootingConfig, e_min: &Q, e_max: &Q, count: usize) -> Result<(Q, Q)> {
    let step = (e_max - e_min) / Q::from_integer(BigInt::from(count.max(1)));
    let mut prev: Option<(Q, i32)> = None;
    for i in 0..=count {
        let e = e_min + &step * Q::from_integer(BigInt::from(i));
        let t = integrate(&template.with_energy(e.clone()))?;
        let side = t.side();
        if side == 0 {
            return Ok((e.clone(), e));
        }
        if let Some((pe, ps)) = &prev {
            if *ps != side {
                return Ok((pe.clone(), e));
            }
        }
        prev = Some((e, side));
    }
    Err(Error::SameClassification(format!("no change of side on [{}, {}]", to_f64(e_min), to_f64(e_max))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingRun {
    pub label: String,
    pub equation: Equation,
    pub c: f64,
    pub e_star_decimal: String,
    pub e_star: f64,
    pub digits: u32,
    pub exact_hit: bool,
    pub saturated: bool,
    pub profile: Vec<DecadeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoParameterReport {
    pub wrong_c: ShootingRun,
    pub correct_c: Option<ShootingRun>,
    pub two_term: ShootingRun,
}

impl TwoParameterReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Iterations that take a unit bracket to about 25 significant digits.
pub const DEEP_BISECTION: usize = 90;

fn shooting_run(label: &str, template: &ShootingConfig, e_range: (Q, Q), max_iter: usize) -> Result<ShootingRun> {
    let (lo, hi) = find_bracket(template, &e_range.0, &e_range.1, 64)?;
    let report = bisect_energy(template, lo, hi, max_iter)?;
    Ok(ShootingRun {
        label: label.to_string(),
        equation: template.equation,
        c: to_f64(&template.params.c),
        e_star_decimal: report.e_star_decimal(),
        e_star: report.e_star_f64(),
        digits: report.digits(),
        exact_hit: report.exact_hit,
        saturated: !report.exact_hit && report.saturated(5),
        profile: report.decade_profile(),
    })
}

/// Ground-state shooting at an accessory value that does not quantize the
/// three-term equation, beside two control runs that do terminate: the
/// quantized `c = b/a` and the two-term `a = b = 0` reduction at the same `c`.
pub fn demonstrate_two_parameter_failure(a: &Q, b: &Q, c_wrong: &Q, window: f64) -> Result<TwoParameterReport> {
    if !c_wrong.is_positive() {
        return Err(Error::NonPositiveC(c_wrong.to_string()));
    }
    let correct = (!a.is_zero()).then(|| b / a);
    if correct.as_ref() == Some(c_wrong) {
        return Err(Error::InvalidParameter("accessory value is the quantized one".into()));
    }
    let radial = |c: &Q, a: &Q, b: &Q| {
        let mut cfg = ShootingConfig::new(PhysicalParams::new(a.clone(), b.clone(), c.clone(), 0, Q::zero()), Equation::Radial, InitialCondition::Flat);
        cfg.flat_window = window;
        cfg
    };
    let e_range = |c: &Q| (Q::zero(), c * qi(6));
    let wrong_c = shooting_run("wrong accessory value", &radial(c_wrong, a, b), e_range(c_wrong), DEEP_BISECTION)?;
    let correct_c = match correct.filter(|c| c.is_positive()) {
        Some(c) => Some(shooting_run("quantized accessory value", &radial(&c, a, b), e_range(&c), DEEP_BISECTION)?),
        None => None,
    };
    let mut confluent = ShootingConfig::new(PhysicalParams::new(Q::zero(), Q::zero(), c_wrong.clone(), 0, Q::zero()), Equation::Confluent, InitialCondition::Flat);
    confluent.flat_window = window * window;
    let two_term = shooting_run("two-term reduction", &confluent, e_range(c_wrong), DEEP_BISECTION)?;
    Ok(TwoParameterReport { wrong_c, correct_c, two_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn radial(a: Q, b: Q, c: Q, e: Q) -> ShootingConfig {
        ShootingConfig::new(PhysicalParams::new(a, b, c, 0, e), Equation::Radial, InitialCondition::Flat)
    }

    #[test]
    fn ground_state_is_flat() {
        let t = integrate(&radial(q(2, 5), qi(1), q(5, 2), parse_rational("7.46").unwrap())).unwrap();
        assert_eq!(t.classification, Classification::Flat);
        assert!(t.max_deviation < 1e-6);
        assert!(t.samples.iter().filter(|s| s.rho <= 6.0).all(|s| (s.y - 1.0).abs() < 1e-6));
    }

    #[test]
    fn confluent_flat_at_exact_energy() {
        let cfg = ShootingConfig::new(PhysicalParams::new(qi(0), qi(0), q(5, 2), 0, q(15, 2)), Equation::Confluent, InitialCondition::Flat);
        let t = integrate(&cfg).unwrap();
        assert_eq!(t.classification, Classification::Flat);
    }

    #[test]
    fn below_limit_undershoots() {
        let e = parse_rational("7.46").unwrap() - parse_rational("0.19").unwrap();
        let t = integrate(&radial(q(2, 5), qi(1), q(7, 2), e)).unwrap();
        assert_eq!(t.classification, Classification::Undershoot);
        assert!(t.blowup_rho.is_some());
    }

    #[test]
    fn taylor_matches_frobenius() {
        let cfg = radial(q(2, 5), qi(1), q(7, 2), qi(9));
        let ode = LinearOde::<f64>::from_config(&cfg).unwrap();
        let (y0, yp0) = ode.frobenius(0.3, 80);
        let c = ode.taylor(0.3, y0, yp0, 30);
        let (y1, yp1) = eval_taylor(&c, 0.1);
        let (y2, yp2) = ode.frobenius(0.4, 80);
        assert!((y1 - y2).abs() < 1e-13 && (yp1 - yp2).abs() < 1e-12);
    }

    #[test]
    fn double_double_agrees_with_double() {
        let cfg = radial(q(2, 5), qi(1), q(7, 2), qi(9));
        let a = integrate(&cfg).unwrap();
        let b = integrate(&cfg.with_arithmetic(Arithmetic::DoubleDouble)).unwrap();
        assert_eq!(a.classification, b.classification);
        let (sa, sb) = (&a.samples[50], &b.samples[50]);
        assert_eq!(sa.rho, sb.rho);
        assert!((sa.y - sb.y).abs() < 1e-10 * sa.y.abs().max(1.0));
    }

    #[test]
    fn bisection_rejects_same_side() {
        let cfg = radial(q(2, 5), qi(1), q(7, 2), qi(0));
        let err = bisect_energy(&cfg, qi(1), qi(2), 10).unwrap_err();
        assert!(matches!(err, Error::SameClassification(_)));
    }

    #[test]
    fn two_term_bisection_finds_laguerre_energy() {
        let cfg = ShootingConfig::new(PhysicalParams::new(qi(0), qi(0), q(5, 2), 0, qi(0)), Equation::Confluent, InitialCondition::Flat);
        let rep = bisect_energy(&cfg, parse_rational("7.4").unwrap(), parse_rational("7.51").unwrap(), 40).unwrap();
        assert!((rep.e_star_f64() - 7.5).abs() < 1e-9);
    }

    #[test]
    fn invalid_start() {
        let mut cfg = radial(q(2, 5), qi(1), q(5, 2), qi(7));
        cfg.rho_start = 0.0;
        assert!(integrate(&cfg).is_err());
    }
}
