//! Large-`z` behavior of non-polynomial solutions and the truncated amplitude sum.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::bch::{coeff_a, coeff_b, ModifiedBchParams};
use crate::error::{Error, Result};

pub const STABILITY_BAND: f64 = 0.05;
const MAX_SERIES_TERMS: usize = 20_000;
/// Largest term over the final sum beyond which f64 summation is not trusted.
const CANCELLATION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticParams {
    pub mu: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub growth_exponent: f64,
}

impl AsymptoticParams {
    pub fn new(p: &ModifiedBchParams) -> Result<Self> {
        Ok(AsymptoticParams {
            mu: p.mu,
            epsilon: p.epsilon,
            gamma: 0.5 * (1.0 + p.nu),
            growth_exponent: growth_exponent(p)?,
        })
    }

    pub fn z_tilde(&self, z: f64) -> f64 {
        -0.5 * self.mu * z * z
    }

    pub fn eps_tilde(&self, z: f64) -> f64 {
        -0.5 * self.epsilon * z
    }
}

/// `Omega / (2 mu) - gamma`, the power of `z~` in the growth law.
pub fn growth_exponent(p: &ModifiedBchParams) -> Result<f64> {
    if p.mu == 0.0 {
        return Err(Error::ZeroMu);
    }
    Ok(p.big_omega / (2.0 * p.mu) - 0.5 * (1.0 + p.nu))
}

/// Reference function the series is divided by.
///
/// `Leading` is `z~^k e^{z~}`. Substituting `z^s e^{-mu z^2/2 - eps z}` into the
/// equation shows the exponential also carries `e^{-eps z}`; `WithLinearTerm`
/// includes it. The two agree only at `eps = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthLaw {
    Leading,
    WithLinearTerm,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub exponent: f64,
    pub law: GrowthLaw,
    pub ratio_samples: Vec<(f64, f64)>,
    pub stabilized: bool,
    /// Mean ratio over the top half of the window.
    pub plateau: f64,
    /// `(max - min) / |mean|` over the top half.
    pub spread: f64,
    /// Ratio collapsing toward zero, as for a terminating series.
    pub polynomial_branch: bool,
    /// Divergence of `e^{z~}` at large `z`, i.e. `mu < 0`.
    pub diverges: bool,
}

/// Sums `y(z) = sum d_n z^n` with `d_0 = 1` until the terms have died out.
pub fn sum_series(p: &ModifiedBchParams, z: f64) -> Result<f64> {
    // Terms u_n = d_n z^n obey the recurrence with A_n scaled by z and B_n by z^2.
    let mut u_prev = 1.0;
    let mut u = coeff_a(0, p)? * z;
    let mut sum = 1.0 + u;
    let mut largest = sum.abs().max(1.0);
    let mut quiet = 0;
    for n in 1..MAX_SERIES_TERMS {
        let next = coeff_a(n, p)? * z * u + coeff_b(n, p)? * z * z * u_prev;
        u_prev = u;
        u = next;
        sum += u;
        largest = largest.max(u.abs());
        if !sum.is_finite() {
            return Err(Error::SummationUnreliable { z, ratio: f64::INFINITY });
        }
        let small = u.abs() <= f64::EPSILON * 1e-2 * sum.abs().max(f64::MIN_POSITIVE);
        quiet = if small || u == 0.0 { quiet + 1 } else { 0 };
        if quiet >= 8 && u.abs() < largest {
            let cancel = largest / sum.abs();
            if cancel > CANCELLATION_LIMIT {
                return Err(Error::SummationUnreliable { z, ratio: cancel });
            }
            return Ok(sum);
        }
    }
    Err(Error::SummationUnreliable { z, ratio: (u / sum).abs() })
}

fn reference(a: &AsymptoticParams, law: GrowthLaw, z: f64) -> f64 {
    let zt = a.z_tilde(z);
    let linear = match law {
        GrowthLaw::Leading => 0.0,
        GrowthLaw::WithLinearTerm => -a.epsilon * z,
    };
    (a.growth_exponent * zt.ln() + zt + linear).exp()
}

/// Samples `y(z) / reference(z)` on `samples` evenly spaced points of `[z_lo, z_hi]`.
pub fn verify_growth(
    p: &ModifiedBchParams,
    z_lo: f64,
    z_hi: f64,
    samples: usize,
    law: GrowthLaw,
) -> Result<GrowthReport> {
    let a = AsymptoticParams::new(p)?;
    if !(z_lo > 0.0 && z_hi > z_lo && samples >= 4) {
        return Err(Error::InvalidParameter("need 0 < z_lo < z_hi and at least 4 samples".into()));
    }
    if a.z_tilde(1.0) <= 0.0 {
        return Err(Error::InvalidParameter("growth law needs mu < 0 so that z~ > 0".into()));
    }
    let step = (z_hi - z_lo) / (samples - 1) as f64;
    let ratio_samples = (0..samples)
        .into_par_iter()
        .map(|i| {
            let z = z_lo + step * i as f64;
            Ok((z, sum_series(p, z)? / reference(&a, law, z)))
        })
        .collect::<Result<Vec<_>>>()?;
    let top = &ratio_samples[samples / 2..];
    let mean = top.iter().map(|s| s.1).sum::<f64>() / top.len() as f64;
    let (min, max) = top
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.1), hi.max(s.1)));
    let spread = (max - min) / mean.abs();
    let peak = ratio_samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let last = ratio_samples[samples - 1].1.abs();
    Ok(GrowthReport {
        exponent: a.growth_exponent,
        law,
        stabilized: spread.is_finite() && spread <= STABILITY_BAND,
        plateau: mean,
        spread,
        polynomial_branch: last < 1e-3 * peak,
        diverges: a.mu < 0.0,
        ratio_samples,
    })
}

/// `(ln|Gamma(x)|, sign)`, or `None` at a pole.
fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((ln_gamma(x), 1.0));
    }
    if x == x.round() {
        return None;
    }
    let s = (std::f64::consts::PI * x).sin();
    Some((std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x), s.signum()))
}

/// `1 / Gamma(x)`, zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        None => 0.0,
        Some((l, s)) => s * (-l).exp(),
    }
}

/// `Gamma(x)`, with `None` at the poles.
pub fn gamma_checked(x: f64) -> Option<f64> {
    ln_gamma_signed(x).map(|(l, s)| s * l.exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct Amplitude {
    pub value: f64,
    pub leading: f64,
    pub tail_estimate: f64,
    /// Contribution of each outer shell `n = 1..=n_terms`, weights included.
    pub shells: Vec<f64>,
}

/// Truncated amplitude sum: outer index `n <= n_terms`, every inner index `<= i_max`.
///
/// The nested sums are carried level by level: `weights[i]` holds the summed
/// product of all inner factors ending on index `i` at the current depth.
pub fn amplitude_truncated(p: &ModifiedBchParams, n_terms: usize, i_max: usize) -> Result<Amplitude> {
    let a_param = AsymptoticParams::new(p)?;
    if p.mu >= 0.0 {
        return Err(Error::InvalidParameter("amplitude needs mu < 0".into()));
    }
    let g = a_param.gamma;
    let a = p.big_omega / (2.0 * p.mu);
    let leading = gamma_checked(g)
        .ok_or_else(|| Error::InvalidParameter(format!("Gamma(gamma) has a pole at gamma = {g}")))?
        * recip_gamma(a);
    if n_terms == 0 || p.epsilon == 0.0 {
        return Ok(Amplitude { value: leading, leading, tail_estimate: 0.0, shells: Vec::new() });
    }
    let omega = p.omega()?;
    let t = -p.epsilon / (-2.0 * p.mu).sqrt();

    // Ratio R(k, i+1) / R(k, i) of the Pochhammer weights at depth k.
    let step_ratio = |k: f64, j: f64| (a + k + j) / ((1.0 + k + j) * (g + k + j));
    let link = |k: f64, i: f64| (i + k + 0.5 * omega) / ((i + k + 0.5) * (i + k + g - 0.5));
    let closing = |k: f64, i: f64| -> f64 {
        let x = i + k;
        match (ln_gamma_signed(x + 0.5), ln_gamma_signed(x + g - 0.5), ln_gamma_signed(x + 0.5 + a)) {
            (_, _, None) => 0.0,
            (Some((l1, s1)), Some((l2, s2)), Some((l3, s3))) => (x + 0.5 * omega) * s1 * s2 * s3 * (l1 + l2 - l3).exp(),
            _ => f64::NAN,
        }
    };

    let mut weights = vec![0.0; i_max + 1];
    weights[0] = 1.0;
    let mut shells = Vec::with_capacity(n_terms);
    let mut value = leading;
    let mut t_pow = 1.0;
    for n in 1..=n_terms {
        let k = 0.5 * (n - 1) as f64;
        let closing_k: Vec<f64> = (0..=i_max).map(|i| closing(k, i as f64)).collect();
        let link_k: Vec<f64> = (0..=i_max).map(|i| link(k, i as f64)).collect();
        let mut shell = 0.0;
        let mut next = vec![0.0; i_max + 1];
        for (ip, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut r = 1.0;
            for i in ip..=i_max {
                if i > ip {
                    r *= step_ratio(k, (i - 1) as f64);
                }
                shell += w * closing_k[i] * r;
                next[i] += w * link_k[i] * r;
            }
        }
        if !shell.is_finite() {
            return Err(Error::NonConvergent(format!("shell {n} is not finite")));
        }
        t_pow *= t;
        let contribution = t_pow * shell;
        value += contribution;
        shells.push(contribution);
        weights = next;
    }
    let (first, last) = (shells[0].abs(), shells[shells.len() - 1].abs());
    if shells.len() >= 2 && last >= first && last > 0.0 {
        return Err(Error::NonConvergent(format!("shell {} is {last:e}, not below shell 1 at {first:e}", shells.len())));
    }
    let tail_estimate = shells.last().map_or(0.0, |s| s.abs());
    Ok(Amplitude { value, leading, tail_estimate, shells })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub exponent: f64,
    pub ratio_samples: Vec<(f64, f64)>,
    pub stabilized: bool,
    #[serde(rename = "A_truncated")]
    pub a_truncated: Option<f64>,
    pub tail_estimate: Option<f64>,
}

impl AsymptoticReport {
    pub fn new(growth: &GrowthReport, amplitude: Option<&Amplitude>) -> Self {
        AsymptoticReport {
            exponent: growth.exponent,
            ratio_samples: growth.ratio_samples.clone(),
            stabilized: growth.stabilized,
            a_truncated: amplitude.map(|a| a.value),
            tail_estimate: amplitude.map(|a| a.tail_estimate),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
