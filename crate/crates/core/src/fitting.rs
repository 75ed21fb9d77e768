//! Surface fits of selected accessory values over `(N, L)` grids, fitted
//! spectra, and curvature classification of spectra along `N`.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::{FixedParams, Mode};
use crate::error::{Error, Result};
use crate::rational::{q, qi, rational_string, to_f64, Q};
use crate::spectrum::{eigenvalue, eigenvalue_quantize_a, enumerate_spectrum, select_root, SpectrumEntry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub n: usize,
    pub l: u32,
    pub value: f64,
}

pub fn grid_from_entries(entries: &[SpectrumEntry]) -> Vec<GridPoint> {
    entries.iter().map(|e| GridPoint { n: e.n, l: e.l, value: e.selected_root }).collect()
}

/// Structural part of a fit: exponents and denominator constants are fixed,
/// only the listed coefficients are fitted.
#[derive(Debug, Clone, PartialEq)]
pub enum FitFamily {
    /// `s (N^p + u L^q + v) / (N^w + t)`, fitting `s`, `u`, `v`.
    CRational { p: Q, q: Q, w: Q, t: Q },
    /// `s (N^p + v) / (N + u L^q + t)`, fitting `s`, `v`.
    BRational { p: Q, q: Q, u: Q, t: Q },
    /// `(a L + b n + c) / (n^2 + d n + e)` with `n = N - 2K`, fitting all five.
    Tension { k: usize },
}

impl FitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FitFamily::CRational { .. } => "c_rational",
            FitFamily::BRational { .. } => "b_rational",
            FitFamily::Tension { .. } => "tension",
        }
    }

    pub fn coefficient_names(&self) -> &'static [&'static str] {
        match self {
            FitFamily::CRational { .. } => &["s", "u", "v"],
            FitFamily::BRational { .. } => &["s", "v"],
            FitFamily::Tension { .. } => &["l_coeff", "n_coeff", "constant", "den_linear", "den_constant"],
        }
    }

    pub fn fixed_exponents(&self) -> Vec<(&'static str, String)> {
        let s = rational_string;
        match self {
            FitFamily::CRational { p, q, w, t } => vec![("p", s(p)), ("q", s(q)), ("w", s(w)), ("t", s(t))],
            FitFamily::BRational { p, q, u, t } => vec![("p", s(p)), ("q", s(q)), ("u", s(u)), ("t", s(t))],
            FitFamily::Tension { k } => vec![("K", k.to_string())],
        }
    }
}

fn pow(x: f64, e: &Q) -> f64 {
    if x == 0.0 {
        return if to_f64(e) == 0.0 { 1.0 } else { 0.0 };
    }
    x.powf(to_f64(e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub family: FitFamily,
    pub coeffs: Vec<f64>,
    pub rms_absolute_residual: f64,
    pub rms_relative_residual: f64,
    pub grid_spec: String,
}

impl FitModel {
    /// Fitted value at `(N, L)`; the caller keeps `N >= 2K+1` for tension fits.
    pub fn eval(&self, n: usize, l: u32) -> f64 {
        model_value(&self.family, &self.coeffs, n, l)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        let i = self.family.coefficient_names().iter().position(|x| *x == name)?;
        self.coeffs.get(i).copied()
    }

    pub fn denominator(&self, n: usize, l: u32) -> f64 {
        denominator(&self.family, &self.coeffs, n, l)
    }

    pub fn to_json(&self) -> String {
        let coeffs: serde_json::Map<String, serde_json::Value> = self
            .family
            .coefficient_names()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
            .collect();
        let fixed: serde_json::Map<String, serde_json::Value> =
            self.family.fixed_exponents().into_iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "family": self.family.name(),
            "fixed_exponents": fixed,
            "coeffs": coeffs,
            "rms_relative_residual": self.rms_relative_residual,
            "rms_absolute_residual": self.rms_absolute_residual,
            "grid_spec": self.grid_spec,
        }))
        .expect("serializable")
    }
}

fn shifted(n: usize, k: usize) -> f64 {
    n as f64 - 2.0 * k as f64
}

fn denominator(family: &FitFamily, coeffs: &[f64], n: usize, l: u32) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    match family {
        FitFamily::CRational { w, t, .. } => pow(nf, w) + to_f64(t),
        FitFamily::BRational { q, u, t, .. } => nf + to_f64(u) * pow(lf, q) + to_f64(t),
        FitFamily::Tension { k } => {
            let m = shifted(n, *k);
            m * m + coeffs[3] * m + coeffs[4]
        }
    }
}

fn model_value(family: &FitFamily, coeffs: &[f64], n: usize, l: u32) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    let num = match family {
        FitFamily::CRational { p, q, .. } => coeffs[0] * (pow(nf, p) + coeffs[1] * pow(lf, q) + coeffs[2]),
        FitFamily::BRational { p, .. } => coeffs[0] * (pow(nf, p) + coeffs[1]),
        FitFamily::Tension { k } => coeffs[0] * lf + coeffs[1] * shifted(n, *k) + coeffs[2],
    };
    num / denominator(family, coeffs, n, l)
}

fn residuals(family: &FitFamily, coeffs: &[f64], table: &[GridPoint]) -> (f64, f64) {
    let count = table.len() as f64;
    let (abs, rel) = table.iter().fold((0.0, 0.0), |(a, r), p| {
        let e = model_value(family, coeffs, p.n, p.l) - p.value;
        (a + e * e, r + (e / p.value).powi(2))
    });
    ((abs / count).sqrt(), (rel / count).sqrt())
}

/// Least-squares solution with a rank check.
fn solve_least_squares(design: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let cols = design.ncols();
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.rank(smax * 1e-12 * cols.max(1) as f64);
    if rank < cols {
        return Err(Error::RankDeficient { rank, cols });
    }
    svd.solve(&rhs, 0.0).map_err(|e| Error::NonConvergent(e.to_string()))
}

/// Fits the free coefficients of `family` to `table`, minimizing absolute residuals.
pub fn fit(table: &[GridPoint], family: &FitFamily) -> Result<FitModel> {
    let needed = family.coefficient_names().len();
    if table.len() < needed {
        return Err(Error::TooFewPoints { needed, got: table.len() });
    }
    let coeffs = match family {
        FitFamily::CRational { p, q, .. } => {
            let beta = linear_fit(table, family, |pt| vec![pow(pt.n as f64, p), pow(pt.l as f64, q), 1.0])?;
            vec![beta[0], beta[1] / beta[0], beta[2] / beta[0]]
        }
        FitFamily::BRational { p, .. } => {
            let beta = linear_fit(table, family, |pt| vec![pow(pt.n as f64, p), 1.0])?;
            vec![beta[0], beta[1] / beta[0]]
        }
        FitFamily::Tension { k } => tension_fit(table, *k)?,
    };
    for pt in table {
        if !(denominator(family, &coeffs, pt.n, pt.l) > 0.0) {
            return Err(Error::InvalidParameter(format!("fitted denominator not positive at N={}, L={}", pt.n, pt.l)));
        }
    }
    let (rms_absolute_residual, rms_relative_residual) = residuals(family, &coeffs, table);
    Ok(FitModel { family: family.clone(), coeffs, rms_absolute_residual, rms_relative_residual, grid_spec: grid_spec(table) })
}

fn grid_spec(table: &[GridPoint]) -> String {
    let n_lo = table.iter().map(|p| p.n).min().unwrap_or(0);
    let n_hi = table.iter().map(|p| p.n).max().unwrap_or(0);
    let l_hi = table.iter().map(|p| p.l).max().unwrap_or(0);
    format!("{} points, {n_lo}<=N<={n_hi}, 0<=L<={l_hi}", table.len())
}

/// Numerator basis functions divided by the fixed denominator.
fn linear_fit(table: &[GridPoint], family: &FitFamily, basis: impl Fn(&GridPoint) -> Vec<f64>) -> Result<Vec<f64>> {
    let cols = basis(&table[0]).len();
    let mut design = DMatrix::zeros(table.len(), cols);
    for (i, pt) in table.iter().enumerate() {
        let den = denominator(family, &[], pt.n, pt.l);
        for (j, b) in basis(pt).into_iter().enumerate() {
            design[(i, j)] = b / den;
        }
    }
    let rhs = DVector::from_iterator(table.len(), table.iter().map(|p| p.value));
    Ok(solve_least_squares(design, rhs)?.iter().copied().collect())
}

/// Linearized start, then Levenberg-Marquardt on the absolute residuals.
fn tension_fit(table: &[GridPoint], k: usize) -> Result<Vec<f64>> {
    // y (n^2 + d n + e) = a L + b n + c is linear in all five unknowns.
    let mut design = DMatrix::zeros(table.len(), 5);
    for (i, pt) in table.iter().enumerate() {
        let m = shifted(pt.n, k);
        let row = [pt.l as f64, m, 1.0, -pt.value * m, -pt.value];
        for (j, x) in row.into_iter().enumerate() {
            design[(i, j)] = x;
        }
    }
    let rhs = DVector::from_iterator(table.len(), table.iter().map(|p| p.value * shifted(p.n, k).powi(2)));
    let start: Vec<f64> = solve_least_squares(design, rhs)?.iter().copied().collect();
    levenberg_marquardt(table, k, start)
}

fn tension_jacobian(table: &[GridPoint], k: usize, x: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let mut jac = DMatrix::zeros(table.len(), 5);
    let mut r = DVector::zeros(table.len());
    for (i, pt) in table.iter().enumerate() {
        let (lf, m) = (pt.l as f64, shifted(pt.n, k));
        let num = x[0] * lf + x[1] * m + x[2];
        let den = m * m + x[3] * m + x[4];
        r[i] = num / den - pt.value;
        let row = [lf / den, m / den, 1.0 / den, -num * m / (den * den), -num / (den * den)];
        for (j, v) in row.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    (jac, r)
}

fn levenberg_marquardt(table: &[GridPoint], k: usize, mut x: Vec<f64>) -> Result<Vec<f64>> {
    let cost = |x: &[f64]| tension_jacobian(table, k, x).1.norm_squared();
    let mut current = cost(&x);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let (jac, r) = tension_jacobian(table, k, &x);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..5 {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let c = cost(&trial);
            if c.is_finite() && c < current {
                let rel = step.norm() / (1e-300 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
                let drop = (current - c) / current.max(1e-300);
                x = trial;
                current = c;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                if rel < 1e-13 || drop < 1e-15 {
                    return Ok(x);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return Ok(x);
        }
    }
    Err(Error::NonConvergent("Levenberg-Marquardt iteration limit".into()))
}

/// Energy from a fitted accessory value, in the units of [`eigenvalue`].
pub fn fitted_spectrum(model: &FitModel, fixed: &FixedParams, n: usize, l: u32) -> f64 {
    eigenvalue(fixed.mode(), model.eval(n, l), n, l, fixed)
}

/// Closed interpolation of the tension fits across `K`.
pub fn tension_interpolation(k: usize, n: usize, l: u32) -> f64 {
    let kf = k as f64;
    let m = shifted(n, k);
    let n_coeff = 22.0 / 13.0 - 2.75 / (kf + 6.0);
    let l_coeff = 17.0 / 9.0 + 0.5 / (kf + 1.75);
    let num = n_coeff * m + l_coeff * l as f64 + 22.0 / 7.0 * kf + 13.0 / 4.0;
    let den = m * m + (m - 0.5) / (kf * kf + 8.0);
    num / den
}

/// `E^2` from the interpolated tension, for quark mass `m`.
pub fn interpolated_mass_squared(k: usize, n: usize, l: u32, m: f64) -> f64 {
    4.0 * tension_interpolation(k, n, l) * (n as f64 + l as f64 + 1.5) * m * m
}

/// Published tension-fit rows, `K = 0..=10`, ordered like the tension coefficients.
pub const TENSION_REFERENCE: [[f64; 5]; 11] = [
    [2.17476, 1.23455, 3.1316, 0.127159, -0.0365734],
    [2.07336, 1.30259, 6.42638, 0.115047, -0.0496256],
    [2.01984, 1.34965, 9.57483, 0.081705, -0.0383507],
    [1.9896, 1.3852, 12.6964, 0.0577076, -0.0279763],
    [1.97123, 1.41335, 15.8181, 0.0416747, -0.0205087],
    [1.95917, 1.43668, 18.9437, 0.0305489, -0.0151151],
    [1.95079, 1.45671, 22.0738, 0.0225566, -0.0111519],
    [1.94469, 1.47448, 25.2076, 0.0165878, -0.00814524],
    [1.94007, 1.49074, 28.3441, 0.0119884, -0.00580511],
    [1.93646, 1.50609, 31.4824, 0.00837235, -0.00396296],
    [1.93354, 1.5212, 34.6212, 0.00543953, -0.00247279],
];

/// A family with its published coefficients, for the fixed parameters it was reported at.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFit {
    pub fixed: FixedParams,
    pub family: FitFamily,
    pub coeffs: Vec<f64>,
}

impl ReferenceFit {
    pub fn model(&self) -> FitModel {
        FitModel {
            family: self.family.clone(),
            coeffs: self.coeffs.clone(),
            rms_absolute_residual: f64::NAN,
            rms_relative_residual: f64::NAN,
            grid_spec: "reference".into(),
        }
    }
}

/// Published surface for a `QuantizeC` grid at `a = 1` and the given `b`.
pub fn reference_c_fit(b: &Q) -> Option<ReferenceFit> {
    let rows = [
        (q(1, 10), [q(9, 10), q(3, 5), q(11, 10), q(8, 5)], [0.0652, 37.0 / 25.0, 19.0 / 8.0]),
        (q(1, 30), [qi(1), q(11, 20), q(23, 20), q(74, 25)], [0.02582, 30.0 / 11.0, 41.0 / 11.0]),
        (q(1, 50), [q(53, 50), q(13, 25), q(59, 50), q(25, 6)], [0.01621, 4.0, 5.0]),
        (q(1, 100), [q(25, 21), q(22, 45), q(5, 4), q(43, 6)], [0.008096, 23.0 / 3.0, 113.0 / 13.0]),
    ];
    rows.into_iter().find(|(bb, _, _)| bb == b).map(|(bb, [p, q, w, t], c)| ReferenceFit {
        fixed: FixedParams::C { a: qi(1), b: bb },
        family: FitFamily::CRational { p, q, w, t },
        coeffs: c.to_vec(),
    })
}

/// Published surface for a `QuantizeB` grid at the given scaled Coulomb strength.
pub fn reference_b_fit(a_bold: &Q) -> Option<ReferenceFit> {
    let rows = [
        (qi(1), [q(13, 10), q(23, 30), q(9, 5), qi(6)], [5.87593, 31.0 / 20.0]),
        (q(1, 50), [q(13, 10), q(17, 21), q(37, 25), q(29, 5)], [5.74785, 18.0 / 25.0]),
        (q(5, 2), [q(4, 3), q(5, 7), q(13, 6), q(68, 15)], [5.1482, 51.0 / 20.0]),
    ];
    rows.into_iter().find(|(a, _, _)| a == a_bold).map(|(a, [p, q, u, t], c)| ReferenceFit {
        fixed: FixedParams::B { a_bold: a },
        family: FitFamily::BRational { p, q, u, t },
        coeffs: c.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curvature {
    ConcaveUp,
    ConcaveDown,
    Linear,
    Mixed,
}

/// Relative size of second differences below which a spectrum counts as straight.
pub const LINEAR_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub classification: Curvature,
    /// Mean first difference per unit step in `N`.
    pub slope: f64,
    pub second_differences: Vec<f64>,
}

/// Classifies a spectrum sampled at consecutive `N` by its second differences.
pub fn curvature_classify(values: &[(usize, f64)], window: RangeInclusive<usize>) -> Result<CurvatureReport> {
    let mut pts: Vec<(usize, f64)> = values.iter().copied().filter(|(n, _)| window.contains(n)).collect();
    pts.sort_by_key(|p| p.0);
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: pts.len() });
    }
    if pts.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::InvalidParameter("curvature needs consecutive N".into()));
    }
    let first: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let second: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    let slope = (pts.last().unwrap().1 - pts[0].1) / (pts.len() - 1) as f64;
    let scale = first.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let classification = if second.iter().all(|d| d.abs() < LINEAR_TOLERANCE * scale) {
        Curvature::Linear
    } else {
        let significant = second.iter().filter(|d| d.abs() >= LINEAR_TOLERANCE * scale);
        let (up, down) = significant.fold((0, 0), |(u, d), x| if *x > 0.0 { (u + 1, d) } else { (u, d + 1) });
        match (up, down) {
            (_, 0) => Curvature::ConcaveUp,
            (0, _) => Curvature::ConcaveDown,
            _ => Curvature::Mixed,
        }
    };
    Ok(CurvatureReport { classification, slope, second_differences: second })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCurvature {
    pub mode: String,
    pub l: u32,
    pub window: (usize, usize),
    pub energies: Vec<(usize, f64)>,
    pub report: CurvatureReport,
}

/// Curvature of the energy along `N` over `0 <= N <= L + 5` for the
/// quantized `c`, quantized scaled linear strength and quantized Coulomb strength.
pub fn curvature_survey(c_fixed: &FixedParams, b_fixed: &FixedParams, b_bold_for_a: f64, l: u32, precision: f64) -> Result<Vec<ModeCurvature>> {
    let window = (0usize, l as usize + 5);
    let energies = |fixed: &FixedParams| -> Vec<(usize, f64)> {
        enumerate_spectrum(fixed, window.0..=window.1, 0, None, precision)
            .entries
            .into_iter()
            .filter(|e| e.l == l)
            .map(|e| (e.n, e.eigenvalue))
            .collect()
    };
    let mut out = Vec::new();
    for (name, values) in [
        ("c", energies(c_fixed)),
        ("B", energies(b_fixed)),
        ("A", (window.0..=window.1).map(|n| (n, eigenvalue_quantize_a(b_bold_for_a, n, l))).collect()),
    ] {
        // N below L has no state with this L; the window starts where states exist.
        let start = values.iter().map(|v| v.0).min().unwrap_or(0);
        let report = curvature_classify(&values, start..=window.1)?;
        out.push(ModeCurvature { mode: name.to_string(), l, window: (start, window.1), energies: values, report });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensionFitRow {
    pub k: usize,
    pub model: FitModel,
    pub points: usize,
    /// Relative RMS of the closed interpolation against the same grid.
    pub interpolation_rms_relative: f64,
}

/// One tension fit per `K`, on the `K`-th smallest positive roots for `N = 2K+1 ..= n_max`.
///
/// The root sets are computed once and shared by every `K`.
pub fn tension_fit_table(k_range: RangeInclusive<usize>, n_max: usize, m: &Q, precision: f64) -> Result<Vec<TensionFitRow>> {
    let fixed = FixedParams::Tension { m: m.clone() };
    if let Some(k) = k_range.clone().find(|k| n_max < 2 * k + 1) {
        return Err(Error::InvalidParameter(format!("N_max {n_max} below 2K+1 for K={k}")));
    }
    let start = 2 * k_range.start() + 1;
    let grid = enumerate_spectrum(&fixed, start..=n_max, 0, None, precision);
    k_range
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| {
            let table: Vec<GridPoint> = grid
                .entries
                .iter()
                .filter(|e| e.n >= 2 * k + 1)
                .filter_map(|e| {
                    let (_, value) = select_root(Mode::QuantizeTension, &e.all_roots, k).ok()?;
                    Some(GridPoint { n: e.n, l: e.l, value })
                })
                .collect();
            let model = fit(&table, &FitFamily::Tension { k })?;
            let count = table.len() as f64;
            let interp = table
                .iter()
                .map(|p| ((tension_interpolation(k, p.n, p.l) - p.value) / p.value).powi(2))
                .sum::<f64>();
            Ok(TensionFitRow { k, points: table.len(), model, interpolation_rms_relative: (interp / count).sqrt() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(family: &FitFamily, coeffs: &[f64], n_range: RangeInclusive<usize>) -> Vec<GridPoint> {
        n_range
            .flat_map(|n| (0..=n as u32).map(move |l| (n, l)))
            .map(|(n, l)| GridPoint { n, l, value: model_value(family, coeffs, n, l) })
            .collect()
    }

    #[test]
    fn exact_surface_has_zero_residual() {
        // 5 (N + 2) over N^0 + 0: s = 5, u = 0, v = 2.
        let family = FitFamily::CRational { p: qi(1), q: qi(1), w: qi(0), t: qi(0) };
        let table: Vec<GridPoint> =
            (1..6usize).flat_map(|n| (0..=n as u32).map(move |l| GridPoint { n, l, value: 5.0 * (n as f64 + 2.0) })).collect();
        let m = fit(&table, &family).unwrap();
        assert!((m.coeffs[0] - 5.0).abs() < 1e-10 && m.coeffs[1].abs() < 1e-10 && (m.coeffs[2] - 2.0).abs() < 1e-10);
        assert!(m.rms_absolute_residual < 1e-10);
    }

    #[test]
    fn recovers_synthetic_c_model() {
        let family = reference_c_fit(&q(1, 10)).unwrap().family;
        let truth = [0.07, 1.3, 2.1];
        let m = fit(&synthetic(&family, &truth, 1..=12), &family).unwrap();
        for (a, b) in m.coeffs.iter().zip(truth) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn recovers_synthetic_tension_model() {
        let family = FitFamily::Tension { k: 2 };
        let truth = [2.0, 1.35, 9.5, 0.08, -0.04];
        let table: Vec<GridPoint> = synthetic(&family, &truth, 5..=20);
        let m = fit(&table, &family).unwrap();
        for (a, b) in m.coeffs.iter().zip(truth) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn rank_deficient_design() {
        let family = FitFamily::CRational { p: qi(0), q: qi(0), w: qi(1), t: qi(1) };
        let table: Vec<GridPoint> = (1..5).map(|n| GridPoint { n, l: 0, value: 1.0 }).collect();
        assert!(matches!(fit(&table, &family), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn too_few_points() {
        let table = vec![GridPoint { n: 3, l: 0, value: 1.0 }];
        assert!(matches!(fit(&table, &FitFamily::Tension { k: 0 }), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn curvature_of_parabola_and_line() {
        let parabola: Vec<(usize, f64)> = (0..8).map(|n| (n, (n * n) as f64)).collect();
        assert_eq!(curvature_classify(&parabola, 0..=7).unwrap().classification, Curvature::ConcaveUp);
        let down: Vec<(usize, f64)> = (0..8).map(|n| (n, -((n * n) as f64))).collect();
        assert_eq!(curvature_classify(&down, 0..=7).unwrap().classification, Curvature::ConcaveDown);
        let line: Vec<(usize, f64)> = (0..8).map(|n| (n, eigenvalue_quantize_a(1.0, n, 2))).collect();
        let r = curvature_classify(&line, 0..=7).unwrap();
        assert_eq!(r.classification, Curvature::Linear);
        assert!((r.slope - 2.0).abs() < 1e-12);
        let zigzag: Vec<(usize, f64)> = (0..8).map(|n| (n, if n % 2 == 0 { 0.0 } else { 1.0 })).collect();
        assert_eq!(curvature_classify(&zigzag, 0..=7).unwrap().classification, Curvature::Mixed);
        assert!(matches!(curvature_classify(&line[..2], 0..=7), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn fitted_spectra_formulas() {
        let r = ReferenceFit { fixed: FixedParams::Tension { m: qi(1) }, family: FitFamily::Tension { k: 0 }, coeffs: TENSION_REFERENCE[0].to_vec() };
        let model = r.model();
        let e2 = fitted_spectrum(&model, &r.fixed, 1, 0);
        assert!((e2 - 4.0 * model.eval(1, 0) * 2.5).abs() < 1e-12);
        let b = reference_b_fit(&qi(1)).unwrap();
        let bm = b.model();
        let e = fitted_spectrum(&bm, &b.fixed, 4, 1);
        assert!((e - (2.0 * 6.5 - bm.eval(4, 1).powi(2) / 4.0)).abs() < 1e-12);
        let c0 = FixedParams::C { a: qi(1), b: qi(0) };
        let cm = reference_c_fit(&q(1, 10)).unwrap().model();
        assert!((fitted_spectrum(&cm, &c0, 3, 2) - 2.0 * cm.eval(3, 2) * 6.5).abs() < 1e-12);
    }

    #[test]
    fn interpolation_matches_published_k0_row() {
        let r = ReferenceFit { fixed: FixedParams::Tension { m: qi(1) }, family: FitFamily::Tension { k: 0 }, coeffs: TENSION_REFERENCE[0].to_vec() };
        let a = tension_interpolation(0, 10, 10);
        let b = r.model().eval(10, 10);
        assert!((a - b).abs() / b < 0.15);
    }

    #[test]
    fn fit_json_shape() {
        let family = reference_c_fit(&q(1, 10)).unwrap().family;
        let m = fit(&synthetic(&family, &[0.07, 1.3, 2.1], 1..=6), &family).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(doc["family"], "c_rational");
        assert_eq!(doc["fixed_exponents"]["p"], "9/10");
        assert!(doc["coeffs"]["s"].as_f64().is_some());
    }
}
