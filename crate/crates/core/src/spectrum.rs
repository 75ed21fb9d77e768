//! Root selection, eigenvalues, eigenfunctions and spectra over `(N, L)` grids.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::bch::{evaluate_series, series_coefficients, ModifiedBchParams, SeriesCoefficients};
use crate::charpoly::{build_charpoly, FixedParams, Mode, QuantizationProblem};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{format_sig, from_f64, to_f64};
use crate::rootfind::{find_roots, real_roots, RootSet};

/// Relative size of `d_{N+1}` tolerated in an eigenfunction.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub mode: Mode,
    pub n: usize,
    pub l: u32,
    pub k: usize,
    pub selected_root: f64,
    pub root_index: usize,
    pub all_roots: RootSet,
    pub eigenvalue: f64,
    pub eigenfunction: SeriesCoefficients,
    /// Positive real zeros of the eigenfunction; reported, not enforced.
    pub node_count: usize,
}

/// Mode-specific choice among the real roots.
///
/// `QuantizeC` takes the smallest positive root, `QuantizeB` the largest root,
/// and `QuantizeTension` the `k`-th smallest positive root (`k = 0` is the smallest).
pub fn select_root(mode: Mode, rs: &RootSet, k: usize) -> Result<(usize, f64)> {
    let positive = || rs.roots.iter().enumerate().filter(|(_, r)| !r.lo.is_negative() && r.value > 0.0);
    let pick = match mode {
        Mode::QuantizeC => positive().next(),
        Mode::QuantizeB => rs.roots.iter().enumerate().last(),
        Mode::QuantizeTension => positive().nth(k),
    };
    pick.map(|(i, r)| (i, r.value)).ok_or_else(|| {
        let what = match mode {
            Mode::QuantizeC => "no positive root".to_string(),
            Mode::QuantizeB => "no real root".to_string(),
            Mode::QuantizeTension => format!("fewer than {} positive roots", k + 1),
        };
        Error::NoAdmissibleRoot(format!("{} ({what})", rs.poly_ref))
    })
}

fn level(n: usize, l: u32) -> f64 {
    n as f64 + l as f64 + 1.5
}

/// Energy from the accessory value: `E` for `QuantizeC`, the scaled energy for
/// `QuantizeB`, and `E^2/m^2` for `QuantizeTension`.
pub fn eigenvalue(mode: Mode, root: f64, n: usize, l: u32, fixed: &FixedParams) -> f64 {
    match (mode, fixed) {
        (Mode::QuantizeC, FixedParams::C { b, .. }) => {
            let b = to_f64(b);
            2.0 * root * level(n, l) - b * b / (4.0 * root * root)
        }
        (Mode::QuantizeB, _) => 2.0 * level(n, l) - root * root / 4.0,
        (Mode::QuantizeTension, _) => 4.0 * root * level(n, l),
        (Mode::QuantizeC, _) => panic!("QuantizeC needs fixed a and b"),
    }
}

/// Scaled energy when the Coulomb strength is quantized at fixed scaled linear strength.
pub fn eigenvalue_quantize_a(b_bold: f64, n: usize, l: u32) -> f64 {
    2.0 * level(n, l) - b_bold * b_bold / 4.0
}

/// Equation parameters at an accessory value, with `Omega` set to its quantized value.
pub fn params_at_root(root: f64, n: usize, l: u32, fixed: &FixedParams) -> Result<ModifiedBchParams> {
    let lf = l as f64;
    let nu = 2.0 * (lf + 1.0);
    Ok(match fixed {
        FixedParams::C { a, b } => {
            if root <= 0.0 {
                return Err(Error::NonPositiveC(root.to_string()));
            }
            let (a, b) = (to_f64(a), to_f64(b));
            let c32 = root.powf(1.5);
            ModifiedBchParams {
                mu: -2.0,
                epsilon: -b / c32,
                nu,
                eps_omega: (a * root - b * (lf + 1.0)) / c32,
                big_omega: 2.0 * n as f64,
            }
        }
        FixedParams::B { a_bold } => ModifiedBchParams {
            mu: -2.0,
            epsilon: -root,
            nu,
            eps_omega: to_f64(a_bold) - root * (lf + 1.0),
            big_omega: 2.0 * n as f64,
        },
        FixedParams::Tension { m } => {
            let m = to_f64(m);
            let b = root * m * m;
            if b <= 0.0 {
                return Err(Error::NonPositiveTension(b.to_string()));
            }
            ModifiedBchParams {
                mu: -b,
                epsilon: -2.0 * m,
                nu,
                eps_omega: -2.0 * m * (lf + 1.0),
                big_omega: b * n as f64,
            }
        }
    })
}

/// Polynomial eigenfunction `d_0..d_N`, checked by the size of `d_{N+1}`.
pub fn eigenfunction(root: f64, n: usize, l: u32, fixed: &FixedParams) -> Result<SeriesCoefficients> {
    let p = params_at_root(root, n, l, fixed)?;
    let mut s = series_coefficients(&p, n + 1)?;
    let tail = s.d.pop().unwrap_or(0.0).abs();
    let scale = s.d.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let residual = tail / scale;
    if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualTooLarge { residual });
    }
    Ok(s)
}

/// Radial function `R(r)` built from a spectrum entry; `alpha` rescales lengths
/// for the Cornell modes (`r~ = r / alpha`).
pub fn radial_wavefunction(entry: &SpectrumEntry, r: f64, fixed: &FixedParams, alpha: f64) -> f64 {
    let l = entry.l as i32;
    let y = |z: f64| evaluate_series(&entry.eigenfunction, &z);
    match fixed {
        FixedParams::C { b, .. } => {
            let c = entry.selected_root;
            let b = to_f64(b);
            let rt = r / alpha;
            r.powi(l) * (-c * rt * rt / 2.0 - b * rt / (2.0 * c)).exp() * y(c.sqrt() * rt)
        }
        FixedParams::B { .. } => {
            let bb = entry.selected_root;
            r.powi(l) * (-r * r / 2.0 - bb * r / 2.0).exp() * y(r)
        }
        FixedParams::Tension { m } => {
            let m = to_f64(m);
            let b = entry.selected_root * m * m;
            let shift = r + 2.0 * m / b;
            (-(b / 4.0) * shift * shift).exp() * r.powi(l) * y(r)
        }
    }
}

/// Number of distinct positive real zeros of the eigenfunction polynomial.
pub fn node_count(eigenfunction: &SeriesCoefficients) -> usize {
    let p = Poly::new(eigenfunction.d.iter().map(|&d| from_f64(d)).collect());
    if p.degree() == 0 {
        return 0;
    }
    real_roots(&p, 1e-6)
        .map(|roots| roots.iter().filter(|r| !r.lo.is_negative() && !r.hi.is_zero()).count())
        .unwrap_or(0)
}

pub fn compute_entry(problem: &QuantizationProblem, k: usize, precision: f64) -> Result<SpectrumEntry> {
    let mode = problem.mode();
    let cp = build_charpoly(problem)?;
    let all_roots = find_roots(&cp, precision)?;
    let (root_index, selected_root) = select_root(mode, &all_roots, k)?;
    let eigenfunction = eigenfunction(selected_root, problem.n, problem.l, &problem.fixed)?;
    Ok(SpectrumEntry {
        mode,
        n: problem.n,
        l: problem.l,
        k,
        selected_root,
        root_index,
        eigenvalue: eigenvalue(mode, selected_root, problem.n, problem.l, &problem.fixed),
        node_count: node_count(&eigenfunction),
        eigenfunction,
        all_roots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedEntry {
    pub n: usize,
    pub l: u32,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumGrid {
    pub entries: Vec<SpectrumEntry>,
    pub skipped: Vec<SkippedEntry>,
}

/// Grid over `n_range` with `L = 0..=min(N, l_max)`, computed in parallel and
/// returned in `(N, L)` order. For `QuantizeTension` only `N >= 2K+1` is visited.
pub fn enumerate_spectrum(
    fixed: &FixedParams,
    n_range: RangeInclusive<usize>,
    k: usize,
    l_max: Option<u32>,
    precision: f64,
) -> SpectrumGrid {
    let start = match fixed.mode() {
        Mode::QuantizeTension if k > 0 => (*n_range.start()).max(2 * k + 1),
        _ => *n_range.start(),
    };
    let points: Vec<(usize, u32)> = (start..=*n_range.end())
        .flat_map(|n| {
            let top = l_max.map_or(n as u32, |m| m.min(n as u32));
            (0..=top).map(move |l| (n, l))
        })
        .collect();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(n, l)| (n, l, compute_entry(&QuantizationProblem::new(n, l, fixed.clone()), k, precision)))
        .collect();
    let mut grid = SpectrumGrid::default();
    for (n, l, r) in results {
        match r {
            Ok(e) => grid.entries.push(e),
            Err(error) => grid.skipped.push(SkippedEntry { n, l, error }),
        }
    }
    grid
}

/// `c(N, L=N) - c(N, L=0)` for the selected `QuantizeC` roots.
pub fn gap_table(a: &crate::rational::Q, b: &crate::rational::Q, n_range: RangeInclusive<usize>, precision: f64) -> Result<Vec<(usize, f64)>> {
    let fixed = FixedParams::C { a: a.clone(), b: b.clone() };
    n_range
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let top = compute_entry(&QuantizationProblem::new(n, n as u32, fixed.clone()), 0, precision)?;
            let bottom = compute_entry(&QuantizationProblem::new(n, 0, fixed.clone()), 0, precision)?;
            Ok((n, top.selected_root - bottom.selected_root))
        })
        .collect()
}

pub const CSV_HEADER: &str = "mode,N,L,K,selected_root,eigenvalue,root_index,n_real_roots";

pub fn to_csv(entries: &[SpectrumEntry]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.mode.tag(),
            e.n,
            e.l,
            e.k,
            format_sig(e.selected_root, 12),
            format_sig(e.eigenvalue, 12),
            e.root_index,
            e.all_roots.len()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::rootfind::DEFAULT_PRECISION;

    #[test]
    fn ground_state_energy() {
        let fixed = FixedParams::C { a: q(2, 5), b: qi(1) };
        let e = compute_entry(&QuantizationProblem::new(0, 0, fixed.clone()), 0, DEFAULT_PRECISION).unwrap();
        assert!((e.selected_root - 2.5).abs() < 1e-12);
        assert!((e.eigenvalue - 7.46).abs() < 1e-10);
        assert_eq!(e.eigenfunction.d, vec![1.0]);
        let r = 0.8;
        let want = (-2.5 * r * r / 2.0 - r / 5.0f64).exp();
        assert!((radial_wavefunction(&e, r, &fixed, 1.0) - want).abs() < 1e-12);
    }

    #[test]
    fn scaled_ground_state() {
        let a = 0.9;
        assert!((eigenvalue(Mode::QuantizeB, a, 0, 0, &FixedParams::B { a_bold: q(9, 10) }) - (3.0 - a * a / 4.0)).abs() < 1e-15);
        let fixed = FixedParams::B { a_bold: q(9, 10) };
        let e = compute_entry(&QuantizationProblem::new(0, 0, fixed), 0, DEFAULT_PRECISION).unwrap();
        assert!((e.selected_root - 0.9).abs() < 1e-12);
    }

    #[test]
    fn harmonic_ladder_without_linear_term() {
        let fixed = FixedParams::C { a: qi(1), b: qi(0) };
        assert_eq!(eigenvalue(Mode::QuantizeC, 2.0, 3, 1, &fixed), 2.0 * 2.0 * 5.5);
    }

    #[test]
    fn first_excited_eigenfunction() {
        let (a, b) = (0.4f64, 1.0f64);
        for l in [0u32, 1] {
            let fixed = FixedParams::C { a: q(2, 5), b: qi(1) };
            let e = compute_entry(&QuantizationProblem::new(1, l, fixed.clone()), 0, DEFAULT_PRECISION).unwrap();
            let c = e.selected_root;
            let lf = l as f64;
            let d1 = b * (lf + 1.0 - a * c / b) / (2.0 * (lf + 1.0) * c.powf(1.5));
            assert!((e.eigenfunction.d[1] - d1).abs() < 1e-12);
            // R(r) = r^L (1 + (b/c - a/(L+1)) r/2) exp(...)
            let r = 0.7f64;
            let want = r.powi(l as i32) * (1.0 + 0.5 * (b / c - a / (lf + 1.0)) * r) * (-c * r * r / 2.0 - b * r / (2.0 * c)).exp();
            assert!((radial_wavefunction(&e, r, &fixed, 1.0) - want).abs() < 1e-12);
            assert_eq!(radial_wavefunction(&e, 0.0, &fixed, 1.0), if l == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn selection_rules() {
        let c = compute_entry(&QuantizationProblem::new(10, 10, FixedParams::C { a: qi(1), b: q(1, 10) }), 0, DEFAULT_PRECISION).unwrap();
        assert!((c.selected_root - 0.0744463).abs() < 5e-8);
        let b = compute_entry(&QuantizationProblem::new(10, 10, FixedParams::B { a_bold: qi(1) }), 0, DEFAULT_PRECISION).unwrap();
        assert!((b.selected_root - 4.74264).abs() < 5e-6);
        assert_eq!(b.root_index, 10);
        let t = compute_entry(&QuantizationProblem::new(10, 10, FixedParams::Tension { m: qi(1) }), 0, DEFAULT_PRECISION).unwrap();
        assert!((t.selected_root - 0.366018).abs() < 5e-7);
        let t4 = compute_entry(&QuantizationProblem::new(10, 10, FixedParams::Tension { m: qi(1) }), 4, DEFAULT_PRECISION).unwrap();
        assert!((t4.selected_root - 9.45702).abs() < 5e-6);
        let err = compute_entry(&QuantizationProblem::new(10, 10, FixedParams::Tension { m: qi(1) }), 5, DEFAULT_PRECISION);
        assert!(matches!(err, Err(Error::NoAdmissibleRoot(_))));
    }

    #[test]
    fn degenerate_grids_skip_ground_state() {
        for fixed in [FixedParams::C { a: qi(0), b: qi(1) }, FixedParams::C { a: qi(1), b: qi(0) }, FixedParams::Tension { m: qi(1) }] {
            let g = enumerate_spectrum(&fixed, 0..=2, 0, None, DEFAULT_PRECISION);
            assert!(g.entries.iter().all(|e| e.n > 0));
            assert!(g.skipped.iter().any(|s| s.n == 0));
        }
    }

    #[test]
    fn csv_rows() {
        let g = enumerate_spectrum(&FixedParams::B { a_bold: qi(1) }, 0..=2, 0, None, DEFAULT_PRECISION);
        assert_eq!(g.entries.len(), 6);
        let csv = to_csv(&g.entries);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("B,0,0,0,1,"));
    }
}
