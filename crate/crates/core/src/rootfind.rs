//! Real-root isolation by Sturm sequences on exact polynomials, and
//! refinement to a requested enclosure width.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::charpoly::CharPolynomial;
use crate::error::{Error, Result};
use crate::poly::{cauchy_bound, Poly, SturmChain};
use crate::rational::{from_f64, rational_string, to_decimal_string, to_f64, Q};

pub const DEFAULT_PRECISION: f64 = 1e-12;

/// An interval `(lo, hi)` holding exactly one distinct real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Q,
    pub hi: Q,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub lo: Q,
    pub hi: Q,
    pub value: f64,
    pub multiplicity: u32,
}

impl Root {
    pub fn half_width(&self) -> Q {
        (&self.hi - &self.lo) / Q::from_integer(BigInt::from(2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub poly_ref: String,
    pub precision: f64,
}

impl RootSet {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct RootDoc {
            lo: String,
            hi: String,
            value: String,
            multiplicity: u32,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            poly_ref: &'a str,
            precision: f64,
            roots: Vec<RootDoc>,
        }
        let doc = Doc {
            poly_ref: &self.poly_ref,
            precision: self.precision,
            roots: self
                .roots
                .iter()
                .map(|r| RootDoc {
                    lo: rational_string(&r.lo),
                    hi: rational_string(&r.hi),
                    value: to_decimal_string(&((&r.lo + &r.hi) / Q::from_integer(BigInt::from(2))), 17),
                    multiplicity: r.multiplicity,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

/// A point strictly inside `(lo, hi)` near the midpoint where `p` does not vanish.
fn split_point(p: &Poly, lo: &Q, hi: &Q) -> Q {
    let mid = (lo + hi) * half();
    if p.sign_at(&mid) != 0 {
        return mid;
    }
    let mut step = (hi - lo) * half() * half();
    loop {
        step = step * half();
        let cand = &mid + &step;
        if p.sign_at(&cand) != 0 {
            return cand;
        }
    }
}

/// Disjoint isolating intervals, in ascending order, for every distinct real root.
pub fn isolate_real_roots(p: &Poly) -> Vec<Enclosure> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let f = p.primitive();
    let mut sturm = SturmChain::new(&f);
    let square_free = sturm.last_degree() == 0;
    let g = if square_free {
        f
    } else {
        let g = f.square_free_part();
        sturm = SturmChain::new(&g);
        g
    };
    let bound = cauchy_bound(&g);
    let lo = -bound.clone();
    let mut out = Vec::new();
    let total = sturm.count(&lo, &bound);
    let mut stack = vec![(lo, bound, total)];
    while let Some((lo, hi, count)) = stack.pop() {
        match count {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = split_point(&g, &lo, &hi);
                let left = sturm.count(&lo, &mid);
                // Right half first on the stack so the left half pops first.
                stack.push((mid.clone(), hi, count - left));
                stack.push((lo, mid, left));
            }
        }
    }
    if square_free {
        return out.into_iter().map(|(lo, hi)| Enclosure { lo, hi, multiplicity: 1 }).collect();
    }
    let factors: Vec<(u32, SturmChain)> = p
        .square_free_factors()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| f.degree() > 0)
        .map(|(i, f)| (i as u32 + 1, SturmChain::new(&f)))
        .collect();
    out.into_iter()
        .map(|(lo, hi)| {
            let multiplicity = factors
                .iter()
                .find(|(_, s)| s.count(&lo, &hi) > 0)
                .map(|(m, _)| *m)
                .unwrap_or(1);
            Enclosure { lo, hi, multiplicity }
        })
        .collect()
}

/// Shrinks an isolating interval of a root of `p` to width at most `2 * precision`.
///
/// Bisection on exact signs; a floating Newton step is tried periodically and
/// accepted only if a tight exact bracket around its result verifies.
pub fn refine_root(p: &Poly, enclosure: &Enclosure, precision: f64) -> Result<Root> {
    let g = if enclosure.multiplicity > 1 { p.square_free_part() } else { p.primitive() };
    let mut lo = enclosure.lo.clone();
    let mut hi = enclosure.hi.clone();
    let s_lo = g.sign_at(&lo);
    let s_hi = g.sign_at(&hi);
    if s_lo * s_hi >= 0 {
        return Err(Error::NoSignChange);
    }
    // Pin zero as an endpoint so the sign of the root is readable from the enclosure.
    if lo < Q::zero() && hi > Q::zero() {
        match g.sign_at(&Q::zero()) {
            0 => {}
            s if s == s_lo => lo = Q::zero(),
            _ => hi = Q::zero(),
        }
    }
    let prec = from_f64(precision.abs());
    let target = &prec * Q::from_integer(BigInt::from(2));
    let dg = g.derivative();
    let mut iter = 0usize;
    while &hi - &lo > target {
        iter += 1;
        if iter % 4 == 1 {
            if let Some((a, b)) = newton_bracket(&g, &dg, &lo, &hi, s_lo, precision) {
                lo = a;
                hi = b;
                continue;
            }
        }
        let mid = (&lo + &hi) * half();
        match g.sign_at(&mid) {
            0 => {
                let delta = &prec * half();
                let a = &mid - &delta;
                let b = &mid + &delta;
                lo = if a > lo { a } else { lo };
                hi = if b < hi { b } else { hi };
                break;
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    let value = to_f64(&((&lo + &hi) * half()));
    Ok(Root { lo, hi, value, multiplicity: enclosure.multiplicity })
}

fn newton_bracket(g: &Poly, dg: &Poly, lo: &Q, hi: &Q, s_lo: i32, precision: f64) -> Option<(Q, Q)> {
    let (lo_f, hi_f) = (to_f64(lo), to_f64(hi));
    let mut x = 0.5 * (lo_f + hi_f);
    for _ in 0..4 {
        let step = g.eval_f64(x) / dg.eval_f64(x);
        if !step.is_finite() {
            return None;
        }
        x -= step;
    }
    if !(x > lo_f && x < hi_f) {
        return None;
    }
    let delta = 0.25 * precision.max(x.abs() * f64::EPSILON * 4.0);
    let a = from_f64(x - delta);
    let b = from_f64(x + delta);
    if &a <= lo || &b >= hi || a >= b {
        return None;
    }
    let (sa, sb) = (g.sign_at(&a), g.sign_at(&b));
    (sa == s_lo && sb == -s_lo).then_some((a, b))
}

/// Isolates and refines every real root of `p`.
pub fn real_roots(p: &Poly, precision: f64) -> Result<Vec<Root>> {
    isolate_real_roots(p)
        .iter()
        .map(|e| refine_root(p, e, precision))
        .collect()
}

pub fn find_roots(cp: &CharPolynomial, precision: f64) -> Result<RootSet> {
    Ok(RootSet { roots: real_roots(&cp.poly, precision)?, poly_ref: poly_ref(cp), precision })
}

pub fn poly_ref(cp: &CharPolynomial) -> String {
    let q = &cp.problem;
    let fixed: Vec<String> = q.fixed.entries().iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}:N={}:L={}:{}", q.mode().tag(), q.n, q.l, fixed.join(":"))
}

/// Exact value of `p` at a root enclosure's endpoints, for soundness checks.
pub fn endpoint_signs(p: &Poly, root: &Root) -> (i32, i32) {
    (p.sign_at(&root.lo), p.sign_at(&root.hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::{build_charpoly, FixedParams, QuantizationProblem};
    use crate::rational::{q, qi};

    #[test]
    fn linear_root() {
        let p = Poly::new(vec![-q(1, 10), qi(1)]);
        let iso = isolate_real_roots(&p);
        assert_eq!(iso.len(), 1);
        assert!(iso[0].lo < q(1, 10) && q(1, 10) < iso[0].hi);
        let r = refine_root(&p, &iso[0], 1e-12).unwrap();
        assert!((r.value - 0.1).abs() < 1e-12);
        assert!(&r.hi - &r.lo <= from_f64(2e-12));
    }

    #[test]
    fn double_root_multiplicity() {
        let p = Poly::from_ints(&[4, -4, 1]);
        let roots = real_roots(&p, 1e-12).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_dyadic_roots_are_enclosed() {
        // (x - 1/2)(x + 3)(x - 1)
        let p = Poly::new(vec![-q(1, 2), qi(1)]).mul(&Poly::from_ints(&[3, 1])).mul(&Poly::from_ints(&[-1, 1]));
        let roots = real_roots(&p, 1e-10).unwrap();
        let v = roots.iter().map(|r| r.value).collect::<Vec<_>>();
        assert_eq!(v.len(), 3);
        for (got, want) in v.iter().zip([-3.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        for r in &roots {
            let (a, b) = endpoint_signs(&p, r);
            assert!(a * b < 0);
        }
    }

    #[test]
    fn no_sign_change() {
        let p = Poly::from_ints(&[-1, 0, 1]);
        let e = Enclosure { lo: qi(2), hi: qi(3), multiplicity: 1 };
        assert_eq!(refine_root(&p, &e, 1e-9), Err(Error::NoSignChange));
    }

    #[test]
    fn tension_count() {
        let cp = build_charpoly(&QuantizationProblem::new(10, 10, FixedParams::Tension { m: qi(1) })).unwrap();
        let rs = find_roots(&cp, DEFAULT_PRECISION).unwrap();
        assert_eq!(rs.len(), 5);
        assert_eq!(rs.poly_ref, "tension:N=10:L=10:m=1");
        let doc: serde_json::Value = serde_json::from_str(&rs.to_json()).unwrap();
        assert_eq!(doc["roots"].as_array().unwrap().len(), 5);
        assert!(doc["roots"][0]["value"].as_str().unwrap().starts_with("0.36601846"));
    }
}
