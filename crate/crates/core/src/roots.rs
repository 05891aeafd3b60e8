//! Complex roots of P − w for integer polynomials P.
//!
//! Simultaneous Aberth iteration from a fixed starting configuration, then
//! Newton polishing of isolated roots. Evaluation is compensated and falls
//! back to exact dyadic arithmetic under heavy cancellation, so clustered
//! (double) roots still resolve to about 1e-15.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::PolyEvaluator;
use crate::farey::Slope;
use crate::poly::{trace_polys, IntPoly};

/// Relative rounding of double-double Horner, with some slack.
const DD_EPS: f64 = 1.0e-31;

/// Roots closer than this are reported as one cluster.
pub const CLUSTER_DISTANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCluster {
    #[serde(with = "crate::serde_c64")]
    pub center: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub source: String,
    #[serde(with = "crate::serde_c64")]
    pub level: Complex64,
    #[serde(with = "crate::serde_c64::vec")]
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<RootCluster>,
    pub iterations: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for z in &self.roots {
            out.push_str(&format!("{:.17e},{:.17e}\n", z.re, z.im));
        }
        out
    }
}

/// Unique positive root of |a_n| x^n = Σ_{k<n} |a_k| x^k, found by bisection
/// on log x so huge coefficients cannot overflow.
fn cauchy_bound(abs: &[f64]) -> f64 {
    let n = abs.len() - 1;
    let lead = abs[n];
    let rel: Vec<f64> = abs[..n].iter().map(|a| a / lead).collect();
    if rel.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    // h(x) = Σ_{k<n} rel_k x^(k−n) − 1 is strictly decreasing in x.
    let h = |x: f64| -> f64 {
        let inv = 1.0 / x;
        let mut acc = 0.0;
        for &a in rel.iter() {
            acc = (acc + a) * inv;
        }
        acc - 1.0
    };
    let upper = 1.0 + rel.iter().copied().fold(0.0, f64::max);
    let (mut lo, mut hi) = ((upper * 1e-300).max(1e-300).ln(), upper.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = h(mid.exp());
        if v.is_nan() || v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    hi.exp()
}

/// Value and derivative of poly − w, with an estimate of the rounding noise
/// in the value. Falls back to exact arithmetic once double-double
/// cancellation would swamp the value.
fn level_eval(
    ev: &PolyEvaluator,
    z: Complex64,
    w: Complex64,
) -> Result<(Complex64, Complex64, f64)> {
    let r = z.norm();
    let (mut v, mut d) = ev.eval_level_with_derivative(z, w)?;
    let dd_noise = DD_EPS * (ev.abs_sum(r) + w.norm());
    if dd_noise > 1e-3 * v.norm() {
        (v, d) = ev.eval_level_exact_with_derivative(z, w);
        if !(v.re.is_finite() && v.im.is_finite() && d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Overflow {
                degree: ev.degree(),
            });
        }
        return Ok((v, d, 8.0 * f64::EPSILON * r * d.norm()));
    }
    Ok((v, d, 8.0 * (dd_noise + f64::EPSILON * r * d.norm())))
}

fn initial_points(n: usize, radius: f64) -> Vec<Complex64> {
    // Golden-ratio phase offset keeps the start off every symmetry axis.
    let offset = (5f64.sqrt() - 1.0) / 2.0;
    (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + offset) / n as f64))
        .collect()
}

/// All complex roots of `poly − w`.
///
/// `tol` bounds every reported residual |poly(z) − w|; exceeding it is a
/// `NonConvergence` error.
pub fn solve_level(poly: &IntPoly, w: Complex64, tol: f64) -> Result<RootSet> {
    let n = match poly.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::InvalidInput("root finding needs degree >= 1".into())),
    };
    let ev = poly.evaluator();
    let mut abs: Vec<f64> = ev.coeffs_f64().iter().map(|c| c.abs()).collect();
    abs[0] = Complex64::new(ev.coeffs_f64()[0] - w.re, -w.im).norm();
    let bound = cauchy_bound(&abs);
    let radius = if bound > 0.0 { bound } else { 1.0 };
    let mut z = initial_points(n, radius);

    let max_iter = 500 + 20 * n;
    let mut converged = vec![false; n];
    let mut iterations = 0;
    let scale = radius.max(1.0);
    while iterations < max_iter && converged.iter().any(|c| !c) {
        iterations += 1;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let (v, d, noise) = level_eval(&ev, z[k], w)?;
            if v == Complex64::new(0.0, 0.0) {
                converged[k] = true;
                continue;
            }
            let ratio = v / d;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Coincident approximations or a zero derivative: nudge.
                step = Complex64::new(radius * 1e-3, radius * 1e-3);
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm() + 1e-16 * scale || v.norm() <= noise
            {
                converged[k] = true;
            }
        }
    }
    if converged.iter().any(|c| !c) {
        return Err(Error::NonConvergence { iterations });
    }

    let clusters = cluster(&z);
    // Newton polish for isolated roots only; the cluster members are already
    // as good as the arithmetic allows.
    for c in &clusters {
        if c.members.len() != 1 {
            continue;
        }
        let k = c.members[0];
        for _ in 0..4 {
            let (v, d, _) = level_eval(&ev, z[k], w)?;
            if d == Complex64::new(0.0, 0.0) {
                break;
            }
            let cand = z[k] - v / d;
            let (vc, _, _) = level_eval(&ev, cand, w)?;
            if vc.norm() < v.norm() {
                z[k] = cand;
            } else {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        z[a].re
            .total_cmp(&z[b].re)
            .then(z[a].im.total_cmp(&z[b].im))
    });
    let roots: Vec<Complex64> = order.iter().map(|&k| z[k]).collect();
    let residuals = roots
        .iter()
        .map(|&r| ev.eval_level_exact(r, w).norm())
        .collect::<Vec<f64>>();
    if residuals.iter().any(|&r| !(r <= tol)) {
        return Err(Error::NonConvergence { iterations });
    }
    let clusters = cluster(&roots)
        .into_iter()
        .map(|c| RootCluster {
            center: c.members.iter().map(|&k| roots[k]).sum::<Complex64>() / c.members.len() as f64,
            multiplicity: c.members.len(),
        })
        .collect();
    Ok(RootSet {
        source: format!("{poly} = {}", fmt_c(w)),
        level: w,
        roots,
        residuals,
        clusters,
        iterations,
    })
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

struct Cluster {
    members: Vec<usize>,
}

/// Single-linkage grouping at `CLUSTER_DISTANCE`, in index order.
fn cluster(z: &[Complex64]) -> Vec<Cluster> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() < CLUSTER_DISTANCE {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<Cluster> = Vec::new();
    let mut root_index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_index[r] == usize::MAX {
            root_index[r] = out.len();
            out.push(Cluster { members: vec![] });
        }
        out[root_index[r]].members.push(i);
    }
    out
}

/// Roots of Q_{p/q} = w for a slope, with the slope recorded as the source.
pub fn solve_farey_level(slope: Slope, w: Complex64, tol: f64) -> Result<RootSet> {
    let q = trace_polys(slope).q;
    let mut rs = solve_level(&q, w, tol)?;
    rs.source = format!("Q_{slope} = {}", fmt_c(w));
    Ok(rs)
}

/// A cusp point μ with P_{p/q}(μ) = −2, located at the end of the pleating
/// ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspPoint {
    pub slope: Slope,
    #[serde(with = "crate::serde_c64")]
    pub mu: Complex64,
    pub residual: f64,
}

/// Cusp of the canonical (upper) pleating ray.
pub fn cusp_point(slope: Slope) -> Result<CuspPoint> {
    crate::rays::trace_ray(slope, -4.0, 8).map(|r| r.cusp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub r: u32,
    /// Trace value −2cos(2π/r) (or 2 + 4cos²(π/r) for the positive family).
    pub trace: f64,
    pub mus: RootSet,
}

/// Trace levels on the pleating-ray extension where discrete groups may
/// occur, with every μ solving P_{p/q}(μ) = level.
pub fn ray_extension_spectrum(
    slope: Slope,
    r_max: u32,
    include_positive: bool,
    tol: f64,
) -> Result<Vec<SpectrumLevel>> {
    if r_max < 3 {
        return Err(Error::InvalidInput("r_max must be at least 3".into()));
    }
    let p = trace_polys(slope).p;
    let mut out = Vec::new();
    for r in 3..=r_max {
        let mut levels = vec![-2.0 * (2.0 * PI / r as f64).cos()];
        if include_positive {
            levels.push(2.0 + 4.0 * (PI / r as f64).cos().powi(2));
        }
        for level in levels {
            let mut mus = solve_level(&p, Complex64::new(level, 0.0), tol)?;
            mus.source = format!("P_{slope} = {level}");
            out.push(SpectrumLevel {
                r,
                trace: level,
                mus,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::enumerate_slopes;
    use num_traits::ToPrimitive;

    fn s(p: u32, q: u32) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn has_root(rs: &RootSet, z: Complex64, tol: f64) -> bool {
        rs.roots.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn double_roots_of_q34() {
        let q = trace_polys(s(3, 4)).q;
        let rs = solve_level(&q, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(rs.roots.len(), 4);
        let mut mult: Vec<(i64, usize)> = rs
            .clusters
            .iter()
            .map(|cl| (cl.center.re.round() as i64, cl.multiplicity))
            .collect();
        mult.sort();
        assert_eq!(mult, vec![(0, 2), (2, 2)]);
        for cl in &rs.clusters {
            assert!((cl.center - c(cl.center.re.round(), 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn level_minus_four() {
        let q = trace_polys(s(1, 2)).q;
        let rs = solve_level(&q, c(-4.0, 0.0), 1e-10).unwrap();
        assert!(has_root(&rs, c(0.0, 2.0), 1e-12));
        assert!(has_root(&rs, c(0.0, -2.0), 1e-12));

        let q = trace_polys(s(2, 3)).q;
        let rs = solve_level(&q, c(-4.0, 0.0), 1e-10).unwrap();
        assert!(has_root(&rs, c(1.5, 7f64.sqrt() / 2.0), 1e-12));
    }

    #[test]
    fn residuals_and_vieta() {
        for slope in enumerate_slopes(16) {
            let q = trace_polys(slope).q;
            let rs = solve_level(&q, c(0.0, 0.0), 1e-10).unwrap();
            assert_eq!(rs.roots.len(), slope.q() as usize);
            assert!(rs.max_residual() <= 1e-10, "{slope}: {}", rs.max_residual());
            let n = slope.q() as usize;
            let expect = -(q.coeff(n - 1).to_f64().unwrap()) / q.coeff(n).to_f64().unwrap();
            let sum: Complex64 = rs.roots.iter().sum();
            assert!((sum - c(expect, 0.0)).norm() < 1e-8, "{slope}");
        }
    }

    #[test]
    fn degree_sixty() {
        let q = trace_polys(s(7, 60)).q;
        let rs = solve_level(&q, c(-4.0, 0.0), 1e-10).unwrap();
        assert_eq!(rs.roots.len(), 60);
        assert!(rs.max_residual() <= 1e-10);
    }

    #[test]
    fn deterministic() {
        let q = trace_polys(s(5, 13)).q;
        let a = solve_level(&q, c(-4.0, 0.0), 1e-10).unwrap();
        let b = solve_level(&q, c(-4.0, 0.0), 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_constant() {
        assert!(solve_level(&IntPoly::constant(3), c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn cauchy_bound_of_monic_quadratic() {
        // x² = 2x + 3 → x = 3
        let b = cauchy_bound(&[3.0, 2.0, 1.0]);
        assert!((b - 3.0).abs() < 1e-9);
        assert_eq!(cauchy_bound(&[0.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn spectrum_levels() {
        let sp = ray_extension_spectrum(s(1, 1), 4, false, 1e-10).unwrap();
        assert!((sp[0].trace - 1.0).abs() < 1e-15);
        assert!(sp[1].trace.abs() < 1e-15);
        // P_{1/1} = 2 − μ = 1 → μ = 1
        assert!((sp[0].mus.roots[0] - c(1.0, 0.0)).norm() < 1e-12);
        let sp = ray_extension_spectrum(s(1, 2), 3, true, 1e-10).unwrap();
        assert_eq!(sp.len(), 2);
        assert!((sp[1].trace - 3.0).abs() < 1e-12);
        assert!(ray_extension_spectrum(s(1, 2), 2, false, 1e-10).is_err());
    }

    #[test]
    fn csv_header() {
        let rs = solve_level(&IntPoly::from_i64s(&[-1, 1]), c(0.0, 0.0), 1e-12).unwrap();
        assert!(rs.to_csv().starts_with("re,im\n1.0"));
    }
}
