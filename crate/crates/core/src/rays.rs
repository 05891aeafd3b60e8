//! Rational pleating rays: continuation of the branch of P_{p/q}⁻¹ on
//! (−∞, −2], certification of the half-plane neighbourhood
//! {Re P < −2} around a ray, and general level-curve tracing.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::continuation::{newton, track, track_polyline};
use crate::error::{Error, Result};
use crate::eval::PolyEvaluator;
use crate::farey::Slope;
use crate::poly::{trace_polys, FareyPolyPair};
use crate::roots::{solve_level, CuspPoint};

/// Margin on the open condition Re P < −2.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Relative distance within which a continued branch is said to land on
/// the query point.
pub const LANDING_TOL: f64 = 1e-8;
/// Radius of the arcs taken around critical values of P.
pub const DETOUR_RADIUS: f64 = 1e-3;
/// Residual required of a landed cusp.
pub const CUSP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticDirections {
    pub slope: Slope,
    /// All q angles θ in (−π, π] with lead(Q)·e^{iqθ} < 0, ascending.
    pub angles: Vec<f64>,
    pub canonical: f64,
    /// Whether π(q−p)/q itself was admissible. When false, `canonical` is
    /// the admissible angle closest to it.
    pub rule_admissible: bool,
}

fn wrap_angle(mut a: f64) -> f64 {
    while a <= -PI {
        a += 2.0 * PI;
    }
    while a > PI {
        a -= 2.0 * PI;
    }
    a
}

fn directions_for(slope: Slope, lead_positive: bool) -> AsymptoticDirections {
    let q = slope.q() as f64;
    let mut angles: Vec<f64> = (0..slope.q())
        .map(|k| {
            let base = if lead_positive { PI } else { 0.0 };
            wrap_angle((base + 2.0 * PI * k as f64) / q)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let rule = PI * (slope.q() - slope.p()) as f64 / q;
    // lead · e^{iqθ} = lead · (−1)^{q−p} at θ = π(q−p)/q.
    let parity_negative = (slope.q() - slope.p()) % 2 == 1;
    let rule_admissible = lead_positive == parity_negative;
    let canonical = if rule_admissible {
        rule
    } else {
        *angles
            .iter()
            .min_by(|a, b| (*a - rule).abs().total_cmp(&(*b - rule).abs()))
            .expect("q >= 1")
    };
    AsymptoticDirections {
        slope,
        angles,
        canonical,
        rule_admissible,
    }
}

pub fn asymptotic_directions(slope: Slope) -> AsymptoticDirections {
    let lead = trace_polys(slope).q.leading();
    directions_for(slope, lead.is_positive())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySample {
    pub t: f64,
    #[serde(with = "crate::serde_c64")]
    pub mu: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ray {
    pub slope: Slope,
    pub branch: Branch,
    pub samples: Vec<RaySample>,
    pub cusp: CuspPoint,
}

impl Ray {
    /// The mirror image under complex conjugation.
    pub fn conjugate(&self) -> Ray {
        Ray {
            slope: self.slope,
            branch: match self.branch {
                Branch::Upper => Branch::Lower,
                Branch::Lower => Branch::Upper,
            },
            samples: self
                .samples
                .iter()
                .map(|s| RaySample {
                    t: s.t,
                    mu: s.mu.conj(),
                })
                .collect(),
            cusp: CuspPoint {
                mu: self.cusp.mu.conj(),
                ..self.cusp
            },
        }
    }

    /// `t,re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for s in &self.samples {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", s.t, s.mu.re, s.mu.im));
        }
        out
    }
}

/// Per-slope data shared by ray tracing and neighbourhood tests: the Farey
/// polynomials, their evaluators, the critical values of P and a cache of
/// points along the upper ray.
#[derive(Debug, Clone)]
pub struct SlopeData {
    pub slope: Slope,
    pub polys: FareyPolyPair,
    pub p_eval: PolyEvaluator,
    pub q_eval: PolyEvaluator,
    pub directions: AsymptoticDirections,
    pub critical_values: Vec<Complex64>,
    /// (t, μ(t)) for t from about −2 − 10⁶ up to −2 − 10⁻³, ascending t.
    ray_cache: Vec<(f64, Complex64)>,
    cusp: CuspPoint,
}

const CACHE_LOG_MAX: f64 = 6.0;
const CACHE_LOG_MIN: f64 = -3.0;
const CACHE_LOG_STEP: f64 = 0.125;

impl SlopeData {
    pub fn new(slope: Slope) -> Result<Self> {
        let polys = trace_polys(slope);
        let p_eval = polys.p.evaluator();
        let q_eval = polys.q.evaluator();
        let directions = directions_for(slope, polys.q.leading().is_positive());
        let critical_values = if slope.q() >= 2 {
            let dp = polys.p.derivative();
            let crit = solve_level(&dp, Complex64::new(0.0, 0.0), f64::INFINITY)?;
            let mut cv: Vec<Complex64> = Vec::new();
            for cl in &crit.clusters {
                let v = p_eval.eval(cl.center)?;
                cv.push(v);
            }
            cv
        } else {
            Vec::new()
        };
        let mut data = SlopeData {
            slope,
            polys,
            p_eval,
            q_eval,
            directions,
            critical_values,
            ray_cache: Vec::new(),
            cusp: CuspPoint {
                slope,
                mu: Complex64::new(f64::NAN, f64::NAN),
                residual: f64::NAN,
            },
        };
        let n = ((CACHE_LOG_MAX - CACHE_LOG_MIN) / CACHE_LOG_STEP).round() as usize;
        let ts: Vec<f64> = (0..=n)
            .map(|k| -2.0 - 10f64.powf(CACHE_LOG_MAX - k as f64 * CACHE_LOG_STEP))
            .collect();
        let start = data.seed_at(ts[0])?;
        let mut rec = Vec::with_capacity(ts.len() + 1);
        rec.push((ts[0], start));
        let mut z = start;
        for pair in ts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            z = track(
                &data.p_eval,
                z,
                |s| Complex64::new(a + (b - a) * s, 0.0),
                &[],
                None,
            )?;
            rec.push((b, z));
        }
        let last = rec.last().expect("non-empty").1;
        let cusp = track(
            &data.p_eval,
            last,
            |s| Complex64::new(ts[n] + (-2.0 - ts[n]) * s, 0.0),
            &[],
            None,
        )?;
        data.cusp = data.polish_cusp(cusp)?;
        data.ray_cache = rec;
        Ok(data)
    }

    pub fn cusp(&self) -> CuspPoint {
        self.cusp
    }

    fn mean_root(&self) -> Complex64 {
        let n = self.slope.q() as usize;
        let lead = self.polys.p.coeff(n).to_f64().unwrap_or(1.0);
        let sub = self.polys.p.coeff(n - 1).to_f64().unwrap_or(0.0);
        Complex64::new(-sub / (n as f64 * lead), 0.0)
    }

    /// Ray point at a very negative t, started from the asymptotic form
    /// lead·(μ − m)^q ≈ t − 2 in the canonical direction and continued in
    /// σ = (2 − t)^{1/q}.
    fn seed_at(&self, t: f64) -> Result<Complex64> {
        let q = self.slope.q() as i32;
        let qf = q as f64;
        let lead = self.polys.q.leading().abs().to_f64().unwrap_or(1.0);
        let m = self.mean_root();
        let dir = Complex64::from_polar(1.0, self.directions.canonical);
        let sigma_end = (2.0 - t).powf(1.0 / qf);
        let spread = 4.0 + m.norm();
        let sigma_seed = (32.0 * qf * spread)
            .min(10f64.powf(250.0 / qf))
            .max(2.0 * sigma_end);
        let mu_at = |sigma: f64| m + dir * (sigma / lead.powf(1.0 / qf));
        let w_at = |sigma: f64| Complex64::new(2.0 - sigma.powi(q), 0.0);
        let (z0, _) = newton(&self.p_eval, mu_at(sigma_seed), w_at(sigma_seed)).ok_or(
            Error::ContinuationStalled {
                at: 0.0,
                min_step: crate::continuation::MIN_STEP,
            },
        )?;
        let drift = wrap_angle((z0 - m).arg() - self.directions.canonical).abs();
        if drift > PI / (2.0 * qf) {
            return Err(Error::ContinuationFailed);
        }
        track(
            &self.p_eval,
            z0,
            |s| w_at(sigma_seed + (sigma_end - sigma_seed) * s),
            &[],
            None,
        )
    }

    fn polish_cusp(&self, z: Complex64) -> Result<CuspPoint> {
        let w = Complex64::new(-2.0, 0.0);
        let mu = newton(&self.p_eval, z, w).map(|r| r.0).unwrap_or(z);
        let mu = if mu.im < 0.0 && mu.im.abs() < 1e-14 {
            Complex64::new(mu.re, 0.0)
        } else {
            mu
        };
        let residual = (self.p_eval.eval(mu)? - w).norm();
        if !(residual <= CUSP_TOL) {
            return Err(Error::CuspMismatch {
                slope: self.slope.to_string(),
                residual,
            });
        }
        Ok(CuspPoint {
            slope: self.slope,
            mu,
            residual,
        })
    }

    /// Upper-ray point μ(t) for any t < −2.
    pub fn ray_point(&self, t: f64) -> Result<Complex64> {
        if !(t < -2.0) {
            return Err(Error::InvalidInput(format!(
                "ray parameter {t} must be below -2"
            )));
        }
        let (t0, z0) = self.nearest_cached(t);
        if (t0 - t).abs() == 0.0 {
            return Ok(z0);
        }
        track(
            &self.p_eval,
            z0,
            |s| Complex64::new(t0 + (t - t0) * s, 0.0),
            &[],
            None,
        )
    }

    fn nearest_cached(&self, t: f64) -> (f64, Complex64) {
        let first = self.ray_cache[0];
        if t <= first.0 {
            return first;
        }
        *self
            .ray_cache
            .iter()
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .expect("cache is non-empty")
    }

    pub fn trace_ray(&self, t_start: f64, steps: usize) -> Result<Ray> {
        if !(t_start <= -4.0) || steps == 0 {
            return Err(Error::InvalidInput(
                "trace_ray needs t_start <= -4 and steps >= 1".into(),
            ));
        }
        let z0 = if t_start < self.ray_cache[0].0 {
            self.seed_at(t_start)?
        } else {
            self.ray_point(t_start)?
        };
        let nodes: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let span = -2.0 - t_start;
        let mut rec = Vec::with_capacity(steps + 1);
        let end = track(
            &self.p_eval,
            z0,
            |s| Complex64::new(t_start + span * s, 0.0),
            &nodes,
            Some(&mut rec),
        )?;
        let cusp = self.polish_cusp(end)?;
        let mut samples: Vec<RaySample> = rec
            .into_iter()
            .map(|(s, mu)| RaySample {
                t: if s >= 1.0 { -2.0 } else { t_start + span * s },
                mu,
            })
            .collect();
        // Samples before the endpoint get a final Newton polish onto their level.
        for smp in samples.iter_mut() {
            if let Some((z, _)) = newton(&self.p_eval, smp.mu, Complex64::new(smp.t, 0.0)) {
                smp.mu = z;
            }
        }
        if let Some(last) = samples.last_mut() {
            last.mu = cusp.mu;
        }
        Ok(Ray {
            slope: self.slope,
            branch: Branch::Upper,
            samples,
            cusp,
        })
    }

    /// The w-plane polyline from `a` to `b` with arcs of `DETOUR_RADIUS`
    /// around nearby critical values, on the given side.
    fn detoured_path(&self, a: Complex64, b: Complex64, side: f64) -> Vec<Complex64> {
        let len = (b - a).norm();
        if len == 0.0 {
            return vec![a];
        }
        let u = (b - a) / len;
        let normal = u * Complex64::new(0.0, side);
        let mut hits: Vec<(f64, Complex64)> = self
            .critical_values
            .iter()
            .filter_map(|&cv| {
                let s = ((cv - a) * u.conj()).re;
                if s <= DETOUR_RADIUS || s >= len - DETOUR_RADIUS {
                    return None;
                }
                let dist = ((cv - a) * u.conj()).im.abs();
                (dist < DETOUR_RADIUS).then_some((s, cv))
            })
            .collect();
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut pts = vec![a];
        for (_, cv) in hits {
            // Enter and leave on the segment's line, pass on the chosen side.
            let proj = a + u * ((cv - a) * u.conj()).re;
            let entry = proj - u * (2.0 * DETOUR_RADIUS);
            let exit = proj + u * (2.0 * DETOUR_RADIUS);
            let apex = cv + normal * (2.0 * DETOUR_RADIUS);
            pts.push(entry);
            pts.push(entry + (apex - proj));
            pts.push(exit + (apex - proj));
            pts.push(exit);
        }
        pts.push(b);
        pts
    }

    /// Continues the upper-ray branch from a ray point to `target_w`,
    /// returning the w-plane waypoints and the landing point.
    fn continue_from_ray(
        &self,
        target_w: Complex64,
        side: f64,
    ) -> Result<(Vec<Complex64>, Complex64)> {
        let t_base = target_w.re.min(-2.0 - 1e-3);
        let (t0, z0) = if t_base < self.ray_cache[0].0 {
            (t_base, self.seed_at(t_base)?)
        } else {
            self.nearest_cached(t_base)
        };
        let path = self.detoured_path(Complex64::new(t0, 0.0), target_w, side);
        let landing = track_polyline(&self.p_eval, z0, &path)?;
        Ok((path, landing))
    }

    pub fn in_neighbourhood(&self, mu: Complex64) -> Result<NeighbourhoodResult> {
        if !(mu.re.is_finite() && mu.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite mu".into()));
        }
        let w = self.p_eval.eval(mu)?;
        let mut result = NeighbourhoodResult {
            slope: self.slope,
            mu,
            p_value: w,
            inside: false,
            branch: None,
            continuation_path: Vec::new(),
            landing: None,
        };
        if (w.re + 2.0).abs() < BOUNDARY_TOL {
            return Err(Error::BoundaryIndeterminate { tol: BOUNDARY_TOL });
        }
        if w.re > -2.0 {
            return Ok(result);
        }
        let mut any_path = false;
        let targets = [(Branch::Upper, mu), (Branch::Lower, mu.conj())];
        for (branch, target) in targets {
            if branch == Branch::Lower && mu.im == 0.0 {
                break;
            }
            let tw = if branch == Branch::Upper { w } else { w.conj() };
            for side in [1.0, -1.0] {
                let (path, landing) = match self.continue_from_ray(tw, side) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if path.iter().any(|p| !(p.re < -2.0)) {
                    continue;
                }
                any_path = true;
                let hit = (landing - target).norm() <= LANDING_TOL * target.norm().max(1.0);
                if hit || result.landing.is_none() {
                    let (landing, path) = match branch {
                        Branch::Upper => (landing, path),
                        Branch::Lower => (landing.conj(), path.iter().map(|p| p.conj()).collect()),
                    };
                    result.landing = Some(landing);
                    result.continuation_path = path;
                }
                if hit {
                    result.inside = true;
                    result.branch = Some(branch);
                    return Ok(result);
                }
                // A clean arrival elsewhere settles this branch.
                break;
            }
        }
        if !any_path {
            return Err(Error::ContinuationFailed);
        }
        Ok(result)
    }

    /// Preimage of a w-plane curve under the branch continued from the upper
    /// ray. The curve is sampled at `steps + 1` equally spaced parameters.
    pub fn trace_level_curve<F>(&self, curve: F, steps: usize) -> Result<Vec<Complex64>>
    where
        F: Fn(f64) -> Complex64,
    {
        let w0 = curve(0.0);
        let z0 = if w0.im == 0.0 && w0.re < -2.0 {
            self.ray_point(w0.re)?
        } else if w0 == Complex64::new(-2.0, 0.0) {
            self.cusp.mu
        } else {
            let (_, z) = self.continue_from_ray(w0, 1.0)?;
            z
        };
        let steps = steps.max(1);
        let nodes: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let degenerate = nodes.iter().all(|&s| curve(s) == w0);
        if degenerate {
            return Ok(vec![z0]);
        }
        let mut rec = Vec::with_capacity(steps + 1);
        track(&self.p_eval, z0, &curve, &nodes, Some(&mut rec))?;
        Ok(rec.into_iter().map(|(_, z)| z).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighbourhoodResult {
    pub slope: Slope,
    #[serde(with = "crate::serde_c64")]
    pub mu: Complex64,
    #[serde(with = "crate::serde_c64")]
    pub p_value: Complex64,
    pub inside: bool,
    pub branch: Option<Branch>,
    /// w-plane waypoints of the continuation, starting on the ray.
    #[serde(with = "crate::serde_c64::vec")]
    pub continuation_path: Vec<Complex64>,
    #[serde(serialize_with = "ser_opt_c64")]
    pub landing: Option<Complex64>,
}

fn ser_opt_c64<S: serde::Serializer>(
    z: &Option<Complex64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    z.map(|z| [z.re, z.im]).serialize(s)
}

pub fn trace_ray(slope: Slope, t_start: f64, steps: usize) -> Result<Ray> {
    SlopeData::new(slope)?.trace_ray(t_start, steps)
}

pub fn in_neighbourhood(slope: Slope, mu: Complex64) -> Result<NeighbourhoodResult> {
    SlopeData::new(slope)?.in_neighbourhood(mu)
}

pub fn trace_level_curve<F>(slope: Slope, curve: F, steps: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    SlopeData::new(slope)?.trace_level_curve(curve, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::enumerate_slopes;

    fn s(p: u32, q: u32) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn directions() {
        let d = asymptotic_directions(s(1, 2));
        assert_eq!(d.angles.len(), 2);
        assert!((d.angles[0] + PI / 2.0).abs() < 1e-15 && (d.angles[1] - PI / 2.0).abs() < 1e-15);
        assert!((d.canonical - PI / 2.0).abs() < 1e-15);
        let d = asymptotic_directions(s(1, 1));
        assert_eq!(d.angles, vec![0.0]);
        assert_eq!(d.canonical, 0.0);
        let d = asymptotic_directions(s(2, 3));
        assert!((d.canonical - PI / 3.0).abs() < 1e-15);
        assert!(d.rule_admissible);
    }

    #[test]
    fn rule_admissible_up_to_50() {
        for slope in enumerate_slopes(50) {
            assert!(asymptotic_directions(slope).rule_admissible, "{slope}");
        }
    }

    #[test]
    fn half_ray_closed_form() {
        let ray = trace_ray(s(1, 2), -6.0, 4).unwrap();
        assert!((ray.samples[0].mu - c(0.0, 8f64.sqrt())).norm() < 1e-12);
        assert!((ray.cusp.mu - c(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn table_cusps() {
        let table = [
            (1, 2, c(0.0, 2.0)),
            (4, 7, c(0.427505, 1.57557)),
            (3, 5, c(0.773301, 1.46771)),
            (5, 8, c(1.05642, 1.30324)),
            (2, 3, c(1.5, 7f64.sqrt() / 2.0)),
            (5, 7, c(1.85181, 0.911292)),
            (3, 4, c(2.27202, 0.786151)),
            (4, 5, c(2.75577, 0.474477)),
            (1, 1, c(4.0, 0.0)),
        ];
        for (p, q, want) in table {
            let d = SlopeData::new(s(p, q)).unwrap();
            let cusp = d.cusp();
            assert!((cusp.mu - want).norm() < 1e-4, "{p}/{q}: {}", cusp.mu);
            assert!(cusp.residual <= CUSP_TOL);
            let ray = d.trace_ray(-10.0, 16).unwrap();
            assert!((ray.cusp.mu - want).norm() < 1e-4);
        }
    }

    #[test]
    fn half_ray_matches_sqrt_on_long_interval() {
        let ray = trace_ray(s(1, 2), -50.0, 240).unwrap();
        assert_eq!(ray.samples.len(), 241);
        for smp in &ray.samples {
            assert!(
                (smp.mu - c(0.0, (2.0 - smp.t).sqrt())).norm() <= 1e-9,
                "{smp:?}"
            );
        }
    }

    #[test]
    fn ray_samples_on_level_and_monotone() {
        let ray = trace_ray(s(3, 4), -20.0, 90).unwrap();
        let ev = trace_polys(s(3, 4)).p.evaluator();
        for w in ray.samples.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        for smp in &ray.samples {
            assert!((ev.eval(smp.mu).unwrap() - c(smp.t, 0.0)).norm() <= 1e-9);
            assert!(smp.mu.im >= 0.0);
        }
        assert!((ray.cusp.mu - c(2.27202, 0.786151)).norm() < 1e-4);
    }

    #[test]
    fn half_neighbourhood() {
        let d = SlopeData::new(s(1, 2)).unwrap();
        let r = d.in_neighbourhood(c(0.0, 3.0)).unwrap();
        assert!(r.inside);
        assert_eq!(r.branch, Some(Branch::Upper));
        assert!((r.p_value - c(-7.0, 0.0)).norm() < 1e-14);
        let r = d.in_neighbourhood(c(3.0, 0.0)).unwrap();
        assert!(!r.inside);
        let r = d.in_neighbourhood(c(0.1, 2.5)).unwrap();
        assert!(r.inside);
        // The lower sheet of y² − x² > 4 is the conjugate component.
        let r = d.in_neighbourhood(c(0.1, -2.5)).unwrap();
        assert!(r.inside);
        assert_eq!(r.branch, Some(Branch::Lower));
        assert!(matches!(
            d.in_neighbourhood(c(0.0, 2.0)),
            Err(Error::BoundaryIndeterminate { .. })
        ));
    }

    #[test]
    fn other_preimage_is_not_certified() {
        // For slope 2/3, Q ~ μ³ has three sheets over {Re < −2}; the sheet
        // near the negative real axis is not the ray's component.
        let d = SlopeData::new(s(2, 3)).unwrap();
        let mu = c(-3.0, 0.0);
        let r = d.in_neighbourhood(mu).unwrap();
        assert!(r.p_value.re < -2.0);
        assert!(!r.inside, "{r:?}");
    }

    #[test]
    fn level_curves() {
        let d = SlopeData::new(s(1, 2)).unwrap();
        let pts = d.trace_level_curve(|s| c(-2.0, 10.0 * s), 20).unwrap();
        assert_eq!(pts.len(), 21);
        for z in &pts {
            assert!(((z * z).re + 4.0).abs() < 1e-9);
            assert!(z.im > 0.0);
        }
        let d = SlopeData::new(s(1, 1)).unwrap();
        let pts = d.trace_level_curve(|s| c(-2.0, 10.0 * s), 10).unwrap();
        for (k, z) in pts.iter().enumerate() {
            assert!((z - c(4.0, -(k as f64))).norm() < 1e-9);
        }
        let pts = d.trace_level_curve(|_| c(-7.0, 0.0), 5).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn detour_avoids_critical_value() {
        let mut d = SlopeData::new(s(1, 2)).unwrap();
        d.critical_values = vec![c(-5.0, 1e-4)];
        let path = d.detoured_path(c(-8.0, 0.0), c(-3.0, 0.0), 1.0);
        assert_eq!(path.len(), 6);
        for leg in path.windows(2) {
            // distance from the critical value to every leg stays above r/2
            let (a, b) = (leg[0], leg[1]);
            let u = (b - a) / (b - a).norm();
            let t = ((c(-5.0, 1e-4) - a) * u.conj())
                .re
                .clamp(0.0, (b - a).norm());
            let closest = a + u * t;
            assert!((closest - c(-5.0, 1e-4)).norm() > DETOUR_RADIUS / 2.0);
        }
        let r = d.in_neighbourhood(c(0.0, 3.0)).unwrap();
        assert!(r.inside);
    }
}
