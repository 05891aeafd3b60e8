//! Certified membership tests for the Riley slice.
//!
//! A cascade of tests, each producing a certificate: the Lyndon–Ullman hull,
//! half-plane neighbourhoods of rational pleating rays, the
//! Shimizu–Leutbecher bound on |Q|, bounded Q-orbits, and forward chains of
//! Q-maps. Points that survive every test within the budget are `Unknown`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::PolyEvaluator;
use crate::farey::{enumerate_slopes, Slope};
use crate::poly::trace_polys;
use crate::rays::{NeighbourhoodResult, SlopeData, BOUNDARY_TOL};

pub const CERTIFICATE_VERSION: &str = "riley-certificate/1";
/// Margin on |Q| < 1 in the Shimizu test.
pub const SHIMIZU_EPS: f64 = 1e-9;
/// Orbit points closer than this (relative) count as a revisit.
pub const CYCLE_TOL: f64 = 1e-12;
/// Orbit points kept in a witness.
const ORBIT_RECORD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    InteriorByHull,
    InteriorByNeighbourhood,
    NotInClosure,
    NotInSlice,
    Unknown,
}

impl Verdict {
    pub fn is_interior(self) -> bool {
        matches!(
            self,
            Verdict::InteriorByHull | Verdict::InteriorByNeighbourhood
        )
    }

    pub fn is_exterior(self) -> bool {
        matches!(self, Verdict::NotInClosure | Verdict::NotInSlice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Grade {
    Exact,
    Numerical,
    Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_q: u32,
    pub depth: u32,
    pub max_iter: u32,
    /// Cap on Q-images examined by the forward-chain search.
    pub max_chain_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_q: 12,
            depth: 3,
            max_iter: 500,
            max_chain_nodes: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BudgetUsed {
    pub slopes: usize,
    pub neighbourhood_tests: usize,
    pub continuation_failures: usize,
    pub boundary_indeterminate: usize,
    pub shimizu_tests: usize,
    pub orbit_iterations: usize,
    pub chain_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cycle {
    /// Index of the first orbit point on the detected cycle.
    pub start: usize,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDetail {
    Hull,
    Neighbourhood(NeighbourhoodResult),
    Shimizu {
        slope: Slope,
        #[serde(with = "crate::serde_c64")]
        value: Complex64,
        modulus: f64,
    },
    Orbit {
        slope: Slope,
        /// Leading orbit points, starting with the initial value.
        #[serde(with = "crate::serde_c64::vec")]
        orbit: Vec<Complex64>,
        iterations: usize,
        cycle: Option<Cycle>,
    },
    Chain {
        slopes: Vec<Slope>,
        /// μ followed by its successive images.
        #[serde(with = "crate::serde_c64::vec")]
        images: Vec<Complex64>,
        terminal: Box<WitnessDetail>,
    },
    None {
        /// Slopes whose value sat on Re P = −2 within tolerance.
        boundary_slopes: Vec<Slope>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(with = "crate::serde_c64")]
    pub mu: Complex64,
    /// The first-quadrant representative |Re μ| + i|Im μ| that was tested.
    #[serde(with = "crate::serde_c64")]
    pub canonical_mu: Complex64,
    #[serde(flatten)]
    pub detail: WitnessDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub grade: Option<Grade>,
    pub witness: Witness,
    pub budget_used: BudgetUsed,
    pub version: &'static str,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// A certificate body before it is attached to a query point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub verdict: Verdict,
    pub grade: Grade,
    pub detail: WitnessDetail,
}

fn canonical(mu: Complex64) -> Complex64 {
    Complex64::new(mu.re.abs(), mu.im.abs())
}

fn check_mu(mu: Complex64) -> Result<()> {
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidInput("mu must be finite".into()));
    }
    if mu == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("mu = 0 gives a non-free group".into()));
    }
    Ok(())
}

/// Closed membership in K = D(0,2) ∪ triangle(±4, ±1 ± i√3).
pub fn in_hull(mu: Complex64) -> bool {
    let (x, y) = (mu.re.abs(), mu.im.abs());
    if x * x + y * y <= 4.0 {
        return true;
    }
    // Triangle (4,0), (1,±√3) folded onto y ≥ 0: x ≥ 1 and below the
    // tangent line through (4,0) and (1,√3).
    let s3 = 3f64.sqrt();
    (1.0..=4.0).contains(&x) && y <= s3 * (4.0 - x) / 3.0
}

fn hull_finding() -> Finding {
    Finding {
        verdict: Verdict::InteriorByHull,
        grade: Grade::Exact,
        detail: WitnessDetail::Hull,
    }
}

/// True iff μ lies outside the hull K, which contains the complement of
/// the Riley slice.
pub fn lu_hull_test(mu: Complex64) -> bool {
    !in_hull(mu)
}

fn shimizu_value(ev: &PolyEvaluator, mu: Complex64, slope: Slope, eps: f64) -> Option<Finding> {
    let v = ev.eval(mu).ok()?;
    let m = v.norm();
    (m >= eps && m <= 1.0 - eps).then_some(Finding {
        verdict: Verdict::NotInClosure,
        grade: Grade::Numerical,
        detail: WitnessDetail::Shimizu {
            slope,
            value: v,
            modulus: m,
        },
    })
}

pub fn shimizu_test(mu: Complex64, slope: Slope, eps: f64) -> Option<Finding> {
    let ev = trace_polys(slope).q.evaluator();
    shimizu_value(&ev, mu, slope, eps)
}

/// Radius beyond which every Q-orbit provably escapes: |Q(z)| ≥ 2|z|.
pub fn escape_radius(ev: &PolyEvaluator) -> f64 {
    let c = ev.coeffs_f64();
    let n = c.len() - 1;
    let lead = c[n].abs();
    2.0 + c[..n].iter().map(|a| a.abs() / lead).sum::<f64>()
}

fn orbit_test(
    ev: &PolyEvaluator,
    mu: Complex64,
    slope: Slope,
    max_iter: u32,
    radius: f64,
    used: &mut BudgetUsed,
) -> Option<Finding> {
    if slope.q() < 2 {
        return None;
    }
    let mut orbit = vec![mu];
    let mut z = mu;
    let mut checkpoint = (0usize, mu);
    let mut power = 1usize;
    for k in 1..=max_iter as usize {
        z = ev.eval_fast(z);
        used.orbit_iterations += 1;
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > radius {
            return None;
        }
        if orbit.len() < ORBIT_RECORD {
            orbit.push(z);
        }
        if (z - checkpoint.1).norm() <= CYCLE_TOL * z.norm().max(1.0) {
            return Some(Finding {
                verdict: Verdict::NotInSlice,
                grade: Grade::Numerical,
                detail: WitnessDetail::Orbit {
                    slope,
                    orbit,
                    iterations: k,
                    cycle: Some(Cycle {
                        start: checkpoint.0,
                        period: k - checkpoint.0,
                    }),
                },
            });
        }
        if k == power {
            checkpoint = (k, z);
            power *= 2;
        }
    }
    Some(Finding {
        verdict: Verdict::NotInSlice,
        grade: Grade::Evidence,
        detail: WitnessDetail::Orbit {
            slope,
            orbit,
            iterations: max_iter as usize,
            cycle: None,
        },
    })
}

/// Iterates Q_{p/q} from μ. A detected cycle gives a Numerical certificate,
/// a bounded orbit without one an Evidence certificate, escape gives none.
pub fn julia_trap_test(
    mu: Complex64,
    slope: Slope,
    max_iter: u32,
    escape_radius: f64,
) -> Option<Finding> {
    let ev = trace_polys(slope).q.evaluator();
    orbit_test(
        &ev,
        mu,
        slope,
        max_iter,
        escape_radius,
        &mut BudgetUsed::default(),
    )
}

struct Entry {
    data: SlopeData,
    radius: f64,
}

/// Verdicts of the interior and exterior test families run independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Audit {
    pub interior: Option<Finding>,
    pub exterior: Option<Finding>,
}

impl Audit {
    pub fn contradiction(&self) -> bool {
        self.interior.is_some() && self.exterior.is_some()
    }
}

/// Membership classifier with per-slope data computed once for a budget.
pub struct Classifier {
    budget: Budget,
    entries: Vec<Entry>,
}

impl Classifier {
    pub fn new(budget: Budget) -> Result<Self> {
        if budget.max_q == 0 {
            return Err(Error::InvalidInput("max_q must be at least 1".into()));
        }
        let entries = enumerate_slopes(budget.max_q)
            .into_iter()
            .map(|s| {
                let data = SlopeData::new(s)?;
                let radius = escape_radius(&data.q_eval);
                Ok(Entry { data, radius })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Classifier { budget, entries })
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn slope_data(&self, slope: Slope) -> Option<&SlopeData> {
        self.entries
            .iter()
            .map(|e| &e.data)
            .find(|d| d.slope == slope)
    }

    fn neighbourhood(
        &self,
        mu: Complex64,
        used: &mut BudgetUsed,
        boundary: &mut Vec<Slope>,
    ) -> Option<Finding> {
        let mut cands: Vec<(f64, usize)> = Vec::new();
        for (i, e) in self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.data.slope.q() >= 2)
        {
            let Ok(w) = e.data.p_eval.eval(mu) else {
                continue;
            };
            if (w.re + 2.0).abs() < BOUNDARY_TOL {
                used.boundary_indeterminate += 1;
                boundary.push(e.data.slope);
            } else if w.re < -2.0 {
                cands.push(((w + 2.0).norm(), i));
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, i) in cands {
            used.neighbourhood_tests += 1;
            match self.entries[i].data.in_neighbourhood(mu) {
                Ok(r) if r.inside => {
                    return Some(Finding {
                        verdict: Verdict::InteriorByNeighbourhood,
                        grade: Grade::Numerical,
                        detail: WitnessDetail::Neighbourhood(r),
                    })
                }
                Ok(_) => {}
                Err(_) => used.continuation_failures += 1,
            }
        }
        None
    }

    fn shimizu(&self, mu: Complex64, used: &mut BudgetUsed) -> Option<Finding> {
        self.entries.iter().find_map(|e| {
            used.shimizu_tests += 1;
            shimizu_value(&e.data.q_eval, mu, e.data.slope, SHIMIZU_EPS)
        })
    }

    /// First orbit certificate, preferring a cycle over a bounded orbit.
    fn orbits(&self, mu: Complex64, used: &mut BudgetUsed) -> Option<Finding> {
        let mut evidence = None;
        for e in &self.entries {
            match orbit_test(
                &e.data.q_eval,
                mu,
                e.data.slope,
                self.budget.max_iter,
                e.radius,
                used,
            ) {
                Some(f) if f.grade == Grade::Numerical => return Some(f),
                Some(f) => {
                    evidence.get_or_insert(f);
                }
                None => {}
            }
        }
        evidence
    }

    fn cycles_only(&self, mu: Complex64, used: &mut BudgetUsed) -> Option<Finding> {
        self.entries.iter().find_map(|e| {
            orbit_test(
                &e.data.q_eval,
                mu,
                e.data.slope,
                self.budget.max_iter,
                e.radius,
                used,
            )
            .filter(|f| f.grade == Grade::Numerical)
        })
    }

    /// Depth-first search over compositions of Q-maps for an image that
    /// earns a Shimizu or cycle certificate. Images outside K are pruned.
    fn chain(&self, mu: Complex64, used: &mut BudgetUsed) -> Option<Finding> {
        let mut slopes = Vec::new();
        let mut images = vec![mu];
        self.chain_from(mu, self.budget.depth, &mut slopes, &mut images, used)
    }

    fn chain_from(
        &self,
        z: Complex64,
        depth: u32,
        slopes: &mut Vec<Slope>,
        images: &mut Vec<Complex64>,
        used: &mut BudgetUsed,
    ) -> Option<Finding> {
        if depth == 0 {
            return None;
        }
        for e in self.entries.iter().filter(|e| e.data.slope.q() >= 2) {
            if used.chain_nodes >= self.budget.max_chain_nodes {
                return None;
            }
            let Ok(img) = e.data.q_eval.eval(z) else {
                continue;
            };
            if !in_hull(img) {
                continue;
            }
            used.chain_nodes += 1;
            slopes.push(e.data.slope);
            images.push(img);
            let terminal = self
                .shimizu(img, used)
                .or_else(|| self.cycles_only(img, used));
            if let Some(t) = terminal {
                return Some(Finding {
                    verdict: Verdict::NotInSlice,
                    grade: t.grade,
                    detail: WitnessDetail::Chain {
                        slopes: slopes.clone(),
                        images: images.clone(),
                        terminal: Box::new(t.detail),
                    },
                });
            }
            if let Some(f) = self.chain_from(img, depth - 1, slopes, images, used) {
                return Some(f);
            }
            slopes.pop();
            images.pop();
        }
        None
    }

    fn wrap(&self, mu: Complex64, cmu: Complex64, f: Finding, used: BudgetUsed) -> Certificate {
        Certificate {
            verdict: f.verdict,
            grade: Some(f.grade),
            witness: Witness {
                mu,
                canonical_mu: cmu,
                detail: f.detail,
            },
            budget_used: used,
            version: CERTIFICATE_VERSION,
        }
    }

    /// The cascade: ray neighbourhoods of slopes with q ≥ 2, the hull,
    /// Shimizu, orbit cycles, forward chains, then bounded orbits. The 1/1
    /// neighbourhood is the half-plane Re μ > 4, which the hull already
    /// covers with an exact certificate, so it is never tried.
    pub fn classify(&self, mu: Complex64) -> Result<Certificate> {
        check_mu(mu)?;
        let cmu = canonical(mu);
        let mut used = BudgetUsed {
            slopes: self.entries.len(),
            ..Default::default()
        };
        let mut boundary = Vec::new();
        let found = self
            .neighbourhood(cmu, &mut used, &mut boundary)
            .or_else(|| lu_hull_test(cmu).then(hull_finding))
            .or_else(|| self.shimizu(cmu, &mut used))
            .or_else(|| {
                let orbit = self.orbits(cmu, &mut used);
                match orbit {
                    Some(f) if f.grade == Grade::Numerical => Some(f),
                    other => self.chain(cmu, &mut used).or(other),
                }
            });
        Ok(match found {
            Some(f) => self.wrap(mu, cmu, f, used),
            None => Certificate {
                verdict: Verdict::Unknown,
                grade: None,
                witness: Witness {
                    mu,
                    canonical_mu: cmu,
                    detail: WitnessDetail::None {
                        boundary_slopes: boundary,
                    },
                },
                budget_used: used,
                version: CERTIFICATE_VERSION,
            },
        })
    }

    /// Runs every interior test and every exterior test on μ, without the
    /// cascade's early exit between the two families.
    pub fn audit(&self, mu: Complex64) -> Result<Audit> {
        check_mu(mu)?;
        let cmu = canonical(mu);
        let mut used = BudgetUsed::default();
        let interior = self
            .neighbourhood(cmu, &mut used, &mut Vec::new())
            .or_else(|| lu_hull_test(cmu).then(hull_finding));
        let exterior = self
            .shimizu(cmu, &mut used)
            .or_else(|| self.orbits(cmu, &mut used))
            .or_else(|| self.chain(cmu, &mut used));
        Ok(Audit { interior, exterior })
    }
}

pub fn classify(mu: Complex64, budget: Budget) -> Result<Certificate> {
    Classifier::new(budget)?.classify(mu)
}

/// Forward-chain search over the given slopes, up to `depth` compositions.
pub fn forward_chain_test(mu: Complex64, slopes: &[Slope], depth: u32) -> Result<Option<Finding>> {
    let entries = slopes
        .iter()
        .map(|&s| {
            let data = SlopeData::new(s)?;
            let radius = escape_radius(&data.q_eval);
            Ok(Entry { data, radius })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_q = slopes.iter().map(|s| s.q()).max().unwrap_or(1);
    let c = Classifier {
        budget: Budget {
            max_q,
            depth,
            ..Budget::default()
        },
        entries,
    };
    Ok(c.chain(mu, &mut BudgetUsed::default()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(p: u32, q: u32) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn hull() {
        assert!(lu_hull_test(c(5.0, 0.0)));
        assert!(!lu_hull_test(c(0.5, 0.0)));
        assert!(!lu_hull_test(c(1.0, 3f64.sqrt())));
        assert!(!lu_hull_test(c(-4.0, 0.0)));
        assert!(!lu_hull_test(c(4.0, 0.0)));
        assert!(lu_hull_test(c(4.0, 1e-9)));
        assert!(lu_hull_test(c(0.0, 2.0 + 1e-12)));
        assert!(!lu_hull_test(c(-2.5, -0.8)));
        assert!(lu_hull_test(c(2.5, 1.0)));
    }

    #[test]
    fn shimizu() {
        let f = shimizu_test(c(0.5, 0.0), s(1, 2), SHIMIZU_EPS).unwrap();
        assert_eq!(f.verdict, Verdict::NotInClosure);
        match f.detail {
            WitnessDetail::Shimizu { modulus, .. } => assert!((modulus - 0.25).abs() < 1e-15),
            _ => panic!(),
        }
        assert!(shimizu_test(c(0.0, 2.0), s(1, 2), SHIMIZU_EPS).is_none());
        let fig8 = c(0.5, 3f64.sqrt() / 2.0);
        assert!(shimizu_test(fig8, s(3, 5), SHIMIZU_EPS).is_none());
    }

    #[test]
    fn julia() {
        let f = julia_trap_test(c(0.0, 1.0), s(1, 2), 500, 4.0).unwrap();
        assert_eq!(f.grade, Grade::Numerical);
        match &f.detail {
            WitnessDetail::Orbit { orbit, cycle, .. } => {
                assert_eq!(
                    orbit[..4],
                    [c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]
                );
                assert_eq!(cycle.unwrap().period, 1);
            }
            _ => panic!(),
        }
        assert!(julia_trap_test(c(0.0, 3.0), s(1, 2), 500, 4.0).is_none());
        for slope in [s(1, 2), s(2, 3), s(3, 7)] {
            let f = julia_trap_test(c(0.0, 0.0), slope, 10, 4.0).unwrap();
            assert_eq!(f.grade, Grade::Numerical);
        }
        assert!(julia_trap_test(c(0.3, 0.0), s(1, 1), 10, 4.0).is_none());
    }

    #[test]
    fn chain() {
        let mu = c(0.5f64.sqrt(), 0.0);
        let f = forward_chain_test(mu, &[s(1, 2)], 1).unwrap().unwrap();
        assert_eq!(f.verdict, Verdict::NotInSlice);
        match f.detail {
            WitnessDetail::Chain {
                slopes, terminal, ..
            } => {
                assert_eq!(slopes, vec![s(1, 2)]);
                assert!(matches!(*terminal, WitnessDetail::Shimizu { .. }));
            }
            _ => panic!(),
        }
        assert!(forward_chain_test(mu, &[s(1, 2)], 0).unwrap().is_none());
        assert!(forward_chain_test(c(5.0, 0.0), &[s(1, 2), s(2, 3)], 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn cascade_examples() {
        let cl = Classifier::new(Budget::default()).unwrap();
        assert_eq!(
            cl.classify(c(5.0, 0.0)).unwrap().verdict,
            Verdict::InteriorByHull
        );
        let cert = cl.classify(c(0.0, 3.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::InteriorByNeighbourhood);
        match &cert.witness.detail {
            WitnessDetail::Neighbourhood(r) => assert_eq!(r.slope, s(1, 2)),
            _ => panic!(),
        }
        let cert = cl.classify(c(0.0, 1.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::NotInSlice);
        assert_eq!(cert.grade, Some(Grade::Numerical));
        let cert = cl.classify(c(0.5, 0.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::NotInClosure);
        assert!(matches!(
            cl.classify(c(0.0, 0.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cl.classify(c(f64::NAN, 0.0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn symmetric_verdicts() {
        let cl = Classifier::new(Budget {
            max_q: 6,
            ..Budget::default()
        })
        .unwrap();
        for mu in [c(0.3, 2.4), c(1.7, 0.9), c(-0.2, 1.1), c(3.1, 0.2)] {
            let v = cl.classify(mu).unwrap().verdict;
            assert_eq!(cl.classify(mu.conj()).unwrap().verdict, v);
            assert_eq!(cl.classify(-mu).unwrap().verdict, v);
        }
    }

    #[test]
    fn cusp_is_not_interior() {
        let cl = Classifier::new(Budget::default()).unwrap();
        let cert = cl.classify(c(0.0, 2.0)).unwrap();
        assert!(!cert.verdict.is_interior());
    }

    #[test]
    fn certificate_json_fields() {
        let cl = Classifier::new(Budget {
            max_q: 3,
            ..Budget::default()
        })
        .unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&cl.classify(c(0.5, 0.0)).unwrap().to_json()).unwrap();
        for key in ["verdict", "grade", "witness", "budget_used", "version"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["witness"]["kind"], "shimizu");
        assert_eq!(v["verdict"], "NotInClosure");
    }
}
