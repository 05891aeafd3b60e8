//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{c, linspace, s, table};
use riley_core::farey::count_slopes;
use riley_core::kleinian::{farey_mobius, holonomy, tangency_parabolic_point};
use riley_core::membership::{in_hull, Budget, Classifier, Grade, Verdict, WitnessDetail};
use riley_core::poly::{factor_shape, fricke_check, superattractor_check};
use riley_core::rays::SlopeData;
use riley_core::render::{render, RenderJob, RenderKind, Resolution, Window};
use riley_core::roots::solve_level;
use riley_core::{enumerate_slopes, farey_word, trace_polys, Complex64};

/// Verdict and whether the audit disagreed with it.
type GridResult = Result<(Verdict, bool), String>;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    limit: Option<Duration>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        limit: None,
    }
}

fn timed(limit_s: u64, o: Outcome) -> Outcome {
    Outcome {
        limit: Some(Duration::from_secs(limit_s)),
        ..o
    }
}

fn farey_golden() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for row in table() {
        let sl = s(row.slope.0, row.slope.1);
        if farey_word(sl).to_ascii() != row.word {
            bad.push(format!("{sl} word"));
        }
        if trace_polys(sl).q != row.q_poly() {
            bad.push(format!("{sl} Q"));
        }
        match SlopeData::new(sl) {
            Ok(d) => {
                let e = (d.cusp().mu - row.cusp).norm();
                worst = worst.max(e);
                if e > 1e-4 {
                    bad.push(format!("{sl} cusp off by {e:e}"));
                }
            }
            Err(e) => bad.push(format!("{sl} cusp: {e}")),
        }
    }
    timed(
        10,
        outcome(
            bad.is_empty(),
            format!("9 rows, max cusp error {worst:.2e}, failures {bad:?}"),
        ),
    )
}

fn trace_identity() -> Outcome {
    let slopes = enumerate_slopes(50);
    let bad: Vec<String> = slopes
        .par_iter()
        .filter(|&&sl| !fricke_check(sl))
        .map(|sl| sl.to_string())
        .collect();
    timed(
        60,
        outcome(
            bad.is_empty() && slopes.len() == count_slopes(50),
            format!("{} slopes with q <= 50, failures {bad:?}", slopes.len()),
        ),
    )
}

fn figure_eight() -> Outcome {
    let v = trace_polys(s(3, 5))
        .p
        .evaluator()
        .eval(c(0.5, 3f64.sqrt() / 2.0));
    match v {
        Ok(v) => {
            let e = (v - 2.0).norm();
            outcome(e <= 1e-12, format!("|P_3/5((1+i sqrt 3)/2) - 2| = {e:.2e}"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn superattractor() -> Outcome {
    let slopes = enumerate_slopes(50);
    let bad: Vec<String> = slopes
        .iter()
        .filter(|&&sl| !superattractor_check(sl))
        .map(|sl| sl.to_string())
        .collect();
    outcome(
        bad.is_empty(),
        format!(
            "Q'(0) = 0 iff q even over {} slopes, failures {bad:?}",
            slopes.len()
        ),
    )
}

fn conjecture_report() -> Outcome {
    let reports: Vec<_> = enumerate_slopes(30)
        .into_par_iter()
        .map(factor_shape)
        .collect();
    let mismatches: Vec<String> = reports
        .iter()
        .filter(|r| !r.matches)
        .map(|r| format!("{}: {}", r.slope, r.note))
        .collect();
    let formatted = reports.iter().all(|r| serde_json::to_string(r).is_ok());
    outcome(
        formatted,
        format!(
            "{} of {} slopes with q <= 30 match the conjectured shape; counterexamples {mismatches:?}",
            reports.len() - mismatches.len(),
            reports.len()
        ),
    )
}

fn half_ray() -> Outcome {
    let d = match SlopeData::new(s(1, 2)) {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst = 0.0f64;
    let mut failures = 0;
    // The endpoint t = -2 is the cusp, checked separately below.
    for &t in &linspace(-50.0, -2.0, 481)[..480] {
        match d.ray_point(t) {
            Ok(mu) => worst = worst.max((mu - c(0.0, (2.0 - t).sqrt())).norm()),
            Err(_) => failures += 1,
        }
    }
    if let Ok(ray) = d.trace_ray(-50.0, 240) {
        for smp in &ray.samples {
            worst = worst.max((smp.mu - c(0.0, (2.0 - smp.t).sqrt())).norm());
        }
    } else {
        failures += 1;
    }
    let end = (d.cusp().mu - c(0.0, 2.0)).norm();
    outcome(
        failures == 0 && worst <= 1e-9 && end <= 1e-10,
        format!("max pointwise error {worst:.2e} on [-50,-2], endpoint error {end:.2e}, failures {failures}"),
    )
}

fn membership_grid() -> Outcome {
    let budget = Budget {
        max_q: 12,
        depth: 3,
        max_iter: 500,
        ..Budget::default()
    };
    let cl = match Classifier::new(budget) {
        Ok(cl) => cl,
        Err(e) => return outcome(false, e.to_string()),
    };
    let axis = linspace(-4.0, 4.0, 200);
    let points: Vec<Complex64> = axis
        .iter()
        .flat_map(|&y| axis.iter().map(move |&x| c(x, y)))
        .collect();
    let results: Vec<(Complex64, GridResult)> = points
        .par_iter()
        .map(|&mu| {
            let r = cl.classify(mu).and_then(|cert| {
                let a = cl.audit(mu)?;
                let mixed = a.contradiction()
                    || (cert.verdict.is_interior() && a.exterior.is_some())
                    || (cert.verdict.is_exterior() && a.interior.is_some());
                Ok((cert.verdict, mixed))
            });
            (mu, r.map_err(|e| e.to_string()))
        })
        .collect();
    let mut contradictions = Vec::new();
    let mut errors = Vec::new();
    let mut tally = std::collections::BTreeMap::new();
    for (mu, r) in &results {
        match r {
            Ok((v, mixed)) => {
                *tally.entry(format!("{v:?}")).or_insert(0usize) += 1;
                if *mixed {
                    contradictions.push(*mu);
                }
            }
            Err(e) => errors.push(format!("{mu}: {e}")),
        }
    }

    let verdict = |mu: Complex64| cl.classify(mu);
    let mut spot = Vec::new();
    let mut spot_ok = true;
    let five = verdict(c(5.0, 0.0));
    spot_ok &= matches!(&five, Ok(x) if x.verdict == Verdict::InteriorByHull);
    spot.push(format!("5: {:?}", five.map(|x| x.verdict)));
    let three_i = verdict(c(0.0, 3.0));
    spot_ok &= matches!(&three_i, Ok(x) if x.verdict == Verdict::InteriorByNeighbourhood
        && matches!(&x.witness.detail, WitnessDetail::Neighbourhood(n) if n.slope == s(1, 2)));
    spot.push(format!("3i: {:?}", three_i.map(|x| x.verdict)));
    let half = verdict(c(0.5, 0.0));
    spot_ok &= matches!(&half, Ok(x) if x.verdict == Verdict::NotInClosure);
    spot.push(format!("0.5: {:?}", half.map(|x| x.verdict)));
    let i = verdict(c(0.0, 1.0));
    spot_ok &= matches!(&i, Ok(x) if x.verdict == Verdict::NotInSlice
        && x.grade != Some(Grade::Evidence)
        && matches!(&x.witness.detail, WitnessDetail::Orbit { cycle: Some(_), .. }));
    spot.push(format!("i: {:?}", i.map(|x| (x.verdict, x.grade))));

    timed(
        600,
        outcome(
            contradictions.is_empty() && errors.is_empty() && spot_ok,
            format!(
                "{} points, verdicts {tally:?}, contradictions {contradictions:?}, errors {errors:?}; {}",
                points.len(),
                spot.join(", ")
            ),
        ),
    )
}

fn rootset_containment() -> Outcome {
    let slopes = enumerate_slopes(21);
    let per: Vec<(String, usize, f64, usize)> = slopes
        .par_iter()
        .map(
            |&sl| match solve_level(&trace_polys(sl).q, c(0.0, 0.0), 1e-10) {
                Ok(set) => {
                    let outside = set.roots.iter().filter(|&&z| !in_hull(z)).count();
                    (sl.to_string(), set.roots.len(), set.max_residual(), outside)
                }
                Err(_) => (sl.to_string(), 0, f64::INFINITY, usize::MAX),
            },
        )
        .collect();
    let roots: usize = per.iter().map(|p| p.1).sum();
    let worst = per.iter().map(|p| p.2).fold(0.0, f64::max);
    let bad: Vec<&str> = per
        .iter()
        .filter(|p| p.3 != 0 || p.2 > 1e-10)
        .map(|p| p.0.as_str())
        .collect();
    outcome(
        bad.is_empty(),
        format!(
            "{} slopes, {roots} roots, max residual {worst:.2e}, failing slopes {bad:?}",
            slopes.len()
        ),
    )
}

fn holonomy_bounds() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.01, 0.1, 0.5, 0.99] {
        match holonomy(t) {
            Ok(h) => {
                let (a, b) = (h.tau / (2.0 * t).sqrt(), h.theta / (2.0 * t).sqrt());
                ok &= (1.0..=1.03642).contains(&a) && (-1.0..=-0.954).contains(&b);
                parts.push(format!("t={t}: {a:.5}, {b:.5}"));
            }
            Err(e) => {
                ok = false;
                parts.push(e.to_string());
            }
        }
    }
    match holonomy(1e6) {
        Ok(h) => {
            let e = (h.theta + std::f64::consts::PI).abs();
            ok &= e <= 1e-2;
            parts.push(format!("|theta(1e6) + pi| = {e:.2e}"));
        }
        Err(e) => {
            ok = false;
            parts.push(e.to_string());
        }
    }
    outcome(ok, parts.join("; "))
}

fn tangency() -> Outcome {
    let slopes = enumerate_slopes(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut n = 0;
    let mut rejected = 0;
    while n < 100 {
        let sl = slopes[rng.gen_range(0..slopes.len())];
        let mu = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        // Off the zero locus of c(μ) = Q_{p/q}(μ).
        if farey_mobius(sl, mu).c.norm() < 1e-3 {
            rejected += 1;
            continue;
        }
        n += 1;
        match tangency_parabolic_point(sl, mu) {
            Ok(tp) => {
                worst = worst.max(tp.residual);
                if tp.residual > 1e-10 {
                    bad.push(format!("{sl} at {mu}: {:.2e}", tp.residual));
                }
            }
            Err(e) => bad.push(format!("{sl} at {mu}: {e}")),
        }
    }
    outcome(
        bad.is_empty(),
        format!("100 pairs ({rejected} resampled near c = 0), max |h(z0) - z0 - 1| {worst:.2e}, failures {bad:?}"),
    )
}

fn determinism() -> Outcome {
    let w = Window {
        x0: -3.0,
        x1: 5.0,
        y0: -3.0,
        y1: 3.0,
    };
    let r = Resolution { w: 160, h: 120 };
    let jobs = [
        RenderJob::new(RenderKind::Rays, w, r)
            .with("max_q", "6")
            .with("steps", "60"),
        RenderJob::new(RenderKind::Rootset, w, r).with("max_q", "12"),
        RenderJob::new(RenderKind::Julia, w, r)
            .with("slope", "2/5")
            .with("max_iter", "80"),
        RenderJob::new(RenderKind::Limitset, w, r)
            .with("depth", "5")
            .with("mu", "0.5,2.2"),
    ];
    let mut mismatches = Vec::new();
    for job in &jobs {
        let mut outs = Vec::new();
        for threads in ["1", "3", "1"] {
            std::env::set_var("RILEY_THREADS", threads);
            outs.push(render(job).map(|o| (o.raster.to_ppm(), o.csv)));
        }
        std::env::remove_var("RILEY_THREADS");
        let same = outs
            .iter()
            .all(|o| matches!((o, &outs[0]), (Ok(a), Ok(b)) if a == b));
        if !same {
            mismatches.push(format!("{:?}", job.kind));
        }
    }
    let cert = |mu| {
        Classifier::new(Budget::default())
            .and_then(|cl| cl.classify(mu))
            .map(|c| c.to_json())
    };
    for mu in [c(0.5, 0.0), c(0.3, 2.7), c(-1.9, 0.9), c(0.0, 1.0)] {
        let (a, b) = (cert(mu), cert(mu));
        if a.is_err() || a != b {
            mismatches.push(format!("member {mu}"));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("4 render jobs (1 and 3 threads) and 4 certificates, mismatches {mismatches:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("farey golden suite", farey_golden),
        ("trace identity q <= 50", trace_identity),
        ("figure-eight value", figure_eight),
        ("superattractor q <= 50", superattractor),
        ("factor shape report q <= 30", conjecture_report),
        ("half ray closed form", half_ray),
        ("membership soundness grid", membership_grid),
        ("root-set containment q <= 21", rootset_containment),
        ("holonomy bounds", holonomy_bounds),
        ("parabolic tangency", tangency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let in_time = o.limit.is_none_or(|l| took <= l);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let limit = o
            .limit
            .map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        println!(
            "criterion {:>2} {} {name} ({:.2} s{limit}): {}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
