//! Cross-module invariants: rays, roots and rendered geometry against the
//! membership classifier.

mod common;

use common::{c, s, table_cusp};
use riley_core::membership::{in_hull, Budget, Classifier, Verdict};
use riley_core::rays::{in_neighbourhood, SlopeData};
use riley_core::render::{render, RenderJob, RenderKind, Resolution, Window};
use riley_core::roots::solve_level;
use riley_core::{enumerate_slopes, trace_polys};

fn classifier() -> Classifier {
    Classifier::new(Budget::default()).unwrap()
}

#[test]
fn ray_samples_are_certified_interior() {
    let cl = classifier();
    for sl in enumerate_slopes(8) {
        let ray = SlopeData::new(sl).unwrap().trace_ray(-30.0, 60).unwrap();
        // Drop the cusp itself, which lies on the boundary.
        for smp in &ray.samples[..ray.samples.len() - 1] {
            for mu in [smp.mu, smp.mu.conj()] {
                let cert = cl.classify(mu).unwrap();
                let want = if sl.q() == 1 {
                    Verdict::InteriorByHull
                } else {
                    Verdict::InteriorByNeighbourhood
                };
                assert_eq!(cert.verdict, want, "{sl} at t = {}: {mu}", smp.t);
            }
        }
    }
}

#[test]
fn ray_samples_lie_in_their_own_neighbourhood() {
    for sl in enumerate_slopes(8).into_iter().filter(|s| s.q() > 1) {
        let ray = SlopeData::new(sl).unwrap().trace_ray(-20.0, 24).unwrap();
        for smp in ray.samples.iter().filter(|x| x.t < -2.01) {
            let r = in_neighbourhood(sl, smp.mu).unwrap();
            assert!(r.inside, "{sl} at t = {}", smp.t);
            assert!((r.landing.unwrap() - smp.mu).norm() < 1e-8);
        }
    }
}

#[test]
fn roots_of_q_are_never_interior() {
    let cl = classifier();
    for sl in enumerate_slopes(12) {
        let roots = solve_level(&trace_polys(sl).q, c(0.0, 0.0), 1e-10).unwrap();
        for &z in &roots.roots {
            assert!(in_hull(z), "{sl}: {z}");
            if z.norm() < 1e-12 {
                continue;
            }
            let cert = cl.classify(z).unwrap();
            assert!(
                !cert.verdict.is_interior(),
                "{sl}: root {z} classified {:?}",
                cert.verdict
            );
        }
    }
}

#[test]
fn rendered_rays_end_at_table_cusps() {
    let job = RenderJob::new(
        RenderKind::Rays,
        Window {
            x0: -1.0,
            x1: 5.0,
            y0: -3.0,
            y1: 3.0,
        },
        Resolution { w: 120, h: 120 },
    )
    .with("max_q", "8")
    .with("steps", "80");
    let out = render(&job).unwrap();
    assert_eq!(out.report.skipped, 0);

    let mut rows: Vec<(u32, u32, String, f64, f64, f64)> = Vec::new();
    for line in out.csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        rows.push((
            f[0].parse().unwrap(),
            f[1].parse().unwrap(),
            f[2].to_string(),
            f[3].parse().unwrap(),
            f[4].parse().unwrap(),
            f[5].parse().unwrap(),
        ));
    }
    let mut checked = 0;
    for sl in enumerate_slopes(8) {
        let upper: Vec<_> = rows
            .iter()
            .filter(|r| r.0 == sl.p() && r.1 == sl.q() && r.2 == "upper")
            .collect();
        let end = upper.last().unwrap();
        assert_eq!(end.3, -2.0);
        if let Some(want) = table_cusp(sl) {
            assert!((c(end.4, end.5) - want).norm() < 1e-4, "{sl}");
            checked += 1;
        }
    }
    assert_eq!(checked, 9);

    // One in ten rendered points, both branches, never certified exterior.
    let cl = classifier();
    for r in rows.iter().step_by(10) {
        let cert = cl.classify(c(r.4, r.5)).unwrap();
        assert!(
            !cert.verdict.is_exterior(),
            "{}/{} {} t = {}",
            r.0,
            r.1,
            r.2,
            r.3
        );
    }
}

#[test]
fn classification_respects_symmetry() {
    let cl = classifier();
    for mu in [
        c(0.3, 2.7),
        c(-1.9, 0.9),
        c(3.2, -0.6),
        c(0.5, 0.1),
        c(1.0, 1.0),
    ] {
        let v = cl.classify(mu).unwrap().verdict;
        for m in [-mu, mu.conj(), -mu.conj()] {
            assert_eq!(cl.classify(m).unwrap().verdict, v, "{mu} vs {m}");
        }
    }
}

#[test]
fn neighbourhood_membership_at_known_points() {
    assert!(in_neighbourhood(s(1, 2), c(0.0, 3.0)).unwrap().inside);
    assert!(!in_neighbourhood(s(1, 2), c(0.0, 1.0)).unwrap().inside);
    assert!(in_neighbourhood(s(1, 2), c(0.0, 2.0)).is_err());
}
