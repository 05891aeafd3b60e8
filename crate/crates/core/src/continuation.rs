//! Newton path continuation of a root of P(z) = w(s) as w moves.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::PolyEvaluator;

/// Smallest accepted parameter step before giving up.
pub const MIN_STEP: f64 = 1e-12;
const NEWTON_ITERS: usize = 10;

/// Newton's method for P(z) = w. Returns the root and the number of
/// iterations, or `None` if it did not settle.
pub fn newton(ev: &PolyEvaluator, z0: Complex64, w: Complex64) -> Option<(Complex64, usize)> {
    let mut z = z0;
    for it in 0..NEWTON_ITERS {
        let (v, d) = ev.eval_level_with_derivative(z, w).ok()?;
        if v == Complex64::new(0.0, 0.0) {
            return Some((z, it));
        }
        if d == Complex64::new(0.0, 0.0) {
            return None;
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some((z, it + 1));
        }
    }
    None
}

/// Follows the root of P(z) = path(s) from s = 0 (where z0 is a root) to
/// s = 1. Steps grow after success and halve when the corrector fails or
/// strays from the predictor; `nodes`, when given, are parameter values at
/// which the tracked root is recorded.
pub fn track<F>(
    ev: &PolyEvaluator,
    z0: Complex64,
    path: F,
    nodes: &[f64],
    mut record: Option<&mut Vec<(f64, Complex64)>>,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut z = z0;
    let mut s = 0.0;
    let mut h: f64 = 1.0 / 16.0;
    let mut next_node = 0;
    while next_node < nodes.len() && nodes[next_node] <= 0.0 {
        if let Some(r) = record.as_deref_mut() {
            r.push((nodes[next_node], z));
        }
        next_node += 1;
    }
    while s < 1.0 {
        let target = if next_node < nodes.len() {
            nodes[next_node].min(1.0)
        } else {
            1.0
        };
        let step = h.min(target - s);
        let s_new = if step >= target - s { target } else { s + step };
        let (_, d) = ev.eval_level_with_derivative(z, path(s))?;
        let dw = path(s_new) - path(s);
        let pred = z + dw / d;
        let accepted = if pred.re.is_finite() && pred.im.is_finite() {
            newton(ev, pred, path(s_new)).filter(|(zn, _)| {
                (zn - pred).norm() <= 0.3 * (pred - z).norm() + 1e-10 * (1.0 + z.norm())
            })
        } else {
            None
        };
        match accepted {
            Some((zn, _)) => {
                z = zn;
                s = s_new;
                h = (2.0 * step).min(0.25);
                if s_new == target && next_node < nodes.len() {
                    if let Some(r) = record.as_deref_mut() {
                        r.push((nodes[next_node], z));
                    }
                    next_node += 1;
                }
            }
            None => {
                h = step / 2.0;
                if h < MIN_STEP {
                    return Err(Error::ContinuationStalled {
                        at: s,
                        min_step: MIN_STEP,
                    });
                }
            }
        }
    }
    Ok(z)
}

/// Continues along a polyline of w-values.
pub fn track_polyline(
    ev: &PolyEvaluator,
    z0: Complex64,
    waypoints: &[Complex64],
) -> Result<Complex64> {
    let mut z = z0;
    for leg in waypoints.windows(2) {
        let (a, b) = (leg[0], leg[1]);
        if a == b {
            continue;
        }
        z = track(ev, z, |s| a + (b - a) * s, &[], None)?;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    #[test]
    fn square_root_branch() {
        // z² = w from w = 1 around to w = −1 through the upper half-plane
        // lands on +i.
        let ev = IntPoly::from_i64s(&[0, 0, 1]).evaluator();
        let pts: Vec<Complex64> = (0..=8)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 8.0))
            .collect();
        let z = track_polyline(&ev, Complex64::new(1.0, 0.0), &pts).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn records_nodes() {
        let ev = IntPoly::from_i64s(&[0, 1]).evaluator();
        let mut rec = Vec::new();
        let nodes = [0.0, 0.5, 1.0];
        track(
            &ev,
            Complex64::new(0.0, 0.0),
            |s| Complex64::new(4.0 * s, 0.0),
            &nodes,
            Some(&mut rec),
        )
        .unwrap();
        let ts: Vec<f64> = rec.iter().map(|r| r.0).collect();
        assert_eq!(ts, nodes);
        assert!((rec[1].1.re - 2.0).abs() < 1e-14);
    }
}
