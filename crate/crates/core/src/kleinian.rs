//! Numeric Möbius geometry for the groups Γ_μ = ⟨X, Y_μ⟩ and the
//! peripheral subgroups ⟨X, W_{p/q}⟩.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::farey::{farey_word, Base, FareyWord, Letter, Slope};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Below this |c| a Farey word is treated as fixing ∞.
pub const DEGENERATE_C: f64 = 1e-14;

/// An element of SL(2,C), kept at determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mobius {
    #[serde(with = "crate::serde_c64")]
    pub a: C,
    #[serde(with = "crate::serde_c64")]
    pub b: C,
    #[serde(with = "crate::serde_c64")]
    pub c: C,
    #[serde(with = "crate::serde_c64")]
    pub d: C,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    /// Scales by a square root of the determinant.
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > 0.0) || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::InvalidInput("singular Möbius matrix".into()));
        }
        Ok(Mobius { a, b, c, d }.renormalized())
    }

    pub fn renormalized(self) -> Self {
        let det = self.a * self.d - self.b * self.c;
        if (det - ONE).norm() <= 4.0 * f64::EPSILON {
            return self;
        }
        let s = det.sqrt();
        if (s - ONE).norm() == 0.0 {
            return self;
        }
        Mobius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    pub fn translation(t: C) -> Self {
        Mobius {
            a: ONE,
            b: t,
            c: ZERO,
            d: ONE,
        }
    }

    /// z ↦ z + 1.
    pub fn x() -> Self {
        Mobius::translation(ONE)
    }

    /// z ↦ z / (μz + 1).
    pub fn y(mu: C) -> Self {
        Mobius {
            a: ONE,
            b: ZERO,
            c: mu,
            d: ONE,
        }
    }

    /// The involution z ↦ 1/(μz).
    pub fn phi(mu: C) -> Result<Self> {
        Mobius::new(ZERO, ONE, mu, ZERO)
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C {
        self.a + self.d
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Image of a finite point; `None` is ∞.
    pub fn apply(&self, z: C) -> Option<C> {
        let den = self.c * z + self.d;
        if den == ZERO {
            return None;
        }
        let w = (self.a * z + self.b) / den;
        (w.re.is_finite() && w.im.is_finite()).then_some(w)
    }

    /// m(∞); `None` when ∞ is fixed.
    pub fn image_of_infinity(&self) -> Option<C> {
        (self.c != ZERO).then(|| self.a / self.c)
    }

    /// m⁻¹(∞), the pole.
    pub fn pole(&self) -> Option<C> {
        (self.c != ZERO).then(|| -self.d / self.c)
    }

    pub fn conjugate_by(&self, h: &Mobius) -> Mobius {
        h.compose(self).compose(&h.inverse())
    }

    pub fn max_entry_distance(&self, o: &Mobius) -> f64 {
        [
            (self.a - o.a).norm(),
            (self.b - o.b).norm(),
            (self.c - o.c).norm(),
            (self.d - o.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn letter_matrix(l: Letter, mu: C) -> Mobius {
    match (l.base, l.inverse) {
        (Base::X, false) => Mobius::x(),
        (Base::X, true) => Mobius::translation(-ONE),
        (Base::Y, false) => Mobius::y(mu),
        (Base::Y, true) => Mobius::y(-mu),
    }
}

/// The product is accumulated in double-double, so long words keep their
/// trace accurate through cancellation. It is exactly unimodular before
/// rounding and is not rescaled: with large entries the rounded
/// determinant drifts far more than the entries themselves.
pub fn mobius_from_letters(letters: &[Letter], mu: C) -> Mobius {
    let one = CDd::real(Dd::from_f64(1.0));
    let mut m = [one, CDd::ZERO, CDd::ZERO, one];
    for &l in letters {
        let g = letter_matrix(l, mu);
        let t = |x: CDd, z: C| x.mul_c64(z.re, z.im);
        m = [
            t(m[0], g.a) + t(m[1], g.c),
            t(m[0], g.b) + t(m[1], g.d),
            t(m[2], g.a) + t(m[3], g.c),
            t(m[2], g.b) + t(m[3], g.d),
        ];
    }
    let [a, b, c, d] = m.map(|x| {
        let (re, im) = x.to_pair();
        C::new(re, im)
    });
    Mobius { a, b, c, d }
}

pub fn mobius_from_word(word: &FareyWord, mu: C) -> Mobius {
    mobius_from_letters(word.letters(), mu)
}

/// h_{p/q}(μ), the transformation of W_{p/q}.
pub fn farey_mobius(slope: Slope, mu: C) -> Mobius {
    mobius_from_word(&farey_word(slope), mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// By β = tr² − 4: zero is parabolic, real in [−4, 0) elliptic, otherwise
/// loxodromic. ±I is reported as the identity.
pub fn classify_element(m: &Mobius, tol: f64) -> ElementKind {
    let near = |s: f64| {
        m.max_entry_distance(&Mobius {
            a: C::new(s, 0.0),
            b: ZERO,
            c: ZERO,
            d: C::new(s, 0.0),
        }) <= tol
    };
    if near(1.0) || near(-1.0) {
        return ElementKind::Identity;
    }
    let tr = m.trace();
    let beta = tr * tr - 4.0;
    if beta.norm() <= tol {
        ElementKind::Parabolic
    } else if beta.im.abs() <= tol && beta.re >= -4.0 - tol && beta.re < 0.0 {
        ElementKind::Elliptic
    } else {
        ElementKind::Loxodromic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CircleOrLine {
    Circle {
        #[serde(with = "crate::serde_c64")]
        center: C,
        radius: f64,
    },
    Line {
        #[serde(with = "crate::serde_c64")]
        point: C,
        #[serde(with = "crate::serde_c64")]
        direction: C,
    },
}

fn circumcircle(p: C, q: C, r: C) -> Option<(C, f64)> {
    let (b, c) = (q - p, r - p);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d == 0.0 {
        return None;
    }
    let (bb, cc) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * bb - b.im * cc) / d;
    let uy = (b.re * cc - c.re * bb) / d;
    let u = C::new(ux, uy);
    Some((p + u, u.norm()))
}

impl CircleOrLine {
    pub fn circle(center: C, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("circle radius {radius}")));
        }
        Ok(CircleOrLine::Circle { center, radius })
    }

    pub fn line(point: C, direction: C) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput("line direction must be nonzero".into()));
        }
        Ok(CircleOrLine::Line {
            point,
            direction: direction / n,
        })
    }

    /// Three well-spread points on the curve.
    fn sample(&self) -> [C; 3] {
        match *self {
            CircleOrLine::Circle { center, radius } => {
                [0.0, 2.0, 4.0].map(|a: f64| center + C::from_polar(radius, a))
            }
            CircleOrLine::Line { point, direction } => {
                [point, point + direction, point - direction]
            }
        }
    }

    /// Image under a Möbius map. A circle's image centre is the image of the
    /// reflection of the pole in the circle; lines and circles through the
    /// pole go through their image points.
    pub fn image(&self, m: &Mobius) -> Result<CircleOrLine> {
        let pole = m.pole();
        match (*self, pole) {
            (CircleOrLine::Circle { center, radius }, Some(p))
                if ((p - center).norm() - radius).abs() > 1e-12 * radius.max(1.0) =>
            {
                // Reflection of the pole; the pole at the centre reflects to ∞.
                let nc = if p == center {
                    m.image_of_infinity()
                } else {
                    m.apply(center + radius * radius / (p - center).conj())
                }
                .ok_or(Error::InvalidInput("degenerate image".into()))?;
                let on = m
                    .apply(center + radius)
                    .or_else(|| m.apply(center - radius))
                    .ok_or(Error::InvalidInput("degenerate image".into()))?;
                CircleOrLine::circle(nc, (on - nc).norm())
            }
            (CircleOrLine::Circle { center, radius }, None) => {
                let nc = m
                    .apply(center)
                    .ok_or(Error::InvalidInput("degenerate image".into()))?;
                CircleOrLine::circle(nc, radius / m.d.norm_sqr())
            }
            _ => {
                let pts: Vec<C> = self
                    .sample()
                    .iter()
                    .chain(self.extra_samples().iter())
                    .filter_map(|&z| m.apply(z))
                    .filter(|w| w.norm() < 1e300)
                    .collect();
                let through_pole = match (*self, pole) {
                    (_, None) => matches!(self, CircleOrLine::Line { .. }),
                    (CircleOrLine::Circle { .. }, Some(_)) => true,
                    (CircleOrLine::Line { point, direction }, Some(p)) => {
                        ((p - point) * direction.conj()).im.abs() <= 1e-12 * (1.0 + p.norm())
                    }
                };
                if through_pole {
                    let (a, b) = (pts[0], pts[1]);
                    CircleOrLine::line(a, b - a)
                } else {
                    let (c, r) = circumcircle(pts[0], pts[1], pts[2])
                        .ok_or(Error::InvalidInput("collinear image points".into()))?;
                    CircleOrLine::circle(c, r)
                }
            }
        }
    }

    fn extra_samples(&self) -> [C; 2] {
        match *self {
            CircleOrLine::Circle { center, radius } => [
                center + C::from_polar(radius, 1.0),
                center + C::from_polar(radius, 3.0),
            ],
            CircleOrLine::Line { point, direction } => {
                [point + 2.0 * direction, point - 2.0 * direction]
            }
        }
    }

    /// `type,cx,cy,r` for a circle; a line reports a point and the
    /// direction angle in place of the radius.
    pub fn csv_row(&self) -> String {
        match *self {
            CircleOrLine::Circle { center, radius } => {
                format!(
                    "circle,{:.17e},{:.17e},{:.17e}",
                    center.re, center.im, radius
                )
            }
            CircleOrLine::Line { point, direction } => {
                format!(
                    "line,{:.17e},{:.17e},{:.17e}",
                    point.re,
                    point.im,
                    direction.arg()
                )
            }
        }
    }

    pub fn distance_to(&self, other: &CircleOrLine) -> f64 {
        match (*self, *other) {
            (
                CircleOrLine::Circle {
                    center: c1,
                    radius: r1,
                },
                CircleOrLine::Circle {
                    center: c2,
                    radius: r2,
                },
            ) => (c1 - c2).norm().max(0.0) - r1 - r2,
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometricDisks {
    /// |z − a/c| ≤ 1/|c|
    pub d1: CircleOrLine,
    /// |z + d/c| ≤ 1/|c|
    pub d2: CircleOrLine,
    pub disjoint: bool,
}

pub fn isometric_disks(m: &Mobius) -> Result<IsometricDisks> {
    if m.c == ZERO {
        return Err(Error::InfinityFixed);
    }
    let r = 1.0 / m.c.norm();
    Ok(IsometricDisks {
        d1: CircleOrLine::circle(m.a / m.c, r)?,
        d2: CircleOrLine::circle(-m.d / m.c, r)?,
        disjoint: m.trace().norm() >= 2.0,
    })
}

fn nondegenerate(slope: Slope, mu: C) -> Result<Mobius> {
    let h = farey_mobius(slope, mu);
    if h.c.norm() < DEGENERATE_C {
        return Err(Error::DegenerateC {
            modulus: h.c.norm(),
        });
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangencyPoint {
    #[serde(with = "crate::serde_c64")]
    pub z0: C,
    /// |h(z₀) − (z₀ + 1)|
    pub residual: f64,
}

/// z₀ = (1 − d)/c, where the isometric disks of h_{p/q} meet their unit
/// translates; h(z₀) = z₀ + 1.
pub fn tangency_parabolic_point(slope: Slope, mu: C) -> Result<TangencyPoint> {
    let h = nondegenerate(slope, mu)?;
    let z0 = (ONE - h.d) / h.c;
    let residual = h.apply(z0).map_or(f64::INFINITY, |w| (w - z0 - 1.0).norm());
    Ok(TangencyPoint { z0, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllSegment {
    #[serde(with = "crate::serde_c64")]
    pub start: C,
    #[serde(with = "crate::serde_c64")]
    pub end: C,
    /// |h(start) − end|
    pub residual: f64,
}

/// ℓ = [−(1 + d)/c, (a + 1)/c], whose endpoints h identifies.
pub fn ell_segment(slope: Slope, mu: C) -> Result<EllSegment> {
    let h = nondegenerate(slope, mu)?;
    let start = -(ONE + h.d) / h.c;
    let end = (h.a + ONE) / h.c;
    let residual = h.apply(start).map_or(f64::INFINITY, |w| (w - end).norm());
    Ok(EllSegment {
        start,
        end,
        residual,
    })
}

/// Reduced words in two generators and their inverses, by length, as index
/// sequences into [g0, g0⁻¹, g1, g1⁻¹]. Includes the empty word.
fn reduced_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut queue: VecDeque<Vec<u8>> = VecDeque::from([Vec::new()]);
    while let Some(w) = queue.pop_front() {
        if w.len() == max_len {
            continue;
        }
        for g in 0u8..4 {
            if w.last().is_some_and(|&l| l ^ 1 == g) {
                continue;
            }
            let mut nw = w.clone();
            nw.push(g);
            out.push(nw.clone());
            queue.push_back(nw);
        }
    }
    out
}

fn word_elements(g0: &Mobius, g1: &Mobius, max_len: usize) -> Vec<Mobius> {
    let gens = [*g0, g0.inverse(), *g1, g1.inverse()];
    reduced_words(max_len)
        .iter()
        .map(|w| {
            w.iter()
                .fold(Mobius::IDENTITY, |m, &i| m.compose(&gens[i as usize]))
        })
        .collect()
}

/// Number of reduced words of length 1..=n in a rank-2 free group.
pub fn reduced_word_count(n: usize) -> usize {
    (1..=n).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum()
}

fn dedup_points(points: impl IntoIterator<Item = C>, resolution: f64) -> Vec<C> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for z in points {
        let key = (
            (z.re / resolution).round() as i64,
            (z.im / resolution).round() as i64,
        );
        if seen.insert(key) {
            out.push(z);
        }
    }
    out
}

/// Samples per ℓ-segment in the quasiline orbit.
pub const ELL_SAMPLES: usize = 33;

/// Images of ℓ under reduced words in f and h up to `max_word_len`,
/// deduplicated at `resolution`.
pub fn quasiline_orbit(
    slope: Slope,
    mu: C,
    max_word_len: usize,
    resolution: f64,
) -> Result<Vec<C>> {
    let h = nondegenerate(slope, mu)?;
    let seg = ell_segment(slope, mu)?;
    let samples: Vec<C> = (0..ELL_SAMPLES)
        .map(|k| seg.start + (seg.end - seg.start) * (k as f64 / (ELL_SAMPLES - 1) as f64))
        .collect();
    let elems = word_elements(&Mobius::x(), &h, max_word_len);
    let pts = elems
        .iter()
        .flat_map(|m| samples.iter().filter_map(move |&z| m.apply(z)));
    Ok(dedup_points(pts, resolution))
}

/// Smallest horizontal strip containing both isometric circles of h_{p/q}.
pub fn strip_bounds(slope: Slope, mu: C) -> Result<(f64, f64)> {
    let h = nondegenerate(slope, mu)?;
    let r = 1.0 / h.c.norm();
    let (i1, i2) = ((h.a / h.c).im, (-h.d / h.c).im);
    Ok((i1.min(i2) - r, i1.max(i2) + r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolonomyData {
    pub t: f64,
    pub tau: f64,
    pub theta: f64,
}

/// Translation length and holonomy of an element with trace −2 + it,
/// from τ/2 + iθ/2 = sinh⁻¹((i/2) s) with s the square root of t(4i + t)
/// in the lower half-plane.
pub fn holonomy(t: f64) -> Result<HolonomyData> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "holonomy needs t >= 0, got {t}"
        )));
    }
    let s = -(C::new(t, 0.0) * C::new(t, 4.0)).sqrt();
    let v = (C::new(0.0, 0.5) * s).asinh();
    Ok(HolonomyData {
        t,
        tau: 2.0 * v.re,
        theta: 2.0 * v.im,
    })
}

/// Fixed point of a parabolic; `None` is ∞.
fn parabolic_fixed_point(m: &Mobius) -> Option<C> {
    (m.c != ZERO).then(|| (m.a - m.d) / (2.0 * m.c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    #[serde(with = "crate::serde_c64")]
    pub nu: C,
    /// h with h A h⁻¹ = X and h B h⁻¹ = Y_ν.
    pub conjugator: Mobius,
}

/// Conjugates a pair of parabolics to (X, Y_ν).
pub fn normalize_two_parabolics(a: &Mobius, b: &Mobius, tol: f64) -> Result<Normalization> {
    for m in [a, b] {
        if classify_element(m, tol) != ElementKind::Parabolic {
            return Err(Error::InvalidInput("generators must be parabolic".into()));
        }
    }
    let (fa, fb) = (parabolic_fixed_point(a), parabolic_fixed_point(b));
    let h0 = match (fa, fb) {
        (None, None) => return Err(Error::CommutingGenerators),
        (None, Some(q)) => Mobius::translation(-q),
        (Some(p), None) => Mobius::new(ZERO, ONE, ONE, -p)?,
        (Some(p), Some(q)) => {
            if (p - q).norm() <= tol * (1.0 + p.norm()) {
                return Err(Error::CommutingGenerators);
            }
            Mobius::new(ONE, -q, ONE, -p)?
        }
    };
    let a1 = a.conjugate_by(&h0);
    // a1 = ±[[1, s], [0, 1]]; scale z ↦ z/s.
    let sign = if a1.a.re >= 0.0 { 1.0 } else { -1.0 };
    let s = a1.b * sign;
    if s.norm() == 0.0 {
        return Err(Error::CommutingGenerators);
    }
    let k = s.sqrt();
    let scale = Mobius {
        a: ONE / k,
        b: ZERO,
        c: ZERO,
        d: k,
    };
    let h = scale.compose(&h0);
    let an = a.conjugate_by(&h);
    let bn = b.conjugate_by(&h);
    let sa = if an.trace().re >= 0.0 { 1.0 } else { -1.0 };
    let sb = if bn.trace().re >= 0.0 { 1.0 } else { -1.0 };
    let nu = (an.compose(&bn)).trace() * (sa * sb) - 2.0;
    if nu.norm() <= tol {
        return Err(Error::CommutingGenerators);
    }
    Ok(Normalization { nu, conjugator: h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "slope", rename_all = "snake_case")]
pub enum Seed {
    FixedPoints,
    IsometricCircles,
    Peripheral(Slope),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSetData {
    pub words: usize,
    #[serde(with = "crate::serde_c64::vec")]
    pub points: Vec<C>,
    pub circles: Vec<CircleOrLine>,
    /// Failed circle images (through degenerate configurations).
    pub skipped: usize,
}

/// Orbit of seed objects under reduced words in f = X and g = Y_μ of
/// length at most `depth`. With `phi_overlay` the images under
/// Φ: z ↦ 1/(μz) are appended.
pub fn limit_set_points(
    mu: C,
    depth: usize,
    seed: Seed,
    phi_overlay: bool,
) -> Result<LimitSetData> {
    if mu == ZERO || !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidInput("mu must be finite and nonzero".into()));
    }
    let elems = word_elements(&Mobius::x(), &Mobius::y(mu), depth);
    let (seed_points, seed_circles): (Vec<C>, Vec<CircleOrLine>) = match seed {
        Seed::FixedPoints => (vec![ZERO], Vec::new()),
        Seed::IsometricCircles => {
            let d = isometric_disks(&Mobius::y(mu))?;
            (Vec::new(), vec![d.d1, d.d2])
        }
        Seed::Peripheral(slope) => {
            let h = nondegenerate(slope, mu)?;
            let d = isometric_disks(&h)?;
            (Vec::new(), vec![d.d1, d.d2])
        }
    };
    let mut points: Vec<C> = Vec::new();
    let mut circles = Vec::new();
    let mut skipped = 0;
    let phi = Mobius::phi(mu)?;
    for m in &elems {
        let maps: Vec<Mobius> = if phi_overlay {
            vec![*m, phi.compose(m)]
        } else {
            vec![*m]
        };
        for mm in maps {
            points.extend(seed_points.iter().filter_map(|&z| mm.apply(z)));
            if matches!(seed, Seed::FixedPoints) {
                if let Some(w) = mm.image_of_infinity() {
                    points.push(w);
                }
            }
            for c in &seed_circles {
                match c.image(&mm) {
                    Ok(img) => circles.push(img),
                    Err(_) => skipped += 1,
                }
            }
        }
    }
    Ok(LimitSetData {
        words: elems.len(),
        points: dedup_points(points, 1e-12),
        circles,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalDomain {
    /// Real-part bounds of the vertical strip S.
    pub strip: (f64, f64),
    pub d1: CircleOrLine,
    pub d2: CircleOrLine,
    pub d1_shifted: CircleOrLine,
    pub d2_shifted: CircleOrLine,
    #[serde(with = "crate::serde_c64")]
    pub tangency_point: C,
    /// Distance between D̃₁ and D₂ (zero when tangent).
    pub tangency_residual: f64,
}

fn in_disk(d: &CircleOrLine, z: C) -> bool {
    match *d {
        CircleOrLine::Circle { center, radius } => (z - center).norm() <= radius,
        CircleOrLine::Line { .. } => false,
    }
}

impl FundamentalDomain {
    /// Membership in S̃ = (S ∪ D₁ ∪ D₂) ∖ (D̃₁ ∪ D̃₂).
    pub fn contains(&self, z: C) -> bool {
        let in_s = z.re >= self.strip.0 && z.re < self.strip.1;
        (in_s || in_disk(&self.d1, z) || in_disk(&self.d2, z))
            && !in_disk(&self.d1_shifted, z)
            && !in_disk(&self.d2_shifted, z)
    }
}

pub fn fundamental_domain(slope: Slope, mu: C) -> Result<FundamentalDomain> {
    let h = nondegenerate(slope, mu)?;
    let disks = isometric_disks(&h)?;
    let mid = 0.5 * ((h.a - h.d) / h.c).re;
    let shift = |d: CircleOrLine, by: f64| match d {
        CircleOrLine::Circle { center, radius } => CircleOrLine::Circle {
            center: center + by,
            radius,
        },
        l => l,
    };
    let d1_shifted = shift(disks.d1, -1.0);
    let d2_shifted = shift(disks.d2, 1.0);
    Ok(FundamentalDomain {
        strip: (mid - 0.5, mid + 0.5),
        d1: disks.d1,
        d2: disks.d2,
        d1_shifted,
        d2_shifted,
        tangency_point: (ONE - h.d) / h.c,
        tangency_residual: d1_shifted.distance_to(&disks.d2).abs(),
    })
}
