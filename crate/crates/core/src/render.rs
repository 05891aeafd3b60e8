//! Rasters and sidecar geometry for the figure kinds.
//!
//! Every kind produces a binary PPM raster and a CSV carrying the raw
//! geometry that was drawn. Output depends only on the job.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::farey::{enumerate_slopes, Slope};
use crate::kleinian::{ell_segment, fundamental_domain, limit_set_points, CircleOrLine, Seed};
use crate::membership::escape_radius;
use crate::poly::trace_polys;
use crate::rays::SlopeData;
use crate::roots::solve_level;

type C = Complex64;

/// A named w-plane curve parametrised on [0, 1].
type LevelCurve = (&'static str, Box<dyn Fn(f64) -> C + Sync>);

pub const MAX_SIDE: u32 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderKind {
    Rootset,
    Cusps,
    Rays,
    Neighbourhoods,
    Julia,
    Limitset,
    Isocircles,
}

impl FromStr for RenderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rootset" => RenderKind::Rootset,
            "cusps" => RenderKind::Cusps,
            "rays" => RenderKind::Rays,
            "neighbourhoods" => RenderKind::Neighbourhoods,
            "julia" => RenderKind::Julia,
            "limitset" => RenderKind::Limitset,
            "isocircles" => RenderKind::Isocircles,
            _ => return Err(Error::InvalidInput(format!("unknown render kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl FromStr for Window {
    type Err = Error;

    /// `x0,x1,y0,y1`
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidInput(format!("bad window {s:?}")))?;
        match v[..] {
            [x0, x1, y0, y1] => Ok(Window { x0, x1, y0, y1 }),
            _ => Err(Error::InvalidInput(format!(
                "window needs four numbers, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub w: u32,
    pub h: u32,
}

impl FromStr for Resolution {
    type Err = Error;

    /// `WxH`
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidInput(format!("resolution must be WxH, got {s:?}")))?;
        let p = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("bad resolution {s:?}")))
        };
        Ok(Resolution { w: p(a)?, h: p(b)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderJob {
    pub kind: RenderKind,
    pub window: Window,
    pub resolution: Resolution,
    pub params: BTreeMap<String, String>,
}

impl RenderJob {
    pub fn new(kind: RenderKind, window: Window, resolution: Resolution) -> Self {
        RenderJob {
            kind,
            window,
            resolution,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn validate(&self) -> Result<()> {
        let w = &self.window;
        let finite = [w.x0, w.x1, w.y0, w.y1].iter().all(|v| v.is_finite());
        if !finite || !(w.x0 < w.x1) || !(w.y0 < w.y1) {
            return Err(Error::InvalidInput(
                "window needs x0 < x1 and y0 < y1".into(),
            ));
        }
        let r = self.resolution;
        if r.w == 0 || r.h == 0 || r.w > MAX_SIDE || r.h > MAX_SIDE {
            return Err(Error::InvalidInput(format!(
                "resolution must be between 1x1 and {MAX_SIDE}x{MAX_SIDE}"
            )));
        }
        Ok(())
    }

    fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad value {v:?} for {key}"))),
        }
    }

    fn complex_param(&self, key: &str, default: C) -> Result<C> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => parse_complex(v),
        }
    }
}

/// `re,im` or a single real.
pub fn parse_complex(s: &str) -> Result<C> {
    let bad = || Error::InvalidInput(format!("bad complex number {s:?}; expected re,im"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    match parts[..] {
        [re] => Ok(C::new(num(re)?, 0.0)),
        [re, im] => Ok(C::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    /// RGB bytes, row-major from the top row.
    pub pixels: Vec<u8>,
}

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];
const GREY: [u8; 3] = [170, 170, 170];

fn palette(k: usize) -> [u8; 3] {
    const P: [[u8; 3]; 8] = [
        [31, 119, 180],
        [214, 39, 40],
        [44, 160, 44],
        [148, 103, 189],
        [255, 127, 14],
        [140, 86, 75],
        [227, 119, 194],
        [23, 190, 207],
    ];
    P[k % P.len()]
}

impl Raster {
    pub fn new(width: u32, height: u32) -> Self {
        Raster {
            width,
            height,
            pixels: WHITE.repeat((width * height) as usize),
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y * self.width + x) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Binary PPM, maxval 255.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// World ↔ pixel mapping with pixel centres placed symmetrically about the
/// window centre.
#[derive(Debug, Clone, Copy)]
struct Frame {
    cx: f64,
    cy: f64,
    hx: f64,
    hy: f64,
    w: u32,
    h: u32,
}

impl Frame {
    fn new(win: &Window, res: Resolution) -> Self {
        Frame {
            cx: 0.5 * (win.x0 + win.x1),
            cy: 0.5 * (win.y0 + win.y1),
            hx: 0.5 * (win.x1 - win.x0),
            hy: 0.5 * (win.y1 - win.y0),
            w: res.w,
            h: res.h,
        }
    }

    fn pixel_center(&self, col: u32, row: u32) -> C {
        let u = (2.0 * col as f64 + 1.0 - self.w as f64) / self.w as f64;
        let v = (2.0 * row as f64 + 1.0 - self.h as f64) / self.h as f64;
        C::new(self.cx + self.hx * u, self.cy - self.hy * v)
    }

    fn pixel_of(&self, z: C) -> (f64, f64) {
        let col = ((z.re - self.cx) / self.hx * self.w as f64 + self.w as f64 - 1.0) / 2.0;
        let row = ((self.cy - z.im) / self.hy * self.h as f64 + self.h as f64 - 1.0) / 2.0;
        (col, row)
    }

    fn pixel_size(&self) -> f64 {
        (2.0 * self.hx / self.w as f64).min(2.0 * self.hy / self.h as f64)
    }
}

struct Canvas {
    raster: Raster,
    frame: Frame,
}

impl Canvas {
    fn dot(&mut self, z: C, rgb: [u8; 3]) {
        let (x, y) = self.frame.pixel_of(z);
        if x.is_finite() && y.is_finite() {
            self.raster.put(x.round() as i64, y.round() as i64, rgb);
        }
    }

    fn splat(&mut self, z: C, rgb: [u8; 3]) {
        let (x, y) = self.frame.pixel_of(z);
        if !(x.is_finite() && y.is_finite()) {
            return;
        }
        let (x, y) = (x.round() as i64, y.round() as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                self.raster.put(x + dx, y + dy, rgb);
            }
        }
    }

    fn segment(&mut self, a: C, b: C, rgb: [u8; 3]) {
        let (x0, y0) = self.frame.pixel_of(a);
        let (x1, y1) = self.frame.pixel_of(b);
        let span = (x1 - x0).abs().max((y1 - y0).abs());
        if !span.is_finite() {
            return;
        }
        // Clip absurdly long strokes to what can be visible.
        let n = span.ceil().min(4.0 * (self.frame.w + self.frame.h) as f64) as usize;
        for k in 0..=n {
            let s = if n == 0 { 0.0 } else { k as f64 / n as f64 };
            let x = x0 + (x1 - x0) * s;
            let y = y0 + (y1 - y0) * s;
            self.raster.put(x.round() as i64, y.round() as i64, rgb);
        }
    }

    fn polyline(&mut self, pts: &[C], rgb: [u8; 3]) {
        for w in pts.windows(2) {
            self.segment(w[0], w[1], rgb);
        }
        if let [p] = pts {
            self.dot(*p, rgb);
        }
    }

    fn shape(&mut self, c: &CircleOrLine, rgb: [u8; 3]) {
        match *c {
            CircleOrLine::Circle { center, radius } => {
                let px = radius / self.frame.pixel_size();
                let n = ((2.0 * PI * px).ceil() as usize).clamp(8, 1 << 16);
                let pts: Vec<C> = (0..=n)
                    .map(|k| center + C::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
                    .collect();
                self.polyline(&pts, rgb);
            }
            CircleOrLine::Line { point, direction } => {
                let reach = 4.0 * (self.frame.hx + self.frame.hy)
                    + (point - C::new(self.frame.cx, self.frame.cy)).norm();
                self.segment(point - direction * reach, point + direction * reach, rgb);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RenderReport {
    pub kind: RenderKind,
    pub primitives: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOutput {
    pub raster: Raster,
    pub csv: String,
    pub report: RenderReport,
}

/// Worker count from `RILEY_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var("RILEY_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool() -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

fn fmt_row(out: &mut String, fields: &[&dyn std::fmt::Display]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{f}");
    }
    out.push('\n');
}

struct E(f64);

impl std::fmt::Display for E {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.17e}", self.0)
    }
}

pub fn render(job: &RenderJob) -> Result<RenderOutput> {
    job.validate()?;
    let frame = Frame::new(&job.window, job.resolution);
    let mut canvas = Canvas {
        raster: Raster::new(job.resolution.w, job.resolution.h),
        frame,
    };
    let mut csv = String::new();
    let mut primitives = 0;
    let mut skipped = 0;
    let pool = pool()?;
    match job.kind {
        RenderKind::Rootset => {
            let max_q: u32 = job.param("max_q", 21)?;
            let level = job.complex_param("level", C::new(0.0, 0.0))?;
            let tol: f64 = job.param("tol", 1e-10)?;
            csv.push_str("p,q,re,im,residual\n");
            let slopes = enumerate_slopes(max_q);
            let sets: Vec<_> = pool.install(|| {
                slopes
                    .par_iter()
                    .map(|&s| solve_level(&trace_polys(s).q, level, tol))
                    .collect()
            });
            for (s, set) in slopes.iter().zip(sets) {
                let Ok(set) = set else {
                    skipped += 1;
                    continue;
                };
                primitives += 1;
                for (z, r) in set.roots.iter().zip(&set.residuals) {
                    canvas.dot(*z, BLACK);
                    fmt_row(&mut csv, &[&s.p(), &s.q(), &E(z.re), &E(z.im), &E(*r)]);
                }
            }
        }
        RenderKind::Cusps | RenderKind::Rays => {
            let max_q: u32 = job.param("max_q", 8)?;
            let t_start: f64 = job.param("t_start", -50.0)?;
            let steps: usize = job.param("steps", 200)?;
            let rays = job.kind == RenderKind::Rays;
            csv.push_str(if rays {
                "p,q,branch,t,re,im\n"
            } else {
                "p,q,re,im,residual\n"
            });
            let slopes = enumerate_slopes(max_q);
            let traced: Vec<_> = pool.install(|| {
                slopes
                    .par_iter()
                    .map(|&s| SlopeData::new(s).and_then(|d| d.trace_ray(t_start, steps)))
                    .collect()
            });
            for (k, ray) in traced.into_iter().enumerate() {
                let Ok(ray) = ray else {
                    skipped += 1;
                    continue;
                };
                primitives += 1;
                let (p, q) = (ray.slope.p(), ray.slope.q());
                if rays {
                    for r in [ray.clone(), ray.conjugate()] {
                        let pts: Vec<C> = r.samples.iter().map(|s| s.mu).collect();
                        canvas.polyline(&pts, palette(k));
                        let b = match r.branch {
                            crate::rays::Branch::Upper => "upper",
                            crate::rays::Branch::Lower => "lower",
                        };
                        for s in &r.samples {
                            fmt_row(&mut csv, &[&p, &q, &b, &E(s.t), &E(s.mu.re), &E(s.mu.im)]);
                        }
                    }
                } else {
                    for z in [ray.cusp.mu, ray.cusp.mu.conj()] {
                        canvas.splat(z, palette(k));
                    }
                    let z = ray.cusp.mu;
                    fmt_row(
                        &mut csv,
                        &[&p, &q, &E(z.re), &E(z.im), &E(ray.cusp.residual)],
                    );
                }
            }
        }
        RenderKind::Neighbourhoods => {
            let max_q: u32 = job.param("max_q", 5)?;
            let extent: f64 = job.param("extent", 20.0)?;
            let steps: usize = job.param("steps", 400)?;
            let boundary: String = job.param("boundary", "halfplane".to_string())?;
            csv.push_str("p,q,curve,index,re,im\n");
            let curves: Vec<LevelCurve> = match boundary.as_str() {
                "halfplane" => vec![
                    ("up", Box::new(move |s| C::new(-2.0, extent * s))),
                    ("down", Box::new(move |s| C::new(-2.0, -extent * s))),
                ],
                "sector" => {
                    let (a, b) = (
                        C::from_polar(extent, 5.0 * PI / 6.0),
                        C::from_polar(extent, -5.0 * PI / 6.0),
                    );
                    vec![
                        ("up", Box::new(move |s| C::new(-4.0, 0.0) + a * s)),
                        ("down", Box::new(move |s| C::new(-4.0, 0.0) + b * s)),
                    ]
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "boundary must be halfplane or sector, got {other:?}"
                    )))
                }
            };
            let slopes = enumerate_slopes(max_q);
            let traced: Vec<Vec<Result<Vec<C>>>> = pool.install(|| {
                slopes
                    .par_iter()
                    .map(|&s| match SlopeData::new(s) {
                        Ok(d) => curves
                            .iter()
                            .map(|(_, f)| d.trace_level_curve(f, steps))
                            .collect(),
                        Err(e) => curves.iter().map(|_| Err(e.clone())).collect(),
                    })
                    .collect()
            });
            for (k, (s, per)) in slopes.iter().zip(traced).enumerate() {
                for ((name, _), pts) in curves.iter().zip(per) {
                    let Ok(pts) = pts else {
                        skipped += 1;
                        continue;
                    };
                    primitives += 1;
                    let conj: Vec<C> = pts.iter().map(|z| z.conj()).collect();
                    canvas.polyline(&pts, palette(k));
                    canvas.polyline(&conj, palette(k));
                    for (i, z) in pts.iter().enumerate() {
                        fmt_row(&mut csv, &[&s.p(), &s.q(), name, &i, &E(z.re), &E(z.im)]);
                    }
                }
            }
        }
        RenderKind::Julia => {
            let slope: Slope = job.param("slope", Slope::new(1, 2)?)?;
            let max_iter: u32 = job.param("max_iter", 200)?;
            let ev = trace_polys(slope).q.evaluator();
            let radius: f64 = job.param("escape_radius", escape_radius(&ev))?;
            let w = job.resolution.w;
            let rows: Vec<Vec<u32>> = pool.install(|| {
                (0..job.resolution.h)
                    .into_par_iter()
                    .map(|row| {
                        (0..w)
                            .map(|col| {
                                let mut z = frame.pixel_center(col, row);
                                for k in 0..max_iter {
                                    if !(z.norm() <= radius) {
                                        return k;
                                    }
                                    z = ev.eval_fast(z);
                                }
                                max_iter
                            })
                            .collect()
                    })
                    .collect()
            });
            csv.push_str("col,row,re,im,escape\n");
            for (row, vals) in rows.iter().enumerate() {
                for (col, &k) in vals.iter().enumerate() {
                    let rgb = if k == max_iter {
                        BLACK
                    } else {
                        let g = (255.0 * (1.0 - (k as f64 / max_iter as f64).sqrt())) as u8;
                        [g, g, 255]
                    };
                    canvas.raster.put(col as i64, row as i64, rgb);
                    let z = frame.pixel_center(col as u32, row as u32);
                    fmt_row(&mut csv, &[&col, &row, &E(z.re), &E(z.im), &k]);
                }
            }
            primitives = (w * job.resolution.h) as usize;
        }
        RenderKind::Limitset => {
            let mu = job.complex_param("mu", C::new(0.0, 2.0))?;
            let depth: usize = job.param("depth", 6)?;
            let phi: bool = job.param("phi", false)?;
            let seed = match job.params.get("seed").map(String::as_str) {
                None | Some("fixed-points") => Seed::FixedPoints,
                Some("isometric-circles") => Seed::IsometricCircles,
                Some(other) => match other.strip_prefix("peripheral:") {
                    Some(s) => Seed::Peripheral(s.parse()?),
                    None => return Err(Error::InvalidInput(format!("unknown seed {other:?}"))),
                },
            };
            let data = limit_set_points(mu, depth, seed, phi)?;
            csv.push_str("type,cx,cy,r\n");
            for z in &data.points {
                canvas.dot(*z, BLACK);
                fmt_row(&mut csv, &[&"point", &E(z.re), &E(z.im), &E(0.0)]);
            }
            for c in &data.circles {
                canvas.shape(c, BLACK);
                csv.push_str(&c.csv_row());
                csv.push('\n');
            }
            primitives = data.points.len() + data.circles.len();
            skipped = data.skipped;
        }
        RenderKind::Isocircles => {
            let slope: Slope = job.param("slope", Slope::new(3, 4)?)?;
            let mu = match job.params.get("mu") {
                Some(v) => parse_complex(v)?,
                None => {
                    // Default: the point where tr W = −2 + it on the neighbourhood boundary.
                    let t: f64 = job.param("t", 1.0)?;
                    let d = SlopeData::new(slope)?;
                    *d.trace_level_curve(|s| C::new(-2.0, t * s), 32)?
                        .last()
                        .expect("non-empty curve")
                }
            };
            let fd = fundamental_domain(slope, mu)?;
            let seg = ell_segment(slope, mu)?;
            csv.push_str("type,cx,cy,r\n");
            let named = [
                ("d1", fd.d1, GREY),
                ("d2", fd.d2, GREY),
                ("d1_shifted", fd.d1_shifted, palette(1)),
                ("d2_shifted", fd.d2_shifted, palette(1)),
            ];
            for (name, c, rgb) in named {
                canvas.shape(&c, rgb);
                if let CircleOrLine::Circle { center, radius } = c {
                    fmt_row(&mut csv, &[&name, &E(center.re), &E(center.im), &E(radius)]);
                }
            }
            for (name, x) in [("strip_left", fd.strip.0), ("strip_right", fd.strip.1)] {
                let l = CircleOrLine::line(C::new(x, 0.0), C::new(0.0, 1.0))?;
                canvas.shape(&l, palette(0));
                fmt_row(&mut csv, &[&name, &E(x), &E(0.0), &E(0.0)]);
            }
            canvas.segment(seg.start, seg.end, palette(2));
            for (name, z) in [
                ("ell_start", seg.start),
                ("ell_end", seg.end),
                ("tangency", fd.tangency_point),
            ] {
                canvas.splat(z, BLACK);
                fmt_row(&mut csv, &[&name, &E(z.re), &E(z.im), &E(0.0)]);
            }
            primitives = named.len() + 5;
        }
    }
    Ok(RenderOutput {
        raster: canvas.raster,
        csv,
        report: RenderReport {
            kind: job.kind,
            primitives,
            skipped,
        },
    })
}
