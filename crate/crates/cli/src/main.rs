//! `riley`: command-line front end to riley-core.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use riley_core::farey::word_report;
use riley_core::membership::{Budget, Classifier, Verdict};
use riley_core::poly::fricke_check;
use riley_core::rays::{trace_ray, Branch};
use riley_core::render::{parse_complex, render, RenderJob, Resolution, Window};
use riley_core::roots::{cusp_point, ray_extension_spectrum};
use riley_core::{enumerate_slopes, farey_word, trace_polys, Slope};

const SCHEMA: &str = "riley/1";

#[derive(Parser)]
#[command(
    name = "riley",
    version,
    about = "Farey polynomials, pleating rays and membership certificates for the Riley slice"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Opts {
    /// key=value file; flags given on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    max_q: Option<u32>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    max_iter: Option<u32>,
    #[arg(long, global = true)]
    max_chain_nodes: Option<usize>,
    /// Root residual tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// x0,x1,y0,y1
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// WxH
    #[arg(long, global = true)]
    res: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Ppm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Farey word W_{p/q}
    Word { slope: String },
    /// Farey polynomials P and Q as integer coefficient lists
    Poly { slope: String },
    /// Cusp point at the end of the upper pleating ray
    Cusp { slope: String },
    /// Sampled pleating ray, tr W = t for t from --t-start up to -2
    Ray {
        slope: String,
        #[arg(long, default_value_t = -50.0, allow_hyphen_values = true)]
        t_start: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Emit the conjugate branch instead
        #[arg(long)]
        lower: bool,
    },
    /// Membership certificate for μ given as re,im
    Member {
        #[arg(allow_hyphen_values = true)]
        mu: String,
        /// Run interior and exterior tests independently and report both
        #[arg(long)]
        audit: bool,
    },
    /// Parameters with tr W_{p/q} at the elliptic levels −2cos(2π/r)
    Spectrum {
        slope: String,
        #[arg(long, default_value_t = 12)]
        r_max: u32,
        /// Also the levels 2 + 4cos²(π/r)
        #[arg(long)]
        positive: bool,
    },
    /// Render a figure; kinds: rootset cusps rays neighbourhoods julia limitset isocircles
    Render {
        kind: String,
        /// Kind-specific parameter key=value (repeatable)
        #[arg(short = 'p', long = "param")]
        params: Vec<String>,
    },
    /// Quick self-check against known values
    Selftest,
}

enum Failure {
    Usage(String),
    Domain(riley_core::Error),
    Io(std::io::Error),
}

impl From<riley_core::Error> for Failure {
    fn from(e: riley_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

struct Settings {
    budget: Budget,
    tol: f64,
    window: Option<Window>,
    res: Resolution,
    out: Option<PathBuf>,
    format: Option<Format>,
    /// Values set explicitly by flag or config, forwarded to render jobs.
    explicit: BTreeMap<&'static str, String>,
}

fn read_config(path: &Path) -> Res<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!("{}:{}: expected key=value", path.display(), n + 1))
        })?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn resolve(opts: Opts) -> Res<Settings> {
    let mut cfg = match &opts.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let mut set = |key: &str, flag: Option<String>| {
        if let Some(v) = flag {
            cfg.insert(key.to_string(), v);
        }
    };
    set("max-q", opts.max_q.map(|v| v.to_string()));
    set("depth", opts.depth.map(|v| v.to_string()));
    set("max-iter", opts.max_iter.map(|v| v.to_string()));
    set(
        "max-chain-nodes",
        opts.max_chain_nodes.map(|v| v.to_string()),
    );
    set("tol", opts.tol.map(|v| v.to_string()));
    set("window", opts.window);
    set("res", opts.res);
    set("out", opts.out.map(|p| p.display().to_string()));
    set(
        "format",
        opts.format
            .map(|f| f.to_possible_value().unwrap().get_name().to_string()),
    );

    fn num<T: std::str::FromStr>(cfg: &BTreeMap<String, String>, k: &str, d: T) -> Res<T> {
        match cfg.get(k) {
            None => Ok(d),
            Some(v) => v
                .parse()
                .map_err(|_| Failure::Usage(format!("bad value {v:?} for {k}"))),
        }
    }
    const KNOWN: [&str; 9] = [
        "max-q",
        "depth",
        "max-iter",
        "max-chain-nodes",
        "tol",
        "window",
        "res",
        "out",
        "format",
    ];
    if let Some(k) = cfg.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(Failure::Usage(format!("unknown setting {k:?}")));
    }
    let d = Budget::default();
    let budget = Budget {
        max_q: num(&cfg, "max-q", d.max_q)?,
        depth: num(&cfg, "depth", d.depth)?,
        max_iter: num(&cfg, "max-iter", d.max_iter)?,
        max_chain_nodes: num(&cfg, "max-chain-nodes", d.max_chain_nodes)?,
    };
    let format = match cfg.get("format") {
        None => None,
        Some(f) => Some(
            Format::from_str(f, true)
                .map_err(|_| Failure::Usage(format!("unknown format {f:?}")))?,
        ),
    };
    let mut explicit = BTreeMap::new();
    for (key, param) in [
        ("max-q", "max_q"),
        ("depth", "depth"),
        ("max-iter", "max_iter"),
        ("tol", "tol"),
    ] {
        if let Some(v) = cfg.get(key) {
            explicit.insert(param, v.clone());
        }
    }
    Ok(Settings {
        budget,
        tol: num(&cfg, "tol", 1e-10)?,
        window: cfg.get("window").map(|w| w.parse()).transpose()?,
        res: cfg
            .get("res")
            .map(|r| r.parse())
            .transpose()?
            .unwrap_or(Resolution { w: 512, h: 512 }),
        out: cfg.get("out").map(PathBuf::from),
        format,
        explicit,
    })
}

impl Settings {
    fn format(&self, allowed: &[Format], default: Format) -> Res<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Failure::Usage(
                "this subcommand does not support that --format".into(),
            ))
        }
    }

    fn emit(&self, bytes: &[u8]) -> Res<()> {
        match &self.out {
            Some(p) => std::fs::write(p, bytes)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
            }
        }
        Ok(())
    }

    fn emit_json(&self, v: &Value) -> Res<()> {
        let mut s = serde_json::to_string(v).expect("json value serializes");
        s.push('\n');
        self.emit(s.as_bytes())
    }
}

fn slope(s: &str) -> Res<Slope> {
    Ok(s.parse()?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(cli: Cli) -> Res<ExitCode> {
    let st = resolve(cli.opts)?;
    let ok = Ok(ExitCode::SUCCESS);
    match cli.cmd {
        Cmd::Word { slope: s } => {
            let s = slope(&s)?;
            let w = farey_word(s);
            // Plain text unless a format was asked for.
            match st.format {
                None => st.emit(format!("{}\n", w.to_ascii()).as_bytes())?,
                Some(_) => match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                    Format::Csv => st.emit(
                        format!("p,q,word\n{},{},{}\n", s.p(), s.q(), w.to_ascii()).as_bytes(),
                    )?,
                    _ => st.emit_json(&json!({
                        "schema": SCHEMA,
                        "slope": s.to_string(),
                        "word": w.to_ascii(),
                        "structure": to_value(&word_report(&w)),
                    }))?,
                },
            }
            ok
        }
        Cmd::Poly { slope: s } => {
            let s = slope(&s)?;
            let pair = trace_polys(s);
            match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                Format::Csv => {
                    let mut out = String::from("k,P,Q\n");
                    let n = pair.p.coeffs().len().max(pair.q.coeffs().len());
                    for k in 0..n {
                        let _ = writeln!(out, "{k},{},{}", pair.p.coeff(k), pair.q.coeff(k));
                    }
                    st.emit(out.as_bytes())?;
                }
                _ => st.emit_json(&json!({
                    "schema": SCHEMA,
                    "slope": s.to_string(),
                    "P": pair.p.to_json(),
                    "Q": pair.q.to_json(),
                    "trace_identity": fricke_check(s),
                }))?,
            }
            ok
        }
        Cmd::Cusp { slope: s } => {
            let s = slope(&s)?;
            let c = cusp_point(s)?;
            match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                Format::Csv => st.emit(
                    format!(
                        "p,q,re,im,residual\n{},{},{:.17e},{:.17e},{:.17e}\n",
                        s.p(),
                        s.q(),
                        c.mu.re,
                        c.mu.im,
                        c.residual
                    )
                    .as_bytes(),
                )?,
                _ => st.emit_json(&json!({
                    "mu": [c.mu.re, c.mu.im],
                    "residual": c.residual,
                    "slope": s.to_string(),
                    "schema": SCHEMA,
                }))?,
            }
            ok
        }
        Cmd::Ray {
            slope: s,
            t_start,
            steps,
            lower,
        } => {
            let s = slope(&s)?;
            let mut ray = trace_ray(s, t_start, steps)?;
            if lower {
                ray = ray.conjugate();
            }
            match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                Format::Csv => st.emit(ray.to_csv().as_bytes())?,
                _ => {
                    let mut v = to_value(&ray);
                    v["schema"] = json!(SCHEMA);
                    st.emit_json(&v)?
                }
            }
            ok
        }
        Cmd::Member { mu, audit } => {
            let mu = parse_complex(&mu)?;
            let format = st.format(&[Format::Json, Format::Csv], Format::Json)?;
            let classifier = Classifier::new(st.budget)?;
            if audit {
                let a = classifier.audit(mu)?;
                let verdict = |f: &Option<riley_core::membership::Finding>| {
                    f.as_ref()
                        .map_or("none".to_string(), |f| format!("{:?}", f.verdict))
                };
                match format {
                    Format::Csv => st.emit(
                        format!(
                            "re,im,interior,exterior,contradiction\n{:.17e},{:.17e},{},{},{}\n",
                            mu.re,
                            mu.im,
                            verdict(&a.interior),
                            verdict(&a.exterior),
                            a.contradiction()
                        )
                        .as_bytes(),
                    )?,
                    _ => {
                        let mut v = to_value(&a);
                        v["schema"] = json!(SCHEMA);
                        v["mu"] = json!([mu.re, mu.im]);
                        v["contradiction"] = json!(a.contradiction());
                        st.emit_json(&v)?
                    }
                }
                return Ok(if a.interior.is_none() && a.exterior.is_none() {
                    ExitCode::from(3)
                } else {
                    ExitCode::SUCCESS
                });
            }
            let cert = classifier.classify(mu)?;
            match format {
                Format::Csv => {
                    let grade = cert.grade.map_or(String::new(), |g| format!("{g:?}"));
                    st.emit(
                        format!(
                            "re,im,verdict,grade\n{:.17e},{:.17e},{:?},{grade}\n",
                            mu.re, mu.im, cert.verdict
                        )
                        .as_bytes(),
                    )?
                }
                _ => st.emit(format!("{}\n", cert.to_json()).as_bytes())?,
            }
            Ok(if cert.verdict == Verdict::Unknown {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Spectrum {
            slope: s,
            r_max,
            positive,
        } => {
            let s = slope(&s)?;
            let levels = ray_extension_spectrum(s, r_max, positive, st.tol)?;
            match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                Format::Csv => {
                    let mut out = String::from("r,trace,re,im,residual\n");
                    for l in &levels {
                        for (z, res) in l.mus.roots.iter().zip(&l.mus.residuals) {
                            let _ = writeln!(
                                out,
                                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                                l.r, l.trace, z.re, z.im, res
                            );
                        }
                    }
                    st.emit(out.as_bytes())?
                }
                _ => st.emit_json(&json!({
                    "schema": SCHEMA,
                    "slope": s.to_string(),
                    "levels": to_value(&levels),
                }))?,
            }
            ok
        }
        Cmd::Render { kind, params } => {
            let kind = kind.parse()?;
            let default_window = match kind {
                riley_core::render::RenderKind::Julia => "-2,2,-2,2",
                _ => "-4,4,-4,4",
            };
            let window = match st.window {
                Some(w) => w,
                None => default_window.parse()?,
            };
            let mut job = RenderJob::new(kind, window, st.res);
            for (k, v) in &st.explicit {
                job.params.insert(k.to_string(), v.clone());
            }
            for p in &params {
                let (k, v) = p.split_once('=').ok_or_else(|| {
                    Failure::Usage(format!("--param expects key=value, got {p:?}"))
                })?;
                job.params
                    .insert(k.trim().to_string(), v.trim().to_string());
            }
            let out = render(&job)?;
            let report = json!({
                "schema": SCHEMA,
                "job": to_value(&job),
                "report": to_value(&out.report),
            });
            match st.format(&[Format::Ppm, Format::Csv, Format::Json], Format::Ppm)? {
                Format::Csv => st.emit(out.csv.as_bytes())?,
                Format::Json => st.emit_json(&report)?,
                Format::Ppm => {
                    st.emit(&out.raster.to_ppm())?;
                    if let Some(path) = &st.out {
                        std::fs::write(path.with_extension("csv"), out.csv.as_bytes())?;
                        println!("{report}");
                    }
                }
            }
            ok
        }
        Cmd::Selftest => {
            let checks = selftest();
            let failed = checks.iter().filter(|c| !c.1).count();
            match st.format(&[Format::Json, Format::Csv], Format::Json)? {
                Format::Csv => {
                    let mut out = String::from("check,pass,detail\n");
                    for (name, pass, detail) in &checks {
                        let _ = writeln!(out, "{name},{pass},\"{detail}\"");
                    }
                    st.emit(out.as_bytes())?
                }
                _ => st.emit_json(&json!({
                    "schema": SCHEMA,
                    "checks": checks
                        .iter()
                        .map(|(n, p, d)| json!({"check": n, "pass": p, "detail": d}))
                        .collect::<Vec<_>>(),
                    "failed": failed,
                }))?,
            }
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn selftest() -> Vec<(&'static str, bool, String)> {
    let table = [
        (1, 2, "xyXY", c(0.0, 2.0)),
        (4, 7, "xyXYxyXyxYXyxY", c(0.427505, 1.57557)),
        (3, 5, "xyXYxYXyxY", c(0.773301, 1.46771)),
        (5, 8, "xyXYxYXyXYxyXyxY", c(1.05642, 1.30324)),
        (2, 3, "xyXyxY", c(1.5, 7f64.sqrt() / 2.0)),
        (5, 7, "xyXyxYxYXyXYxY", c(1.85181, 0.911292)),
        (3, 4, "xyXyXYxY", c(2.27202, 0.786151)),
        (4, 5, "xyXyXyxYxY", c(2.75577, 0.474477)),
        (1, 1, "xY", c(4.0, 0.0)),
    ];
    let mut out = Vec::new();
    let mut bad_words = Vec::new();
    let mut worst_cusp = 0.0f64;
    let mut cusp_errors = Vec::new();
    for (p, q, word, cusp) in table {
        let s = Slope::new(p, q).expect("table slope");
        if farey_word(s).to_ascii() != word {
            bad_words.push(s.to_string());
        }
        match cusp_point(s) {
            Ok(cp) => worst_cusp = worst_cusp.max((cp.mu - cusp).norm()),
            Err(e) => cusp_errors.push(format!("{s}: {e}")),
        }
    }
    out.push((
        "farey_words",
        bad_words.is_empty(),
        format!("mismatches: {bad_words:?}"),
    ));
    out.push((
        "cusp_points",
        cusp_errors.is_empty() && worst_cusp < 1e-4,
        format!("max error {worst_cusp:e}; failures {cusp_errors:?}"),
    ));

    let slopes = enumerate_slopes(16);
    let bad: Vec<String> = slopes
        .iter()
        .filter(|&&s| !fricke_check(s))
        .map(|s| s.to_string())
        .collect();
    out.push((
        "trace_identity",
        bad.is_empty(),
        format!("{} slopes, failures {bad:?}", slopes.len()),
    ));

    let fig8 = (trace_polys(Slope::new(3, 5).expect("slope")).p)
        .evaluator()
        .eval(c(0.5, 3f64.sqrt() / 2.0))
        .map(|v| (v - 2.0).norm());
    out.push((
        "figure_eight",
        matches!(fig8, Ok(e) if e <= 1e-12),
        format!("|P_3/5 - 2| = {fig8:?}"),
    ));

    let bad: Vec<String> = slopes
        .iter()
        .filter(|&&s| !riley_core::poly::superattractor_check(s))
        .map(|s| s.to_string())
        .collect();
    out.push((
        "superattractor",
        bad.is_empty(),
        format!("failures {bad:?}"),
    ));

    let ray = trace_ray(Slope::new(1, 2).expect("slope"), -50.0, 96);
    let (pass, detail) = match &ray {
        Ok(r) => {
            let err = r
                .samples
                .iter()
                .map(|s| (s.mu - c(0.0, (2.0 - s.t).sqrt())).norm())
                .fold(0.0, f64::max);
            (
                err <= 1e-9 && r.branch == Branch::Upper,
                format!("max error {err:e}"),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(("half_ray", pass, detail));

    let expected = [
        (c(5.0, 0.0), Verdict::InteriorByHull),
        (c(0.0, 3.0), Verdict::InteriorByNeighbourhood),
        (c(0.5, 0.0), Verdict::NotInClosure),
        (c(0.0, 1.0), Verdict::NotInSlice),
    ];
    let (pass, detail) = match Classifier::new(Budget::default()) {
        Ok(cl) => {
            let got: Vec<String> = expected
                .iter()
                .map(|(mu, _)| {
                    cl.classify(*mu)
                        .map_or_else(|e| e.to_string(), |c| format!("{:?}", c.verdict))
                })
                .collect();
            let pass = expected
                .iter()
                .zip(&got)
                .all(|((_, v), g)| format!("{v:?}") == *g);
            (pass, format!("verdicts for 5, 3i, 0.5, i: {got:?}"))
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(("membership_examples", pass, detail));
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("riley: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("riley: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("riley: {e}");
            ExitCode::FAILURE
        }
    }
}
