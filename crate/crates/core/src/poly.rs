//! Exact integer polynomials in μ and 2×2 matrices over them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::PolyEvaluator;
use crate::farey::{farey_word, Base, FareyWord, Letter, Slope};

/// Polynomial with arbitrary-precision integer coefficients, ascending by
/// degree. Trailing zeros are always stripped, so the zero polynomial is the
/// empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::from_i64s(&[c])
    }

    /// The indeterminate μ itself.
    pub fn mu() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Value at μ = 0.
    pub fn at_zero(&self) -> BigInt {
        self.coeff(0)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Index of the lowest nonzero coefficient (the power of μ dividing the
    /// polynomial); `None` for the zero polynomial.
    pub fn mu_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divides by μ^k, dropping the low coefficients. Only meaningful when
    /// μ^k divides the polynomial.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder of `self` by `divisor`: the remainder of
    /// lc(divisor)^(deg self − deg divisor + 1) · self.
    pub fn pseudo_rem(&self, divisor: &IntPoly) -> IntPoly {
        let dd = divisor.degree().expect("pseudo_rem by zero polynomial");
        let lc = divisor.leading();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let lead = r[top].clone();
            let shift = top - dd;
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                r[shift + j] -= &lead * dc;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        IntPoly::new(r)
    }

    /// Exact quotient over Z, or `None` if `divisor` does not divide `self`
    /// in Z[μ].
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let ds = self.degree()?;
        if ds < dd {
            return None;
        }
        let lc = divisor.leading();
        let mut r = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let (qk, rem) = r[k + dd].div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                r[k + j] -= &qk * dc;
            }
            quot[k] = qk;
        }
        r.iter().all(Zero::is_zero).then(|| IntPoly::new(quot))
    }

    /// Greatest common divisor in Z[μ], with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content().abs());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content().abs());
        }
        let cg = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                break;
            }
            a = b;
            b = r.primitive_part();
        }
        b.primitive_part().scale(&cg)
    }

    /// Integer polynomial square root with positive constant term, if one
    /// exists.
    pub fn exact_sqrt(&self) -> Option<IntPoly> {
        let n = self.degree()?;
        if n % 2 == 1 {
            return None;
        }
        let c0 = self.at_zero();
        if !c0.is_positive() {
            return None;
        }
        let s = c0.sqrt();
        if &s * &s != c0 {
            return None;
        }
        let k = n / 2;
        let two_s = &s * 2;
        let mut v = vec![s];
        for j in 1..=k {
            let mut acc = self.coeff(j);
            for i in 1..j {
                acc -= &v[i] * &v[j - i];
            }
            let (vj, rem) = acc.div_rem(&two_s);
            if !rem.is_zero() {
                return None;
            }
            v.push(vj);
        }
        let v = IntPoly::new(v);
        (&v * &v == *self).then_some(v)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn evaluator(&self) -> PolyEvaluator {
        PolyEvaluator::new(self)
    }

    /// Decimal coefficient strings, ascending degree.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_decimal_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        items
            .iter()
            .map(|s| {
                s.as_ref()
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::InvalidInput(format!("bad coefficient {:?}", s.as_ref())))
            })
            .collect::<Result<Vec<_>>>()
            .map(IntPoly::new)
    }

    /// JSON array of decimal coefficient strings, ascending degree.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(self.to_decimal_strings())
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("polynomial JSON must be an array".into()))?;
        let items: Vec<&str> = arr
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or_else(|| Error::InvalidInput("coefficients must be strings".into()))
            })
            .collect::<Result<_>>()?;
        Self::from_decimal_strings(&items)
    }

    /// Coefficients as f64 (possibly rounded).
    pub fn to_f64s(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal_strings().serialize(s)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("mu")?,
                1 => write!(f, "{mag}*mu")?,
                _ if unit => write!(f, "mu^{k}")?,
                _ => write!(f, "{mag}*mu^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// 2×2 matrix over Z[μ], acting as (a b; c d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix2 {
    pub a: IntPoly,
    pub b: IntPoly,
    pub c: IntPoly,
    pub d: IntPoly,
}

impl PolyMatrix2 {
    pub fn identity() -> Self {
        PolyMatrix2 {
            a: IntPoly::constant(1),
            b: IntPoly::zero(),
            c: IntPoly::zero(),
            d: IntPoly::constant(1),
        }
    }

    pub fn det(&self) -> IntPoly {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> IntPoly {
        &self.a + &self.d
    }

    pub fn mul(&self, rhs: &PolyMatrix2) -> PolyMatrix2 {
        PolyMatrix2 {
            a: &(&self.a * &rhs.a) + &(&self.b * &rhs.c),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.d),
            c: &(&self.c * &rhs.a) + &(&self.d * &rhs.c),
            d: &(&self.c * &rhs.b) + &(&self.d * &rhs.d),
        }
    }

    /// Right multiplication by a generator letter, using its sparse shape.
    fn mul_letter(&self, l: Letter) -> PolyMatrix2 {
        let s = BigInt::from(l.sign());
        match l.base {
            // (a b; c d)(1 s; 0 1) = (a, s a + b; c, s c + d)
            Base::X => PolyMatrix2 {
                a: self.a.clone(),
                b: &self.a.scale(&s) + &self.b,
                c: self.c.clone(),
                d: &self.c.scale(&s) + &self.d,
            },
            // (a b; c d)(1 0; s μ 1) = (a + s μ b, b; c + s μ d, d)
            Base::Y => {
                let smu = IntPoly::new(vec![BigInt::zero(), s]);
                PolyMatrix2 {
                    a: &self.a + &(&smu * &self.b),
                    b: self.b.clone(),
                    c: &self.c + &(&smu * &self.d),
                    d: self.d.clone(),
                }
            }
        }
    }
}

/// X = (1 1; 0 1) and Y_μ = (1 0; μ 1).
pub fn generator_matrices() -> (PolyMatrix2, PolyMatrix2) {
    let x = PolyMatrix2 {
        a: IntPoly::constant(1),
        b: IntPoly::constant(1),
        c: IntPoly::zero(),
        d: IntPoly::constant(1),
    };
    let y = PolyMatrix2 {
        a: IntPoly::constant(1),
        b: IntPoly::zero(),
        c: IntPoly::mu(),
        d: IntPoly::constant(1),
    };
    (x, y)
}

/// Product of the letters with x ↦ X, y ↦ Y_μ, left to right.
pub fn letters_matrix(letters: &[Letter]) -> PolyMatrix2 {
    letters
        .iter()
        .fold(PolyMatrix2::identity(), |m, &l| m.mul_letter(l))
}

pub fn farey_matrix(word: &FareyWord) -> PolyMatrix2 {
    letters_matrix(word.letters())
}

/// The Farey polynomial P = tr W_{p/q}(μ) and Q = P − 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FareyPolyPair {
    pub slope: Slope,
    #[serde(rename = "P")]
    pub p: IntPoly,
    #[serde(rename = "Q")]
    pub q: IntPoly,
}

pub fn trace_polys(slope: Slope) -> FareyPolyPair {
    let m = farey_matrix(&farey_word(slope));
    let p = m.trace();
    let q = &p - &IntPoly::constant(2);
    FareyPolyPair { slope, p, q }
}

/// Checks Q_{p/q} = a + d − 2 = c as exact polynomials.
pub fn fricke_check(slope: Slope) -> bool {
    let m = farey_matrix(&farey_word(slope));
    let q = &m.trace() - &IntPoly::constant(2);
    q == m.c
}

/// tr(x⁻¹ W_{p/q}), which is the constant 2 for every slope.
pub fn shifted_trace(slope: Slope) -> IntPoly {
    let mut letters = vec![Letter::new(Base::X, true)];
    letters.extend_from_slice(farey_word(slope).letters());
    letters_matrix(&letters).trace()
}

/// 0 is superattracting for Q_{p/q} (Q′(0) = 0) exactly when q is even;
/// returns whether that holds for this slope.
pub fn superattractor_check(slope: Slope) -> bool {
    let dq0 = trace_polys(slope).q.coeff(1);
    dq0.is_zero() == slope.q().is_multiple_of(2)
}

/// Result of testing Q_{p/q} against the conjectured shape ±μ u(μ)² (q odd)
/// or μ^{2⌊(n+1)/2⌋} v(μ)² with q = 2ⁿ r (q even).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub slope: Slope,
    pub matches: bool,
    /// Actual power of μ dividing Q.
    pub mu_power: usize,
    pub expected_mu_power: usize,
    /// Sign of Q / (μ^k · base²).
    pub sign: i8,
    /// u (q odd) or v (q even), normalised to a positive constant term.
    pub base: Option<IntPoly>,
    /// How the square root was found: "gcd" when gcd(R, R′) already squares
    /// to R, "sqrt" when only the direct root succeeded.
    pub method: Option<String>,
    pub note: String,
}

pub fn factor_shape(slope: Slope) -> ConjectureReport {
    let q = trace_polys(slope).q;
    let qden = slope.q();
    let expected_mu_power = if qden % 2 == 1 {
        1
    } else {
        let n = qden.trailing_zeros() as usize;
        2 * n.div_ceil(2)
    };
    let mu_power = q.mu_valuation().unwrap_or(0);
    let rest = q.shift_down(mu_power);
    let sign: i8 = if rest.at_zero().is_negative() { -1 } else { 1 };
    let rest = rest.scale(&BigInt::from(sign));

    // For R = u² with u squarefree, gcd(R, R′) = u up to a unit.
    let mut g = rest.gcd(&rest.derivative());
    if g.at_zero().is_negative() {
        g = -&g;
    }
    let (base, method) = if &g * &g == rest {
        (Some(g), Some("gcd".to_string()))
    } else if let Some(v) = rest.exact_sqrt() {
        (Some(v), Some("sqrt".to_string()))
    } else {
        (None, None)
    };

    let mut problems = Vec::new();
    if base.is_none() {
        problems.push("cofactor is not a perfect square".to_string());
    }
    if mu_power != expected_mu_power {
        problems.push(format!("mu power {mu_power}, expected {expected_mu_power}"));
    }
    if qden % 2 == 1 {
        if let Some(u) = &base {
            if !u.at_zero().is_one() {
                problems.push(format!("u(0) = {}, expected 1", u.at_zero()));
            }
        }
    } else if sign != 1 {
        problems.push("negative sign for even q".to_string());
    }
    ConjectureReport {
        slope,
        matches: problems.is_empty(),
        mu_power,
        expected_mu_power,
        sign,
        base,
        method,
        note: if problems.is_empty() {
            "ok".to_string()
        } else {
            problems.join("; ")
        },
    }
}
