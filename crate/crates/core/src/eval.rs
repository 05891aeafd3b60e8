//! Floating-point evaluation of exact integer polynomials.
//!
//! Coefficients are split into double-double pairs (exact up to 2^106 in
//! magnitude) and evaluated with compensated Horner, so values near roots
//! keep their accuracy even when coefficients are far beyond 2^53.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, ToPrimitive};

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::poly::IntPoly;

fn split_coeff(c: &BigInt) -> Dd {
    let hi = c.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rest = c - BigInt::from_f64(hi).unwrap_or_default();
    Dd::new(hi, rest.to_f64().unwrap_or(0.0))
}

/// A value represented as `mantissa · exp(log_scale)`, for arguments where
/// the plain value would overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledValue {
    /// Natural log of the modulus.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}

#[derive(Debug, Clone)]
pub struct PolyEvaluator {
    dd: Vec<Dd>,
    fast: Vec<f64>,
    abs: Vec<f64>,
    /// Every coefficient is exactly representable as an f64.
    exact_f64: bool,
    exact: Vec<BigInt>,
}

/// x = m · 2^e with m an integer.
fn decode(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::from(0), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0xf_ffff_ffff_ffff;
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | 1 << 52, exp - 1075)
    };
    (BigInt::from(sign) * BigInt::from(m), e)
}

/// n · 2^e rounded to f64.
fn encode(n: &BigInt, e: i64) -> f64 {
    let bits = n.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (n >> shift as usize).to_f64().unwrap_or(0.0);
    let mut total = e + shift;
    let mut v = top;
    while total > 0 {
        let k = total.min(1000);
        v *= 2f64.powi(k as i32);
        total -= k;
    }
    while total < 0 {
        let k = (-total).min(1000);
        v /= 2f64.powi(k as i32);
        total += k;
    }
    v
}

impl PolyEvaluator {
    pub fn new(p: &IntPoly) -> Self {
        let dd: Vec<Dd> = p.coeffs().iter().map(split_coeff).collect();
        let fast: Vec<f64> = dd.iter().map(|d| d.to_f64()).collect();
        let exact_f64 = dd
            .iter()
            .all(|d| d.lo == 0.0 && d.hi.abs() <= 2f64.powi(53));
        let abs = fast.iter().map(|c| c.abs()).collect();
        PolyEvaluator {
            dd,
            fast,
            abs,
            exact_f64,
            exact: p.coeffs().to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.dd.len().saturating_sub(1)
    }

    pub fn coeffs_f64(&self) -> &[f64] {
        &self.fast
    }

    pub fn exact_f64(&self) -> bool {
        self.exact_f64
    }

    fn horner(&self, z: Complex64) -> CDd {
        let mut acc = CDd::ZERO;
        for c in self.dd.iter().rev() {
            acc = acc.mul_c64(z.re, z.im).add_real(*c);
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = self.horner(z);
        let (re, im) = v.to_pair();
        if !v.is_finite() || !re.is_finite() || !im.is_finite() {
            return Err(Error::Overflow {
                degree: self.degree(),
            });
        }
        Ok(Complex64::new(re, im))
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut acc = CDd::ZERO;
        let mut der = CDd::ZERO;
        for c in self.dd.iter().rev() {
            der = der.mul_c64(z.re, z.im) + acc;
            acc = acc.mul_c64(z.re, z.im).add_real(*c);
        }
        let (re, im) = acc.to_pair();
        let (dre, dim) = der.to_pair();
        if ![re, im, dre, dim].iter().all(|x| x.is_finite()) {
            return Err(Error::Overflow {
                degree: self.degree(),
            });
        }
        Ok((Complex64::new(re, im), Complex64::new(dre, dim)))
    }

    /// Value and derivative of P(z) − w, with w subtracted before the
    /// final rounding.
    pub fn eval_level_with_derivative(
        &self,
        z: Complex64,
        w: Complex64,
    ) -> Result<(Complex64, Complex64)> {
        let mut acc = CDd::ZERO;
        let mut der = CDd::ZERO;
        for c in self.dd.iter().rev() {
            der = der.mul_c64(z.re, z.im) + acc;
            acc = acc.mul_c64(z.re, z.im).add_real(*c);
        }
        let acc = acc
            + CDd {
                re: Dd::from_f64(-w.re),
                im: Dd::from_f64(-w.im),
            };
        let (re, im) = acc.to_pair();
        let (dre, dim) = der.to_pair();
        if ![re, im, dre, dim].iter().all(|x| x.is_finite()) {
            return Err(Error::Overflow {
                degree: self.degree(),
            });
        }
        Ok((Complex64::new(re, im), Complex64::new(dre, dim)))
    }

    /// poly(z) − w computed exactly over the dyadic rationals and rounded
    /// once at the end.
    pub fn eval_level_exact(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.exact_horner(z, w, false).0
    }

    /// Exact value and derivative, each rounded once.
    pub fn eval_level_exact_with_derivative(
        &self,
        z: Complex64,
        w: Complex64,
    ) -> (Complex64, Complex64) {
        self.exact_horner(z, w, true)
    }

    fn exact_horner(&self, z: Complex64, w: Complex64, with_der: bool) -> (Complex64, Complex64) {
        let (ar, er) = decode(z.re);
        let (ai, ei) = decode(z.im);
        let e = er.min(ei).min(0);
        let (zr, zi) = (ar << (er - e) as usize, ai << (ei - e) as usize);
        // z = (zr + i zi)·2^e with s = −e, and P(z) = 2^{−sn} Σ c_k Z^k 2^{s(n−k)}.
        let n = self.exact.len().saturating_sub(1) as i64;
        let s = -e;
        let zero = || BigInt::from(0);
        let (mut re, mut im) = (zero(), zero());
        let (mut dre, mut dim) = (zero(), zero());
        for (k, c) in self.exact.iter().enumerate().rev() {
            if with_der {
                // D ← D·Z + A, kept at scale 2^{−s(n−1)}: A carries one extra 2^s.
                let nr = &dre * &zr - &dim * &zi;
                let ni = &dre * &zi + &dim * &zr;
                if (k as i64) < n {
                    dre = nr + &re;
                    dim = ni + &im;
                }
            }
            let nr = &re * &zr - &im * &zi;
            let ni = &re * &zi + &im * &zr;
            re = nr + (c << (s * (n - k as i64)) as usize);
            im = ni;
        }
        let base = -s * n;
        let sub = |acc: BigInt, x: f64| -> (BigInt, i64) {
            let (m, ex) = decode(x);
            if ex >= base {
                (acc - (m << (ex - base) as usize), base)
            } else {
                ((acc << (base - ex) as usize) - m, ex)
            }
        };
        let (re, bre) = sub(re, w.re);
        let (im, bim) = sub(im, w.im);
        let v = Complex64::new(encode(&re, bre), encode(&im, bim));
        let dbase = -s * (n - 1);
        let d = Complex64::new(encode(&dre, dbase), encode(&dim, dbase));
        (v, d)
    }

    /// Plain f64 Horner; for orbit iteration where last-bit accuracy is
    /// irrelevant.
    pub fn eval_fast(&self, z: Complex64) -> Complex64 {
        self.fast
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Σ |c_k| |z|^k, the scale against which rounding errors are measured.
    pub fn abs_sum(&self, r: f64) -> f64 {
        self.abs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }

    /// P(z) = z^n · P̃(1/z) with P̃ the reversed polynomial; exact in the
    /// mantissa for |z| ≥ 1 and never overflows for moderate degree.
    pub fn eval_scaled(&self, z: Complex64) -> Result<ScaledValue> {
        let n = self.degree();
        if z.norm() <= 1.0 {
            return self.eval(z).map(|v| ScaledValue {
                mantissa: v,
                log_scale: 0.0,
            });
        }
        let w = z.inv();
        let mut acc = CDd::ZERO;
        for c in self.dd.iter() {
            acc = acc.mul_c64(w.re, w.im).add_real(*c);
        }
        let (re, im) = acc.to_pair();
        let phase = Complex64::from_polar(1.0, z.arg() * n as f64);
        let m = Complex64::new(re, im) * phase;
        if !m.re.is_finite() || !m.im.is_finite() {
            return Err(Error::Overflow { degree: n });
        }
        Ok(ScaledValue {
            mantissa: m,
            log_scale: n as f64 * z.norm().ln(),
        })
    }
}
