//! Reference values shared by the integration and acceptance tests.
#![allow(dead_code)]

use riley_core::{Complex64, IntPoly, Slope};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn s(p: u32, q: u32) -> Slope {
    Slope::new(p, q).unwrap()
}

pub fn poly(coeffs: &[i64]) -> IntPoly {
    IntPoly::from_i64s(coeffs)
}

pub struct Row {
    pub slope: (u32, u32),
    pub word: &'static str,
    /// Q = sign · μ^k · base².
    pub sign: i64,
    pub mu_power: usize,
    pub base: &'static [i64],
    pub cusp: Complex64,
}

impl Row {
    pub fn q_poly(&self) -> IntPoly {
        let b = poly(self.base);
        let mut mono = vec![0; self.mu_power + 1];
        mono[self.mu_power] = self.sign;
        &poly(&mono) * &(&b * &b)
    }
}

pub fn table() -> Vec<Row> {
    let r = |p, q, word, sign, mu_power, base, cusp| Row {
        slope: (p, q),
        word,
        sign,
        mu_power,
        base,
        cusp,
    };
    vec![
        r(1, 2, "xyXY", 1, 2, &[1], c(0.0, 2.0)),
        r(
            4,
            7,
            "xyXYxyXyxYXyxY",
            1,
            1,
            &[-1, 2, -1, 1],
            c(0.427505, 1.57557),
        ),
        r(3, 5, "xyXYxYXyxY", -1, 1, &[1, -1, 1], c(0.773301, 1.46771)),
        r(
            5,
            8,
            "xyXYxYXyXYxyXyxY",
            1,
            4,
            &[2, -2, 1],
            c(1.05642, 1.30324),
        ),
        r(2, 3, "xyXyxY", 1, 1, &[-1, 1], c(1.5, 7f64.sqrt() / 2.0)),
        r(
            5,
            7,
            "xyXyxYxYXyXYxY",
            -1,
            1,
            &[1, 2, -3, 1],
            c(1.85181, 0.911292),
        ),
        r(3, 4, "xyXyXYxY", 1, 2, &[-2, 1], c(2.27202, 0.786151)),
        r(4, 5, "xyXyXyxYxY", 1, 1, &[1, -3, 1], c(2.75577, 0.474477)),
        r(1, 1, "xY", -1, 1, &[1], c(4.0, 0.0)),
    ]
}

pub fn table_cusp(slope: Slope) -> Option<Complex64> {
    table()
        .into_iter()
        .find(|r| r.slope == (slope.p(), slope.q()))
        .map(|r| r.cusp)
}

/// Evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}
