//! Farey words W_{p/q} in the free group on `x`, `y`.
//!
//! The word of slope p/q has length 2q; its letters alternate between `x`
//! (odd positions) and `y` (even positions) and the sign of the i-th letter
//! is `(-1)^floor((i-1)p/q)`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reduced rational slope p/q in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Slope {
    p: u32,
    q: u32,
}

impl Slope {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p > q || p.gcd(&q) != 1 {
            return Err(Error::InvalidSlope {
                p: p as i64,
                q: q as i64,
            });
        }
        Ok(Slope { p, q })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn as_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("slope must look like p/q, got {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if p <= 0 || q <= 0 || p > u32::MAX as i64 || q > u32::MAX as i64 {
            return Err(Error::InvalidSlope { p, q });
        }
        Slope::new(p as u32, q as u32)
    }
}

impl TryFrom<String> for Slope {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Slope> for String {
    fn from(s: Slope) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    X,
    Y,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub base: Base,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(base: Base, inverse: bool) -> Self {
        Letter { base, inverse }
    }

    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            base: self.base,
            inverse: !self.inverse,
        }
    }

    /// ASCII form: `x`, `X` (= x⁻¹), `y`, `Y` (= y⁻¹).
    pub fn to_char(self) -> char {
        match (self.base, self.inverse) {
            (Base::X, false) => 'x',
            (Base::X, true) => 'X',
            (Base::Y, false) => 'y',
            (Base::Y, true) => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'x' => Letter::new(Base::X, false),
            'X' => Letter::new(Base::X, true),
            'y' => Letter::new(Base::Y, false),
            'Y' => Letter::new(Base::Y, true),
            _ => return None,
        })
    }
}

/// A word in `x`, `y` together with the slope it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyWord {
    slope: Slope,
    letters: Vec<Letter>,
}

impl FareyWord {
    pub fn slope(&self) -> Slope {
        self.slope
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_ascii(&self) -> String {
        self.letters.iter().map(|l| l.to_char()).collect()
    }
}

impl fmt::Display for FareyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

/// Parses an ASCII word (`x X y Y`). The result is not checked to be a
/// Farey word.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| {
            Letter::from_char(c)
                .ok_or_else(|| Error::InvalidInput(format!("unexpected letter {c:?} in word")))
        })
        .collect()
}

pub fn farey_word(slope: Slope) -> FareyWord {
    let (p, q) = (slope.p as u64, slope.q as u64);
    let letters = (1..=2 * q)
        .map(|i| {
            let base = if i % 2 == 1 { Base::X } else { Base::Y };
            let inverse = ((i - 1) * p / q) % 2 == 1;
            Letter::new(base, inverse)
        })
        .collect();
    FareyWord { slope, letters }
}

/// All reduced p/q with q <= max_q, ordered by q then p.
pub fn enumerate_slopes(max_q: u32) -> Vec<Slope> {
    (1..=max_q)
        .flat_map(|q| {
            (1..=q)
                .filter(move |p| p.gcd(&q) == 1)
                .map(move |p| Slope { p, q })
        })
        .collect()
}

/// Number of reduced slopes with denominator at most `max_q`.
pub fn count_slopes(max_q: u32) -> usize {
    (1..=max_q)
        .map(|q| (1..=q).filter(|p| p.gcd(&q) == 1).count())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub slope: Slope,
    pub length: usize,
    pub alternates: bool,
    pub x_exponent_sum: i64,
    pub y_exponent_sum: i64,
}

pub fn word_report(word: &FareyWord) -> StructureReport {
    let alternates = word
        .letters
        .iter()
        .enumerate()
        .all(|(i, l)| l.base == if i % 2 == 0 { Base::X } else { Base::Y });
    let sum = |b: Base| -> i64 {
        word.letters
            .iter()
            .filter(|l| l.base == b)
            .map(|l| l.sign() as i64)
            .sum()
    };
    StructureReport {
        slope: word.slope,
        length: word.letters.len(),
        alternates,
        x_exponent_sum: sum(Base::X),
        y_exponent_sum: sum(Base::Y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u32, q: u32) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn table_words() {
        let rows = [
            (1, 2, "xyXY"),
            (4, 7, "xyXYxyXyxYXyxY"),
            (3, 5, "xyXYxYXyxY"),
            (5, 8, "xyXYxYXyXYxyXyxY"),
            (2, 3, "xyXyxY"),
            (5, 7, "xyXyxYxYXyXYxY"),
            (3, 4, "xyXyXYxY"),
            (4, 5, "xyXyXyxYxY"),
            (1, 1, "xY"),
        ];
        for (p, q, w) in rows {
            assert_eq!(farey_word(s(p, q)).to_ascii(), w, "{p}/{q}");
        }
    }

    #[test]
    fn slope_validation() {
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 1).is_err());
        assert!(Slope::new(3, 2).is_err());
        assert_eq!("3/4".parse::<Slope>().unwrap(), s(3, 4));
        assert!("3-4".parse::<Slope>().is_err());
        assert!("-1/2".parse::<Slope>().is_err());
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_slopes(1), vec![s(1, 1)]);
        assert_eq!(enumerate_slopes(2), vec![s(1, 1), s(1, 2)]);
        assert_eq!(
            enumerate_slopes(3),
            vec![s(1, 1), s(1, 2), s(1, 3), s(2, 3)]
        );
        assert_eq!(enumerate_slopes(50).len(), 774);
        assert_eq!(count_slopes(50), 774);
    }

    #[test]
    fn reports() {
        let r = word_report(&farey_word(s(1, 2)));
        assert_eq!((r.length, r.x_exponent_sum, r.y_exponent_sum), (4, 0, 0));
        let r = word_report(&farey_word(s(1, 1)));
        assert_eq!((r.length, r.x_exponent_sum, r.y_exponent_sum), (2, 1, -1));
        let r = word_report(&farey_word(s(2, 3)));
        assert_eq!((r.length, r.x_exponent_sum, r.y_exponent_sum), (6, 1, 1));
        assert!(r.alternates);
    }

    #[test]
    fn length_and_alternation_up_to_100() {
        for slope in enumerate_slopes(100) {
            let w = farey_word(slope);
            let r = word_report(&w);
            assert_eq!(r.length, 2 * slope.q() as usize);
            assert!(r.alternates);
        }
    }

    #[test]
    fn ascii_round_trip() {
        let w = farey_word(s(5, 8));
        assert_eq!(parse_letters(&w.to_ascii()).unwrap(), w.letters());
        assert!(parse_letters("xz").is_err());
    }
}
