//! Integer forms of the threshold conditions for `g(n)`.
//!
//! With `3^n = a 2^n + b`, `0 <= b < 2^n`:
//!
//! * `frac((3/2)^n) <= 1 - (a + 3)/2^n`  ⟺  `a + b + 3 <= 2^n`
//! * `||(3/2)^n|| > (3/4)^n`             ⟺  `min(b, 2^n - b) 2^n > 3^n`
//! * `g(n) = 2^n + a - 2`

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerDecomp {
    pub n: u32,
    /// `floor((3/2)^n)`
    pub a: BigUint,
    /// `3^n mod 2^n`
    pub b: BigUint,
}

impl PowerDecomp {
    fn from_power(n: u32, three_n: &BigUint) -> Self {
        let a = three_n >> n;
        let mask = (BigUint::one() << n) - BigUint::one();
        let b = three_n & mask;
        PowerDecomp { n, a, b }
    }

    fn two_n(&self) -> BigUint {
        BigUint::one() << self.n
    }

    fn star(&self) -> bool {
        &self.a + &self.b + 3u32 <= self.two_n()
    }

    fn norm(&self, three_n: &BigUint) -> bool {
        let two_n = self.two_n();
        let other = &two_n - &self.b;
        let near = if self.b < other { &self.b } else { &other };
        near * &two_n > *three_n
    }

    fn g(&self) -> BigUint {
        self.two_n() + &self.a - 2u32
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    Ok(())
}

fn three_pow(n: u32) -> BigUint {
    BigUint::from(3u32).pow(n)
}

pub fn decomp(n: u32) -> Result<PowerDecomp> {
    check_n(n)?;
    Ok(PowerDecomp::from_power(n, &three_pow(n)))
}

/// `frac((3/2)^n) <= 1 - (floor((3/2)^n) + 3) / 2^n`.
pub fn check_star(n: u32) -> Result<bool> {
    Ok(decomp(n)?.star())
}

/// `||(3/2)^n|| > (3/4)^n`.
pub fn check_norm(n: u32) -> Result<bool> {
    check_n(n)?;
    let three_n = three_pow(n);
    Ok(PowerDecomp::from_power(n, &three_n).norm(&three_n))
}

/// `2^n + floor((3/2)^n) - 2`.
pub fn g_formula(n: u32) -> Result<BigUint> {
    Ok(decomp(n)?.g())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaringRow {
    pub decomp: PowerDecomp,
    pub star: bool,
    pub norm: bool,
    pub g: BigUint,
}

/// Rows for `n_from..=n_to`, carrying `3^n` from one step to the next.
pub fn rows(n_from: u32, n_to: u32) -> Result<impl Iterator<Item = WaringRow>> {
    check_range(n_from, n_to)?;
    let mut three_n = three_pow(n_from);
    let mut n = n_from;
    Ok(std::iter::from_fn(move || {
        if n > n_to {
            return None;
        }
        let decomp = PowerDecomp::from_power(n, &three_n);
        let row = WaringRow {
            star: decomp.star(),
            norm: decomp.norm(&three_n),
            g: decomp.g(),
            decomp,
        };
        three_n *= 3u32;
        n += 1;
        Some(row)
    }))
}

fn check_range(n_from: u32, n_to: u32) -> Result<()> {
    check_n(n_from)?;
    if n_from > n_to {
        return Err(Error::EmptyRange {
            from: n_from.into(),
            to: n_to.into(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub n_from: u32,
    pub n_to: u32,
    pub star_failures: Vec<u32>,
    pub norm_failures: Vec<u32>,
}

const SCAN_CHUNK: u32 = 512;

/// Exhaustive check of both conditions over `n_from..=n_to`. Chunks run in
/// parallel and are merged in index order.
pub fn scan(n_from: u32, n_to: u32) -> Result<ScanReport> {
    check_range(n_from, n_to)?;
    let starts: Vec<u32> = (n_from..=n_to).step_by(SCAN_CHUNK as usize).collect();
    let chunks: Vec<(Vec<u32>, Vec<u32>)> = starts
        .into_par_iter()
        .map(|start| {
            let end = start.saturating_add(SCAN_CHUNK - 1).min(n_to);
            let mut star = Vec::new();
            let mut norm = Vec::new();
            for row in rows(start, end).expect("valid chunk") {
                if !row.star {
                    star.push(row.decomp.n);
                }
                if !row.norm {
                    norm.push(row.decomp.n);
                }
            }
            (star, norm)
        })
        .collect();
    let (star_failures, norm_failures) =
        chunks
            .into_iter()
            .fold((Vec::new(), Vec::new()), |(mut s, mut m), (cs, cm)| {
                s.extend(cs);
                m.extend(cm);
                (s, m)
            });
    Ok(ScanReport {
        n_from,
        n_to,
        star_failures,
        norm_failures,
    })
}

impl PowerDecomp {
    /// `3^n == a 2^n + b` and `0 <= b < 2^n`.
    pub fn is_consistent(&self) -> bool {
        let two_n = self.two_n();
        !self.a.is_zero() && self.b < two_n && &self.a * &two_n + &self.b == three_pow(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{dist_nearest_int, frac};
    use crate::rational::Rational;

    fn decomp_u64(n: u32) -> (u64, u64) {
        let d = decomp(n).unwrap();
        (d.a.try_into().unwrap(), d.b.try_into().unwrap())
    }

    #[test]
    fn decomp_examples() {
        assert_eq!(decomp_u64(7), (17, 11));
        assert_eq!(decomp_u64(1), (1, 1));
        assert_eq!(decomp_u64(4), (5, 1));
        assert!(decomp(0).is_err());
    }

    #[test]
    fn star_examples() {
        assert!(check_star(7).unwrap());
        assert!(!check_star(3).unwrap());
        assert!(!check_star(2).unwrap());
    }

    #[test]
    fn norm_examples() {
        assert!(!check_norm(7).unwrap());
        assert!(check_norm(8).unwrap());
        assert!(!check_norm(1).unwrap());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_formula(2).unwrap(), BigUint::from(4u32));
        assert_eq!(g_formula(4).unwrap(), BigUint::from(19u32));
        assert_eq!(g_formula(7).unwrap(), BigUint::from(143u32));
        assert_eq!(g_formula(1).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn small_scan() {
        let report = scan(1, 10).unwrap();
        assert_eq!(report.star_failures, vec![1, 2, 3]);
        assert!(report.norm_failures.contains(&7));
        assert!(scan(5, 4).is_err());
        assert!(scan(0, 4).is_err());
    }

    #[test]
    fn scan_matches_rows() {
        let report = scan(1, 1500).unwrap();
        let star: Vec<u32> = rows(1, 1500)
            .unwrap()
            .filter(|r| !r.star)
            .map(|r| r.decomp.n)
            .collect();
        let norm: Vec<u32> = rows(1, 1500)
            .unwrap()
            .filter(|r| !r.norm)
            .map(|r| r.decomp.n)
            .collect();
        assert_eq!(report.star_failures, star);
        assert_eq!(report.norm_failures, norm);
    }

    #[test]
    fn decomposition_identity() {
        for row in rows(1, 400).unwrap() {
            assert!(row.decomp.is_consistent(), "n = {}", row.decomp.n);
        }
    }

    #[test]
    fn integer_forms_agree_with_rational_forms() {
        for n in 1..=200u32 {
            let x = Rational::new(3, 2).pow(n);
            let half_n = Rational::new(1, 2).pow(n);
            let floor = Rational::from(x.floor_int());
            let star_rational =
                frac(&x).into_inner() <= Rational::one() - half_n * (floor + Rational::from(3));
            assert_eq!(check_star(n).unwrap(), star_rational, "star n = {n}");
            let norm_rational = dist_nearest_int(&x) > Rational::new(3, 4).pow(n);
            assert_eq!(check_norm(n).unwrap(), norm_rational, "norm n = {n}");
        }
    }

    #[test]
    fn g_is_increasing() {
        let gs: Vec<BigUint> = rows(1, 300).unwrap().map(|r| r.g).collect();
        assert!(gs.windows(2).all(|w| w[0] < w[1]));
    }
}
