//! Enumeration of `Q1 = { p/q : p > q^2 }` in increasing order.
//!
//! Elements are grouped in windows `[n, n + 1)`. For `n >= 2` the window
//! holds `phi(1) + ... + phi(n)` elements; the window `[1, 2)` is empty.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Reduced `p/q` with `p > q^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Q1Element {
    p: u64,
    q: u64,
}

impl Q1Element {
    pub fn new(p: u64, q: u64) -> Option<Self> {
        if q == 0 || p.gcd(&q) != 1 || u128::from(p) <= u128::from(q) * u128::from(q) {
            return None;
        }
        Some(Q1Element { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.p as i64, self.q as i64)
    }

    /// Integer `n` with `n <= p/q < n + 1`.
    pub fn window(&self) -> u64 {
        self.p / self.q
    }
}

impl PartialOrd for Q1Element {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q1Element {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (u128::from(self.p) * u128::from(other.q)).cmp(&(u128::from(other.p) * u128::from(self.q)))
    }
}

pub fn is_q1(x: &Rational) -> Result<bool> {
    if !x.is_positive() {
        return Err(Error::NonPositive {
            what: "x",
            value: x.to_string(),
        });
    }
    Ok(x.numer() > &(x.denom() * x.denom()))
}

/// Euler's totient by trial-division factorization.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    let mut rest = n;
    let mut phi = n;
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            while rest.is_multiple_of(d) {
                rest /= d;
            }
            phi -= phi / d;
        }
        d += 1;
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    Ok(phi)
}

pub fn phi_summatory(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    (1..=n).map(euler_phi).sum()
}

/// Elements of `Q1 ∩ [n, n + 1)`, sorted, by direct search over `q <= n`.
pub fn enumerate_window(n: u64) -> Result<Vec<Q1Element>> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    let mut out: Vec<Q1Element> = (1..=n)
        .flat_map(|q| (n * q..(n + 1) * q).filter_map(move |p| Q1Element::new(p, q)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub n: u64,
    pub count: u64,
    /// `count / n^3`, exact.
    pub ratio: Rational,
    /// `|ratio - 1/pi^2|` using a rational `pi^2` good to `1e-12`.
    pub distance_to_limit: Rational,
}

/// `9.869604401089 ≈ pi^2`, within `4e-13`. Used for comparisons only.
pub fn pi_squared_approx() -> Rational {
    Rational::new(9_869_604_401_089, 1_000_000_000_000)
}

/// `#(Q1 ∩ [1, n])`, closed at both ends.
pub fn count_upto(n: u64) -> Result<DensityReport> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    let windows: u64 = (1..n)
        .into_par_iter()
        .map(|w| enumerate_window(w).map(|v| v.len() as u64))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    // the right endpoint n/1 is in Q1 iff n > 1
    let count = windows + u64::from(n > 1);
    let n3 = Rational::from((n as i64).pow(3));
    let ratio = Rational::from(count as i64) / n3;
    let distance_to_limit = (&ratio - pi_squared_approx().recip()).abs();
    Ok(DensityReport {
        n,
        count,
        ratio,
        distance_to_limit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NthReport {
    pub index: u64,
    pub element: Q1Element,
    /// `value / index^(1/3)`, for comparison with `pi^(2/3)`. Report only.
    pub scaled: f64,
    pub pi_two_thirds: f64,
}

/// The `index`-th smallest element of `Q1` (1-based).
pub fn nth_element(index: u64) -> Result<NthReport> {
    if index == 0 {
        return Err(Error::ZeroArgument("index"));
    }
    let mut seen = 0u64;
    let mut n = 1u64;
    loop {
        let window = enumerate_window(n)?;
        let len = window.len() as u64;
        if seen + len >= index {
            let element = window[(index - seen - 1) as usize];
            return Ok(NthReport {
                index,
                element,
                scaled: element.value().to_f64() / (index as f64).cbrt(),
                pi_two_thirds: std::f64::consts::PI.powf(2.0 / 3.0),
            });
        }
        seen += len;
        n += 1;
    }
}

/// The first `count` elements in increasing order.
pub fn first_elements(count: usize) -> Vec<Q1Element> {
    let mut out = Vec::with_capacity(count);
    let mut n = 1u64;
    while out.len() < count {
        let window = enumerate_window(n).expect("n >= 1");
        out.extend(window.into_iter().take(count - out.len()));
        n += 1;
    }
    out
}
