use serde::Serialize;

use crate::circle::{check_orbit_args, frac};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Extremes of a finite orbit segment. Report only: nothing here says
/// anything about `limsup - liminf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapStats {
    pub min: Rational,
    pub max: Rational,
    pub spread: Rational,
}

/// Min, max and spread of `frac(lambda r^n)` for `n_from <= n <= n_to`.
pub fn gap_stats(lambda: &Rational, r: &Rational, n_from: usize, n_to: usize) -> Result<GapStats> {
    check_orbit_args(lambda, r)?;
    if n_from > n_to {
        return Err(Error::EmptyRange {
            from: n_from as u64,
            to: n_to as u64,
        });
    }
    let mut value = lambda * r.pow(n_from as u32);
    let mut min = frac(&value).into_inner();
    let mut max = min.clone();
    for _ in n_from..n_to {
        value = value * r;
        let x = frac(&value).into_inner();
        if x < min {
            min = x;
        } else if x > max {
            max = x;
        }
    }
    let spread = &max - &min;
    Ok(GapStats { min, max, spread })
}
