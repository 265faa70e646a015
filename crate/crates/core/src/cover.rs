//! Small-measure covers for orbits of `lambda * (p/q)^n` with `p > q^2`.
//!
//! Fix `k` and `s = (p/q)^k`. If `frac(lambda * s^l)` stays in the base band
//! `B = [0, h] ∪ [1 - h, 1]`, `h = 1/(s - 1)`, then for every offset
//! `u in 1..k` the points `frac(lambda * r^(k*l - u))` stay in
//!
//! ```text
//! S_u = ⋃_{d < p^u} ( d/p^u + (q/p)^u · B )  (mod 1)
//! ```
//!
//! whose measure is at most `2 q^u / (s - 1)`. The union over `u < k` is the
//! cover `A(eps)`; `k` is chosen as the least integer with
//! `2 (1 + q + ... + q^(k-1)) / (s - 1) < eps`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{
    check_orbit_args, dist_nearest_int, frac, push_wrapped, CirclePoint, CircleSet, Interval,
};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Upper limit for the `k` search in [`minimal_k`].
pub const K_CAP: u32 = 1_000_000;

/// Default cap on raw intervals for [`build_cover`].
pub const DEFAULT_INTERVAL_BUDGET: u64 = 1_000_000;

/// Reduced ratio `p/q` satisfying `p > q^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RatioParam {
    p: u64,
    q: u64,
}

impl RatioParam {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::NonPositive {
                what: "p",
                value: "0".into(),
            });
        }
        if q == 0 {
            return Err(Error::NonPositive {
                what: "q",
                value: "0".into(),
            });
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if u128::from(p) <= u128::from(q) * u128::from(q) {
            return Err(Error::HypothesisViolated { p, q });
        }
        Ok(RatioParam { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.p as i64, self.q as i64)
    }

    /// `(p/q)^k`.
    pub fn power(&self, k: u32) -> Rational {
        self.ratio().pow(k)
    }
}

/// `2 (1 + q + ... + q^(k-1)) / (r^k - 1)`: the total measure bound of the
/// cover built with `k` offsets.
pub fn cover_measure_bound(params: &RatioParam, k: u32) -> Rational {
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    let pk = num_traits::pow(p, k as usize);
    let qk = num_traits::pow(q.clone(), k as usize);
    let geometric = if params.q == 1 {
        BigInt::from(k)
    } else {
        (&qk - BigInt::one()) / (q - BigInt::one())
    };
    // r^k - 1 = (p^k - q^k) / q^k
    Rational::from_bigints(BigInt::from(2) * geometric * &qk, pk - qk).expect("p > q")
}

/// Least `k >= 1` with `cover_measure_bound(params, k) < epsilon`.
pub fn minimal_k(params: &RatioParam, epsilon: &Rational) -> Result<u32> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositive {
            what: "epsilon",
            value: epsilon.to_string(),
        });
    }
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    let mut pk = BigInt::one();
    let mut qk = BigInt::one();
    let mut geometric = BigInt::zero();
    for k in 1..=K_CAP {
        geometric += &qk;
        pk *= &p;
        qk *= &q;
        let bound =
            Rational::from_bigints(BigInt::from(2) * &geometric * &qk, &pk - &qk).expect("p > q");
        if &bound < epsilon {
            return Ok(k);
        }
    }
    Err(Error::KCapExceeded { cap: K_CAP })
}

/// `[0, 1/(s-1)] ∪ [1 - 1/(s-1), 1]`, requiring `s > 3` so the two arcs are
/// disjoint and the band is a proper subset of the circle.
pub fn base_band(s: &Rational) -> Result<CircleSet> {
    if *s <= 3 {
        return Err(Error::DegenerateBand(s.to_string()));
    }
    Ok(band_unchecked(&(s - Rational::one()).recip()))
}

fn band_unchecked(halfwidth: &Rational) -> CircleSet {
    if *halfwidth >= Rational::new(1, 2) {
        return CircleSet::full();
    }
    CircleSet::normalize_unchecked(vec![
        Interval {
            lo: Rational::zero(),
            hi: halfwidth.clone(),
        },
        Interval {
            lo: Rational::one() - halfwidth,
            hi: Rational::one(),
        },
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverPlan {
    pub params: RatioParam,
    pub epsilon: Rational,
    pub k: u32,
    pub s: Rational,
    pub band_halfwidth: Rational,
    pub base_band: CircleSet,
}

impl CoverPlan {
    /// Plan with the least admissible `k`. When `s <= 3` (only possible for
    /// `epsilon > 1`) the band is the whole circle.
    pub fn new(params: RatioParam, epsilon: Rational) -> Result<Self> {
        let k = minimal_k(&params, &epsilon)?;
        let s = params.power(k);
        let band_halfwidth = (&s - Rational::one()).recip();
        let base_band = band_unchecked(&band_halfwidth);
        Ok(CoverPlan {
            params,
            epsilon,
            k,
            s,
            band_halfwidth,
            base_band,
        })
    }

    pub fn measure_bound(&self) -> Rational {
        cover_measure_bound(&self.params, self.k)
    }

    /// `sum_{u<k} 2 p^u`: raw interval count of the explicit cover.
    pub fn raw_interval_count(&self) -> BigUint {
        let p = BigUint::from(self.params.p);
        let mut pu = BigUint::one();
        let mut total = BigUint::zero();
        for _ in 0..self.k {
            total += &pu * 2u32;
            pu *= &p;
        }
        total
    }

    fn offset_halfwidth(&self, u: u32) -> Rational {
        &self.band_halfwidth * Rational::from(BigInt::from(self.params.q).pow(u))
    }
}

/// The offset image `S_u`, built as `p^u` translates of `(q/p)^u · B`.
pub fn offset_cover(plan: &CoverPlan, u: u32) -> Result<CircleSet> {
    if u >= plan.k {
        return Err(Error::OffsetOutOfRange { u, k: plan.k });
    }
    Ok(CircleSet::normalize_unchecked(offset_raw(plan, u)))
}

fn offset_raw(plan: &CoverPlan, u: u32) -> Vec<Interval> {
    if u == 0 {
        return plan.base_band.components().to_vec();
    }
    if plan.offset_halfwidth(u) * Rational::from(2) >= 1 {
        return CircleSet::full().components().to_vec();
    }
    let pu = BigInt::from(plan.params.p).pow(u);
    let qu = BigInt::from(plan.params.q).pow(u);
    let c = Rational::from_bigints(qu, pu.clone()).expect("p > 0");
    let scaled: Vec<Interval> = plan
        .base_band
        .components()
        .iter()
        .map(|iv| iv.scale(&c))
        .collect();
    let translates = pu.to_u64().expect("budgeted before materialization");
    let mut raw = Vec::with_capacity(scaled.len() * translates as usize + 1);
    for d in 0..translates {
        let t = Rational::from_bigints(BigInt::from(d), pu.clone()).expect("p > 0");
        for iv in &scaled {
            push_wrapped(
                &mut raw,
                Interval {
                    lo: &iv.lo + &t,
                    hi: &iv.hi + &t,
                },
            );
        }
    }
    raw
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub plan: CoverPlan,
    pub explicit_set: Option<CircleSet>,
    pub interval_count: BigUint,
}

impl Cover {
    /// Cover without materialized intervals; membership goes through
    /// [`member_implicit`].
    pub fn implicit(plan: CoverPlan) -> Self {
        let interval_count = plan.raw_interval_count();
        Cover {
            plan,
            explicit_set: None,
            interval_count,
        }
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        match &self.explicit_set {
            Some(set) => set.contains(x),
            None => member_implicit(&self.plan, x),
        }
    }

    pub fn report(&self) -> CoverReport {
        CoverReport {
            params: self.plan.params,
            epsilon: self.plan.epsilon.clone(),
            k: self.plan.k,
            s: self.plan.s.clone(),
            intervals: self.explicit_set.clone(),
            measure: self.explicit_set.as_ref().map(CircleSet::measure),
            measure_bound: self.plan.measure_bound(),
            raw_interval_count: self.interval_count.to_string(),
        }
    }
}

/// Serialized form of a [`Cover`]. `intervals` and `measure` are `null`
/// when the cover was not materialized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub params: RatioParam,
    pub epsilon: Rational,
    pub k: u32,
    pub s: Rational,
    pub intervals: Option<CircleSet>,
    pub measure: Option<Rational>,
    pub measure_bound: Rational,
    pub raw_interval_count: String,
}

/// Materializes `A(eps) = ⋃_{u<k} S_u`, refusing when the raw interval
/// count exceeds `budget`.
pub fn build_cover(plan: &CoverPlan, budget: u64) -> Result<Cover> {
    if budget == 0 {
        return Err(Error::ZeroArgument("interval budget"));
    }
    let interval_count = plan.raw_interval_count();
    if interval_count > BigUint::from(budget) {
        return Err(Error::IntervalBudgetExceeded {
            needed: interval_count.to_string(),
            budget,
        });
    }
    let pieces: Vec<Vec<Interval>> = (0..plan.k)
        .into_par_iter()
        .map(|u| offset_raw(plan, u))
        .collect();
    let set = CircleSet::normalize_unchecked(pieces.into_iter().flatten().collect());
    Ok(Cover {
        plan: plan.clone(),
        explicit_set: Some(set),
        interval_count,
    })
}

/// Membership in `A(eps)` without materializing it.
///
/// `x ∈ S_u` exactly when `frac(x p^u) ∈ q^u · B (mod 1)`, and multiplying
/// the band by the integer `q^u` gives the arc of points within
/// `q^u / (s-1)` of an integer.
pub fn member_implicit(plan: &CoverPlan, x: &CirclePoint) -> bool {
    let p = Rational::from(plan.params.p as i64);
    let q = Rational::from(plan.params.q as i64);
    let mut xp = x.value().clone();
    let mut radius = plan.band_halfwidth.clone();
    for u in 0..plan.k {
        if u > 0 {
            xp = frac(&(xp * &p)).into_inner();
            radius = radius * &q;
        }
        if dist_nearest_int(&xp) <= radius {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitVerdict {
    Holds { n_max: usize },
    ViolatedAt { n: usize, point: Rational },
}

impl OrbitVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, OrbitVerdict::Holds { .. })
    }
}

/// Checks `frac(lambda r^n) ∈ A(eps)` for `n = 0..=n_max`.
pub fn verify_orbit(lambda: &Rational, plan: &CoverPlan, n_max: usize) -> Result<OrbitVerdict> {
    let r = plan.params.ratio();
    check_orbit_args(lambda, &r)?;
    let mut value = lambda.clone();
    for n in 0..=n_max {
        if n > 0 {
            value = value * &r;
        }
        let point = frac(&value);
        if !member_implicit(plan, &point) {
            return Ok(OrbitVerdict::ViolatedAt {
                n,
                point: point.into_inner(),
            });
        }
    }
    Ok(OrbitVerdict::Holds { n_max })
}
