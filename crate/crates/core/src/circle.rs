//! Fractional parts and finite unions of closed arcs on the unit circle.
//!
//! Points of the circle are represented in `[0, 1)`. A [`CircleSet`] stores
//! closed components `[lo, hi]` with `0 <= lo <= hi <= 1`; an arc crossing
//! zero is stored as two components `[a, 1]` and `[0, b]`, and `1` is
//! identified with `0` when testing membership.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A point of `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value >= 1 {
            return Err(Error::EndpointOutOfRange(value.to_string()));
        }
        Ok(CirclePoint(value))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

/// Fractional part `x - floor(x)`.
pub fn frac(x: &Rational) -> CirclePoint {
    CirclePoint(x - Rational::from(x.floor_int()))
}

/// Distance from `x` to the nearest integer.
pub fn dist_nearest_int(x: &Rational) -> Rational {
    let f = frac(x).into_inner();
    let g = Rational::one() - &f;
    Rational::min_of(&f, &g)
}

/// `frac(lambda * r^n)` for `n = 0..=n_max`.
///
/// The full value `lambda * r^n` is carried from step to step; the next
/// fractional part is not a function of the current one unless `r` is an
/// integer.
pub fn orbit(lambda: &Rational, r: &Rational, n_max: usize) -> Result<Vec<CirclePoint>> {
    check_orbit_args(lambda, r)?;
    let mut value = lambda.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            value = value * r;
        }
        out.push(frac(&value));
    }
    Ok(out)
}

pub(crate) fn check_orbit_args(lambda: &Rational, r: &Rational) -> Result<()> {
    if !lambda.is_positive() {
        return Err(Error::NonPositive {
            what: "lambda",
            value: lambda.to_string(),
        });
    }
    if *r <= 1 {
        return Err(Error::RatioNotAboveOne(r.to_string()));
    }
    Ok(())
}

/// Closed interval with rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::ReversedInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(2)
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        debug_assert!(!c.is_negative());
        Interval {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }

    /// Intersection, or `None` when disjoint. Touching intervals meet in a point.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = Rational::max_of(&self.lo, &other.lo);
        let hi = Rational::min_of(&self.hi, &other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(Rational, Rational)>::deserialize(deserializer)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Finite union of closed arcs of the unit circle, kept normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CircleSet {
    components: Vec<Interval>,
}

impl CircleSet {
    pub fn empty() -> Self {
        CircleSet::default()
    }

    pub fn full() -> Self {
        CircleSet {
            components: vec![Interval {
                lo: Rational::zero(),
                hi: Rational::one(),
            }],
        }
    }

    /// Sorts and merges overlapping or touching components. A component
    /// ending at 1 and one starting at 0 are kept apart.
    pub fn normalize(raw: Vec<Interval>) -> Result<Self> {
        for iv in &raw {
            if iv.lo > iv.hi {
                return Err(Error::ReversedInterval {
                    lo: iv.lo.to_string(),
                    hi: iv.hi.to_string(),
                });
            }
            if iv.lo.is_negative() {
                return Err(Error::EndpointOutOfRange(iv.lo.to_string()));
            }
            if iv.hi > 1 {
                return Err(Error::EndpointOutOfRange(iv.hi.to_string()));
            }
        }
        Ok(Self::normalize_unchecked(raw))
    }

    pub(crate) fn normalize_unchecked(mut raw: Vec<Interval>) -> Self {
        raw.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut components: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match components.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => components.push(iv),
            }
        }
        CircleSet { components }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.components.len() == 1 && self.components[0].lo.is_zero() && self.components[0].hi == 1
    }

    pub fn measure(&self) -> Rational {
        self.components.iter().map(Interval::length).sum()
    }

    /// Membership with `1 == 0`: zero belongs to any component ending at 1.
    pub fn contains(&self, x: &CirclePoint) -> bool {
        self.contains_value(x.value())
    }

    pub(crate) fn contains_value(&self, x: &Rational) -> bool {
        // Components are sorted and disjoint: only the last one starting at
        // or before x can contain it.
        let idx = self.components.partition_point(|c| &c.lo <= x);
        if idx > 0 && self.components[idx - 1].hi >= *x {
            return true;
        }
        x.is_zero() && self.components.last().is_some_and(|c| c.hi == 1)
    }

    pub fn union(&self, other: &CircleSet) -> CircleSet {
        let mut raw = self.components.clone();
        raw.extend(other.components.iter().cloned());
        Self::normalize_unchecked(raw)
    }

    /// `{ frac(c * x) : x in self }`. A component whose image has length at
    /// least 1 covers the whole circle.
    pub fn scale_mod1(&self, c: &Rational) -> Result<CircleSet> {
        if !c.is_positive() {
            return Err(Error::NonPositive {
                what: "scale factor",
                value: c.to_string(),
            });
        }
        let mut raw = Vec::with_capacity(self.components.len() * 2);
        for comp in &self.components {
            let image = comp.scale(c);
            if image.length() >= 1 {
                return Ok(CircleSet::full());
            }
            push_wrapped(&mut raw, image);
        }
        Ok(Self::normalize_unchecked(raw))
    }

    /// `{ frac(x + t) : x in self }`.
    pub fn translate_mod1(&self, t: &Rational) -> CircleSet {
        let shift = frac(t).into_inner();
        if shift.is_zero() {
            return self.clone();
        }
        let mut raw = Vec::with_capacity(self.components.len() + 1);
        for comp in &self.components {
            push_wrapped(
                &mut raw,
                Interval {
                    lo: &comp.lo + &shift,
                    hi: &comp.hi + &shift,
                },
            );
        }
        Self::normalize_unchecked(raw)
    }

    /// Maximal arcs of the set lifted to the real line. A wrapped pair
    /// `[a, 1]`, `[0, b]` becomes the single arc `[a - 1, b]`, which is
    /// listed first. Every arc has `-1 < lo <= hi <= 1`.
    pub fn arcs(&self) -> Vec<Interval> {
        let comps = &self.components;
        let wraps =
            comps.len() >= 2 && comps[0].lo.is_zero() && comps.last().is_some_and(|c| c.hi == 1);
        if !wraps {
            return comps.clone();
        }
        let last = comps.last().unwrap();
        let mut out = Vec::with_capacity(comps.len() - 1);
        out.push(Interval {
            lo: &last.lo - Rational::one(),
            hi: comps[0].hi.clone(),
        });
        out.extend(comps[1..comps.len() - 1].iter().cloned());
        out
    }
}

/// Reduces an interval of length < 1 modulo 1, splitting it at the integer
/// it crosses.
pub(crate) fn push_wrapped(raw: &mut Vec<Interval>, iv: Interval) {
    let shift = Rational::from(iv.lo.floor_int());
    let lo = &iv.lo - &shift;
    let hi = &iv.hi - &shift;
    if hi <= 1 {
        raw.push(Interval { lo, hi });
    } else {
        raw.push(Interval {
            lo,
            hi: Rational::one(),
        });
        raw.push(Interval {
            lo: Rational::zero(),
            hi: hi - Rational::one(),
        });
    }
}

impl Serialize for CircleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.components.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CircleSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Interval>::deserialize(deserializer)?;
        CircleSet::normalize(raw).map_err(serde::de::Error::custom)
    }
}
