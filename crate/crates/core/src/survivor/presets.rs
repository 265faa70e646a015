//! Ready-made target specifications.
//!
//! Strict inequalities in the underlying conditions are replaced by closed
//! targets. A closed target can only enlarge the survivor set, so survivor
//! counts for the conjecture presets are upper bounds for the strict problem.

use serde::Serialize;

use crate::circle::{CircleSet, Interval};
use crate::cover::{base_band, RatioParam};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

use super::{ChildMode, TargetSpec};

/// Printed truncations of the limit-point interval endpoints.
pub const DUBICKAS_LO: (i64, i64) = (238_117, 1_000_000);
pub const DUBICKAS_HI: (i64, i64) = (761_882, 1_000_000);

/// Metadata attached to preset output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    #[serde(rename = "report-only")]
    pub report_only: bool,
    pub note: &'static str,
}

impl PresetInfo {
    pub fn es() -> Self {
        PresetInfo {
            name: "es",
            report_only: false,
            note: "lambda with ||lambda s^n|| <= 1/(s-1); every node has at least two full-band children",
        }
    }

    pub fn mahler_z() -> Self {
        PresetInfo {
            name: "mahler-z",
            report_only: true,
            note: "closed surrogate [0, 1/2] for frac(lambda (3/2)^n) < 1/2; finite-depth survivors only",
        }
    }

    pub fn pollington() -> Self {
        PresetInfo {
            name: "pollington",
            report_only: true,
            note: "closed surrogate [4/65, 61/65] for ||lambda (3/2)^n|| > 4/65",
        }
    }

    pub fn dubickas_gap() -> Self {
        PresetInfo {
            name: "dubickas-gap",
            report_only: true,
            note: "avoids [0.238117, 0.761882]; endpoints are printed truncations, exact values unknown",
        }
    }

    pub fn custom() -> Self {
        PresetInfo {
            name: "custom",
            report_only: true,
            note: "user-supplied target",
        }
    }
}

/// Survivors of `||lambda s^n|| <= 1/(s-1)` for `s = (p/q)^k`, starting from
/// the band around the integer `band_index`.
pub fn preset_es(params: &RatioParam, k: u32, band_index: u64) -> Result<TargetSpec> {
    if k == 0 {
        return Err(Error::ZeroArgument("k"));
    }
    if band_index == 0 {
        return Err(Error::ZeroArgument("band index"));
    }
    let s = params.power(k);
    let target = base_band(&s)?;
    let h = (&s - Rational::one()).recip();
    let m = Rational::from(band_index as i64);
    let window = Interval::new(&m - &h, &m + &h)?;
    TargetSpec::new(s, target, window, 0, ChildMode::FullComponentOnly)
}

fn three_halves_spec(target: CircleSet) -> TargetSpec {
    TargetSpec::new(
        rat(3, 2),
        target,
        Interval::new(rat(1, 1), rat(2, 1)).expect("ordered"),
        0,
        ChildMode::AllChildren,
    )
    .expect("valid preset")
}

fn closed(lo: Rational, hi: Rational) -> Interval {
    Interval::new(lo, hi).expect("ordered")
}

pub fn preset_mahler_z() -> TargetSpec {
    three_halves_spec(CircleSet::normalize(vec![closed(rat(0, 1), rat(1, 2))]).expect("in range"))
}

pub fn preset_pollington() -> TargetSpec {
    three_halves_spec(
        CircleSet::normalize(vec![closed(rat(4, 65), rat(61, 65))]).expect("in range"),
    )
}

pub fn preset_dubickas_gap() -> TargetSpec {
    let lo = rat(DUBICKAS_LO.0, DUBICKAS_LO.1);
    let hi = rat(DUBICKAS_HI.0, DUBICKAS_HI.1);
    three_halves_spec(
        CircleSet::normalize(vec![closed(rat(0, 1), lo), closed(hi, rat(1, 1))]).expect("in range"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn es_five_halves_k7() {
        let spec = preset_es(&RatioParam::new(5, 2).unwrap(), 7, 1).unwrap();
        assert_eq!(spec.ratio, rat(78125, 128));
        assert_eq!(spec.mode, ChildMode::FullComponentOnly);
    }

    #[test]
    fn es_five_halves_k2() {
        let spec = preset_es(&RatioParam::new(5, 2).unwrap(), 2, 1).unwrap();
        assert_eq!(spec.ratio, rat(25, 4));
        assert_eq!(spec.window, closed(rat(17, 21), rat(25, 21)));
        assert_eq!(spec.target, base_band(&rat(25, 4)).unwrap());
    }

    #[test]
    fn es_guard() {
        // 3/2 fails p > q^2 before the band check; 2/1 with k = 1 reaches it
        assert!(RatioParam::new(3, 2).is_err());
        assert!(matches!(
            preset_es(&RatioParam::new(2, 1).unwrap(), 1, 1),
            Err(Error::DegenerateBand(_))
        ));
        assert!(preset_es(&RatioParam::new(5, 2).unwrap(), 2, 0).is_err());
    }

    #[test]
    fn conjecture_targets() {
        assert_eq!(preset_mahler_z().target.measure(), rat(1, 2));
        assert_eq!(preset_pollington().target.measure(), rat(57, 65));
        assert_eq!(
            preset_dubickas_gap().target.measure(),
            rat(238_117, 1_000_000) + rat(238_118, 1_000_000)
        );
        for spec in [
            preset_mahler_z(),
            preset_pollington(),
            preset_dubickas_gap(),
        ] {
            assert_eq!(spec.ratio, rat(3, 2));
            assert_eq!(spec.window, closed(rat(1, 1), rat(2, 1)));
            assert_eq!(spec.mode, ChildMode::AllChildren);
        }
    }

    #[test]
    fn empty_window_rejected() {
        assert!(preset_mahler_z().with_window(rat(2, 1), rat(1, 1)).is_err());
        assert!(preset_mahler_z().with_window(rat(0, 1), rat(1, 1)).is_err());
    }
}
