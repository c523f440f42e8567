//! Source/target coverage and source/target confidence of a granular rule.
//!
//! All threshold comparisons are done on integers by cross-multiplication, so
//! ties such as `2/3` against `0.6` cannot be flipped by rounding.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraction::{self, floor_times, ratio, ratio_at_least, Fraction};
use crate::model::{BinaryRelation, Granule, Side};

/// Minimal source coverage, target coverage, source confidence and target confidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    #[serde(with = "fraction::serde_decimal")]
    pub ms: Fraction,
    #[serde(with = "fraction::serde_decimal")]
    pub mt: Fraction,
    #[serde(with = "fraction::serde_decimal")]
    pub mc: Fraction,
    #[serde(with = "fraction::serde_decimal")]
    pub tc: Fraction,
}

impl Thresholds {
    pub fn new(ms: Fraction, mt: Fraction, mc: Fraction, tc: Fraction) -> Result<Self> {
        for (name, v) in [("ms", ms), ("mt", mt), ("mc", mc), ("tc", tc)] {
            if *v.numer() == 0 || v > Fraction::from_integer(1) {
                return Err(Error::Parameter(format!(
                    "{name} must lie in (0, 1], got {}",
                    fraction::decimal_string(&v)
                )));
            }
        }
        Ok(Thresholds { ms, mt, mc, tc })
    }

    /// From decimal strings such as `"0.15"`.
    pub fn parse(ms: &str, mt: &str, mc: &str, tc: &str) -> Result<Self> {
        Self::new(
            fraction::parse_fraction(ms)?,
            fraction::parse_fraction(mt)?,
            fraction::parse_fraction(mc)?,
            fraction::parse_fraction(tc)?,
        )
    }
}

/// The four measures of one rule. `sconfidence` is taken at the `tc` and
/// `tconfidence` at the `mc` of the thresholds it was evaluated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleMeasures {
    pub scoverage: Fraction,
    pub tcoverage: Fraction,
    pub sconfidence: Fraction,
    pub tconfidence: Fraction,
    /// Connections guaranteed to an `mc` share of the left-hand side.
    pub k: usize,
    /// `floor(mc * |LH|)` was 0 and the rank was raised to 1.
    pub k_floor_clamped: bool,
}

impl RuleMeasures {
    pub fn satisfies(&self, t: &Thresholds) -> bool {
        self.scoverage >= t.ms
            && self.tcoverage >= t.mt
            && self.sconfidence >= t.mc
            && self.tconfidence >= t.tc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GranularRule {
    pub lhs: Granule,
    pub rhs: Granule,
    pub measures: RuleMeasures,
}

fn expect_side(g: &Granule, side: Side) -> Result<()> {
    if g.side() == side {
        Ok(())
    } else {
        Err(Error::Precondition(format!("expected a {side:?} granule, got {:?}", g.side())))
    }
}

/// `|LH| / |U|`.
pub fn source_coverage(lhs: &Granule, universe: usize) -> Result<Fraction> {
    expect_side(lhs, Side::Source)?;
    ratio(lhs.extension().len(), universe)
}

/// `|RH| / |V|`.
pub fn target_coverage(rhs: &Granule, universe: usize) -> Result<Fraction> {
    expect_side(rhs, Side::Target)?;
    ratio(rhs.extension().len(), universe)
}

/// `|R(x) ∩ RH|` for every `x` in LH, in object order.
pub fn connection_counts(lhs: &Granule, rhs: &Granule, rel: &BinaryRelation) -> Result<Vec<usize>> {
    expect_side(lhs, Side::Source)?;
    expect_side(rhs, Side::Target)?;
    if lhs.extension().universe() != rel.source_size() || rhs.extension().universe() != rel.target_size() {
        return Err(Error::Precondition("granules and relation come from different universes".into()));
    }
    if lhs.extension().is_empty() {
        return Err(Error::Domain("left-hand side extension is empty".into()));
    }
    if rhs.extension().is_empty() {
        return Err(Error::Domain("right-hand side extension is empty".into()));
    }
    Ok(lhs
        .extension()
        .iter()
        .map(|x| rel.row(x).intersection_count(rhs.extension()))
        .collect())
}

/// Share of LH whose connections cover at least `tc` of RH.
pub fn source_confidence_from_counts(counts: &[usize], rh_len: usize, tc: &Fraction) -> Result<Fraction> {
    if rh_len == 0 {
        return Err(Error::Domain("right-hand side extension is empty".into()));
    }
    let passing = counts.iter().filter(|&&c| ratio_at_least(c, rh_len, tc)).count();
    ratio(passing, counts.len())
}

pub fn source_confidence(lhs: &Granule, rhs: &Granule, rel: &BinaryRelation, tc: &Fraction) -> Result<Fraction> {
    let counts = connection_counts(lhs, rhs, rel)?;
    source_confidence_from_counts(&counts, rhs.extension().len(), tc)
}

static SANDWICH_CHECKS: AtomicU64 = AtomicU64::new(0);
static SANDWICH_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// `(checks, violations)` of the K sandwich so far in this process. Every
/// target confidence computation checks it.
pub fn sandwich_tally() -> (u64, u64) {
    (
        SANDWICH_CHECKS.load(AtomicOrdering::Relaxed),
        SANDWICH_VIOLATIONS.load(AtomicOrdering::Relaxed),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TargetConfidence {
    pub tconfidence: Fraction,
    pub k: usize,
    /// 1-based rank into the descending counts that `k` was read from.
    pub rank: usize,
    pub clamped: bool,
}

/// Sort the counts descending and read the `max(1, floor(mc * |LH|))`-th one.
pub fn target_confidence_from_counts(counts: &[usize], rh_len: usize, mc: &Fraction) -> Result<TargetConfidence> {
    if rh_len == 0 {
        return Err(Error::Domain("right-hand side extension is empty".into()));
    }
    if counts.is_empty() {
        return Err(Error::Domain("left-hand side extension is empty".into()));
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let floor = floor_times(mc, counts.len());
    let rank = floor.clamp(1, counts.len());
    let k = sorted[rank - 1];
    SANDWICH_CHECKS.fetch_add(1, AtomicOrdering::Relaxed);
    if !sandwich_holds(counts, mc, k) {
        SANDWICH_VIOLATIONS.fetch_add(1, AtomicOrdering::Relaxed);
        return Err(Error::Internal(format!(
            "K sandwich violated: counts {counts:?}, mc {mc}, K {k}"
        )));
    }
    Ok(TargetConfidence {
        tconfidence: ratio(k, rh_len)?,
        k,
        rank,
        clamped: floor == 0,
    })
}

pub fn target_confidence(lhs: &Granule, rhs: &Granule, rel: &BinaryRelation, mc: &Fraction) -> Result<TargetConfidence> {
    let counts = connection_counts(lhs, rhs, rel)?;
    target_confidence_from_counts(&counts, rhs.extension().len(), mc)
}

/// `|{c >= K+1}| < mc*|LH|` and `|{c >= K}| >= floor(mc*|LH|)`.
///
/// When `floor(mc*|LH|)` is 0 the rank is clamped to 1, so `K` must be the
/// largest count instead.
pub fn sandwich_holds(counts: &[usize], mc: &Fraction, k: usize) -> bool {
    let n = counts.len();
    let at_least_k = counts.iter().filter(|&&c| c >= k).count();
    let above_k = counts.iter().filter(|&&c| c > k).count();
    let floor = floor_times(mc, n);
    if floor == 0 {
        return at_least_k >= 1 && above_k == 0;
    }
    let above_below_mc = (above_k as u128) * (*mc.denom() as u128) < (*mc.numer() as u128) * (n as u128);
    at_least_k >= floor && above_below_mc
}

/// All four measures, with `sconfidence` at `t.tc` and `tconfidence` at `t.mc`.
pub fn evaluate_rule(lhs: &Granule, rhs: &Granule, rel: &BinaryRelation, t: &Thresholds) -> Result<RuleMeasures> {
    let counts = connection_counts(lhs, rhs, rel)?;
    let rh_len = rhs.extension().len();
    let target = target_confidence_from_counts(&counts, rh_len, &t.mc)?;
    Ok(RuleMeasures {
        scoverage: source_coverage(lhs, rel.source_size())?,
        tcoverage: target_coverage(rhs, rel.target_size())?,
        sconfidence: source_confidence_from_counts(&counts, rh_len, &t.tc)?,
        tconfidence: target.tconfidence,
        k: target.k,
        k_floor_clamped: target.clamped,
    })
}
