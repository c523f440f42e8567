//! Candidate enumeration and rule mining over an MMER.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fraction::{ratio_at_least, Fraction};
use crate::measures::{evaluate_rule, GranularRule, Thresholds};
use crate::model::{AttributeValue, Descriptor, Granule, InformationSystem, Mmer, ObjectSet, Side};

/// Coverage-passing granules of both sides.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub source: Vec<Granule>,
    pub target: Vec<Granule>,
}

impl CandidateSet {
    pub fn counts(&self) -> (usize, usize) {
        (self.source.len(), self.target.len())
    }
}

#[derive(Clone, Debug)]
pub struct MiningResult {
    /// In canonical order, see [`canonical_order`].
    pub rules: Vec<GranularRule>,
    pub candidate_counts: (usize, usize),
    pub thresholds: Thresholds,
    /// Pairs whose `floor(mc * |LH|)` was 0 and whose K rank was raised to 1.
    pub k_floor_clamps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountSummary {
    pub source_candidates: usize,
    pub target_candidates: usize,
    pub evaluated_pairs: usize,
    pub rules: usize,
}

pub fn count_summary(result: &MiningResult) -> CountSummary {
    let (s, t) = result.candidate_counts;
    CountSummary {
        source_candidates: s,
        target_candidates: t,
        evaluated_pairs: s * t,
        rules: result.rules.len(),
    }
}

fn check_minable(is: &InformationSystem, side: Side) -> Result<()> {
    if let Some(a) = is
        .attributes()
        .iter()
        .find(|a| a.kind == crate::model::AttributeKind::Numeric)
    {
        return Err(Error::Precondition(format!(
            "{side:?} attribute {:?} is numeric; run discretize first",
            a.name
        )));
    }
    Ok(())
}

/// Every non-empty intension realized in `is` whose support reaches `min_coverage`.
///
/// Depth-first over attributes in column order. A branch stops as soon as its
/// support drops below the threshold, since adding descriptors only shrinks the
/// extension. Intensions with identical extensions are all kept.
pub fn enumerate_granules(is: &InformationSystem, side: Side, min_coverage: &Fraction) -> Result<Vec<Granule>> {
    check_minable(is, side)?;
    let n = is.len();
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let blocks: Vec<Vec<(AttributeValue, ObjectSet)>> =
        (0..is.attributes().len()).map(|a| is.value_blocks(a)).collect();
    let passes = |ext: &ObjectSet| {
        let c = ext.len();
        c > 0 && ratio_at_least(c, n, min_coverage)
    };

    let mut stack: Vec<Descriptor> = Vec::new();
    fn walk(
        blocks: &[Vec<(AttributeValue, ObjectSet)>],
        start: usize,
        current: Option<&ObjectSet>,
        stack: &mut Vec<Descriptor>,
        side: Side,
        passes: &dyn Fn(&ObjectSet) -> bool,
        out: &mut Vec<Granule>,
    ) {
        for (attribute, values) in blocks.iter().enumerate().skip(start) {
            for (value, block) in values {
                let extension = match current {
                    Some(c) => c.intersection(block),
                    None => block.clone(),
                };
                if !passes(&extension) {
                    continue;
                }
                stack.push(Descriptor {
                    attribute,
                    value: value.clone(),
                });
                out.push(Granule::from_parts(side, stack.clone(), extension.clone()));
                walk(blocks, attribute + 1, Some(&extension), stack, side, passes, out);
                stack.pop();
            }
        }
    }
    walk(&blocks, 0, None, &mut stack, side, &passes, &mut out);
    Ok(out)
}

pub fn candidates(mmer: &Mmer, thresholds: &Thresholds) -> Result<CandidateSet> {
    Ok(CandidateSet {
        source: enumerate_granules(&mmer.source, Side::Source, &thresholds.ms)?,
        target: enumerate_granules(&mmer.target, Side::Target, &thresholds.mt)?,
    })
}

/// Lexicographic on intensions, shorter ones first; LHS before RHS.
pub fn canonical_order(a: &GranularRule, b: &GranularRule) -> Ordering {
    fn by_intension(x: &Granule, y: &Granule) -> Ordering {
        x.intension()
            .len()
            .cmp(&y.intension().len())
            .then_with(|| x.intension().cmp(y.intension()))
    }
    by_intension(&a.lhs, &b.lhs).then_with(|| by_intension(&a.rhs, &b.rhs))
}

/// All rules meeting the four thresholds, on the current rayon pool.
pub fn mine(mmer: &Mmer, thresholds: &Thresholds) -> Result<MiningResult> {
    check_minable(&mmer.source, Side::Source)?;
    check_minable(&mmer.target, Side::Target)?;
    let cands = candidates(mmer, thresholds)?;
    let rel = &mmer.relation;

    let per_source: Vec<(Vec<GranularRule>, usize)> = cands
        .source
        .par_iter()
        .map(|lhs| {
            let mut rules = Vec::new();
            let mut clamps = 0;
            for rhs in &cands.target {
                let measures = evaluate_rule(lhs, rhs, rel, thresholds)?;
                clamps += usize::from(measures.k_floor_clamped);
                if measures.satisfies(thresholds) {
                    rules.push(GranularRule {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        measures,
                    });
                }
            }
            Ok((rules, clamps))
        })
        .collect::<Result<_>>()?;

    let k_floor_clamps = per_source.iter().map(|(_, c)| c).sum();
    let mut rules: Vec<GranularRule> = per_source.into_iter().flat_map(|(r, _)| r).collect();
    rules.sort_by(canonical_order);
    Ok(MiningResult {
        rules,
        candidate_counts: cands.counts(),
        thresholds: *thresholds,
        k_floor_clamps,
    })
}

/// [`mine`] on a dedicated pool of `threads` workers (`None`: rayon's default).
pub fn mine_with_threads(mmer: &Mmer, thresholds: &Thresholds, threads: Option<usize>) -> Result<MiningResult> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| mine(mmer, thresholds))
}
