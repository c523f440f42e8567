//! Random MMERs and a brute-force reference miner working on plain value codes
//! and a dense relation matrix.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gar_core::measures::Thresholds;
use gar_core::model::{Attribute, AttributeKind, AttributeValue, BinaryRelation, InformationSystem, Mmer};
use gar_core::{Fraction, GranularRule};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Rows of value codes for both sides and a dense relation.
#[derive(Clone, Debug)]
pub struct RawMmer {
    pub source: Vec<Vec<u8>>,
    pub target: Vec<Vec<u8>>,
    pub relation: Vec<Vec<bool>>,
}

/// `(attribute, value code)` pairs in attribute order.
pub type Intension = Vec<(usize, u8)>;

fn table(max_rows: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1..=max_rows, 1usize..=4).prop_flat_map(|(rows, attrs)| {
        prop::collection::vec(1u8..=4, attrs).prop_flat_map(move |domains| {
            let row = domains.into_iter().map(|d| 0..d).collect::<Vec<_>>();
            prop::collection::vec(row, rows)
        })
    })
}

/// `|U| <= 12`, `|V| <= 10`, up to 4 attributes per side with up to 4 values each.
pub fn raw_mmer() -> impl Strategy<Value = RawMmer> {
    (table(12), table(10), 0.0f64..=1.0).prop_flat_map(|(source, target, density)| {
        let cells = prop::collection::vec(prop::bool::weighted(density), target.len());
        prop::collection::vec(cells, source.len()).prop_map(move |relation| RawMmer {
            source: source.clone(),
            target: target.clone(),
            relation,
        })
    })
}

fn fraction() -> impl Strategy<Value = Fraction> {
    prop_oneof![Just(3u64), Just(5), Just(7), Just(10), Just(20)]
        .prop_flat_map(|d| (1..=d).prop_map(move |n| Fraction::new(n, d)))
}

/// Coverage thresholds skewed low so that rules appear; confidences anywhere.
pub fn thresholds() -> impl Strategy<Value = Thresholds> {
    let coverage = prop_oneof![3 => (1u64..=6).prop_map(|n| Fraction::new(n, 20)), 1 => fraction()];
    (coverage.clone(), coverage, fraction(), fraction())
        .prop_map(|(ms, mt, mc, tc)| Thresholds::new(ms, mt, mc, tc).unwrap())
}

/// A runner with a fixed seed, so generated cases are the same on every run.
pub fn seeded_runner(seed: u8) -> TestRunner {
    TestRunner::new_with_rng(Config::default(), TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

pub fn sample<S: Strategy>(runner: &mut TestRunner, strategy: &S) -> S::Value {
    strategy.new_tree(runner).expect("strategy yields a value").current()
}

pub fn label(code: u8) -> String {
    format!("v{code}")
}

fn system(rows: &[Vec<u8>], prefix: &str) -> InformationSystem {
    let attrs = rows[0].len();
    InformationSystem::new(
        (0..rows.len()).map(|i| format!("{prefix}{i}")).collect(),
        (0..attrs)
            .map(|a| Attribute::new(format!("a{a}"), AttributeKind::Nominal))
            .collect(),
        rows.iter()
            .map(|r| r.iter().map(|&c| AttributeValue::nominal(label(c))).collect())
            .collect(),
    )
    .unwrap()
}

impl RawMmer {
    pub fn to_mmer(&self) -> Mmer {
        let pairs = self.relation.iter().enumerate().flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(move |(y, _)| (x, y))
        });
        let relation = BinaryRelation::from_pairs(self.source.len(), self.target.len(), pairs).unwrap();
        Mmer::new(system(&self.source, "u"), system(&self.target, "t"), relation).unwrap()
    }
}

/// Every intension met by at least one row, without duplicates.
pub fn realized_intensions(rows: &[Vec<u8>]) -> Vec<Intension> {
    let attrs = rows[0].len();
    let mut out = std::collections::BTreeSet::new();
    for mask in 1u32..(1 << attrs) {
        for row in rows {
            let it: Intension = (0..attrs)
                .filter(|a| mask & (1 << a) != 0)
                .map(|a| (a, row[a]))
                .collect();
            out.insert(it);
        }
    }
    out.into_iter().collect()
}

pub fn extension(rows: &[Vec<u8>], intension: &Intension) -> Vec<usize> {
    (0..rows.len())
        .filter(|&o| intension.iter().all(|&(a, v)| rows[o][a] == v))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleMeasures {
    pub scoverage: Fraction,
    pub tcoverage: Fraction,
    pub sconfidence: Fraction,
    pub tconfidence: Fraction,
    pub k: usize,
}

/// Measures straight from the definitions. `K` is the largest connection count
/// reached by at least `max(1, floor(mc * |LH|))` members of LH.
pub fn oracle_measures(raw: &RawMmer, lhs: &[usize], rhs: &[usize], mc: Fraction, tc: Fraction) -> OracleMeasures {
    let connections: Vec<usize> = lhs
        .iter()
        .map(|&x| rhs.iter().filter(|&&y| raw.relation[x][y]).count())
        .collect();
    let rh = rhs.len() as u64;
    let passing = connections
        .iter()
        .filter(|&&c| Fraction::new(c as u64, rh) >= tc)
        .count();
    let needed = ((mc * Fraction::from_integer(lhs.len() as u64)).to_integer() as usize).max(1);
    let k = (0..=rhs.len())
        .rev()
        .find(|&t| connections.iter().filter(|&&c| c >= t).count() >= needed)
        .unwrap();
    OracleMeasures {
        scoverage: Fraction::new(lhs.len() as u64, raw.source.len() as u64),
        tcoverage: Fraction::new(rh, raw.target.len() as u64),
        sconfidence: Fraction::new(passing as u64, lhs.len() as u64),
        tconfidence: Fraction::new(k as u64, rh),
        k,
    }
}

/// All rules meeting `t`, by scanning every pair of realized intensions.
pub fn oracle_rules(raw: &RawMmer, t: &Thresholds) -> BTreeMap<(Intension, Intension), OracleMeasures> {
    let mut out = BTreeMap::new();
    let targets: Vec<(Intension, Vec<usize>)> = realized_intensions(&raw.target)
        .into_iter()
        .map(|it| {
            let ext = extension(&raw.target, &it);
            (it, ext)
        })
        .collect();
    for lhs in realized_intensions(&raw.source) {
        let lext = extension(&raw.source, &lhs);
        for (rhs, rext) in &targets {
            let m = oracle_measures(raw, &lext, rext, t.mc, t.tc);
            if m.scoverage >= t.ms && m.tcoverage >= t.mt && m.sconfidence >= t.mc && m.tconfidence >= t.tc {
                out.insert((lhs.clone(), rhs.clone()), m);
            }
        }
    }
    out
}

/// Decodes a library intension back into value codes.
pub fn intension_codes(granule: &gar_core::Granule) -> Intension {
    granule
        .intension()
        .iter()
        .map(|d| {
            let AttributeValue::Nominal(l) = &d.value else {
                panic!("random systems are nominal")
            };
            (d.attribute, l[1..].parse().unwrap())
        })
        .collect()
}

pub fn rule_key(rule: &GranularRule) -> (Intension, Intension) {
    (intension_codes(&rule.lhs), intension_codes(&rule.rhs))
}
