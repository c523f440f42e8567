mod common;

use common::{extension, label, oracle_measures, raw_mmer, realized_intensions, thresholds, Intension, RawMmer};
use gar_core::measures::{evaluate_rule, sandwich_holds, source_confidence, target_confidence, Thresholds};
use gar_core::model::{AttributeValue, BinaryRelation, Descriptor, Granule, InformationSystem, Side};
use gar_core::Fraction;
use proptest::prelude::*;

fn granule(is: &InformationSystem, side: Side, it: &Intension) -> Granule {
    let ds = it
        .iter()
        .map(|&(a, v)| Descriptor {
            attribute: a,
            value: AttributeValue::nominal(label(v)),
        })
        .collect();
    Granule::from_intension(is, side, ds).unwrap()
}

fn transpose(raw: &RawMmer) -> RawMmer {
    RawMmer {
        source: raw.target.clone(),
        target: raw.source.clone(),
        relation: (0..raw.target.len())
            .map(|y| (0..raw.source.len()).map(|x| raw.relation[x][y]).collect())
            .collect(),
    }
}

fn fraction() -> impl Strategy<Value = Fraction> {
    (1u64..=20).prop_map(|n| Fraction::new(n, 20))
}

proptest! {
    #[test]
    fn measures_match_the_oracle(raw in raw_mmer(), t in thresholds()) {
        let mmer = raw.to_mmer();
        for lhs in realized_intensions(&raw.source) {
            let lh = granule(&mmer.source, Side::Source, &lhs);
            for rhs in realized_intensions(&raw.target) {
                let rh = granule(&mmer.target, Side::Target, &rhs);
                let got = evaluate_rule(&lh, &rh, &mmer.relation, &t).unwrap();
                let want = oracle_measures(
                    &raw,
                    &extension(&raw.source, &lhs),
                    &extension(&raw.target, &rhs),
                    t.mc,
                    t.tc,
                );
                prop_assert_eq!(
                    (got.scoverage, got.tcoverage, got.sconfidence, got.tconfidence, got.k),
                    (want.scoverage, want.tcoverage, want.sconfidence, want.tconfidence, want.k)
                );
            }
        }
    }

    #[test]
    fn confidences_fall_as_their_parameter_rises(raw in raw_mmer(), a in fraction(), b in fraction()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mmer = raw.to_mmer();
        let lhs = &realized_intensions(&raw.source)[0];
        let rhs = &realized_intensions(&raw.target)[0];
        let lh = granule(&mmer.source, Side::Source, lhs);
        let rh = granule(&mmer.target, Side::Target, rhs);
        let rel = &mmer.relation;
        prop_assert!(source_confidence(&lh, &rh, rel, &hi).unwrap() <= source_confidence(&lh, &rh, rel, &lo).unwrap());
        prop_assert!(
            target_confidence(&lh, &rh, rel, &hi).unwrap().tconfidence
                <= target_confidence(&lh, &rh, rel, &lo).unwrap().tconfidence
        );
    }

    #[test]
    fn swapping_sides_swaps_coverages(raw in raw_mmer()) {
        let mmer = raw.to_mmer();
        let flipped = transpose(&raw).to_mmer();
        let t = Thresholds::parse("0.5", "0.5", "0.5", "0.5").unwrap();
        let lhs = &realized_intensions(&raw.source)[0];
        let rhs = &realized_intensions(&raw.target)[0];
        let forward = evaluate_rule(
            &granule(&mmer.source, Side::Source, lhs),
            &granule(&mmer.target, Side::Target, rhs),
            &mmer.relation,
            &t,
        )
        .unwrap();
        let backward = evaluate_rule(
            &granule(&flipped.source, Side::Source, rhs),
            &granule(&flipped.target, Side::Target, lhs),
            &flipped.relation,
            &t,
        )
        .unwrap();
        prop_assert_eq!(forward.scoverage, backward.tcoverage);
        prop_assert_eq!(forward.tcoverage, backward.scoverage);
    }

    #[test]
    fn sandwich_holds_for_any_counts(counts in prop::collection::vec(0usize..12, 1..30), mc in fraction()) {
        let t = gar_core::measures::target_confidence_from_counts(&counts, 12, &mc).unwrap();
        prop_assert!(sandwich_holds(&counts, &mc, t.k));
        // K is the largest value meeting the bounds.
        prop_assert!(!sandwich_holds(&counts, &mc, t.k + 1));
    }
}

#[test]
fn empty_sides_are_domain_errors() {
    let rel = BinaryRelation::from_pairs(1, 1, []).unwrap();
    assert_eq!(rel.pair_count(), 0);
    assert!(gar_core::measures::target_confidence_from_counts(&[], 3, &Fraction::new(1, 2)).is_err());
    assert!(gar_core::measures::target_confidence_from_counts(&[1], 0, &Fraction::new(1, 2)).is_err());
}
