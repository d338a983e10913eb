use std::collections::{BTreeSet, HashMap};

use karpelevic::arc_powers::{
    all_relations, power_sources, power_targets, verify_power_numeric, SourceShape,
};
use karpelevic::farey::{arc_params, arcs_of_order, farey_sequence, star, ArcId, Fraction};
use proptest::prelude::*;

#[test]
fn consecutive_terms_are_pairs() {
    for n in 1..=200 {
        let seq = farey_sequence(n).unwrap();
        for w in seq.windows(2) {
            let (a, b) = (w[0], w[1]);
            assert_eq!(a.den() * b.num() - a.num() * b.den(), 1, "n = {n}");
            assert!(a.den() + b.den() > n);
        }
    }
}

#[test]
fn lemma_divisibility_scan() {
    for n in 2..=60 {
        for arc in arcs_of_order(n).unwrap() {
            for c in 2..=n {
                if let Some(img) = star(arc, c).unwrap() {
                    assert!(arc.q() % c == 0 || arc.s() % c == 0, "{arc} ★ {c}");
                    // endpoints land on endpoints: frac(c·p̂/q̂) = p/q
                    let (primary, conj) = arc.pairs();
                    let (tp, tc) = img.target.pairs();
                    let image = |f: Fraction| f.scaled_split(c).unwrap().1;
                    let got: BTreeSet<_> = [primary.left, primary.right, conj.left, conj.right]
                        .into_iter()
                        .map(image)
                        .collect();
                    let want: BTreeSet<_> = [tp.left, tp.right, tc.left, tc.right]
                        .into_iter()
                        .map(|f| if f.is_one() { Fraction::ZERO } else { f })
                        .collect();
                    assert_eq!(got, want, "{arc} ★ {c}");
                }
            }
        }
    }
}

#[test]
fn duality_and_derivative_conditions() {
    for n in 2..=40 {
        let mut from_sources = BTreeSet::new();
        let mut from_targets = BTreeSet::new();
        let mut by_target_c: HashMap<(ArcId, i64), Vec<ArcId>> = HashMap::new();
        for arc in arcs_of_order(n).unwrap() {
            for r in power_sources(arc) {
                from_sources.insert((r.target, r.source, r.c));
                by_target_c.entry((r.target, r.c)).or_default().push(r.source);
                assert_eq!(star(r.source, r.c).unwrap().map(|i| i.target), Some(r.target));
                let (q, s, d) = (r.target.q(), r.target.s(), arc_params(r.target).d);
                let (qh, sh, dh) = (r.source.q(), r.source.s(), arc_params(r.source).d);
                if qh % r.c == 0 {
                    assert_eq!((q * d, s), (qh * dh, sh), "{r:?}");
                    assert_eq!(r.shape, SourceShape::ScaledQ);
                } else {
                    assert_eq!(sh % r.c, 0);
                    assert_eq!((q * d, s), (sh, qh * dh), "{r:?}");
                }
            }
            for r in power_targets(arc) {
                from_targets.insert((r.target, r.source, r.c));
            }
        }
        assert_eq!(from_sources, from_targets, "n = {n}");
        for (key, sources) in by_target_c {
            assert_eq!(sources.len(), 1, "{key:?} has sources {sources:?}");
        }
    }
}

#[test]
fn every_small_relation_verifies_numerically() {
    for n in 2..=20 {
        for rel in all_relations(n).unwrap() {
            let check = verify_power_numeric(&rel, 25).unwrap();
            assert!(check.passed(1e-7), "{check:?}");
            assert!(check.endpoint_deviation < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn pairs_are_mirror_images(n in 2i64..400, seed in 0usize..10_000) {
        let arcs = arcs_of_order(n).unwrap();
        let arc = arcs[seed % arcs.len()];
        let (a, b) = arc.pairs();
        prop_assert!(karpelevic::farey::is_farey_pair(a.left, a.right, n));
        prop_assert!(karpelevic::farey::is_farey_pair(b.left, b.right, n));
        prop_assert_eq!(a.left.num() + b.right.num(), a.left.den());
        prop_assert_eq!(a.right.num() + b.left.num(), a.right.den());
        let p = arc_params(arc);
        prop_assert_eq!(p.s1 * p.delta, arc.s());
        prop_assert_eq!(p.d1 * p.delta, p.d);
    }

    #[test]
    fn arc_id_is_order_free(n in 2i64..300, a in 1i64..300, b in 1i64..300) {
        prop_assert_eq!(ArcId::new(n, a, b).ok(), ArcId::new(n, b, a).ok());
    }
}
