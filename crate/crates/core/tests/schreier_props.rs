mod common;

use common::{all_subsets, binomial, ladder, o};
use schreier::families::GeneralizedSchreier;
use schreier::schreier::{
    canonical_rep, classify_peel, complete_consecutively, enumerate, in_substar, peel_trace, step, Classification,
    StructuralOracle,
};
use schreier::{FinSet, Ordinal};

fn set(v: &[u64]) -> FinSet {
    FinSet::new(v.to_vec()).unwrap()
}

#[test]
fn finite_families_are_all_k_sets() {
    let three = enumerate(&o("3"), &FinSet::range(1, 8), 1_000).unwrap();
    assert_eq!(three.len(), 56);
    assert!(three.iter().all(|s| s.len() == 3));
    for k in 0..=4u64 {
        for n in 0..=12u64 {
            let members = enumerate(&Ordinal::finite(k), &FinSet::range(1, n), 100_000).unwrap();
            assert_eq!(members.len() as u64, binomial(n, k), "k={k} n={n}");
            assert!(members.iter().all(|s| s.len() as u64 == k));
        }
    }
}

#[test]
fn classical_schreier_anchor() {
    let got = enumerate(&o("w"), &FinSet::range(1, 6), 1_000).unwrap();
    let mut expected = vec![set(&[1])];
    expected.extend((3..=6).map(|x| set(&[2, x])));
    for (a, b) in [(4, 5), (4, 6), (5, 6)] {
        expected.push(set(&[3, a, b]));
    }
    let sort = |v: &mut Vec<FinSet>| v.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    let (mut got, mut expected) = (got, expected);
    sort(&mut got);
    sort(&mut expected);
    assert_eq!(got, expected);

    let g = GeneralizedSchreier::new();
    for s in all_subsets(12) {
        let closed_form = s.min().is_none_or(|m| s.len() as u64 <= m);
        assert_eq!(in_substar(&o("w"), &s, None), closed_form, "{s}");
        assert_eq!(g.contains(&o("1"), &s), closed_form, "{s}");
    }
}

#[test]
fn thinness() {
    for xi in ladder() {
        let members = enumerate(&xi, &FinSet::range(1, 12), 1_000_000).unwrap();
        assert!(!members.is_empty());
        // Sorted lexicographically, a proper initial segment would sit
        // immediately before some extension of it.
        for w in members.windows(2) {
            assert!(
                !w[0].is_initial_segment_of(&w[1]) || w[0] == w[1],
                "{xi}: {} < {}",
                w[0],
                w[1]
            );
        }
        for s in &members {
            for k in 0..s.len() {
                assert_ne!(classify_peel(&xi, &s.prefix(k)), Classification::Member, "{xi}: {s}");
            }
        }
    }
}

#[test]
fn trichotomy_and_extension() {
    for xi in ladder() {
        let mut oracle = StructuralOracle::new();
        for s in all_subsets(12).filter(|s| !s.is_empty()) {
            let c = classify_peel(&xi, &s);
            match c {
                Classification::Member => assert!(oracle.is_member(&xi, s.as_slice())),
                Classification::ExtendsMember(k) => {
                    assert!(k >= 1 && k < s.len());
                    assert!(oracle.is_member(&xi, s.prefix(k).as_slice()));
                }
                Classification::ProperInitial => {
                    // Completions below ω² stay short; from ω² on they grow
                    // exponentially in the elements.
                    if xi < o("w^2") {
                        let t = complete_consecutively(&xi, &s, 2_000).unwrap_or_else(|acc| panic!("{xi} {s}: {acc}"));
                        assert!(s.is_initial_segment_of(&t) && t.len() > s.len());
                        assert!(oracle.is_member(&xi, t.as_slice()), "{xi}: {t}");
                    }
                }
            }
        }
    }
}

#[test]
fn step_sequences() {
    assert_eq!(step(&o("w"), 4).unwrap(), o("3"));
    assert_eq!(step(&o("w^2"), 3).unwrap(), o("w*2+2"));
    assert_eq!(step(&o("5"), 3).unwrap(), o("4"));
    assert_eq!(step(&o("w^2+w"), 3).unwrap(), o("w^2+2"));
    assert_eq!(step(&o("w^w"), 2).unwrap(), o("w^2+w+1"));
    for xi in ladder() {
        let values: Vec<Ordinal> = (1..=30).map(|n| step(&xi, n).unwrap()).collect();
        assert!(values.iter().all(|v| *v < xi), "{xi}");
        if xi.is_limit() {
            assert!(values.windows(2).all(|w| w[0] < w[1]), "{xi}");
        } else {
            assert!(values.iter().all(|v| *v == values[0]), "{xi}");
        }
    }
    assert!(step(&Ordinal::zero(), 1).is_err());
}

#[test]
fn peel_traces_decrease() {
    for xi in ladder() {
        for s in all_subsets(10) {
            let t = peel_trace(&xi, &s);
            assert!(t.accumulators.windows(2).all(|w| w[1] < w[0]), "{xi} {s}");
        }
    }
}

/// Every split of `s` into consecutive chunks, the last chunk possibly empty.
fn decompositions(s: &FinSet) -> Vec<(Vec<FinSet>, FinSet)> {
    let n = s.len();
    let mut out = Vec::new();
    // Bit i set means a block ends after element i.
    for cuts in 0u32..1 << n {
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 0..n {
            if cuts >> i & 1 == 1 {
                blocks.push(FinSet::new(s.as_slice()[start..=i].to_vec()).unwrap());
                start = i + 1;
            }
        }
        out.push((blocks, FinSet::new(s.as_slice()[start..].to_vec()).unwrap()));
    }
    out
}

#[test]
fn canonical_representation_is_unique() {
    for xi in ladder() {
        let mut oracle = StructuralOracle::new();
        for s in all_subsets(12).filter(|s| s.len() <= 8) {
            let valid: Vec<(Vec<FinSet>, FinSet)> = decompositions(&s)
                .into_iter()
                .filter(|(blocks, trailing)| {
                    blocks.iter().all(|b| oracle.is_member(&xi, b.as_slice()))
                        && (trailing.is_empty() || oracle.classify(&xi, trailing) == Classification::ProperInitial)
                })
                .collect();
            assert_eq!(valid.len(), 1, "{xi} {s}: {valid:?}");
            let rep = canonical_rep(&xi, &s).unwrap();
            assert_eq!((rep.blocks.clone(), rep.trailing.clone()), valid[0], "{xi} {s}");
            assert_eq!(rep.type_count, rep.blocks.len());
        }
    }
}

#[test]
fn substar_is_spreading() {
    // Closure under raising one element by one, staying increasing, gives
    // closure under every right shift.
    for xi in ladder() {
        for s in all_subsets(14).filter(|s| in_substar(&xi, s, None)) {
            let v = s.as_slice();
            for i in 0..v.len() {
                let raised = v[i] + 1;
                if raised > 14 || v.get(i + 1) == Some(&raised) {
                    continue;
                }
                let mut w = v.to_vec();
                w[i] = raised;
                let t = FinSet::new(w).unwrap();
                assert!(in_substar(&xi, &t, None), "{xi}: {s} -> {t}");
            }
        }
    }
}
