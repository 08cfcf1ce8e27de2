use proptest::prelude::*;

use unimagma::action::{canonical_point, semidirect_product, verify_action};
use unimagma::classify::{enumerate_actions, phi_of_point};
use unimagma::doc::{from_json, to_json};
use unimagma::magma::{
    adjoin_poles, check_morphism, direct_product, find_isomorphism, magma_at, magma_count,
    verify_unitary_magma,
};
use unimagma::{Action, FiniteMagma, SearchLimits};

fn magma(max: usize) -> impl Strategy<Value = FiniteMagma> {
    (1..=max, any::<u64>()).prop_map(|(n, i)| magma_at(n, i % magma_count(n).unwrap()))
}

/// A random action with `|X| <= 2` over a magma of order at most 2.
fn action() -> impl Strategy<Value = Action> {
    (1..=2usize, magma(2), any::<prop::sample::Index>()).prop_map(|(x, b, i)| {
        let all = enumerate_actions(x, &b, SearchLimits::default()).unwrap();
        all[i.index(all.len())].clone()
    })
}

fn relabel(m: &FiniteMagma, perm: &[usize]) -> FiniteMagma {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    FiniteMagma::from_fn(m.size(), perm[m.unit()], |a, b| perm[m.op(inv[a], inv[b])]).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn isomorphic_by_scan(m: &FiniteMagma, n: &FiniteMagma) -> bool {
    m.size() == n.size()
        && permutations(m.size()).iter().any(|p| {
            p[m.unit()] == n.unit()
                && m.elements()
                    .all(|a| m.elements().all(|b| p[m.op(a, b)] == n.op(p[a], p[b])))
        })
}

proptest! {
    #[test]
    fn enumerated_magmas_are_unitary(m in magma(4)) {
        prop_assert!(verify_unitary_magma(&m).is_valid());
    }

    #[test]
    fn adjoining_poles_keeps_a_unit(m in magma(3)) {
        let p = adjoin_poles(&m);
        prop_assert_eq!(p.size(), m.size() + 2);
        prop_assert!(verify_unitary_magma(&p).is_valid());
    }

    #[test]
    fn relabelings_are_isomorphic(m in magma(4), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..m.size()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let r = relabel(&m, &perm);
        let f = find_isomorphism(&m, &r).expect("relabeling is an isomorphism");
        prop_assert!(f.is_bijective());
        for a in m.elements() {
            for b in m.elements() {
                prop_assert_eq!(f.apply(m.op(a, b)), r.op(f.apply(a), f.apply(b)));
            }
        }
    }

    #[test]
    fn isomorphism_search_matches_permutation_scan(m in magma(3), n in magma(3)) {
        let found = find_isomorphism(&m, &n);
        if let Some(f) = &found {
            prop_assert!(check_morphism(f, &m, &n).unwrap().is_valid());
            prop_assert!(f.is_bijective());
        }
        prop_assert_eq!(found.is_some(), isomorphic_by_scan(&m, &n));
        prop_assert_eq!(found.is_some(), find_isomorphism(&n, &m).is_some());
    }

    #[test]
    fn products_of_associative_magmas_are_associative(m in magma(3), n in magma(3)) {
        let p = direct_product(&m, &n);
        prop_assert!(verify_unitary_magma(&p).is_valid());
        prop_assert_eq!(p.is_associative(), m.is_associative() && n.is_associative());
    }

    #[test]
    fn semidirect_product_follows_the_action(a in action()) {
        let sdp = semidirect_product(&a).unwrap();
        let m = sdp.magma();
        for i in m.elements() {
            for j in m.elements() {
                let ((x, b), (x2, b2)) = (sdp.pair(i), sdp.pair(j));
                let want = (a.phi(x, b, x2, b2), a.b().op(b, b2));
                prop_assert_eq!(sdp.pair(m.op(i, j)), want);
            }
        }
        prop_assert_eq!(sdp.pair(m.unit()), (a.zero(), a.b().unit()));
    }

    #[test]
    fn canonical_point_is_valid_and_classifies_back(a in action()) {
        let pt = canonical_point(&a).unwrap();
        prop_assert!(pt.verify().is_valid());
        prop_assert_eq!(phi_of_point(&pt).unwrap(), a);
    }

    #[test]
    fn canonical_point_refuses_exactly_the_invalid_tables(
        a in action(),
        slot in any::<prop::sample::Index>(),
        value in any::<prop::sample::Index>(),
    ) {
        let mut phi = a.table().to_vec();
        let i = slot.index(phi.len());
        phi[i] = value.index(a.x_size());
        let b = Action::new(a.b().clone(), a.x_size(), a.zero(), phi).unwrap();
        prop_assert_eq!(canonical_point(&b).is_ok(), verify_action(&b).is_valid());
    }

    #[test]
    fn documents_round_trip(m in magma(4), a in action()) {
        prop_assert_eq!(from_json::<FiniteMagma>(&to_json(&m)).unwrap(), m);
        prop_assert_eq!(from_json::<Action>(&to_json(&a)).unwrap(), a.clone());
        let pt = canonical_point(&a).unwrap();
        prop_assert_eq!(from_json(&to_json(&pt)).ok(), Some(pt));
    }
}
