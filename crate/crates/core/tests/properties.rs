use num_bigint::BigUint;
use proptest::prelude::*;

use orientcount::certify::{certificate_size_bound, CertificateCheck};
use orientcount::{
    build_forcing_certificate, build_witness, certificate_count_bound, count_acyclic, count_oracle, count_restricted,
    verify_certificate, verify_witness, ForbiddenFamily, Graph, PartialOrientation, VertexOrder,
};

const FAMILIES: &[&str] = &["c3", "cycle:4", "transitive:4", "strong:4", "oriented:@3:0>1,1>2,2>0"];

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=7, 0.2f64..0.9, any::<u64>())
        .prop_map(|(n, p, seed)| Graph::gnp(n, p, seed).unwrap())
        .prop_filter("oracle edge limit", |g| g.m() <= 14)
}

fn graph_and_order() -> impl Strategy<Value = (Graph, VertexOrder)> {
    small_graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(g, perm)| (g, VertexOrder::from_permutation(perm).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restricted_matches_oracle(g in small_graph(), f in 0..FAMILIES.len()) {
        let family = ForbiddenFamily::parse(FAMILIES[f]).unwrap();
        prop_assert_eq!(count_restricted(&g, &family).unwrap(), count_oracle(&g, &family).unwrap());
    }

    #[test]
    fn acyclic_orientations_avoid_every_family(g in small_graph()) {
        // every acyclic orientation is triangle- and cycle-free, so both counts agree
        let acyclic = count_acyclic(&g).unwrap();
        let cyc = ForbiddenFamily::parse("c3").unwrap();
        prop_assert!(acyclic.0 <= count_restricted(&g, &cyc).unwrap().0);
        prop_assert!(acyclic.0 >= BigUint::from(1u32));
    }

    #[test]
    fn witness_is_a_lower_bound((g, order) in graph_and_order(), a in 1usize..6, f in 0..FAMILIES.len()) {
        let family = ForbiddenFamily::parse(FAMILIES[f]).unwrap();
        let w = build_witness(&g, &order, a, &family).unwrap();
        prop_assert!(verify_witness(&g, &w).unwrap().is_valid());
        let count = count_restricted(&g, &family).unwrap();
        prop_assert!(BigUint::from(1u32) << w.free.len() <= count.0);
    }

    #[test]
    fn certificate_forces_the_orientation((g, order) in graph_and_order(), f in 0..FAMILIES.len()) {
        let family = ForbiddenFamily::parse(FAMILIES[f]).unwrap();
        let po = PartialOrientation::from_order(&g, &order);
        let cert = build_forcing_certificate(&g, &po, &family).unwrap();
        prop_assert_eq!(verify_certificate(&g, &cert, &po).unwrap(), CertificateCheck::Valid);
        prop_assert!(cert.size() <= g.m());
        let bound = certificate_size_bound(&g, &family);
        if let (true, Some(b)) = (bound.proven, bound.b) {
            prop_assert!(cert.size() <= b);
            let count = count_restricted(&g, &family).unwrap();
            prop_assert!(count.0 <= certificate_count_bound(g.m(), b).0);
        }
    }

    #[test]
    fn graph_text_round_trip(g in small_graph()) {
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn order_orientation_is_acyclic((g, order) in graph_and_order()) {
        let po = PartialOrientation::from_order(&g, &order);
        prop_assert!(po.is_total());
        prop_assert!(po.arcs(&g).iter().all(|&(u, v)| order.is_forward(u, v)));
    }
}
