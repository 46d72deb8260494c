use std::sync::Arc;

use advbound::bounds::index_erasure_weights;
use advbound::delta::{self, gamma_family_weights, Variant};
use advbound::problems::{build_index_erasure, build_search};
use advbound::symmetry::{isotypic_decomposition, GroupAction};

fn check(group: &GroupAction, weights: &[f64], seed: u64) {
    let decomp = isotypic_decomposition(group, seed).unwrap();
    for variant in [Variant::Additive, Variant::Multiplicative] {
        let w = match variant {
            Variant::Additive => weights.to_vec(),
            Variant::Multiplicative => gamma_family_weights(weights, 0.8),
        };
        for r in delta::verify_all(&w, &decomp, group, variant, seed).unwrap() {
            assert!(r.pass, "{} x={} {:?}: {} vs {}", group.problem().name(), r.x, variant, r.block_max, r.direct);
        }
    }
}

#[test]
fn search_reduction() {
    for n in [4, 8] {
        let g = GroupAction::search_symmetric(Arc::new(build_search(n).unwrap())).unwrap();
        check(&g, &[1.0, -1.0 / (n as f64 - 1.0)], 11);
    }
}

#[test]
fn index_erasure_reduction() {
    for (n, m) in [(2, 3), (3, 4)] {
        let g = GroupAction::index_erasure(Arc::new(build_index_erasure(n, m).unwrap())).unwrap();
        let decomp = isotypic_decomposition(&g, 5).unwrap();
        let w = index_erasure_weights(n, &decomp).unwrap();
        check(&g, &w, 5);
    }
}

#[test]
fn index_erasure_reconstruction_and_types() {
    let (n, m) = (3, 4);
    let g = GroupAction::index_erasure(Arc::new(build_index_erasure(n, m).unwrap())).unwrap();
    let decomp = isotypic_decomposition(&g, 5).unwrap();
    let w = index_erasure_weights(n, &decomp).unwrap();
    let gamma = delta::weighted_sum(&decomp, &w).unwrap();
    for x in 0..n {
        let r = delta::restrict(&decomp, &g, x, 5).unwrap();
        let blocks = delta::delta_blocks(&w, &decomp, &r, g.problem(), Variant::Additive).unwrap();
        let direct = g.problem().restrict_query(&gamma, x).unwrap().combine(1.0, &gamma, -1.0).unwrap();
        let rec = delta::reconstruct(&blocks, &r);
        assert!((rec - direct.matrix()).norm_l2() < 1e-7);
        for b in &blocks {
            let label = b.label.as_ref().expect("labelled G_x irrep");
            assert_eq!(label.len(), 2);
            let (inner, outer) = (&label[0], &label[1]);
            let allowed = outer.contains(inner) && outer.size() - inner.size() <= 2;
            if !allowed {
                assert!(b.norm().unwrap() <= 1e-8, "{label:?}");
            }
        }
    }
}

#[test]
fn index_erasure_trace_identities() {
    let g = GroupAction::index_erasure(Arc::new(build_index_erasure(2, 3).unwrap())).unwrap();
    let decomp = isotypic_decomposition(&g, 5).unwrap();
    let r = delta::trace_proj_check(&decomp, &g, 0, 0, 5, 1e-8).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.isomorphic_tuples > 0);
}
