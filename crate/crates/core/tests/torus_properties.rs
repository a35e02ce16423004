mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{conjugate, random_unimodular};
use neron_torsors::bridge::cardinality_bridge;
use neron_torsors::galois::GaloisLatticeModule;
use neron_torsors::lattice::FgAbelianGroup;
use neron_torsors::padic::PadicContext;
use neron_torsors::torus::{
    component_group, h1_frobenius, norm_torus_spec, split_torus_spec, TameTorusSpec,
};

#[test]
fn norm_torus_component_group_has_order_e() {
    for e in 1..=12usize {
        let cg = component_group(&norm_torus_spec(e).unwrap()).unwrap();
        assert_eq!(cg.group.order(), Some(BigInt::from(e)), "e = {e}");
        assert_eq!(cg.group, FgAbelianGroup::cyclic(e as i64));
        assert_eq!(
            h1_frobenius(&cg).unwrap().order(),
            Some(BigInt::from(e)),
            "H1 for e = {e}"
        );
    }
}

#[test]
fn split_tori() {
    for r in 0..=5 {
        let cg = component_group(&split_torus_spec(r)).unwrap();
        assert_eq!(cg.group, FgAbelianGroup::free(r));
        assert!(h1_frobenius(&cg).unwrap().is_trivial());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn component_group_is_base_change_invariant(e in 1usize..=8, seed in any::<u64>()) {
        let spec = norm_torus_spec(e).unwrap();
        let m = spec.characters();
        let n = m.lattice_rank();
        let c = random_unimodular(&mut ChaCha8Rng::seed_from_u64(seed), n, 10);
        let c_inv = c.inverse_unimodular().unwrap();
        let moved = GaloisLatticeModule::new(
            n,
            m.generators().iter().map(|g| conjugate(&c, &c_inv, g)).collect(),
            m.inertia_indices().to_vec(),
            m.wild_inertia_indices().to_vec(),
            m.frobenius().map(|f| conjugate(&c, &c_inv, f)),
        )
        .unwrap();
        let cg = component_group(&TameTorusSpec::new(moved).unwrap()).unwrap();
        let reference = component_group(&spec).unwrap();
        prop_assert_eq!(&cg.group, &reference.group);
        prop_assert_eq!(h1_frobenius(&cg).unwrap(), h1_frobenius(&reference).unwrap());
    }
}

#[test]
fn bridge_agrees_for_every_admissible_degree() {
    for p in [3u64, 5, 7, 11, 13, 19, 31] {
        let ctx = PadicContext::new(p, 4).unwrap();
        for e in (1..p as u32).filter(|e| (p - 1) % u64::from(*e) == 0) {
            let report = cardinality_bridge(ctx, e).unwrap();
            assert_eq!(report.lattice_count, u64::from(e));
            assert_eq!(report.padic_classes.len(), e as usize);
        }
    }
}
