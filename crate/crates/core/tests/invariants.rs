use iwasawa_core::fitting::enumerate::{all_elements, ideal_by_enumeration};
use iwasawa_core::fitting::lemmas::{random_module, random_move};
use iwasawa_core::fitting::IdealLattice;
use iwasawa_core::group_ring::{GroupRingElement, RingShape, Sign};
use iwasawa_core::mazur_tate::pm_extract;
use iwasawa_core::parallel::instance_rng;
use proptest::prelude::*;

fn element(shape: &RingShape, coeffs: &[u64]) -> GroupRingElement {
    let m = shape.p().pow(shape.k().unwrap());
    let d = shape.dim();
    shape
        .from_residues(coeffs.iter().cycle().take(d).map(|c| c % m).collect())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fitting_ideal_survives_presentation_moves(seed in any::<u64>(), r in 1usize..=2, extra in 0usize..=2) {
        let shape = RingShape::modular(3, 1, 2).unwrap();
        let mut rng = instance_rng(seed, 0);
        let m = random_module(&shape, r, r + extra, &mut rng);
        let moved = random_move(&m, &mut rng).unwrap();
        prop_assert_eq!(m.fitting_ideal().unwrap(), moved.fitting_ideal().unwrap());
    }

    #[test]
    fn membership_matches_enumeration(gens in prop::collection::vec(prop::collection::vec(0u64..3, 3), 1..=3)) {
        let shape = RingShape::modular(3, 1, 1).unwrap();
        let gens: Vec<_> = gens.iter().map(|g| element(&shape, g)).collect();
        let ideal = IdealLattice::from_generators(&shape, gens.clone()).unwrap();
        let brute = ideal_by_enumeration(&shape, &gens).unwrap();
        for f in all_elements(&shape).unwrap() {
            prop_assert_eq!(ideal.contains(&f).unwrap(), brute.contains(f.residues()));
        }
    }

    #[test]
    fn multiples_of_the_divisor_are_extracted(n in 1u32..=3, k in 1u32..=4, g in prop::collection::vec(0u64..81, 1..=27)) {
        let shape = RingShape::modular(3, n, k).unwrap();
        let divisor = shape.omega_tilde(Sign::theta_divisor(n));
        let f = divisor.mul(&element(&shape, &g)).unwrap();
        let ext = pm_extract(&f, None).unwrap();
        prop_assert!(ext.annihilator_ok);
        prop_assert_eq!(divisor.mul(&ext.quotient).unwrap(), f);
    }
}
