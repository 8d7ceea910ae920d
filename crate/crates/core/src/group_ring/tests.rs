use super::*;
use proptest::prelude::*;

fn shape(p: u64, n: u32, k: u32) -> RingShape {
    RingShape::modular(p, n, k).unwrap()
}

fn elem(s: &RingShape, coeffs: &[i64]) -> GroupRingElement {
    let r = s.residue_ring().unwrap();
    let mut v: Vec<u64> = coeffs.iter().map(|&c| r.from_i64(c)).collect();
    v.resize(s.dim(), 0);
    s.from_residues(v).unwrap()
}

fn arb_element(p: u64, n: u32, k: u32) -> impl Strategy<Value = GroupRingElement> {
    let s = shape(p, n, k);
    let m = s.residue_ring().unwrap().modulus();
    proptest::collection::vec(0..m, s.dim()).prop_map(move |v| s.from_residues(v).unwrap())
}

#[test]
fn omega_reduces_to_zero() {
    for (p, n) in [(3, 0), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
        let s = shape(p, n, 3);
        assert!(s.from_int_poly(&s.omega()).is_zero());
        let e = RingShape::exact(p, n).unwrap();
        assert!(e.from_int_poly(&e.omega()).is_zero());
    }
}

#[test]
fn cyclo_shift_examples() {
    let s = shape(3, 1, 4);
    assert_eq!(s.cyclo_shift(1).unwrap(), elem(&s, &[3, 3, 1]));
    assert!(matches!(s.cyclo_shift(2), Err(Error::LayerOutOfRange { .. })));
    assert!(matches!(s.cyclo_shift(0), Err(Error::LayerOutOfRange { .. })));
    let s2 = shape(3, 2, 4);
    let direct = (0..3).fold(s2.zero(), |acc, j| acc.add(&s2.gamma_pow(3 * j)).unwrap());
    assert_eq!(s2.cyclo_shift(2).unwrap(), direct);
}

#[test]
fn gamma_has_order_p_to_the_n() {
    let s = shape(3, 2, 3);
    assert!(s.gamma_pow(9).is_one());
    assert_eq!(s.gamma_pow(4).mul(&s.gamma_pow(7)).unwrap(), s.gamma_pow(2));
    assert_eq!(s.gamma_pow(1).pow(9), s.one());
    assert_eq!(s.gamma_pow(-1), s.gamma_pow(8));
}

#[test]
fn project_examples() {
    let s = shape(3, 2, 4);
    let f = s.omega_tilde(Sign::Minus);
    let s1 = shape(3, 1, 4);
    // Phi_1(1+X) = 3 + 3X + X^2 is already reduced modulo omega_1.
    assert_eq!(f.project(1).unwrap(), elem(&s1, &[3, 3, 1]));
    assert!(s.one().project(0).unwrap().is_one());
    assert!(matches!(s.one().project(3), Err(Error::LayerOutOfRange { .. })));
}

#[test]
fn trace_examples() {
    let s0 = shape(3, 0, 4);
    let s1 = shape(3, 1, 4);
    assert_eq!(s0.one().trace(1).unwrap(), elem(&s1, &[3, 3, 1]));
    assert!(s0.zero().trace(2).unwrap().is_zero());
    assert!(matches!(s1.one().trace(1), Err(Error::LayerOutOfRange { .. })));
}

#[test]
fn trace_is_sum_over_preimages() {
    // nu(sigma^e) = sum over the p^{n-m} lifts of the group element e.
    let (p, m, n) = (3u64, 1u32, 3u32);
    let sm = shape(p, m, 5);
    let sn = shape(p, n, 5);
    for e in 0..p.pow(m) as i64 {
        let lifts = (0..p.pow(n - m) as i64).fold(sn.zero(), |acc, j| {
            acc.add(&sn.gamma_pow(e + j * p.pow(m) as i64)).unwrap()
        });
        assert_eq!(sm.gamma_pow(e).trace(n).unwrap(), lifts);
    }
}

#[test]
fn involution_examples() {
    let s = shape(5, 1, 3);
    assert!(s.one().involution().is_one());
    assert_eq!(s.gamma_pow(1).involution(), s.gamma_pow(4));
    let e = RingShape::exact(3, 2).unwrap();
    assert_eq!(e.gamma_pow(1).involution(), e.gamma_pow(8));
}

#[test]
fn involution_scales_omega_tilde_by_unit() {
    for p in [3u64, 5] {
        for n in 0..=4u32 {
            if p.pow(n) > 625 {
                continue;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                let s = shape(p, n, 6);
                let w = s.omega_tilde(sign);
                let c = s.involution_factor(sign);
                assert!(c.is_unit().unwrap());
                assert_eq!(w.involution(), c.mul(&w).unwrap(), "p={p} n={n} {sign:?}");
            }
        }
    }
}

#[test]
fn involution_factor_examples() {
    // p = 3, n = 1, minus: (1+X)^{-2} = (1+X).
    let s = shape(3, 1, 4);
    assert_eq!(s.involution_factor(Sign::Minus), s.gamma_pow(1));
    assert!(s.involution_factor(Sign::Plus).is_one());
    let s0 = shape(5, 0, 2);
    assert!(s0.involution_factor(Sign::Minus).is_one());
}

#[test]
fn characters_kill_their_cyclotomic_factor() {
    let s = shape(3, 2, 4);
    let phi1 = s.cyclo_shift(1).unwrap();
    let phi2 = s.cyclo_shift(2).unwrap();
    let chi1 = Character::of_order(3, 1);
    let chi2 = Character::of_order(3, 2);
    assert!(phi1.eval_character(&chi1).unwrap().is_zero());
    assert!(!phi1.eval_character(&chi2).unwrap().is_zero());
    assert!(phi2.eval_character(&chi2).unwrap().is_zero());
    assert!(s.omega_pm(Sign::Plus).eval_character(&chi2).unwrap().is_zero());
    let f = elem(&s, &[2, 5, 0, 1]);
    match f.eval_character(&Character::trivial(3)).unwrap() {
        CharacterValue::Scalar(x) => assert_eq!(x.value(), 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        f.eval_character(&Character::of_order(3, 3)),
        Err(Error::LayerOutOfRange { .. })
    ));
}

#[test]
fn units_of_the_27_element_ring() {
    let s = shape(3, 1, 1);
    let all: Vec<GroupRingElement> = (0..27u64)
        .map(|i| s.from_residues(vec![i % 3, (i / 3) % 3, i / 9]).unwrap())
        .collect();
    for f in &all {
        let invertible = all.iter().any(|g| f.mul(g).unwrap().is_one());
        assert_eq!(f.is_unit().unwrap(), invertible, "{f}");
        if invertible {
            assert!(f.mul(&f.inverse().unwrap()).unwrap().is_one());
        } else {
            assert!(matches!(f.inverse(), Err(Error::NotUnit { .. })));
        }
    }
}

#[test]
fn exact_mode_rejects_unit_questions() {
    let e = RingShape::exact(3, 1).unwrap();
    assert!(matches!(e.one().is_unit(), Err(Error::ExactModeUnsupported)));
}

#[test]
fn mode_conversion() {
    let e = RingShape::exact(3, 1).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let f = e
        .from_rationals(vec![half.clone(), BigRational::zero(), -half])
        .unwrap();
    let m = f.to_modular(2).unwrap();
    assert_eq!(m.residues(), &[5, 0, 4]);
    assert!(matches!(m.to_modular(3), Err(Error::PrecisionMismatch { .. })));
    assert_eq!(m.to_modular(1).unwrap().residues(), &[2, 0, 1]);
    let third = BigRational::new(1.into(), 3.into());
    let g = e.from_rationals(vec![third, BigRational::zero(), BigRational::zero()]).unwrap();
    assert!(matches!(g.to_modular(2), Err(Error::NotPIntegral(_))));
}

#[test]
fn div_x_requires_zero_constant_term() {
    let s = shape(3, 1, 2);
    assert_eq!(elem(&s, &[0, 4, 2]).div_x().unwrap(), elem(&s, &[4, 2, 0]));
    assert!(elem(&s, &[1, 4, 2]).div_x().is_none());
}

#[test]
fn json_round_trip() {
    let s = shape(5, 1, 3);
    let f = elem(&s, &[1, -1, 7, 0, 124]);
    let text = serde_json::to_string(&f).unwrap();
    assert_eq!(text, r#"{"p":5,"n":1,"mode":"mod","k":3,"coeffs":[1,124,7,0,124]}"#);
    let back: GroupRingElement = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);

    let e = RingShape::exact(3, 1).unwrap();
    let g = e
        .from_rationals(vec![
            BigRational::new((-3).into(), 4.into()),
            BigRational::from_integer(2.into()),
            BigRational::zero(),
        ])
        .unwrap();
    let text = serde_json::to_string(&g).unwrap();
    assert_eq!(text, r#"{"p":3,"n":1,"mode":"exact","coeffs":["-3/4","2","0"]}"#);
    let back: GroupRingElement = serde_json::from_str(&text).unwrap();
    assert_eq!(back, g);
}

#[test]
fn json_rejects_wrong_length_and_shape() {
    assert!(serde_json::from_str::<GroupRingElement>(
        r#"{"p":3,"n":1,"mode":"mod","k":2,"coeffs":[1,2]}"#
    )
    .is_err());
    assert!(serde_json::from_str::<GroupRingElement>(
        r#"{"p":4,"n":1,"mode":"mod","k":2,"coeffs":[1,2,3,4]}"#
    )
    .is_err());
    assert!(
        serde_json::from_str::<GroupRingElement>(r#"{"p":3,"n":0,"mode":"mod","coeffs":[1]}"#)
            .is_err()
    );
}

#[test]
fn vanishing_order_examples() {
    let s = shape(3, 1, 4);
    let triv = Character::trivial(3);
    assert_eq!(vanishing_order(&s.one(), &triv, 5).unwrap(), VanishingOrder::Exactly(0));
    assert_eq!(vanishing_order(&s.x(), &triv, 5).unwrap(), VanishingOrder::Exactly(1));
    assert_eq!(vanishing_order(&s.zero(), &triv, 5).unwrap(), VanishingOrder::AtLeastCap(5));
    let x2 = s.x().pow(2);
    assert_eq!(vanishing_order(&x2, &triv, 5).unwrap(), VanishingOrder::Exactly(2));
    let chi = Character::of_order(3, 1);
    let phi = s.cyclo_shift(1).unwrap();
    assert_eq!(vanishing_order(&phi, &chi, 1).unwrap(), VanishingOrder::AtLeastCap(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_commutative_and_associative(
        a in arb_element(3, 2, 3), b in arb_element(3, 2, 3), c in arb_element(3, 2, 3)
    ) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn project_is_a_ring_homomorphism(a in arb_element(3, 2, 3), b in arb_element(3, 2, 3)) {
        for m in 0..=2 {
            let pa = a.project(m).unwrap();
            let pb = b.project(m).unwrap();
            prop_assert_eq!(a.mul(&b).unwrap().project(m).unwrap(), pa.mul(&pb).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().project(m).unwrap(), pa.add(&pb).unwrap());
        }
    }

    #[test]
    fn trace_then_project_multiplies_by_index(a in arb_element(3, 1, 4)) {
        for n in 2..=3u32 {
            let back = a.trace(n).unwrap().project(1).unwrap();
            prop_assert_eq!(back, a.scale(3i64.pow(n - 1)));
        }
    }

    #[test]
    fn involution_is_an_involutive_automorphism(a in arb_element(5, 1, 2), b in arb_element(5, 1, 2)) {
        prop_assert_eq!(a.involution().involution(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().involution(), a.involution().mul(&b.involution()).unwrap());
    }

    #[test]
    fn characters_are_ring_homomorphisms(a in arb_element(3, 2, 3), b in arb_element(3, 2, 3)) {
        for m in 1..=2 {
            let chi = Character::of_order(3, m);
            let (CharacterValue::Cyclotomic(x), CharacterValue::Cyclotomic(y), CharacterValue::Cyclotomic(z)) = (
                a.eval_character(&chi).unwrap(),
                b.eval_character(&chi).unwrap(),
                a.mul(&b).unwrap().eval_character(&chi).unwrap(),
            ) else {
                panic!("expected cyclotomic values");
            };
            prop_assert_eq!(x.mul(&y).unwrap(), z);
        }
    }

    #[test]
    fn group_basis_round_trip(a in arb_element(5, 1, 3)) {
        let t = a.group_coeffs_residue().unwrap();
        prop_assert_eq!(a.shape().from_group_coeffs_residue(t).unwrap(), a);
    }

    #[test]
    fn inverse_of_random_unit(a in arb_element(3, 2, 4)) {
        if a.is_unit().unwrap() {
            prop_assert!(a.mul(&a.inverse().unwrap()).unwrap().is_one());
        }
    }
}
