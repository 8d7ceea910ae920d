use super::*;
use crate::arith::hensel_unit_root;
use crate::modsym::curve::CountOrder;
use crate::parallel::Execution;

fn symbol(label: &str) -> PlusEigenSymbol {
    PlusEigenSymbol::compute(&CurveData::named(label).unwrap()).unwrap()
}

/// Full sum over `(Z/p^{n+1})^x`, Teichmueller lifts and logs found by search, halved.
fn theta_oracle(phi: &PlusEigenSymbol, p: u64, n: u32) -> Vec<BigRational> {
    let m = p.pow(n + 1);
    let mut t = vec![BigRational::zero(); p.pow(n) as usize];
    for a in (1..m).filter(|a| a % p != 0) {
        let teich = (1..m)
            .find(|&x| x % p == a % p && pow_mod(x, p - 1, m) == 1)
            .unwrap();
        let principal = (1..m).find(|&u| u * teich % m == a).unwrap();
        let e = (0..p.pow(n)).find(|&e| pow_mod(1 + p, e, m) == principal).unwrap();
        t[e as usize] += BigRational::new(phi.eval_plus(a as i64, m as i64), BigInt::from(2));
    }
    t
}

#[test]
fn theta_matches_brute_force() {
    for (label, p) in [("17a1", 3u64), ("11a1", 3), ("11a1", 5), ("37a1", 3)] {
        let phi = symbol(label);
        for n in 0..=2 {
            let t = theta(&phi, p, n).unwrap();
            assert_eq!(t.element.group_coeffs_exact().unwrap(), theta_oracle(&phi, p, n), "{label} p={p} n={n}");
        }
    }
}

#[test]
fn theta_zero_is_a_single_sum() {
    let phi = symbol("11a1");
    let t = theta(&phi, 5, 0).unwrap();
    let direct: BigInt = (1..=2).map(|a| phi.eval_plus(a, 5)).sum();
    assert_eq!(t.element.rationals(), &[BigRational::from_integer(direct)]);
}

#[test]
fn theta_is_linear_in_the_symbol() {
    let phi = symbol("17a1");
    let t = theta(&phi, 3, 2).unwrap().element;
    let t2 = theta(&phi.scaled(2), 3, 2).unwrap().element;
    assert_eq!(t.scale(2), t2);
}

#[test]
fn bad_primes() {
    let phi = symbol("11a1");
    assert!(matches!(theta(&phi, 11, 1), Err(Error::BadPrime { .. })));
    assert!(matches!(theta(&phi, 9, 1), Err(Error::InvalidPrime(9))));
    assert!(matches!(theta(&phi, 2, 1), Err(Error::InvalidPrime(2))));
}

#[test]
fn norm_relations() {
    for label in ["17a1", "11a1"] {
        let phi = symbol(label);
        for n in [2, 3] {
            let r = norm_relation_check(&phi, 3, n).unwrap();
            assert!(r.holds, "{label} n={n}: {} vs {}", r.lhs, r.rhs);
        }
    }
    let phi = symbol("11a1");
    assert!(norm_relation_check(&phi, 5, 2).unwrap().holds);
}

#[test]
fn corrupted_theta_breaks_the_norm_relation() {
    let phi = symbol("17a1");
    let a_p = phi.curve.ap(3).unwrap();
    let t: Vec<_> = (0..=2).map(|n| theta(&phi, 3, n).unwrap().element).collect();
    let mut rng = crate::parallel::instance_rng(5, 0);
    use rand::Rng;
    for _ in 0..10 {
        let shape = t[2].shape();
        let e = rng.gen_range(0..shape.dim() as i64);
        let bump = shape.gamma_pow(e).scale(rng.gen_range(1..4));
        let bad = t[2].add(&bump).unwrap();
        assert!(!norm_relation(&bad, &t[1], &t[0], a_p).unwrap().holds);
    }
}

#[test]
fn stabilization_degenerate_input() {
    let phi = symbol("11a1");
    let t = theta(&phi, 3, 2).unwrap().reduce(4).unwrap();
    let zero = t.shape().at_layer(1).unwrap().zero();
    let one = PrecisionInteger::new(t.shape().residue_ring().unwrap(), 1);
    assert_eq!(p_stabilize(&t, &zero, &one).unwrap(), t);
    let p3 = PrecisionInteger::new(t.shape().residue_ring().unwrap(), 3);
    assert!(matches!(p_stabilize(&t, &zero, &p3), Err(Error::NotOrdinary(_))));
}

#[test]
fn ordinary_principality() {
    let phi = symbol("11a1");
    for k in [2, 4, 6] {
        let r = principality_check(&phi, 3, 1, k).unwrap();
        assert!(r.equal, "k={k}");
    }
    assert!(principality_check(&phi, 3, 2, 4).unwrap().equal);
    // The unit root solves its quadratic.
    let alpha = hensel_unit_root(phi.curve.ap(3).unwrap(), 3, 6).unwrap();
    let ring = alpha.ring();
    let a = alpha.value();
    assert_eq!(ring.add(ring.sub(ring.mul(a, a), ring.mul(ring.from_i64(-1), a)), 3), 0);
}

#[test]
fn unit_scaling_keeps_the_stabilized_ideal() {
    let phi = symbol("11a1");
    let k = 4;
    let alpha = hensel_unit_root(phi.curve.ap(3).unwrap(), 3, k).unwrap();
    let t1 = theta(&phi, 3, 1).unwrap().reduce(k).unwrap();
    let t0 = theta(&phi, 3, 0).unwrap().reduce(k).unwrap();
    let s = p_stabilize(&t1, &t0, &alpha).unwrap();
    let s5 = p_stabilize(&t1.scale(5), &t0.scale(5), &alpha).unwrap();
    assert_eq!(s.scale(5), s5);
    let shape = s.shape();
    assert_eq!(
        IdealLattice::from_generators(&shape, [s]).unwrap(),
        IdealLattice::from_generators(&shape, [s5]).unwrap()
    );
}

#[test]
fn supersingular_pm_extraction() {
    let phi = symbol("17a1");
    let thetas: Vec<_> = (0..=3).map(|n| theta(&phi, 3, n).unwrap()).collect();
    for n in 1..=3u32 {
        for k in 1..=6 {
            let t = &thetas[n as usize];
            let ext = pm_extract(&t.reduce(k).unwrap(), Some(t)).unwrap();
            assert!(ext.holds(), "n={n} k={k}: {ext:?}");
            let d = t.reduce(k).unwrap().shape().omega_tilde(ext.divisor_sign);
            assert_eq!(d.mul(&ext.quotient).unwrap(), t.reduce(k).unwrap());
        }
    }
    for n in [2u32, 3] {
        let r = cross_layer_check(&thetas[n as usize], &thetas[n as usize - 2]).unwrap();
        assert!(r.compatible, "n={n}");
        let ident = pm_ideal_identity(
            &thetas[n as usize].reduce(4).unwrap(),
            &thetas[n as usize - 1].reduce(4).unwrap(),
        )
        .unwrap();
        assert!(ident, "n={n}");
    }
}

#[test]
fn odd_layer_one_divides_by_one() {
    let phi = symbol("17a1");
    let t = theta(&phi, 3, 1).unwrap().reduce(4).unwrap();
    let ext = pm_extract(&t, None).unwrap();
    assert_eq!(ext.divisor_sign, Sign::Plus);
    assert!(t.shape().omega_tilde(Sign::Plus).is_one());
    assert_eq!(ext.quotient, t);
}

#[test]
fn perturbed_theta_is_not_divisible() {
    let phi = symbol("17a1");
    let t = theta(&phi, 3, 2).unwrap().reduce(4).unwrap();
    let bad = t.add(&t.shape().one()).unwrap();
    match pm_extract(&bad, None) {
        Err(Error::NotDivisible(d)) => {
            assert_eq!((d.p, d.n, d.k), (3, 2, 4));
            assert!(!d.divisor_ideal_lattice.is_empty());
        }
        other => panic!("expected NotDivisible, got {other:?}"),
    }
}

#[test]
fn kolyvagin_primes_match_direct_filter() {
    let curve = CurveData::named("17a1").unwrap();
    let got = kolyvagin_primes(&curve, 3, 500).unwrap();
    let brute: Vec<u64> = (2..=500u64)
        .filter(|&l| crate::arith::is_prime(l) && l != 3 && l != 17 && l % 3 == 1)
        .filter(|&l| {
            let a = curve.ap_naive(l, CountOrder::YThenX).unwrap();
            (a - l as i64 - 1).rem_euclid(3) == 0
        })
        .collect();
    assert_eq!(got, brute);
    assert!(!got.is_empty());
    assert!(got.iter().all(|&l| l % 3 == 1 && l != 17));
}

#[test]
fn delta_tilde_verdict_ignores_the_primitive_root() {
    let phi = symbol("17a1");
    let primes = kolyvagin_primes(&phi.curve, 3, 500).unwrap();
    for &ell in primes.iter().take(3) {
        let roots: Vec<u64> = crate::arith::primitive_roots(ell).take(4).collect();
        let values: Vec<u64> = roots
            .iter()
            .map(|&g| delta_tilde(&phi, 3, ell, &[(ell, g)]).unwrap().value)
            .collect();
        let zero = values[0] == 0;
        assert!(values.iter().all(|&v| (v == 0) == zero), "ell={ell} {values:?}");
    }
    assert!(matches!(delta_tilde(&phi, 3, 1, &[]), Err(Error::InvalidInput(_))));
    assert!(matches!(delta_tilde(&phi, 3, 5, &[]), Err(Error::NotKolyvagin { ell: 5 })));
}

#[test]
fn delta_tilde_brute_force() {
    // Direct sum with discrete logs found by search.
    let phi = symbol("17a1");
    let ell = kolyvagin_primes(&phi.curve, 3, 500).unwrap()[0];
    let g = primitive_root(ell);
    let mut total = BigInt::zero();
    for a in 1..ell {
        let log = (0..ell).find(|&e| pow_mod(g, e, ell) == a).unwrap();
        total += phi.eval_plus(a as i64, ell as i64) * BigInt::from(log);
    }
    let expect: u64 = total.mod_floor(&BigInt::from(3)).try_into().unwrap();
    assert_eq!(delta_tilde(&phi, 3, ell, &[]).unwrap().value, expect);
}

#[test]
fn weak_main_conjecture_membership() {
    let phi = symbol("17a1");
    let t = theta(&phi, 3, 2).unwrap().reduce(4).unwrap();
    let t1 = theta(&phi, 3, 1).unwrap().reduce(4).unwrap();
    let shape = t.shape();
    assert!(weak_mc_membership(&t, &IdealLattice::unit(&shape).unwrap()).unwrap());
    assert!(!t.is_zero());
    assert!(!weak_mc_membership(&t, &IdealLattice::zero(&shape).unwrap()).unwrap());
    assert!(weak_mc_membership(&t, &ideal_theta(&t, &t1).unwrap()).unwrap());
    let other = RingShape::modular(3, 2, 3).unwrap();
    assert!(matches!(
        weak_mc_membership(&t, &IdealLattice::unit(&other).unwrap()),
        Err(Error::ShapeMismatch(_))
    ));
}

#[test]
fn ideal_of_theta_with_zero_trace_term() {
    let phi = symbol("17a1");
    let t = theta(&phi, 3, 2).unwrap().reduce(4).unwrap();
    let zero = t.shape().at_layer(1).unwrap().zero();
    assert_eq!(
        ideal_theta(&t, &zero).unwrap(),
        IdealLattice::from_generators(&t.shape(), [t.clone()]).unwrap()
    );
}

#[test]
fn layers_agree_across_execution_modes() {
    let phi = symbol("11a1");
    let a = theta_layers(&phi, 3, 3, Execution::Sequential).unwrap();
    let b = theta_layers(&phi, 3, 3, Execution::Parallel).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.element, y.element);
    }
}

#[test]
fn delta_tilde_parity_pattern() {
    // Rank one: single Kolyvagin primes already give nonzero values, pairs vanish.
    let e37 = symbol("37a1");
    assert_eq!(delta_tilde(&e37, 3, 7, &[]).unwrap().value, 2);
    assert_eq!(delta_tilde(&e37, 3, 7 * 31, &[]).unwrap().value, 0);
    // Rank zero: the reverse.
    let e17 = symbol("17a1");
    assert_eq!(delta_tilde(&e17, 3, 19, &[]).unwrap().value, 0);
    assert_ne!(delta_tilde(&e17, 3, 19 * 61, &[]).unwrap().value, 0);
}
