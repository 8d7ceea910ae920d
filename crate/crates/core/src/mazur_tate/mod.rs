//! Mazur-Tate elements at finite layers and the checks built on them.
//!
//! `theta_n` is assembled from plus symbols `[a/p^{n+1}]^+`, one term per class
//! of `(Z/p^{n+1})^x / +-1`, with `sigma_a` sent to `gamma^{e(a)}` where
//! `<a> = (1+p)^{e(a)}` is the principal-unit part of `a`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{discrete_log, is_p_integral, is_prime, pow_mod, prime_factors, primitive_root, PrecisionInteger};
use crate::error::{Error, NotDivisibleDiagnostics, Result};
use crate::fitting::{solve_linear, IdealLattice};
use crate::group_ring::omega::{omega_pm_poly, omega_tilde_poly};
use crate::group_ring::{GroupRingElement, IntPoly, RingShape, Sign};
use crate::modsym::curve::MAX_COUNT_PRIME;
use crate::modsym::{CurveData, PlusEigenSymbol};
use crate::parallel::{map_indexed, Execution};

pub const GENERATOR: &str = "gamma = 1 + p, sigma_a -> gamma^e with <a> = (1+p)^e";
pub const SYMBOL_NORMALIZATION: &str = "plus symbol scaled so its path values generate Z; sign makes [0]^+ >= 0";
pub const NORM_RELATION: &str = "project(theta_n) = a_p theta_{n-1} - trace(theta_{n-2})";
pub const CLASS_SUM: &str = "one term per class of (Z/p^{n+1})^x / +-1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conventions {
    pub generator: &'static str,
    pub symbol_normalization: &'static str,
    pub norm_relation: &'static str,
    pub class_sum: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            generator: GENERATOR,
            symbol_normalization: SYMBOL_NORMALIZATION,
            norm_relation: NORM_RELATION,
            class_sum: CLASS_SUM,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MazurTateElement {
    pub label: String,
    pub p: u64,
    pub n: u32,
    /// Exact-rational mode.
    pub element: GroupRingElement,
    pub conventions: Conventions,
}

impl MazurTateElement {
    pub fn reduce(&self, k: u32) -> Result<GroupRingElement> {
        self.element.to_modular(k)
    }

    /// Integer coefficients in the `X`-power basis.
    pub fn int_poly(&self) -> IntPoly {
        to_int_poly(&self.element)
    }
}

fn to_int_poly(f: &GroupRingElement) -> IntPoly {
    IntPoly::new(
        f.rationals()
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "theta has integral coefficients");
                c.to_integer()
            })
            .collect(),
    )
}

fn check_prime(curve: &CurveData, p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    if curve.conductor % p == 0 {
        return Err(Error::BadPrime {
            p,
            conductor: curve.conductor,
        });
    }
    Ok(())
}

/// `e(a)` for every `a` in `[0, p^{n+1})` prime to `p`, indexed by `a`.
pub fn principal_unit_exponents(p: u64, n: u32) -> Vec<Option<u64>> {
    let m = p.pow(n + 1);
    let order = p.pow(n);
    let mut log = HashMap::with_capacity(order as usize);
    let mut g = 1u64;
    for e in 0..order {
        log.insert(g, e);
        g = g * (1 + p) % m;
    }
    (0..m)
        .map(|a| {
            if a % p == 0 {
                return None;
            }
            // omega(a) = a^{p^n} is the Teichmueller lift, <a> = a / omega(a).
            let teich = pow_mod(a, order, m);
            let inv = crate::arith::inv_mod(teich, m).expect("unit");
            let principal = (a as u128 * inv as u128 % m as u128) as u64;
            Some(log[&principal])
        })
        .collect()
}

pub fn theta(symbol: &PlusEigenSymbol, p: u64, n: u32) -> Result<MazurTateElement> {
    check_prime(&symbol.curve, p)?;
    let shape = RingShape::exact(p, n)?;
    let m = p.pow(n + 1);
    let exps = principal_unit_exponents(p, n);
    let mut t = vec![BigRational::zero(); shape.dim()];
    // m is odd, so a in [1, m/2] meets each class {a, -a} once; e(-a) = e(a).
    for a in 1..=m / 2 {
        if let Some(e) = exps[a as usize] {
            t[e as usize] += BigRational::from_integer(symbol.eval_plus(a as i64, m as i64));
        }
    }
    assert!(t.iter().all(|c| is_p_integral(c, p)), "theta coefficients are p-integral");
    Ok(MazurTateElement {
        label: symbol.curve.label.clone(),
        p,
        n,
        element: shape.from_group_coeffs_exact(t)?,
        conventions: Conventions::default(),
    })
}

/// `theta_0, ..., theta_{n_max}`, one layer per task.
pub fn theta_layers(symbol: &PlusEigenSymbol, p: u64, n_max: u32, exec: Execution) -> Result<Vec<MazurTateElement>> {
    map_indexed(exec, n_max as usize + 1, |n| theta(symbol, p, n as u32))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRelationReport {
    pub n: u32,
    pub a_p: i64,
    pub lhs: GroupRingElement,
    pub rhs: GroupRingElement,
    pub holds: bool,
}

/// Compares `project(theta_n)` with `a_p theta_{n-1} - trace(theta_{n-2})` exactly.
pub fn norm_relation(
    theta_n: &GroupRingElement,
    theta_prev: &GroupRingElement,
    theta_prev2: &GroupRingElement,
    a_p: i64,
) -> Result<NormRelationReport> {
    let n = theta_n.shape().n();
    if n < 2 || theta_prev.shape().n() + 1 != n || theta_prev2.shape().n() + 2 != n {
        return Err(Error::ShapeMismatch("norm relation needs layers n, n-1, n-2 with n >= 2".into()));
    }
    let lhs = theta_n.project(n - 1)?;
    let rhs = theta_prev.scale(a_p).sub(&theta_prev2.trace(n - 1)?)?;
    Ok(NormRelationReport {
        n,
        a_p,
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

pub fn norm_relation_check(symbol: &PlusEigenSymbol, p: u64, n: u32) -> Result<NormRelationReport> {
    if n < 2 {
        return Err(Error::LayerOutOfRange {
            requested: n as i64,
            available: 2,
        });
    }
    let a_p = symbol.curve.ap(p)?;
    let t: Vec<MazurTateElement> = (n - 2..=n).map(|m| theta(symbol, p, m)).collect::<Result<_>>()?;
    norm_relation(&t[2].element, &t[1].element, &t[0].element, a_p)
}

/// `alpha^{-n} (theta_n - alpha^{-1} trace(theta_{n-1}))` in `Lambda_{n,k}`.
pub fn p_stabilize(
    theta_n: &GroupRingElement,
    theta_prev: &GroupRingElement,
    alpha: &PrecisionInteger,
) -> Result<GroupRingElement> {
    let shape = theta_n.shape();
    let ring = shape.residue_ring()?;
    ring.check_same(&alpha.ring())?;
    let n = shape.n();
    if n == 0 || theta_prev.shape() != shape.at_layer(n - 1)? {
        return Err(Error::ShapeMismatch(format!(
            "p-stabilization needs theta_{{n-1}} over {}",
            shape.at_layer(n.saturating_sub(1))?
        )));
    }
    let inv = alpha
        .inverse()
        .map_err(|_| Error::NotOrdinary(alpha.value() as i64))?;
    let inner = theta_n.sub(&theta_prev.trace(n)?.scale_residue(inv.value())?)?;
    inner.scale_residue(ring.pow(inv.value(), n as u64))
}

/// The ideal `(theta_n, trace(theta_{n-1}))` of `Lambda_{n,k}`.
pub fn ideal_theta(theta_n: &GroupRingElement, theta_prev: &GroupRingElement) -> Result<IdealLattice> {
    let shape = theta_n.shape();
    let n = shape.n();
    if n == 0 {
        return IdealLattice::from_generators(&shape, [theta_n.clone()]);
    }
    IdealLattice::from_generators(&shape, [theta_n.clone(), theta_prev.trace(n)?])
}

#[derive(Debug, Clone, Serialize)]
pub struct PrincipalityReport {
    pub k: u32,
    pub alpha: u64,
    pub stabilized: GroupRingElement,
    pub ideal: crate::fitting::IdealReport,
    pub equal: bool,
}

/// `(theta_n, trace(theta_{n-1})) = (stabilized theta_n)` in `Lambda_{n,k}` for an ordinary curve.
pub fn principality_check(symbol: &PlusEigenSymbol, p: u64, n: u32, k: u32) -> Result<PrincipalityReport> {
    if n == 0 {
        return Err(Error::LayerOutOfRange {
            requested: 0,
            available: 1,
        });
    }
    let a_p = symbol.curve.ap(p)?;
    let alpha = crate::arith::hensel_unit_root(a_p, p, k)?;
    let t = theta(symbol, p, n)?.reduce(k)?;
    let t_prev = theta(symbol, p, n - 1)?.reduce(k)?;
    let stabilized = p_stabilize(&t, &t_prev, &alpha)?;
    let ideal = ideal_theta(&t, &t_prev)?;
    let principal = IdealLattice::from_generators(&t.shape(), [stabilized.clone()])?;
    Ok(PrincipalityReport {
        k,
        alpha: alpha.value(),
        stabilized,
        equal: ideal == principal,
        ideal: ideal.report(),
    })
}

/// `theta_n = omega~^sign_n q` in `Lambda_{n,k}`.
#[derive(Debug, Clone, Serialize)]
pub struct PmExtraction {
    pub n: u32,
    pub divisor_sign: Sign,
    pub quotient: GroupRingElement,
    /// Quotient of the integral division, reduced mod `p^k`.
    pub exact_quotient: GroupRingElement,
    /// Annihilator of the divisor mod `p^k` equals `(omega^{-sign}_n)`.
    pub annihilator_ok: bool,
    /// `quotient - exact_quotient` is killed by the divisor.
    pub quotients_agree: bool,
}

impl PmExtraction {
    pub fn holds(&self) -> bool {
        self.annihilator_ok && self.quotients_agree
    }
}

fn divisibility_error(theta: &GroupRingElement, divisor: &GroupRingElement, sign: Sign) -> Error {
    let shape = theta.shape();
    let rows = |f: &GroupRingElement| {
        IdealLattice::from_generators(&shape, [f.clone()])
            .map(|i| i.basis().rows().to_vec())
            .unwrap_or_default()
    };
    Error::NotDivisible(Box::new(NotDivisibleDiagnostics {
        p: shape.p(),
        n: shape.n(),
        k: shape.k().unwrap_or(0),
        divisor: format!("omega~^{}_{}", sign.symbol(), shape.n()),
        element: theta.residues().to_vec(),
        element_lattice: rows(theta),
        divisor_ideal_lattice: rows(divisor),
    }))
}

/// Divides `theta_n` (mod `p^k`) by `omega~^-_n` for even `n`, `omega~^+_n` for odd `n`.
///
/// `exact` is the integral `theta_n` when available; its exact quotient is
/// compared with the lattice solution.
pub fn pm_extract(theta_mod: &GroupRingElement, exact: Option<&MazurTateElement>) -> Result<PmExtraction> {
    let shape = theta_mod.shape();
    let n = shape.n();
    if n == 0 {
        return Err(Error::LayerOutOfRange {
            requested: 0,
            available: 1,
        });
    }
    let sign = Sign::theta_divisor(n);
    let divisor = shape.omega_tilde(sign);
    let sol = solve_linear(&shape, &[vec![divisor.clone()]], 1, &[theta_mod.clone()])?;
    let Some(mut q) = sol.particular else {
        return Err(divisibility_error(theta_mod, &divisor, sign));
    };
    let quotient = q.pop().expect("one unknown");

    let ann = sol.kernel;
    let expected = IdealLattice::from_generators(&shape, [shape.omega_pm(sign.opposite())])?;
    let annihilator_ok = ann.contains_lattice(expected.basis()) && expected.basis().contains_lattice(&ann);

    let exact_quotient = match exact {
        Some(t) => shape.from_int_poly(&exact_divide(t, sign)?),
        None => quotient.clone(),
    };
    let quotients_agree = ann.contains(quotient.sub(&exact_quotient)?.residues());
    Ok(PmExtraction {
        n,
        divisor_sign: sign,
        quotient,
        exact_quotient,
        annihilator_ok,
        quotients_agree,
    })
}

/// `theta_n / omega~^sign_n` as integer polynomials, reduced mod `omega^{-sign}_n`.
pub fn exact_divide(theta: &MazurTateElement, sign: Sign) -> Result<IntPoly> {
    let (p, n) = (theta.p, theta.n);
    let (q, r) = theta.int_poly().divrem_monic(&omega_tilde_poly(p, n, sign));
    if !r.is_zero() {
        let shape = RingShape::modular(p, n, 1)?;
        return Err(divisibility_error(
            &theta.reduce(1)?,
            &shape.omega_tilde(sign),
            sign,
        ));
    }
    Ok(q.divrem_monic(&omega_pm_poly(p, n, sign.opposite())).1)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossLayerReport {
    pub n: u32,
    /// `project(q_n) + q_{n-2}` is divisible by `omega^{-sign}_{n-2}` (exact integers).
    pub compatible: bool,
}

/// For `a_p = 0`: `project(q_n) = -q_{n-2}` modulo `omega^{-sign}_{n-2}`.
pub fn cross_layer_check(theta_n: &MazurTateElement, theta_prev2: &MazurTateElement) -> Result<CrossLayerReport> {
    let (p, n) = (theta_n.p, theta_n.n);
    if n < 2 || theta_prev2.n + 2 != n || theta_prev2.p != p {
        return Err(Error::ShapeMismatch("cross-layer check needs layers n and n-2".into()));
    }
    let sign = Sign::theta_divisor(n);
    let q_n = exact_divide(theta_n, sign)?;
    let low = RingShape::exact(p, n - 2)?;
    let q_low = if n == 2 {
        // omega~_0 = 1 and omega_0 = 0 in Lambda_0, so q_0 is theta_0 itself.
        theta_prev2.int_poly()
    } else {
        exact_divide(theta_prev2, sign)?
    };
    let sum = low
        .from_int_poly(&q_n)
        .add(&low.from_int_poly(&q_low))?;
    let rem = to_int_poly(&sum).divrem_monic(&omega_pm_poly(p, n - 2, sign.opposite())).1;
    Ok(CrossLayerReport {
        n,
        compatible: rem.is_zero(),
    })
}

/// `(theta_n, trace(theta_{n-1})) = (omega~^{s}_n q_n, trace(omega~^{-s}_{n-1} q_{n-1}))`.
pub fn pm_ideal_identity(theta_n: &GroupRingElement, theta_prev: &GroupRingElement) -> Result<bool> {
    let shape = theta_n.shape();
    let n = shape.n();
    if n < 2 {
        return Err(Error::LayerOutOfRange {
            requested: n as i64,
            available: 2,
        });
    }
    let q_n = pm_extract(theta_n, None)?;
    let q_prev = pm_extract(theta_prev, None)?;
    let prev_shape = theta_prev.shape();
    let g1 = shape.omega_tilde(q_n.divisor_sign).mul(&q_n.quotient)?;
    let g2 = prev_shape
        .omega_tilde(q_prev.divisor_sign)
        .mul(&q_prev.quotient)?
        .trace(n)?;
    Ok(ideal_theta(theta_n, theta_prev)? == IdealLattice::from_generators(&shape, [g1, g2])?)
}

/// Primes `ell <= bound` with `ell` prime to `Np`, `ell = 1` and `a_ell = ell + 1` mod `p`.
pub fn kolyvagin_primes(curve: &CurveData, p: u64, bound: u64) -> Result<Vec<u64>> {
    if bound >= MAX_COUNT_PRIME {
        return Err(Error::PrimeTooLarge(bound));
    }
    let mut out = Vec::new();
    for ell in curve.good_primes(bound) {
        if ell == p || ell % p != 1 {
            continue;
        }
        if (curve.ap(ell)? - ell as i64 - 1).rem_euclid(p as i64) == 0 {
            out.push(ell);
        }
    }
    Ok(out)
}

pub fn is_kolyvagin(curve: &CurveData, p: u64, ell: u64) -> Result<bool> {
    if !is_prime(ell) || ell == p || curve.conductor % ell == 0 || ell % p != 1 {
        return Ok(false);
    }
    match curve.ap(ell) {
        Ok(a) => Ok((a - ell as i64 - 1).rem_euclid(p as i64) == 0),
        Err(Error::BadReduction(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaTilde {
    pub p: u64,
    pub n: u64,
    /// `(ell, primitive root)` per prime factor.
    pub roots: Vec<(u64, u64)>,
    pub value: u64,
}

/// `sum_{a in (Z/n)^x} [a/n]^+ prod_{ell | n} log_ell(a)` in `F_p`.
///
/// `roots` overrides the primitive root for some primes; the others use the smallest one.
pub fn delta_tilde(symbol: &PlusEigenSymbol, p: u64, n: u64, roots: &[(u64, u64)]) -> Result<DeltaTilde> {
    if n <= 1 {
        return Err(Error::InvalidInput(
            "delta~ needs a nonempty product of Kolyvagin primes".into(),
        ));
    }
    let primes = prime_factors(n);
    if primes.iter().product::<u64>() != n {
        return Err(Error::InvalidInput(format!("{n} is not squarefree")));
    }
    let mut chosen = Vec::with_capacity(primes.len());
    for &ell in &primes {
        if !is_kolyvagin(&symbol.curve, p, ell)? {
            return Err(Error::NotKolyvagin { ell });
        }
        let g = roots
            .iter()
            .find(|(l, _)| *l == ell)
            .map_or_else(|| primitive_root(ell), |&(_, g)| g);
        chosen.push((ell, g));
    }
    // Log tables mod p, one per prime.
    let logs: Vec<Vec<u64>> = chosen
        .iter()
        .map(|&(ell, g)| {
            discrete_log(ell, g, 1)?;
            let mut table = vec![0u64; ell as usize];
            let mut acc = 1u64;
            for e in 0..ell - 1 {
                table[acc as usize] = e % p;
                acc = acc * g % ell;
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    let pb = BigInt::from(p);
    let mut total = 0u64;
    for a in 1..n {
        if a.gcd(&n) != 1 {
            continue;
        }
        let weight = chosen
            .iter()
            .zip(&logs)
            .fold(1u64, |w, (&(ell, _), t)| w * t[(a % ell) as usize] % p);
        if weight == 0 {
            continue;
        }
        let v = symbol.eval_plus(a as i64, n as i64).mod_floor(&pb);
        let v: u64 = v.try_into().expect("reduced mod p");
        total = (total + v * weight) % p;
    }
    Ok(DeltaTilde {
        p,
        n,
        roots: chosen,
        value: total,
    })
}

/// `theta` lies in a user-supplied ideal (e.g. a Selmer Fitting ideal).
pub fn weak_mc_membership(theta_mod: &GroupRingElement, ideal: &IdealLattice) -> Result<bool> {
    if theta_mod.shape() != ideal.shape() {
        return Err(Error::ShapeMismatch(format!(
            "theta over {} but the ideal lives in {}",
            theta_mod.shape(),
            ideal.shape()
        )));
    }
    ideal.contains(theta_mod)
}

#[cfg(test)]
mod tests;
