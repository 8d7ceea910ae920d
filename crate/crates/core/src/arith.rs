//! Scalar arithmetic: residues modulo `p^k`, cyclotomic character targets,
//! small prime fields, Hensel lifting and discrete logarithms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let eg = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return None;
    }
    Some(eg.x.rem_euclid(m as i128) as u64)
}

/// The residue ring `Z/p^k` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePowerRing {
    p: u64,
    k: u32,
    modulus: u64,
}

impl PrimePowerRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidPrecision(k));
        }
        let modulus = p
            .checked_pow(k)
            .filter(|&m| m < (1u64 << 62))
            .ok_or(Error::InvalidPrecision(k))?;
        Ok(Self { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::PrecisionMismatch {
                p1: self.p,
                k1: self.k,
                p2: other.p,
                k2: other.k,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.modulus)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        a.mod_floor(&BigInt::from(self.modulus)).to_u64().unwrap()
    }

    /// Reduction of a `p`-integral rational.
    pub fn from_rational(&self, r: &BigRational) -> Result<u64> {
        let den = self.from_bigint(r.denom());
        let inv = self
            .inv(den)
            .ok_or_else(|| Error::NotPIntegral(r.to_string()))?;
        Ok(self.mul(self.from_bigint(r.numer()), inv))
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            inv_mod(a, self.modulus)
        }
    }

    /// `p`-adic valuation capped at `k` (so `valuation(0) == k`).
    pub fn valuation(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn p_pow(&self, v: u32) -> u64 {
        if v >= self.k {
            0
        } else {
            self.p.pow(v)
        }
    }

    /// Writes nonzero `a` as `p^v * u` and returns `(v, u)` with `u` a unit.
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.valuation(a);
        let mut u = a;
        for _ in 0..v {
            u /= self.p;
        }
        (v, u % self.modulus)
    }

    /// Signed representative in `(-p^k/2, p^k/2]`, handy for display.
    pub fn centered(&self, a: u64) -> i64 {
        if a > self.modulus / 2 {
            a as i64 - self.modulus as i64
        } else {
            a as i64
        }
    }
}

/// An element of `Z/p^k` carrying its precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionInteger {
    ring: PrimePowerRing,
    value: u64,
}

impl PrecisionInteger {
    pub fn new(ring: PrimePowerRing, value: i64) -> Self {
        Self {
            ring,
            value: ring.from_i64(value),
        }
    }

    pub fn from_residue(ring: PrimePowerRing, value: u64) -> Self {
        Self {
            ring,
            value: value % ring.modulus(),
        }
    }

    pub fn ring(&self) -> PrimePowerRing {
        self.ring
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.ring.p() != 0
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        Ok(Self::from_residue(self.ring, self.ring.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        Ok(Self::from_residue(self.ring, self.ring.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        Ok(Self::from_residue(self.ring, self.ring.mul(self.value, other.value)))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.ring
            .inv(self.value)
            .map(|v| Self::from_residue(self.ring, v))
            .ok_or(Error::NotUnit {
                a: self.value.to_string(),
                modulus: self.ring.modulus(),
            })
    }
}

/// The unit root of `x^2 - a_p x + p` in `Z/p^k`, i.e. the root congruent to `a_p` mod `p`.
pub fn hensel_unit_root(a_p: i64, p: u64, k: u32) -> Result<PrecisionInteger> {
    let ring = PrimePowerRing::new(p, k)?;
    if a_p.rem_euclid(p as i64) == 0 {
        return Err(Error::NotOrdinary(a_p));
    }
    let a = ring.from_i64(a_p);
    let pp = p % ring.modulus();
    let f = |x: u64| ring.add(ring.sub(ring.mul(x, x), ring.mul(a, x)), pp);
    // f'(x) = 2x - a is a unit along the whole lift since x = a (mod p).
    let mut x = a % p;
    for _ in 0..k {
        let deriv = ring.sub(ring.mul(2, x), a);
        let inv = ring.inv(deriv).expect("derivative is a unit at the unit root");
        x = ring.sub(x, ring.mul(f(x), inv));
    }
    debug_assert_eq!(f(x), 0);
    Ok(PrecisionInteger::from_residue(ring, x))
}

pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    if !is_prime(ell) || g % ell == 0 {
        return false;
    }
    if ell == 2 {
        return g % 2 == 1;
    }
    prime_factors(ell - 1)
        .into_iter()
        .all(|q| pow_mod(g, (ell - 1) / q, ell) != 1)
}

/// Smallest primitive root modulo the prime `ell`.
pub fn primitive_root(ell: u64) -> u64 {
    (1..ell)
        .find(|&g| is_primitive_root(g, ell))
        .expect("every prime has a primitive root")
}

/// Primitive roots modulo `ell` in increasing order.
pub fn primitive_roots(ell: u64) -> impl Iterator<Item = u64> {
    (1..ell).filter(move |&g| is_primitive_root(g, ell))
}

/// Exponent `e` in `[0, ell - 1)` with `g^e = a (mod ell)`, by exhaustive search.
pub fn discrete_log(ell: u64, g: u64, a: i64) -> Result<u64> {
    if !is_primitive_root(g, ell) {
        return Err(Error::NotPrimitiveRoot { g, modulus: ell });
    }
    let a = a.rem_euclid(ell as i64) as u64;
    if a == 0 {
        return Err(Error::NotUnit {
            a: a.to_string(),
            modulus: ell,
        });
    }
    let mut acc = 1u64;
    for e in 0..ell - 1 {
        if acc == a {
            return Ok(e);
        }
        acc = acc * g % ell;
    }
    unreachable!("a primitive root generates every unit")
}

pub fn rational_to_precision(r: &BigRational, p: u64, k: u32) -> Result<PrecisionInteger> {
    let ring = PrimePowerRing::new(p, k)?;
    Ok(PrecisionInteger::from_residue(ring, ring.from_rational(r)?))
}

/// `p`-adic valuation of a nonzero rational; `None` for zero.
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |x: &BigInt| {
        let mut x = x.abs();
        let mut v = 0i64;
        while (&x % &pb).is_zero() {
            x /= &pb;
            v += 1;
        }
        v
    };
    Some(count(r.numer()) - count(r.denom()))
}

pub fn is_p_integral(r: &BigRational, p: u64) -> bool {
    rational_valuation(r, p).map_or(true, |v| v >= 0)
}

/// An element of `F_ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeFieldElement {
    ell: u64,
    value: u64,
}

impl PrimeFieldElement {
    pub fn new(ell: u64, value: i64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidInput(format!("{ell} is not prime")));
        }
        Ok(Self {
            ell,
            value: value.rem_euclid(ell as i64) as u64,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.ell
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ell, other.ell);
        Self {
            ell: self.ell,
            value: (self.value + other.value) % self.ell,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ell, other.ell);
        Self {
            ell: self.ell,
            value: ((self.value as u128 * other.value as u128) % self.ell as u128) as u64,
        }
    }
}

/// `(Z/p^k)[Y] / Phi_{p^m}(Y)`, the target of a character of order `p^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicRing {
    base: PrimePowerRing,
    m: u32,
}

impl CyclotomicRing {
    pub fn new(base: PrimePowerRing, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput(
                "cyclotomic ring needs order exponent m >= 1".into(),
            ));
        }
        Ok(Self { base, m })
    }

    pub fn base(&self) -> PrimePowerRing {
        self.base
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `phi(p^m) = p^(m-1) (p-1)`.
    pub fn degree(&self) -> usize {
        let p = self.base.p() as usize;
        p.pow(self.m - 1) * (p - 1)
    }

    fn step(&self) -> usize {
        (self.base.p() as usize).pow(self.m - 1)
    }

    pub fn zero(&self) -> CyclotomicElement {
        CyclotomicElement {
            ring: *self,
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn from_scalar(&self, c: u64) -> CyclotomicElement {
        let mut e = self.zero();
        e.coeffs[0] = c % self.base.modulus();
        e
    }

    /// The distinguished primitive `p^m`-th root of unity: the class of `Y`.
    pub fn root(&self) -> CyclotomicElement {
        self.from_poly(&[0, 1])
    }

    /// Reduces an arbitrary polynomial in `Y` modulo `Phi_{p^m}(Y)`.
    pub fn from_poly(&self, poly: &[u64]) -> CyclotomicElement {
        let ring = self.base;
        let deg = self.degree();
        let step = self.step();
        let mut c: Vec<u64> = poly.iter().map(|&x| x % ring.modulus()).collect();
        c.resize(c.len().max(deg), 0);
        // Phi_{p^m}(Y) = sum_{j<p} Y^{j p^{m-1}}, monic of degree deg.
        for top in (deg..c.len()).rev() {
            let lead = c[top];
            if lead == 0 {
                continue;
            }
            let shift = top - deg;
            for j in 0..(ring.p() as usize) {
                let idx = shift + j * step;
                c[idx] = ring.sub(c[idx], lead);
            }
            debug_assert_eq!(c[top], 0);
        }
        c.truncate(deg);
        CyclotomicElement {
            ring: *self,
            coeffs: c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicElement {
    ring: CyclotomicRing,
    coeffs: Vec<u64>,
}

impl CyclotomicElement {
    pub fn ring(&self) -> CyclotomicRing {
        self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring.base;
        Ok(Self {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| r.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring.base;
        Ok(Self {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| r.sub(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring.base;
        let mut prod = vec![0u64; self.coeffs.len() + other.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = r.add(prod[i + j], r.mul(a, b));
            }
        }
        Ok(self.ring.from_poly(&prod))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::ShapeMismatch(format!(
                "cyclotomic rings {:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }
}

pub fn bigint_binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
