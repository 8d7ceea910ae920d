//! Ambient polynomials for the omega/Phi calculus.
//!
//! [`IntPoly`] is a dense integer polynomial in `X`. [`GroupPoly`] is a sparse
//! integer polynomial in the group variable `T = 1 + X`; the substitution
//! `X = T - 1` is a ring isomorphism `Z[X] -> Z[T]`, and in `T` every
//! omega-type polynomial has few terms, so large-degree identities are cheap
//! to verify exactly there.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::bigint_binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Whether `Phi_m` belongs to the product for this sign (even `m` for plus, odd for minus).
    pub fn includes(self, m: u32) -> bool {
        match self {
            Sign::Plus => m % 2 == 0,
            Sign::Minus => m % 2 == 1,
        }
    }

    /// The sign whose `omega~` divides theta_n: minus for even `n`, plus for odd `n`.
    pub fn theta_divisor(n: u32) -> Sign {
        if n % 2 == 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(format!("unknown sign {s:?}")),
        }
    }
}

/// Dense polynomial in `X` with integer coefficients, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `(1 + X)^e`.
    pub fn gamma_power(e: u64) -> Self {
        Self::new((0..=e).map(|i| bigint_binomial(e, i)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_default() + other.0.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_default() - other.0.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(out)
    }

    /// Division by a monic polynomial: returns `(quotient, remainder)`.
    pub fn divrem_monic(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("nonzero divisor");
        assert!(divisor.0[d].is_one(), "divisor must be monic");
        let mut rem = self.0.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for top in (d..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[top]);
            if lead.is_zero() {
                continue;
            }
            for (i, c) in divisor.0[..d].iter().enumerate() {
                if !c.is_zero() {
                    rem[top - d + i] -= &lead * c;
                }
            }
            quot[top - d] = lead;
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// `omega_n = (1 + X)^{p^n} - 1`.
pub fn omega_poly(p: u64, n: u32) -> IntPoly {
    IntPoly::gamma_power(p.pow(n)).sub(&IntPoly::one())
}

/// `Phi_m(1 + X) = sum_{j<p} (1 + X)^{j p^{m-1}}` for `m >= 1`.
pub fn cyclo_poly(p: u64, m: u32) -> IntPoly {
    assert!(m >= 1, "Phi_m needs m >= 1");
    let step = p.pow(m - 1);
    (0..p).fold(IntPoly::zero(), |acc, j| acc.add(&IntPoly::gamma_power(j * step)))
}

/// `omega~^sign_n`: product of `Phi_m(1+X)` over `1 <= m <= n` of the sign's parity.
pub fn omega_tilde_poly(p: u64, n: u32, sign: Sign) -> IntPoly {
    (1..=n)
        .filter(|&m| sign.includes(m))
        .fold(IntPoly::one(), |acc, m| acc.mul(&cyclo_poly(p, m)))
}

/// `omega^sign_n = X * omega~^sign_n`.
pub fn omega_pm_poly(p: u64, n: u32, sign: Sign) -> IntPoly {
    IntPoly::x().mul(&omega_tilde_poly(p, n, sign))
}

/// Sparse integer polynomial in `T = 1 + X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupPoly(BTreeMap<u64, BigInt>);

impl GroupPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = (u64, i64)>) -> Self {
        let mut out = Self::default();
        for (e, c) in terms {
            out.add_term(e, &BigInt::from(c));
        }
        out
    }

    fn add_term(&mut self, e: u64, c: &BigInt) {
        let entry = self.0.entry(e).or_default();
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn one() -> Self {
        Self::from_terms([(0, 1)])
    }

    /// `X = T - 1`.
    pub fn x() -> Self {
        Self::from_terms([(1, 1), (0, -1)])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &BigInt)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.0.keys().next_back().copied()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.0 {
            out.add_term(e, &-c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&a, ca) in &self.0 {
            for (&b, cb) in &other.0 {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }

    /// Division by a monic sparse polynomial.
    pub fn divrem_monic(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("nonzero divisor");
        assert!(divisor.0[&d].is_one(), "divisor must be monic");
        let mut rem = self.clone();
        let mut quot = Self::default();
        while let Some(top) = rem.degree().filter(|&t| t >= d) {
            let lead = rem.0[&top].clone();
            let shift = top - d;
            quot.add_term(shift, &lead);
            for (&e, c) in &divisor.0 {
                rem.add_term(e + shift, &-(&lead * c));
            }
        }
        (quot, rem)
    }

    /// Expands into the `X` basis; only sensible for modest degrees.
    pub fn to_x_basis(&self) -> IntPoly {
        self.0.iter().fold(IntPoly::zero(), |acc, (&e, c)| {
            acc.add(&IntPoly::gamma_power(e).mul(&IntPoly::new(vec![c.clone()])))
        })
    }
}

pub fn omega_group(p: u64, n: u32) -> GroupPoly {
    GroupPoly::from_terms([(p.pow(n), 1), (0, -1)])
}

pub fn cyclo_group(p: u64, m: u32) -> GroupPoly {
    assert!(m >= 1, "Phi_m needs m >= 1");
    let step = p.pow(m - 1);
    GroupPoly::from_terms((0..p).map(|j| (j * step, 1)))
}

pub fn omega_tilde_group(p: u64, n: u32, sign: Sign) -> GroupPoly {
    (1..=n)
        .filter(|&m| sign.includes(m))
        .fold(GroupPoly::one(), |acc, m| acc.mul(&cyclo_group(p, m)))
}

pub fn omega_pm_group(p: u64, n: u32, sign: Sign) -> GroupPoly {
    GroupPoly::x().mul(&omega_tilde_group(p, n, sign))
}
