//! The finite-level group rings `Lambda_n = Z_p[Z/p^n]`, identified with
//! `Z_p[X] / ((1+X)^{p^n} - 1)` by sending the fixed generator to `1 + X`.
//!
//! Two coefficient modes are supported: exact rationals (`Q[X]/(omega_n)`),
//! used for Mazur-Tate elements, and residues modulo `p^k` (`Lambda_{n,k}`),
//! used for all ideal-theoretic work. Elements are stored in the `X`-power
//! basis, coefficient of `X^i` at index `i`.

pub mod omega;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{CyclotomicElement, CyclotomicRing, PrecisionInteger, PrimePowerRing};
use crate::error::{Error, Result};
use crate::fitting::IdealLattice;

pub use omega::{IntPoly, Sign};

/// Largest supported `p^n`.
pub const MAX_DIMENSION: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffMode {
    Exact,
    Modular(PrimePowerRing),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingShape {
    p: u64,
    n: u32,
    mode: CoeffMode,
}

impl RingShape {
    pub fn exact(p: u64, n: u32) -> Result<Self> {
        // Validates p through the residue ring constructor.
        PrimePowerRing::new(p, 1)?;
        Self::check_dim(p, n)?;
        Ok(Self {
            p,
            n,
            mode: CoeffMode::Exact,
        })
    }

    pub fn modular(p: u64, n: u32, k: u32) -> Result<Self> {
        let ring = PrimePowerRing::new(p, k)?;
        Self::check_dim(p, n)?;
        Ok(Self {
            p,
            n,
            mode: CoeffMode::Modular(ring),
        })
    }

    fn check_dim(p: u64, n: u32) -> Result<()> {
        match p.checked_pow(n) {
            Some(d) if d <= MAX_DIMENSION => Ok(()),
            _ => Err(Error::LayerOutOfRange {
                requested: n as i64,
                available: (MAX_DIMENSION as f64).log(p as f64) as u32,
            }),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mode(&self) -> CoeffMode {
        self.mode
    }

    pub fn k(&self) -> Option<u32> {
        match self.mode {
            CoeffMode::Exact => None,
            CoeffMode::Modular(r) => Some(r.k()),
        }
    }

    /// Rank over the coefficient ring, `p^n`.
    pub fn dim(&self) -> usize {
        self.p.pow(self.n) as usize
    }

    pub fn residue_ring(&self) -> Result<PrimePowerRing> {
        match self.mode {
            CoeffMode::Exact => Err(Error::ExactModeUnsupported),
            CoeffMode::Modular(r) => Ok(r),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, CoeffMode::Exact)
    }

    pub fn at_layer(&self, n: u32) -> Result<Self> {
        Self::check_dim(self.p, n)?;
        Ok(Self { n, ..*self })
    }

    pub fn with_precision(&self, k: u32) -> Result<Self> {
        Self::modular(self.p, self.n, k)
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("{self} vs {other}")))
        }
    }

    pub fn zero(&self) -> GroupRingElement {
        let d = self.dim();
        let data = match self.mode {
            CoeffMode::Exact => Coeffs::Exact(vec![BigRational::zero(); d]),
            CoeffMode::Modular(_) => Coeffs::Residue(vec![0; d]),
        };
        GroupRingElement { shape: *self, data }
    }

    pub fn one(&self) -> GroupRingElement {
        self.scalar(1)
    }

    pub fn scalar(&self, c: i64) -> GroupRingElement {
        let mut e = self.zero();
        match &mut e.data {
            Coeffs::Exact(v) => v[0] = BigRational::from_integer(c.into()),
            Coeffs::Residue(v) => v[0] = self.residue_ring().unwrap().from_i64(c),
        }
        e
    }

    /// The class of `X` (zero at layer 0, where `omega_0 = X`).
    pub fn x(&self) -> GroupRingElement {
        self.from_int_poly(&IntPoly::x())
    }

    /// `(1 + X)^e`, the image of the `e`-th power of the fixed generator.
    pub fn gamma_pow(&self, e: i64) -> GroupRingElement {
        let d = self.dim() as i64;
        self.from_int_poly(&IntPoly::gamma_power(e.rem_euclid(d) as u64))
    }

    /// Reduces an ambient integer polynomial into this ring.
    pub fn from_int_poly(&self, poly: &IntPoly) -> GroupRingElement {
        match self.mode {
            CoeffMode::Exact => {
                let v = poly
                    .coeffs()
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect();
                self.reduce_exact(v)
            }
            CoeffMode::Modular(r) => {
                let v = poly.coeffs().iter().map(|c| r.from_bigint(c)).collect();
                self.reduce_residue(v)
            }
        }
    }

    pub fn from_residues(&self, coeffs: Vec<u64>) -> Result<GroupRingElement> {
        let r = self.residue_ring()?;
        if coeffs.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        Ok(GroupRingElement {
            shape: *self,
            data: Coeffs::Residue(coeffs.into_iter().map(|c| c % r.modulus()).collect()),
        })
    }

    pub fn from_rationals(&self, coeffs: Vec<BigRational>) -> Result<GroupRingElement> {
        if !self.is_exact() {
            return Err(Error::ShapeMismatch("exact coefficients for a mod-p^k shape".into()));
        }
        if coeffs.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        Ok(GroupRingElement {
            shape: *self,
            data: Coeffs::Exact(coeffs),
        })
    }

    /// Builds an element from its coefficients in the group basis `{(1+X)^e}`.
    pub fn from_group_coeffs_residue(&self, t: Vec<u64>) -> Result<GroupRingElement> {
        let r = self.residue_ring()?;
        Ok(GroupRingElement {
            shape: *self,
            data: Coeffs::Residue(group_to_x(&r, &t)),
        })
    }

    pub fn from_group_coeffs_exact(&self, t: Vec<BigRational>) -> Result<GroupRingElement> {
        if !self.is_exact() {
            return Err(Error::ShapeMismatch("exact coefficients for a mod-p^k shape".into()));
        }
        Ok(GroupRingElement {
            shape: *self,
            data: Coeffs::Exact(group_to_x(&ExactField, &t)),
        })
    }

    fn reduce_exact(&self, v: Vec<BigRational>) -> GroupRingElement {
        let tail = exact_tail(self.p, self.n);
        GroupRingElement {
            shape: *self,
            data: Coeffs::Exact(reduce_mod_omega(&ExactField, v, &tail, self.dim())),
        }
    }

    fn reduce_residue(&self, v: Vec<u64>) -> GroupRingElement {
        let r = self.residue_ring().unwrap();
        let tail = residue_tail(r, self.n);
        GroupRingElement {
            shape: *self,
            data: Coeffs::Residue(reduce_mod_omega(&r, v, &tail, self.dim())),
        }
    }

    /// `omega_n` itself is zero here; this returns the ambient polynomial.
    pub fn omega(&self) -> IntPoly {
        omega::omega_poly(self.p, self.n)
    }

    /// `Phi_m(1+X)` reduced into this layer, `1 <= m <= n`.
    pub fn cyclo_shift(&self, m: u32) -> Result<GroupRingElement> {
        if m < 1 || m > self.n {
            return Err(Error::LayerOutOfRange {
                requested: m as i64,
                available: self.n,
            });
        }
        Ok(self.from_int_poly(&omega::cyclo_poly(self.p, m)))
    }

    pub fn omega_pm(&self, sign: Sign) -> GroupRingElement {
        self.from_int_poly(&omega::omega_pm_poly(self.p, self.n, sign))
    }

    pub fn omega_tilde(&self, sign: Sign) -> GroupRingElement {
        self.from_int_poly(&omega::omega_tilde_poly(self.p, self.n, sign))
    }

    /// `c^sign = prod (1+X)^{-p^{m-1}(p-1)}` over the `m <= n` of the sign's parity.
    pub fn involution_factor(&self, sign: Sign) -> GroupRingElement {
        let exp: i64 = (1..=self.n)
            .filter(|&m| sign.includes(m))
            .map(|m| (self.p.pow(m - 1) * (self.p - 1)) as i64)
            .sum();
        self.gamma_pow(-exp)
    }

    /// The trace `nu_{m,n}` as multiplication by `prod_{m<j<=n} Phi_j(1+X)`.
    fn trace_factor(&self, from: u32) -> GroupRingElement {
        (from + 1..=self.n).fold(self.one(), |acc, j| {
            acc.mul(&self.cyclo_shift(j).unwrap()).unwrap()
        })
    }
}

impl fmt::Display for RingShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            CoeffMode::Exact => write!(f, "Q[Lambda_{}] (p={})", self.n, self.p),
            CoeffMode::Modular(r) => write!(f, "Lambda_{{{},{}}} (p={})", self.n, r.k(), self.p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Coeffs {
    Exact(Vec<BigRational>),
    Residue(Vec<u64>),
}

/// An element of `Lambda_{n,k}` or of `Q[X]/(omega_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    shape: RingShape,
    data: Coeffs,
}

impl GroupRingElement {
    pub fn shape(&self) -> RingShape {
        self.shape
    }

    /// Residue coefficients; panics in exact mode.
    pub fn residues(&self) -> &[u64] {
        match &self.data {
            Coeffs::Residue(v) => v,
            Coeffs::Exact(_) => panic!("residues() on an exact element"),
        }
    }

    /// Rational coefficients; panics in mod-p^k mode.
    pub fn rationals(&self) -> &[BigRational] {
        match &self.data {
            Coeffs::Exact(v) => v,
            Coeffs::Residue(_) => panic!("rationals() on a residue element"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Coeffs::Exact(v) => v.iter().all(|c| c.is_zero()),
            Coeffs::Residue(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.shape.one()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |r, a, b| r.add(a, b), |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |r, a, b| r.sub(a, b), |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|r, a| r.neg(a), |a| -a)
    }

    pub fn scale(&self, c: i64) -> Self {
        self.map(
            |r, a| r.mul(a, r.from_i64(c)),
            |a| a * BigRational::from_integer(c.into()),
        )
    }

    pub fn scale_residue(&self, c: u64) -> Result<Self> {
        self.shape.residue_ring()?;
        Ok(self.map(|r, a| r.mul(a, c % r.modulus()), |a| a.clone()))
    }

    pub fn scale_rational(&self, c: &BigRational) -> Result<Self> {
        match &self.data {
            Coeffs::Exact(v) => Ok(Self {
                shape: self.shape,
                data: Coeffs::Exact(v.iter().map(|a| a * c).collect()),
            }),
            Coeffs::Residue(v) => {
                let r = self.shape.residue_ring()?;
                let c = r.from_rational(c)?;
                Ok(Self {
                    shape: self.shape,
                    data: Coeffs::Residue(v.iter().map(|&a| r.mul(a, c)).collect()),
                })
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        let d = self.shape.dim();
        Ok(match (&self.data, &other.data) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                let prod = poly_mul(&ExactField, a, b);
                let tail = exact_tail(self.shape.p, self.shape.n);
                Self {
                    shape: self.shape,
                    data: Coeffs::Exact(reduce_mod_omega(&ExactField, prod, &tail, d)),
                }
            }
            (Coeffs::Residue(a), Coeffs::Residue(b)) => {
                let r = self.shape.residue_ring()?;
                let prod = poly_mul(&r, a, b);
                let tail = residue_tail(r, self.shape.n);
                Self {
                    shape: self.shape,
                    data: Coeffs::Residue(reduce_mod_omega(&r, prod, &tail, d)),
                }
            }
            _ => unreachable!("shape equality fixes the coefficient mode"),
        })
    }

    /// Multiplication by `X`, cheaper than a general product.
    pub fn mul_x(&self) -> Self {
        let d = self.shape.dim();
        match &self.data {
            Coeffs::Exact(v) => {
                let mut w = Vec::with_capacity(d + 1);
                w.push(BigRational::zero());
                w.extend_from_slice(v);
                let tail = exact_tail(self.shape.p, self.shape.n);
                Self {
                    shape: self.shape,
                    data: Coeffs::Exact(reduce_mod_omega(&ExactField, w, &tail, d)),
                }
            }
            Coeffs::Residue(v) => {
                let r = self.shape.residue_ring().unwrap();
                let mut w = Vec::with_capacity(d + 1);
                w.push(0);
                w.extend_from_slice(v);
                let tail = residue_tail(r, self.shape.n);
                Self {
                    shape: self.shape,
                    data: Coeffs::Residue(reduce_mod_omega(&r, w, &tail, d)),
                }
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.shape.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// `f(0)`: the constant term, equivalently the sum of the group-basis coefficients.
    pub fn constant_term(&self) -> Coefficient {
        match &self.data {
            Coeffs::Exact(v) => Coefficient::Rational(v[0].clone()),
            Coeffs::Residue(v) => Coefficient::Residue(v[0]),
        }
    }

    /// Exact division by `X` of the canonical representative; `None` if `f(0) != 0`.
    pub fn div_x(&self) -> Option<Self> {
        match &self.data {
            Coeffs::Exact(v) => v[0].is_zero().then(|| {
                let mut w: Vec<BigRational> = v[1..].to_vec();
                w.push(BigRational::zero());
                Self {
                    shape: self.shape,
                    data: Coeffs::Exact(w),
                }
            }),
            Coeffs::Residue(v) => (v[0] == 0).then(|| {
                let mut w = v[1..].to_vec();
                w.push(0);
                Self {
                    shape: self.shape,
                    data: Coeffs::Residue(w),
                }
            }),
        }
    }

    /// Coefficients in the group basis `{(1+X)^e : 0 <= e < p^n}`.
    pub fn group_coeffs_residue(&self) -> Result<Vec<u64>> {
        let r = self.shape.residue_ring()?;
        Ok(x_to_group(&r, self.residues()))
    }

    pub fn group_coeffs_exact(&self) -> Result<Vec<BigRational>> {
        match &self.data {
            Coeffs::Exact(v) => Ok(x_to_group(&ExactField, v)),
            Coeffs::Residue(_) => Err(Error::ShapeMismatch("expected exact mode".into())),
        }
    }

    /// Reduction to `Lambda_{n,k}`.
    pub fn to_modular(&self, k: u32) -> Result<Self> {
        let shape = self.shape.with_precision(k)?;
        let r = shape.residue_ring()?;
        let data = match &self.data {
            Coeffs::Exact(v) => Coeffs::Residue(
                v.iter()
                    .map(|c| r.from_rational(c))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Coeffs::Residue(v) => {
                let have = self.shape.residue_ring()?;
                if have.k() < k {
                    return Err(Error::PrecisionMismatch {
                        p1: have.p(),
                        k1: have.k(),
                        p2: r.p(),
                        k2: k,
                    });
                }
                Coeffs::Residue(v.iter().map(|&c| c % r.modulus()).collect())
            }
        };
        Ok(Self { shape, data })
    }

    /// Lifts residues to rationals in `[0, p^k)`.
    pub fn to_exact(&self) -> Self {
        let shape = RingShape {
            mode: CoeffMode::Exact,
            ..self.shape
        };
        let data = match &self.data {
            Coeffs::Exact(v) => Coeffs::Exact(v.clone()),
            Coeffs::Residue(v) => Coeffs::Exact(
                v.iter()
                    .map(|&c| BigRational::from_integer(BigInt::from(c)))
                    .collect(),
            ),
        };
        Self { shape, data }
    }

    /// The natural quotient map `Lambda_n -> Lambda_m`.
    pub fn project(&self, m: u32) -> Result<Self> {
        if m > self.shape.n {
            return Err(Error::LayerOutOfRange {
                requested: m as i64,
                available: self.shape.n,
            });
        }
        let target = self.shape.at_layer(m)?;
        Ok(match &self.data {
            Coeffs::Exact(v) => target.reduce_exact(v.clone()),
            Coeffs::Residue(v) => target.reduce_residue(v.clone()),
        })
    }

    /// The trace `nu_{m,n}: Lambda_m -> Lambda_n` for `n > m`.
    pub fn trace(&self, n: u32) -> Result<Self> {
        if n <= self.shape.n {
            return Err(Error::LayerOutOfRange {
                requested: n as i64,
                available: self.shape.n,
            });
        }
        let target = self.shape.at_layer(n)?;
        let lift = match &self.data {
            Coeffs::Exact(v) => target.reduce_exact(v.clone()),
            Coeffs::Residue(v) => target.reduce_residue(v.clone()),
        };
        lift.mul(&target.trace_factor(self.shape.n))
    }

    /// The involution induced by `sigma -> sigma^{-1}`, i.e. `(1+X) -> (1+X)^{p^n - 1}`.
    pub fn involution(&self) -> Self {
        let d = self.shape.dim();
        let flip = |e: usize| (d - e) % d;
        match &self.data {
            Coeffs::Exact(v) => {
                let t = x_to_group(&ExactField, v);
                let mut u = vec![BigRational::zero(); d];
                for (e, c) in t.into_iter().enumerate() {
                    u[flip(e)] = c;
                }
                Self {
                    shape: self.shape,
                    data: Coeffs::Exact(group_to_x(&ExactField, &u)),
                }
            }
            Coeffs::Residue(v) => {
                let r = self.shape.residue_ring().unwrap();
                let t = x_to_group(&r, v);
                let mut u = vec![0; d];
                for (e, c) in t.into_iter().enumerate() {
                    u[flip(e)] = c;
                }
                Self {
                    shape: self.shape,
                    data: Coeffs::Residue(group_to_x(&r, &u)),
                }
            }
        }
    }

    pub fn eval_character(&self, chi: &Character) -> Result<CharacterValue> {
        let r = self.shape.residue_ring()?;
        if chi.m > self.shape.n || chi.p != self.shape.p {
            return Err(Error::LayerOutOfRange {
                requested: chi.m as i64,
                available: self.shape.n,
            });
        }
        if chi.m == 0 {
            return Ok(CharacterValue::Scalar(PrecisionInteger::from_residue(
                r,
                self.residues()[0],
            )));
        }
        let target = CyclotomicRing::new(r, chi.m)?;
        let t = self.group_coeffs_residue()?;
        Ok(CharacterValue::Cyclotomic(target.from_poly(&t)))
    }

    /// Units of the local ring `Lambda_{n,k}` are the elements with `f(0) != 0 mod p`.
    pub fn is_unit(&self) -> Result<bool> {
        let r = self.shape.residue_ring()?;
        Ok(self.residues()[0] % r.p() != 0)
    }

    pub fn inverse(&self) -> Result<Self> {
        let r = self.shape.residue_ring()?;
        let c0 = self.residues()[0];
        let inv0 = r.inv(c0).ok_or_else(|| Error::NotUnit {
            a: format!("{self}"),
            modulus: r.modulus(),
        })?;
        // Newton iteration g <- g (2 - f g); the maximal ideal is nilpotent.
        let two = self.shape.scalar(2);
        let mut g = self.shape.scalar(inv0 as i64);
        for _ in 0..64 {
            let fg = self.mul(&g)?;
            if fg.is_one() {
                return Ok(g);
            }
            g = g.mul(&two.sub(&fg)?)?;
        }
        unreachable!("Newton iteration converges for units of a finite local ring")
    }

    fn zip_with(
        &self,
        other: &Self,
        fr: impl Fn(&PrimePowerRing, u64, u64) -> u64,
        fq: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        let data = match (&self.data, &other.data) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact(a.iter().zip(b).map(|(x, y)| fq(x, y)).collect())
            }
            (Coeffs::Residue(a), Coeffs::Residue(b)) => {
                let r = self.shape.residue_ring()?;
                Coeffs::Residue(a.iter().zip(b).map(|(&x, &y)| fr(&r, x, y)).collect())
            }
            _ => unreachable!("shape equality fixes the coefficient mode"),
        };
        Ok(Self {
            shape: self.shape,
            data,
        })
    }

    fn map(
        &self,
        fr: impl Fn(&PrimePowerRing, u64) -> u64,
        fq: impl Fn(&BigRational) -> BigRational,
    ) -> Self {
        let data = match &self.data {
            Coeffs::Exact(a) => Coeffs::Exact(a.iter().map(fq).collect()),
            Coeffs::Residue(a) => {
                let r = self.shape.residue_ring().unwrap();
                Coeffs::Residue(a.iter().map(|&x| fr(&r, x)).collect())
            }
        };
        Self {
            shape: self.shape,
            data,
        }
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = match &self.data {
            Coeffs::Exact(v) => v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("({c})X^{i}"))
                .collect(),
            Coeffs::Residue(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, c)| format!("{c}X^{i}"))
                .collect(),
        };
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Rational(BigRational),
    Residue(u64),
}

/// A character of `Gal(Q_n/Q)` of order `p^m`, normalized so that the
/// generator `1 + X` maps to the class of `Y` in `(Z/p^k)[Y]/Phi_{p^m}(Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub p: u64,
    pub m: u32,
}

impl Character {
    pub fn trivial(p: u64) -> Self {
        Self { p, m: 0 }
    }

    pub fn of_order(p: u64, m: u32) -> Self {
        Self { p, m }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterValue {
    Scalar(PrecisionInteger),
    Cyclotomic(CyclotomicElement),
}

impl CharacterValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CharacterValue::Scalar(x) => x.value() == 0,
            CharacterValue::Cyclotomic(c) => c.is_zero(),
        }
    }
}

/// Result of a precision-capped vanishing-order computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingOrder {
    Exactly(u32),
    AtLeastCap(u32),
}

/// The augmentation ideal `I_chi = ker(f -> chi(f))` as a lattice ideal.
pub fn augmentation_ideal(shape: &RingShape, chi: &Character) -> Result<IdealLattice> {
    let r = shape.residue_ring()?;
    let d = shape.dim();
    let images: Vec<Vec<u64>> = (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = 1;
            let e = shape.from_residues(v)?;
            Ok(match e.eval_character(chi)? {
                CharacterValue::Scalar(x) => vec![x.value()],
                CharacterValue::Cyclotomic(c) => c.coeffs().to_vec(),
            })
        })
        .collect::<Result<_>>()?;
    let width = images[0].len();
    let sol = crate::lattice::solve_rows(r, &images, width, None);
    let gens = sol
        .kernel
        .rows()
        .iter()
        .map(|row| shape.from_residues(row.clone()))
        .collect::<Result<Vec<_>>>()?;
    IdealLattice::from_generators(shape, gens)
}

/// Largest `r <= cap` with `f` in `I_chi^r`, or `AtLeastCap` when `f` lies in `I_chi^cap`.
pub fn vanishing_order(f: &GroupRingElement, chi: &Character, cap: u32) -> Result<VanishingOrder> {
    let shape = f.shape();
    let aug = augmentation_ideal(&shape, chi)?;
    let mut power = IdealLattice::unit(&shape)?;
    for r in 0..cap {
        let next = power.product(&aug)?;
        if !next.contains(f)? {
            return Ok(VanishingOrder::Exactly(r));
        }
        power = next;
    }
    Ok(VanishingOrder::AtLeastCap(cap))
}

// ---------------------------------------------------------------------------
// Coefficient-generic polynomial kernels.

trait CoeffOps {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

struct ExactField;

impl CoeffOps for ExactField {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl CoeffOps for PrimePowerRing {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus()
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        PrimePowerRing::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        PrimePowerRing::sub(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        PrimePowerRing::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

fn poly_mul<C: CoeffOps>(c: &C, a: &[C::E], b: &[C::E]) -> Vec<C::E> {
    let mut out = vec![c.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if c.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !c.is_zero(y) {
                out[i + j] = c.add(&out[i + j], &c.mul(x, y));
            }
        }
    }
    out
}

/// Reduces modulo `omega_n = X^d + sum_{0<i<d} tail[i] X^i`.
fn reduce_mod_omega<C: CoeffOps>(c: &C, mut v: Vec<C::E>, tail: &[C::E], d: usize) -> Vec<C::E> {
    if v.len() < d {
        v.resize(d, c.zero());
        return v;
    }
    for top in (d..v.len()).rev() {
        let lead = std::mem::replace(&mut v[top], c.zero());
        if c.is_zero(&lead) {
            continue;
        }
        let base = top - d;
        for (i, t) in tail.iter().enumerate().skip(1) {
            if !c.is_zero(t) {
                v[base + i] = c.sub(&v[base + i], &c.mul(&lead, t));
            }
        }
    }
    v.truncate(d);
    v
}

fn pascal<C: CoeffOps>(c: &C, d: usize) -> Vec<Vec<C::E>> {
    let mut rows: Vec<Vec<C::E>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = vec![c.zero(); i + 1];
        row[0] = c.one();
        row[i] = c.one();
        for j in 1..i {
            row[j] = c.add(&rows[i - 1][j - 1], &rows[i - 1][j]);
        }
        rows.push(row);
    }
    rows
}

/// `X`-basis to group basis: `X^i = (T - 1)^i`.
fn x_to_group<C: CoeffOps>(c: &C, x: &[C::E]) -> Vec<C::E> {
    let d = x.len();
    let binom = pascal(c, d);
    let mut t = vec![c.zero(); d];
    for (i, xi) in x.iter().enumerate() {
        if c.is_zero(xi) {
            continue;
        }
        for e in 0..=i {
            let term = c.mul(xi, &binom[i][e]);
            t[e] = if (i - e) % 2 == 0 {
                c.add(&t[e], &term)
            } else {
                c.sub(&t[e], &term)
            };
        }
    }
    t
}

/// Group basis to `X`-basis: `T^e = (1 + X)^e`.
fn group_to_x<C: CoeffOps>(c: &C, t: &[C::E]) -> Vec<C::E> {
    let d = t.len();
    let binom = pascal(c, d);
    let mut x = vec![c.zero(); d];
    for (e, te) in t.iter().enumerate() {
        if c.is_zero(te) {
            continue;
        }
        for i in 0..=e {
            x[i] = c.add(&x[i], &c.mul(te, &binom[e][i]));
        }
    }
    x
}

type TailKey = (u64, u32, Option<u32>);

enum Tail {
    Exact(Arc<Vec<BigRational>>),
    Residue(Arc<Vec<u64>>),
}

fn tail_cache() -> &'static RwLock<HashMap<TailKey, Tail>> {
    static CACHE: OnceLock<RwLock<HashMap<TailKey, Tail>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn exact_tail(p: u64, n: u32) -> Arc<Vec<BigRational>> {
    let key = (p, n, None);
    if let Some(Tail::Exact(t)) = tail_cache().read().unwrap().get(&key) {
        return t.clone();
    }
    let poly = omega::omega_poly(p, n);
    let d = p.pow(n) as usize;
    let t: Arc<Vec<BigRational>> = Arc::new(
        (0..d)
            .map(|i| BigRational::from_integer(poly.coeffs()[i].clone()))
            .collect(),
    );
    tail_cache().write().unwrap().insert(key, Tail::Exact(t.clone()));
    t
}

fn residue_tail(r: PrimePowerRing, n: u32) -> Arc<Vec<u64>> {
    let key = (r.p(), n, Some(r.k()));
    if let Some(Tail::Residue(t)) = tail_cache().read().unwrap().get(&key) {
        return t.clone();
    }
    let poly = omega::omega_poly(r.p(), n);
    let d = r.p().pow(n) as usize;
    let t: Arc<Vec<u64>> = Arc::new((0..d).map(|i| r.from_bigint(&poly.coeffs()[i])).collect());
    tail_cache().write().unwrap().insert(key, Tail::Residue(t.clone()));
    t
}

// ---------------------------------------------------------------------------
// JSON form: {"p", "n", "mode", "k"?, "coeffs"}.

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    p: u64,
    n: u32,
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
}

impl From<RingShape> for ShapeRepr {
    fn from(s: RingShape) -> Self {
        match s.mode {
            CoeffMode::Exact => ShapeRepr {
                p: s.p,
                n: s.n,
                mode: "exact".into(),
                k: None,
            },
            CoeffMode::Modular(r) => ShapeRepr {
                p: s.p,
                n: s.n,
                mode: "mod".into(),
                k: Some(r.k()),
            },
        }
    }
}

impl TryFrom<ShapeRepr> for RingShape {
    type Error = Error;
    fn try_from(s: ShapeRepr) -> Result<Self> {
        match (s.mode.as_str(), s.k) {
            ("exact", None) => RingShape::exact(s.p, s.n),
            ("mod", Some(k)) => RingShape::modular(s.p, s.n, k),
            (m, k) => Err(Error::InvalidInput(format!(
                "bad ring shape: mode {m:?} with k = {k:?}"
            ))),
        }
    }
}

impl Serialize for RingShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ShapeRepr::from(*self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingShape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RingShape::try_from(ShapeRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    p: u64,
    n: u32,
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    coeffs: Vec<CoeffRepr>,
}

impl From<&GroupRingElement> for ElementRepr {
    fn from(e: &GroupRingElement) -> Self {
        let shape = ShapeRepr::from(e.shape);
        let coeffs = match &e.data {
            Coeffs::Exact(v) => v.iter().map(|c| CoeffRepr::Text(c.to_string())).collect(),
            Coeffs::Residue(v) => v.iter().map(|&c| CoeffRepr::Int(c as i64)).collect(),
        };
        ElementRepr {
            p: shape.p,
            n: shape.n,
            mode: shape.mode,
            k: shape.k,
            coeffs,
        }
    }
}

impl TryFrom<ElementRepr> for GroupRingElement {
    type Error = Error;
    fn try_from(e: ElementRepr) -> Result<Self> {
        let shape = RingShape::try_from(ShapeRepr {
            p: e.p,
            n: e.n,
            mode: e.mode,
            k: e.k,
        })?;
        match shape.mode {
            CoeffMode::Exact => {
                let coeffs = e
                    .coeffs
                    .into_iter()
                    .map(|c| match c {
                        CoeffRepr::Int(i) => Ok(BigRational::from_integer(i.into())),
                        CoeffRepr::Text(s) => BigRational::from_str(&s)
                            .map_err(|err| Error::InvalidInput(format!("coefficient {s:?}: {err}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                shape.from_rationals(coeffs)
            }
            CoeffMode::Modular(r) => {
                let coeffs = e
                    .coeffs
                    .into_iter()
                    .map(|c| match c {
                        CoeffRepr::Int(i) => Ok(r.from_i64(i)),
                        CoeffRepr::Text(s) => s
                            .parse::<i64>()
                            .map(|i| r.from_i64(i))
                            .map_err(|err| Error::InvalidInput(format!("coefficient {s:?}: {err}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                shape.from_residues(coeffs)
            }
        }
    }
}

impl Serialize for GroupRingElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupRingElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GroupRingElement::try_from(ElementRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
