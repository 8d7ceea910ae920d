//! Manin-symbol presentation of weight-2 modular symbols for `Gamma_0(N)` and
//! the plus eigensymbol of an elliptic curve.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::curve::CurveData;
use super::linalg::{nullspace, rank};
use super::p1::P1List;
use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};

pub const MAX_LEVEL: u64 = 10_000;

/// Hecke operators are added one prime at a time until the eigenspace is a line.
const MAX_HECKE_PRIME: u64 = 100;

/// Integer matrices `[[a, b], [c, d]]` of determinant `n` with `a > b >= 0`, `d > c >= 0`.
pub fn heilbronn_merel(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=n {
            let ad = a * d;
            if ad == n {
                // b = 0 with any c, or c = 0 with any b.
                out.extend((0..d).map(|c| [a, 0, c, d]));
                out.extend((1..a).map(|b| [a, b, 0, d]));
                continue;
            }
            if ad < n {
                continue;
            }
            // b c = a d - n with 0 < b < a, 0 <= c < d.
            let bc = ad - n;
            for b in 1..a {
                if bc % b == 0 && bc / b < d {
                    out.push([a, b, bc / b, d]);
                }
            }
        }
    }
    out
}

/// Relations among Manin symbols `(c : d)`: `x + xS = 0`, `x + xU + xU^2 = 0`, `x = x*`.
#[derive(Debug, Clone)]
pub struct ManinSymbolSpace {
    p1: Arc<P1List>,
}

impl ManinSymbolSpace {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelTooLarge(level));
        }
        Ok(Self {
            p1: Arc::new(P1List::new(level)),
        })
    }

    pub fn level(&self) -> u64 {
        self.p1.level()
    }

    pub fn p1(&self) -> &Arc<P1List> {
        &self.p1
    }

    fn act(&self, i: usize, m: [i64; 4]) -> usize {
        let (c, d) = self.p1.reps()[i];
        let (c, d) = (c as i64, d as i64);
        let [a, b, cc, dd] = m;
        self.p1
            .index_of(c * a + d * cc, c * b + d * dd)
            .expect("unimodular action preserves P^1")
    }

    /// `(c, d) S = (d, -c)` with `S = [[0, -1], [1, 0]]`.
    pub fn apply_s(&self, i: usize) -> usize {
        self.act(i, [0, -1, 1, 0])
    }

    /// `(c, d) U = (d, -c - d)` with `U = [[0, -1], [1, -1]]`.
    pub fn apply_u(&self, i: usize) -> usize {
        self.act(i, [0, -1, 1, -1])
    }

    /// `(c : d) -> (-c : d)`.
    pub fn star(&self, i: usize) -> usize {
        self.act(i, [-1, 0, 0, 1])
    }

    /// The symbols `x M` for `M` in the Heilbronn set of `ell`, with multiplicity.
    pub fn hecke_image(&self, i: usize, ell: u64) -> Vec<usize> {
        let (c, d) = self.p1.reps()[i];
        let (c, d) = (c as i64, d as i64);
        heilbronn_merel(ell)
            .into_iter()
            .filter_map(|[a, b, cc, dd]| self.p1.index_of(c * a + d * cc, c * b + d * dd))
            .collect()
    }

    pub fn relation_rows(&self) -> Vec<Vec<BigInt>> {
        let n = self.p1.len();
        let unit = |pairs: &[(usize, i64)]| {
            let mut row = vec![BigInt::zero(); n];
            for &(j, c) in pairs {
                row[j] += c;
            }
            row
        };
        let mut rows = Vec::with_capacity(3 * n);
        for i in 0..n {
            rows.push(unit(&[(i, 1), (self.apply_s(i), 1)]));
            let u = self.apply_u(i);
            rows.push(unit(&[(i, 1), (u, 1), (self.apply_u(u), 1)]));
            rows.push(unit(&[(i, 1), (self.star(i), -1)]));
        }
        rows
    }

    /// Rows of `phi(T_ell x) - a_ell phi(x)` for every symbol `x`.
    pub fn hecke_rows(&self, ell: u64, a_ell: i64) -> Vec<Vec<BigInt>> {
        let n = self.p1.len();
        (0..n)
            .map(|i| {
                let mut row = vec![BigInt::zero(); n];
                for j in self.hecke_image(i, ell) {
                    row[j] += 1;
                }
                row[i] -= a_ell;
                row
            })
            .collect()
    }

    /// Dimension of the plus quotient (functionals killed by all relations).
    pub fn plus_quotient_dimension(&self) -> usize {
        self.p1.len() - rank(&self.relation_rows(), self.p1.len())
    }
}

/// The plus eigensymbol, as integer values on Manin symbols.
///
/// Values are scaled so that they generate `Z` (hence so do all path values)
/// and signed so that the value on `{oo, 0}` is nonnegative, with ties broken
/// by making the first nonzero value positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlusEigenSymbol {
    pub curve: CurveData,
    #[serde(skip)]
    p1: Arc<P1List>,
    values: Vec<BigInt>,
    /// Primes whose Hecke eigenvalue was imposed to cut out the eigenline.
    pub hecke_primes: Vec<u64>,
}

impl PlusEigenSymbol {
    pub fn compute(curve: &CurveData) -> Result<Self> {
        let space = ManinSymbolSpace::new(curve.conductor)?;
        let n = space.p1.len();
        let mut rows = space.relation_rows();
        let mut used = Vec::new();
        let mut basis = nullspace(&rows, n);
        for ell in curve.good_primes(MAX_HECKE_PRIME) {
            // At least one prime is always imposed: it kills the Eisenstein line.
            if basis.len() <= 1 && !used.is_empty() {
                break;
            }
            rows.extend(space.hecke_rows(ell, curve.ap(ell)?));
            used.push(ell);
            basis = nullspace(&rows, n);
        }
        match basis.len() {
            0 => Err(Error::InconsistentEigenvalues(format!(
                "no plus symbol of level {} has the eigenvalues a_ell for ell in {used:?}",
                curve.conductor
            ))),
            1 => Ok(Self::normalized(curve.clone(), space.p1.clone(), basis.pop_only(), used)),
            d => Err(Error::EigenspaceNotRankOne(d)),
        }
    }

    fn normalized(curve: CurveData, p1: Arc<P1List>, mut values: Vec<BigInt>, hecke_primes: Vec<u64>) -> Self {
        let g = values.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        if !g.is_zero() {
            for v in values.iter_mut() {
                *v /= &g;
            }
        }
        let mut s = Self {
            curve,
            p1,
            values,
            hecke_primes,
        };
        let at_zero = s.eval_plus(0, 1);
        let flip = if at_zero.is_zero() {
            s.values.iter().find(|v| !v.is_zero()).map_or(false, |v| v.is_negative())
        } else {
            at_zero.is_negative()
        };
        if flip {
            for v in s.values.iter_mut() {
                *v = -&*v;
            }
        }
        s
    }

    /// Rebuilds a symbol from stored values, checking the table size.
    pub fn from_values(curve: CurveData, values: Vec<BigInt>, hecke_primes: Vec<u64>) -> Result<Self> {
        let p1 = Arc::new(P1List::new(curve.conductor));
        if values.len() != p1.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for |P^1(Z/{})| = {}",
                values.len(),
                curve.conductor,
                p1.len()
            )));
        }
        Ok(Self {
            curve,
            p1,
            values,
            hecke_primes,
        })
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// `c * phi`, for testing the normalization checks.
    pub fn scaled(&self, c: i64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Value on the Manin symbol `(c : d)`.
    pub fn symbol_value(&self, c: i64, d: i64) -> BigInt {
        let i = self.p1.index_of(c, d).expect("gcd(c, d, N) = 1");
        self.values[i].clone()
    }

    /// Value on `{p0/q0, p1/q1}` for adjacent cusps (`p1 q0 - p0 q1 = +-1`).
    fn segment(&self, p0: i64, q0: i64, p1: i64, q1: i64) -> BigInt {
        let det = p1 * q0 - p0 * q1;
        debug_assert!(det.abs() == 1, "cusps are not adjacent");
        // g = [[p1, det p0], [q1, det q0]] has determinant 1, g(0) = p0/q0, g(oo) = p1/q1.
        self.symbol_value(q1, det * q0)
    }

    /// Sum over consecutive pairs of a chain of adjacent cusps `p/q` (`1/0` is infinity).
    pub fn chain_value(&self, cusps: &[(i64, i64)]) -> BigInt {
        cusps
            .windows(2)
            .map(|w| self.segment(w[0].0, w[0].1, w[1].0, w[1].1))
            .sum()
    }

    /// `[a/b]^+`: the symbol on the path `{oo, a/b}`, by the continued fraction of `a/b`.
    pub fn eval_plus(&self, a: i64, b: i64) -> BigInt {
        self.chain_value(&continued_fraction_chain(a, b))
    }

    /// All Manin relations hold for the value table.
    pub fn manin_relations_hold(&self) -> bool {
        let space = ManinSymbolSpace {
            p1: self.p1.clone(),
        };
        space.relation_rows().iter().all(|row| self.pair(row).is_zero())
    }

    fn pair(&self, row: &[BigInt]) -> BigInt {
        row.iter().zip(&self.values).map(|(a, b)| a * b).sum()
    }

    /// `phi(T_ell x) = a_ell phi(x)` on every Manin symbol.
    pub fn hecke_holds(&self, ell: u64) -> Result<bool> {
        let a = self.curve.ap(ell)?;
        let space = ManinSymbolSpace {
            p1: self.p1.clone(),
        };
        Ok((0..self.p1.len()).all(|i| {
            let lhs: BigInt = space.hecke_image(i, ell).into_iter().map(|j| &self.values[j]).sum();
            lhs == &self.values[i] * a
        }))
    }

    /// Hecke checks for all good primes up to `bound`, one prime per task.
    pub fn hecke_report(&self, bound: u64, exec: Execution) -> Result<Vec<(u64, bool)>> {
        let primes = self.curve.good_primes(bound);
        map_indexed(exec, primes.len(), |i| {
            self.hecke_holds(primes[i]).map(|ok| (primes[i], ok))
        })
        .into_iter()
        .collect()
    }

    /// `a_ell [r] = sum_{j < ell} [(r + j)/ell] + [ell r]` for `r = a/b`, on paths.
    pub fn classical_hecke_holds(&self, ell: u64, a: i64, b: i64) -> Result<bool> {
        let ap = self.curve.ap(ell)?;
        let l = ell as i64;
        let lhs: BigInt = (0..l).map(|j| self.eval_plus(a + j * b, l * b)).sum::<BigInt>()
            + self.eval_plus(l * a, b);
        Ok(lhs == self.eval_plus(a, b) * ap)
    }

    /// The values generate `Z`.
    pub fn lattice_is_z(&self) -> bool {
        self.values.iter().fold(BigInt::zero(), |g, v| g.gcd(v)) == BigInt::from(1)
    }
}

trait PopOnly<T> {
    fn pop_only(self) -> T;
}

impl<T> PopOnly<T> for Vec<T> {
    fn pop_only(mut self) -> T {
        debug_assert_eq!(self.len(), 1);
        self.pop().unwrap()
    }
}

fn reduce_fraction(a: i64, b: i64) -> (i64, i64) {
    assert!(b != 0, "zero denominator");
    let g = a.gcd(&b);
    let (a, b) = (a / g, b / g);
    if b < 0 {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// `oo = 1/0, p_0/q_0, ..., a/b` from the regular continued fraction.
pub fn continued_fraction_chain(a: i64, b: i64) -> Vec<(i64, i64)> {
    let (mut num, mut den) = reduce_fraction(a, b);
    let mut chain = vec![(1, 0)];
    let (mut p_prev, mut q_prev, mut p_prev2, mut q_prev2) = (1i64, 0i64, 0i64, 1i64);
    loop {
        // den > 0 throughout, so Euclidean division is the floor.
        let q = num.div_euclid(den);
        let (p, qq) = (q * p_prev + p_prev2, q * q_prev + q_prev2);
        chain.push((p, qq));
        let r = num - q * den;
        if r == 0 {
            break;
        }
        (num, den) = (den, r);
        (p_prev2, q_prev2, p_prev, q_prev) = (p_prev, q_prev, p, qq);
    }
    chain
}

/// The same path through the convergents of the ceiling continued fraction
/// `a/b = c_0 - 1/(c_1 - 1/(...))`.
pub fn ceiling_fraction_chain(a: i64, b: i64) -> Vec<(i64, i64)> {
    let (mut num, mut den) = reduce_fraction(a, b);
    let mut chain = vec![(1, 0)];
    let (mut p_prev, mut q_prev, mut p_prev2, mut q_prev2) = (1i64, 0i64, 0i64, -1i64);
    loop {
        let c = -(-num).div_euclid(den);
        let (p, q) = (c * p_prev - p_prev2, c * q_prev - q_prev2);
        chain.push((p, q));
        let r = c * den - num;
        if r == 0 {
            break;
        }
        (num, den) = (den, r);
        (p_prev2, q_prev2, p_prev, q_prev) = (p_prev, q_prev, p, q);
    }
    chain
}
