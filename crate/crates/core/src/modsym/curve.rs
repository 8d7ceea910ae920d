//! Weierstrass curves over `Q` and traces of Frobenius by point counting.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_mod};
use crate::error::{Error, Result};

/// Point counting is plain enumeration; larger primes are refused.
pub const MAX_COUNT_PRIME: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveData {
    pub label: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a_invariants: [i64; 5],
    /// Trusted input; only good reduction at the primes actually used is checked.
    pub conductor: u64,
}

/// Which loop runs outermost in the naive count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountOrder {
    XThenY,
    YThenX,
}

impl CurveData {
    pub fn new(label: impl Into<String>, a_invariants: [i64; 5], conductor: u64) -> Result<Self> {
        let curve = Self {
            label: label.into(),
            a_invariants,
            conductor,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.discriminant() == 0 {
            return Err(Error::SingularCurve);
        }
        if self.conductor == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curve: CurveData = serde_json::from_str(text)?;
        curve.validate()?;
        Ok(curve)
    }

    /// Built-in curves used by tests and examples.
    pub fn named(label: &str) -> Option<Self> {
        let (a, n) = match label {
            "11a1" => ([0, -1, 1, -10, -20], 11),
            "17a1" => ([1, -1, 1, -1, -14], 17),
            "19a1" => ([0, 1, 1, -9, -15], 19),
            "37a1" => ([0, 0, 1, -1, 0], 37),
            _ => return None,
        };
        Some(Self::new(label, a, n).expect("built-in curves are nonsingular"))
    }

    fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let [a1, a2, a3, a4, a6] = self.a_invariants.map(|x| x as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    fn check_good_prime(&self, ell: u64) -> Result<()> {
        if !is_prime(ell) {
            return Err(Error::InvalidInput(format!("{ell} is not prime")));
        }
        if ell >= MAX_COUNT_PRIME {
            return Err(Error::PrimeTooLarge(ell));
        }
        if self.conductor % ell == 0 || self.discriminant().rem_euclid(ell as i128) == 0 {
            return Err(Error::BadReduction(ell));
        }
        Ok(())
    }

    /// `a_ell = ell + 1 - #E(F_ell)` at a prime of good reduction.
    pub fn ap(&self, ell: u64) -> Result<i64> {
        self.check_good_prime(ell)?;
        let count = if ell == 2 {
            self.count_naive(2, CountOrder::XThenY)
        } else {
            self.count_by_legendre(ell)
        };
        let a = ell as i64 + 1 - count as i64;
        debug_assert!((a * a) as u64 <= 4 * ell, "Hasse bound");
        Ok(a)
    }

    /// Same trace, by enumerating all affine pairs in the given order.
    pub fn ap_naive(&self, ell: u64, order: CountOrder) -> Result<i64> {
        self.check_good_prime(ell)?;
        Ok(ell as i64 + 1 - self.count_naive(ell, order) as i64)
    }

    /// `#E(F_ell)` for odd `ell` via `(2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6`.
    fn count_by_legendre(&self, ell: u64) -> u64 {
        let (b2, b4, b6, _) = self.b_invariants();
        let m = ell as i128;
        let (b2, b4, b6) = (b2.rem_euclid(m) as u64, b4.rem_euclid(m) as u64, b6.rem_euclid(m) as u64);
        let mut squares = vec![false; ell as usize];
        for y in 0..ell {
            squares[(y * y % ell) as usize] = true;
        }
        let mut count = 1; // the point at infinity
        for x in 0..ell {
            let rhs = (4 * pow_mod(x, 3, ell) + b2 * (x * x % ell) + 2 * b4 * x + b6) % ell;
            count += if rhs == 0 {
                1
            } else if squares[rhs as usize] {
                2
            } else {
                0
            };
        }
        count
    }

    fn count_naive(&self, ell: u64, order: CountOrder) -> u64 {
        let [a1, a2, a3, a4, a6] = self.a_invariants.map(|a| a.rem_euclid(ell as i64) as u64);
        let on_curve = |x: u64, y: u64| {
            let lhs = (y * y + a1 * x % ell * y + a3 * y) % ell;
            let rhs = (x * x % ell * x + a2 * (x * x % ell) + a4 * x + a6) % ell;
            lhs == rhs
        };
        let mut count = 1;
        for u in 0..ell {
            for v in 0..ell {
                let (x, y) = match order {
                    CountOrder::XThenY => (u, v),
                    CountOrder::YThenX => (v, u),
                };
                count += on_curve(x, y) as u64;
            }
        }
        count
    }

    /// Good primes `ell <= bound` in increasing order (primes dividing `N` or the discriminant skipped).
    pub fn good_primes(&self, bound: u64) -> Vec<u64> {
        crate::arith::primes_up_to(bound)
            .into_iter()
            .filter(|&l| self.check_good_prime(l).is_ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_traces() {
        let e11 = CurveData::named("11a1").unwrap();
        // 11a1 has q-expansion q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 ...
        assert_eq!(e11.ap(2).unwrap(), -2);
        assert_eq!(e11.ap(3).unwrap(), -1);
        assert_eq!(e11.ap(5).unwrap(), 1);
        assert_eq!(e11.ap(7).unwrap(), -2);
        let e17 = CurveData::named("17a1").unwrap();
        assert_eq!(e17.ap(3).unwrap(), 0);
        assert_eq!(e17.ap(2).unwrap(), -1);
        let e37 = CurveData::named("37a1").unwrap();
        assert_eq!(e37.ap(2).unwrap(), -2);
        assert_eq!(e37.ap(3).unwrap(), -3);
    }

    #[test]
    fn bad_primes_are_refused() {
        let e11 = CurveData::named("11a1").unwrap();
        assert!(matches!(e11.ap(11), Err(Error::BadReduction(11))));
        assert!(matches!(e11.ap(4), Err(Error::InvalidInput(_))));
        assert!(matches!(e11.ap(100_003), Err(Error::PrimeTooLarge(_))));
    }

    #[test]
    fn counting_methods_agree_and_respect_hasse() {
        for label in ["11a1", "17a1", "19a1", "37a1"] {
            let e = CurveData::named(label).unwrap();
            for ell in e.good_primes(200) {
                let a = e.ap(ell).unwrap();
                assert_eq!(a, e.ap_naive(ell, CountOrder::XThenY).unwrap(), "{label} {ell}");
                assert_eq!(a, e.ap_naive(ell, CountOrder::YThenX).unwrap(), "{label} {ell}");
                assert!((a * a) as u64 <= 4 * ell);
            }
        }
    }

    #[test]
    fn discriminants() {
        assert_eq!(CurveData::named("11a1").unwrap().discriminant(), -161051);
        assert_eq!(CurveData::named("17a1").unwrap().discriminant(), -83521);
        assert_eq!(CurveData::named("37a1").unwrap().discriminant(), 37);
        assert!(matches!(
            CurveData::new("sing", [0, 0, 0, 0, 0], 1),
            Err(Error::SingularCurve)
        ));
    }

    #[test]
    fn json_input() {
        let e = CurveData::from_json(
            r#"{"label": "17a1", "a_invariants": [1, -1, 1, -1, -14], "conductor": 17}"#,
        )
        .unwrap();
        assert_eq!(e, CurveData::named("17a1").unwrap());
        assert!(CurveData::from_json(r#"{"label": "x"}"#).is_err());
    }
}
