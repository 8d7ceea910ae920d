//! The projective line `P^1(Z/N)`, indexing Manin symbols `(c : d)` for `Gamma_0(N)`.

use std::collections::HashMap;

use num_integer::Integer;

/// Canonical representatives of `P^1(Z/N)` with a reverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1List {
    n: u64,
    reps: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `(s, g)` with `s a = g (mod n)`, `g = gcd(a, n)`.
fn xgcd_mod(a: u64, n: u64) -> (u64, u64) {
    let e = (a as i64).extended_gcd(&(n as i64));
    (e.x.rem_euclid(n as i64) as u64, e.gcd as u64)
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        let mut push = |rep: (u64, u64), reps: &mut Vec<(u64, u64)>| {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(rep) {
                e.insert(reps.len());
                reps.push(rep);
            }
        };
        if n == 1 {
            push((0, 0), &mut reps);
        } else {
            push((0, 1), &mut reps);
            for g in (1..n).filter(|g| n % g == 0) {
                for v in 0..n {
                    if gcd(gcd(g, v), n) != 1 {
                        continue;
                    }
                    if let Some(rep) = normalize(n, g, v) {
                        push(rep, &mut reps);
                    }
                }
            }
        }
        Self { n, reps, index }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[(u64, u64)] {
        &self.reps
    }

    /// Index of the class of `(c : d)`; `None` if `gcd(c, d, N) != 1`.
    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let rep = normalize(self.n, c.rem_euclid(n) as u64, d.rem_euclid(n) as u64)?;
        self.index.get(&rep).copied()
    }

    /// Expected size `N prod_{q | N} (1 + 1/q)`.
    pub fn expected_len(n: u64) -> u64 {
        crate::arith::prime_factors(n)
            .into_iter()
            .fold(n, |acc, q| acc / q * (q + 1))
    }
}

/// Canonical representative of `(u : v)` under scaling by units of `Z/N`.
///
/// The first coordinate becomes `g = gcd(u, N)`; the second is minimized over
/// the units fixing `g`, i.e. `1 + j N/g`.
pub fn normalize(n: u64, u: u64, v: u64) -> Option<(u64, u64)> {
    if n == 1 {
        return Some((0, 0));
    }
    let (u, v) = (u % n, v % n);
    if gcd(gcd(u, v), n) != 1 {
        return None;
    }
    if u == 0 {
        return Some((0, 1));
    }
    let (mut s, g) = xgcd_mod(u, n);
    let step = n / g;
    while gcd(s, n) != 1 {
        s = (s + step) % n;
    }
    let v = (s as u128 * v as u128 % n as u128) as u64;
    if g == 1 {
        return Some((1, v));
    }
    let mut best = v;
    let v_step = (v as u128 * step as u128 % n as u128) as u64;
    let (mut t, mut w) = (1u64, v);
    for _ in 1..g {
        t = (t + step) % n;
        w = (w + v_step) % n;
        if w < best && gcd(t, n) == 1 {
            best = w;
        }
    }
    Some((g, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Orbit-based oracle: classes of pairs under all units.
    fn brute_classes(n: u64) -> usize {
        let units: Vec<u64> = (1..n).filter(|&x| gcd(x, n) == 1).collect();
        let mut seen = std::collections::HashSet::new();
        let mut classes = 0;
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) != 1 || seen.contains(&(c, d)) {
                    continue;
                }
                classes += 1;
                for &l in &units {
                    seen.insert((l * c % n, l * d % n));
                }
            }
        }
        classes
    }

    #[test]
    fn sizes() {
        assert_eq!(P1List::new(11).len(), 12);
        assert_eq!(P1List::new(17).len(), 18);
        for n in [2, 4, 6, 9, 12, 18, 30, 37, 45] {
            let l = P1List::new(n);
            assert_eq!(l.len() as u64, P1List::expected_len(n), "N={n}");
            assert_eq!(l.len(), brute_classes(n), "N={n}");
        }
    }

    #[test]
    fn normalization_is_constant_on_unit_orbits() {
        for n in [12u64, 18, 25] {
            let l = P1List::new(n);
            for c in 0..n as i64 {
                for d in 0..n as i64 {
                    let Some(i) = l.index_of(c, d) else { continue };
                    for u in (1..n as i64).filter(|&u| gcd(u as u64, n) == 1) {
                        assert_eq!(l.index_of(u * c, u * d), Some(i));
                    }
                }
            }
        }
    }

    #[test]
    fn s_squared_is_trivial() {
        let l = P1List::new(37);
        for &(c, d) in l.reps() {
            let (c, d) = (c as i64, d as i64);
            // (c, d) S = (d, -c); twice gives (-c, -d).
            assert_eq!(l.index_of(-c, -d), l.index_of(c, d));
        }
    }
}
