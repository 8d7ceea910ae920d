//! Row spans over `Z/p^k` in Howell normal form.
//!
//! A Howell basis is an echelon basis whose pivots are powers of `p`, whose
//! entries above each pivot are reduced modulo that pivot, and which has the
//! extra property that every element of the span with leading zeros in the
//! first `j` columns is spanned by the rows whose pivots lie beyond `j`. The
//! form is unique for a given span, so span equality is row equality and
//! membership is greedy reduction.

use serde::{Deserialize, Serialize};

use crate::arith::PrimePowerRing;

/// A `Z/p^k`-submodule of `(Z/p^k)^width`, stored in Howell normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    ring: PrimePowerRing,
    width: usize,
    /// Rows sorted by pivot column.
    rows: Vec<Vec<u64>>,
}

/// Incremental Howell basis; one slot per pivot column.
#[derive(Debug, Clone)]
pub struct HowellBuilder {
    ring: PrimePowerRing,
    width: usize,
    slots: Vec<Option<Vec<u64>>>,
}

fn leading(row: &[u64], from: usize) -> Option<usize> {
    row[from..].iter().position(|&x| x != 0).map(|i| i + from)
}

impl HowellBuilder {
    pub fn new(ring: PrimePowerRing, width: usize) -> Self {
        Self {
            ring,
            width,
            slots: vec![None; width],
        }
    }

    pub fn ring(&self) -> PrimePowerRing {
        self.ring
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Adds `row` to the span. Returns true if the span grew.
    pub fn insert(&mut self, row: Vec<u64>) -> bool {
        assert_eq!(row.len(), self.width, "row width");
        let ring = self.ring;
        let mut grew = false;
        let mut stack = vec![row];
        while let Some(mut r) = stack.pop() {
            let mut start = 0;
            while let Some(j) = leading(&r, start) {
                start = j;
                let (v, u) = ring.split(r[j]);
                match &mut self.slots[j] {
                    None => {
                        scale_row(ring, &mut r, j, ring.inv(u).expect("unit part"));
                        if v > 0 {
                            let mut ann = r.clone();
                            scale_row(ring, &mut ann, j, ring.p_pow(ring.k() - v));
                            stack.push(ann);
                        }
                        self.slots[j] = Some(r);
                        grew = true;
                        break;
                    }
                    Some(slot) => {
                        let w = ring.valuation(slot[j]);
                        if v >= w {
                            let factor = r[j] / ring.p_pow(w);
                            sub_scaled(ring, &mut r, slot, j, factor);
                        } else {
                            scale_row(ring, &mut r, j, ring.inv(u).expect("unit part"));
                            let mut ann = r.clone();
                            scale_row(ring, &mut ann, j, ring.p_pow(ring.k() - v));
                            stack.push(ann);
                            std::mem::swap(slot, &mut r);
                            grew = true;
                        }
                    }
                }
            }
        }
        grew
    }

    /// Reduces `v` against the current echelon rows; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &mut [u64]) {
        reduce_against(self.ring, self.slots.iter().flatten(), v);
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn finish(self) -> Lattice {
        let ring = self.ring;
        let mut rows: Vec<Vec<u64>> = self.slots.into_iter().flatten().collect();
        // Back-substitution: reduce the entries above each pivot modulo the pivot.
        let pivots: Vec<usize> = rows.iter().map(|r| leading(r, 0).unwrap()).collect();
        for b in 0..rows.len() {
            let j = pivots[b];
            let pv = rows[b][j];
            let (below, above) = {
                let (head, tail) = rows.split_at_mut(b);
                (tail[0].clone(), head)
            };
            for row in above.iter_mut() {
                let q = row[j] / pv;
                if q != 0 {
                    sub_scaled(ring, row, &below, j, q);
                }
            }
        }
        Lattice {
            ring,
            width: self.width,
            rows,
        }
    }
}

fn scale_row(ring: PrimePowerRing, row: &mut [u64], from: usize, c: u64) {
    for x in &mut row[from..] {
        *x = ring.mul(*x, c);
    }
}

fn sub_scaled(ring: PrimePowerRing, row: &mut [u64], other: &[u64], from: usize, c: u64) {
    for (x, &y) in row[from..].iter_mut().zip(&other[from..]) {
        if y != 0 {
            *x = ring.sub(*x, ring.mul(c, y));
        }
    }
}

fn reduce_against<'a>(
    ring: PrimePowerRing,
    rows: impl Iterator<Item = &'a Vec<u64>>,
    v: &mut [u64],
) {
    for row in rows {
        let j = leading(row, 0).unwrap();
        if v[j] == 0 {
            continue;
        }
        let pv = row[j];
        if v[j] % pv != 0 {
            // Cannot clear this column; the vector is outside the span.
            return;
        }
        sub_scaled(ring, v, row, j, v[j] / pv);
    }
}

impl Lattice {
    pub fn from_rows(ring: PrimePowerRing, width: usize, rows: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let mut b = HowellBuilder::new(ring, width);
        for r in rows {
            b.insert(r);
        }
        b.finish()
    }

    pub fn zero(ring: PrimePowerRing, width: usize) -> Self {
        Self {
            ring,
            width,
            rows: Vec::new(),
        }
    }

    pub fn full(ring: PrimePowerRing, width: usize) -> Self {
        let rows = (0..width)
            .map(|i| {
                let mut r = vec![0; width];
                r[i] = 1;
                r
            })
            .collect();
        Self { ring, width, rows }
    }

    pub fn ring(&self) -> PrimePowerRing {
        self.ring
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width && self.rows.iter().enumerate().all(|(i, r)| r[i] == 1)
    }

    /// Number of elements of the span, as `log_p`.
    pub fn log_p_size(&self) -> u32 {
        let k = self.ring.k();
        // In Howell form the span is the direct sum over pivot columns of p^v Z/p^k.
        self.rows
            .iter()
            .map(|r| {
                let j = leading(r, 0).unwrap();
                k - self.ring.valuation(r[j])
            })
            .sum()
    }

    pub fn reduce(&self, v: &mut [u64]) {
        reduce_against(self.ring, self.rows.iter(), v);
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.width, "vector width");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::from_rows(
            self.ring,
            self.width,
            self.rows.iter().chain(&other.rows).cloned(),
        )
    }

    pub fn builder(&self) -> HowellBuilder {
        let mut b = HowellBuilder::new(self.ring, self.width);
        for r in &self.rows {
            b.insert(r.clone());
        }
        b
    }
}

/// Outcome of solving `y * M = b` for a row vector `y`.
#[derive(Debug, Clone)]
pub struct RowSolution {
    pub particular: Option<Vec<u64>>,
    /// All `y` with `y * M = 0`.
    pub kernel: Lattice,
}

/// Solves `y * M = b` over `Z/p^k`, where `M` has the given rows.
pub fn solve_rows(ring: PrimePowerRing, m: &[Vec<u64>], width: usize, b: Option<&[u64]>) -> RowSolution {
    let count = m.len();
    let mut builder = HowellBuilder::new(ring, width + count);
    for (i, row) in m.iter().enumerate() {
        let mut aug = Vec::with_capacity(width + count);
        aug.extend_from_slice(row);
        aug.resize(width + count, 0);
        aug[width + i] = 1;
        builder.insert(aug);
    }
    let lat = builder.finish();
    let mut kernel_rows = Vec::new();
    let mut image_rows = Vec::new();
    for r in &lat.rows {
        if leading(r, 0).unwrap() >= width {
            kernel_rows.push(r[width..].to_vec());
        } else {
            image_rows.push(r);
        }
    }
    // Rows with pivots in the right block are already in Howell form there.
    let kernel = Lattice {
        ring,
        width: count,
        rows: kernel_rows,
    };
    let particular = b.and_then(|b| {
        assert_eq!(b.len(), width);
        let mut t = b.to_vec();
        t.resize(width + count, 0);
        reduce_against(ring, image_rows.into_iter(), &mut t);
        if t[..width].iter().any(|&x| x != 0) {
            None
        } else {
            Some(t[width..].iter().map(|&x| ring.neg(x)).collect())
        }
    });
    RowSolution { particular, kernel }
}
