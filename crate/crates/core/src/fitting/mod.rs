//! Ideals and finitely presented modules over `Lambda_{n,k}`.
//!
//! Ideals are stored as `Z/p^k`-lattices in Howell normal form, so ideal
//! equality is basis equality and membership is greedy reduction. Modules are
//! given by an `r x s` relation matrix: `r` generators, one relation per column.

pub mod enumerate;
pub mod lemmas;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElement, RingShape};
use crate::lattice::{solve_rows, HowellBuilder, Lattice};

/// Fitting ideals are computed from explicit minors; this bounds the minor size.
pub const MAX_MINOR_SIZE: usize = 6;

/// Inserts `g, Xg, X^2 g, ...` into `builder`; returns false if `g` was already present.
fn insert_orbit(builder: &mut HowellBuilder, g: &GroupRingElement) -> bool {
    if builder.contains(g.residues()) {
        return false;
    }
    let mut v = g.clone();
    for _ in 0..g.shape().dim() {
        if v.is_zero() || !builder.insert(v.residues().to_vec()) {
            break;
        }
        v = v.mul_x();
    }
    true
}

/// Same as [`insert_orbit`] for vectors in `Lambda^s`, flattened block by block.
fn insert_vector_orbit(builder: &mut HowellBuilder, g: &[GroupRingElement]) -> bool {
    if builder.contains(&flatten(g)) {
        return false;
    }
    let mut v = g.to_vec();
    let dim = g.first().map_or(0, |e| e.shape().dim());
    for _ in 0..dim {
        if v.iter().all(|e| e.is_zero()) || !builder.insert(flatten(&v)) {
            break;
        }
        v = v.iter().map(|e| e.mul_x()).collect();
    }
    true
}

fn flatten(v: &[GroupRingElement]) -> Vec<u64> {
    v.iter().flat_map(|e| e.residues().iter().copied()).collect()
}

fn unflatten(shape: &RingShape, row: &[u64]) -> Result<Vec<GroupRingElement>> {
    row.chunks(shape.dim())
        .map(|c| shape.from_residues(c.to_vec()))
        .collect()
}

/// An ideal of `Lambda_{n,k}`.
#[derive(Debug, Clone)]
pub struct IdealLattice {
    shape: RingShape,
    generators: Vec<GroupRingElement>,
    basis: Lattice,
}

impl PartialEq for IdealLattice {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.basis == other.basis
    }
}

impl Eq for IdealLattice {}

impl IdealLattice {
    /// The ideal generated by `gens`; generators already in the ideal are dropped.
    pub fn from_generators(shape: &RingShape, gens: impl IntoIterator<Item = GroupRingElement>) -> Result<Self> {
        let ring = shape.residue_ring()?;
        let mut builder = HowellBuilder::new(ring, shape.dim());
        let mut kept = Vec::new();
        for g in gens {
            shape.check_same(&g.shape())?;
            if insert_orbit(&mut builder, &g) {
                kept.push(g);
            }
        }
        Ok(Self {
            shape: *shape,
            generators: kept,
            basis: builder.finish(),
        })
    }

    pub fn unit(shape: &RingShape) -> Result<Self> {
        Self::from_generators(shape, [shape.one()])
    }

    pub fn zero(shape: &RingShape) -> Result<Self> {
        Self::from_generators(shape, [])
    }

    pub fn shape(&self) -> RingShape {
        self.shape
    }

    pub fn generators(&self) -> &[GroupRingElement] {
        &self.generators
    }

    pub fn basis(&self) -> &Lattice {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.basis.is_full()
    }

    /// `log_p` of the number of elements of the ideal.
    pub fn log_p_size(&self) -> u32 {
        self.basis.log_p_size()
    }

    pub fn contains(&self, f: &GroupRingElement) -> Result<bool> {
        self.shape.check_same(&f.shape())?;
        Ok(self.basis.contains(f.residues()))
    }

    pub fn contains_ideal(&self, other: &Self) -> Result<bool> {
        self.shape.check_same(&other.shape)?;
        Ok(self.basis.contains_lattice(&other.basis))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        Self::from_generators(
            &self.shape,
            self.generators.iter().chain(&other.generators).cloned(),
        )
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a.mul(b)?);
            }
        }
        Self::from_generators(&self.shape, gens)
    }

    /// Image under `Lambda_{n,k} -> (Lambda_{n,k})/I` for a supported quotient `I`.
    pub fn image(&self, quotient: Quotient) -> Result<Self> {
        let shape = quotient.target(&self.shape)?;
        let gens = self
            .generators
            .iter()
            .map(|g| quotient.apply(g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&shape, gens)
    }

    pub fn report(&self) -> IdealReport {
        IdealReport {
            shape: self.shape,
            generators: self.generators.clone(),
            basis: self.basis.rows().to_vec(),
            log_p_size: self.log_p_size(),
            is_unit: self.is_unit(),
            is_zero: self.is_zero(),
        }
    }
}

/// JSON view of an ideal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealReport {
    pub shape: RingShape,
    pub generators: Vec<GroupRingElement>,
    pub basis: Vec<Vec<u64>>,
    pub log_p_size: u32,
    pub is_unit: bool,
    pub is_zero: bool,
}

/// Quotients of `Lambda_{n,k}` that are again rings of the same kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quotient {
    /// `(p^j)`: lowers the precision to `min(j, k)`.
    PrimePower(u32),
    /// `(omega_m)`: passes to layer `min(m, n)`.
    Omega(u32),
}

impl Quotient {
    pub fn target(&self, shape: &RingShape) -> Result<RingShape> {
        let k = shape.k().ok_or(Error::ExactModeUnsupported)?;
        match *self {
            Quotient::PrimePower(0) => Err(Error::UnsupportedQuotient(
                "(p^0) is the unit ideal".into(),
            )),
            Quotient::PrimePower(j) => shape.with_precision(j.min(k)),
            Quotient::Omega(m) => shape.at_layer(m.min(shape.n())),
        }
    }

    pub fn apply(&self, f: &GroupRingElement) -> Result<GroupRingElement> {
        let shape = f.shape();
        let target = self.target(&shape)?;
        match *self {
            Quotient::PrimePower(_) => f.to_modular(target.k().unwrap()),
            Quotient::Omega(_) => f.project(target.n()),
        }
    }
}

/// A module `Lambda^r / (columns of the r x s relation matrix)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FPModule {
    shape: RingShape,
    generators: usize,
    relations: usize,
    matrix: Vec<Vec<GroupRingElement>>,
}

impl FPModule {
    pub fn new(shape: &RingShape, matrix: Vec<Vec<GroupRingElement>>, relations: usize) -> Result<Self> {
        shape.residue_ring()?;
        for row in &matrix {
            if row.len() != relations {
                return Err(Error::ShapeMismatch(format!(
                    "row of length {} in a matrix with {relations} relations",
                    row.len()
                )));
            }
            for e in row {
                shape.check_same(&e.shape())?;
            }
        }
        Ok(Self {
            shape: *shape,
            generators: matrix.len(),
            relations,
            matrix,
        })
    }

    /// Builds from rows, reading the relation count off the first row.
    pub fn from_rows(shape: &RingShape, matrix: Vec<Vec<GroupRingElement>>) -> Result<Self> {
        let s = matrix.first().map_or(0, |r| r.len());
        Self::new(shape, matrix, s)
    }

    /// `Lambda / (f)`.
    pub fn cyclic(f: &GroupRingElement) -> Result<Self> {
        Self::new(&f.shape(), vec![vec![f.clone()]], 1)
    }

    /// `Lambda^r` with no relations.
    pub fn free(shape: &RingShape, r: usize) -> Result<Self> {
        Self::new(shape, vec![Vec::new(); r], 0)
    }

    pub fn diagonal(shape: &RingShape, entries: &[GroupRingElement]) -> Result<Self> {
        let n = entries.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { entries[i].clone() } else { shape.zero() })
                    .collect()
            })
            .collect();
        Self::new(shape, matrix, n)
    }

    pub fn shape(&self) -> RingShape {
        self.shape
    }

    pub fn num_generators(&self) -> usize {
        self.generators
    }

    pub fn num_relations(&self) -> usize {
        self.relations
    }

    pub fn matrix(&self) -> &[Vec<GroupRingElement>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.matrix[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<GroupRingElement> {
        self.matrix.iter().map(|row| row[j].clone()).collect()
    }

    /// The quotient by additional relations (given as columns).
    pub fn with_relations(&self, columns: &[Vec<GroupRingElement>]) -> Result<Self> {
        let mut matrix = self.matrix.clone();
        for col in columns {
            if col.len() != self.generators {
                return Err(Error::ShapeMismatch(format!(
                    "relation of length {} for {} generators",
                    col.len(),
                    self.generators
                )));
            }
            for (row, e) in matrix.iter_mut().zip(col) {
                row.push(e.clone());
            }
        }
        Self::new(&self.shape, matrix, self.relations + columns.len())
    }

    /// The ideal of `r x r` minors.
    pub fn fitting_ideal(&self) -> Result<IdealLattice> {
        let (r, s) = (self.generators, self.relations);
        if r == 0 {
            return IdealLattice::unit(&self.shape);
        }
        if r > MAX_MINOR_SIZE {
            return Err(Error::TooManyGenerators(r));
        }
        if s < r {
            return IdealLattice::zero(&self.shape);
        }
        let rows: Vec<usize> = (0..r).collect();
        let minors = Combinations::new(s, r)
            .map(|cols| determinant(&self.shape, &self.matrix, &rows, &cols))
            .filter(|m| !m.is_zero());
        IdealLattice::from_generators(&self.shape, minors)
    }

    /// Presentation of `M / IM` over the quotient ring.
    pub fn base_change(&self, quotient: Quotient) -> Result<Self> {
        let shape = quotient.target(&self.shape)?;
        let matrix = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|e| quotient.apply(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(&shape, matrix, self.relations)
    }

    /// Presentation of the submodule generated by the images of `vectors` (each in `Lambda^r`).
    pub fn submodule(&self, vectors: &[Vec<GroupRingElement>]) -> Result<Self> {
        let t = vectors.len();
        for v in vectors {
            if v.len() != self.generators {
                return Err(Error::ShapeMismatch("submodule generator length".into()));
            }
        }
        // Kernel of Lambda^t + Lambda^s -> Lambda^r, (c, d) -> sum c_i v_i + A d;
        // its c-parts are the relations among the v_i in M.
        let columns: Vec<Vec<GroupRingElement>> = vectors
            .iter()
            .cloned()
            .chain((0..self.relations).map(|j| self.column(j)))
            .collect();
        let a: Vec<Vec<GroupRingElement>> = (0..self.generators)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        let zero = vec![self.shape.zero(); self.generators];
        let sol = solve_linear(&self.shape, &a, columns.len(), &zero)?;
        let d = self.shape.dim();
        let rows: Vec<Vec<GroupRingElement>> = sol
            .kernel
            .rows()
            .iter()
            .map(|row| unflatten(&self.shape, &row[..t * d]))
            .collect::<Result<_>>()?;
        let relations = prune_vectors(&self.shape, t, rows)?;
        let matrix = (0..t)
            .map(|i| relations.iter().map(|c| c[i].clone()).collect())
            .collect();
        Self::new(&self.shape, matrix, relations.len())
    }
}

/// Block upper-triangular presentation `[[A1, C], [0, A3]]` of an extension of `M3` by `M1`.
pub fn build_extension(m1: &FPModule, m3: &FPModule, coupling: &[Vec<GroupRingElement>]) -> Result<FPModule> {
    m1.shape.check_same(&m3.shape)?;
    if coupling.len() != m1.generators || coupling.iter().any(|row| row.len() != m3.relations) {
        return Err(Error::ShapeMismatch(format!(
            "coupling block must be {} x {}",
            m1.generators, m3.relations
        )));
    }
    let shape = m1.shape;
    let mut matrix = Vec::with_capacity(m1.generators + m3.generators);
    for (row, c) in m1.matrix.iter().zip(coupling) {
        matrix.push(row.iter().chain(c).cloned().collect());
    }
    for row in &m3.matrix {
        let mut full = vec![shape.zero(); m1.relations];
        full.extend(row.iter().cloned());
        matrix.push(full);
    }
    FPModule::new(&shape, matrix, m1.relations + m3.relations)
}

/// Solutions of `A x = b` for an `r x s` matrix over `Lambda_{n,k}`.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub particular: Option<Vec<GroupRingElement>>,
    /// `{x : A x = 0}` as a `Z/p^k`-lattice in `(Z/p^k)^{s p^n}`, block `j` holding `x_j`.
    pub kernel: Lattice,
}

impl LinearSolution {
    /// Kernel generators as a `Lambda`-module, redundant ones dropped.
    pub fn kernel_generators(&self, shape: &RingShape) -> Result<Vec<Vec<GroupRingElement>>> {
        let s = self.kernel.width() / shape.dim();
        let rows = self
            .kernel
            .rows()
            .iter()
            .map(|r| unflatten(shape, r))
            .collect::<Result<Vec<_>>>()?;
        prune_vectors(shape, s, rows)
    }
}

/// Solves `A x = b` by linearizing over `Z/p^k`.
pub fn solve_linear(
    shape: &RingShape,
    a: &[Vec<GroupRingElement>],
    s: usize,
    b: &[GroupRingElement],
) -> Result<LinearSolution> {
    let ring = shape.residue_ring()?;
    let r = a.len();
    if b.len() != r || a.iter().any(|row| row.len() != s) {
        return Err(Error::ShapeMismatch(format!(
            "system is {r} x {s} with a right-hand side of length {}",
            b.len()
        )));
    }
    for e in a.iter().flatten().chain(b) {
        shape.check_same(&e.shape())?;
    }
    let d = shape.dim();
    // Row (j, t) of the linear map is A e_j X^t, flattened over the r output blocks.
    let mut rows = Vec::with_capacity(s * d);
    for j in 0..s {
        let mut col: Vec<GroupRingElement> = a.iter().map(|row| row[j].clone()).collect();
        for _ in 0..d {
            rows.push(flatten(&col));
            col = col.iter().map(|e| e.mul_x()).collect();
        }
    }
    let target = flatten(b);
    let sol = solve_rows(ring, &rows, r * d, Some(&target));
    let particular = sol
        .particular
        .map(|y| unflatten(shape, &y))
        .transpose()?;
    Ok(LinearSolution {
        particular,
        kernel: sol.kernel,
    })
}

/// Keeps only the vectors that enlarge the `Lambda`-span of the ones kept so far.
pub fn prune_vectors(
    shape: &RingShape,
    len: usize,
    vectors: impl IntoIterator<Item = Vec<GroupRingElement>>,
) -> Result<Vec<Vec<GroupRingElement>>> {
    let ring = shape.residue_ring()?;
    let mut builder = HowellBuilder::new(ring, len * shape.dim());
    let mut kept = Vec::new();
    for v in vectors {
        if v.len() != len {
            return Err(Error::ShapeMismatch("vector length".into()));
        }
        if insert_vector_orbit(&mut builder, &v) {
            kept.push(v);
        }
    }
    Ok(kept)
}

/// Determinant of the square submatrix on `rows x cols`, by cofactor expansion.
fn determinant(
    shape: &RingShape,
    m: &[Vec<GroupRingElement>],
    rows: &[usize],
    cols: &[usize],
) -> GroupRingElement {
    match rows.len() {
        0 => shape.one(),
        1 => m[rows[0]][cols[0]].clone(),
        2 => {
            let a = m[rows[0]][cols[0]].mul(&m[rows[1]][cols[1]]).unwrap();
            let b = m[rows[0]][cols[1]].mul(&m[rows[1]][cols[0]]).unwrap();
            a.sub(&b).unwrap()
        }
        _ => {
            let mut acc = shape.zero();
            for (idx, &c) in cols.iter().enumerate() {
                let entry = &m[rows[0]][c];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = entry.mul(&determinant(shape, m, &rows[1..], &rest)).unwrap();
                acc = if idx % 2 == 0 {
                    acc.add(&term).unwrap()
                } else {
                    acc.sub(&term).unwrap()
                };
            }
            acc
        }
    }
}

/// Increasing `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    shape: RingShape,
    matrix: Vec<Vec<GroupRingElement>>,
}

impl Serialize for FPModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleRepr {
            shape: self.shape,
            matrix: self.matrix.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FPModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ModuleRepr::deserialize(d)?;
        FPModule::from_rows(&repr.shape, repr.matrix).map_err(serde::de::Error::custom)
    }
}
