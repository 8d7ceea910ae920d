//! Random instance generators and checks for the standard Fitting-ideal lemmas:
//! quotients, extensions (general and square), base change, presentation
//! independence and submodules.

use rand::Rng;
use serde::Serialize;

use super::{build_extension, FPModule, Quotient};
use crate::error::Result;
use crate::group_ring::{GroupRingElement, RingShape, Sign};
use crate::parallel::{instance_rng, map_indexed, Execution};

/// A random element, biased towards the maximal ideal so that Fitting ideals are
/// usually proper.
pub fn random_element<R: Rng>(shape: &RingShape, rng: &mut R) -> GroupRingElement {
    let ring = shape.residue_ring().expect("mod-p^k shape");
    let coeffs = (0..shape.dim()).map(|_| rng.gen_range(0..ring.modulus())).collect();
    let f = shape.from_residues(coeffs).unwrap();
    let factor = match rng.gen_range(0..6) {
        0 => shape.one(),
        1 => shape.scalar(ring.p() as i64),
        2 => shape.x(),
        3 => shape.x().pow(rng.gen_range(1..4)),
        4 if shape.n() > 0 => shape.omega_tilde(if rng.gen() { Sign::Plus } else { Sign::Minus }),
        _ => shape.x().scale(ring.p() as i64),
    };
    f.mul(&factor).unwrap()
}

pub fn random_matrix<R: Rng>(shape: &RingShape, r: usize, s: usize, rng: &mut R) -> Vec<Vec<GroupRingElement>> {
    (0..r)
        .map(|_| (0..s).map(|_| random_element(shape, rng)).collect())
        .collect()
}

pub fn random_module<R: Rng>(shape: &RingShape, r: usize, s: usize, rng: &mut R) -> FPModule {
    FPModule::new(shape, random_matrix(shape, r, s, rng), s).unwrap()
}

fn random_unit<R: Rng>(shape: &RingShape, rng: &mut R) -> GroupRingElement {
    loop {
        let f = random_element(shape, rng);
        let g = f.add(&shape.one()).unwrap();
        if g.is_unit().unwrap() {
            return g;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `M -> N` surjective implies `Fitt(M) in Fitt(N)`.
    Quotient,
    /// `Fitt(M1) Fitt(M3) in Fitt(M2)` for `0 -> M1 -> M2 -> M3 -> 0`.
    Exact,
    /// Equality in the exact case when `M3` has a square presentation.
    Square,
    /// `Fitt(M / omega_m M) = image of Fitt(M)`.
    BaseChange,
    /// Invariance under elementary presentation moves.
    PresentationIndependence,
    /// `A in B` implies `Fitt(B) in Fitt(A)`.
    Submodule,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Quotient,
        Lemma::Exact,
        Lemma::Square,
        Lemma::BaseChange,
        Lemma::PresentationIndependence,
        Lemma::Submodule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Quotient => "quotient",
            Lemma::Exact => "exact",
            Lemma::Square => "square",
            Lemma::BaseChange => "base_change",
            Lemma::PresentationIndependence => "presentation_independence",
            Lemma::Submodule => "submodule",
        }
    }

    /// Runs one random instance; `Ok(false)` is a counterexample.
    pub fn check<R: Rng>(self, shape: &RingShape, rng: &mut R) -> Result<bool> {
        match self {
            Lemma::Quotient => check_quotient(shape, rng),
            Lemma::Exact => check_extension(shape, rng, false),
            Lemma::Square => check_extension(shape, rng, true),
            Lemma::BaseChange => check_base_change(shape, rng),
            Lemma::PresentationIndependence => check_presentation_moves(shape, rng),
            Lemma::Submodule => check_submodule(shape, rng),
        }
    }
}

fn check_quotient<R: Rng>(shape: &RingShape, rng: &mut R) -> Result<bool> {
    let r = rng.gen_range(1..=3);
    let s = rng.gen_range(0..=3);
    let m = random_module(shape, r, s, rng);
    let extra = rng.gen_range(1..=2);
    let cols: Vec<Vec<GroupRingElement>> = (0..extra)
        .map(|_| (0..r).map(|_| random_element(shape, rng)).collect())
        .collect();
    let n = m.with_relations(&cols)?;
    n.fitting_ideal()?.contains_ideal(&m.fitting_ideal()?)
}

fn check_extension<R: Rng>(shape: &RingShape, rng: &mut R, square: bool) -> Result<bool> {
    let r1 = rng.gen_range(1..=2);
    let s1 = rng.gen_range(r1..=r1 + 1);
    let r3 = rng.gen_range(1..=2);
    let s3 = if square { r3 } else { rng.gen_range(r3..=r3 + 1) };
    let m1 = random_module(shape, r1, s1, rng);
    let m3 = random_module(shape, r3, s3, rng);
    let coupling = random_matrix(shape, r1, s3, rng);
    let m2 = build_extension(&m1, &m3, &coupling)?;
    let product = m1.fitting_ideal()?.product(&m3.fitting_ideal()?)?;
    let middle = m2.fitting_ideal()?;
    if square {
        Ok(middle == product)
    } else {
        middle.contains_ideal(&product)
    }
}

fn check_base_change<R: Rng>(shape: &RingShape, rng: &mut R) -> Result<bool> {
    let r = rng.gen_range(1..=2);
    let s = rng.gen_range(r..=r + 2);
    let m = random_module(shape, r, s, rng);
    let q = if shape.n() > 0 {
        Quotient::Omega(rng.gen_range(0..shape.n()))
    } else {
        Quotient::PrimePower(rng.gen_range(1..=shape.k().unwrap()))
    };
    Ok(m.base_change(q)?.fitting_ideal()? == m.fitting_ideal()?.image(q)?)
}

/// Applies a random elementary move that does not change the module.
pub fn random_move<R: Rng>(m: &FPModule, rng: &mut R) -> Result<FPModule> {
    let shape = m.shape();
    let (r, s) = (m.num_generators(), m.num_relations());
    let mut matrix = m.matrix().to_vec();
    match rng.gen_range(0..6) {
        // Row operation: change of generators.
        0 if r >= 2 => {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            let c = random_element(&shape, rng);
            for col in 0..s {
                let add = matrix[j][col].mul(&c)?;
                matrix[i][col] = matrix[i][col].add(&add)?;
            }
            FPModule::new(&shape, matrix, s)
        }
        // Column operation: change of relations.
        1 if s >= 2 => {
            let i = rng.gen_range(0..s);
            let j = (i + rng.gen_range(1..s)) % s;
            let c = random_element(&shape, rng);
            for row in matrix.iter_mut() {
                let add = row[j].mul(&c)?;
                row[i] = row[i].add(&add)?;
            }
            FPModule::new(&shape, matrix, s)
        }
        // Permutation of generators and of relations.
        2 => {
            if r >= 2 {
                let (a, b) = (rng.gen_range(0..r), rng.gen_range(0..r));
                matrix.swap(a, b);
            }
            if s >= 2 {
                let (a, b) = (rng.gen_range(0..s), rng.gen_range(0..s));
                for row in matrix.iter_mut() {
                    row.swap(a, b);
                }
            }
            FPModule::new(&shape, matrix, s)
        }
        // Scaling a generator or relation by a unit.
        3 if r >= 1 && s >= 1 => {
            let u = random_unit(&shape, rng);
            if rng.gen() {
                let i = rng.gen_range(0..r);
                matrix[i] = matrix[i].iter().map(|e| e.mul(&u)).collect::<Result<_>>()?;
            } else {
                let j = rng.gen_range(0..s);
                for row in matrix.iter_mut() {
                    row[j] = row[j].mul(&u)?;
                }
            }
            FPModule::new(&shape, matrix, s)
        }
        // A redundant relation.
        4 if s >= 1 => {
            let c1 = random_element(&shape, rng);
            let c2 = random_element(&shape, rng);
            let (a, b) = (rng.gen_range(0..s), rng.gen_range(0..s));
            let col: Vec<GroupRingElement> = (0..r)
                .map(|i| matrix[i][a].mul(&c1)?.add(&matrix[i][b].mul(&c2)?))
                .collect::<Result<_>>()?;
            m.with_relations(&[col])
        }
        // A new generator g' = sum a_i g_i, with relation g' - sum a_i g_i.
        _ if r < super::MAX_MINOR_SIZE => {
            let a: Vec<GroupRingElement> = (0..r).map(|_| random_element(&shape, rng)).collect();
            for (row, ai) in matrix.iter_mut().zip(&a) {
                row.push(ai.neg());
            }
            let mut last = vec![shape.zero(); s];
            last.push(shape.one());
            matrix.push(last);
            FPModule::new(&shape, matrix, s + 1)
        }
        _ => Ok(m.clone()),
    }
}

fn check_presentation_moves<R: Rng>(shape: &RingShape, rng: &mut R) -> Result<bool> {
    let r = rng.gen_range(1..=2);
    let s = rng.gen_range(1..=3);
    let m = random_module(shape, r, s, rng);
    let reference = m.fitting_ideal()?;
    let mut current = m;
    for _ in 0..rng.gen_range(1..=4) {
        current = random_move(&current, rng)?;
    }
    Ok(current.fitting_ideal()? == reference)
}

fn check_submodule<R: Rng>(shape: &RingShape, rng: &mut R) -> Result<bool> {
    let r = rng.gen_range(1..=2);
    let s = rng.gen_range(r..=r + 1);
    let b = random_module(shape, r, s, rng);
    let t = rng.gen_range(1..=2);
    let gens: Vec<Vec<GroupRingElement>> = (0..t)
        .map(|_| (0..r).map(|_| random_element(shape, rng)).collect())
        .collect();
    let a = b.submodule(&gens)?;
    a.fitting_ideal()?.contains_ideal(&b.fitting_ideal()?)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSummary {
    pub lemma: Lemma,
    pub instances: usize,
    /// Instance indices whose check failed; rerun with the same seed to reproduce.
    pub failures: Vec<usize>,
}

impl LemmaSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `instances` random checks of each lemma. Instance `i` of lemma `j`
/// draws from stream `j * instances + i` of `seed`.
pub fn run_lemma_suite(
    shape: &RingShape,
    lemmas: &[Lemma],
    instances: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<LemmaSummary>> {
    let total = lemmas.len() * instances;
    let outcomes = map_indexed(exec, total, |idx| {
        let lemma = lemmas[idx / instances];
        let mut rng = instance_rng(seed, idx as u64);
        lemma.check(shape, &mut rng)
    });
    let mut summaries: Vec<LemmaSummary> = lemmas
        .iter()
        .map(|&lemma| LemmaSummary {
            lemma,
            instances,
            failures: Vec::new(),
        })
        .collect();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        if !outcome? {
            summaries[idx / instances].failures.push(idx % instances);
        }
    }
    Ok(summaries)
}
