//! Exhaustive enumeration in tiny rings, as an oracle for lattice-based answers.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElement, RingShape};

/// Largest ring enumerated.
pub const MAX_ELEMENTS: u64 = 1 << 16;

/// Every element of `Lambda_{n,k}`, in lexicographic order of `X`-coefficients.
pub fn all_elements(shape: &RingShape) -> Result<Vec<GroupRingElement>> {
    let m = shape.residue_ring()?.modulus();
    let d = shape.dim() as u32;
    let size = m
        .checked_pow(d)
        .filter(|&s| s <= MAX_ELEMENTS)
        .ok_or_else(|| Error::InvalidInput(format!("{shape} is too large to enumerate")))?;
    (0..size)
        .map(|mut i| {
            let coeffs = (0..d)
                .map(|_| {
                    let c = i % m;
                    i /= m;
                    c
                })
                .collect();
            shape.from_residues(coeffs)
        })
        .collect()
}

/// The ideal generated by `gens` as a set of coefficient vectors, by summing principal ideals.
pub fn ideal_by_enumeration(shape: &RingShape, gens: &[GroupRingElement]) -> Result<HashSet<Vec<u64>>> {
    let elements = all_elements(shape)?;
    let m = shape.residue_ring()?.modulus();
    let mut ideal: HashSet<Vec<u64>> = HashSet::from([shape.zero().residues().to_vec()]);
    for g in gens {
        let principal = elements
            .iter()
            .map(|a| a.mul(g).map(|x| x.residues().to_vec()))
            .collect::<Result<HashSet<_>>>()?;
        let mut next = HashSet::with_capacity(ideal.len() * principal.len());
        for x in &ideal {
            for y in &principal {
                next.insert(x.iter().zip(y).map(|(&a, &b)| (a + b) % m).collect());
            }
        }
        ideal = next;
    }
    Ok(ideal)
}
