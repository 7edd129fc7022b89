//! Simplicial homology over prime fields.
//!
//! Betti numbers are computed from ranks of boundary matrices, which are
//! reduced by the same sparse column-elimination routine that the
//! persistence module reuses for graded chains.

use std::collections::HashMap;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::Error;
use crate::Result;

/// Arithmetic in GF(p), elements as canonical representatives in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }
}

/// A sparse column: strictly increasing row indices with nonzero entries.
pub(crate) type SparseColumn = Vec<(usize, u64)>;

/// `target += scale * source`, merging sorted entries and dropping zeros.
pub(crate) fn add_scaled(
    target: &SparseColumn,
    source: &SparseColumn,
    scale: u64,
    field: &PrimeField,
) -> SparseColumn {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        match (target.get(i), source.get(j)) {
            (Some(&(ri, ci)), Some(&(rj, cj))) => {
                if ri < rj {
                    out.push((ri, ci));
                    i += 1;
                } else if rj < ri {
                    let v = field.mul(scale, cj);
                    if v != 0 {
                        out.push((rj, v));
                    }
                    j += 1;
                } else {
                    let v = field.add(ci, field.mul(scale, cj));
                    if v != 0 {
                        out.push((ri, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            (Some(&(ri, ci)), None) => {
                out.push((ri, ci));
                i += 1;
            }
            (None, Some(&(rj, cj))) => {
                let v = field.mul(scale, cj);
                if v != 0 {
                    out.push((rj, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Left-to-right column reduction.  After the call, every nonzero column has
/// a distinct lowest row, recorded in `low_to_col`.
pub(crate) struct Reduction {
    pub columns: Vec<SparseColumn>,
    pub low_to_col: HashMap<usize, usize>,
}

pub(crate) fn reduce_columns(mut columns: Vec<SparseColumn>, field: &PrimeField) -> Reduction {
    let mut low_to_col: HashMap<usize, usize> = HashMap::new();
    for j in 0..columns.len() {
        loop {
            let Some(&(row, coeff)) = columns[j].last() else {
                break;
            };
            let Some(&k) = low_to_col.get(&row) else {
                low_to_col.insert(row, j);
                break;
            };
            // k < j: pivots only ever point at earlier columns
            let (head, tail) = columns.split_at_mut(j);
            let pivot = &head[k];
            let scale = field.neg(field.mul(coeff, field.inv(pivot.last().unwrap().1)));
            tail[0] = add_scaled(&tail[0], pivot, scale, field);
        }
    }
    Reduction {
        columns,
        low_to_col,
    }
}

fn rank(columns: Vec<SparseColumn>, field: &PrimeField) -> usize {
    reduce_columns(columns, field).low_to_col.len()
}

/// Signed boundary columns of the dimension-`d` simplices, rows indexed by
/// the given enumeration of (d-1)-simplices.
fn boundary_columns(
    simplices: &[&Simplex],
    row_index: &HashMap<&Simplex, usize>,
    field: &PrimeField,
) -> Vec<SparseColumn> {
    simplices
        .iter()
        .map(|s| {
            let mut col: SparseColumn = s
                .facets()
                .into_iter()
                .enumerate()
                .map(|(i, facet)| {
                    let row = row_index[&facet];
                    let sign = if i % 2 == 0 { 1 } else { field.neg(1) };
                    (row, sign)
                })
                .collect();
            col.sort_unstable_by_key(|&(row, _)| row);
            col
        })
        .collect()
}

/// Betti numbers `b_0, ..., b_dim` of a complex over GF(p).
pub fn betti_numbers(complex: &SimplicialComplex, field: &PrimeField) -> Vec<usize> {
    let Some(dim) = complex.dim() else {
        return Vec::new();
    };
    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); dim + 1];
    for s in complex.sorted_simplices() {
        by_dim[s.dim()].push(s);
    }
    // rank of each boundary map d_k : C_k -> C_{k-1}, with d_0 = 0
    let mut ranks = vec![0usize; dim + 2];
    for k in 1..=dim {
        let row_index: HashMap<&Simplex, usize> = by_dim[k - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i))
            .collect();
        let cols = boundary_columns(&by_dim[k], &row_index, field);
        ranks[k] = rank(cols, field);
    }
    (0..=dim)
        .map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}
