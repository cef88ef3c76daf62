//! Exhaustive minimum rank distance over the centralizer.

use rayon::prelude::*;

use crate::f2field::{rank_of_words, BinMatrix, BitVec, EchelonBasis};
use crate::pauli::StackedError;

use super::{QgabError, StabilizerGroup};

/// Largest centralizer dimension enumerated.
pub const MAX_CENTRALIZER_LOG2: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinRankDistance {
    /// `None` when the centralizer equals the group (no logical operators).
    pub distance: Option<usize>,
    /// A minimum-rank non-stabilizer centralizer element.
    pub witness: Option<StackedError>,
    pub centralizer_dim: usize,
    pub stabilizer_dim: usize,
    /// Number of non-stabilizer elements inspected.
    pub checked: u64,
}

pub(super) fn min_rank_distance(group: &StabilizerGroup) -> Result<MinRankDistance, QgabError> {
    let (layers, cells) = (group.layers(), group.cells());
    let q = layers * cells;
    // row g is the symplectic dual of generator g: row · v = [g, v]
    let rows: Vec<BitVec> = group
        .generators()
        .map(|g| {
            let v = g.symplectic_vector();
            v.slice(q, q).concat(&v.slice(0, q))
        })
        .collect();
    let kernel = BinMatrix::from_rows(&rows, 2 * q).kernel();
    let dim = kernel.len();
    if dim > MAX_CENTRALIZER_LOG2 {
        return Err(QgabError::TooLarge {
            dim,
            limit: MAX_CENTRALIZER_LOG2,
        });
    }

    // Stabilizer generators first, then a complement spanning the logicals,
    // so an element is a stabilizer iff its high coefficients vanish.
    let mut echelon = EchelonBasis::new(2 * q);
    let mut ordered: Vec<BitVec> = Vec::new();
    for g in group.generators() {
        let v = g.symplectic_vector();
        if echelon.insert(v.clone()) {
            ordered.push(v);
        }
    }
    let stabilizer_dim = ordered.len();
    for v in kernel {
        if echelon.insert(v.clone()) {
            ordered.push(v);
        }
    }
    if ordered.len() != dim {
        return Err(QgabError::Invariant(
            "stabilizer group is not contained in its centralizer".into(),
        ));
    }
    let words: Vec<Vec<u64>> = ordered
        .iter()
        .map(|v| {
            let e =
                StackedError::from_symplectic_vector(layers, cells, v).expect("dimensions match");
            e.x_words().iter().chain(e.z_words()).copied().collect()
        })
        .collect();

    let total: u64 = 1 << dim;
    let chunks = 64u64.min(total);
    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            scan(
                &words,
                stabilizer_dim,
                c * total / chunks,
                (c + 1) * total / chunks,
            )
        })
        .reduce_with(|a, b| if (a.0, a.1) <= (b.0, b.1) { a } else { b });
    let checked = total - (1u64 << stabilizer_dim);
    let witness = best.map(|(_, gray)| {
        let mut acc = vec![0u64; 2 * cells];
        accumulate(&mut acc, &words, gray);
        StackedError::from_cell_words(layers, acc[..cells].to_vec(), acc[cells..].to_vec())
            .expect("dimensions match")
    });
    Ok(MinRankDistance {
        distance: best.map(|b| b.0),
        witness,
        centralizer_dim: dim,
        stabilizer_dim,
        checked,
    })
}

fn accumulate(acc: &mut [u64], words: &[Vec<u64>], coeffs: u64) {
    for (b, w) in words.iter().enumerate() {
        if (coeffs >> b) & 1 == 1 {
            for (a, x) in acc.iter_mut().zip(w) {
                *a ^= x;
            }
        }
    }
}

/// Gray-code scan of indices `[start, end)`: returns the smallest
/// `(rank, coefficients)` among non-stabilizer elements.
fn scan(words: &[Vec<u64>], stabilizer_dim: usize, start: u64, end: u64) -> Option<(usize, u64)> {
    let width = words.first().map_or(0, Vec::len);
    let mut acc = vec![0u64; width];
    let mut scratch = vec![0u64; width];
    let mut gray = start ^ (start >> 1);
    accumulate(&mut acc, words, gray);
    let mut best: Option<(usize, u64)> = None;
    let mut i = start;
    loop {
        if gray >> stabilizer_dim != 0 {
            scratch.copy_from_slice(&acc);
            let rank = rank_of_words(&mut scratch);
            if best.is_none_or(|b| (rank, gray) < b) {
                best = Some((rank, gray));
            }
        }
        i += 1;
        if i >= end {
            return best;
        }
        let b = i.trailing_zeros() as usize;
        gray ^= 1 << b;
        for (a, x) in acc.iter_mut().zip(&words[b]) {
            *a ^= x;
        }
    }
}
