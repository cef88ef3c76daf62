//! Brute-force oracles: minimum rank distance and nearest-codeword decoding.
//!
//! Codewords are enumerated in Gray-code order over the F2-basis
//! `x^b · β^{2^i}`; message index bit `i*n + b` is bit `b` of coefficient
//! `a_i`. Work is split into contiguous index ranges across threads.

use rayon::prelude::*;

use super::{GabidulinCode, GabidulinError, RankWord};
use crate::f2field::{rank_of_words, FieldElement};

/// Largest `n·k` accepted by the exhaustive scans.
pub const MAX_EXHAUSTIVE_LOG2: usize = 22;

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveDecoded {
    pub codeword: RankWord,
    pub message: Vec<FieldElement>,
    pub distance: usize,
}

impl GabidulinCode {
    fn check_scan_size(&self) -> Result<u32, GabidulinError> {
        let log2 = self.n() * self.k();
        if log2 > MAX_EXHAUSTIVE_LOG2 {
            return Err(GabidulinError::TooLarge {
                log2_size: log2,
                limit: MAX_EXHAUSTIVE_LOG2,
            });
        }
        Ok(log2 as u32)
    }

    /// Columns of each F2-generator in reference coordinates.
    fn generator_columns(&self) -> Vec<Vec<u64>> {
        self.f2_generators()
            .iter()
            .map(|g| g.column_words(self.basis()))
            .collect()
    }

    /// Visits every message index in `range` with `(index, columns of codeword)`.
    fn scan<F>(gens: &[Vec<u64>], range: std::ops::Range<u64>, mut visit: F)
    where
        F: FnMut(u64, &[u64]),
    {
        let n = gens[0].len();
        let gray = |u: u64| u ^ (u >> 1);
        let mut cur = vec![0u64; n];
        let start = gray(range.start);
        for (bit, g) in gens.iter().enumerate() {
            if (start >> bit) & 1 == 1 {
                cur.iter_mut().zip(g).for_each(|(c, x)| *c ^= x);
            }
        }
        for u in range {
            visit(gray(u), &cur);
            let flip = (u + 1).trailing_zeros() as usize;
            if flip < gens.len() {
                cur.iter_mut().zip(&gens[flip]).for_each(|(c, x)| *c ^= x);
            }
        }
    }

    /// Exact minimum rank over all nonzero codewords.
    pub fn min_rank_distance_exhaustive(&self) -> Result<usize, GabidulinError> {
        let log2 = self.check_scan_size()?;
        let gens = self.generator_columns();
        let total = 1u64 << log2;
        let best = chunk_ranges(total)
            .into_par_iter()
            .map(|range| {
                let mut best = usize::MAX;
                let mut scratch = Vec::with_capacity(self.n());
                Self::scan(&gens, range, |msg, cols| {
                    if msg != 0 {
                        scratch.clear();
                        scratch.extend_from_slice(cols);
                        best = best.min(rank_of_words(&mut scratch));
                    }
                });
                best
            })
            .min()
            .unwrap_or(usize::MAX);
        Ok(best)
    }

    /// Nearest codeword in rank distance; ties go to the smallest message index.
    pub fn decode_exhaustive(
        &self,
        received: &RankWord,
    ) -> Result<ExhaustiveDecoded, GabidulinError> {
        let log2 = self.check_scan_size()?;
        if received.len() != self.n() {
            return Err(GabidulinError::WrongLength {
                expected: self.n(),
                got: received.len(),
            });
        }
        let gens = self.generator_columns();
        let target = received.column_words(self.basis());
        let total = 1u64 << log2;
        let (distance, index) = chunk_ranges(total)
            .into_par_iter()
            .map(|range| {
                let mut best = (usize::MAX, u64::MAX);
                let mut scratch = Vec::with_capacity(self.n());
                Self::scan(&gens, range, |msg, cols| {
                    scratch.clear();
                    scratch.extend(cols.iter().zip(&target).map(|(a, b)| a ^ b));
                    let d = rank_of_words(&mut scratch);
                    if (d, msg) < best {
                        best = (d, msg);
                    }
                });
                best
            })
            .min()
            .expect("at least one chunk");
        let n = self.n();
        let message: Vec<FieldElement> = (0..self.k())
            .map(|i| FieldElement::from_bits((index >> (i * n)) & ((1u64 << n) - 1)))
            .collect();
        let codeword = self.encode(&message)?;
        Ok(ExhaustiveDecoded {
            codeword,
            message,
            distance,
        })
    }
}

fn chunk_ranges(total: u64) -> Vec<std::ops::Range<u64>> {
    let chunks = CHUNKS.min(total);
    let step = total.div_ceil(chunks);
    (0..chunks)
        .map(|c| c * step..((c + 1) * step).min(total))
        .filter(|r| !r.is_empty())
        .collect()
}
