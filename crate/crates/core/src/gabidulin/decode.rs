//! Bounded-distance algebraic decoding.
//!
//! Given `y = c + e` with `c = f(β)` and `rank(e) <= t`, find a nonzero pair
//! `(V, N)` with `q-deg V <= t`, `q-deg N <= k-1+t` and `V(y_i) = N(β_i)` for
//! all `i`. When `2t <= n-k` every such pair satisfies `N = V ∘ f`, so `f` is
//! the left quotient of `N` by `V`.

use super::{GabidulinCode, GabidulinError, RankWord};
use crate::f2field::{BinMatrix, BitVec, FieldElement};
use crate::linpoly::{unpack_coeffs, LinearizedPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub codeword: RankWord,
    pub error: RankWord,
    pub message: LinearizedPoly,
}

impl GabidulinCode {
    /// Returns the unique codeword within rank distance `t_max` of
    /// `received`, trying `t = 0, 1, …, t_max` in turn.
    pub fn decode_bounded(
        &self,
        received: &RankWord,
        t_max: usize,
    ) -> Result<Decoded, GabidulinError> {
        let n = self.n();
        if received.len() != n {
            return Err(GabidulinError::WrongLength {
                expected: n,
                got: received.len(),
            });
        }
        if t_max > self.radius() {
            return Err(GabidulinError::RadiusTooLarge {
                t_max,
                radius: self.radius(),
            });
        }
        (0..=t_max)
            .find_map(|t| self.reconstruct(received, t))
            .ok_or(GabidulinError::DecodingFailure)
    }

    fn reconstruct(&self, received: &RankWord, t: usize) -> Option<Decoded> {
        let field = self.field();
        let n = self.n();
        let k = self.k();
        let v_len = t + 1;
        let n_len = k + t;
        let unknowns = (v_len + n_len) * n;
        let mut m = BinMatrix::zeros(n * n, unknowns);

        // Column for unknown bit b of coefficient j of a polynomial evaluated
        // at `points`: the symbols x^b · p_i^{2^j}.
        let mut fill = |col_base: usize, count: usize, points: &[FieldElement]| {
            let mut powers = points.to_vec();
            for j in 0..count {
                for (i, &p) in powers.iter().enumerate() {
                    let mut term = p;
                    for b in 0..n {
                        let bits = term.bits();
                        for r in 0..n {
                            if (bits >> r) & 1 == 1 {
                                m.set(i * n + r, col_base + j * n + b, true);
                            }
                        }
                        term = field.mul(term, field.x());
                    }
                }
                for p in powers.iter_mut() {
                    *p = field.square(*p);
                }
            }
        };
        fill(0, v_len, received.symbols());
        fill(v_len * n, n_len, self.eval_basis());

        let kernel = m.kernel();
        let sol = kernel.first()?;
        let v = LinearizedPoly::new(unpack_coeffs(&sol.slice(0, v_len * n), v_len, n));
        let num = LinearizedPoly::new(unpack_coeffs(&sol.slice(v_len * n, n_len * n), n_len, n));
        if v.is_zero() {
            return None;
        }
        let f = num.left_divide(field, &v).ok()?;
        if f.q_degree().is_some_and(|d| d >= k) {
            return None;
        }
        let codeword = self.encode_poly(&f);
        let error = received.add(&codeword);
        if self.rank_weight(&error) > t {
            return None;
        }
        Some(Decoded {
            codeword,
            error,
            message: f,
        })
    }

    /// Minimal-rank error with the given syndrome.
    ///
    /// `self` must be the kernel of `check_rows` under `⟨·,·⟩`; syndrome bit
    /// `g` is `⟨e, check_rows[g]⟩`. The syndrome is lifted to some word with
    /// the same checks, which is then decoded in `self`.
    pub fn syndrome_decode(
        &self,
        check_rows: &[RankWord],
        syndrome: &BitVec,
    ) -> Result<RankWord, GabidulinError> {
        let n = self.n();
        if syndrome.len() != check_rows.len() {
            return Err(GabidulinError::WrongLength {
                expected: check_rows.len(),
                got: syndrome.len(),
            });
        }
        if syndrome.is_zero() {
            return Ok(RankWord::zero(n));
        }
        let lifted = lift_syndrome(self.field(), n, check_rows, syndrome)?;
        Ok(self.decode_bounded(&lifted, self.radius())?.error)
    }
}

/// Some word `e` with `⟨e, check_rows[g]⟩ = syndrome[g]` for all `g`.
pub(crate) fn lift_syndrome(
    field: &crate::f2field::Field,
    n: usize,
    check_rows: &[RankWord],
    syndrome: &BitVec,
) -> Result<RankWord, GabidulinError> {
    let mut m = BinMatrix::zeros(check_rows.len(), n * n);
    for (g, row) in check_rows.iter().enumerate() {
        if row.len() != n {
            return Err(GabidulinError::WrongLength {
                expected: n,
                got: row.len(),
            });
        }
        for (j, &c) in row.symbols().iter().enumerate() {
            for b in 0..n {
                if field.trace(field.mul(field.monomial(b as u32), c)) {
                    m.set(g, j * n + b, true);
                }
            }
        }
    }
    let sol = m
        .solve(syndrome)
        .map_err(|_| GabidulinError::InvalidSyndrome)?;
    Ok(RankWord::from_bits(&sol.particular, n))
}
