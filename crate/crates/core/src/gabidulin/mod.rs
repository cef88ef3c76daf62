//! Gabidulin codes over GF(2^n) with length `n`.
//!
//! A code is fixed by a reference normal basis `α` (which also defines the
//! binary-matrix view of codewords), a Frobenius shift `t` selecting the
//! evaluation basis `β_i = α^{2^{i+t}}`, and a dimension `k`. Codewords are
//! `[f(β_1), …, f(β_n)]` for linearized `f` of q-degree `< k`.

mod decode;
mod exhaustive;

use std::sync::Arc;

use thiserror::Error;

use crate::f2field::{rank_of_words, BinMatrix, BitVec, Field, FieldElement, NormalBasis};
use crate::linpoly::LinearizedPoly;

pub use decode::Decoded;
pub use exhaustive::{ExhaustiveDecoded, MAX_EXHAUSTIVE_LOG2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GabidulinError {
    #[error("dimension {k} is out of range 1..={n}")]
    InvalidDimension { n: usize, k: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("duality requires a self-dual normal basis")]
    NotSelfDual,
    #[error("exhaustive scan over 2^{log2_size} codewords exceeds the limit 2^{limit}")]
    TooLarge { log2_size: usize, limit: usize },
    #[error("decoding radius {t_max} exceeds the unique-decoding radius {radius}")]
    RadiusTooLarge { t_max: usize, radius: usize },
    #[error("decoding failure: no codeword within the requested rank distance")]
    DecodingFailure,
    #[error("syndrome is inconsistent with the parity checks")]
    InvalidSyndrome,
}

/// A length-`n` vector over GF(2^n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankWord {
    symbols: Vec<FieldElement>,
}

impl RankWord {
    pub fn new(symbols: Vec<FieldElement>) -> Self {
        Self { symbols }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            symbols: vec![FieldElement::ZERO; n],
        }
    }

    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.symbols.iter().all(|s| s.is_zero())
    }

    pub fn add(&self, other: &RankWord) -> RankWord {
        assert_eq!(self.len(), other.len(), "word length mismatch");
        RankWord::new(
            self.symbols
                .iter()
                .zip(&other.symbols)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> RankWord {
        RankWord::new(self.symbols.iter().map(|&s| field.mul(c, s)).collect())
    }

    /// Column coordinates of every symbol in `basis`.
    pub fn column_words(&self, basis: &NormalBasis) -> Vec<u64> {
        self.symbols.iter().map(|&s| basis.coords(s)).collect()
    }

    /// The `m × len` binary matrix whose column `j` is symbol `j` in `basis`.
    pub fn to_matrix(&self, basis: &NormalBasis) -> BinMatrix {
        let cols = self.column_words(basis);
        BinMatrix::from_fn(basis.degree(), self.len(), |r, c| (cols[c] >> r) & 1 == 1)
    }

    pub fn from_matrix(basis: &NormalBasis, m: &BinMatrix) -> RankWord {
        assert_eq!(
            m.rows(),
            basis.degree(),
            "matrix must have one row per basis element"
        );
        RankWord::new(
            (0..m.cols())
                .map(|c| basis.column_to_element(&m.column(c)))
                .collect(),
        )
    }

    /// Rank of the binary matrix view; independent of the chosen basis.
    pub fn rank(&self, basis: &NormalBasis) -> usize {
        rank_of_words(&mut self.column_words(basis))
    }

    /// Packs symbols `j*n + b` into a bit vector (polynomial coordinates).
    pub fn to_bits(&self, n: usize) -> BitVec {
        let mut v = BitVec::zeros(self.len() * n);
        for (j, s) in self.symbols.iter().enumerate() {
            for b in 0..n {
                if (s.bits() >> b) & 1 == 1 {
                    v.set(j * n + b, true);
                }
            }
        }
        v
    }

    pub fn from_bits(bits: &BitVec, n: usize) -> RankWord {
        RankWord::new(crate::linpoly::unpack_coeffs(bits, bits.len() / n, n))
    }
}

/// `⟨a, b⟩ = Σ Tr(a_i b_i)`.
pub fn inner_product(field: &Field, a: &[FieldElement], b: &[FieldElement]) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "inner product of vectors of different lengths"
    );
    a.iter()
        .zip(b)
        .fold(false, |acc, (&x, &y)| acc ^ field.trace(field.mul(x, y)))
}

/// The Gabidulin code `Gab(α^{2^shift}, k)`.
#[derive(Debug, Clone)]
pub struct GabidulinCode {
    basis: Arc<NormalBasis>,
    shift: usize,
    k: usize,
    eval: Vec<FieldElement>,
}

impl GabidulinCode {
    pub fn new(basis: Arc<NormalBasis>, shift: usize, k: usize) -> Result<Self, GabidulinError> {
        let n = basis.degree();
        if k == 0 || k > n {
            return Err(GabidulinError::InvalidDimension { n, k });
        }
        let shift = shift % n;
        let eval = (0..n).map(|i| basis.element(i + shift)).collect();
        Ok(Self {
            basis,
            shift,
            k,
            eval,
        })
    }

    pub fn basis(&self) -> &Arc<NormalBasis> {
        &self.basis
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn n(&self) -> usize {
        self.eval.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn eval_basis(&self) -> &[FieldElement] {
        &self.eval
    }

    /// Unique-decoding radius `⌊(n-k)/2⌋`.
    pub fn radius(&self) -> usize {
        (self.n() - self.k) / 2
    }

    /// Rows `β^{2^i}`, `i < k`.
    pub fn generator_rows(&self) -> Vec<RankWord> {
        let f = self.field();
        (0..self.k)
            .map(|i| {
                RankWord::new(
                    self.eval
                        .iter()
                        .map(|&b| f.frobenius(b, i as u32))
                        .collect(),
                )
            })
            .collect()
    }

    /// An F2-basis of the code: `x^b · β^{2^i}` ordered by `(i, b)`.
    pub fn f2_generators(&self) -> Vec<RankWord> {
        let f = self.field();
        let n = self.n();
        self.generator_rows()
            .into_iter()
            .flat_map(|row| {
                (0..n as u32)
                    .map(move |b| row.scale(f, f.monomial(b)))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// F2-rank of the expanded generator matrix (equals `n·k`).
    pub fn f2_dimension(&self) -> usize {
        let n = self.n();
        let rows: Vec<BitVec> = self.f2_generators().iter().map(|w| w.to_bits(n)).collect();
        BinMatrix::from_rows(&rows, n * n).rank()
    }

    pub fn encode_poly(&self, f: &LinearizedPoly) -> RankWord {
        let field = self.field();
        RankWord::new(self.eval.iter().map(|&b| f.evaluate(field, b)).collect())
    }

    /// Evaluates the q-polynomial whose coefficients are `message`.
    pub fn encode(&self, message: &[FieldElement]) -> Result<RankWord, GabidulinError> {
        if message.len() != self.k {
            return Err(GabidulinError::WrongLength {
                expected: self.k,
                got: message.len(),
            });
        }
        Ok(self.encode_poly(&LinearizedPoly::new(message.to_vec())))
    }

    /// Codeword whose first `k` symbols are the columns of `info` (an `n × k`
    /// matrix in reference-basis coordinates).
    pub fn encode_systematic(&self, info: &BinMatrix) -> Result<RankWord, GabidulinError> {
        let n = self.n();
        if info.rows() != n || info.cols() != self.k {
            return Err(GabidulinError::WrongLength {
                expected: n * self.k,
                got: info.rows() * info.cols(),
            });
        }
        let points: Vec<_> = (0..self.k)
            .map(|j| (self.eval[j], self.basis.column_to_element(&info.column(j))))
            .collect();
        let f = LinearizedPoly::interpolate(self.field(), &points, self.k)
            .expect("evaluation points are a subset of a basis");
        Ok(self.encode_poly(&f))
    }

    /// Recovers the message polynomial from the first `k` symbols.
    pub fn message_poly(&self, word: &RankWord) -> LinearizedPoly {
        let points: Vec<_> = (0..self.k)
            .map(|j| (self.eval[j], word.symbols[j]))
            .collect();
        LinearizedPoly::interpolate(self.field(), &points, self.k)
            .expect("evaluation points are a subset of a basis")
    }

    pub fn contains(&self, word: &RankWord) -> bool {
        word.len() == self.n() && self.encode_poly(&self.message_poly(word)) == *word
    }

    pub fn rank_weight(&self, word: &RankWord) -> usize {
        word.rank(&self.basis)
    }

    /// `Gab(α^{2^{t+k}}, n-k)`, the trace-dual of `Gab(α^{2^t}, k)`.
    pub fn dual(&self) -> Result<GabidulinCode, GabidulinError> {
        if !self.basis.is_self_dual() {
            return Err(GabidulinError::NotSelfDual);
        }
        let n = self.n();
        GabidulinCode::new(self.basis.clone(), self.shift + self.k, n - self.k)
    }

    /// Whether two codes have the same parameters and evaluation basis.
    pub fn same_code(&self, other: &GabidulinCode) -> bool {
        self.k == other.k && self.eval == other.eval
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn basis(n: u32) -> Arc<NormalBasis> {
        Arc::new(NormalBasis::find_self_dual(Arc::new(Field::new(n).unwrap())).unwrap())
    }

    fn rand_elem(rng: &mut impl Rng, f: &Field) -> FieldElement {
        FieldElement::from_bits(rng.gen::<u64>() & (f.order() - 1))
    }

    #[test]
    fn construction_limits() {
        let b = basis(5);
        assert!(matches!(
            GabidulinCode::new(b.clone(), 0, 0),
            Err(GabidulinError::InvalidDimension { .. })
        ));
        assert!(matches!(
            GabidulinCode::new(b.clone(), 0, 6),
            Err(GabidulinError::InvalidDimension { .. })
        ));
        let c = GabidulinCode::new(b, 7, 2).unwrap();
        assert_eq!(c.shift(), 2);
    }

    #[test]
    fn encode_trivial_cases() {
        let b = basis(5);
        let c = GabidulinCode::new(b.clone(), 0, 3).unwrap();
        let one = [FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO];
        let w = c.encode(&one).unwrap();
        assert_eq!(w.symbols(), c.eval_basis());
        assert_eq!(c.rank_weight(&w), 5);
        assert!(c.encode(&[FieldElement::ZERO; 3]).unwrap().is_zero());
        assert_eq!(c.rank_weight(&RankWord::zero(5)), 0);
        assert!(matches!(
            c.encode(&one[..2]),
            Err(GabidulinError::WrongLength { .. })
        ));
    }

    #[test]
    fn n3_k1_codewords_are_multiples_of_beta() {
        let b = basis(3);
        let c = GabidulinCode::new(b.clone(), 0, 1).unwrap();
        let f = c.field();
        let mut words: Vec<RankWord> = f.elements().map(|a| c.encode(&[a]).unwrap()).collect();
        let mut multiples: Vec<RankWord> = f
            .elements()
            .map(|a| RankWord::new(c.eval_basis().iter().map(|&x| f.mul(a, x)).collect()))
            .collect();
        words.sort_by_key(|w| w.symbols().to_vec());
        multiples.sort_by_key(|w| w.symbols().to_vec());
        assert_eq!(words, multiples);
        words.dedup();
        assert_eq!(words.len(), 8);
    }

    #[test]
    fn encode_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let b = basis(7);
        let c = GabidulinCode::new(b, 2, 3).unwrap();
        let f = c.field().clone();
        for _ in 0..500 {
            let m1: Vec<_> = (0..3).map(|_| rand_elem(&mut rng, &f)).collect();
            let m2: Vec<_> = (0..3).map(|_| rand_elem(&mut rng, &f)).collect();
            let sum: Vec<_> = m1.iter().zip(&m2).map(|(&a, &b)| a + b).collect();
            assert_eq!(
                c.encode(&m1).unwrap().add(&c.encode(&m2).unwrap()),
                c.encode(&sum).unwrap()
            );
            let lambda = rand_elem(&mut rng, &f);
            let scaled: Vec<_> = m1.iter().map(|&a| f.mul(lambda, a)).collect();
            assert_eq!(
                c.encode(&m1).unwrap().scale(&f, lambda),
                c.encode(&scaled).unwrap()
            );
        }
    }

    #[test]
    fn f2_dimension_is_nk() {
        for n in [3u32, 5, 7] {
            let b = basis(n);
            for k in 1..=n as usize {
                for shift in [0, 1, n as usize - 1] {
                    assert_eq!(
                        GabidulinCode::new(b.clone(), shift, k)
                            .unwrap()
                            .f2_dimension(),
                        n as usize * k
                    );
                }
            }
        }
    }

    #[test]
    fn systematic_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b = basis(7);
        let c = GabidulinCode::new(b.clone(), 0, 3).unwrap();
        let zero = BinMatrix::zeros(7, 3);
        assert!(c.encode_systematic(&zero).unwrap().is_zero());
        for _ in 0..200 {
            let info = BinMatrix::from_fn(7, 3, |_, _| rng.gen());
            let w = c.encode_systematic(&info).unwrap();
            assert!(c.contains(&w));
            assert_eq!(w.to_matrix(&b).column_range(0, 3), info);
            // re-encoding the first k columns of a codeword gives it back
            assert_eq!(
                c.encode_systematic(&w.to_matrix(&b).column_range(0, 3))
                    .unwrap(),
                w
            );
        }
    }

    #[test]
    fn matrix_view_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let b = basis(5);
        let f = b.field().clone();
        for _ in 0..100 {
            let w = RankWord::new((0..5).map(|_| rand_elem(&mut rng, &f)).collect());
            let m = w.to_matrix(&b);
            assert_eq!(RankWord::from_matrix(&b, &m), w);
            assert_eq!(m.rank(), w.rank(&b));
            assert_eq!(RankWord::from_bits(&w.to_bits(5), 5), w);
        }
    }

    #[test]
    fn dual_codes() {
        for n in [3u32, 5, 7] {
            let b = basis(n);
            let n = n as usize;
            for r in 1..n {
                let c = GabidulinCode::new(b.clone(), 0, r).unwrap();
                let d = c.dual().unwrap();
                assert_eq!(d.k(), n - r);
                assert_eq!(d.shift(), r % n);
                assert!(d.dual().unwrap().same_code(&c));
                let f = c.field();
                for g in c.f2_generators() {
                    for h in d.f2_generators() {
                        assert!(!inner_product(f, g.symbols(), h.symbols()));
                    }
                }
                assert_eq!(c.f2_dimension() + d.f2_dimension(), n * n);
            }
        }
        // dual(Gab(α,1)) = Gab(α², n-1)
        let b = basis(5);
        let d = GabidulinCode::new(b.clone(), 0, 1).unwrap().dual().unwrap();
        assert!(d.same_code(&GabidulinCode::new(b, 1, 4).unwrap()));
    }

    #[test]
    fn dual_n5_r2_generator_products() {
        let b = basis(5);
        let c = GabidulinCode::new(b, 0, 2).unwrap();
        let d = c.dual().unwrap();
        let f = c.field();
        let mut count = 0;
        for g in c.generator_rows() {
            for h in d.generator_rows() {
                assert!(!inner_product(f, g.symbols(), h.symbols()));
                count += 1;
            }
        }
        assert_eq!(count, 2 * 3);
    }

    #[test]
    fn dual_requires_self_dual_basis() {
        let field = Arc::new(Field::new(4).unwrap());
        let nb = field
            .elements()
            .find_map(|a| NormalBasis::new(field.clone(), a).ok())
            .unwrap();
        let c = GabidulinCode::new(Arc::new(nb), 0, 2).unwrap();
        assert_eq!(c.dual().unwrap_err(), GabidulinError::NotSelfDual);
        // rank weights still work in a non-self-dual basis
        let w = c.encode(&[FieldElement::ONE, FieldElement::ZERO]).unwrap();
        assert_eq!(c.rank_weight(&w), 4);
    }
}
