//! Quantum Gabidulin codes on an `n × n` stacked memory.
//!
//! For a self-dual normal basis `α` of GF(2^n) and `r + s < n`, the code has
//! X-type generators `X(β)` for `β` in an F2-basis of `Gab(α, r)` and Z-type
//! generators `Z(γ)` for `γ` in an F2-basis of `Gab(α^{2^r}, s)`. `X(β)`
//! puts the coordinates of `β_j` on the layers of cell `j`.
//!
//! `X(β)` and `Z(γ)` commute iff `Σ Tr(β_j γ_j) = 0`, so the two families
//! commute because `Gab(α^{2^r}, s)` lies in the trace-dual of `Gab(α, r)`.
//! Decoding is CSS: each side is a syndrome decoding problem in the kernel
//! code of the other side's checks.

mod centralizer;

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::f2field::{BinMatrix, BitVec, EchelonBasis, NormalBasis};
use crate::gabidulin::{inner_product, GabidulinCode, GabidulinError, RankWord};
use crate::pauli::{
    random_circuit, random_forced_faults, run_with_faults, Circuit, PauliError, StackedError,
};
use crate::seed::rng_for;

pub use centralizer::{MinRankDistance, MAX_CENTRALIZER_LOG2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Z,
    Both,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QgabError {
    #[error("need r + s < n, got n={n}, r={r}, s={s}")]
    InvalidParameters { n: usize, r: usize, s: usize },
    #[error("the code requires a self-dual normal basis")]
    NotSelfDual,
    #[error("operation requires r = s, got r={r}, s={s}")]
    Asymmetric { r: usize, s: usize },
    #[error("X(β)/Z(γ) symplectic product disagrees with ⟨β,γ⟩")]
    CommutationMismatch,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("centralizer of dimension {dim} exceeds the enumeration limit 2^{limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("decoding failed on the {side:?} side")]
    DecodingFailure { side: Side },
    #[error(transparent)]
    Gabidulin(#[from] GabidulinError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Syndrome bits of a stacked error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    /// One bit per Z generator; detects the X part of the error.
    pub x_syndrome: BitVec,
    /// One bit per X generator; detects the Z part of the error.
    pub z_syndrome: BitVec,
}

impl Syndrome {
    pub fn weight(&self) -> usize {
        self.x_syndrome.count_ones() + self.z_syndrome.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.x_syndrome.is_zero() && self.z_syndrome.is_zero()
    }
}

/// A CSS stabilizer group on an `ℓ × n` stacked memory.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    layers: usize,
    cells: usize,
    x_gens: Vec<StackedError>,
    z_gens: Vec<StackedError>,
    span: EchelonBasis,
}

impl StabilizerGroup {
    fn new(
        layers: usize,
        cells: usize,
        x_gens: Vec<StackedError>,
        z_gens: Vec<StackedError>,
    ) -> Self {
        let len = 2 * layers * cells;
        let vectors: Vec<BitVec> = x_gens
            .iter()
            .chain(&z_gens)
            .map(StackedError::symplectic_vector)
            .collect();
        Self {
            layers,
            cells,
            x_gens,
            z_gens,
            span: EchelonBasis::from_vectors(len, &vectors),
        }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn x_generators(&self) -> &[StackedError] {
        &self.x_gens
    }

    pub fn z_generators(&self) -> &[StackedError] {
        &self.z_gens
    }

    pub fn generators(&self) -> impl Iterator<Item = &StackedError> {
        self.x_gens.iter().chain(&self.z_gens)
    }

    /// Dimension of the span of the generators, maintained incrementally.
    pub fn rank(&self) -> usize {
        self.span.dim()
    }

    /// Rank of the full generator matrix, computed from scratch.
    pub fn generator_matrix_rank(&self) -> usize {
        let rows: Vec<BitVec> = self
            .generators()
            .map(StackedError::symplectic_vector)
            .collect();
        BinMatrix::from_rows(&rows, 2 * self.layers * self.cells).rank()
    }

    /// Checks every pair of generators.
    pub fn all_commute(&self) -> bool {
        let gens: Vec<&StackedError> = self.generators().collect();
        (0..gens.len()).all(|i| (i + 1..gens.len()).all(|j| !gens[i].anticommutes(gens[j])))
    }

    pub fn syndrome(&self, e: &StackedError) -> Syndrome {
        assert!(
            e.layers() == self.layers && e.cells() == self.cells,
            "error does not fit the stacked memory"
        );
        let bits = |gens: &[StackedError]| {
            BitVec::from_bools(&gens.iter().map(|g| g.anticommutes(e)).collect::<Vec<_>>())
        };
        Syndrome {
            x_syndrome: bits(&self.z_gens),
            z_syndrome: bits(&self.x_gens),
        }
    }

    pub fn is_stabilizer(&self, e: &StackedError) -> bool {
        self.span.contains(&e.symplectic_vector())
    }

    /// Minimum stacked rank over centralizer elements outside the group.
    pub fn min_rank_distance_exhaustive(&self) -> Result<MinRankDistance, QgabError> {
        centralizer::min_rank_distance(self)
    }

    fn conjugated(&self, circuit: &Circuit) -> Self {
        let conj = |gens: &[StackedError]| {
            gens.iter()
                .map(|g| {
                    let mut g = g.clone();
                    g.conjugate_by(circuit);
                    g
                })
                .collect::<Vec<_>>()
        };
        Self::new(
            self.layers,
            self.cells,
            conj(&self.x_gens),
            conj(&self.z_gens),
        )
    }
}

/// `X(β)`: cell `j` carries the coordinates of `β_j` in `basis` as X letters.
pub fn x_operator(basis: &NormalBasis, beta: &RankWord) -> StackedError {
    let n = basis.degree();
    StackedError::from_cell_words(n, beta.column_words(basis), vec![0; beta.len()])
        .expect("n is at most 32")
}

/// `Z(γ)`, the Z-type counterpart of [`x_operator`].
pub fn z_operator(basis: &NormalBasis, gamma: &RankWord) -> StackedError {
    let n = basis.degree();
    StackedError::from_cell_words(n, vec![0; gamma.len()], gamma.column_words(basis))
        .expect("n is at most 32")
}

/// Whether `X(β)` and `Z(γ)` commute, computed both from the symplectic
/// product and from `⟨β, γ⟩`; the two must agree.
pub fn commutes(basis: &NormalBasis, beta: &RankWord, gamma: &RankWord) -> Result<bool, QgabError> {
    let symplectic = x_operator(basis, beta).anticommutes(&z_operator(basis, gamma));
    let trace = inner_product(basis.field(), beta.symbols(), gamma.symbols());
    if symplectic != trace {
        return Err(QgabError::CommutationMismatch);
    }
    Ok(!symplectic)
}

#[derive(Debug, Clone)]
pub struct QuantumGabidulinCode {
    basis: Arc<NormalBasis>,
    r: usize,
    s: usize,
    x_words: Vec<RankWord>,
    z_words: Vec<RankWord>,
    group: StabilizerGroup,
    /// `Gab(α^{2^{r+s}}, n-s)`: words with zero X syndrome.
    x_kernel: GabidulinCode,
    /// `Gab(α^{2^r}, n-r)`: words with zero Z syndrome.
    z_kernel: GabidulinCode,
}

fn f2_basis(
    basis: &Arc<NormalBasis>,
    shift: usize,
    k: usize,
) -> Result<Vec<RankWord>, GabidulinError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    Ok(GabidulinCode::new(basis.clone(), shift, k)?.f2_generators())
}

impl QuantumGabidulinCode {
    /// Builds the code and verifies commutation of every generator pair and
    /// independence of the generators.
    pub fn build(basis: Arc<NormalBasis>, r: usize, s: usize) -> Result<Self, QgabError> {
        let n = basis.degree();
        if !basis.is_self_dual() {
            return Err(QgabError::NotSelfDual);
        }
        if r + s >= n {
            return Err(QgabError::InvalidParameters { n, r, s });
        }
        let x_words = f2_basis(&basis, 0, r)?;
        let z_words = f2_basis(&basis, r, s)?;
        for b in &x_words {
            for g in &z_words {
                if !commutes(&basis, b, g)? {
                    return Err(QgabError::Invariant(
                        "X and Z generators anticommute".into(),
                    ));
                }
            }
        }
        let x_gens = x_words.iter().map(|b| x_operator(&basis, b)).collect();
        let z_gens = z_words.iter().map(|g| z_operator(&basis, g)).collect();
        let group = StabilizerGroup::new(n, n, x_gens, z_gens);
        if !group.all_commute() {
            return Err(QgabError::Invariant("generators do not commute".into()));
        }
        if group.rank() != n * (r + s) {
            return Err(QgabError::Invariant(format!(
                "generators span {} dimensions, expected {}",
                group.rank(),
                n * (r + s)
            )));
        }
        let x_kernel = GabidulinCode::new(basis.clone(), r + s, n - s)?;
        let z_kernel = GabidulinCode::new(basis.clone(), r, n - r)?;
        Ok(Self {
            basis,
            r,
            s,
            x_words,
            z_words,
            group,
            x_kernel,
            z_kernel,
        })
    }

    pub fn basis(&self) -> &Arc<NormalBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.degree()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn physical_qubits(&self) -> usize {
        self.n() * self.n()
    }

    /// The `β` of the X generators, in generator order.
    pub fn x_words(&self) -> &[RankWord] {
        &self.x_words
    }

    /// The `γ` of the Z generators, in generator order.
    pub fn z_words(&self) -> &[RankWord] {
        &self.z_words
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    /// `n² - rank` of the generator matrix.
    pub fn logical_count(&self) -> usize {
        self.physical_qubits() - self.group.generator_matrix_rank()
    }

    pub fn syndrome(&self, e: &StackedError) -> Syndrome {
        self.group.syndrome(e)
    }

    pub fn is_stabilizer(&self, e: &StackedError) -> bool {
        self.group.is_stabilizer(e)
    }

    pub fn min_rank_distance_exhaustive(&self) -> Result<MinRankDistance, QgabError> {
        self.group.min_rank_distance_exhaustive()
    }

    /// Splits a stacked error into its X and Z words.
    pub fn error_words(&self, e: &StackedError) -> (RankWord, RankWord) {
        let to_word = |words: &[u64]| {
            RankWord::new(words.iter().map(|&w| self.basis.from_coords(w)).collect())
        };
        (to_word(e.x_words()), to_word(e.z_words()))
    }

    /// A minimum-rank correction on each side. Exact whenever the X part has
    /// rank `≤ ⌊s/2⌋` and the Z part rank `≤ ⌊r/2⌋`.
    pub fn decode(&self, syn: &Syndrome) -> Result<StackedError, QgabError> {
        let side = |kernel: &GabidulinCode, checks: &[RankWord], bits: &BitVec| match kernel
            .syndrome_decode(checks, bits)
        {
            Ok(w) => Ok(Some(w)),
            Err(GabidulinError::DecodingFailure | GabidulinError::InvalidSyndrome) => Ok(None),
            Err(e) => Err(e),
        };
        let x = side(&self.x_kernel, &self.z_words, &syn.x_syndrome)?;
        let z = side(&self.z_kernel, &self.x_words, &syn.z_syndrome)?;
        match (x, z) {
            (Some(x), Some(z)) => {
                let n = self.n();
                Ok(StackedError::from_cell_words(
                    n,
                    x.column_words(&self.basis),
                    z.column_words(&self.basis),
                )?)
            }
            (None, Some(_)) => Err(QgabError::DecodingFailure { side: Side::X }),
            (Some(_), None) => Err(QgabError::DecodingFailure { side: Side::Z }),
            (None, None) => Err(QgabError::DecodingFailure { side: Side::Both }),
        }
    }
}

/// A code whose generators were conjugated layer-wise by a circuit.
#[derive(Debug, Clone)]
pub struct ConjugatedCode {
    circuit: Circuit,
    group: StabilizerGroup,
}

impl ConjugatedCode {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn syndrome(&self, e: &StackedError) -> Syndrome {
        self.group.syndrome(e)
    }

    pub fn is_stabilizer(&self, e: &StackedError) -> bool {
        self.group.is_stabilizer(e)
    }
}

/// Conjugates every generator of `code` by `circuit` and checks that the
/// result is still a commuting group of the same rank.
pub fn conjugate_code(
    code: &QuantumGabidulinCode,
    circuit: &Circuit,
) -> Result<ConjugatedCode, QgabError> {
    if circuit.width() != code.n() {
        return Err(PauliError::WidthMismatch {
            expected: code.n(),
            got: circuit.width(),
        }
        .into());
    }
    let group = code.group.conjugated(circuit);
    if group.rank() != code.group.rank() {
        return Err(QgabError::Invariant(
            "conjugation changed the group rank".into(),
        ));
    }
    if !group.all_commute() {
        return Err(QgabError::Invariant(
            "conjugated generators anticommute".into(),
        ));
    }
    Ok(ConjugatedCode {
        circuit: circuit.clone(),
        group,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E2eOutcome {
    pub t: usize,
    /// Stacked rank of the output error `Q`.
    pub rank: usize,
    pub syndrome_weight: usize,
    pub success: bool,
    pub x_failed: bool,
    pub z_failed: bool,
    /// The syndrome of `Q` under the conjugated code equals the syndrome of
    /// the pulled-back error under the original code.
    pub pullback_consistent: bool,
    /// The correction equals the pulled-back error exactly.
    pub exact: bool,
}

/// Corrects the output error `q` of a stacked circuit run with `t` faults.
///
/// The syndrome is measured against the conjugated code. Decoding happens in
/// the original frame: `q` is pulled back through the inverse circuit, decoded
/// there, and the correction is pushed forward again. The trial succeeds iff
/// the correction times `q` is a stabilizer of the conjugated code.
pub fn e2e_correct(
    code: &QuantumGabidulinCode,
    conj: &ConjugatedCode,
    q: &StackedError,
    t: usize,
) -> Result<E2eOutcome, QgabError> {
    if code.r != code.s {
        return Err(QgabError::Asymmetric {
            r: code.r,
            s: code.s,
        });
    }
    let measured = conj.syndrome(q);
    let mut pulled = q.clone();
    pulled.conjugate_by(&conj.circuit.inverse());
    let original = code.syndrome(&pulled);
    let pullback_consistent = original == measured;
    let mut outcome = E2eOutcome {
        t,
        rank: q.rank(),
        syndrome_weight: measured.weight(),
        success: false,
        x_failed: false,
        z_failed: false,
        pullback_consistent,
        exact: false,
    };
    match code.decode(&original) {
        Ok(correction) => {
            outcome.exact = correction == pulled;
            let mut pushed = correction;
            pushed.conjugate_by(&conj.circuit);
            outcome.success = conj.is_stabilizer(&pushed.mul(q));
        }
        Err(QgabError::DecodingFailure { side }) => {
            outcome.x_failed = matches!(side, Side::X | Side::Both);
            outcome.z_failed = matches!(side, Side::Z | Side::Both);
        }
        Err(e) => return Err(e),
    }
    Ok(outcome)
}

/// A random circuit of `size` gates on the code's cells with `faults`
/// faults at distinct random gates, followed by correction.
pub fn e2e_trial(
    code: &QuantumGabidulinCode,
    size: usize,
    faults: usize,
    seed: u64,
) -> Result<E2eOutcome, QgabError> {
    let mut rng = rng_for(seed, "qgab-e2e", 0);
    let circuit = random_circuit(&mut rng, code.n(), size);
    let conj = conjugate_code(code, &circuit)?;
    let fault_list = random_forced_faults(&mut rng, &circuit, code.n(), faults)?;
    let q = run_with_faults(&circuit, code.n(), &fault_list)?;
    e2e_correct(code, &conj, &q, faults)
}

/// A random stacked error of rank exactly `rank` on an `n × n` memory:
/// every layer row is a combination of `rank` independent Pauli rows.
pub fn random_rank_error(rng: &mut impl Rng, n: usize, rank: usize) -> StackedError {
    loop {
        let mut e = StackedError::identity(n, n).expect("n is at most 32");
        for _ in 0..rank {
            let row = StackedError::random(rng, 1, n).expect("one layer");
            let layers: u64 = rng.gen::<u64>() & ((1u64 << n) - 1);
            let x = row
                .x_words()
                .iter()
                .map(|&b| if b == 1 { layers } else { 0 })
                .collect();
            let z = row
                .z_words()
                .iter()
                .map(|&b| if b == 1 { layers } else { 0 })
                .collect();
            e.mul_assign(&StackedError::from_cell_words(n, x, z).expect("n is at most 32"));
        }
        if e.rank() == rank {
            return e;
        }
    }
}

#[cfg(test)]
mod tests;
