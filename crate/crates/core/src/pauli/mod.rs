//! Pauli frames, Clifford gates and the stacked memory noise model.
//!
//! Phases are dropped throughout: a Pauli operator is its pair of `x`/`z`
//! bit vectors, and conjugation by a Clifford gate is the matching
//! symplectic map. All supported gates act as involutions on that level.

mod circuit;
mod stacked;

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use thiserror::Error;

use crate::f2field::BitVec;

pub use circuit::{parse_circuit, random_circuit, Circuit};
pub use stacked::{
    check_stacked_bound, conjugate_stacked, propagated_faults, push_faults_left,
    random_forced_faults, run_stacked, run_with_faults, sample_gate_fault, stacked_bound_trial,
    stacked_rank, uniform_gate_fault, Fault, StackedBoundParams, StackedBoundReport,
    StackedBoundTrial, StackedError, StackedNoiseModel, StackedRun, MAX_LAYERS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PauliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{kind} takes {expected} qubit(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} applied twice to qubit {qubit}")]
    RepeatedQubit { kind: GateKind, qubit: usize },
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("at most {max} layers are supported, got {got}")]
    TooManyLayers { max: usize, got: usize },
    #[error("probability {0} outside [0,1]")]
    Probability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli operator modulo phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
}

impl PauliOp {
    pub fn identity(width: usize) -> Self {
        Self {
            x: BitVec::zeros(width),
            z: BitVec::zeros(width),
        }
    }

    pub fn from_bits(x: BitVec, z: BitVec) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::WidthMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(Self { x, z })
    }

    pub fn single(width: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(width);
        p.set(qubit, letter);
        p
    }

    pub fn width(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        (0..self.width())
            .filter(|&q| self.letter(q) != Letter::I)
            .count()
    }

    /// Product modulo phase.
    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        assert_eq!(
            self.width(),
            other.width(),
            "product of Paulis of different widths"
        );
        let mut out = self.clone();
        out.x.xor_assign(&other.x);
        out.z.xor_assign(&other.z);
        out
    }

    /// Symplectic product: `true` iff the operators anticommute.
    pub fn anticommutes(&self, other: &PauliOp) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// `(x ‖ z)`.
    pub fn symplectic_vector(&self) -> BitVec {
        self.x.concat(&self.z)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.width() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Vec<char> = s.trim().chars().collect();
        let mut p = PauliOp::identity(letters.len());
        for (q, ch) in letters.into_iter().enumerate() {
            let letter = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                other => {
                    return Err(PauliError::Parse {
                        line: 1,
                        message: format!("invalid Pauli letter `{other}`"),
                    })
                }
            };
            p.set(q, letter);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::H,
        GateKind::S,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CliffordGate {
    kind: GateKind,
    qubits: [usize; 2],
}

impl CliffordGate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self, PauliError> {
        if qubits.len() != kind.arity() {
            return Err(PauliError::Arity {
                kind,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(PauliError::RepeatedQubit {
                kind,
                qubit: qubits[0],
            });
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(Self { kind, qubits: q })
    }

    pub fn single(kind: GateKind, q: usize) -> Result<Self, PauliError> {
        Self::new(kind, &[q])
    }

    pub fn pair(kind: GateKind, a: usize, b: usize) -> Result<Self, PauliError> {
        Self::new(kind, &[a, b])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn check_width(&self, width: usize) -> Result<(), PauliError> {
        match self.qubits().iter().find(|&&q| q >= width) {
            Some(&qubit) => Err(PauliError::QubitOutOfRange { qubit, width }),
            None => Ok(()),
        }
    }

    /// Conjugation on the `(x, z)` components of the gate's qubits. `T` is a
    /// bit or a word of parallel bits.
    pub(crate) fn apply_local<T: Copy + BitXor<Output = T>>(&self, a: &mut (T, T), b: &mut (T, T)) {
        match self.kind {
            GateKind::H => std::mem::swap(&mut a.0, &mut a.1),
            GateKind::S => a.1 = a.1 ^ a.0,
            GateKind::X | GateKind::Y | GateKind::Z => {}
            GateKind::Cnot => {
                b.0 = b.0 ^ a.0;
                a.1 = a.1 ^ b.1;
            }
            GateKind::Cz => {
                a.1 = a.1 ^ b.0;
                b.1 = b.1 ^ a.0;
            }
            GateKind::Swap => std::mem::swap(a, b),
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// `g P g†` modulo phase.
pub fn conjugate(g: &CliffordGate, p: &PauliOp) -> PauliOp {
    g.check_width(p.width())
        .expect("gate acts outside the operator");
    let q = g.qubits();
    let mut out = p.clone();
    let mut a = (p.x.get(q[0]), p.z.get(q[0]));
    let mut b = if q.len() == 2 {
        (p.x.get(q[1]), p.z.get(q[1]))
    } else {
        (false, false)
    };
    g.apply_local(&mut a, &mut b);
    out.x.set(q[0], a.0);
    out.z.set(q[0], a.1);
    if q.len() == 2 {
        out.x.set(q[1], b.0);
        out.z.set(q[1], b.1);
    }
    out
}
