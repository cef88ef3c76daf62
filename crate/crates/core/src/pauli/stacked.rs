//! Stacked memories: `ℓ` layers of the same `n`-cell register, a circuit
//! applied to every layer at once, and faults on the cells a gate touches.

use rand::Rng;
use rayon::prelude::*;

use crate::f2field::{rank_of_words, BitVec};
use crate::seed::{derive_seed, rng_for};

use super::{random_circuit, Circuit, CliffordGate, Letter, PauliError, PauliOp};

/// Layers are packed into one word per cell.
pub const MAX_LAYERS: usize = 64;

/// An `ℓ × n` array of Pauli letters modulo phase; row `i` is the layer-`i`
/// operator.
///
/// Storage is per cell: bit `i` of `x_words()[c]` is the `x` bit of layer `i`
/// in cell `c`. Gates then act on all layers with a few word operations, and
/// the rank is that of the `2n` cell words (rank is transpose invariant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StackedError {
    layers: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn layer_mask(layers: usize) -> u64 {
    if layers == 64 {
        u64::MAX
    } else {
        (1u64 << layers) - 1
    }
}

impl StackedError {
    pub fn identity(layers: usize, cells: usize) -> Result<Self, PauliError> {
        if layers > MAX_LAYERS {
            return Err(PauliError::TooManyLayers {
                max: MAX_LAYERS,
                got: layers,
            });
        }
        Ok(Self {
            layers,
            x: vec![0; cells],
            z: vec![0; cells],
        })
    }

    /// Bits above `layers` are discarded.
    pub fn from_cell_words(layers: usize, x: Vec<u64>, z: Vec<u64>) -> Result<Self, PauliError> {
        if layers > MAX_LAYERS {
            return Err(PauliError::TooManyLayers {
                max: MAX_LAYERS,
                got: layers,
            });
        }
        if x.len() != z.len() {
            return Err(PauliError::WidthMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        let m = layer_mask(layers);
        Ok(Self {
            layers,
            x: x.into_iter().map(|w| w & m).collect(),
            z: z.into_iter().map(|w| w & m).collect(),
        })
    }

    pub fn from_rows(rows: &[PauliOp]) -> Result<Self, PauliError> {
        let cells = rows.first().map_or(0, PauliOp::width);
        let mut e = Self::identity(rows.len(), cells)?;
        for (i, row) in rows.iter().enumerate() {
            if row.width() != cells {
                return Err(PauliError::WidthMismatch {
                    expected: cells,
                    got: row.width(),
                });
            }
            for c in 0..cells {
                e.set(i, c, row.letter(c));
            }
        }
        Ok(e)
    }

    pub fn random(rng: &mut impl Rng, layers: usize, cells: usize) -> Result<Self, PauliError> {
        let x = (0..cells).map(|_| rng.gen()).collect();
        let z = (0..cells).map(|_| rng.gen()).collect();
        Self::from_cell_words(layers, x, z)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cells(&self) -> usize {
        self.x.len()
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, layer: usize, cell: usize) -> Letter {
        Letter::from_bits(
            (self.x[cell] >> layer) & 1 == 1,
            (self.z[cell] >> layer) & 1 == 1,
        )
    }

    pub fn set(&mut self, layer: usize, cell: usize, letter: Letter) {
        assert!(layer < self.layers, "layer {layer} out of range");
        let (x, z) = letter.bits();
        let bit = 1u64 << layer;
        self.x[cell] = (self.x[cell] & !bit) | if x { bit } else { 0 };
        self.z[cell] = (self.z[cell] & !bit) | if z { bit } else { 0 };
    }

    pub fn row(&self, layer: usize) -> PauliOp {
        let mut p = PauliOp::identity(self.cells());
        for c in 0..self.cells() {
            p.set(c, self.letter(layer, c));
        }
        p
    }

    pub fn rows(&self) -> Vec<PauliOp> {
        (0..self.layers).map(|i| self.row(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Product modulo phase.
    pub fn mul(&self, other: &StackedError) -> StackedError {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn mul_assign(&mut self, other: &StackedError) {
        assert!(
            self.layers == other.layers && self.cells() == other.cells(),
            "stacked errors of different shapes"
        );
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// F2-dimension of the span of the layer rows, i.e. the rank of the
    /// group they generate modulo phase.
    pub fn rank(&self) -> usize {
        let mut words: Vec<u64> = self.x.iter().chain(&self.z).copied().collect();
        rank_of_words(&mut words)
    }

    /// Symplectic product of the two operators on all `ℓ·n` qubits.
    pub fn anticommutes(&self, other: &StackedError) -> bool {
        let ones: u32 = (0..self.cells())
            .map(|c| (self.x[c] & other.z[c]).count_ones() + (self.z[c] & other.x[c]).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// `(x ‖ z)` over the qubits `layer · n + cell`.
    pub fn symplectic_vector(&self) -> BitVec {
        let n = self.cells();
        let q = self.layers * n;
        let mut v = BitVec::zeros(2 * q);
        for c in 0..n {
            for i in 0..self.layers {
                if (self.x[c] >> i) & 1 == 1 {
                    v.set(i * n + c, true);
                }
                if (self.z[c] >> i) & 1 == 1 {
                    v.set(q + i * n + c, true);
                }
            }
        }
        v
    }

    pub fn from_symplectic_vector(
        layers: usize,
        cells: usize,
        v: &BitVec,
    ) -> Result<Self, PauliError> {
        let q = layers * cells;
        if v.len() != 2 * q {
            return Err(PauliError::WidthMismatch {
                expected: 2 * q,
                got: v.len(),
            });
        }
        let mut e = Self::identity(layers, cells)?;
        for bit in v.iter_ones() {
            let (target, idx) = if bit < q {
                (&mut e.x, bit)
            } else {
                (&mut e.z, bit - q)
            };
            target[idx % cells] |= 1u64 << (idx / cells);
        }
        Ok(e)
    }

    /// Conjugates every layer by `g`.
    pub fn conjugate_in_place(&mut self, g: &CliffordGate) {
        g.check_width(self.cells())
            .expect("gate acts outside the stacked memory");
        let q = g.qubits();
        let mut a = (self.x[q[0]], self.z[q[0]]);
        let mut b = if q.len() == 2 {
            (self.x[q[1]], self.z[q[1]])
        } else {
            (0, 0)
        };
        g.apply_local(&mut a, &mut b);
        (self.x[q[0]], self.z[q[0]]) = a;
        if q.len() == 2 {
            (self.x[q[1]], self.z[q[1]]) = b;
        }
    }

    pub fn conjugate_by(&mut self, circuit: &Circuit) {
        for g in circuit.gates() {
            self.conjugate_in_place(g);
        }
    }
}

/// Row-wise conjugation of `e` by `g`.
pub fn conjugate_stacked(g: &CliffordGate, e: &StackedError) -> StackedError {
    let mut out = e.clone();
    out.conjugate_in_place(g);
    out
}

pub fn stacked_rank(e: &StackedError) -> usize {
    e.rank()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackedNoiseModel {
    /// Probability that a gate is followed by a fault.
    pub p: f64,
    pub seed: u64,
}

impl StackedNoiseModel {
    pub fn new(p: f64, seed: u64) -> Result<Self, PauliError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(PauliError::Probability(p));
        }
        Ok(Self { p, seed })
    }
}

/// A fault inserted right after gate `gate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub gate: usize,
    pub error: StackedError,
}

/// Uniform over the `4^{ℓ·arity} - 1` non-identity Paulis on the cells of `g`.
pub fn uniform_gate_fault(
    rng: &mut impl Rng,
    g: &CliffordGate,
    layers: usize,
    cells: usize,
) -> StackedError {
    let mut e = StackedError::identity(layers, cells).expect("layer count checked by caller");
    let m = layer_mask(layers);
    loop {
        for &c in g.qubits() {
            e.x[c] = rng.gen::<u64>() & m;
            e.z[c] = rng.gen::<u64>() & m;
        }
        if !e.is_identity() {
            return e;
        }
    }
}

/// With probability `p`, a uniform non-identity fault on the cells of `g`.
pub fn sample_gate_fault(
    rng: &mut impl Rng,
    g: &CliffordGate,
    layers: usize,
    cells: usize,
    p: f64,
) -> Option<StackedError> {
    rng.gen_bool(p)
        .then(|| uniform_gate_fault(rng, g, layers, cells))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedRun {
    /// Accumulated error `Q` after the last gate.
    pub final_error: StackedError,
    pub faults: Vec<Fault>,
}

impl StackedRun {
    pub fn t(&self) -> usize {
        self.faults.len()
    }
}

/// Pauli-frame simulation: conjugate the running error by each gate, then
/// multiply in the gate's fault, if any.
pub fn run_stacked(
    circuit: &Circuit,
    layers: usize,
    model: &StackedNoiseModel,
) -> Result<StackedRun, PauliError> {
    let n = circuit.width();
    let mut frame = StackedError::identity(layers, n)?;
    let mut rng = rng_for(model.seed, "stacked-faults", 0);
    let mut faults = Vec::new();
    for (j, g) in circuit.gates().iter().enumerate() {
        frame.conjugate_in_place(g);
        if let Some(f) = sample_gate_fault(&mut rng, g, layers, n, model.p) {
            frame.mul_assign(&f);
            faults.push(Fault { gate: j, error: f });
        }
    }
    Ok(StackedRun {
        final_error: frame,
        faults,
    })
}

/// `count` faults at distinct uniformly chosen gates, each uniform on its
/// gate's cells. Returned in gate order.
pub fn random_forced_faults(
    rng: &mut impl Rng,
    circuit: &Circuit,
    layers: usize,
    count: usize,
) -> Result<Vec<Fault>, PauliError> {
    StackedError::identity(layers, 0)?;
    assert!(count <= circuit.len(), "more faults than gates");
    let mut gates = rand::seq::index::sample(rng, circuit.len(), count).into_vec();
    gates.sort_unstable();
    Ok(gates
        .into_iter()
        .map(|j| Fault {
            gate: j,
            error: uniform_gate_fault(rng, &circuit.gates()[j], layers, circuit.width()),
        })
        .collect())
}

/// Frame simulation with a given fault list.
pub fn run_with_faults(
    circuit: &Circuit,
    layers: usize,
    faults: &[Fault],
) -> Result<StackedError, PauliError> {
    let mut frame = StackedError::identity(layers, circuit.width())?;
    let mut pending = faults.iter().peekable();
    for (j, g) in circuit.gates().iter().enumerate() {
        frame.conjugate_in_place(g);
        while let Some(f) = pending.next_if(|f| f.gate == j) {
            frame.mul_assign(&f.error);
        }
    }
    if let Some(f) = pending.next() {
        panic!(
            "fault at gate {} is out of order or past the end of the circuit",
            f.gate
        );
    }
    Ok(frame)
}

/// Each fault conjugated by all gates after it, independently.
pub fn propagated_faults(circuit: &Circuit, faults: &[Fault]) -> Vec<StackedError> {
    faults
        .iter()
        .map(|f| {
            let mut e = f.error.clone();
            for g in &circuit.gates()[f.gate + 1..] {
                e.conjugate_in_place(g);
            }
            e
        })
        .collect()
}

/// The product of [`propagated_faults`]; must equal [`run_with_faults`].
pub fn push_faults_left(
    circuit: &Circuit,
    layers: usize,
    faults: &[Fault],
) -> Result<StackedError, PauliError> {
    let mut q = StackedError::identity(layers, circuit.width())?;
    for e in propagated_faults(circuit, faults) {
        q.mul_assign(&e);
    }
    Ok(q)
}

/// Random-circuit campaign parameters; every trial uses `ℓ = n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackedBoundParams {
    pub max_width: usize,
    pub max_size: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedBoundTrial {
    pub seed: u64,
    pub width: usize,
    pub size: usize,
    pub t: usize,
    pub rank: usize,
    /// `Σ rank` of the individually propagated faults.
    pub rank_sum: usize,
    /// Frame simulation and push-left product agree.
    pub paths_agree: bool,
}

impl StackedBoundTrial {
    pub fn bound(&self) -> usize {
        4 * self.t
    }

    pub fn holds(&self) -> bool {
        self.rank <= self.bound() && self.rank <= self.rank_sum && self.paths_agree
    }
}

/// One random circuit: width uniform in `[1, max_width]`, size uniform in
/// `[1, max_size]`, `ℓ = width`.
pub fn stacked_bound_trial(
    params: &StackedBoundParams,
    seed: u64,
) -> Result<StackedBoundTrial, PauliError> {
    let mut rng = rng_for(seed, "stacked-bound-circuit", 0);
    let width = rng.gen_range(1..=params.max_width);
    let size = rng.gen_range(1..=params.max_size);
    let circuit = random_circuit(&mut rng, width, size);
    let model = StackedNoiseModel::new(params.p, derive_seed(seed, "stacked-bound-noise", 0))?;
    let run = run_stacked(&circuit, width, &model)?;
    let naive = push_faults_left(&circuit, width, &run.faults)?;
    let rank_sum = propagated_faults(&circuit, &run.faults)
        .iter()
        .map(StackedError::rank)
        .sum();
    Ok(StackedBoundTrial {
        seed,
        width,
        size,
        t: run.t(),
        rank: run.final_error.rank(),
        rank_sum,
        paths_agree: naive == run.final_error,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedBoundReport {
    pub trials: Vec<StackedBoundTrial>,
    /// `max (rank(Q) - 4t)`.
    pub max_excess: i64,
    pub violations: usize,
    pub subadditivity_violations: usize,
    pub path_mismatches: usize,
}

/// Runs `trials` independent trials in parallel; trial `i` is seeded from
/// `(master_seed, i)` so the report does not depend on the thread count.
pub fn check_stacked_bound(
    params: &StackedBoundParams,
    trials: usize,
    master_seed: u64,
) -> Result<StackedBoundReport, PauliError> {
    if params.max_width > MAX_LAYERS {
        return Err(PauliError::TooManyLayers {
            max: MAX_LAYERS,
            got: params.max_width,
        });
    }
    StackedNoiseModel::new(params.p, 0)?;
    let trials: Vec<StackedBoundTrial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| stacked_bound_trial(params, derive_seed(master_seed, "stacked-bound", i)))
        .collect::<Result<_, _>>()?;
    Ok(StackedBoundReport {
        max_excess: trials
            .iter()
            .map(|t| t.rank as i64 - t.bound() as i64)
            .max()
            .unwrap_or(0),
        violations: trials.iter().filter(|t| t.rank > t.bound()).count(),
        subadditivity_violations: trials.iter().filter(|t| t.rank > t.rank_sum).count(),
        path_mismatches: trials.iter().filter(|t| !t.paths_agree).count(),
        trials,
    })
}
