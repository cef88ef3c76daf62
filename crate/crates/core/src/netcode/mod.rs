//! Linear network coding over DAGs with faulty edges, and rank-metric
//! protection of the transmitted matrices.
//!
//! A [`Network`] applies a fixed binary matrix `A` to each transmitted column.
//! A bit crossing a faulty edge flips independently with probability `p`;
//! with `t` faulty edges the observed output `Z` differs from `Y = AX` by a
//! matrix of rank at most `t`. Encoding `X` with a Gabidulin code before
//! transmission lets the receiver undo up to `⌊(n-k)/2⌋` faulty edges.

mod generate;
mod network;
mod parse;

use rand::Rng;
use thiserror::Error;

use crate::f2field::{BinMatrix, BitVec};
use crate::gabidulin::{GabidulinCode, GabidulinError, RankWord};
use crate::seed::{derive_seed, rng_for};

pub use generate::{random_layered, LayeredConfig};
pub use network::{Edge, Network, NetworkBuilder, Vertex, VertexKind};
pub use parse::{parse_network, write_network};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid network: {0}")]
    Structure(String),
    #[error("edge #{edge}: linear form has {got} bits, source vertex receives {expected}")]
    FormLength {
        edge: usize,
        expected: usize,
        got: usize,
    },
    #[error("vertex #{vertex}: output map has {got} bits, vertex receives {expected}")]
    OutmapLength {
        vertex: usize,
        expected: usize,
        got: usize,
    },
    #[error("output vertex #{vertex} has no output map")]
    MissingOutmap { vertex: usize },
    #[error("network has {inputs} inputs and {outputs} outputs; expected equal nonzero counts")]
    CountMismatch { inputs: usize, outputs: usize },
    #[error("network contains a cycle")]
    Cycle,
    #[error("transfer matrix is singular")]
    SingularTransfer,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid fault plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Decode(#[from] GabidulinError),
}

/// Faulty edges and their flip probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultPlan {
    pub faulty_edges: Vec<usize>,
    pub flip_probability: f64,
    pub seed: u64,
}

impl FaultPlan {
    pub fn none() -> Self {
        Self {
            faulty_edges: Vec::new(),
            flip_probability: 0.0,
            seed: 0,
        }
    }

    /// `t` distinct edges chosen uniformly.
    pub fn random(
        rng: &mut impl Rng,
        net: &Network,
        t: usize,
        flip_probability: f64,
        seed: u64,
    ) -> Result<Self, NetError> {
        let ne = net.edges().len();
        if t > ne {
            return Err(NetError::InvalidPlan(format!(
                "{t} faulty edges requested, network has {ne}"
            )));
        }
        let mut faulty_edges = rand::seq::index::sample(rng, ne, t).into_vec();
        faulty_edges.sort_unstable();
        Ok(Self {
            faulty_edges,
            flip_probability,
            seed,
        })
    }

    pub fn t(&self) -> usize {
        self.faulty_edges.len()
    }

    fn validate(&self, net: &Network) -> Result<(), NetError> {
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(NetError::InvalidPlan(format!(
                "flip probability {} outside [0,1]",
                self.flip_probability
            )));
        }
        let mut seen = vec![false; net.edges().len()];
        for &e in &self.faulty_edges {
            if e >= seen.len() {
                return Err(NetError::InvalidPlan(format!("edge #{e} does not exist")));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(NetError::InvalidPlan(format!("edge #{e} listed twice")));
            }
        }
        Ok(())
    }
}

/// Inputs, ideal and observed outputs, and the realized flip pattern of one
/// transmission of `m` columns.
#[derive(Debug, Clone)]
pub struct TransmissionRecord {
    pub x: BinMatrix,
    pub y: BinMatrix,
    pub z: BinMatrix,
    /// `(edge, δ_e)`: bit `i` of `δ_e` is set iff column `i` flipped on `edge`.
    pub flips: Vec<(usize, BitVec)>,
}

impl TransmissionRecord {
    /// `rank(Y - Z)`.
    pub fn difference_rank(&self) -> usize {
        self.y.add(&self.z).rank()
    }

    /// `Σ_e ε_e δ_e` where `ε_e` is the output effect of a flip on edge `e`.
    pub fn predicted_difference(&self, net: &Network) -> BinMatrix {
        let mut d = BinMatrix::zeros(self.y.rows(), self.y.cols());
        for (e, delta) in &self.flips {
            let eps = net.edge_effect(*e);
            d = d.add(&BinMatrix::from_fn(d.rows(), d.cols(), |r, c| {
                eps.get(r) && delta.get(c)
            }));
        }
        d
    }
}

/// Sends the columns of `x` through `net` under `plan`.
///
/// Column `i` draws its flips from its own stream keyed by `(plan.seed, i)`,
/// one Bernoulli draw per faulty edge in ascending edge order.
pub fn transmit(
    net: &Network,
    x: &BinMatrix,
    plan: &FaultPlan,
) -> Result<TransmissionRecord, NetError> {
    if x.rows() != net.n() {
        return Err(NetError::Dimension(format!(
            "input has {} rows, network has {} inputs",
            x.rows(),
            net.n()
        )));
    }
    plan.validate(net)?;
    let m = x.cols();
    let mut sorted = plan.faulty_edges.clone();
    sorted.sort_unstable();
    let mut deltas: Vec<BitVec> = vec![BitVec::zeros(m); sorted.len()];
    if plan.flip_probability > 0.0 {
        for c in 0..m {
            let mut rng = rng_for(plan.seed, "netcode-column", c as u64);
            for d in deltas.iter_mut() {
                if rng.gen_bool(plan.flip_probability) {
                    d.set(c, true);
                }
            }
        }
    }
    let mut flip_slots = vec![None; net.edges().len()];
    for (e, d) in sorted.iter().zip(&deltas) {
        flip_slots[*e] = Some(d.clone());
    }
    let y = net.apply(x);
    let z = net.propagate(x, &flip_slots);
    Ok(TransmissionRecord {
        x: x.clone(),
        y,
        z,
        flips: sorted.into_iter().zip(deltas).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBoundTrial {
    pub seed: u64,
    pub t: usize,
    pub m: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBoundReport {
    pub bound: usize,
    pub max_rank: usize,
    /// Trials with `rank(Y - Z) > t`.
    pub violations: usize,
    /// Trials where `Z - Y` differs from `Σ ε_e δ_e`.
    pub decomposition_mismatches: usize,
    pub trials: Vec<RankBoundTrial>,
}

/// Repeats random transmissions of `m` columns under the faulty edges of
/// `plan`, each trial reseeded from `plan.seed` and the trial index.
pub fn check_rank_bound(
    net: &Network,
    trials: usize,
    m: usize,
    plan: &FaultPlan,
) -> Result<RankBoundReport, NetError> {
    plan.validate(net)?;
    let mut report = RankBoundReport {
        bound: plan.t(),
        max_rank: 0,
        violations: 0,
        decomposition_mismatches: 0,
        trials: Vec::new(),
    };
    for i in 0..trials as u64 {
        let seed = derive_seed(plan.seed, "rank-bound-trial", i);
        let mut rng = rng_for(seed, "rank-bound-input", 0);
        let x = BinMatrix::from_fn(net.n(), m, |_, _| rng.gen());
        let trial_plan = FaultPlan {
            seed,
            ..plan.clone()
        };
        let rec = transmit(net, &x, &trial_plan)?;
        let rank = rec.difference_rank();
        if rank > plan.t() {
            report.violations += 1;
        }
        if rec.predicted_difference(net) != rec.y.add(&rec.z) {
            report.decomposition_mismatches += 1;
        }
        report.max_rank = report.max_rank.max(rank);
        report.trials.push(RankBoundTrial {
            seed,
            t: plan.t(),
            m,
            rank,
        });
    }
    Ok(report)
}

/// Sender side of the coded protocol.
#[derive(Debug, Clone)]
pub struct SentBlock {
    /// `X̄`, the systematic codeword matrix (first `k` columns are `X`).
    pub encoded: BinMatrix,
    /// `Ȳ = A X̄`.
    pub ideal: BinMatrix,
    /// `Z̄`, what the receiver observes.
    pub received: BinMatrix,
    pub record: TransmissionRecord,
}

fn invertible_transfer(net: &Network) -> Result<(BinMatrix, BinMatrix), NetError> {
    let a = net.transfer_matrix();
    let inv = a.inverse().ok_or(NetError::SingularTransfer)?;
    Ok((a, inv))
}

/// Encodes the `n × k` block `x` systematically and transmits it.
pub fn protocol_send(
    net: &Network,
    x: &BinMatrix,
    code: &GabidulinCode,
    plan: &FaultPlan,
) -> Result<SentBlock, NetError> {
    invertible_transfer(net)?;
    if code.n() != net.n() || x.rows() != code.n() || x.cols() != code.k() {
        return Err(NetError::Dimension(format!(
            "block is {}x{}, code is ({}, {}), network has {} inputs",
            x.rows(),
            x.cols(),
            code.n(),
            code.k(),
            net.n()
        )));
    }
    let encoded = code.encode_systematic(x)?.to_matrix(code.basis());
    let record = transmit(net, &encoded, plan)?;
    Ok(SentBlock {
        encoded,
        ideal: record.y.clone(),
        received: record.z.clone(),
        record,
    })
}

/// Recovers `Y = A X` from `Z̄` by decoding `A^{-1} Z̄` in the code.
pub fn protocol_receive(
    received: &BinMatrix,
    a: &BinMatrix,
    code: &GabidulinCode,
) -> Result<BinMatrix, NetError> {
    let a_inv = a.inverse().ok_or(NetError::SingularTransfer)?;
    if received.rows() != code.n() || received.cols() != code.n() {
        return Err(NetError::Dimension(format!(
            "received block is {}x{}",
            received.rows(),
            received.cols()
        )));
    }
    let pulled = RankWord::from_matrix(code.basis(), &a_inv.mul(received));
    let decoded = code.decode_bounded(&pulled, code.radius())?;
    let ideal = a.mul(&decoded.codeword.to_matrix(code.basis()));
    Ok(ideal.column_range(0, code.k()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolOutcome {
    Recovered,
    DecodingFailure,
    /// The decoder returned a block that differs from the ground truth.
    Miscorrected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolTrial {
    pub seed: u64,
    pub t: usize,
    pub observed_rank: usize,
    pub outcome: ProtocolOutcome,
}

/// One end-to-end trial with `t` random faulty edges: random `X`, send,
/// receive, compare against `A X`.
pub fn protocol_trial(
    net: &Network,
    code: &GabidulinCode,
    t: usize,
    flip_probability: f64,
    seed: u64,
) -> Result<ProtocolTrial, NetError> {
    let (a, _) = invertible_transfer(net)?;
    let mut rng = rng_for(seed, "protocol-trial", 0);
    let x = BinMatrix::from_fn(code.n(), code.k(), |_, _| rng.gen());
    let plan = FaultPlan::random(
        &mut rng,
        net,
        t,
        flip_probability,
        derive_seed(seed, "protocol-faults", 0),
    )?;
    let sent = protocol_send(net, &x, code, &plan)?;
    let truth = a.mul(&x);
    debug_assert_eq!(sent.ideal.column_range(0, code.k()), truth);
    let observed_rank = sent.ideal.add(&sent.received).rank();
    let outcome = match protocol_receive(&sent.received, &a, code) {
        Ok(y) if y == truth => ProtocolOutcome::Recovered,
        Ok(_) => ProtocolOutcome::Miscorrected,
        Err(NetError::Decode(GabidulinError::DecodingFailure)) => ProtocolOutcome::DecodingFailure,
        Err(e) => return Err(e),
    };
    Ok(ProtocolTrial {
        seed,
        t,
        observed_rank,
        outcome,
    })
}

/// A random layered network whose transfer matrix is invertible.
pub fn random_invertible_layered(rng: &mut impl Rng, cfg: &LayeredConfig) -> Network {
    loop {
        let net = random_layered(rng, cfg);
        if net.transfer_matrix().inverse().is_some() {
            return net;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2field::{Field, NormalBasis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn cfg(n: usize) -> LayeredConfig {
        LayeredConfig {
            n,
            depth: 2,
            width: n,
            density: 0.4,
        }
    }

    #[test]
    fn transfer_matches_vertex_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for _ in 0..10 {
            let net = random_layered(&mut rng, &cfg(6));
            let a = net.transfer_matrix();
            for _ in 0..100 {
                let x = BinMatrix::from_fn(6, 1, |_, _| rng.gen());
                assert_eq!(net.apply(&x), a.mul(&x));
            }
        }
    }

    #[test]
    fn transfer_is_product_of_processing_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let net = random_layered(&mut rng, &cfg(5));
            let n = net.n();
            let dim = net.state_dim();
            let mut prod = BinMatrix::identity(dim);
            for a in net.processing_matrices() {
                prod = a.mul(&prod);
            }
            let embed = BinMatrix::from_fn(dim, n, |r, c| r == c);
            let project = BinMatrix::from_fn(n, dim, |r, c| c == dim - n + r);
            assert_eq!(project.mul(&prod).mul(&embed), net.transfer_matrix());
        }
    }

    #[test]
    fn no_faults_means_exact_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let net = random_layered(&mut rng, &cfg(5));
        let x = BinMatrix::from_fn(5, 10, |_, _| rng.gen());
        let rec = transmit(&net, &x, &FaultPlan::none()).unwrap();
        assert_eq!(rec.y, rec.z);
        assert_eq!(rec.y, net.transfer_matrix().mul(&x));
    }

    #[test]
    fn single_certain_fault_is_rank_one_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let net = random_layered(&mut rng, &cfg(5));
        for e in 0..net.edges().len() {
            let plan = FaultPlan {
                faulty_edges: vec![e],
                flip_probability: 1.0,
                seed: 1,
            };
            let x = BinMatrix::from_fn(5, 8, |_, _| rng.gen());
            let rec = transmit(&net, &x, &plan).unwrap();
            let eps = net.edge_effect(e);
            let expected = BinMatrix::from_fn(5, 8, |r, _| eps.get(r));
            assert_eq!(rec.y.add(&rec.z), expected);
            assert!(rec.difference_rank() <= 1);
        }
    }

    #[test]
    fn rank_bound_small_campaign() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        for t in 0..=5 {
            let net = random_layered(
                &mut rng,
                &LayeredConfig {
                    n: 5,
                    depth: 2,
                    width: 3,
                    density: 0.5,
                },
            );
            let plan = FaultPlan::random(&mut rng, &net, t, 0.5, 99).unwrap();
            let report = check_rank_bound(&net, 50, 10, &plan).unwrap();
            assert_eq!(report.violations, 0);
            assert_eq!(report.decomposition_mismatches, 0);
            assert!(report.max_rank <= t);
            if t == 0 {
                assert_eq!(report.max_rank, 0);
            }
        }
    }

    #[test]
    fn plan_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        let net = random_layered(&mut rng, &cfg(3));
        let x = BinMatrix::zeros(3, 2);
        let bad = FaultPlan {
            faulty_edges: vec![10_000],
            flip_probability: 0.5,
            seed: 0,
        };
        assert!(matches!(
            transmit(&net, &x, &bad),
            Err(NetError::InvalidPlan(_))
        ));
        let bad = FaultPlan {
            faulty_edges: vec![0],
            flip_probability: 1.5,
            seed: 0,
        };
        assert!(matches!(
            transmit(&net, &x, &bad),
            Err(NetError::InvalidPlan(_))
        ));
        assert!(matches!(
            transmit(&net, &BinMatrix::zeros(4, 2), &FaultPlan::none()),
            Err(NetError::Dimension(_))
        ));
    }

    #[test]
    fn transmission_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(76);
        let net = random_layered(&mut rng, &cfg(5));
        let plan = FaultPlan::random(&mut rng, &net, 3, 0.5, 1234).unwrap();
        let x = BinMatrix::from_fn(5, 10, |_, _| rng.gen());
        let a = transmit(&net, &x, &plan).unwrap();
        let b = transmit(&net, &x, &plan).unwrap();
        assert_eq!(a.z, b.z);
        // column i only depends on its own stream: a prefix transmits identically
        let c = transmit(&net, &x.column_range(0, 4), &plan).unwrap();
        assert_eq!(c.z, a.z.column_range(0, 4));
    }

    #[test]
    fn protocol_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let basis =
            Arc::new(NormalBasis::find_self_dual(Arc::new(Field::new(7).unwrap())).unwrap());
        let code = GabidulinCode::new(basis, 0, 3).unwrap();
        let net = random_invertible_layered(&mut rng, &cfg(7));
        let a = net.transfer_matrix();
        let x = BinMatrix::from_fn(7, 3, |_, _| rng.gen());
        let sent = protocol_send(&net, &x, &code, &FaultPlan::none()).unwrap();
        assert_eq!(sent.encoded.column_range(0, 3), x);
        assert_eq!(sent.received, sent.ideal);
        assert_eq!(
            protocol_receive(&sent.received, &a, &code).unwrap(),
            a.mul(&x)
        );
        for t in 0..=2 {
            for s in 0..30 {
                let trial = protocol_trial(&net, &code, t, 0.5, s).unwrap();
                assert!(trial.observed_rank <= t);
                assert_eq!(trial.outcome, ProtocolOutcome::Recovered);
            }
        }
    }

    #[test]
    fn protocol_rejects_singular_networks() {
        let mut b = NetworkBuilder::new();
        let i0 = b.vertex("i0", VertexKind::Input);
        let i1 = b.vertex("i1", VertexKind::Input);
        let o0 = b.vertex("o0", VertexKind::Output);
        let o1 = b.vertex("o1", VertexKind::Output);
        b.edge("a", i0, o0, BitVec::from_u64(1, 1));
        b.edge("b", i0, o1, BitVec::from_u64(1, 1));
        b.edge("c", i1, o1, BitVec::from_u64(0, 1));
        b.outmap(o0, BitVec::from_u64(1, 1));
        b.outmap(o1, BitVec::from_u64(0b11, 2));
        let net = b.build().unwrap();
        assert_eq!(net.transfer_matrix().rank(), 1);
        assert!(matches!(
            protocol_trial(&net, &dummy_code(), 0, 0.0, 0),
            Err(NetError::SingularTransfer)
        ));
    }

    fn dummy_code() -> GabidulinCode {
        let basis =
            Arc::new(NormalBasis::find_self_dual(Arc::new(Field::new(3).unwrap())).unwrap());
        GabidulinCode::new(basis, 0, 1).unwrap()
    }
}
