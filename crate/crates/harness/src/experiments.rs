use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use rankmetric::f2field::{BinMatrix, BitVec, Field, NormalBasis};
use rankmetric::gabidulin::{inner_product, GabidulinCode, RankWord};
use rankmetric::netcode::{
    parse_network, protocol_trial, random_invertible_layered, random_layered, transmit, FaultPlan,
    LayeredConfig, Network, ProtocolOutcome,
};
use rankmetric::pauli::{
    parse_circuit, propagated_faults, push_faults_left, random_circuit, random_forced_faults,
    run_stacked, run_with_faults, Circuit, Letter, StackedError, StackedNoiseModel, MAX_LAYERS,
};
use rankmetric::qgab::{
    commutes, conjugate_code, e2e_correct, random_rank_error, ConjugatedCode, E2eOutcome,
    QuantumGabidulinCode,
};
use rankmetric::seed::{derive_seed, rng_for};

use crate::{
    read_file, E2eMode, Experiment, ExperimentConfig, HarnessError, Params, RunSummary, TrialRecord,
};

const DEFAULT_DEGREES: [u32; 5] = [3, 5, 7, 9, 11];

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn self_dual_basis(n: u32) -> Result<Arc<NormalBasis>, HarnessError> {
    if n.is_multiple_of(2) || n > 31 {
        return Err(config_err(format!(
            "n = {n}: a self-dual normal basis needs odd n ≤ 31"
        )));
    }
    Ok(Arc::new(NormalBasis::find_self_dual(Arc::new(
        Field::new(n)?,
    ))?))
}

fn single_n(params: &Params, default: Option<u32>) -> Result<u32, HarnessError> {
    match (params.n.as_slice(), default) {
        ([n], _) => Ok(*n),
        ([], Some(d)) => Ok(d),
        ([], None) => Err(config_err("--n is required")),
        _ => Err(config_err("this experiment takes a single --n")),
    }
}

fn cycled<T: Copy>(list: &[T], i: usize) -> T {
    list[i % list.len()]
}

fn record(
    exp: Experiment,
    seed: u64,
    trial: usize,
    values: Vec<(&'static str, String)>,
    pass: bool,
) -> TrialRecord {
    TrialRecord {
        experiment: exp.name(),
        seed,
        trial,
        values,
        pass,
    }
}

fn b(v: bool) -> String {
    u8::from(v).to_string()
}

/// Runs `f(i, seed_i)` for every trial on the current pool, in trial order.
fn par_trials<F>(config: &ExperimentConfig, f: F) -> Result<Vec<TrialRecord>, HarnessError>
where
    F: Fn(usize, u64) -> Result<TrialRecord, HarnessError> + Sync,
{
    let name = config.experiment.name();
    (0..config.trials)
        .into_par_iter()
        .map(|i| f(i, derive_seed(config.seed, name, i as u64)))
        .collect()
}

pub(crate) struct NetcodeSetup {
    n: usize,
    code: Option<GabidulinCode>,
    network: Option<Network>,
    faulty: Vec<usize>,
    columns: Vec<usize>,
    p: f64,
    layout: LayeredConfig,
}

pub(crate) struct StackedSetup {
    circuit: Option<Circuit>,
    layers: Option<usize>,
    max_width: usize,
    max_size: usize,
    p: f64,
    faults: Option<usize>,
}

pub(crate) struct E2eSetup {
    code: QuantumGabidulinCode,
    mode: E2eMode,
    circuit: Option<Circuit>,
    size: usize,
    faults: Option<usize>,
    p: f64,
    rank: usize,
}

pub(crate) enum Prepared {
    Basis(Vec<u32>),
    GabDistance {
        n: u32,
        k: usize,
    },
    GabDual {
        ns: Vec<u32>,
        k: Option<usize>,
    },
    Netcode(Box<NetcodeSetup>),
    Stacked(StackedSetup),
    QgabParams {
        n: u32,
        r: usize,
        s: usize,
    },
    QgabDistance {
        n: u32,
        r: usize,
        s: usize,
        size: usize,
    },
    QgabE2e(Box<E2eSetup>),
}

fn probability(p: Option<f64>, default: f64) -> Result<f64, HarnessError> {
    let p = p.unwrap_or(default);
    if !(0.0..=1.0).contains(&p) {
        return Err(config_err(format!("probability {p} outside [0,1]")));
    }
    Ok(p)
}

/// Validates parameters and loads input files before any trial runs.
pub(crate) fn prepare(config: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    let p = &config.params;
    let degrees = || {
        if p.n.is_empty() {
            DEFAULT_DEGREES.to_vec()
        } else {
            p.n.clone()
        }
    };
    Ok(match config.experiment {
        Experiment::Basis => {
            let ns = degrees();
            for &n in &ns {
                self_dual_basis(n)?;
            }
            Prepared::Basis(ns)
        }
        Experiment::GabDistance => {
            let n = single_n(p, None)?;
            let k = p.k.ok_or_else(|| config_err("--k is required"))?;
            if k == 0 || k > n as usize {
                return Err(config_err(format!("need 1 ≤ k ≤ n, got k = {k}")));
            }
            self_dual_basis(n)?;
            Prepared::GabDistance { n, k }
        }
        Experiment::GabDual => {
            let ns = degrees();
            for &n in &ns {
                self_dual_basis(n)?;
                if let Some(k) = p.k {
                    if k == 0 || k >= n as usize {
                        return Err(config_err(format!("need 1 ≤ k < n, got n = {n}, k = {k}")));
                    }
                }
            }
            Prepared::GabDual { ns, k: p.k }
        }
        Experiment::NetcodeSim => {
            let network = match &p.network {
                Some(path) => Some(parse_network(&read_file(path)?)?),
                None => None,
            };
            let n = match (&network, p.n.as_slice()) {
                (Some(net), []) => net.n(),
                (Some(net), [n]) if *n as usize == net.n() => net.n(),
                (Some(net), _) => {
                    return Err(config_err(format!(
                        "network has {} inputs, --n disagrees",
                        net.n()
                    )))
                }
                (None, _) => single_n(p, None)? as usize,
            };
            let code = match p.k {
                Some(k) => {
                    let basis = self_dual_basis(n as u32)?;
                    let code = GabidulinCode::new(basis, 0, k)?;
                    if let Some(net) = &network {
                        if net.transfer_matrix().inverse().is_none() {
                            return Err(config_err("the network's transfer matrix is singular"));
                        }
                    }
                    Some(code)
                }
                None => None,
            };
            let faulty = if p.faulty.is_empty() {
                let top = code.as_ref().map_or(5, GabidulinCode::radius);
                let top = network
                    .as_ref()
                    .map_or(top, |net| top.min(net.edges().len()));
                (0..=top).collect()
            } else {
                p.faulty.clone()
            };
            if let Some(net) = &network {
                if let Some(&t) = faulty.iter().find(|&&t| t > net.edges().len()) {
                    return Err(config_err(format!(
                        "{t} faulty edges requested, network has {}",
                        net.edges().len()
                    )));
                }
            }
            let columns = if p.columns.is_empty() {
                vec![n]
            } else {
                p.columns.clone()
            };
            if columns.contains(&0) {
                return Err(config_err("column counts must be positive"));
            }
            let density = probability(p.density, 0.5)?;
            let layout = LayeredConfig {
                n,
                depth: p.depth.unwrap_or(2),
                width: p.width.unwrap_or(n),
                density,
            };
            if n == 0 || (layout.depth > 0 && layout.width == 0) {
                return Err(config_err(
                    "network needs at least one input and nonempty layers",
                ));
            }
            Prepared::Netcode(Box::new(NetcodeSetup {
                n,
                code,
                network,
                faulty,
                columns,
                p: probability(p.p, 0.5)?,
                layout,
            }))
        }
        Experiment::StackedSim => {
            let circuit = match &p.circuit {
                Some(path) => Some(parse_circuit(&read_file(path)?)?),
                None => None,
            };
            let max_width = p.max_width.unwrap_or(16);
            let max_size = p.max_size.unwrap_or(200);
            if max_width == 0 || max_size == 0 {
                return Err(config_err("--max-width and --max-size must be positive"));
            }
            let widest = circuit.as_ref().map_or(max_width, Circuit::width);
            let layers = p.layers.unwrap_or(widest);
            if layers > MAX_LAYERS {
                return Err(config_err(format!(
                    "at most {MAX_LAYERS} layers are supported"
                )));
            }
            if let (Some(c), Some(f)) = (&circuit, p.faults) {
                if f > c.len() {
                    return Err(config_err(format!(
                        "{f} forced faults but the circuit has {} gates",
                        c.len()
                    )));
                }
            }
            Prepared::Stacked(StackedSetup {
                circuit,
                layers: p.layers,
                max_width,
                max_size,
                p: probability(p.p, 0.02)?,
                faults: p.faults,
            })
        }
        Experiment::QgabParams | Experiment::QgabDistance => {
            let n = single_n(p, Some(3))?;
            let r = p.r.unwrap_or(1);
            let s = p.s.unwrap_or(r);
            QuantumGabidulinCode::build(self_dual_basis(n)?, r, s)?;
            if config.experiment == Experiment::QgabParams {
                Prepared::QgabParams { n, r, s }
            } else {
                Prepared::QgabDistance {
                    n,
                    r,
                    s,
                    size: p.size.unwrap_or(20),
                }
            }
        }
        Experiment::QgabE2e => {
            let n = single_n(p, None)?;
            let r = p.r.ok_or_else(|| config_err("--r is required"))?;
            let s = p.s.unwrap_or(r);
            if s != r {
                return Err(config_err("end-to-end correction needs s = r"));
            }
            let code = QuantumGabidulinCode::build(self_dual_basis(n)?, r, s)?;
            let circuit = match &p.circuit {
                Some(path) => {
                    let c = parse_circuit(&read_file(path)?)?;
                    if c.width() != n as usize {
                        return Err(config_err(format!(
                            "circuit width {} differs from n = {n}",
                            c.width()
                        )));
                    }
                    Some(c)
                }
                None => None,
            };
            let size = circuit.as_ref().map_or(p.size.unwrap_or(100), Circuit::len);
            let faults = match (p.faults, p.p) {
                (Some(f), _) => Some(f),
                (None, Some(_)) => None,
                (None, None) => Some(1),
            };
            if faults.is_some_and(|f| f > size) {
                return Err(config_err("more forced faults than gates"));
            }
            let rank = p.rank.unwrap_or(1);
            if rank > n as usize {
                return Err(config_err(format!("rank {rank} exceeds n = {n}")));
            }
            Prepared::QgabE2e(Box::new(E2eSetup {
                code,
                mode: p.mode,
                circuit,
                size,
                faults,
                p: probability(p.p, 0.0)?,
                rank,
            }))
        }
    })
}

impl Prepared {
    pub(crate) fn execute(&self, config: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
        let exp = config.experiment;
        let (records, notes) = match self {
            Prepared::Basis(ns) => basis(config, ns)?,
            Prepared::GabDistance { n, k } => gab_distance(config, *n, *k)?,
            Prepared::GabDual { ns, k } => gab_dual(config, ns, *k)?,
            Prepared::Netcode(setup) => netcode(config, setup)?,
            Prepared::Stacked(setup) => stacked(config, setup)?,
            Prepared::QgabParams { n, r, s } => qgab_params(config, *n, *r, *s)?,
            Prepared::QgabDistance { n, r, s, size } => qgab_distance(config, *n, *r, *s, *size)?,
            Prepared::QgabE2e(setup) => qgab_e2e(config, setup)?,
        };
        Ok(RunSummary {
            experiment: exp,
            records,
            notes,
        })
    }
}

type Output = (Vec<TrialRecord>, Vec<String>);

fn basis(config: &ExperimentConfig, ns: &[u32]) -> Result<Output, HarnessError> {
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &n in ns {
        let nb = self_dual_basis(n)?;
        let f = nb.field();
        let mut held = 0;
        for i in 0..n as usize {
            for j in 0..n as usize {
                // trace summed from its definition, not the precomputed mask
                let tr = f.trace_by_definition(f.mul(nb.element(i), nb.element(j)));
                let pass = tr == (i == j);
                held += usize::from(pass);
                let values = vec![
                    ("n", n.to_string()),
                    ("modulus", format!("{:#x}", f.modulus())),
                    ("alpha", format!("{:#x}", nb.alpha().bits())),
                    ("i", i.to_string()),
                    ("j", j.to_string()),
                    ("trace", b(tr)),
                    ("expected", b(i == j)),
                ];
                records.push(record(
                    Experiment::Basis,
                    config.seed,
                    records.len(),
                    values,
                    pass,
                ));
            }
        }
        notes.push(format!(
            "n={n}: modulus {:#x}, alpha = {:#x}; {held}/{} trace conditions hold",
            f.modulus(),
            nb.alpha().bits(),
            n * n
        ));
    }
    Ok((records, notes))
}

fn gab_distance(config: &ExperimentConfig, n: u32, k: usize) -> Result<Output, HarnessError> {
    let code = GabidulinCode::new(self_dual_basis(n)?, 0, k)?;
    let d = code.min_rank_distance_exhaustive()?;
    let bound = n as usize - k + 1;
    let values = vec![
        ("n", n.to_string()),
        ("k", k.to_string()),
        ("log2_codewords", (n as usize * k).to_string()),
        ("distance", d.to_string()),
        ("expected", bound.to_string()),
    ];
    let notes = vec![format!(
        "Gab({n},{k}): exhaustive minimum rank distance {d}, expected {bound}"
    )];
    Ok((
        vec![record(
            Experiment::GabDistance,
            config.seed,
            0,
            values,
            d == bound,
        )],
        notes,
    ))
}

fn gab_dual(
    config: &ExperimentConfig,
    ns: &[u32],
    k: Option<usize>,
) -> Result<Output, HarnessError> {
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &n in ns {
        let basis = self_dual_basis(n)?;
        let nn = n as usize;
        let ks: Vec<usize> = match k {
            Some(k) => vec![k],
            None => (1..nn).collect(),
        };
        let mut ok = 0;
        for &k in &ks {
            let code = GabidulinCode::new(basis.clone(), 0, k)?;
            let dual = code.dual()?;
            let (g, h) = (code.f2_generators(), dual.f2_generators());
            let nonzero = g
                .iter()
                .map(|x| {
                    h.iter()
                        .filter(|y| inner_product(basis.field(), x.symbols(), y.symbols()))
                        .count()
                })
                .sum::<usize>();
            let rows: Vec<BitVec> = g.iter().chain(&h).map(|w| w.to_bits(nn)).collect();
            let joint_rank = BinMatrix::from_rows(&rows, nn * nn).rank();
            let dim_sum = code.f2_dimension() + dual.f2_dimension();
            let pass = dim_sum == nn * nn && joint_rank == nn * nn && nonzero == 0;
            ok += usize::from(pass);
            let values = vec![
                ("n", n.to_string()),
                ("k", k.to_string()),
                ("dual_k", dual.k().to_string()),
                ("dual_shift", dual.shift().to_string()),
                ("f2_dim_sum", dim_sum.to_string()),
                ("joint_rank", joint_rank.to_string()),
                ("nonzero_products", nonzero.to_string()),
            ];
            records.push(record(
                Experiment::GabDual,
                config.seed,
                records.len(),
                values,
                pass,
            ));
        }
        notes.push(format!("n={n}: {ok}/{} dual pairs verified", ks.len()));
    }
    Ok((records, notes))
}

fn outcome_name(o: ProtocolOutcome) -> &'static str {
    match o {
        ProtocolOutcome::Recovered => "recovered",
        ProtocolOutcome::DecodingFailure => "decoding-failure",
        ProtocolOutcome::Miscorrected => "miscorrected",
    }
}

fn netcode(config: &ExperimentConfig, s: &NetcodeSetup) -> Result<Output, HarnessError> {
    let records = par_trials(config, |i, seed| {
        let mut rng = rng_for(seed, "network", 0);
        let net = match &s.network {
            Some(net) => net.clone(),
            None if s.code.is_some() => random_invertible_layered(&mut rng, &s.layout),
            None => random_layered(&mut rng, &s.layout),
        };
        let t = cycled(&s.faulty, i);
        let m = cycled(&s.columns, i);
        let plan = FaultPlan::random(&mut rng, &net, t, s.p, derive_seed(seed, "faults", 0))?;
        let x = BinMatrix::from_fn(s.n, m, |_, _| rng.gen());
        let rec = transmit(&net, &x, &plan)?;
        let rank = rec.difference_rank();
        let decomposition_ok = rec.predicted_difference(&net) == rec.y.add(&rec.z);
        let mut pass = rank <= t && decomposition_ok;
        let (outcome, protocol_rank) = match &s.code {
            Some(code) => {
                let pt = protocol_trial(&net, code, t, s.p, derive_seed(seed, "protocol", 0))?;
                pass &= pt.observed_rank <= t;
                if t <= code.radius() {
                    pass &= pt.outcome == ProtocolOutcome::Recovered;
                }
                (outcome_name(pt.outcome), pt.observed_rank.to_string())
            }
            None => ("-", "-".to_string()),
        };
        let values = vec![
            ("n", s.n.to_string()),
            ("edges", net.edges().len().to_string()),
            ("m", m.to_string()),
            ("t", t.to_string()),
            ("p", s.p.to_string()),
            ("rank", rank.to_string()),
            ("bound", t.to_string()),
            ("decomposition_ok", b(decomposition_ok)),
            ("protocol", outcome.to_string()),
            ("protocol_rank", protocol_rank),
        ];
        Ok(record(Experiment::NetcodeSim, seed, i, values, pass))
    })?;
    let max_excess = records
        .iter()
        .map(|r| num(r, "rank") as i64 - num(r, "t") as i64)
        .max()
        .unwrap_or(0);
    let mut notes = vec![format!(
        "{} transmissions, max rank(Y-Z) - t = {max_excess}, {} invariant violations",
        records.len(),
        records.iter().filter(|r| !r.pass).count()
    )];
    if let Some(code) = &s.code {
        for o in [
            ProtocolOutcome::Recovered,
            ProtocolOutcome::DecodingFailure,
            ProtocolOutcome::Miscorrected,
        ] {
            let within = records
                .iter()
                .filter(|r| {
                    r.get("protocol") == Some(outcome_name(o)) && num(r, "t") <= code.radius()
                })
                .count();
            let beyond = records
                .iter()
                .filter(|r| {
                    r.get("protocol") == Some(outcome_name(o)) && num(r, "t") > code.radius()
                })
                .count();
            notes.push(format!(
                "protocol {}: {within} within radius, {beyond} beyond",
                outcome_name(o)
            ));
        }
    }
    Ok((records, notes))
}

fn num(r: &TrialRecord, column: &str) -> usize {
    r.get(column).and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn stacked(config: &ExperimentConfig, s: &StackedSetup) -> Result<Output, HarnessError> {
    let records = par_trials(config, |i, seed| {
        let mut rng = rng_for(seed, "circuit", 0);
        let circuit = match &s.circuit {
            Some(c) => c.clone(),
            None => {
                let width = rng.gen_range(1..=s.max_width);
                let size = rng.gen_range(1..=s.max_size);
                random_circuit(&mut rng, width, size)
            }
        };
        let layers = s.layers.unwrap_or(circuit.width());
        let faults = match s.faults {
            Some(f) => random_forced_faults(&mut rng, &circuit, layers, f.min(circuit.len()))?,
            None => {
                let model = StackedNoiseModel::new(s.p, derive_seed(seed, "noise", 0))?;
                run_stacked(&circuit, layers, &model)?.faults
            }
        };
        let q = run_with_faults(&circuit, layers, &faults)?;
        let naive = push_faults_left(&circuit, layers, &faults)?;
        let rank_sum: usize = propagated_faults(&circuit, &faults)
            .iter()
            .map(StackedError::rank)
            .sum();
        let (t, rank) = (faults.len(), q.rank());
        let pass = rank <= 4 * t && rank <= rank_sum && naive == q && (t != 1 || rank >= 1);
        let values = vec![
            ("width", circuit.width().to_string()),
            ("size", circuit.len().to_string()),
            ("layers", layers.to_string()),
            ("t", t.to_string()),
            ("rank", rank.to_string()),
            ("bound", (4 * t).to_string()),
            ("rank_sum", rank_sum.to_string()),
            ("paths_agree", b(naive == q)),
        ];
        Ok(record(Experiment::StackedSim, seed, i, values, pass))
    })?;
    let max_excess = records
        .iter()
        .map(|r| num(r, "rank") as i64 - num(r, "bound") as i64)
        .max()
        .unwrap_or(0);
    let notes = vec![format!(
        "{} runs, {} faults total, max rank(Q) - 4t = {max_excess}, {} violations",
        records.len(),
        records.iter().map(|r| num(r, "t")).sum::<usize>(),
        records.iter().filter(|r| !r.pass).count()
    )];
    Ok((records, notes))
}

fn qgab_params(
    config: &ExperimentConfig,
    n: u32,
    r: usize,
    s: usize,
) -> Result<Output, HarnessError> {
    let code = QuantumGabidulinCode::build(self_dual_basis(n)?, r, s)?;
    let nn = n as usize;
    let mut rng = rng_for(config.seed, "qgab-params", 0);
    let field = code.basis().field().clone();
    let mut word = || {
        RankWord::new(
            (0..nn)
                .map(|_| {
                    field
                        .element(rng.gen_range(0..field.order()))
                        .expect("in range")
                })
                .collect(),
        )
    };
    let mut mismatches = 0usize;
    let mut checks = 0usize;
    for _ in 0..config.trials {
        let (x, y) = (word(), word());
        checks += 1;
        if commutes(code.basis(), &x, &y).is_err() {
            mismatches += 1;
        }
    }
    for x in code.x_words() {
        for y in code.z_words() {
            checks += 1;
            match commutes(code.basis(), x, y) {
                Ok(true) => {}
                _ => mismatches += 1,
            }
        }
    }
    let logical = code.logical_count();
    let expected = nn * nn - nn * (r + s);
    let pass = logical == expected && mismatches == 0 && (s != r || logical == nn * (nn - 2 * r));
    let values = vec![
        ("n", n.to_string()),
        ("r", r.to_string()),
        ("s", s.to_string()),
        ("physical", (nn * nn).to_string()),
        ("generators", code.group().generators().count().to_string()),
        (
            "generator_rank",
            code.group().generator_matrix_rank().to_string(),
        ),
        ("logical", logical.to_string()),
        ("expected", expected.to_string()),
        ("commutation_checks", checks.to_string()),
        ("mismatches", mismatches.to_string()),
    ];
    let notes = vec![format!(
        "qGab(n={n}, r={r}, s={s}): {} physical qubits, k = {logical} logical (expected {expected}); \
         {checks} commutation checks, {mismatches} mismatches",
        nn * nn
    )];
    Ok((
        vec![record(Experiment::QgabParams, config.seed, 0, values, pass)],
        notes,
    ))
}

fn qgab_distance(
    config: &ExperimentConfig,
    n: u32,
    r: usize,
    s: usize,
    size: usize,
) -> Result<Output, HarnessError> {
    let code = QuantumGabidulinCode::build(self_dual_basis(n)?, r, s)?;
    let bound = r.min(s) + 1;
    let base = code.min_rank_distance_exhaustive()?;
    let row = |trial: usize,
               seed: u64,
               circuit_size: usize,
               d: &rankmetric::qgab::MinRankDistance,
               pass: bool| {
        let values = vec![
            ("n", n.to_string()),
            ("r", r.to_string()),
            ("s", s.to_string()),
            ("circuit_size", circuit_size.to_string()),
            ("centralizer_dim", d.centralizer_dim.to_string()),
            ("stabilizer_dim", d.stabilizer_dim.to_string()),
            ("distance", d.distance.map_or("-".into(), |v| v.to_string())),
            ("bound", bound.to_string()),
        ];
        record(Experiment::QgabDistance, seed, trial, values, pass)
    };
    let base_ok = base.distance.is_none_or(|d| d >= bound);
    let mut records = vec![row(0, config.seed, 0, &base, base_ok)];
    let conj_rows = par_trials(config, |i, seed| {
        let mut rng = rng_for(seed, "circuit", 0);
        let circuit = random_circuit(&mut rng, n as usize, size);
        let d = conjugate_code(&code, &circuit)?
            .group()
            .min_rank_distance_exhaustive()?;
        let pass = d.distance == base.distance;
        Ok(row(i + 1, seed, size, &d, pass))
    })?;
    records.extend(conj_rows);
    let notes = vec![format!(
        "qGab(n={n}, r={r}, s={s}): centralizer 2^{}, minimum rank distance {} (bound {bound}); \
         {} conjugated codes agree",
        base.centralizer_dim,
        base.distance.map_or("-".into(), |v| v.to_string()),
        records[1..].iter().filter(|r| r.pass).count()
    )];
    Ok((records, notes))
}

fn e2e_values(n: u32, r: usize, t: String, o: &E2eOutcome) -> Vec<(&'static str, String)> {
    vec![
        ("n", n.to_string()),
        ("r", r.to_string()),
        ("t", t),
        ("rank", o.rank.to_string()),
        ("syndrome_weight", o.syndrome_weight.to_string()),
        ("success", b(o.success)),
        ("x_failed", b(o.x_failed)),
        ("z_failed", b(o.z_failed)),
        ("pullback_ok", b(o.pullback_consistent)),
        ("exact", b(o.exact)),
    ]
}

/// Within rank `⌊r/2⌋` correction must be exact; the pull-back syndrome
/// must always match.
fn e2e_pass(o: &E2eOutcome, r: usize) -> bool {
    o.pullback_consistent && (o.rank > r / 2 || (o.success && o.exact))
}

fn qgab_e2e(config: &ExperimentConfig, s: &E2eSetup) -> Result<Output, HarnessError> {
    let code = &s.code;
    let (n, r) = (code.n() as u32, code.r());
    let nn = code.n();
    let exp = Experiment::QgabE2e;
    let records = match s.mode {
        E2eMode::Circuit => par_trials(config, |i, seed| {
            let mut rng = rng_for(seed, "circuit", 0);
            let circuit = match &s.circuit {
                Some(c) => c.clone(),
                None => random_circuit(&mut rng, nn, s.size),
            };
            let conj = conjugate_code(code, &circuit)?;
            let faults = match s.faults {
                Some(f) => random_forced_faults(&mut rng, &circuit, nn, f)?,
                None => {
                    run_stacked(
                        &circuit,
                        nn,
                        &StackedNoiseModel::new(s.p, derive_seed(seed, "noise", 0))?,
                    )?
                    .faults
                }
            };
            let q = run_with_faults(&circuit, nn, &faults)?;
            let o = e2e_correct(code, &conj, &q, faults.len())?;
            let pass = e2e_pass(&o, r) && o.rank <= 4 * o.t;
            Ok(record(
                exp,
                seed,
                i,
                e2e_values(n, r, o.t.to_string(), &o),
                pass,
            ))
        })?,
        E2eMode::SingleQubit => {
            let conj = identity_frame(code)?;
            let mut cases = Vec::new();
            for layer in 0..nn {
                for cell in 0..nn {
                    for letter in [Letter::X, Letter::Y, Letter::Z] {
                        cases.push((layer, cell, letter));
                    }
                }
            }
            cases
                .par_iter()
                .enumerate()
                .map(|(i, &(layer, cell, letter))| {
                    let mut q = StackedError::identity(nn, nn)?;
                    q.set(layer, cell, letter);
                    let o = e2e_correct(code, &conj, &q, 1)?;
                    let pass = e2e_pass(&o, r);
                    Ok(record(
                        exp,
                        config.seed,
                        i,
                        e2e_values(n, r, "-".into(), &o),
                        pass,
                    ))
                })
                .collect::<Result<Vec<_>, HarnessError>>()?
        }
        E2eMode::RandomRank => {
            let conj = identity_frame(code)?;
            par_trials(config, |i, seed| {
                let mut rng = rng_for(seed, "error", 0);
                let q = random_rank_error(&mut rng, nn, s.rank);
                let o = e2e_correct(code, &conj, &q, 0)?;
                Ok(record(
                    exp,
                    seed,
                    i,
                    e2e_values(n, r, "-".into(), &o),
                    e2e_pass(&o, r),
                ))
            })?
        }
    };
    let successes = records
        .iter()
        .filter(|r| r.get("success") == Some("1"))
        .count();
    let notes = vec![format!(
        "qGab(n={n}, r={r}): {successes}/{} corrected, {} invariant violations",
        records.len(),
        records.iter().filter(|r| !r.pass).count()
    )];
    Ok((records, notes))
}

fn identity_frame(code: &QuantumGabidulinCode) -> Result<ConjugatedCode, HarnessError> {
    Ok(conjugate_code(code, &Circuit::new(code.n()))?)
}
