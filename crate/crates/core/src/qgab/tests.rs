use super::*;
use crate::f2field::{Field, FieldElement};
use crate::pauli::{CliffordGate, GateKind, Letter, PauliOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basis(n: u32) -> Arc<NormalBasis> {
    Arc::new(NormalBasis::find_self_dual(Arc::new(Field::new(n).unwrap())).unwrap())
}

fn code(n: u32, r: usize, s: usize) -> QuantumGabidulinCode {
    QuantumGabidulinCode::build(basis(n), r, s).unwrap()
}

fn random_word(rng: &mut impl Rng, n: usize) -> RankWord {
    RankWord::new(
        (0..n)
            .map(|_| FieldElement::from_bits(rng.gen::<u64>() & ((1 << n) - 1)))
            .collect(),
    )
}

fn single_qubit(n: usize, layer: usize, cell: usize, letter: Letter) -> StackedError {
    let mut e = StackedError::identity(n, n).unwrap();
    e.set(layer, cell, letter);
    e
}

#[test]
fn construction_and_counting() {
    let c = code(3, 1, 1);
    assert_eq!(c.physical_qubits(), 9);
    assert_eq!(c.group().x_generators().len(), 3);
    assert_eq!(c.group().z_generators().len(), 3);
    assert!(c.group().all_commute());
    for (n, r, k) in [
        (3, 1, 3),
        (5, 1, 15),
        (5, 2, 5),
        (7, 3, 7),
        (7, 1, 35),
        (9, 4, 9),
    ] {
        let c = code(n, r, r);
        assert_eq!(c.logical_count(), k, "n={n} r={r}");
        assert_eq!(c.logical_count(), (n as usize) * (n as usize - 2 * r));
    }
    let c = code(5, 2, 2);
    assert_eq!(c.group().generators().count(), 20);
    assert_eq!(code(7, 1, 4).logical_count(), 49 - 35);
}

#[test]
fn construction_errors() {
    assert!(matches!(
        QuantumGabidulinCode::build(basis(3), 2, 1),
        Err(QgabError::InvalidParameters { n: 3, r: 2, s: 1 })
    ));
    let field = Arc::new(Field::new(5).unwrap());
    let plain = field
        .elements()
        .filter_map(|a| NormalBasis::new(field.clone(), a).ok())
        .find(|b| !b.is_self_dual())
        .expect("GF(32) has normal bases that are not self-dual");
    assert_eq!(
        QuantumGabidulinCode::build(Arc::new(plain), 1, 1).unwrap_err(),
        QgabError::NotSelfDual
    );
}

#[test]
fn commutation_two_ways() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for n in [3u32, 5, 7] {
        let b = basis(n);
        let nn = n as usize;
        let alpha_vec = RankWord::new(b.elements().to_vec());
        assert!(!commutes(&b, &alpha_vec, &alpha_vec).unwrap());
        let zero = RankWord::zero(nn);
        let mut commuting = 0;
        for _ in 0..10_000 {
            let (x, y) = (random_word(&mut rng, nn), random_word(&mut rng, nn));
            // an Err here would mean the two computations disagree
            if commutes(&b, &x, &y).unwrap() {
                commuting += 1;
            }
            assert!(commutes(&b, &x, &zero).unwrap());
        }
        // a random pair commutes with probability 1/2
        assert!((4500..5500).contains(&commuting), "{commuting}");
    }
}

#[test]
fn syndromes_and_stabilizers() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let c = code(3, 1, 1);
    let id = StackedError::identity(3, 3).unwrap();
    assert!(c.syndrome(&id).is_zero());
    assert!(c.is_stabilizer(&id));
    let gens: Vec<&StackedError> = c.group().generators().collect();
    for _ in 0..100 {
        let mut e = id.clone();
        for _ in 0..3 {
            e.mul_assign(gens[rng.gen_range(0..gens.len())]);
        }
        assert!(c.syndrome(&e).is_zero());
        assert!(c.is_stabilizer(&e));
    }
    for layer in 0..3 {
        for cell in 0..3 {
            for letter in [Letter::X, Letter::Y, Letter::Z] {
                let e = single_qubit(3, layer, cell, letter);
                assert!(!c.syndrome(&e).is_zero());
                assert!(!c.is_stabilizer(&e));
            }
        }
    }
    // syndrome is linear
    for _ in 0..100 {
        let a = StackedError::random(&mut rng, 3, 3).unwrap();
        let b = StackedError::random(&mut rng, 3, 3).unwrap();
        let (sa, sb, sab) = (c.syndrome(&a), c.syndrome(&b), c.syndrome(&a.mul(&b)));
        let mut x = sa.x_syndrome.clone();
        x.xor_assign(&sb.x_syndrome);
        let mut z = sa.z_syndrome.clone();
        z.xor_assign(&sb.z_syndrome);
        assert_eq!(
            sab,
            Syndrome {
                x_syndrome: x,
                z_syndrome: z
            }
        );
    }
}

#[test]
fn x_generators_have_zero_x_syndrome() {
    for (n, r, s) in [(5, 2, 2), (7, 2, 3), (9, 3, 3)] {
        let c = code(n, r, s);
        for g in c.group().generators() {
            assert!(c.syndrome(g).is_zero());
        }
    }
}

#[test]
fn min_distance_of_smallest_code() {
    let c = code(3, 1, 1);
    let d = c.min_rank_distance_exhaustive().unwrap();
    assert_eq!(d.centralizer_dim, 12);
    assert_eq!(d.stabilizer_dim, 6);
    assert_eq!(d.checked, (1 << 12) - (1 << 6));
    let dist = d.distance.unwrap();
    assert!(dist >= 2);
    assert_eq!(dist, 2);
    let w = d.witness.unwrap();
    assert_eq!(w.rank(), dist);
    assert!(c.syndrome(&w).is_zero());
    assert!(!c.is_stabilizer(&w));
    assert!(matches!(
        code(5, 1, 1).min_rank_distance_exhaustive(),
        Err(QgabError::TooLarge { dim: 40, .. })
    ));
}

#[test]
fn decoding_exact_within_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let c = code(5, 2, 2);
    let zero = c.syndrome(&StackedError::identity(5, 5).unwrap());
    assert!(c.decode(&zero).unwrap().is_identity());
    for _ in 0..1000 {
        // pure X of rank <= 1
        let e = random_rank_error(&mut rng, 5, 1);
        let x_only = StackedError::from_cell_words(5, e.x_words().to_vec(), vec![0; 5]).unwrap();
        assert_eq!(c.decode(&c.syndrome(&x_only)).unwrap(), x_only);
        assert_eq!(c.decode(&c.syndrome(&e)).unwrap(), e);
    }
    let c = code(9, 4, 4);
    for _ in 0..200 {
        let rank = rng.gen_range(0..=2);
        let e = random_rank_error(&mut rng, 9, rank);
        assert_eq!(c.decode(&c.syndrome(&e)).unwrap(), e);
    }
}

#[test]
fn all_single_qubit_errors_are_corrected() {
    let c = code(5, 2, 2);
    for layer in 0..5 {
        for cell in 0..5 {
            for letter in [Letter::X, Letter::Y, Letter::Z] {
                let e = single_qubit(5, layer, cell, letter);
                assert_eq!(c.decode(&c.syndrome(&e)).unwrap(), e);
            }
        }
    }
}

#[test]
fn conjugated_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let c = code(3, 1, 1);
    let same = conjugate_code(&c, &Circuit::new(3)).unwrap();
    assert_eq!(same.group().x_generators(), c.group().x_generators());
    assert_eq!(same.group().z_generators(), c.group().z_generators());
    let base = c.min_rank_distance_exhaustive().unwrap().distance;
    for _ in 0..5 {
        let circuit = random_circuit(&mut rng, 3, 20);
        let conj = conjugate_code(&c, &circuit).unwrap();
        assert!(conj.group().all_commute());
        assert_eq!(conj.group().generator_matrix_rank(), 6);
        assert_eq!(
            conj.group()
                .min_rank_distance_exhaustive()
                .unwrap()
                .distance,
            base
        );
    }
    assert!(matches!(
        conjugate_code(&c, &Circuit::new(4)),
        Err(QgabError::Pauli(_))
    ));
}

#[test]
fn pull_back_matches_conjugated_syndrome() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let c = code(5, 2, 2);
    for _ in 0..50 {
        let circuit = random_circuit(&mut rng, 5, 30);
        let conj = conjugate_code(&c, &circuit).unwrap();
        let q = StackedError::random(&mut rng, 5, 5).unwrap();
        let mut pulled = q.clone();
        pulled.conjugate_by(&circuit.inverse());
        assert_eq!(conj.syndrome(&q), c.syndrome(&pulled));
    }
}

#[test]
fn end_to_end_single_faults() {
    let c = code(17, 8, 8);
    for seed in 0..20 {
        let out = e2e_trial(&c, 100, 1, seed).unwrap();
        assert!(
            out.success && out.exact && out.pullback_consistent,
            "{out:?}"
        );
        assert!((1..=4).contains(&out.rank));
    }
    let out = e2e_trial(&c, 100, 0, 0).unwrap();
    assert!(out.success);
    assert_eq!(out.syndrome_weight, 0);
}

#[test]
fn end_to_end_failures_are_flagged() {
    let c = code(5, 2, 2);
    let mut failures = 0;
    for seed in 0..200 {
        let out = e2e_trial(&c, 60, 6, seed).unwrap();
        assert!(out.pullback_consistent);
        if !out.success {
            failures += 1;
            assert!(!out.exact);
        }
        if out.exact {
            assert!(out.success);
        }
    }
    assert!(failures > 0);
}

#[test]
fn asymmetric_codes_refuse_end_to_end() {
    let c = code(5, 1, 2);
    let conj = conjugate_code(&c, &Circuit::new(5)).unwrap();
    let q = StackedError::identity(5, 5).unwrap();
    assert_eq!(
        e2e_correct(&c, &conj, &q, 0).unwrap_err(),
        QgabError::Asymmetric { r: 1, s: 2 }
    );
}

#[test]
fn x_operator_layout() {
    let b = basis(3);
    let beta = RankWord::new(vec![b.element(0), FieldElement::ZERO, b.element(2)]);
    let e = x_operator(&b, &beta);
    assert_eq!(e.x_words(), &[0b001, 0, 0b100]);
    assert_eq!(e.row(0), "XII".parse::<PauliOp>().unwrap());
    assert_eq!(e.row(2), "IIX".parse::<PauliOp>().unwrap());
    let h = CliffordGate::single(GateKind::H, 0).unwrap();
    let mut g = e.clone();
    g.conjugate_in_place(&h);
    assert_eq!(g.row(0), "ZII".parse::<PauliOp>().unwrap());
}
