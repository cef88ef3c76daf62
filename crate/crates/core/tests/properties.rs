use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use rankmetric::f2field::{Field, FieldElement, NormalBasis};
use rankmetric::gabidulin::{GabidulinCode, RankWord};
use rankmetric::linpoly::LinearizedPoly;
use rankmetric::netcode::{parse_network, random_layered, write_network, LayeredConfig};
use rankmetric::pauli::{random_circuit, StackedError};
use rankmetric::seed::rng_for;

fn field(n: u32) -> Field {
    Field::new(n).unwrap()
}

fn element(f: &Field, bits: u64) -> FieldElement {
    f.element(bits & (f.order() - 1)).unwrap()
}

fn random_word(rng: &mut impl Rng, f: &Field, len: usize) -> RankWord {
    RankWord::new((0..len).map(|_| element(f, rng.gen())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_is_a_commutative_ring_with_inverses(n in 2u32..=16, a: u64, b: u64, c: u64) {
        let f = field(n);
        let (a, b, c) = (element(&f, a), element(&f, b), element(&f, c));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
        if a != f.element(0).unwrap() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.element(1).unwrap());
        }
    }

    #[test]
    fn frobenius_and_trace_are_additive(n in 2u32..=16, a: u64, b: u64) {
        let f = field(n);
        let (a, b) = (element(&f, a), element(&f, b));
        prop_assert_eq!(f.square(a + b), f.square(a) + f.square(b));
        prop_assert_eq!(f.frobenius(a, n), a);
        prop_assert_eq!(f.trace(a + b), f.trace(a) ^ f.trace(b));
        prop_assert_eq!(f.trace(a), f.trace_by_definition(a));
    }

    #[test]
    fn composition_evaluates_as_function_composition(seed: u64, n in 2u32..=9, x: u64) {
        let f = field(n);
        let mut rng = rng_for(seed, "prop-linpoly", 0);
        let p = LinearizedPoly::new((0..rng.gen_range(0..n as usize)).map(|_| element(&f, rng.gen())).collect());
        let q = LinearizedPoly::new((0..rng.gen_range(0..n as usize)).map(|_| element(&f, rng.gen())).collect());
        let (x, y) = (element(&f, x), element(&f, rng.gen()));
        prop_assert_eq!(p.compose(&f, &q).evaluate(&f, x), p.evaluate(&f, q.evaluate(&f, x)));
        prop_assert_eq!(p.evaluate(&f, x + y), p.evaluate(&f, x) + p.evaluate(&f, y));
    }

    #[test]
    fn rank_is_subadditive(seed: u64, n in prop::sample::select(vec![3u32, 5, 7, 9])) {
        let b = NormalBasis::find_self_dual(Arc::new(field(n))).unwrap();
        let mut rng = rng_for(seed, "prop-rank", 0);
        let u = random_word(&mut rng, b.field(), n as usize);
        let v = random_word(&mut rng, b.field(), n as usize);
        prop_assert!(u.add(&v).rank(&b) <= u.rank(&b) + v.rank(&b));
        prop_assert_eq!(RankWord::from_matrix(&b, &u.to_matrix(&b)), u);
    }

    #[test]
    fn nonzero_codewords_meet_the_distance(seed: u64, k in 1usize..=4) {
        let b = Arc::new(NormalBasis::find_self_dual(Arc::new(field(7))).unwrap());
        let code = GabidulinCode::new(b.clone(), 0, k).unwrap();
        let mut rng = rng_for(seed, "prop-gab", 0);
        let msg: Vec<_> = (0..k).map(|_| element(b.field(), rng.gen())).collect();
        let c = code.encode(&msg).unwrap();
        prop_assert!(code.contains(&c));
        if !c.is_zero() {
            prop_assert!(c.rank(&b) > 7 - k);
        }
    }

    #[test]
    fn clifford_circuits_preserve_stacked_rank(seed: u64, cells in 1usize..=12, layers in 1usize..=12) {
        let mut rng = rng_for(seed, "prop-stacked", 0);
        let e = StackedError::random(&mut rng, layers, cells).unwrap();
        let size = rng.gen_range(0..=60);
        let circuit = random_circuit(&mut rng, cells, size);
        let mut conj = e.clone();
        conj.conjugate_by(&circuit);
        prop_assert_eq!(conj.rank(), e.rank());
        conj.conjugate_by(&circuit.inverse());
        prop_assert_eq!(conj, e);
    }

    #[test]
    fn network_text_round_trips(seed: u64, n in 1usize..=5, depth in 0usize..=3) {
        let mut rng = rng_for(seed, "prop-network", 0);
        let cfg = LayeredConfig { n, depth, width: n + 1, density: 0.5 };
        let net = random_layered(&mut rng, &cfg);
        let text = write_network(&net);
        let back = parse_network(&text).unwrap();
        prop_assert_eq!(write_network(&back), text);
        prop_assert_eq!(back.transfer_matrix(), net.transfer_matrix());
    }
}
