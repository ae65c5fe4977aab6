mod common;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bratteli::diagram::{limit_eq, BratteliSequence, LimitElement};
use bratteli::equiv::{
    canonicalize_q, equivalent_q, limit_cardinality, surjectivize, verify_equivalence, verify_witness, EquivVerdict,
};
use bratteli::format::{parse, serialize};
use bratteli::intertwine::{rescale_holds, rescale_lemma, unit_change, verify_certificate, Strategy as Growth};
use bratteli::par::Execution;
use bratteli::sample::{self, Shape};
use bratteli::simplicial::{forall_n_leq, kron_vec};
use bratteli::states::{depth_image_vertices, verify_state_invariance, Rational};
use bratteli::supernat::SupernaturalNumber;
use bratteli::tensor::tensor_seq;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn supernatural() -> impl Strategy<Value = SupernaturalNumber> {
    any::<u64>().prop_map(|s| sample::supernatural(&mut rng(s)))
}

fn sequence() -> impl Strategy<Value = BratteliSequence> {
    any::<u64>().prop_map(|s| sample::sequence(&mut rng(s), Shape::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn supernatural_multiply_laws(a in supernatural(), b in supernatural(), c in supernatural()) {
        prop_assert_eq!(a.multiply(&b), b.multiply(&a));
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        prop_assert!(a.divides(&a.multiply(&b)));
        prop_assert_eq!(a.multiply(&SupernaturalNumber::one()), a.clone());
        prop_assert_eq!(a.to_string().parse::<SupernaturalNumber>().unwrap(), a);
    }

    #[test]
    fn associated_sequence_is_a_divisor_chain(n in supernatural(), len in 1usize..8) {
        let ns = n.associated_sequence(len);
        prop_assert_eq!(ns.len(), len);
        for w in ns.windows(2) {
            prop_assert_eq!(&w[1] % &w[0], BigUint::from(0u32));
        }
        for x in &ns {
            let k: u64 = x.try_into().unwrap();
            prop_assert!(SupernaturalNumber::from_natural(k).unwrap().divides(&n));
        }
    }

    #[test]
    fn natural_products_agree(a in 1u64..500, b in 1u64..500) {
        let sa = SupernaturalNumber::from_natural(a).unwrap();
        let sb = SupernaturalNumber::from_natural(b).unwrap();
        prop_assert_eq!(sa.multiply(&sb), SupernaturalNumber::from_natural(a * b).unwrap());
    }

    #[test]
    fn compose_matches_apply(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (r.gen_range(1..5), r.gen_range(1..5), r.gen_range(1..5));
        let f = sample::map(&mut r, a, b, 5);
        let g = sample::map(&mut r, b, c, 5);
        let x = sample::vector(&mut r, a, 10);
        prop_assert_eq!(g.compose(&f).unwrap().apply(&x).unwrap(), g.apply(&f.apply(&x).unwrap()).unwrap());
        prop_assert!(f.push_unit(&sample::order_unit(&mut r, a, 5)).unwrap().is_order_unit());
        let back = bratteli::simplicial::NonMixingMap::from_matrix(&f.to_matrix()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn forall_n_leq_forces_nonpositive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..6);
        let x = sample::vector(&mut r, n, 3);
        let y = sample::vector(&mut r, n, 3);
        if forall_n_leq(&x, &y).unwrap() {
            prop_assert!(x.entries().iter().all(|e| e <= &BigInt::from(0)));
            for k in 1..20 {
                prop_assert!(x.scale(&BigInt::from(k)).le(&y).unwrap());
            }
        }
    }

    #[test]
    fn units_follow_maps(seq in sequence()) {
        for level in 1..8 {
            let next = seq.map_at(level).unwrap().apply(&seq.unit_at(level).unwrap()).unwrap();
            prop_assert_eq!(next, seq.unit_at(level + 1).unwrap());
        }
    }

    #[test]
    fn telescoping_preserves_limit_elements(seq in sequence(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let keep = [1, 1 + r.gen_range(1..3), 4 + r.gen_range(0..3)];
        let tel = seq.telescope(&keep).unwrap();
        let x = sample::vector(&mut r, seq.rank_at(keep[1]).unwrap(), 5);
        let pushed = seq.push(&x, keep[1], keep[2]).unwrap();
        prop_assert_eq!(tel.push(&x, 2, 3).unwrap(), pushed);
        prop_assert_eq!(tel.unit_at(3).unwrap(), seq.unit_at(keep[2]).unwrap());
    }

    #[test]
    fn injectivize_is_injective_and_idempotent(seq in sequence(), seed in any::<u64>()) {
        let inj = seq.injectivize().unwrap();
        prop_assert!(inj.seq.is_injective());
        prop_assert_eq!(inj.seq.injectivize().unwrap().seq, inj.seq.clone());
        // equality in the limit is preserved by the projection
        let mut r = rng(seed);
        let level = r.gen_range(1..=seq.len());
        let x = LimitElement::new(level, sample::vector(&mut r, seq.rank_at(level).unwrap(), 3));
        let y = LimitElement::new(level + 2, seq.push(&x.vec, level, level + 2).unwrap());
        prop_assert!(limit_eq(&seq, &x, &y).unwrap());
        prop_assert!(limit_eq(&inj.seq, &inj.project(&seq, &x).unwrap(), &inj.project(&seq, &y).unwrap()).unwrap());
    }

    #[test]
    fn tensor_ranks_and_units_multiply(a in sequence(), b in sequence()) {
        let t = tensor_seq(&a, &b).unwrap();
        for level in 1..=4 {
            prop_assert_eq!(t.rank_at(level).unwrap(), a.rank_at(level).unwrap() * b.rank_at(level).unwrap());
            let got = t.unit_at(level).unwrap();
            let want = kron_vec(&a.unit_at(level).unwrap(), &b.unit_at(level).unwrap());
            if level <= t.len() {
                prop_assert_eq!(got, want);
            } else {
                // unrolled levels list the same nodes in a different order
                let (mut g, mut w) = (got.entries().to_vec(), want.entries().to_vec());
                g.sort();
                w.sort();
                prop_assert_eq!(g, w);
            }
        }
    }

    #[test]
    fn lemma_holds_for_both_strategies(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (s, t) = (r.gen_range(1..7), r.gen_range(1..7));
        let alpha = sample::map(&mut r, s, t, 9);
        let gamma = sample::diagonal(&mut r, s, 9);
        let (n_min, eta_min) = rescale_lemma(&alpha, &gamma, Growth::Minimal).unwrap();
        let (n_pap, eta_pap) = rescale_lemma(&alpha, &gamma, Growth::Paper).unwrap();
        prop_assert!(rescale_holds(&alpha, &gamma, &n_min, &eta_min));
        prop_assert!(rescale_holds(&alpha, &gamma, &n_pap, &eta_pap));
        prop_assert_eq!(n_pap % n_min, BigUint::from(0u32));
    }

    #[test]
    fn ladders_verify_and_tampering_is_caught(seq in sequence(), seed in any::<u64>()) {
        let w1 = sample::order_unit(&mut rng(seed), seq.ranks()[0], 6);
        let cert = unit_change(&seq, &w1, 6, Growth::Minimal).unwrap();
        prop_assert!(verify_certificate(&cert, Execution::Parallel).is_ok());
        prop_assert_eq!(
            verify_certificate(&cert, Execution::Parallel),
            verify_certificate(&cert, Execution::Sequential)
        );
        let mut bad = cert.clone();
        bad.scalars[2] += 1u32;
        prop_assert!(verify_certificate(&bad, Execution::Parallel).is_err());
    }

    #[test]
    fn states_are_normalized_and_invariant(seq in sequence(), n in supernatural(), depth in 2usize..6) {
        prop_assert!(verify_state_invariance(&seq, &n, depth).unwrap());
        let unit = seq.unit_at(1).unwrap();
        for p in depth_image_vertices(&seq, 1, depth).unwrap() {
            prop_assert_eq!(p.pair(&unit).unwrap(), Rational::from_integer(BigInt::from(1)));
            prop_assert!(p.0.iter().all(|x| x >= &Rational::from_integer(BigInt::from(0))));
        }
    }

    #[test]
    fn format_round_trips(seq in sequence()) {
        let text = serialize(&seq);
        prop_assert_eq!(parse(&text).unwrap(), seq.clone());
        prop_assert_eq!(serialize(&parse(&text).unwrap()), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn equivalence_is_reflexive_and_ignores_units(seq in sequence(), seed in any::<u64>()) {
        let other = seq.with_base_unit(sample::order_unit(&mut rng(seed), seq.ranks()[0], 9)).unwrap();
        match equivalent_q(&seq, &other, 1, Execution::Parallel).unwrap() {
            EquivVerdict::Equivalent(cert) => prop_assert_eq!(verify_equivalence(&cert), Ok(())),
            v => prop_assert!(false, "verdict {}", v.name()),
        }
    }

    #[test]
    fn verdicts_are_symmetric_and_checkable(a in sequence(), b in sequence()) {
        let ab = equivalent_q(&a, &b, 2, Execution::Parallel).unwrap();
        let ba = equivalent_q(&b, &a, 2, Execution::Sequential).unwrap();
        prop_assert_eq!(ab.name(), ba.name());
        match ab {
            EquivVerdict::Equivalent(cert) => prop_assert_eq!(verify_equivalence(&cert), Ok(())),
            EquivVerdict::NotEquivalent(w) => prop_assert!(verify_witness(&a, &b, &w)),
            EquivVerdict::Unknown { .. } => {}
        }
    }

    #[test]
    fn cardinality_ignores_units_and_multiplicities(seq in sequence(), seed in any::<u64>()) {
        let card = |s: &BratteliSequence| limit_cardinality(&surjectivize(&canonicalize_q(s).unwrap().index));
        let other = seq.with_base_unit(sample::order_unit(&mut rng(seed), seq.ranks()[0], 9)).unwrap();
        prop_assert_eq!(card(&seq), card(&other));
        let surj = surjectivize(&canonicalize_q(&seq).unwrap().index);
        prop_assert!(surj.is_surjective());
        prop_assert_eq!(surjectivize(&surj), surj);
    }
}

#[test]
fn corpus_documents_round_trip() {
    for (name, text, valid) in common::corpus() {
        assert_eq!(parse(&text).is_ok(), valid, "{name}");
    }
}
