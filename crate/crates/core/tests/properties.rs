use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use projpair::canonical::{ideal_pow, majorized_by, pair_index, IdealClass};
use projpair::io::{operator_from_json, operator_to_json, projection_from_json, projection_to_json, OperatorInput, ProjectionInput};
use projpair::kadison::schur_horn;
use projpair::operators::{Cycle, ProjectionPair, TailedOperator, TailedProjection};
use projpair::sample;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_json_is_bit_exact(seed in any::<u64>()) {
        let s = sample::random_tailed_pair(&mut sample::rng(seed), 10);
        let text = projection_to_json(&s.p);
        let back = projection_from_json(&text).unwrap();
        prop_assert_eq!(back, ProjectionInput::Tailed(s.p));
    }

    #[test]
    fn shift_json_keeps_the_shift(k in -6i64..=6) {
        let op = TailedOperator::shift(k);
        let text = operator_to_json(&op);
        match operator_from_json(&text).unwrap() {
            OperatorInput::Tailed(back) => {
                prop_assert_eq!(back.shift_offset(), k);
                prop_assert_eq!(operator_to_json(&back), text);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn invariants_survive_unitary_conjugation(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let s = sample::random_tailed_pair(&mut rng, 12);
        let n = s.p.window();
        let u = sample::random_unitary(&mut rng, n);
        let conj = |p: &TailedProjection| {
            let m = &u * p.block() * u.adjoint();
            let m = (&m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
            TailedProjection::new(m, p.tail().clone()).unwrap()
        };
        let a = ProjectionPair::tailed(&s.p, &s.q).halmos().unwrap();
        let b = ProjectionPair::tailed(&conj(&s.p), &conj(&s.q)).halmos().unwrap();
        prop_assert_eq!(a.counts, b.counts);
        for (x, y) in a.svals.iter().zip(&b.svals) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn index_is_antisymmetric(seed in any::<u64>()) {
        let s = sample::random_tailed_pair(&mut sample::rng(seed), 16);
        let pq = ProjectionPair::tailed(&s.p, &s.q);
        let qp = pq.swapped();
        prop_assert_eq!(pq.essential_codimension().unwrap(), -qp.essential_codimension().unwrap());
        prop_assert_eq!(pair_index(&pq.halmos().unwrap().cp).unwrap(), -pair_index(&qp.halmos().unwrap().cp).unwrap());
    }

    #[test]
    fn complements_reverse_the_index(seed in any::<u64>()) {
        let s = sample::random_tailed_pair(&mut sample::rng(seed), 16);
        let direct = ProjectionPair::tailed(&s.p, &s.q).essential_codimension().unwrap();
        let perp = ProjectionPair::tailed(&s.p.complement(), &s.q.complement()).essential_codimension().unwrap();
        prop_assert_eq!(direct, -perp);
    }

    #[test]
    fn schur_horn_realizes_majorized_diagonals(
        entries in prop::collection::vec(0.0f64..1.0, 1..10),
    ) {
        // Rescale so the sum is an integer k, then realize against k ones.
        let sum: f64 = entries.iter().sum();
        let k = sum.round().max(1.0).min(entries.len() as f64);
        let diag: Vec<f64> = entries.iter().map(|x| x * k / sum.max(1e-12)).collect();
        prop_assume!(diag.iter().all(|&x| x <= 1.0));
        let spectrum: Vec<f64> = (0..diag.len()).map(|i| if (i as f64) < k { 1.0 } else { 0.0 }).collect();
        prop_assert!(majorized_by(&diag, &spectrum).unwrap());
        let m = schur_horn(&diag, &spectrum).unwrap();
        for (i, d) in diag.iter().enumerate() {
            assert_abs_diff_eq!(m[(i, i)], *d, epsilon = 1e-9);
        }
        let sq = &m * &m - &m;
        prop_assert!(sq.amax() < 1e-9);
    }

    #[test]
    fn ideal_powers_compose(p in 0.1f64..10.0, a in 0.1f64..4.0, b in 0.1f64..4.0) {
        let j = IdealClass::Schatten(p);
        match (ideal_pow(ideal_pow(j, a).unwrap(), b).unwrap(), ideal_pow(j, a * b).unwrap()) {
            (IdealClass::Schatten(x), IdealClass::Schatten(y)) => assert_abs_diff_eq!(x, y, epsilon = 1e-12 * y),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn cycle_complement_and_rotation(bits in prop::collection::vec(any::<bool>(), 1..9), r in 0usize..20) {
        let c = Cycle::new(bits.clone()).unwrap();
        prop_assert_eq!(c.complement().complement(), c.clone());
        let rot = c.rotate(r);
        for i in 0..3 * bits.len() {
            prop_assert_eq!(rot.contains(i), bits[(i + r) % bits.len()]);
        }
    }
}
