use nctorus::oracle::represent;
use nctorus::TorusElement;
use num_complex::Complex64;
use proptest::prelude::*;

const THETA: f64 = 32.0 / 101.0;

fn element(radius: i32, max_terms: usize) -> impl Strategy<Value = TorusElement> {
    prop::collection::vec(
        ((-radius..=radius), (-radius..=radius), -1.0..1.0f64, -1.0..1.0f64),
        0..max_terms,
    )
    .prop_map(|terms| {
        TorusElement::from_terms(
            THETA,
            terms.into_iter().map(|(m, n, re, im)| ((m, n), Complex64::new(re, im))),
        )
    })
}

fn close(a: &TorusElement, b: &TorusElement, tol: f64) -> bool {
    (a - b).max_abs_coeff() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in element(6, 12), b in element(6, 12), c in element(6, 12)) {
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-13));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-13));
        prop_assert!(close(&(&(&a + &b) * &c), &(&(&a * &c) + &(&b * &c)), 1e-13));
        let one = TorusElement::one(THETA);
        prop_assert_eq!(&(&a * &one), &a);
        prop_assert_eq!(&(&one * &a), &a);
    }

    #[test]
    fn involution(a in element(8, 12), b in element(8, 12), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let z = Complex64::new(re, im);
        prop_assert!(close(&a.star().star(), &a, 1e-15));
        prop_assert!(close(&(&a * &b).star(), &(&b.star() * &a.star()), 1e-13));
        prop_assert!(close(&a.scale(z).star(), &a.star().scale(z.conj()), 1e-14));
        prop_assert!(close(&(&a + &b).star(), &(&a.star() + &b.star()), 1e-15));
    }

    #[test]
    fn derivations(a in element(8, 12), b in element(8, 12)) {
        for j in 1..=2 {
            let lhs = (&a * &b).derive(j).unwrap();
            let rhs = &(&a.derive(j).unwrap() * &b) + &(&a * &b.derive(j).unwrap());
            prop_assert!((&lhs - &rhs).max_abs_coeff() <= 1e-13 * lhs.max_abs_coeff().max(1.0));
            prop_assert!(close(&a.star().derive(j).unwrap(), &a.derive(j).unwrap().star(), 1e-12));
            prop_assert!(a.derive(j).unwrap().trace().norm() == 0.0);
        }
        let d12 = a.derive(1).unwrap().derive(2).unwrap();
        let d21 = a.derive(2).unwrap().derive(1).unwrap();
        prop_assert!(close(&d12, &d21, 1e-12));
    }

    #[test]
    fn trace_properties(a in element(8, 12), b in element(8, 12)) {
        let ab = (&a * &b).trace();
        prop_assert!((ab - (&b * &a).trace()).norm() <= 1e-13);
        prop_assert!((a.trace_product(&b).unwrap() - ab).norm() <= 1e-13);
        prop_assert!((a.star().trace() - a.trace().conj()).norm() == 0.0);
        prop_assert!((&a.star() * &a).trace().re >= -1e-15);
        prop_assert!((&a.star() * &a).trace().im.abs() <= 1e-14);
    }

    #[test]
    fn l1_submultiplicative(a in element(8, 12), b in element(8, 12)) {
        prop_assert!((&a * &b).norm_l1() <= a.norm_l1() * b.norm_l1() * (1.0 + 1e-14) + 1e-300);
        prop_assert!((a.star().norm_l1() - a.norm_l1()).abs() <= 1e-13);
    }

    #[test]
    fn oracle_is_a_star_homomorphism(a in element(20, 16), b in element(20, 16)) {
        let (ra, rb) = (represent(&a, 101).unwrap(), represent(&b, 101).unwrap());
        prop_assert!(ra.mul(&rb).max_entry_diff(&represent(&(&a * &b), 101).unwrap()) <= 1e-12);
        prop_assert!(ra.adjoint().max_entry_diff(&represent(&a.star(), 101).unwrap()) <= 1e-12);
        prop_assert!((ra.normalized_trace() - a.trace()).norm() <= 1e-12);
    }

    #[test]
    fn json_round_trip(a in element(10, 10)) {
        prop_assert_eq!(TorusElement::from_json(&a.to_json()).unwrap(), a);
    }
}
