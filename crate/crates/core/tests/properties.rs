use proptest::prelude::*;

use algpos::ap::{closure_transform, is_ap, Closure, Tolerances};
use algpos::classify3::{classify, ClassifyConfig};
use algpos::mat::{poly_eval_matrix, RealMatrix};
use algpos::signpat::{canonical_form, pattern_of, sample, EquivTransform, MagnitudeProfile, SignPattern};

fn pattern(n: usize) -> impl Strategy<Value = SignPattern> {
    (0..3u64.pow((n * n) as u32)).prop_map(move |c| SignPattern::from_code(n, c))
}

fn entry() -> impl Strategy<Value = f64> {
    (any::<bool>(), -2.0f64..2.0, 0..7u8).prop_map(|(neg, e, zero)| {
        if zero == 0 {
            0.0
        } else if neg {
            -(10f64.powf(e))
        } else {
            10f64.powf(e)
        }
    })
}

fn matrix() -> impl Strategy<Value = RealMatrix> {
    (2..=4usize).prop_flat_map(|n| prop::collection::vec(entry(), n * n).prop_map(move |d| RealMatrix::new(n, d).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_class_invariant(s in pattern(3), k in 0..24usize) {
        let cfg = ClassifyConfig { samples: 30, ..Default::default() };
        let t = &EquivTransform::all(3)[k];
        let a = classify(&s, &cfg).unwrap();
        let b = classify(&t.apply(&s), &cfg).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.evidence, b.evidence);
    }

    #[test]
    fn canonical_form_is_a_class_function(s in pattern(3), k in 0..24usize) {
        let t = &EquivTransform::all(3)[k];
        let (c, to_c) = canonical_form(&s);
        prop_assert_eq!(&to_c.apply(&s), &c);
        prop_assert_eq!(canonical_form(&t.apply(&s)).0, c.clone());
        prop_assert_eq!(canonical_form(&c).0, c);
    }

    #[test]
    fn samples_stay_in_class(s in pattern(3), seed in any::<u64>()) {
        let x = sample(&s, seed, MagnitudeProfile::default());
        prop_assert_eq!(pattern_of(&x, 0.0), s);
    }

    #[test]
    fn text_round_trips(s in pattern(3), x in matrix()) {
        prop_assert_eq!(s.to_string().parse::<SignPattern>().unwrap(), s);
        prop_assert_eq!(x.to_string().parse::<RealMatrix>().unwrap(), x);
    }

    #[test]
    fn certificates_are_positive(x in matrix()) {
        let v = is_ap(&x, &Tolerances::default()).unwrap();
        if let Some(c) = &v.poly {
            let p = poly_eval_matrix(&c.polynomial(), &x);
            prop_assert!(p.min_entry() > 0.0);
            prop_assert!((p.min_entry() - c.margin).abs() <= 1e-9 * c.margin.abs().max(1.0));
        }
        if let Some(e) = &v.eigen {
            prop_assert!(e.min_entry > 0.0);
        }
    }

    #[test]
    fn verdict_survives_closure(x in matrix(), which in 0..4usize) {
        let tol = Tolerances::default();
        let v = is_ap(&x, &tol).unwrap();
        prop_assume!(!v.margins.near_boundary(tol.borderline));
        let n = x.n();
        let t = match which {
            0 => Closure::Transpose,
            1 => Closure::Negate,
            2 => Closure::PermSim((0..n).rev().collect()),
            _ => Closure::Affine { alpha: 3.0, beta: -0.5 },
        };
        let y = closure_transform(&x, &t).unwrap();
        let w = is_ap(&y, &tol).unwrap();
        prop_assume!(!w.margins.near_boundary(tol.borderline));
        prop_assert_eq!(v.is_ap, w.is_ap);
    }
}
