use proptest::prelude::*;
use psivar::arith::{q, Q};
use psivar::conjclass::{split_correspondence, Side};
use psivar::etale::*;
use psivar::localfield::{hilbert_symbol_q, LocalField, Sign};
use psivar::verify::*;

fn datum(text: &str) -> ClassDatum {
    serde_json::from_str(text).unwrap()
}

#[test]
fn a_elements() {
    let d = datum(
        r#"{"field":"Qp:5","factors":[
        {"base":"F","top":{"split":true},"x":["3","1/3"]},
        {"base":"F","top":{"D":"2"},"x":["3","2"]}]}"#,
    );
    let a = make_a_element(&d).unwrap();
    let (s, t) = a[0].components();
    assert_eq!((s, t), (BaseElement::Rational(q(1)), BaseElement::Rational(q(-1))));
    assert_eq!(a[0].norm_to_base(), BaseElement::Rational(q(-1)));
    assert_eq!(a[1].norm_to_base(), BaseElement::Rational(q(-2)));
    for y in &a {
        assert_eq!(y.tau(), y.neg());
    }
    assert_eq!(norm_to_f(&d, &a).unwrap(), q(2));
}

#[test]
fn var1_all_split_and_single_field_factor() {
    let split = datum(
        r#"{"field":"Qp:3","factors":[
        {"base":"F","top":{"split":true},"x":["2","1/2"]},
        {"base":"F","top":{"split":true},"x":["5","1/5"]}]}"#,
    );
    let field = datum(r#"{"field":"Qp:3","factors":[{"base":"F","top":{"D":"2"},"x":["17","12"]}]}"#);
    for c in LocalField::PAdic(3).square_classes() {
        assert!(check_delta_var_1(&split, &c.rep_q()).unwrap());
        assert_eq!(sgn_double_prime(&split, &c.rep_q()).unwrap(), Sign::Plus);
        assert!(check_delta_var_1(&field, &c.rep_q()).unwrap());
    }
}

#[test]
fn var1_on_tier_two_towers() {
    let mut rng = case_rng(21);
    for _ in 0..40 {
        let d = gen_stable_datum(&mut rng, LocalField::PAdic(3), 2, TierPolicy::Two).unwrap();
        assert_eq!(d.max_tier(), 2);
        for c in LocalField::PAdic(3).square_classes() {
            assert!(check_delta_var_1(&d, &c.rep_q()).unwrap(), "{}", d.digest());
        }
    }
}

#[test]
fn trivial_c_makes_everything_trivial() {
    let mut rng = case_rng(2);
    for f in [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(5)] {
        let (d, part) = gen_targeted(&mut rng, f, 1, 2, TierPolicy::Both).unwrap();
        let v = variation_signs(&d, &part, &q(1)).unwrap();
        assert_eq!(
            [v.s_shriek_oracle, v.calibration, v.sgn_double_prime, v.target],
            [Sign::Plus; 4]
        );
    }
}

#[test]
fn no_double_prime_side_reduces_to_the_formula() {
    let mut rng = case_rng(4);
    for f in [LocalField::Real, LocalField::PAdic(3), LocalField::PAdic(7)] {
        let (d, part) = gen_targeted(&mut rng, f, 3, 0, TierPolicy::Both).unwrap();
        assert!(part.iter().all(|s| *s == Side::Prime));
        for c in f.square_classes() {
            let v = variation_signs(&d, &part, &c.rep_q()).unwrap();
            assert!(v.var0_holds());
            assert_eq!(v.target, Sign::Plus);
            assert_eq!(v.s_shriek_oracle, v.calibration);
        }
    }
}

#[test]
fn witness_rescaling_leaves_symbols_unchanged() {
    let mut rng = case_rng(6);
    for f in [LocalField::PAdic(2), LocalField::PAdic(3), LocalField::Real] {
        let d = gen_stable_datum(&mut rng, f, 3, TierPolicy::Both).unwrap();
        let w = witnesses(&d).unwrap();
        let lambda: Vec<FactorElement> = w
            .iter()
            .map(|w| {
                let r = w.embed(&Q::new(7.into(), 3.into()));
                w.mul(&r)
            })
            .collect();
        for c in f.square_classes() {
            let a = hilbert_symbol_q(f, &c.rep_q(), &norm_to_f(&d, &w).unwrap()).unwrap();
            let b = hilbert_symbol_q(f, &c.rep_q(), &norm_to_f(&d, &lambda).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }
}

/// Every factor of the identity is nontrivial somewhere, so none can be dropped.
#[test]
fn every_factor_is_exercised() {
    let mut seen = [false; 4];
    let mut breaks = [false; 3];
    let mut rng = case_rng(1);
    for i in 0..300 {
        let f = [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5)][i % 4];
        let n = 1 + i % 4;
        let n1 = i % (n + 1);
        let (d, part) = gen_targeted(&mut rng, f, n1, n - n1, TierPolicy::Both).unwrap();
        for c in f.square_classes() {
            let v = variation_signs(&d, &part, &c.rep_q()).unwrap();
            assert!(v.master_holds());
            for (k, s) in [v.s_shriek_oracle, v.calibration, v.sgn_double_prime, v.target].iter().enumerate() {
                seen[k] |= !s.is_plus();
            }
            breaks[0] |= v.calibration * v.sgn_double_prime != v.target;
            breaks[1] |= v.s_shriek_oracle * v.sgn_double_prime != v.target;
            breaks[2] |= v.s_shriek_oracle * v.calibration != v.target;
        }
    }
    assert_eq!(seen, [true; 4], "some sign is constantly +1");
    assert_eq!(breaks, [true; 3], "some factor is never needed");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn master_identity_and_chain(seed in any::<u64>(), fi in 0usize..6, n in 1usize..=4, split in 0usize..=4, t in 1i64..=9) {
        let f = [LocalField::Real, LocalField::Complex, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5), LocalField::PAdic(7)][fi];
        let n1 = split.min(n);
        let mut rng = case_rng(seed);
        let (d, part) = gen_targeted(&mut rng, f, n1, n - n1, TierPolicy::Both).unwrap();
        let corr = split_correspondence(&d, &part, None).unwrap();
        for c in f.square_classes() {
            let v = variation_signs(&d, &part, &c.rep_q()).unwrap();
            prop_assert!(v.master_holds());
            prop_assert!(v.var0_holds());
            prop_assert!(v.var1_holds());
            prop_assert_eq!(check_delta_var_1(&corr.gamma_double_prime, &c.rep_q()).unwrap(), true);
            // representative independence
            let w = variation_signs(&d, &part, &(c.rep_q() * q(t * t))).unwrap();
            prop_assert_eq!(w, v);
        }
    }
}
