use proptest::prelude::*;
use psivar::arith::{q, Q};
use psivar::error::Error;
use psivar::etale::*;
use psivar::linalg::Matrix;
use psivar::localfield::{hilbert_symbol, hilbert_symbol_q, square_class, LocalField, Sign};
use psivar::spinor::*;
use psivar::verify::{case_rng, gen_stable_datum, TierPolicy};

fn datum(text: &str) -> ClassDatum {
    serde_json::from_str(text).unwrap()
}

const FIELDS: [LocalField; 5] =
    [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5), LocalField::PAdic(7)];

#[test]
fn split_factor_gives_det_class() {
    for t in [2, 3, 5, 6, 7, 10, 15] {
        let text = format!(r#"{{"field":"Qp:5","factors":[{{"base":"F","top":{{"split":true}},"x":["{t}","1/{t}"]}}]}}"#);
        let d = datum(&text);
        let f = d.field();
        assert_eq!(spinor_norm_formula(&d).unwrap(), square_class(f, &q(t)).unwrap());
        assert_eq!(spinor_norm_oracle(&d).unwrap(), square_class(f, &q(t)).unwrap());
        for c in f.square_classes() {
            assert_eq!(s_c_character(&c, &d).unwrap(), hilbert_symbol_q(f, &c.rep_q(), &q(t)).unwrap());
        }
    }
}

#[test]
fn field_factor_and_products() {
    let one = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"D":"2"},"x":["3","2"]}]}"#);
    // ω = 1 + x = 4 + 2√2, N(ω) = 8 ≡ 2
    assert_eq!(spinor_norm_formula(&one).unwrap(), square_class(one.field(), &q(8)).unwrap());
    assert_eq!(spinor_norm_oracle(&one).unwrap(), spinor_norm_formula(&one).unwrap());
    let two = datum(
        r#"{"field":"Qp:5","factors":[
        {"base":"F","top":{"D":"2"},"x":["3","2"]},
        {"base":"F","top":{"split":true},"x":["3","1/3"]}]}"#,
    );
    let split = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"split":true},"x":["3","1/3"]}]}"#);
    let prod = spinor_norm_formula(&one).unwrap() * spinor_norm_formula(&split).unwrap();
    assert_eq!(spinor_norm_formula(&two).unwrap(), prod);
    assert_eq!(spinor_norm_oracle(&two).unwrap(), prod);
}

#[test]
fn gram_blocks() {
    let one = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"D":"2"},"x":["3","2"]}]}"#);
    let so = enumerate_c_classes(&one, DatumKind::So).unwrap();
    let trivial_c = so.iter().find(|d| d.factors()[0].c.as_ref().unwrap().is_one()).unwrap();
    let r = realize_quadratic_space(trivial_c).unwrap();
    let expected = Matrix::direct_sum(&[
        Matrix::from_columns(&[vec![q(2), q(0)], vec![q(0), q(-4)]]),
        Matrix::identity(1),
    ]);
    assert_eq!(r.gram, expected);

    let split = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"split":true},"x":["3","1/3"]}]}"#);
    let d = &enumerate_c_classes(&split, DatumKind::So).unwrap()[0];
    let r = realize_quadratic_space(d).unwrap();
    assert_eq!(r.gram[(0, 0)], q(0));
    assert_eq!(r.gram[(1, 1)], q(0));
    assert_ne!(r.gram[(0, 1)], q(0));
    assert!(realize_quadratic_space(&split).is_err());
}

#[test]
fn reflections() {
    let id = QuadraticSpaceRealization { gram: Matrix::identity(3), action: Matrix::identity(3) };
    assert!(spinor_norm_reflections(LocalField::PAdic(3), &id).is_trivial());
    // a product of two reflections in v, w has spinor norm q(v)q(w)
    let g = Matrix::from_columns(&[vec![q(1), q(0), q(0)], vec![q(0), q(3), q(0)], vec![q(0), q(0), q(5)]]);
    let refl = |v: &[Q]| {
        let qv = psivar::linalg::bilinear(&g, v, v);
        let cols: Vec<Vec<Q>> = (0..3)
            .map(|j| {
                let mut e = vec![q(0); 3];
                e[j] = q(1);
                let t = q(2) * psivar::linalg::bilinear(&g, &e, v) / &qv;
                e.iter().zip(v).map(|(a, b)| a - &t * b).collect()
            })
            .collect();
        Matrix::from_columns(&cols)
    };
    let (v, w) = (vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]);
    let a = refl(&v).mul(&refl(&w));
    let r = QuadraticSpaceRealization { gram: g, action: a };
    r.check().unwrap();
    for f in FIELDS {
        assert_eq!(spinor_norm_reflections(f, &r), square_class(f, &q(4 * 8)).unwrap());
    }
}

#[test]
fn symplectic_data_are_rejected_by_the_oracle() {
    let one = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"D":"2"},"x":["3","2"]}]}"#);
    let sp = &enumerate_c_classes(&one, DatumKind::Sp).unwrap()[0];
    assert_eq!(spinor_norm_oracle(sp), Err(Error::ConventionMismatch));
    assert!(spinor_norm_formula(sp).is_ok());
}

#[test]
fn s_shriek_with_trivial_double_prime() {
    let g1 = datum(r#"{"field":"Qp:5","factors":[{"base":"F","top":{"split":true},"x":["3","1/3"]}]}"#);
    let empty = ClassDatum::new(g1.field(), DatumKind::Stable, vec![]).unwrap();
    for c in g1.field().square_classes() {
        assert_eq!(s_shriek_c(&c, &g1, &empty).unwrap(), s_c_character(&c, &g1).unwrap());
        assert_eq!(s_shriek_c(&c, &g1, &g1).unwrap(), Sign::Plus);
    }
}

/// `det((1 + A)/2)` on the realization: a second closed form for the spinor norm
/// of an isometry without eigenvalue −1.
fn zassenhaus(r: &QuadraticSpaceRealization) -> Q {
    let n = r.dim();
    let mut m = r.action.clone();
    for i in 0..n {
        m[(i, i)] += q(1);
    }
    m.scale(&Q::new(1.into(), 2.into())).det()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_equals_oracle_on_every_c_class(seed in any::<u64>(), fi in 0usize..5, n in 1usize..=3) {
        let f = FIELDS[fi];
        let d = gen_stable_datum(&mut case_rng(seed), f, n, TierPolicy::Both).unwrap();
        let formula = spinor_norm_formula(&d).unwrap();
        for so in enumerate_c_classes(&d, DatumKind::So).unwrap() {
            let r = realize_quadratic_space(&so).unwrap();
            prop_assert_eq!(spinor_norm_reflections(f, &r), formula);
            prop_assert_eq!(square_class(f, &zassenhaus(&r)).unwrap(), formula);
            let w = reflection_decomposition(&r);
            prop_assert!(w.len() <= r.dim());
        }
        for c in f.square_classes() {
            prop_assert_eq!(s_c_character(&c, &d).unwrap(), hilbert_symbol(&c, &formula));
        }
    }
}
