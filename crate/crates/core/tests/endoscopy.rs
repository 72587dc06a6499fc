use std::collections::BTreeMap;

use proptest::prelude::*;
use psivar::arith::q;
use psivar::cyclo::Cyclo8;
use psivar::endoscopy::*;
use psivar::localfield::{LocalField, RootOfUnity8, Sign, SquareClass};
use psivar::lparam::*;
use psivar::verify::{case_rng, gen_parameter};

fn param(f: LocalField, s: Vec<(SimpleSummand, u32)>) -> MpParameter {
    MpParameter::new(f, s).unwrap()
}

fn sa(f: LocalField, d: &str, a: u32) -> SimpleSummand {
    SimpleSummand::CharSa { d: f.parse_class(d).unwrap(), a }
}

fn s_el(sig: &[(u32, u32)]) -> SElement {
    SElement { signatures: sig.to_vec() }
}

#[test]
fn centralizer_shapes() {
    let f = LocalField::PAdic(3);
    let one = param(f, vec![(sa(f, "1", 2), 1)]);
    let shape = centralizer_shape(&one);
    assert_eq!(shape.blocks, vec![(0, BlockType::Orthogonal(1))]);
    assert_eq!(shape.component_group_order(), 2);
    let pairs = param(
        LocalField::Complex,
        vec![(SimpleSummand::OpaquePair { id: "a".into(), dim: 1, value_at_minus_one: Sign::Minus, twist: 1 }, 2)],
    );
    assert_eq!(centralizer_shape(&pairs).rank(), 0);
    assert_eq!(centralizer_shape(&pairs).component_group_order(), 1);
    let mixed = param(f, vec![(sa(f, "1", 2), 3), (sa(f, "u", 2), 1), (sa(f, "p", 1), 2)]);
    let sh = centralizer_shape(&mixed);
    assert_eq!(
        sh.blocks,
        vec![(0, BlockType::Orthogonal(3)), (1, BlockType::Orthogonal(1)), (2, BlockType::Symplectic(2))]
    );
    assert_eq!(sh.component_group_order(), 4);
}

#[test]
fn s_element_enumeration() {
    let f = LocalField::PAdic(3);
    let o1 = centralizer_shape(&param(f, vec![(sa(f, "1", 2), 1)]));
    assert_eq!(enumerate_s_elements(&o1), vec![s_el(&[(1, 0)]), s_el(&[(0, 1)])]);
    let sp2 = centralizer_shape(&param(f, vec![(sa(f, "1", 1), 2)]));
    assert_eq!(enumerate_s_elements(&sp2), vec![s_el(&[(2, 0)]), s_el(&[(0, 2)])]);
    assert!(validate_s(&sp2, &s_el(&[(1, 1)])).is_err());
    assert!(validate_s(&o1, &s_el(&[(1, 0), (0, 1)])).is_err());
}

#[test]
fn images_in_the_component_group() {
    let f = LocalField::PAdic(5);
    let phi = param(f, vec![(sa(f, "1", 2), 2), (sa(f, "u", 2), 1), (sa(f, "p", 1), 2)]);
    let shape = centralizer_shape(&phi);
    let id = image_in_component_group(&shape, &s_el(&[(2, 0), (1, 0), (2, 0)])).unwrap();
    assert!(id.is_trivial());
    let flip = image_in_component_group(&shape, &s_el(&[(1, 1), (1, 0), (2, 0)])).unwrap();
    assert_eq!(flip, SignVector(vec![Sign::Minus, Sign::Plus]));
    // O(2) contributes q ∈ {0, 1, 2}, O(1) q ∈ {0, 1}, Sp(2) q ∈ {0, 2}
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in enumerate_s_elements(&shape) {
        *counts.entry(image_in_component_group(&shape, &s).unwrap().to_mask()).or_default() += 1;
    }
    assert_eq!(counts.len(), shape.component_group_order());
    let sizes: Vec<usize> = counts.values().copied().collect();
    assert_eq!(sizes, vec![4, 2, 4, 2]);
}

#[test]
fn endoscopic_data_of_involutions() {
    let f = LocalField::PAdic(3);
    let phi = param(f, vec![(sa(f, "1", 2), 1), (sa(f, "u", 2), 1)]);
    assert_eq!(endoscopic_datum_of(&phi, &s_el(&[(1, 0), (1, 0)])).unwrap().n_prime, 2);
    let minus = endoscopic_datum_of(&phi, &s_el(&[(0, 1), (0, 1)])).unwrap();
    assert_eq!((minus.n_prime, minus.n_double_prime), (0, 2));
    let mixed = endoscopic_datum_of(&phi, &s_el(&[(1, 0), (0, 1)])).unwrap();
    assert_eq!((mixed.n_prime, mixed.n_double_prime), (1, 1));
    let (p1, p2) = endoscopic_parameters(&phi, &s_el(&[(1, 0), (0, 1)])).unwrap();
    assert_eq!(p1.summands(), &[(sa(f, "1", 2), 1)]);
    assert_eq!(p2.summands(), &[(sa(f, "u", 2), 1)]);
}

#[test]
fn epsilon_of_the_minus_eigenspace() {
    let f = LocalField::PAdic(3);
    let psi = AdditiveCharacter::standard(f);
    let (st, stu) = (sa(f, "1", 2), sa(f, "p", 2));
    let phi = param(f, vec![(st.clone(), 1), (stu.clone(), 1)]);
    assert_eq!(epsilon_minus_eigenspace(&phi, &s_el(&[(1, 0), (1, 0)]), &psi).unwrap(), Sign::Plus);
    let e1 = epsilon(&st, &psi).unwrap().to_sign().unwrap();
    let e2 = epsilon(&stu, &psi).unwrap().to_sign().unwrap();
    assert_eq!(epsilon_minus_eigenspace(&phi, &s_el(&[(0, 1), (1, 0)]), &psi).unwrap(), e1);
    assert_eq!(epsilon_minus_eigenspace(&phi, &s_el(&[(0, 1), (0, 1)]), &psi).unwrap(), e1 * e2);
}

/// `ε(φ^{s=−1})` is not determined by the image of `s` and the dimension of the
/// (−1)-eigenspace: over ℝ, φ = 4·sgn ⊕ 2·1 has `Ş_φ = 1`, yet the two involutions
/// with a 2-dimensional (−1)-eigenspace carry different signs.
#[test]
fn image_and_dimension_do_not_determine_epsilon() {
    let r = LocalField::Real;
    let phi = param(r, vec![(SimpleSummand::UnitCharR { e: 1 }, 4), (SimpleSummand::UnitCharR { e: 0 }, 2)]);
    let shape = centralizer_shape(&phi);
    assert_eq!(shape.component_group_order(), 1);
    let (a, b) = (s_el(&[(2, 2), (2, 0)]), s_el(&[(4, 0), (0, 2)]));
    for s in [&a, &b] {
        assert!(image_in_component_group(&shape, s).unwrap().is_trivial());
        assert_eq!(endoscopic_datum_of(&phi, s).unwrap().n_double_prime, 1);
    }
    let psi = AdditiveCharacter::standard(r);
    assert_eq!(epsilon_minus_eigenspace(&phi, &a, &psi).unwrap(), Sign::Minus);
    assert_eq!(epsilon_minus_eigenspace(&phi, &b, &psi).unwrap(), Sign::Plus);
}

fn enhanced(phi: MpParameter) -> EnhancedParameter {
    let k = phi.i_plus().len();
    let psi = AdditiveCharacter::standard(phi.field());
    EnhancedParameter::new(phi, SignVector::trivial(k), psi).unwrap()
}

#[test]
fn twisting_enhanced_parameters() {
    let f = LocalField::PAdic(5);
    let e = enhanced(param(f, vec![(sa(f, "1", 2), 1), (sa(f, "u", 4), 1)]));
    assert_eq!(twist_enhanced(&e, &f.one()).unwrap(), e);
    for c in f.square_classes() {
        for c2 in f.square_classes() {
            let lhs = twist_enhanced(&twist_enhanced(&e, &c).unwrap(), &c2).unwrap();
            assert_eq!(lhs, twist_enhanced(&e, &(c * c2)).unwrap());
        }
    }
    let cx = LocalField::Complex;
    let ec = enhanced(param(
        cx,
        vec![(SimpleSummand::OpaquePair { id: "x".into(), dim: 1, value_at_minus_one: Sign::Plus, twist: 1 }, 1)],
    ));
    assert_eq!(contragredient_enhanced(&ec).unwrap(), ec);
    assert_eq!(contragredient_enhanced(&contragredient_enhanced(&e).unwrap()).unwrap(), e);
}

#[test]
fn contragredient_of_a_discrete_series() {
    let r = LocalField::Real;
    let e = enhanced(param(r, vec![(SimpleSummand::DiscreteSeriesR { k: 1 }, 1)]));
    let c = contragredient_enhanced(&e).unwrap();
    let delta = delta_c(&e.parameter, &SquareClass::minus_one(r), &e.psi).unwrap();
    assert_eq!(c.chi, delta);
    assert_eq!(c.chi, SignVector(vec![Sign::Minus]));
    assert_eq!(c.parameter, e.parameter);
    assert_eq!(c.psi, e.psi);
}

#[test]
fn zeta_translation() {
    let f = LocalField::PAdic(7);
    let phi = param(f, vec![(sa(f, "1", 2), 1), (sa(f, "p", 2), 1)]);
    let pair = endoscopic_parameters(&phi, &s_el(&[(1, 0), (0, 1)])).unwrap();
    assert_eq!(zeta_translate_so(&pair, &f.one()), pair);
    for c in f.square_classes() {
        let t = zeta_translate_so(&pair, &c);
        assert_eq!(zeta_translate_so(&t, &c), pair);
        assert_eq!((t.0.dim(), t.1.dim()), (pair.0.dim(), pair.1.dim()));
    }
}

#[test]
fn fourier_examples() {
    let triv = FormalPacketDistribution { rank: 0, side: FourierSide::Pi, coeffs: vec![Cyclo8::rational(q(3))] };
    let t = luo_fourier(&triv, FourierDirection::Forward).unwrap();
    assert_eq!(t.coeffs, triv.coeffs);
    let ind = FormalPacketDistribution { rank: 1, side: FourierSide::Pi, coeffs: vec![Cyclo8::one(), Cyclo8::zero()] };
    let t = luo_fourier(&ind, FourierDirection::Forward).unwrap();
    assert_eq!(t.coeffs, vec![Cyclo8::one(), Cyclo8::one()]);
    assert!(luo_fourier(&ind, FourierDirection::Inverse).is_err());
    let bad = FormalPacketDistribution { rank: 2, side: FourierSide::Pi, coeffs: vec![Cyclo8::one()] };
    assert!(luo_fourier(&bad, FourierDirection::Forward).is_err());
}

#[test]
fn enhanced_json_round_trip() {
    let f = LocalField::PAdic(3);
    let e = enhanced(param(f, vec![(sa(f, "1", 2), 1), (sa(f, "u", 1), 2)]));
    let t = twist_enhanced(&e, &f.parse_class("p").unwrap()).unwrap();
    let back: EnhancedParameter = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

const FIELDS: [LocalField; 4] = [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn component_group_laws(seed in any::<u64>(), fi in 0usize..4) {
        let f = FIELDS[fi];
        let phi = gen_parameter(&mut case_rng(seed), f, 3, 3, true);
        let shape = centralizer_shape(&phi);
        prop_assert_eq!(shape.component_group_order(), 1 << phi.i_plus().len());
        let mut fibre: BTreeMap<(usize, Vec<(u32, u32)>), Sign> = BTreeMap::new();
        let mut images = std::collections::BTreeSet::new();
        for s in enumerate_s_elements(&shape) {
            let img = image_in_component_group(&shape, &s).unwrap();
            images.insert(img.to_mask());
            prop_assert_eq!(endoscopic_datum_of(&phi, &s).unwrap().n() as u32, phi.n());
            let e = epsilon_minus_eigenspace(&phi, &s, &AdditiveCharacter::standard(f)).unwrap();
            for a in f.square_classes() {
                prop_assert_eq!(epsilon_minus_eigenspace(&phi, &s, &AdditiveCharacter { scale: a }).unwrap(), e);
            }
            let rest: Vec<(u32, u32)> = shape.blocks.iter().zip(&s.signatures)
                .filter(|((_, b), _)| !matches!(b, BlockType::Orthogonal(_)))
                .map(|(_, sig)| *sig).collect();
            let prev = *fibre.entry((img.to_mask(), rest)).or_insert(e);
            prop_assert_eq!(prev, e);
        }
        prop_assert_eq!(images.len(), shape.component_group_order());
    }

    #[test]
    fn delta_is_a_cocycle(seed in any::<u64>(), fi in 0usize..4) {
        let f = FIELDS[fi];
        let phi = gen_parameter(&mut case_rng(seed), f, 6, 3, false);
        for a in f.square_classes() {
            let psi = AdditiveCharacter { scale: a };
            for c in f.square_classes() {
                let d = delta_c(&phi, &c, &psi).unwrap();
                prop_assert_eq!(&d, &delta_c(&phi, &c, &AdditiveCharacter::standard(f)).unwrap());
                for c2 in f.square_classes() {
                    let rhs = d.mul(&delta_c(&phi.twist(&c), &c2, &psi.rescale(&c)).unwrap()).unwrap();
                    prop_assert_eq!(delta_c(&phi, &(c * c2), &psi).unwrap(), rhs);
                }
            }
        }
    }

    #[test]
    fn fourier_round_trip(rank in 0usize..=4, raw in prop::collection::vec((-9i64..=9, 1i64..=9), 64)) {
        let coeffs: Vec<Cyclo8> = (0..1usize << rank)
            .map(|i| Cyclo8::new(std::array::from_fn(|k| {
                let (n, d) = raw[(4 * i + k) % raw.len()];
                psivar::arith::qf(n, d)
            })))
            .collect();
        let pi = FormalPacketDistribution { rank, side: FourierSide::Pi, coeffs };
        let t = luo_fourier(&pi, FourierDirection::Forward).unwrap();
        prop_assert_eq!(luo_fourier(&t, FourierDirection::Inverse).unwrap(), pi);
    }

    #[test]
    fn symplectic_epsilon_is_a_sign(seed in any::<u64>(), fi in 0usize..4) {
        let f = FIELDS[fi];
        let phi = gen_parameter(&mut case_rng(seed), f, 6, 3, false);
        for i in phi.i_plus() {
            let s = &phi.summands()[i].0;
            for a in f.square_classes() {
                let e: RootOfUnity8 = epsilon(s, &AdditiveCharacter { scale: a }).unwrap();
                prop_assert!(e.to_sign().is_some());
            }
        }
    }
}

/// Naive transform written with explicit character pairings.
fn naive_forward(d: &FormalPacketDistribution) -> Vec<Cyclo8> {
    let k = d.rank;
    (0..1usize << k)
        .map(|x| {
            let xv = SignVector::from_mask(x, k);
            d.coeffs.iter().enumerate().fold(Cyclo8::zero(), |acc, (chi, v)| {
                let s = SignVector::from_mask(chi, k).pair(&xv);
                if s == Sign::Plus { acc.add(v) } else { acc.sub(v) }
            })
        })
        .collect()
}

#[test]
fn fourier_matches_naive_pairing() {
    for rank in 0..=4usize {
        let coeffs: Vec<Cyclo8> = (0..1usize << rank).map(|i| Cyclo8::zeta_pow(i as i64 * 3 + 1)).collect();
        let d = FormalPacketDistribution { rank, side: FourierSide::Pi, coeffs };
        assert_eq!(luo_fourier(&d, FourierDirection::Forward).unwrap().coeffs, naive_forward(&d));
    }
}
