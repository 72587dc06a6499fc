//! Component-group combinatorics of `S_φ`, the passage from involutions `s`
//! to endoscopic data, `ε(φ^{s=−1})`, Fourier bookkeeping between packets and
//! the twist / contragredient maps on enhanced parameters.

use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::conjclass::EndoscopicDatum;
use crate::cyclo::Cyclo8;
use crate::error::{Error, Result};
use crate::localfield::{RootOfUnity8, Sign, SquareClass};
use crate::lparam::{
    classify, delta_c, epsilon, pair_epsilon, AdditiveCharacter, MpParameter, SelfDuality, SignVector, SimpleSummand,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockType {
    /// `O(m)`, from a symplectic summand.
    Orthogonal(u32),
    /// `Sp(m)`, from an orthogonal summand.
    Symplectic(u32),
    /// `GL(m)`, from a pair `ξ ⊕ ξ^∨`.
    GeneralLinear(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerShape {
    /// `(summand index, block)`.
    pub blocks: Vec<(usize, BlockType)>,
}

impl CentralizerShape {
    /// Number of `O(m)` blocks, i.e. `|I⁺|`.
    pub fn rank(&self) -> usize {
        self.blocks.iter().filter(|(_, b)| matches!(b, BlockType::Orthogonal(_))).count()
    }

    /// `|Ş_φ| = 2^{|I⁺|}`.
    pub fn component_group_order(&self) -> usize {
        1 << self.rank()
    }
}

pub fn centralizer_shape(phi: &MpParameter) -> CentralizerShape {
    CentralizerShape {
        blocks: phi
            .summands()
            .iter()
            .enumerate()
            .map(|(i, (s, m))| {
                let b = match classify(s) {
                    SelfDuality::Symplectic => BlockType::Orthogonal(*m),
                    SelfDuality::Orthogonal => BlockType::Symplectic(*m),
                    SelfDuality::Pair => BlockType::GeneralLinear(*m),
                };
                (i, b)
            })
            .collect(),
    }
}

/// An involution `s ∈ S_φ` up to conjugacy: per block, the multiplicities
/// `(p, q)` of the eigenvalues `+1, −1` on the multiplicity space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SElement {
    pub signatures: Vec<(u32, u32)>,
}

fn block_m(b: BlockType) -> u32 {
    match b {
        BlockType::Orthogonal(m) | BlockType::Symplectic(m) | BlockType::GeneralLinear(m) => m,
    }
}

pub fn validate_s(shape: &CentralizerShape, s: &SElement) -> Result<()> {
    if s.signatures.len() != shape.blocks.len() {
        return Err(Error::GroupMismatch(format!(
            "{} signatures for {} blocks",
            s.signatures.len(),
            shape.blocks.len()
        )));
    }
    for ((_, b), (p, q)) in shape.blocks.iter().zip(&s.signatures) {
        if p + q != block_m(*b) {
            return Err(Error::GroupMismatch(format!("signature ({p}, {q}) does not fill a block of size {}", block_m(*b))));
        }
        if matches!(b, BlockType::Symplectic(_)) && (p % 2 == 1 || q % 2 == 1) {
            return Err(Error::GroupMismatch(format!("signature ({p}, {q}) on a symplectic block must be even")));
        }
    }
    Ok(())
}

pub fn enumerate_s_elements(shape: &CentralizerShape) -> Vec<SElement> {
    let mut out = vec![Vec::new()];
    for (_, b) in &shape.blocks {
        let m = block_m(*b);
        let step = if matches!(b, BlockType::Symplectic(_)) { 2 } else { 1 };
        let opts: Vec<(u32, u32)> = (0..=m).step_by(step).map(|q| (m - q, q)).collect();
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(u32, u32)>| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(*o);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|signatures| SElement { signatures }).collect()
}

/// `(−1)^{q_i}` on each `O(m_i)` block.
pub fn image_in_component_group(shape: &CentralizerShape, s: &SElement) -> Result<SignVector> {
    validate_s(shape, s)?;
    Ok(SignVector(
        shape
            .blocks
            .iter()
            .zip(&s.signatures)
            .filter(|((_, b), _)| matches!(b, BlockType::Orthogonal(_)))
            .map(|(_, (_, q))| Sign::Minus.pow(*q as u64))
            .collect(),
    ))
}

/// Eigenspace dimensions `(dim V^{s=1}, dim V^{s=−1})`.
fn eigenspace_dims(phi: &MpParameter, s: &SElement) -> (u32, u32) {
    let mut plus = 0;
    let mut minus = 0;
    for ((summand, _), (p, q)) in phi.summands().iter().zip(&s.signatures) {
        let w = summand.dim() * if classify(summand) == SelfDuality::Pair { 2 } else { 1 };
        plus += w * p;
        minus += w * q;
    }
    (plus, minus)
}

pub fn endoscopic_datum_of(phi: &MpParameter, s: &SElement) -> Result<EndoscopicDatum> {
    validate_s(&centralizer_shape(phi), s)?;
    let (plus, minus) = eigenspace_dims(phi, s);
    assert!(plus % 2 == 0 && minus % 2 == 0, "eigenspaces of an involution in Sp are even-dimensional");
    Ok(EndoscopicDatum { n_prime: plus as usize / 2, n_double_prime: minus as usize / 2 })
}

/// The parameters `(φ′, φ″)` of `SO(2n′+1) × SO(2n″+1)` cut out by the eigenspaces of `s`.
pub fn endoscopic_parameters(phi: &MpParameter, s: &SElement) -> Result<(MpParameter, MpParameter)> {
    validate_s(&centralizer_shape(phi), s)?;
    let side = |pick: fn(&(u32, u32)) -> u32| {
        let summands = phi
            .summands()
            .iter()
            .zip(&s.signatures)
            .filter(|(_, sig)| pick(sig) > 0)
            .map(|((sm, _), sig)| (sm.clone(), pick(sig)))
            .collect();
        MpParameter::new(phi.field(), summands)
    };
    Ok((side(|s| s.0)?, side(|s| s.1)?))
}

/// `ε(1/2, φ^{s=−1}, ψ)`; must be ±1.
pub fn epsilon_minus_eigenspace(phi: &MpParameter, s: &SElement, psi: &AdditiveCharacter) -> Result<Sign> {
    validate_s(&centralizer_shape(phi), s)?;
    let mut total = RootOfUnity8::ONE;
    for ((summand, _), (_, q)) in phi.summands().iter().zip(&s.signatures) {
        if *q == 0 {
            continue;
        }
        let e = match summand {
            SimpleSummand::OpaquePair { .. } | SimpleSummand::OpaqueOrthogonal { .. } => pair_epsilon(summand, *q)?,
            // A symplectic summand has ε = ±1, so an even power needs no value.
            SimpleSummand::OpaqueSymplectic { .. } if q % 2 == 0 => RootOfUnity8::ONE,
            _ => epsilon(summand, psi)?.pow(*q as i64),
        };
        total = total * e;
    }
    total
        .to_sign()
        .ok_or_else(|| Error::InvalidParameter(format!("ε(φ^(s=−1)) = {total} is not ±1")))
}

/// `(φ, χ, ψ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedParameter {
    pub parameter: MpParameter,
    pub chi: SignVector,
    pub psi: AdditiveCharacter,
}

impl EnhancedParameter {
    pub fn new(parameter: MpParameter, chi: SignVector, psi: AdditiveCharacter) -> Result<Self> {
        if chi.len() != parameter.i_plus().len() {
            return Err(Error::GroupMismatch(format!(
                "χ has {} entries but |I⁺| = {}",
                chi.len(),
                parameter.i_plus().len()
            )));
        }
        if psi.field() != parameter.field() {
            return Err(Error::FieldMismatch("ψ and φ over different fields".into()));
        }
        Ok(EnhancedParameter { parameter, chi, psi })
    }
}

/// `(φ, χ, ψ) ↦ (φζ_c, χ·δ_c(φ, ψ), ψ_c)`.
pub fn twist_enhanced(e: &EnhancedParameter, c: &SquareClass) -> Result<EnhancedParameter> {
    let delta = delta_c(&e.parameter, c, &e.psi)?;
    Ok(EnhancedParameter { parameter: e.parameter.twist(c), chi: e.chi.mul(&delta)?, psi: e.psi.rescale(c) })
}

/// `(φ, χ) ↦ (φζ_{−1}, χ·δ_{−1})` with `ψ` unchanged.
pub fn contragredient_enhanced(e: &EnhancedParameter) -> Result<EnhancedParameter> {
    let minus_one = SquareClass::minus_one(e.parameter.field());
    let t = twist_enhanced(e, &minus_one)?;
    Ok(EnhancedParameter { psi: e.psi, ..t })
}

/// Twists both parameters of `SO(2n′+1) × SO(2n″+1)` by `ζ_c`.
pub fn zeta_translate_so(phi: &(MpParameter, MpParameter), c: &SquareClass) -> (MpParameter, MpParameter) {
    (phi.0.twist(c), phi.1.twist(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FourierSide {
    /// Coefficients indexed by characters `χ ∈ Ş^∨` (packet members).
    Pi,
    /// Coefficients indexed by elements `x ∈ Ş`.
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FourierDirection {
    Forward,
    Inverse,
}

/// Coefficients over `Ş ≅ μ₂^rank` or its dual, indexed by bitmask
/// (bit `i` set iff coordinate `i` is −1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalPacketDistribution {
    pub rank: usize,
    pub side: FourierSide,
    pub coeffs: Vec<Cyclo8>,
}

/// Forward: `T(x) = Σ_χ χ(x)·π(χ)`; inverse divides by `|Ş| = 2^rank`.
pub fn luo_fourier(dist: &FormalPacketDistribution, direction: FourierDirection) -> Result<FormalPacketDistribution> {
    if dist.rank > 20 || dist.coeffs.len() != 1 << dist.rank {
        return Err(Error::GroupMismatch(format!(
            "{} coefficients do not index a group of rank {}",
            dist.coeffs.len(),
            dist.rank
        )));
    }
    let (from, to) = match direction {
        FourierDirection::Forward => (FourierSide::Pi, FourierSide::T),
        FourierDirection::Inverse => (FourierSide::T, FourierSide::Pi),
    };
    if dist.side != from {
        return Err(Error::GroupMismatch(format!("{direction:?} transform expects {from:?}-side coefficients")));
    }
    let n = dist.coeffs.len();
    let norm: Q = match direction {
        FourierDirection::Forward => q(1),
        FourierDirection::Inverse => Q::new(1.into(), (n as i64).into()),
    };
    let coeffs = (0..n)
        .map(|x| {
            let mut acc = Cyclo8::zero();
            for (chi, v) in dist.coeffs.iter().enumerate() {
                acc = if (chi & x).count_ones() % 2 == 0 { acc.add(v) } else { acc.sub(v) };
            }
            acc.scale(&norm)
        })
        .collect();
    Ok(FormalPacketDistribution { rank: dist.rank, side: to, coeffs })
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnhancedJson {
    pub parameter: crate::lparam::ParameterJson,
    #[serde(default)]
    pub chi: Option<SignVector>,
    #[serde(default)]
    pub psi: Option<String>,
}

impl TryFrom<EnhancedJson> for EnhancedParameter {
    type Error = Error;
    fn try_from(j: EnhancedJson) -> Result<Self> {
        let parameter = MpParameter::try_from(j.parameter)?;
        let field = parameter.field();
        let chi = j.chi.unwrap_or_else(|| SignVector::trivial(parameter.i_plus().len()));
        let psi = match j.psi {
            Some(s) => AdditiveCharacter { scale: field.parse_class(&s)? },
            None => AdditiveCharacter::standard(field),
        };
        EnhancedParameter::new(parameter, chi, psi)
    }
}

impl From<&EnhancedParameter> for EnhancedJson {
    fn from(e: &EnhancedParameter) -> Self {
        EnhancedJson {
            parameter: (&e.parameter).into(),
            chi: Some(e.chi.clone()),
            psi: Some(e.psi.scale.rep().to_string()),
        }
    }
}

impl Serialize for EnhancedParameter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnhancedJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EnhancedParameter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        EnhancedParameter::try_from(EnhancedJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::LocalField;

    fn param(f: LocalField, s: Vec<(SimpleSummand, u32)>) -> MpParameter {
        MpParameter::new(f, s).unwrap()
    }

    #[test]
    fn two_steinbergs() {
        let f = LocalField::PAdic(3);
        let phi = param(
            f,
            vec![
                (SimpleSummand::CharSa { d: f.one(), a: 2 }, 1),
                (SimpleSummand::CharSa { d: f.parse_class("u").unwrap(), a: 2 }, 1),
            ],
        );
        let shape = centralizer_shape(&phi);
        assert_eq!(shape.component_group_order(), 4);
        let s = SElement { signatures: vec![(1, 0), (0, 1)] };
        let d = endoscopic_datum_of(&phi, &s).unwrap();
        assert_eq!((d.n_prime, d.n_double_prime), (1, 1));
        assert_eq!(enumerate_s_elements(&shape).len(), 4);
    }

    #[test]
    fn symplectic_blocks_take_even_signatures() {
        let f = LocalField::Real;
        let phi = param(f, vec![(SimpleSummand::UnitCharR { e: 0 }, 2)]);
        let sig: Vec<_> = enumerate_s_elements(&centralizer_shape(&phi)).into_iter().map(|s| s.signatures).collect();
        assert_eq!(sig, vec![vec![(2, 0)], vec![(0, 2)]]);
    }

    #[test]
    fn fourier_indicator_of_trivial_character() {
        let mut coeffs = vec![Cyclo8::zero(); 2];
        coeffs[0] = Cyclo8::one();
        let d = FormalPacketDistribution { rank: 1, side: FourierSide::Pi, coeffs };
        let t = luo_fourier(&d, FourierDirection::Forward).unwrap();
        assert_eq!(t.coeffs, vec![Cyclo8::one(), Cyclo8::one()]);
        assert_eq!(luo_fourier(&t, FourierDirection::Inverse).unwrap(), d);
        assert!(luo_fourier(&t, FourierDirection::Forward).is_err());
    }
}
