//! Formal bounded L-parameters of `Mp(2n)` built from a catalog of simple
//! summands, their exact ε-factors, quadratic twists and the character `δ_c`.
//!
//! Conventions. The standard additive character `ψ⁰` is `x ↦ e^{2πi{x}_p}` on
//! `ℚ_p` (conductor `ℤ_p`) and `x ↦ e^{2πix}` on `ℝ`; `ψ_a(x) = ψ⁰(ax)`.
//! ε-factors are taken at `s = 1/2` with Tate's normalization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::q;
use crate::cyclo::Cyclo8;
use crate::error::{Error, Result};
use crate::localfield::{hilbert_symbol, square_class, LocalField, RootOfUnity8, Sign, SquareClass};

/// `ψ_a` for the square class of `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdditiveCharacter {
    pub scale: SquareClass,
}

impl AdditiveCharacter {
    pub fn standard(field: LocalField) -> Self {
        AdditiveCharacter { scale: field.one() }
    }

    pub fn field(&self) -> LocalField {
        self.scale.field()
    }

    /// `ψ_c`.
    pub fn rescale(&self, c: &SquareClass) -> Self {
        AdditiveCharacter { scale: self.scale * *c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfDuality {
    Symplectic,
    Orthogonal,
    Pair,
}

/// A simple summand. Opaque summands carry only the invariants needed for
/// sign bookkeeping and the class by which they have been twisted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleSummand {
    /// `χ_d ⊠ S_a` over ℚ_p.
    CharSa { d: SquareClass, a: u32 },
    /// The 2-dimensional representation of `W_ℝ` induced from `z ↦ (z/|z|)^k`.
    DiscreteSeriesR { k: u32 },
    /// `sgn^e` over ℝ.
    UnitCharR { e: u8 },
    /// `ξ ⊕ ξ^∨` with `ξ` not self-dual; stores `det ξ(−1)`.
    OpaquePair { id: String, dim: u32, value_at_minus_one: Sign, twist: i64 },
    /// Orthogonal self-dual; stores `det ρ(−1)`.
    OpaqueOrthogonal { id: String, dim: u32, det_at_minus_one: Sign, twist: i64 },
    /// Symplectic self-dual with unknown ε.
    OpaqueSymplectic { id: String, dim: u32, twist: i64 },
}

impl SimpleSummand {
    pub fn dim(&self) -> u32 {
        match self {
            SimpleSummand::CharSa { a, .. } => *a,
            SimpleSummand::DiscreteSeriesR { .. } => 2,
            SimpleSummand::UnitCharR { .. } => 1,
            SimpleSummand::OpaquePair { dim, .. }
            | SimpleSummand::OpaqueOrthogonal { dim, .. }
            | SimpleSummand::OpaqueSymplectic { dim, .. } => *dim,
        }
    }

    pub fn is_catalog(&self) -> bool {
        matches!(
            self,
            SimpleSummand::CharSa { .. } | SimpleSummand::DiscreteSeriesR { .. } | SimpleSummand::UnitCharR { .. }
        )
    }

    /// `det(−1)` of the summand (for pairs: of `ξ`).
    pub fn det_at_minus_one(&self) -> Sign {
        match self {
            SimpleSummand::CharSa { d, a } => hilbert_symbol(d, &SquareClass::minus_one(d.field())).pow(*a as u64),
            SimpleSummand::DiscreteSeriesR { k } => Sign::Minus.pow(*k as u64 + 1),
            SimpleSummand::UnitCharR { e } => Sign::Minus.pow(*e as u64),
            SimpleSummand::OpaquePair { value_at_minus_one, .. } => *value_at_minus_one,
            SimpleSummand::OpaqueOrthogonal { det_at_minus_one, .. } => *det_at_minus_one,
            SimpleSummand::OpaqueSymplectic { .. } => Sign::Plus,
        }
    }

    fn check_field(&self, field: LocalField) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            SimpleSummand::CharSa { d, a } => {
                if field.is_archimedean() {
                    return bad(format!("CharSa is non-archimedean, field is {field}"));
                }
                if d.field() != field {
                    return bad("character class from another field".into());
                }
                if *a == 0 {
                    return bad("CharSa needs a ≥ 1".into());
                }
            }
            SimpleSummand::DiscreteSeriesR { k } => {
                if field != LocalField::Real || *k == 0 {
                    return bad("DiscreteSeriesR(k) needs field R and k ≥ 1".into());
                }
            }
            SimpleSummand::UnitCharR { e } => {
                if field != LocalField::Real || *e > 1 {
                    return bad("UnitCharR(e) needs field R and e ∈ {0, 1}".into());
                }
            }
            SimpleSummand::OpaqueSymplectic { dim, .. } if dim % 2 == 1 => {
                return bad("symplectic summands have even dimension".into())
            }
            _ => {}
        }
        if self.dim() == 0 {
            return bad("zero-dimensional summand".into());
        }
        Ok(())
    }
}

impl fmt::Display for SimpleSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tw = |t: &i64| if *t == 1 { String::new() } else { format!("⊗ζ[{t}]") };
        match self {
            SimpleSummand::CharSa { d, a } => write!(f, "χ[{d}]⊠S{a}"),
            SimpleSummand::DiscreteSeriesR { k } => write!(f, "D{k}"),
            SimpleSummand::UnitCharR { e } => write!(f, "sgn^{e}"),
            SimpleSummand::OpaquePair { id, twist, .. } => write!(f, "{id}{}⊕dual", tw(twist)),
            SimpleSummand::OpaqueOrthogonal { id, twist, .. } | SimpleSummand::OpaqueSymplectic { id, twist, .. } => {
                write!(f, "{id}{}", tw(twist))
            }
        }
    }
}

pub fn classify(s: &SimpleSummand) -> SelfDuality {
    match s {
        SimpleSummand::CharSa { a, .. } if a % 2 == 0 => SelfDuality::Symplectic,
        SimpleSummand::CharSa { .. } => SelfDuality::Orthogonal,
        SimpleSummand::DiscreteSeriesR { k } if k % 2 == 1 => SelfDuality::Symplectic,
        SimpleSummand::DiscreteSeriesR { .. } => SelfDuality::Orthogonal,
        SimpleSummand::UnitCharR { .. } => SelfDuality::Orthogonal,
        SimpleSummand::OpaquePair { .. } => SelfDuality::Pair,
        SimpleSummand::OpaqueOrthogonal { .. } => SelfDuality::Orthogonal,
        SimpleSummand::OpaqueSymplectic { .. } => SelfDuality::Symplectic,
    }
}

/// `ζ_c(−1) = (c, −1)_F`.
pub fn zeta_at_minus_one(field: LocalField, c: &SquareClass) -> Sign {
    hilbert_symbol(c, &SquareClass::minus_one(field))
}

/// Is the quadratic character `χ_d` of `ℚ_p^×` unramified?
fn is_unramified(d: &SquareClass) -> bool {
    match d.field() {
        LocalField::PAdic(2) => matches!(d.rep(), 1 | 5),
        LocalField::PAdic(p) => d.rep() % p as i64 != 0,
        _ => true,
    }
}

/// `ε(1/2, χ_d, ψ⁰)` over ℚ_p.
fn epsilon_quadratic_standard(d: &SquareClass) -> RootOfUnity8 {
    let field = d.field();
    let p = field.prime().expect("p-adic");
    if is_unramified(d) {
        return RootOfUnity8::ONE;
    }
    if p != 2 {
        // ε = χ_d(p)·p^{−1/2}·g with the quadratic Gauss sum g = √p or i√p.
        let chi_p = hilbert_symbol(d, &square_class(field, &q(p as i64)).expect("nonzero"));
        let g = if p % 4 == 1 { RootOfUnity8::ONE } else { RootOfUnity8::I };
        return RootOfUnity8::from(chi_p) * g;
    }
    // p = 2: ε = χ_d(2)^a · 2^{−a/2} · Σ_{u ∈ (ℤ/2^a)^×} χ_d(u) ζ_{2^a}^u, exactly in ℚ(ζ₈).
    let a: u32 = if matches!(d.rep(), -1 | -5) { 2 } else { 3 };
    let modulus = 1i64 << a;
    let step = 8 / modulus;
    let mut g = Cyclo8::zero();
    for u in (1..modulus).step_by(2) {
        let chi = hilbert_symbol(d, &square_class(field, &q(u)).expect("odd"));
        let term = Cyclo8::zeta_pow(step * u);
        g = if chi.is_plus() { g.add(&term) } else { g.sub(&term) };
    }
    let chi2 = hilbert_symbol(d, &square_class(field, &q(2)).expect("nonzero")).pow(a as u64);
    // 2^{-1} for a = 2; 2^{-3/2} = √2/4 for a = 3.
    let mut e = if a == 2 { g.half() } else { g.mul(&Cyclo8::sqrt2()).half().half() };
    if !chi2.is_plus() {
        e = e.neg();
    }
    e.as_root().expect("root numbers of quadratic characters lie in μ₈")
}

/// `ε(1/2, χ_d, ψ_a) = χ_d(a)·ε(1/2, χ_d, ψ⁰)`.
pub fn epsilon_quadratic(d: &SquareClass, psi: &AdditiveCharacter) -> RootOfUnity8 {
    RootOfUnity8::from(hilbert_symbol(d, &psi.scale)) * epsilon_quadratic_standard(d)
}

/// Exact ε-factor of a catalog summand.
///
/// * `χ_d ⊠ S_a`: `ε(χ_d)^a · (−χ_d(ϖ))^{a−1}` if `χ_d` is unramified, `ε(χ_d)^a` otherwise.
/// * `sgn^e` on ℝ: `i^e`; the induced `D_k`: `i^{k+1}`; both times `det(a)` under `ψ_a`.
pub fn epsilon(s: &SimpleSummand, psi: &AdditiveCharacter) -> Result<RootOfUnity8> {
    let field = psi.field();
    let real_scale = |e: u64| RootOfUnity8::from(Sign::from_bool(psi.scale.rep() > 0).pow(e));
    match s {
        SimpleSummand::CharSa { d, a } => {
            if d.field() != field {
                return Err(Error::FieldMismatch("summand and ψ over different fields".into()));
            }
            let mut e = epsilon_quadratic(d, psi).pow(*a as i64);
            if is_unramified(d) {
                let p = field.prime().expect("p-adic");
                let chi_pi = hilbert_symbol(d, &square_class(field, &q(p as i64)).expect("nonzero"));
                let frob = RootOfUnity8::from(chi_pi) * RootOfUnity8::MINUS_ONE;
                e = e * frob.pow(*a as i64 - 1);
            }
            Ok(e)
        }
        SimpleSummand::UnitCharR { e } => {
            field_is_real(field)?;
            Ok(RootOfUnity8::I.pow(*e as i64) * real_scale(*e as u64))
        }
        SimpleSummand::DiscreteSeriesR { k } => {
            field_is_real(field)?;
            Ok(RootOfUnity8::I.pow(*k as i64 + 1) * real_scale(*k as u64 + 1))
        }
        _ => Err(Error::EpsilonUnavailable(format!("{s} is opaque; only paired values are accessible"))),
    }
}

fn field_is_real(field: LocalField) -> Result<()> {
    if field == LocalField::Real {
        Ok(())
    } else {
        Err(Error::FieldMismatch(format!("archimedean summand over {field}")))
    }
}

/// Joint ε of `count` copies of an opaque summand (pairs: `count` copies of
/// `ξ ⊕ ξ^∨`; orthogonal: `count` must be even).
pub fn pair_epsilon(s: &SimpleSummand, count: u32) -> Result<RootOfUnity8> {
    match s {
        SimpleSummand::OpaquePair { value_at_minus_one, .. } => Ok(value_at_minus_one.pow(count as u64).into()),
        SimpleSummand::OpaqueOrthogonal { det_at_minus_one, .. } => {
            if count % 2 == 1 {
                return Err(Error::InvalidParameter("orthogonal opaque summands pair up: odd count".into()));
            }
            Ok(det_at_minus_one.pow(count as u64 / 2).into())
        }
        _ => Err(Error::InvalidParameter(format!("{s} has no stored pairing invariant"))),
    }
}

/// `s ⊗ ζ_c`.
pub fn twist(s: &SimpleSummand, c: &SquareClass) -> SimpleSummand {
    let field = c.field();
    let zeta = zeta_at_minus_one(field, c);
    let tw = |t: &i64| (square_class(field, &q(*t)).expect("nonzero") * *c).rep();
    match s {
        SimpleSummand::CharSa { d, a } => SimpleSummand::CharSa { d: *d * *c, a: *a },
        SimpleSummand::DiscreteSeriesR { k } => SimpleSummand::DiscreteSeriesR { k: *k },
        SimpleSummand::UnitCharR { e } => SimpleSummand::UnitCharR { e: if c.rep() == -1 { 1 - e } else { *e } },
        SimpleSummand::OpaquePair { id, dim, value_at_minus_one, twist } => SimpleSummand::OpaquePair {
            id: id.clone(),
            dim: *dim,
            value_at_minus_one: *value_at_minus_one * zeta.pow(*dim as u64),
            twist: tw(twist),
        },
        SimpleSummand::OpaqueOrthogonal { id, dim, det_at_minus_one, twist } => SimpleSummand::OpaqueOrthogonal {
            id: id.clone(),
            dim: *dim,
            det_at_minus_one: *det_at_minus_one * zeta.pow(*dim as u64),
            twist: tw(twist),
        },
        SimpleSummand::OpaqueSymplectic { id, dim, twist } => {
            SimpleSummand::OpaqueSymplectic { id: id.clone(), dim: *dim, twist: tw(twist) }
        }
    }
}

/// A vector of signs indexed by the basis `I⁺` of `Ş_φ ≅ μ₂^{I⁺}`; used both
/// for group elements and for characters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn trivial(k: usize) -> Self {
        SignVector(vec![Sign::Plus; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|s| s.is_plus())
    }

    /// Pointwise product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.len() != o.len() {
            return Err(Error::GroupMismatch(format!("lengths {} and {}", self.len(), o.len())));
        }
        Ok(SignVector(self.0.iter().zip(&o.0).map(|(a, b)| *a * *b).collect()))
    }

    /// `χ(x)` for a character `self` and an element `x` of `μ₂^k`.
    pub fn pair(&self, x: &Self) -> Sign {
        Sign::product(self.0.iter().zip(&x.0).map(|(a, b)| Sign::from_bool(a.is_plus() || b.is_plus())))
    }

    /// Bitmask with bit `i` set iff entry `i` is −1.
    pub fn to_mask(&self) -> usize {
        self.0.iter().enumerate().filter(|(_, s)| !s.is_plus()).map(|(i, _)| 1 << i).sum()
    }

    pub fn from_mask(mask: usize, k: usize) -> Self {
        SignVector((0..k).map(|i| Sign::from_bool(mask >> i & 1 == 0)).collect())
    }
}

/// `φ = ⊕ m_i φ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MpParameter {
    field: LocalField,
    summands: Vec<(SimpleSummand, u32)>,
}

impl MpParameter {
    pub fn new(field: LocalField, summands: Vec<(SimpleSummand, u32)>) -> Result<Self> {
        for (i, (s, m)) in summands.iter().enumerate() {
            s.check_field(field)?;
            if *m == 0 {
                return Err(Error::InvalidParameter(format!("summand {i} has multiplicity 0")));
            }
            if classify(s) == SelfDuality::Orthogonal && m % 2 == 1 {
                return Err(Error::InvalidParameter(format!(
                    "orthogonal summand {s} must have even multiplicity, got {m}"
                )));
            }
            if summands[..i].iter().any(|(t, _)| t == s) {
                return Err(Error::InvalidParameter(format!("summand {s} listed twice")));
            }
        }
        Ok(MpParameter { field, summands })
    }

    pub fn field(&self) -> LocalField {
        self.field
    }

    pub fn summands(&self) -> &[(SimpleSummand, u32)] {
        &self.summands
    }

    /// `Σ m_i dim φ_i`, pairs counted twice.
    pub fn dim(&self) -> u32 {
        self.summands
            .iter()
            .map(|(s, m)| m * s.dim() * if classify(s) == SelfDuality::Pair { 2 } else { 1 })
            .sum()
    }

    pub fn n(&self) -> u32 {
        self.dim() / 2
    }

    /// Indices of the symplectic-type summands: the basis of `Ş_φ`.
    pub fn i_plus(&self) -> Vec<usize> {
        (0..self.summands.len()).filter(|&i| classify(&self.summands[i].0) == SelfDuality::Symplectic).collect()
    }

    /// `φ ⊗ ζ_c`, summand by summand (so the `I⁺` basis is preserved).
    pub fn twist(&self, c: &SquareClass) -> MpParameter {
        MpParameter { field: self.field, summands: self.summands.iter().map(|(s, m)| (twist(s, c), *m)).collect() }
    }
}

impl fmt::Display for MpParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.summands.iter().map(|(s, m)| format!("{m}·{s}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// `δ_c(φ, ψ)`: at `i ∈ I⁺`, `ζ_c(−1)^{dim φ_i/2} · ε(φ_i, ψ) / ε(φ_i ζ_c, ψ)`.
pub fn delta_c(phi: &MpParameter, c: &SquareClass, psi: &AdditiveCharacter) -> Result<SignVector> {
    if c.field() != phi.field || psi.field() != phi.field {
        return Err(Error::FieldMismatch("φ, c and ψ must share a field".into()));
    }
    let basis = phi.i_plus();
    if c.is_trivial() {
        return Ok(SignVector::trivial(basis.len()));
    }
    let zeta = zeta_at_minus_one(phi.field, c);
    basis
        .iter()
        .map(|&i| {
            let s = &phi.summands[i].0;
            let ratio = epsilon(s, psi)? * epsilon(&twist(s, c), psi)?.inv();
            let v = RootOfUnity8::from(zeta.pow(s.dim() as u64 / 2)) * ratio;
            v.to_sign().ok_or_else(|| {
                Error::InvalidParameter(format!("δ_c component for {s} is {v}, not ±1: ε conventions are inconsistent"))
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(SignVector)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SummandSpec {
    CharSa {
        d: String,
        a: u32,
    },
    DiscreteSeriesR {
        k: u32,
    },
    UnitCharR {
        e: u8,
    },
    OpaquePair {
        id: String,
        dim: u32,
        value_at_minus_one: Sign,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<String>,
    },
    OpaqueOrthogonal {
        id: String,
        dim: u32,
        det_at_minus_one: Sign,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<String>,
    },
    OpaqueSymplectic {
        id: String,
        dim: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandJson {
    #[serde(flatten)]
    pub spec: SummandSpec,
    #[serde(default = "one_u32")]
    pub m: u32,
}

fn one_u32() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterJson {
    pub field: String,
    pub summands: Vec<SummandJson>,
}

fn parse_twist(field: LocalField, t: &Option<String>) -> Result<i64> {
    match t {
        None => Ok(1),
        Some(s) => Ok(field.parse_class(s)?.rep()),
    }
}

fn fmt_twist(t: i64) -> Option<String> {
    (t != 1).then(|| t.to_string())
}

impl TryFrom<ParameterJson> for MpParameter {
    type Error = Error;
    fn try_from(j: ParameterJson) -> Result<Self> {
        let field: LocalField = j.field.parse()?;
        let summands = j
            .summands
            .iter()
            .map(|s| {
                let summand = match &s.spec {
                    SummandSpec::CharSa { d, a } => SimpleSummand::CharSa { d: field.parse_class(d)?, a: *a },
                    SummandSpec::DiscreteSeriesR { k } => SimpleSummand::DiscreteSeriesR { k: *k },
                    SummandSpec::UnitCharR { e } => SimpleSummand::UnitCharR { e: *e },
                    SummandSpec::OpaquePair { id, dim, value_at_minus_one, twist } => SimpleSummand::OpaquePair {
                        id: id.clone(),
                        dim: *dim,
                        value_at_minus_one: *value_at_minus_one,
                        twist: parse_twist(field, twist)?,
                    },
                    SummandSpec::OpaqueOrthogonal { id, dim, det_at_minus_one, twist } => {
                        SimpleSummand::OpaqueOrthogonal {
                            id: id.clone(),
                            dim: *dim,
                            det_at_minus_one: *det_at_minus_one,
                            twist: parse_twist(field, twist)?,
                        }
                    }
                    SummandSpec::OpaqueSymplectic { id, dim, twist } => {
                        SimpleSummand::OpaqueSymplectic { id: id.clone(), dim: *dim, twist: parse_twist(field, twist)? }
                    }
                };
                Ok((summand, s.m))
            })
            .collect::<Result<Vec<_>>>()?;
        MpParameter::new(field, summands)
    }
}

impl From<&MpParameter> for ParameterJson {
    fn from(p: &MpParameter) -> Self {
        ParameterJson {
            field: p.field.to_string(),
            summands: p
                .summands
                .iter()
                .map(|(s, m)| SummandJson {
                    spec: match s {
                        SimpleSummand::CharSa { d, a } => SummandSpec::CharSa { d: d.rep().to_string(), a: *a },
                        SimpleSummand::DiscreteSeriesR { k } => SummandSpec::DiscreteSeriesR { k: *k },
                        SimpleSummand::UnitCharR { e } => SummandSpec::UnitCharR { e: *e },
                        SimpleSummand::OpaquePair { id, dim, value_at_minus_one, twist } => SummandSpec::OpaquePair {
                            id: id.clone(),
                            dim: *dim,
                            value_at_minus_one: *value_at_minus_one,
                            twist: fmt_twist(*twist),
                        },
                        SimpleSummand::OpaqueOrthogonal { id, dim, det_at_minus_one, twist } => {
                            SummandSpec::OpaqueOrthogonal {
                                id: id.clone(),
                                dim: *dim,
                                det_at_minus_one: *det_at_minus_one,
                                twist: fmt_twist(*twist),
                            }
                        }
                        SimpleSummand::OpaqueSymplectic { id, dim, twist } => {
                            SummandSpec::OpaqueSymplectic { id: id.clone(), dim: *dim, twist: fmt_twist(*twist) }
                        }
                    },
                    m: *m,
                })
                .collect(),
        }
    }
}

impl Serialize for MpParameter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ParameterJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MpParameter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MpParameter::try_from(ParameterJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
