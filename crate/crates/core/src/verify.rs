//! Seeded randomized verification of the sign identities: symbol laws, spinor
//! norms, the variation chain under `ψ ↦ ψ_c`, `δ_c` laws, component groups and
//! Fourier bookkeeping.
//!
//! Every case draws from its own ChaCha stream derived from `(seed, suite, index)`,
//! so reports do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::conjclass::{split_correspondence, Side};
use crate::cyclo::Cyclo8;
use crate::endoscopy::{
    centralizer_shape, contragredient_enhanced, endoscopic_datum_of, endoscopic_parameters, enumerate_s_elements,
    epsilon_minus_eigenspace, image_in_component_group, luo_fourier, twist_enhanced, zeta_translate_so, BlockType,
    EnhancedParameter, FormalPacketDistribution, FourierDirection, FourierSide,
};
use crate::error::{Error, Result};
use crate::etale::{
    check_regular, enumerate_c_classes, norm_to_f, witnesses, Base, BaseElement, ClassDatum, DatumKind, Factor,
    FactorElement, InvolutiveFactor, Top,
};
use crate::linalg::Matrix;
use crate::localfield::{
    ext_hilbert_symbol, ext_norm, hilbert_symbol, hilbert_symbol_oracle, hilbert_symbol_q, oracle_default_depth,
    square_class, ExtElement, ExtField, LocalField, Sign, SquareClass,
};
use crate::lparam::{delta_c, AdditiveCharacter, MpParameter, SignVector, SimpleSummand};
use crate::spinor::{
    realize_quadratic_space, spinor_norm_formula, spinor_norm_oracle, spinor_norm_reflections, QuadraticSpaceRealization,
};

/// Height bound for random numerators and denominators.
pub const HEIGHT: i64 = 50;
const RETRY_BUDGET: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TierPolicy {
    One,
    Two,
    Both,
}

impl FromStr for TierPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" => Ok(TierPolicy::One),
            "2" | "two" => Ok(TierPolicy::Two),
            "both" | "1,2" => Ok(TierPolicy::Both),
            _ => Err(Error::Config(format!("unknown tier policy {s:?} (use 1, 2 or both)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Symbols,
    Spinor,
    Variation,
    DeltaLaws,
    ComponentGroup,
    Fourier,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Symbols, Suite::Spinor, Suite::Variation, Suite::DeltaLaws, Suite::ComponentGroup, Suite::Fourier];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Symbols => "symbols",
            Suite::Spinor => "spinor",
            Suite::Variation => "variation",
            Suite::DeltaLaws => "delta-laws",
            Suite::ComponentGroup => "component-group",
            Suite::Fourier => "fourier",
            Suite::All => "all",
        }
    }

    fn id(&self) -> u64 {
        *self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub fields: Vec<LocalField>,
    pub n_max: usize,
    pub tier: TierPolicy,
    pub cases: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(seed: u64, cases: usize) -> Self {
        SuiteConfig {
            fields: default_fields(),
            n_max: 4,
            tier: TierPolicy::Both,
            cases,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cases == 0 {
            return Err(Error::Config("case count must be at least 1".into()));
        }
        if self.fields.is_empty() {
            return Err(Error::Config("no fields selected".into()));
        }
        if !(1..=6).contains(&self.n_max) {
            return Err(Error::Config(format!("n_max must be in 1..=6, got {}", self.n_max)));
        }
        if self.tier == TierPolicy::Two {
            if let Some(bad) = self.fields.iter().find(|f| !matches!(f, LocalField::PAdic(p) if *p != 2)) {
                return Err(Error::Config(format!("tier 2 requires odd p, but {bad} was selected")));
            }
        }
        Ok(())
    }
}

pub fn default_fields() -> Vec<LocalField> {
    vec![LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5), LocalField::PAdic(7)]
}

/// One verified case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub suite: String,
    pub index: usize,
    pub case_seed: u64,
    pub field: String,
    pub tier: u8,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    pub signs: BTreeMap<String, Sign>,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CaseReport {
    fn new(suite: Suite, index: usize, case_seed: u64, field: LocalField) -> Self {
        CaseReport {
            suite: suite.name().into(),
            index,
            case_seed,
            field: field.to_string(),
            tier: 1,
            digest: String::new(),
            partition: None,
            c: None,
            signs: BTreeMap::new(),
            verdict: true,
            detail: None,
        }
    }

    /// Records a failed check (keeps the first message).
    fn fail(&mut self, msg: impl Into<String>) {
        self.verdict = false;
        if self.detail.is_none() {
            self.detail = Some(msg.into());
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<CaseReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteSummary>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Seeds and random objects

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the case `index` of `suite` under the master `seed`.
pub fn case_seed(seed: u64, suite: Suite, index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ suite.id()) ^ index as u64)
}

pub fn case_rng(case_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(case_seed)
}

fn nonzero_int(rng: &mut impl Rng, h: i64) -> i64 {
    loop {
        let v = rng.random_range(-h..=h);
        if v != 0 {
            return v;
        }
    }
}

/// Nonzero rational of height ≤ `h`.
pub fn random_rational(rng: &mut impl Rng, h: i64) -> Q {
    Q::new(nonzero_int(rng, h).into(), rng.random_range(1..=h).into())
}

fn random_rational_or_zero(rng: &mut impl Rng, h: i64) -> Q {
    if rng.random_bool(0.25) {
        q(0)
    } else {
        random_rational(rng, h)
    }
}

pub fn random_ext_field(rng: &mut impl Rng, field: LocalField) -> Result<ExtField> {
    let token = ["u", "p", "up"][rng.random_range(0..3)];
    ExtField::new(field, &field.parse_class(token)?)
}

pub fn random_ext_element(rng: &mut impl Rng, e: &ExtField) -> ExtElement {
    loop {
        let y = e.element(random_rational_or_zero(rng, HEIGHT), random_rational_or_zero(rng, HEIGHT));
        if !y.a.is_nil() || !y.b.is_nil() {
            return y;
        }
    }
}

use crate::arith::Scalar;

fn random_base_element(rng: &mut impl Rng, base: &Base) -> BaseElement {
    match base {
        Base::Ground => BaseElement::Rational(random_rational(rng, HEIGHT)),
        Base::Ext(e) => BaseElement::Ext(random_ext_element(rng, e)),
    }
}

fn pick_tier(rng: &mut impl Rng, field: LocalField, policy: TierPolicy, remaining_dim: usize) -> u8 {
    let possible = matches!(field, LocalField::PAdic(p) if p != 2) && remaining_dim >= 4;
    match policy {
        TierPolicy::One => 1,
        TierPolicy::Two if possible => 2,
        TierPolicy::Both if possible && rng.random_bool(0.5) => 2,
        _ => 1,
    }
}

fn random_shape(rng: &mut impl Rng, field: LocalField, tier: u8) -> Result<InvolutiveFactor> {
    let split = field == LocalField::Complex || rng.random_bool(0.4);
    let s = q(rng.random_range(1..=3));
    let sq = &s * &s;
    if tier == 1 {
        let top = if split {
            Top::Split
        } else {
            let reps: Vec<i64> = field.canonical_reps().into_iter().filter(|&r| r != 1).collect();
            let r = reps[rng.random_range(0..reps.len())];
            Top::Field(BaseElement::Rational(q(r) * sq))
        };
        Ok(InvolutiveFactor { base: Base::Ground, top })
    } else {
        let e = random_ext_field(rng, field)?;
        let top = if split {
            Top::Split
        } else {
            let reps = e.square_class_reps();
            let r = &reps[rng.random_range(1..reps.len())];
            Top::Field(BaseElement::Ext(r.mul(&e.from_rational(sq))))
        };
        Ok(InvolutiveFactor { base: Base::Ext(e), top })
    }
}

/// A random `x` with `xτ(x) = 1`, `x ≠ ±1`.
fn random_x(rng: &mut impl Rng, shape: &InvolutiveFactor) -> Result<FactorElement> {
    for _ in 0..RETRY_BUDGET {
        let x = if shape.is_split() {
            let t = random_base_element(rng, &shape.base);
            let t_elem = shape.from_components(t.clone(), t.clone())?;
            let t_inv = t_elem.inv().expect("nonzero").components().0;
            shape.from_components(t, t_inv)?
        } else {
            let alpha = random_base_element(rng, &shape.base);
            let beta = random_base_element(rng, &shape.base);
            let w = shape.element(alpha, beta)?;
            match w.div(&w.tau()) {
                Some(x) => x,
                None => continue,
            }
        };
        if !x.is_one() && !x.is_minus_one() {
            return Ok(x);
        }
    }
    Err(Error::SamplingExhausted(RETRY_BUDGET))
}

fn random_side(rng: &mut impl Rng, field: LocalField, n: usize, policy: TierPolicy) -> Result<Vec<Factor>> {
    let mut remaining = 2 * n;
    let mut out = Vec::new();
    while remaining > 0 {
        let tier = pick_tier(rng, field, policy, remaining);
        let shape = random_shape(rng, field, tier)?;
        let x = random_x(rng, &shape)?;
        remaining -= shape.dim_f();
        out.push(Factor { shape, x, c: None });
    }
    Ok(out)
}

/// A regular stable datum of `dim_F K = 2n`.
pub fn gen_stable_datum(rng: &mut impl Rng, field: LocalField, n: usize, policy: TierPolicy) -> Result<ClassDatum> {
    Ok(gen_targeted(rng, field, n, 0, policy)?.0)
}

/// A regular stable datum with a partition sending `2n′` dimensions to the first
/// side and `2n″` to the second.
pub fn gen_targeted(
    rng: &mut impl Rng,
    field: LocalField,
    n_prime: usize,
    n_double_prime: usize,
    policy: TierPolicy,
) -> Result<(ClassDatum, Vec<Side>)> {
    for _ in 0..RETRY_BUDGET {
        let first = random_side(rng, field, n_prime, policy)?;
        let second = random_side(rng, field, n_double_prime, policy)?;
        let partition: Vec<Side> =
            first.iter().map(|_| Side::Prime).chain(second.iter().map(|_| Side::DoublePrime)).collect();
        let factors: Vec<Factor> = first.into_iter().chain(second).collect();
        let d = ClassDatum::new(field, DatumKind::Stable, factors)?;
        if check_regular(&d) {
            return Ok((d, partition));
        }
    }
    Err(Error::SamplingExhausted(RETRY_BUDGET))
}

/// Replaces each `c_i` by `c_i · N_{K_i|K♮_i}(λ_i)` for random `λ_i`.
fn rescale_c_by_norms(rng: &mut impl Rng, d: &ClassDatum) -> Result<ClassDatum> {
    let mut cs = Vec::new();
    for f in d.factors() {
        let c = f.c.as_ref().expect("c present");
        let lambda = loop {
            let a = random_base_element(rng, &f.shape.base);
            let b = random_base_element(rng, &f.shape.base);
            let l = if f.shape.is_split() { f.shape.from_components(a, b)? } else { f.shape.element(a, b)? };
            if !l.norm_to_base().is_nil() {
                break l;
            }
        };
        cs.push(c.scale_base(&lambda.norm_to_base())?);
    }
    d.stable().with_c(d.kind(), cs)
}

/// A regular symplectic datum: a random stable datum with a random `c`-class,
/// rescaled by random norms.
pub fn gen_random_datum(rng: &mut impl Rng, field: LocalField, n: usize, policy: TierPolicy) -> Result<ClassDatum> {
    let s = gen_stable_datum(rng, field, n, policy)?;
    let classes = enumerate_c_classes(&s, DatumKind::Sp)?;
    let d = &classes[rng.random_range(0..classes.len())];
    rescale_c_by_norms(rng, d)
}

/// `a″ = (√D_i)_i`, with `(1, −1)` on split factors; `τ(a″) = −a″` is checked.
pub fn make_a_element(gamma_double_prime: &ClassDatum) -> Result<Vec<FactorElement>> {
    gamma_double_prime
        .factors()
        .iter()
        .map(|f| {
            let a = f.shape.sqrt_disc();
            if a.tau() != a.neg() {
                return Err(Error::InvalidDatum("τ(a) ≠ −a".into()));
            }
            Ok(a)
        })
        .collect()
}

/// `sgn″(c) = Π_{i ∈ I″} sgn_{K_i|K♮_i}(c)`.
pub fn sgn_double_prime(gamma_double_prime: &ClassDatum, c: &Q) -> Result<Sign> {
    let field = gamma_double_prime.field();
    gamma_double_prime.factors().iter().try_fold(Sign::Plus, |acc, f| Ok(acc * f.shape.sgn(field, c)?))
}

/// Signs of the variation chain for one `(δ, partition, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationSigns {
    pub s_shriek_formula: Sign,
    pub s_shriek_oracle: Sign,
    pub calibration: Sign,
    pub sgn_double_prime: Sign,
    pub target: Sign,
    pub var0_rhs: Sign,
    pub var1_lhs: Sign,
    pub n_double_prime: usize,
}

impl VariationSigns {
    pub fn master_holds(&self) -> bool {
        self.s_shriek_oracle * self.calibration * self.sgn_double_prime == self.target
            && self.s_shriek_formula == self.s_shriek_oracle
    }

    pub fn var0_holds(&self) -> bool {
        self.s_shriek_oracle == self.var0_rhs && self.s_shriek_formula == self.var0_rhs
    }

    pub fn var1_holds(&self) -> bool {
        self.var1_lhs == self.target
    }

    fn record(&self, r: &mut CaseReport) {
        r.signs.insert("s_shriek".into(), self.s_shriek_oracle);
        r.signs.insert("s_shriek_formula".into(), self.s_shriek_formula);
        r.signs.insert("calibration".into(), self.calibration);
        r.signs.insert("sgn_double_prime".into(), self.sgn_double_prime);
        r.signs.insert("target".into(), self.target);
        r.signs.insert("var0_rhs".into(), self.var0_rhs);
        r.signs.insert("var1_lhs".into(), self.var1_lhs);
    }
}

/// `c` is an arbitrary nonzero rational standing for its square class.
pub fn variation_signs(delta: &ClassDatum, partition: &[Side], c: &Q) -> Result<VariationSigns> {
    let field = delta.field();
    let corr = split_correspondence(delta, partition, None)?;
    let (g1, g2) = (&corr.gamma_prime, &corr.gamma_double_prime);
    let cc = square_class(field, c)?;
    let hs = |x: &Q| hilbert_symbol_q(field, c, x);

    let s_shriek_formula = hilbert_symbol(&cc, &spinor_norm_formula(g1)?) * hilbert_symbol(&cc, &spinor_norm_formula(g2)?);
    let s_shriek_oracle = hilbert_symbol(&cc, &spinor_norm_oracle(g1)?) * hilbert_symbol(&cc, &spinor_norm_oracle(g2)?);

    let omega = witnesses(delta)?;
    let calibration = hs(&norm_to_f(delta, &omega)?)?;
    let sgn2 = sgn_double_prime(g2, c)?;
    let n2 = corr.datum.n_double_prime;
    let target = hilbert_symbol_q(field, c, &q(-1))?.pow(n2 as u64);

    // ω′, ω″ split along the partition; a″ω″ is a Hilbert-90 witness for −x″.
    let omega1: Vec<FactorElement> =
        omega.iter().zip(partition).filter(|(_, s)| **s == Side::Prime).map(|(w, _)| w.clone()).collect();
    let omega2: Vec<FactorElement> =
        omega.iter().zip(partition).filter(|(_, s)| **s == Side::DoublePrime).map(|(w, _)| w.clone()).collect();
    let a2 = make_a_element(g2)?;
    let a_omega2: Vec<FactorElement> = a2.iter().zip(&omega2).map(|(a, w)| a.mul(w)).collect();
    for (w, f) in a_omega2.iter().zip(g2.factors()) {
        if w.div(&w.tau()).as_ref() != Some(&f.x) {
            return Err(Error::InvalidDatum("a″ω″ is not a witness for −x″".into()));
        }
    }
    let var0_rhs = hs(&norm_to_f(g1, &omega1)?)? * hs(&norm_to_f(g2, &a_omega2)?)?;
    let var1_lhs = hs(&norm_to_f(g2, &a2)?)? * sgn2;
    Ok(VariationSigns {
        s_shriek_formula,
        s_shriek_oracle,
        calibration,
        sgn_double_prime: sgn2,
        target,
        var0_rhs,
        var1_lhs,
        n_double_prime: n2,
    })
}

/// Master identity `s!_c(γ)·(c, N_{K|F}(ω))·sgn″(c) = (c, −1)^{n″}`, with the
/// two halves of the chain checked separately.
pub fn check_variation_master(delta: &ClassDatum, partition: &[Side], c: &Q) -> Result<(VariationSigns, bool)> {
    let v = variation_signs(delta, partition, c)?;
    let chain = v.var0_holds() && v.var1_holds();
    Ok((v.clone(), v.master_holds() && chain == v.master_holds()))
}

/// Just the second half: `(c, N_{K″|F}(a″))·sgn″(c) = (c, −1)^{n″}`.
pub fn check_delta_var_1(gamma_double_prime: &ClassDatum, c: &Q) -> Result<bool> {
    let field = gamma_double_prime.field();
    let a2 = make_a_element(gamma_double_prime)?;
    let lhs = hilbert_symbol_q(field, c, &norm_to_f(gamma_double_prime, &a2)?)? * sgn_double_prime(gamma_double_prime, c)?;
    Ok(lhs == hilbert_symbol_q(field, c, &q(-1))?.pow(gamma_double_prime.n() as u64))
}

// ---------------------------------------------------------------------------
// Random parameters

fn random_summand(rng: &mut impl Rng, field: LocalField, opaque: bool, j: usize) -> (SimpleSummand, u32) {
    let catalog_possible = !matches!(field, LocalField::Complex);
    if opaque && (!catalog_possible || rng.random_bool(0.25)) {
        return if rng.random_bool(0.5) {
            let s = SimpleSummand::OpaquePair {
                id: format!("xi{j}"),
                dim: rng.random_range(1..=2),
                value_at_minus_one: Sign::from_bool(rng.random_bool(0.5)),
                twist: 1,
            };
            (s, 1)
        } else {
            let s = SimpleSummand::OpaqueOrthogonal {
                id: format!("rho{j}"),
                dim: 1,
                det_at_minus_one: Sign::from_bool(rng.random_bool(0.5)),
                twist: 1,
            };
            (s, 2)
        };
    }
    match field {
        LocalField::PAdic(_) => {
            let classes = field.square_classes();
            let d = classes[rng.random_range(0..classes.len())];
            let a = rng.random_range(1..=4);
            let m = if a % 2 == 1 { 2 } else { rng.random_range(1..=2) };
            (SimpleSummand::CharSa { d, a }, m)
        }
        _ => {
            if rng.random_bool(0.7) {
                let k = rng.random_range(1..=5);
                let m = if k % 2 == 0 { 2 } else { rng.random_range(1..=2) };
                (SimpleSummand::DiscreteSeriesR { k }, m)
            } else {
                (SimpleSummand::UnitCharR { e: rng.random_range(0..=1) }, 2)
            }
        }
    }
}

fn summand_weight(s: &SimpleSummand, m: u32) -> u32 {
    m * s.dim() * if crate::lparam::classify(s) == crate::lparam::SelfDuality::Pair { 2 } else { 1 }
}

/// A random parameter with `n ≤ n_max` and `|I⁺| ≤ max_iplus`; over ℂ only opaque
/// summands occur.
pub fn gen_parameter(
    rng: &mut impl Rng,
    field: LocalField,
    n_max: u32,
    max_iplus: usize,
    opaque: bool,
) -> MpParameter {
    loop {
        let mut summands: Vec<(SimpleSummand, u32)> = Vec::new();
        let mut dim = 0;
        for j in 0..8 {
            let (s, m) = random_summand(rng, field, opaque || field == LocalField::Complex, j);
            let w = summand_weight(&s, m);
            let iplus = summands.iter().filter(|(t, _)| crate::lparam::classify(t) == crate::lparam::SelfDuality::Symplectic).count();
            let is_sym = crate::lparam::classify(&s) == crate::lparam::SelfDuality::Symplectic;
            if dim + w > 2 * n_max || summands.iter().any(|(t, _)| *t == s) || (is_sym && iplus >= max_iplus) {
                continue;
            }
            dim += w;
            summands.push((s, m));
            if rng.random_bool(0.3) {
                break;
            }
        }
        if summands.is_empty() {
            continue;
        }
        if let Ok(p) = MpParameter::new(field, summands) {
            return p;
        }
    }
}

fn random_sign_vector(rng: &mut impl Rng, k: usize) -> SignVector {
    SignVector((0..k).map(|_| Sign::from_bool(rng.random_bool(0.5))).collect())
}

fn random_class(rng: &mut impl Rng, field: LocalField) -> SquareClass {
    let cl = field.square_classes();
    cl[rng.random_range(0..cl.len())]
}

fn pick_field(rng: &mut impl Rng, cfg: &SuiteConfig) -> LocalField {
    cfg.fields[rng.random_range(0..cfg.fields.len())]
}

// ---------------------------------------------------------------------------
// Suites

fn case_symbols(cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let a = random_rational(rng, HEIGHT);
    let b = random_rational(rng, HEIGHT);
    r.digest = format!("a={a} b={b}");
    let closed = hilbert_symbol_q(field, &a, &b)?;
    r.signs.insert("closed".into(), closed);
    match hilbert_symbol_oracle(field, &a, &b, oracle_default_depth(field, &a, &b)) {
        Ok(o) => {
            r.signs.insert("oracle".into(), o);
            r.check(o == closed, || format!("closed form {closed} vs oracle {o}"));
        }
        Err(Error::Config(_)) => {} // modulus beyond the oracle's cap
        Err(e) => return Err(e),
    }
    // bimultiplicativity, symmetry, (a, −a) = 1
    let c = random_rational(rng, HEIGHT);
    let lhs = hilbert_symbol_q(field, &a, &(&b * &c))?;
    let rhs = closed * hilbert_symbol_q(field, &a, &c)?;
    r.check(lhs == rhs, || "bimultiplicativity fails".into());
    r.check(hilbert_symbol_q(field, &b, &a)? == closed, || "symmetry fails".into());
    r.check(hilbert_symbol_q(field, &a, &-a.clone())?.is_plus(), || "(a, −a) ≠ 1".into());
    let t = random_rational(rng, HEIGHT);
    r.check(square_class(field, &(&a * &t * &t))? == square_class(field, &a)?, || "square class not stable".into());
    // projection formula for a random quadratic extension
    if matches!(field, LocalField::PAdic(p) if p != 2) && cfg.tier != TierPolicy::One {
        r.tier = 2;
        let e = random_ext_field(rng, field)?;
        let y = random_ext_element(rng, &e);
        let lhs = ext_hilbert_symbol(&e, &e.from_rational(c.clone()), &y)?;
        let rhs = hilbert_symbol_q(field, &c, &ext_norm(&y))?;
        r.signs.insert("projection_lhs".into(), lhs);
        r.signs.insert("projection_rhs".into(), rhs);
        r.check(lhs == rhs, || format!("projection formula fails over {e} at c={c}, y={y:?}"));
    }
    Ok(())
}

fn case_spinor(cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let n = rng.random_range(1..=cfg.n_max);
    let s = gen_stable_datum(rng, field, n, cfg.tier)?;
    r.tier = s.max_tier();
    r.digest = s.digest();
    let formula = spinor_norm_formula(&s)?;
    for (k, d) in enumerate_c_classes(&s, DatumKind::So)?.iter().enumerate() {
        let d = rescale_c_by_norms(rng, d)?;
        let real = realize_quadratic_space(&d)?;
        let oracle = spinor_norm_reflections(field, &real);
        r.check(oracle == formula, || format!("c-class {k}: oracle {oracle} vs formula {formula}"));
        if k == 0 {
            let t = random_rational(rng, HEIGHT);
            let scaled = QuadraticSpaceRealization { gram: real.gram.scale(&t), action: real.action.clone() };
            r.check(spinor_norm_reflections(field, &scaled) == oracle, || "dilation changes the spinor norm".into());
        }
    }
    // witness independence: ω ↦ λω with λ ∈ K♮^×
    let w = witnesses(&s)?;
    let scaled: Vec<FactorElement> = w
        .iter()
        .zip(s.factors())
        .map(|(w, f)| w.scale_base(&random_base_element(rng, &f.shape.base)))
        .collect::<Result<_>>()?;
    r.check(square_class(field, &norm_to_f(&s, &scaled)?)? == formula, || "witness rescaling changes SN".into());
    r.signs.insert("sn_is_trivial".into(), Sign::from_bool(formula.is_trivial()));
    Ok(())
}

fn case_variation(cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let n = rng.random_range(1..=cfg.n_max);
    let n1 = rng.random_range(0..=n);
    let (stable, partition) = gen_targeted(rng, field, n1, n - n1, cfg.tier)?;
    let classes = enumerate_c_classes(&stable, DatumKind::Sp)?;
    let pick = rng.random_range(0..classes.len());
    let delta = rescale_c_by_norms(rng, &classes[pick])?;
    let cc = random_class(rng, field);
    let t = random_rational(rng, 7);
    let c = cc.rep_q() * &t * &t;
    r.tier = delta.max_tier();
    r.digest = delta.digest();
    r.partition = Some(format!("({n1},{})", n - n1));
    r.c = Some(cc.to_string());
    let (v, ok) = check_variation_master(&delta, &partition, &c)?;
    v.record(r);
    r.check(v.var0_holds(), || "Δ-var-0 chain step fails".into());
    r.check(v.var1_holds(), || "Δ-var-1 chain step fails".into());
    r.check(ok, || "master identity fails".into());
    // the c-datum of δ does not matter
    let other = &classes[rng.random_range(0..classes.len())];
    let (v2, _) = check_variation_master(other, &partition, &c)?;
    r.check(v2 == v, || "verdict depends on the c-datum of δ".into());
    Ok(())
}

fn case_delta_laws(_cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let phi = gen_parameter(rng, field, 6, 3, false);
    r.digest = phi.to_string();
    let psi = AdditiveCharacter { scale: random_class(rng, field) };
    let classes = field.square_classes();
    for c in &classes {
        let d = delta_c(&phi, c, &psi)?;
        for a in &classes {
            let other = delta_c(&phi, c, &AdditiveCharacter { scale: *a })?;
            r.check(other == d, || format!("δ_{c} depends on ψ-scale {a}"));
        }
        let t = random_rational(rng, 7);
        r.check(square_class(field, &(c.rep_q() * &t * &t))? == *c, || "class of c·t² moved".into());
        let twisted = phi.twist(c);
        for c2 in &classes {
            let lhs = delta_c(&phi, &(*c * *c2), &psi)?;
            let rhs = d.mul(&delta_c(&twisted, c2, &psi.rescale(c))?)?;
            r.check(lhs == rhs, || format!("cocycle fails at c={c}, c′={c2}"));
        }
        r.check(twisted.twist(c) == phi, || format!("double twist by {c} is not the identity"));
        r.check(twisted.dim() == phi.dim(), || "twist changes the dimension".into());
    }
    r.signs.insert("delta_minus_one_trivial".into(), Sign::from_bool(delta_c(&phi, &SquareClass::minus_one(field), &psi)?.is_trivial()));
    Ok(())
}

fn case_component_group(_cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let phi = gen_parameter(rng, field, 3, 3, true);
    r.digest = phi.to_string();
    let n = phi.n() as usize;
    let shape = centralizer_shape(&phi);
    let rank = phi.i_plus().len();
    r.check(shape.component_group_order() == 1 << rank, || "|Ş_φ| ≠ 2^|I⁺|".into());
    let elems = enumerate_s_elements(&shape);
    let mut images = BTreeSet::new();
    let mut fibre_eps: BTreeMap<(usize, Vec<(u32, u32)>), Sign> = BTreeMap::new();
    let c = random_class(rng, field);
    for s in &elems {
        let img = image_in_component_group(&shape, s)?;
        images.insert(img.to_mask());
        let dat = endoscopic_datum_of(&phi, s)?;
        r.check(dat.n() == n, || format!("n′ + n″ = {} ≠ {n}", dat.n()));
        let eps = epsilon_minus_eigenspace(&phi, s, &AdditiveCharacter::standard(field))?;
        for a in field.square_classes() {
            let e2 = epsilon_minus_eigenspace(&phi, s, &AdditiveCharacter { scale: a })?;
            r.check(e2 == eps, || format!("ε(φ^(s=−1)) depends on ψ-scale {a}"));
        }
        // fibres of the image with equal signatures off I⁺ carry equal ε
        let rest: Vec<(u32, u32)> = shape
            .blocks
            .iter()
            .zip(&s.signatures)
            .filter(|((_, b), _)| !matches!(b, BlockType::Orthogonal(_)))
            .map(|(_, sig)| *sig)
            .collect();
        let prev = *fibre_eps.entry((img.to_mask(), rest)).or_insert(eps);
        r.check(prev == eps, || "ε differs on an image fibre with equal I⁻/J signatures".into());
        // ζ-translation on the endoscopic side matches twisting φ
        let (p1, p2) = endoscopic_parameters(&phi, s)?;
        let lhs = endoscopic_parameters(&phi.twist(&c), s)?;
        r.check(zeta_translate_so(&(p1, p2), &c) == lhs, || "ζ-translation does not commute with φ ↦ φ^!".into());
    }
    r.check(images.len() == 1 << rank, || format!("image has {} of {} elements", images.len(), 1 << rank));
    Ok(())
}

fn case_fourier(_cfg: &SuiteConfig, r: &mut CaseReport, rng: &mut ChaCha8Rng, field: LocalField) -> Result<()> {
    let rank = rng.random_range(0..=4);
    let coeffs: Vec<Cyclo8> = (0..1usize << rank)
        .map(|_| Cyclo8::new(std::array::from_fn(|_| random_rational_or_zero(rng, 9))))
        .collect();
    let pi = FormalPacketDistribution { rank, side: FourierSide::Pi, coeffs };
    let t = luo_fourier(&pi, FourierDirection::Forward)?;
    r.check(luo_fourier(&t, FourierDirection::Inverse)? == pi, || "Fourier round trip fails".into());
    r.digest = format!("rank={rank}");

    let phi = gen_parameter(rng, field, 4, 3, false);
    let k = phi.i_plus().len();
    let e = EnhancedParameter::new(phi, random_sign_vector(rng, k), AdditiveCharacter { scale: random_class(rng, field) })?;
    let (c1, c2) = (random_class(rng, field), random_class(rng, field));
    let stepwise = twist_enhanced(&twist_enhanced(&e, &c1)?, &c2)?;
    r.check(stepwise == twist_enhanced(&e, &(c1 * c2))?, || format!("twist by {c1} then {c2} ≠ twist by the product"));
    r.check(contragredient_enhanced(&contragredient_enhanced(&e)?)? == e, || "contragredient is not an involution".into());
    r.digest = format!("rank={rank}; φ={}", e.parameter);
    Ok(())
}

pub fn run_case(cfg: &SuiteConfig, suite: Suite, index: usize) -> CaseReport {
    let seed = case_seed(cfg.seed, suite, index);
    let mut rng = case_rng(seed);
    let field = pick_field(&mut rng, cfg);
    let mut r = CaseReport::new(suite, index, seed, field);
    let res = match suite {
        Suite::Symbols => case_symbols(cfg, &mut r, &mut rng, field),
        Suite::Spinor => case_spinor(cfg, &mut r, &mut rng, field),
        Suite::Variation => case_variation(cfg, &mut r, &mut rng, field),
        Suite::DeltaLaws => case_delta_laws(cfg, &mut r, &mut rng, field),
        Suite::ComponentGroup => case_component_group(cfg, &mut r, &mut rng, field),
        Suite::Fourier => case_fourier(cfg, &mut r, &mut rng, field),
        Suite::All => unreachable!("expanded by run_suite"),
    };
    if let Err(e) = res {
        r.fail(format!("error: {e}"));
    }
    r
}

fn run_one(cfg: &SuiteConfig, suite: Suite) -> Vec<CaseReport> {
    (0..cfg.cases).into_par_iter().map(|i| run_case(cfg, suite, i)).collect()
}

pub fn run_suite(cfg: &SuiteConfig, suite: Suite) -> Result<SuiteReport> {
    cfg.validate()?;
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut failures = Vec::new();
    let mut suites = Vec::new();
    let mut total = 0;
    for s in list {
        let reports = run_one(cfg, s);
        total += reports.len();
        let failed: Vec<CaseReport> = reports.into_iter().filter(|r| !r.verdict).collect();
        suites.push(SuiteSummary { suite: s.name().into(), cases: cfg.cases, failures: failed.len() });
        failures.extend(failed);
    }
    Ok(SuiteReport {
        suite: suite.name().into(),
        seed: cfg.seed,
        cases: total,
        failures,
        suites: if suite == Suite::All { suites } else { Vec::new() },
    })
}

/// Checks `AᵀGA = G` and `det A = 1` on a realization (used by tests and the CLI).
pub fn realization_ok(r: &QuadraticSpaceRealization) -> bool {
    r.check().is_ok() && r.action.det() == q(1) && r.gram != Matrix::zeros(r.dim(), r.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_seeds_differ_by_suite_and_index() {
        let a = case_seed(7, Suite::Symbols, 0);
        assert_ne!(a, case_seed(7, Suite::Symbols, 1));
        assert_ne!(a, case_seed(7, Suite::Spinor, 0));
        assert_ne!(a, case_seed(8, Suite::Symbols, 0));
    }

    #[test]
    fn tier_two_needs_odd_p() {
        let mut cfg = SuiteConfig::new(1, 1);
        cfg.fields = vec![LocalField::PAdic(2)];
        cfg.tier = TierPolicy::Two;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.cases = 0;
        cfg.tier = TierPolicy::One;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn generated_data_are_regular() {
        let mut rng = case_rng(3);
        for f in default_fields() {
            let d = gen_random_datum(&mut rng, f, 3, TierPolicy::Both).unwrap();
            assert!(check_regular(&d));
            assert_eq!(d.n(), 3);
        }
    }
}
