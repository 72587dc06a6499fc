//! Étale algebras with involution `(K, τ)` over a local field and the class data
//! `(K, K♮, x, c)` of regular semisimple elements.
//!
//! Every factor `K_i` is a quadratic étale algebra over `K♮_i`, and `K♮_i` is
//! either the ground field `F` (tier 1) or a quadratic extension `E/ℚ_p`,
//! p odd (tier 2). All elements have exact rational coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{fmt_q, parse_q, q, Quad, Scalar, Q};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::localfield::{
    ext_hilbert_symbol, ext_square_class, hilbert_symbol_q, square_class, ExtElement, ExtField, LocalField, Sign,
};

/// The field `K♮_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Ground,
    Ext(ExtField),
}

/// An element of `K♮_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseElement {
    Rational(Q),
    Ext(ExtElement),
}

impl BaseElement {
    pub fn is_nil(&self) -> bool {
        match self {
            BaseElement::Rational(r) => r.is_nil(),
            BaseElement::Ext(e) => e.is_nil(),
        }
    }

    /// `N_{K♮|F}`.
    pub fn norm_q(&self) -> Q {
        match self {
            BaseElement::Rational(r) => r.clone(),
            BaseElement::Ext(e) => e.norm_q(),
        }
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            BaseElement::Rational(r) => Some(r),
            BaseElement::Ext(_) => None,
        }
    }
}

impl fmt::Display for BaseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseElement::Rational(r) => write!(f, "{}", fmt_q(r)),
            BaseElement::Ext(e) => write!(f, "({} + {}*sqrt({}))", fmt_q(&e.a), fmt_q(&e.b), fmt_q(&e.disc)),
        }
    }
}

/// `K_i` over `K♮_i`: split (`K♮ × K♮`, τ = swap) or `K♮(√D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Top {
    Split,
    Field(BaseElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveFactor {
    pub base: Base,
    pub top: Top,
}

/// An element of `K_i`, written `α + β√D` (with `D = 1` for split factors,
/// whose components are `(α + β, α − β)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorElement {
    Tier1(Quad<Q>),
    Tier2(Quad<Quad<Q>>),
}

macro_rules! binop {
    ($name:ident) => {
        pub fn $name(&self, o: &Self) -> Self {
            match (self, o) {
                (FactorElement::Tier1(a), FactorElement::Tier1(b)) => FactorElement::Tier1(a.$name(b)),
                (FactorElement::Tier2(a), FactorElement::Tier2(b)) => FactorElement::Tier2(a.$name(b)),
                _ => panic!("mixed-tier arithmetic"),
            }
        }
    };
}

macro_rules! unop {
    ($name:ident) => {
        pub fn $name(&self) -> Self {
            match self {
                FactorElement::Tier1(a) => FactorElement::Tier1(a.$name()),
                FactorElement::Tier2(a) => FactorElement::Tier2(a.$name()),
            }
        }
    };
}

impl FactorElement {
    binop!(add);
    binop!(sub);
    binop!(mul);
    unop!(neg);
    unop!(conj);
    unop!(one_like);

    /// τ.
    pub fn tau(&self) -> Self {
        self.conj()
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            FactorElement::Tier1(a) => a.inv().map(FactorElement::Tier1),
            FactorElement::Tier2(a) => a.inv().map(FactorElement::Tier2),
        }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut r = self.one_like();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn embed(&self, r: &Q) -> Self {
        match self {
            FactorElement::Tier1(a) => FactorElement::Tier1(a.embed(r)),
            FactorElement::Tier2(a) => FactorElement::Tier2(a.embed(r)),
        }
    }

    pub fn is_nil(&self) -> bool {
        match self {
            FactorElement::Tier1(a) => a.is_nil(),
            FactorElement::Tier2(a) => a.is_nil(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    pub fn is_minus_one(&self) -> bool {
        *self == self.one_like().neg()
    }

    pub fn q_coords(&self) -> Vec<Q> {
        match self {
            FactorElement::Tier1(a) => a.q_coords(),
            FactorElement::Tier2(a) => a.q_coords(),
        }
    }

    pub fn with_q_coords(&self, c: &[Q]) -> Self {
        match self {
            FactorElement::Tier1(a) => FactorElement::Tier1(a.with_q_coords(c)),
            FactorElement::Tier2(a) => FactorElement::Tier2(a.with_q_coords(c)),
        }
    }

    /// `N_{K|F}` as a rational.
    pub fn norm_q(&self) -> Q {
        match self {
            FactorElement::Tier1(a) => a.norm_q(),
            FactorElement::Tier2(a) => a.norm_q(),
        }
    }

    /// `Tr_{K|F}` as a rational.
    pub fn trace_q(&self) -> Q {
        match self {
            FactorElement::Tier1(a) => a.trace_q(),
            FactorElement::Tier2(a) => a.trace_q(),
        }
    }

    /// `N_{K|K♮}`.
    pub fn norm_to_base(&self) -> BaseElement {
        match self {
            FactorElement::Tier1(a) => BaseElement::Rational(a.norm()),
            FactorElement::Tier2(a) => BaseElement::Ext(a.norm()),
        }
    }

    /// The coordinates `(α, β)`.
    pub fn parts(&self) -> (BaseElement, BaseElement) {
        match self {
            FactorElement::Tier1(a) => (BaseElement::Rational(a.a.clone()), BaseElement::Rational(a.b.clone())),
            FactorElement::Tier2(a) => (BaseElement::Ext(a.a.clone()), BaseElement::Ext(a.b.clone())),
        }
    }

    /// Components `(α + β, α − β)` of a split-factor element.
    pub fn components(&self) -> (BaseElement, BaseElement) {
        match self {
            FactorElement::Tier1(a) => {
                let (s, t) = a.components();
                (BaseElement::Rational(s), BaseElement::Rational(t))
            }
            FactorElement::Tier2(a) => {
                let (s, t) = a.components();
                (BaseElement::Ext(s), BaseElement::Ext(t))
            }
        }
    }

    /// Is the element τ-fixed, i.e. in `K♮`?
    pub fn is_in_base(&self) -> bool {
        match self {
            FactorElement::Tier1(a) => a.is_in_base(),
            FactorElement::Tier2(a) => a.is_in_base(),
        }
    }

    /// Multiplies by an element of `K♮`.
    pub fn scale_base(&self, r: &BaseElement) -> Result<Self> {
        match (self, r) {
            (FactorElement::Tier1(a), BaseElement::Rational(r)) => {
                Ok(FactorElement::Tier1(Quad::new(&a.a * r, &a.b * r, a.disc.clone())))
            }
            (FactorElement::Tier2(a), BaseElement::Ext(r)) => {
                Ok(FactorElement::Tier2(Quad::new(a.a.mul(r), a.b.mul(r), a.disc.clone())))
            }
            _ => Err(Error::FieldMismatch("base element of the wrong tier".into())),
        }
    }
}

impl fmt::Display for FactorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.parts();
        write!(f, "{a} + {b}*sqrtD")
    }
}

impl InvolutiveFactor {
    pub fn tier(&self) -> u8 {
        match self.base {
            Base::Ground => 1,
            Base::Ext(_) => 2,
        }
    }

    /// `dim_F K_i`.
    pub fn dim_f(&self) -> usize {
        2 * self.tier() as usize
    }

    pub fn is_split(&self) -> bool {
        self.top == Top::Split
    }

    fn base_one(&self) -> BaseElement {
        match self.base {
            Base::Ground => BaseElement::Rational(q(1)),
            Base::Ext(e) => BaseElement::Ext(e.from_rational(q(1))),
        }
    }

    /// The radicand `D` (`1` for split factors).
    pub fn disc(&self) -> BaseElement {
        match &self.top {
            Top::Split => self.base_one(),
            Top::Field(d) => d.clone(),
        }
    }

    /// Checks that `r` lies in `K♮_i`.
    pub fn check_base_element(&self, r: &BaseElement) -> Result<()> {
        match (&self.base, r) {
            (Base::Ground, BaseElement::Rational(_)) => Ok(()),
            (Base::Ext(e), BaseElement::Ext(y)) if e.contains(y) => Ok(()),
            _ => Err(Error::FieldMismatch("element does not lie in the factor's base field".into())),
        }
    }

    /// `α + β√D`.
    pub fn element(&self, alpha: BaseElement, beta: BaseElement) -> Result<FactorElement> {
        self.check_base_element(&alpha)?;
        self.check_base_element(&beta)?;
        Ok(match (alpha, beta, self.disc()) {
            (BaseElement::Rational(a), BaseElement::Rational(b), BaseElement::Rational(d)) => {
                FactorElement::Tier1(Quad::new(a, b, d))
            }
            (BaseElement::Ext(a), BaseElement::Ext(b), BaseElement::Ext(d)) => FactorElement::Tier2(Quad::new(a, b, d)),
            _ => unreachable!("checked above"),
        })
    }

    /// Split-factor element with components `(s, t)`.
    pub fn from_components(&self, s: BaseElement, t: BaseElement) -> Result<FactorElement> {
        if !self.is_split() {
            return Err(Error::InvalidDatum("components given for a field factor".into()));
        }
        self.check_base_element(&s)?;
        self.check_base_element(&t)?;
        Ok(match (s, t) {
            (BaseElement::Rational(s), BaseElement::Rational(t)) => FactorElement::Tier1(Quad::from_components(&s, &t)),
            (BaseElement::Ext(s), BaseElement::Ext(t)) => FactorElement::Tier2(Quad::from_components(&s, &t)),
            _ => unreachable!("checked above"),
        })
    }

    pub fn one(&self) -> FactorElement {
        let one = self.base_one();
        let zero = match &one {
            BaseElement::Rational(_) => BaseElement::Rational(q(0)),
            BaseElement::Ext(e) => BaseElement::Ext(e.zero_like()),
        };
        self.element(one, zero).expect("well-typed")
    }

    /// `√D`; for split factors this is `(1, −1)`.
    pub fn sqrt_disc(&self) -> FactorElement {
        let one = self.one();
        let (a, b) = one.parts();
        self.element(b, a).expect("well-typed")
    }

    /// Does `y` live in this factor (right tier and radicand)?
    pub fn contains(&self, y: &FactorElement) -> bool {
        match (y, self.disc()) {
            (FactorElement::Tier1(a), BaseElement::Rational(d)) => a.disc == d,
            (FactorElement::Tier2(a), BaseElement::Ext(d)) => {
                a.disc == d && matches!(self.base, Base::Ext(e) if e.contains(&a.a) && e.contains(&a.b))
            }
            _ => false,
        }
    }

    /// An F-basis of `K_i`: components for split factors, `{e·1, e·√D}` otherwise.
    pub fn f_basis(&self) -> Vec<FactorElement> {
        let one = self.one();
        let n = self.dim_f();
        if self.is_split() {
            let h = n / 2;
            let unit = |i: usize| {
                let mut c = vec![q(0); h];
                c[i] = q(1);
                c
            };
            let base_from = |c: Vec<Q>| match self.base {
                Base::Ground => BaseElement::Rational(c[0].clone()),
                Base::Ext(e) => BaseElement::Ext(e.element(c[0].clone(), c[1].clone())),
            };
            let zero = base_from(vec![q(0); h]);
            let mut out = Vec::with_capacity(n);
            for i in 0..h {
                out.push(self.from_components(base_from(unit(i)), zero.clone()).expect("split"));
            }
            for i in 0..h {
                out.push(self.from_components(zero.clone(), base_from(unit(i))).expect("split"));
            }
            out
        } else {
            (0..n)
                .map(|i| {
                    let mut c = vec![q(0); n];
                    c[i] = q(1);
                    one.with_q_coords(&c)
                })
                .collect()
        }
    }

    /// Coordinates of `y` in [`f_basis`](Self::f_basis).
    pub fn f_coords(&self, y: &FactorElement) -> Vec<Q> {
        if self.is_split() {
            let (s, t) = y.components();
            let flat = |b: BaseElement| match b {
                BaseElement::Rational(r) => vec![r],
                BaseElement::Ext(e) => vec![e.a, e.b],
            };
            let mut v = flat(s);
            v.extend(flat(t));
            v
        } else {
            y.q_coords()
        }
    }

    /// Is `r ∈ K♮_i^×` a norm from `K_i`?
    pub fn is_norm(&self, field: LocalField, r: &BaseElement) -> Result<bool> {
        Ok(self.norm_residue_symbol(field, r)?.is_plus())
    }

    /// `(r, D)_{K♮_i}`: the quadratic character of `K_i|K♮_i` at `r` (trivial if split).
    pub fn norm_residue_symbol(&self, field: LocalField, r: &BaseElement) -> Result<Sign> {
        self.check_base_element(r)?;
        if r.is_nil() {
            return Err(Error::ZeroInput);
        }
        match (&self.top, &self.base, r) {
            (Top::Split, _, _) => Ok(Sign::Plus),
            (Top::Field(BaseElement::Rational(d)), Base::Ground, BaseElement::Rational(r)) => {
                hilbert_symbol_q(field, r, d)
            }
            (Top::Field(BaseElement::Ext(d)), Base::Ext(e), BaseElement::Ext(r)) => ext_hilbert_symbol(e, r, d),
            _ => Err(Error::FieldMismatch("inconsistent factor".into())),
        }
    }

    /// `sgn_{K_i|K♮_i}(c)` for `c ∈ F^×`.
    pub fn sgn(&self, field: LocalField, c: &Q) -> Result<Sign> {
        let r = match self.base {
            Base::Ground => BaseElement::Rational(c.clone()),
            Base::Ext(e) => BaseElement::Ext(e.from_rational(c.clone())),
        };
        self.norm_residue_symbol(field, &r)
    }

    /// Canonical representatives of `K♮^×/K♮^×²`, used to find norm non-residues.
    fn base_class_reps(&self, field: LocalField) -> Vec<BaseElement> {
        match self.base {
            Base::Ground => field.canonical_reps().into_iter().map(|r| BaseElement::Rational(q(r))).collect(),
            Base::Ext(e) => e.square_class_reps().into_iter().map(BaseElement::Ext).collect(),
        }
    }

    fn validate(&self, field: LocalField) -> Result<()> {
        if let Base::Ext(e) = self.base {
            if e.base() != field {
                return Err(Error::FieldMismatch(format!("extension {e} is not over {field}")));
            }
        }
        if let Top::Field(d) = &self.top {
            self.check_base_element(d)?;
            if d.is_nil() {
                return Err(Error::ZeroInput);
            }
            let trivial = match (&self.base, d) {
                (Base::Ground, BaseElement::Rational(d)) => square_class(field, d)?.is_trivial(),
                (Base::Ext(e), BaseElement::Ext(d)) => ext_square_class(e, d)?.is_trivial(),
                _ => unreachable!("checked above"),
            };
            if trivial {
                return Err(Error::InvalidDatum(format!("D = {d} is a square in the base field")));
            }
        }
        Ok(())
    }
}

/// Which of the three kinds of datum: stable (no `c`), symplectic (`τ(c) = −c`)
/// or odd orthogonal (`τ(c) = c`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    Stable,
    Sp,
    So,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub shape: InvolutiveFactor,
    pub x: FactorElement,
    pub c: Option<FactorElement>,
}

/// `(K, K♮, x, c)` with `K = Π K_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDatum {
    field: LocalField,
    kind: DatumKind,
    factors: Vec<Factor>,
}

impl ClassDatum {
    /// Validates everything except regularity (see [`check_regular`]).
    pub fn new(field: LocalField, kind: DatumKind, factors: Vec<Factor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            let bad = |m: &str| Error::InvalidDatum(format!("factor {i}: {m}"));
            f.shape.validate(field)?;
            if !f.shape.contains(&f.x) {
                return Err(bad("x does not lie in K_i"));
            }
            if !f.x.mul(&f.x.tau()).is_one() {
                return Err(bad("x·τ(x) ≠ 1"));
            }
            match (kind, &f.c) {
                (DatumKind::Stable, None) => {}
                (DatumKind::Stable, Some(_)) => return Err(bad("stable data carry no c")),
                (_, None) => return Err(bad("missing c")),
                (k, Some(c)) => {
                    if !f.shape.contains(c) {
                        return Err(bad("c does not lie in K_i"));
                    }
                    if c.inv().is_none() {
                        return Err(bad("c is not invertible"));
                    }
                    let want = if k == DatumKind::Sp { c.neg() } else { c.clone() };
                    if c.tau() != want {
                        return Err(bad(if k == DatumKind::Sp { "τ(c) ≠ −c" } else { "τ(c) ≠ c" }));
                    }
                }
            }
        }
        Ok(ClassDatum { field, kind, factors })
    }

    pub fn field(&self) -> LocalField {
        self.field
    }

    pub fn kind(&self) -> DatumKind {
        self.kind
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// `dim_F K`.
    pub fn dim_f(&self) -> usize {
        self.factors.iter().map(|f| f.shape.dim_f()).sum()
    }

    /// Half the dimension: the `n` of `Sp(2n)` / `SO(2n+1)`.
    pub fn n(&self) -> usize {
        self.dim_f() / 2
    }

    pub fn max_tier(&self) -> u8 {
        self.factors.iter().map(|f| f.shape.tier()).max().unwrap_or(1)
    }

    /// Forgets `c`.
    pub fn stable(&self) -> ClassDatum {
        ClassDatum {
            field: self.field,
            kind: DatumKind::Stable,
            factors: self.factors.iter().map(|f| Factor { c: None, ..f.clone() }).collect(),
        }
    }

    /// Replaces the `c`-data (validated).
    pub fn with_c(&self, kind: DatumKind, c: Vec<FactorElement>) -> Result<ClassDatum> {
        if c.len() != self.factors.len() {
            return Err(Error::DimensionMismatch("one c per factor expected".into()));
        }
        let factors = self.factors.iter().zip(c).map(|(f, c)| Factor { c: Some(c), ..f.clone() }).collect();
        ClassDatum::new(self.field, kind, factors)
    }

    /// Short human-readable fingerprint.
    pub fn digest(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| {
                let top = match &f.shape.top {
                    Top::Split => "split".to_string(),
                    Top::Field(d) => format!("D={d}"),
                };
                let base = match f.shape.base {
                    Base::Ground => "F".to_string(),
                    Base::Ext(e) => e.to_string(),
                };
                format!("[{base};{top};x={}]", f.x)
            })
            .collect();
        format!("{}:{}", self.field, parts.join(""))
    }
}

/// `K = F[x]`: the powers `1, x, …, x^{N−1}` span `K` (`N = dim_F K`).
pub fn check_regular(d: &ClassDatum) -> bool {
    let n = d.dim_f();
    if n == 0 {
        return true;
    }
    let cols: Vec<Vec<Q>> = (0..n)
        .map(|k| d.factors.iter().flat_map(|f| f.x.pow(k).q_coords()).collect())
        .collect();
    Matrix::from_columns(&cols).rank() == n
}

/// Minimal polynomial of `y` over `F`, as `(deg, [c_0..c_{deg−1}])` with
/// `y^deg = Σ c_j y^j`.
pub fn minimal_polynomial(y: &FactorElement) -> (usize, Vec<Q>) {
    let n = y.q_coords().len();
    let mut cols = vec![y.one_like().q_coords()];
    for k in 1..=n {
        let next = y.pow(k).q_coords();
        if let Some(sol) = Matrix::from_columns(&cols).solve(&next) {
            return (k, sol);
        }
        cols.push(next);
    }
    unreachable!("Cayley–Hamilton bounds the degree by the dimension")
}

/// ω with `ω / τ(ω) = x`.
pub fn hilbert90_witness(shape: &InvolutiveFactor, x: &FactorElement) -> Result<FactorElement> {
    if shape.is_split() {
        let (t, _) = x.components();
        shape.from_components(t, shape.one().parts().0)
    } else {
        if x.is_minus_one() {
            return Err(Error::DegenerateWitness);
        }
        Ok(x.one_like().add(x))
    }
}

pub fn witnesses(d: &ClassDatum) -> Result<Vec<FactorElement>> {
    d.factors.iter().map(|f| hilbert90_witness(&f.shape, &f.x)).collect()
}

/// `N_{K|F}(y)` for `y = (y_i)`.
pub fn norm_to_f(d: &ClassDatum, y: &[FactorElement]) -> Result<Q> {
    if y.len() != d.factors.len() {
        return Err(Error::DimensionMismatch("one element per factor expected".into()));
    }
    let mut n = q(1);
    for (f, e) in d.factors.iter().zip(y) {
        if !f.shape.contains(e) {
            return Err(Error::FieldMismatch("element does not lie in its factor".into()));
        }
        n *= e.norm_q();
    }
    if n.is_nil() {
        return Err(Error::ZeroInput);
    }
    Ok(n)
}

/// `N_{K_i|K♮_i}(y_i)` per factor.
pub fn norm_to_knat(d: &ClassDatum, y: &[FactorElement]) -> Result<Vec<BaseElement>> {
    if y.len() != d.factors.len() {
        return Err(Error::DimensionMismatch("one element per factor expected".into()));
    }
    y.iter()
        .map(|e| {
            let n = e.norm_to_base();
            if n.is_nil() {
                Err(Error::ZeroInput)
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// Transports `y ∈ K_1 = F[x1]` to `K_2 = F[x2]` along `x1 ↦ x2`
/// (the minimal polynomials are assumed equal).
fn transport(y: &FactorElement, x1: &FactorElement, x2: &FactorElement) -> Option<FactorElement> {
    let n = x1.q_coords().len();
    let cols: Vec<Vec<Q>> = (0..n).map(|k| x1.pow(k).q_coords()).collect();
    let coef = Matrix::from_columns(&cols).solve(&y.q_coords())?;
    let mut out = x2.embed(&q(0));
    for (k, c) in coef.iter().enumerate() {
        if !c.is_nil() {
            out = out.add(&x2.pow(k).mul(&x2.embed(c)));
        }
    }
    Some(out)
}

fn factors_match(field: LocalField, kind: DatumKind, f1: &Factor, f2: &Factor) -> Result<bool> {
    if f1.shape.dim_f() != f2.shape.dim_f() || minimal_polynomial(&f1.x) != minimal_polynomial(&f2.x) {
        return Ok(false);
    }
    if kind == DatumKind::Stable {
        return Ok(true);
    }
    let (c1, c2) = (f1.c.as_ref().expect("validated"), f2.c.as_ref().expect("validated"));
    let Some(image) = transport(c1, &f1.x, &f2.x) else {
        return Ok(false);
    };
    let ratio = image.div(c2).expect("c invertible");
    debug_assert!(ratio.is_in_base());
    f2.shape.is_norm(field, &ratio.parts().0)
}

/// Are two data isomorphic as `(K, τ, x, c mod N(K^×))`?
pub fn equivalent(d1: &ClassDatum, d2: &ClassDatum) -> Result<bool> {
    if d1.kind != d2.kind {
        return Err(Error::ConventionMismatch);
    }
    if d1.field != d2.field || d1.dim_f() != d2.dim_f() || d1.factors.len() != d2.factors.len() {
        return Ok(false);
    }
    let n = d1.factors.len();
    let mut ok = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            ok[i][j] = factors_match(d1.field, d1.kind, &d1.factors[i], &d2.factors[j])?;
        }
    }
    fn search(i: usize, used: &mut [bool], ok: &[Vec<bool>]) -> bool {
        if i == ok.len() {
            return true;
        }
        for j in 0..ok.len() {
            if ok[i][j] && !used[j] {
                used[j] = true;
                if search(i + 1, used, ok) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    Ok(search(0, &mut vec![false; n], &ok))
}

/// One representative per class of `c` over the stable datum `s`:
/// `c⁰ = √D` (sp) or `1` (so), times a norm non-residue on field factors.
pub fn enumerate_c_classes(s: &ClassDatum, kind: DatumKind) -> Result<Vec<ClassDatum>> {
    if kind == DatumKind::Stable {
        return Err(Error::ConventionMismatch);
    }
    let mut per_factor: Vec<Vec<FactorElement>> = Vec::new();
    for f in &s.factors {
        let c0 = if kind == DatumKind::Sp { f.shape.sqrt_disc() } else { f.shape.one() };
        let mut opts = vec![c0.clone()];
        if !f.shape.is_split() {
            let mut nonres = None;
            for r in f.shape.base_class_reps(s.field) {
                if !f.shape.is_norm(s.field, &r)? {
                    nonres = Some(r);
                    break;
                }
            }
            let r = nonres.expect("local class field theory: a nonsplit quadratic extension has non-norms");
            opts.push(c0.scale_base(&r)?);
        }
        per_factor.push(opts);
    }
    let mut out = vec![Vec::new()];
    for opts in per_factor {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<FactorElement>| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|c| s.stable().with_c(kind, c)).collect()
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseJson {
    Rational(String),
    Ext([String; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopJson {
    Split { split: bool },
    Field {
        #[serde(rename = "D")]
        d: BaseJson,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub base: String,
    pub top: TopJson,
    pub x: [BaseJson; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[BaseJson; 2]>,
}

/// Wire format. Split-factor elements are given by their components, field-factor
/// elements by `(α, β)` meaning `α + β√D`; tier-2 base elements are `[a, b]`
/// meaning `a + b√d` in `E = F(√d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumJson {
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<DatumKind>,
    pub factors: Vec<FactorJson>,
}

fn base_from_json(base: &Base, v: &BaseJson) -> Result<BaseElement> {
    match (base, v) {
        (Base::Ground, BaseJson::Rational(s)) => Ok(BaseElement::Rational(parse_q(s)?)),
        (Base::Ext(e), BaseJson::Ext([a, b])) => Ok(BaseElement::Ext(e.element(parse_q(a)?, parse_q(b)?))),
        (Base::Ext(e), BaseJson::Rational(s)) => Ok(BaseElement::Ext(e.from_rational(parse_q(s)?))),
        (Base::Ground, BaseJson::Ext(_)) => Err(Error::Parse("pair given for a ground-field element".into())),
    }
}

fn base_to_json(b: &BaseElement) -> BaseJson {
    match b {
        BaseElement::Rational(r) => BaseJson::Rational(fmt_q(r)),
        BaseElement::Ext(e) => BaseJson::Ext([fmt_q(&e.a), fmt_q(&e.b)]),
    }
}

fn elem_from_json(shape: &InvolutiveFactor, v: &[BaseJson; 2]) -> Result<FactorElement> {
    let a = base_from_json(&shape.base, &v[0])?;
    let b = base_from_json(&shape.base, &v[1])?;
    if shape.is_split() {
        shape.from_components(a, b)
    } else {
        shape.element(a, b)
    }
}

fn elem_to_json(shape: &InvolutiveFactor, y: &FactorElement) -> [BaseJson; 2] {
    let (a, b) = if shape.is_split() { y.components() } else { y.parts() };
    [base_to_json(&a), base_to_json(&b)]
}

impl TryFrom<DatumJson> for ClassDatum {
    type Error = Error;
    fn try_from(j: DatumJson) -> Result<Self> {
        let field: LocalField = j.field.parse()?;
        let mut factors = Vec::new();
        for f in &j.factors {
            let base = if f.base == j.field || f.base == "F" {
                Base::Ground
            } else {
                Base::Ext(f.base.parse()?)
            };
            let top = match &f.top {
                TopJson::Split { split: true } => Top::Split,
                TopJson::Split { split: false } => {
                    return Err(Error::Parse("top must be {\"split\": true} or {\"D\": ...}".into()))
                }
                TopJson::Field { d } => Top::Field(base_from_json(&base, d)?),
            };
            let shape = InvolutiveFactor { base, top };
            shape.validate(field)?;
            let x = elem_from_json(&shape, &f.x)?;
            let c = f.c.as_ref().map(|c| elem_from_json(&shape, c)).transpose()?;
            factors.push(Factor { shape, x, c });
        }
        let kind = match j.kind {
            Some(k) => k,
            None => match factors.first().and_then(|f| f.c.as_ref()) {
                None => DatumKind::Stable,
                Some(c) if c.tau() == c.neg() => DatumKind::Sp,
                Some(_) => DatumKind::So,
            },
        };
        ClassDatum::new(field, kind, factors)
    }
}

impl From<&ClassDatum> for DatumJson {
    fn from(d: &ClassDatum) -> Self {
        DatumJson {
            field: d.field.to_string(),
            kind: Some(d.kind),
            factors: d
                .factors
                .iter()
                .map(|f| FactorJson {
                    base: match f.shape.base {
                        Base::Ground => d.field.to_string(),
                        Base::Ext(e) => e.to_string(),
                    },
                    top: match &f.shape.top {
                        Top::Split => TopJson::Split { split: true },
                        Top::Field(dd) => TopJson::Field { d: base_to_json(dd) },
                    },
                    x: elem_to_json(&f.shape, &f.x),
                    c: f.c.as_ref().map(|c| elem_to_json(&f.shape, c)),
                })
                .collect(),
        }
    }
}

impl Serialize for ClassDatum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatumJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassDatum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ClassDatum::try_from(DatumJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
