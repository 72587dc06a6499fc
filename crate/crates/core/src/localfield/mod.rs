//! Square classes and quadratic Hilbert symbols over ℝ, ℂ and ℚ_p, plus the
//! tame symbols of quadratic extensions of ℚ_p (p odd).

mod ext;
mod oracle;

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, parse_q, q, residue, unit_part, valuation, Q};
use crate::error::{Error, Result};

pub use ext::{ext_hilbert_symbol, ext_norm, ext_square_class, ExtElement, ExtField, ExtSquareClass};
pub use oracle::{hilbert_symbol_oracle, oracle_default_depth};

/// A local field of characteristic zero, as far as quadratic symbols see it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalField {
    Real,
    Complex,
    PAdic(u64),
}

impl LocalField {
    pub fn padic(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(LocalField::PAdic(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            LocalField::PAdic(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_archimedean(&self) -> bool {
        !matches!(self, LocalField::PAdic(_))
    }

    /// Least positive quadratic non-residue mod p (odd p only).
    pub fn nonresidue(&self) -> Option<i64> {
        match self {
            LocalField::PAdic(p) if *p != 2 => (2..*p).find(|&a| legendre(a, *p) == -1).map(|a| a as i64),
            _ => None,
        }
    }

    /// The canonical representatives of `F^×/F^×²`, in a fixed order.
    pub fn canonical_reps(&self) -> Vec<i64> {
        match self {
            LocalField::Complex => vec![1],
            LocalField::Real => vec![1, -1],
            LocalField::PAdic(2) => vec![1, -1, 2, -2, 5, -5, 10, -10],
            LocalField::PAdic(p) => {
                let u = self.nonresidue().expect("odd prime");
                vec![1, u, *p as i64, u * *p as i64]
            }
        }
    }

    pub fn square_classes(&self) -> Vec<SquareClass> {
        self.canonical_reps().into_iter().map(|rep| SquareClass { field: *self, rep }).collect()
    }

    pub fn one(&self) -> SquareClass {
        SquareClass { field: *self, rep: 1 }
    }

    /// Parses a square-class token: a rational, or `u`, `p`, `up` for ℚ_p.
    pub fn parse_class(&self, s: &str) -> Result<SquareClass> {
        let s = s.trim();
        let special = match (s, self) {
            ("u", LocalField::PAdic(_)) => self.nonresidue(),
            ("p", LocalField::PAdic(p)) => Some(*p as i64),
            ("up", LocalField::PAdic(p)) => self.nonresidue().map(|u| u * *p as i64),
            _ => None,
        };
        match special {
            Some(r) => square_class(*self, &q(r)),
            None if matches!(s, "u" | "p" | "up") => {
                Err(Error::Parse(format!("symbol {s:?} is not defined over {self}")))
            }
            None => square_class(*self, &parse_q(s)?),
        }
    }
}

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalField::Real => write!(f, "R"),
            LocalField::Complex => write!(f, "C"),
            LocalField::PAdic(p) => write!(f, "Qp:{p}"),
        }
    }
}

impl FromStr for LocalField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "R" => Ok(LocalField::Real),
            "C" => Ok(LocalField::Complex),
            other => {
                let p = other
                    .strip_prefix("Qp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown field descriptor {other:?}")))?;
                LocalField::padic(p)
            }
        }
    }
}

impl Serialize for LocalField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LocalField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A ±1 value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bool(plus: bool) -> Sign {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn pow(self, e: u64) -> Sign {
        if e % 2 == 0 {
            Sign::Plus
        } else {
            self
        }
    }

    pub fn product<I: IntoIterator<Item = Sign>>(it: I) -> Sign {
        it.into_iter().fold(Sign::Plus, |a, b| a * b)
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        Sign::from_bool(self == o)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be ±1, got {v}")))
    }
}

/// An exact eighth root of unity `exp(2πi·k/8)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootOfUnity8 {
    exp: u8,
}

impl RootOfUnity8 {
    pub const ONE: RootOfUnity8 = RootOfUnity8 { exp: 0 };
    pub const I: RootOfUnity8 = RootOfUnity8 { exp: 2 };
    pub const MINUS_ONE: RootOfUnity8 = RootOfUnity8 { exp: 4 };

    pub fn new(exp: i64) -> Self {
        RootOfUnity8 { exp: exp.rem_euclid(8) as u8 }
    }

    pub fn exponent(self) -> u8 {
        self.exp
    }

    pub fn inv(self) -> Self {
        Self::new(-(self.exp as i64))
    }

    pub fn pow(self, e: i64) -> Self {
        Self::new(self.exp as i64 * e.rem_euclid(8))
    }

    pub fn to_sign(self) -> Option<Sign> {
        match self.exp {
            0 => Some(Sign::Plus),
            4 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl From<Sign> for RootOfUnity8 {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => RootOfUnity8::ONE,
            Sign::Minus => RootOfUnity8::MINUS_ONE,
        }
    }
}

impl Mul for RootOfUnity8 {
    type Output = RootOfUnity8;
    fn mul(self, o: Self) -> Self {
        Self::new(self.exp as i64 + o.exp as i64)
    }
}

impl fmt::Display for RootOfUnity8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            0 => write!(f, "1"),
            2 => write!(f, "i"),
            4 => write!(f, "-1"),
            6 => write!(f, "-i"),
            k => write!(f, "zeta8^{k}"),
        }
    }
}

/// A coset `x·F^×²`, stored by its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    field: LocalField,
    rep: i64,
}

impl SquareClass {
    pub fn field(&self) -> LocalField {
        self.field
    }

    pub fn rep(&self) -> i64 {
        self.rep
    }

    pub fn rep_q(&self) -> Q {
        q(self.rep)
    }

    pub fn is_trivial(&self) -> bool {
        self.rep == 1
    }

    pub fn minus_one(field: LocalField) -> SquareClass {
        square_class(field, &q(-1)).expect("nonzero")
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;
    fn mul(self, o: SquareClass) -> SquareClass {
        assert_eq!(self.field, o.field, "square classes of different fields");
        square_class(self.field, &q(self.rep * o.rep)).expect("nonzero")
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Reduces a nonzero rational to the canonical representative of its square class.
pub fn square_class(field: LocalField, x: &Q) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let rep = match field {
        LocalField::Complex => 1,
        LocalField::Real => {
            if x.is_negative() {
                -1
            } else {
                1
            }
        }
        LocalField::PAdic(2) => {
            let v = valuation(x, 2);
            let unit = match residue(&unit_part(x, 2), 8) {
                1 => 1,
                3 => -5,
                5 => 5,
                7 => -1,
                r => unreachable!("odd residue expected, got {r}"),
            };
            if v.rem_euclid(2) == 1 {
                2 * unit
            } else {
                unit
            }
        }
        LocalField::PAdic(p) => {
            let v = valuation(x, p);
            let r = residue(&unit_part(x, p), p);
            let unit = if legendre(r, p) == 1 { 1 } else { field.nonresidue().expect("odd p") };
            if v.rem_euclid(2) == 1 {
                unit * p as i64
            } else {
                unit
            }
        }
    };
    Ok(SquareClass { field, rep })
}

/// Quadratic Hilbert symbol `(a, b)_F` by the closed formulas.
pub fn hilbert_symbol(a: &SquareClass, b: &SquareClass) -> Sign {
    assert_eq!(a.field, b.field, "Hilbert symbol of classes in different fields");
    let (x, y) = (a.rep, b.rep);
    match a.field {
        LocalField::Complex => Sign::Plus,
        LocalField::Real => Sign::from_bool(x > 0 || y > 0),
        LocalField::PAdic(2) => {
            // x = 2^α u, y = 2^β v; (-1)^{ε(u)ε(v) + α ω(v) + β ω(u)}
            let split = |r: i64| if r % 2 == 0 { (1i64, r / 2) } else { (0, r) };
            let (alpha, u) = split(x);
            let (beta, v) = split(y);
            let eps = |t: i64| (t.rem_euclid(4) == 3) as i64;
            let omega = |t: i64| (matches!(t.rem_euclid(8), 3 | 5) as i64);
            let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
            Sign::from_bool(e % 2 == 0)
        }
        LocalField::PAdic(p) => {
            // x = p^α u, y = p^β v; (-1)^{αβ(p-1)/2} (u/p)^β (v/p)^α
            let pi = p as i64;
            let split = |r: i64| if r % pi == 0 { (1u64, r / pi) } else { (0, r) };
            let (alpha, u) = split(x);
            let (beta, v) = split(y);
            let leg = |t: i64| Sign::from_bool(legendre(t.rem_euclid(pi) as u64, p) == 1);
            let tame = Sign::from_bool((alpha * beta * ((p - 1) / 2)) % 2 == 0);
            tame * leg(u).pow(beta) * leg(v).pow(alpha)
        }
    }
}

/// Hilbert symbol of two nonzero rationals viewed in `F`.
pub fn hilbert_symbol_q(field: LocalField, a: &Q, b: &Q) -> Result<Sign> {
    Ok(hilbert_symbol(&square_class(field, a)?, &square_class(field, b)?))
}

/// A quadratic étale algebra over `F`: split, or `F(√d)` for a nontrivial class `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticAlgebra {
    Split,
    Field(SquareClass),
}

/// Is `x` a norm from the quadratic étale algebra `E`?
pub fn is_norm(e: &QuadraticAlgebra, x: &SquareClass) -> bool {
    sgn_char(e, x).is_plus()
}

/// The quadratic character of `F^×` attached to `E|F` (trivial when split).
pub fn sgn_char(e: &QuadraticAlgebra, x: &SquareClass) -> Sign {
    match e {
        QuadraticAlgebra::Split => Sign::Plus,
        QuadraticAlgebra::Field(d) => hilbert_symbol(x, d),
    }
}
