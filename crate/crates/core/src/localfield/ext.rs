use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{LocalField, Sign, SquareClass};
use crate::arith::{legendre, pow_q, q, residue, valuation, Quad, Scalar, Q};
use crate::error::{Error, Result};

/// `a + b·√d` in a quadratic extension `E = ℚ_p(√d)`.
pub type ExtElement = Quad<Q>;

/// A quadratic field extension `ℚ_p(√d)`, p odd, `d` a nontrivial canonical class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtField {
    p: u64,
    disc: i64,
}

/// Label of a class in `E^×/E^×²`: parity of the valuation and whether the
/// residue of the unit part (relative to the field's fixed uniformizer) is a square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtSquareClass {
    pub odd_valuation: bool,
    pub unit_square: bool,
}

impl ExtSquareClass {
    pub fn is_trivial(&self) -> bool {
        !self.odd_valuation && self.unit_square
    }
}

impl ExtField {
    pub fn new(base: LocalField, disc: &SquareClass) -> Result<Self> {
        let p = match base {
            LocalField::PAdic(2) => {
                return Err(Error::UnsupportedTier("quadratic extensions of Q_2 are not supported".into()))
            }
            LocalField::PAdic(p) => p,
            other => return Err(Error::UnsupportedTier(format!("no tier-2 extensions over {other}"))),
        };
        if disc.field() != base {
            return Err(Error::FieldMismatch(format!("discriminant class not in {base}")));
        }
        if disc.is_trivial() {
            return Err(Error::InvalidDatum("extension discriminant must be a nonsquare".into()));
        }
        Ok(ExtField { p, disc: disc.rep() })
    }

    pub fn base(&self) -> LocalField {
        LocalField::PAdic(self.p)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn disc_q(&self) -> Q {
        q(self.disc)
    }

    pub fn is_ramified(&self) -> bool {
        self.disc % self.p as i64 == 0
    }

    /// Residue field size.
    pub fn residue_size(&self) -> u64 {
        if self.is_ramified() {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn element(&self, a: Q, b: Q) -> ExtElement {
        Quad::new(a, b, self.disc_q())
    }

    pub fn from_rational(&self, a: Q) -> ExtElement {
        Quad::from_base(a, self.disc_q())
    }

    pub fn contains(&self, y: &ExtElement) -> bool {
        y.disc == self.disc_q()
    }

    /// The fixed uniformizer: `p` if unramified, `√d` if ramified.
    pub fn uniformizer(&self) -> ExtElement {
        if self.is_ramified() {
            Quad::sqrt_disc(self.disc_q())
        } else {
            self.from_rational(q(self.p as i64))
        }
    }

    /// A unit whose residue is a nonsquare in the residue field.
    pub fn nonsquare_unit(&self) -> ExtElement {
        let u = LocalField::PAdic(self.p).nonresidue().expect("odd p");
        if self.is_ramified() {
            return self.from_rational(q(u));
        }
        let p = self.p as i64;
        (0..p)
            .map(|a| self.element(q(a), q(1)))
            .find(|y| !unit_residue_is_square(self, y))
            .expect("F_{p^2} has nonsquares")
    }

    /// Representatives `1, ε, π, επ` of `E^×/E^×²`.
    pub fn square_class_reps(&self) -> Vec<ExtElement> {
        let e = self.nonsquare_unit();
        let pi = self.uniformizer();
        vec![e.one_like(), e.clone(), pi.clone(), e.mul(&pi)]
    }

    /// Normalized valuation `v_E`.
    pub fn valuation(&self, y: &ExtElement) -> i64 {
        assert!(!y.is_nil());
        let p = self.p;
        let va = (!y.a.is_zero()).then(|| valuation(&y.a, p));
        let vb = (!y.b.is_zero()).then(|| valuation(&y.b, p));
        if self.is_ramified() {
            let ea = va.map(|v| 2 * v);
            let eb = vb.map(|v| 2 * v + 1);
            ea.into_iter().chain(eb).min().expect("nonzero")
        } else {
            va.into_iter().chain(vb).min().expect("nonzero")
        }
    }
}

fn unit_residue_is_square(e: &ExtField, y: &ExtElement) -> bool {
    residue_character(e, y).is_plus()
}

/// Quadratic character of the residue of `y / π^{v_E(y)}` in the residue field.
fn residue_character(e: &ExtField, y: &ExtElement) -> Sign {
    let p = e.p;
    let v = e.valuation(y);
    let r = if e.is_ramified() {
        let d = e.disc_q();
        let k = v.div_euclid(2);
        let dk = pow_q(&d, k);
        // Even valuation: residue of a/d^k. Odd: residue of b/d^k.
        let coeff = if v % 2 == 0 { &y.a / &dk } else { &y.b / &dk };
        residue(&coeff, p)
    } else {
        let pk = pow_q(&q(p as i64), v);
        let (a, b) = (residue(&(&y.a / &pk), p), residue(&(&y.b / &pk), p));
        let u = crate::arith::bigint_mod(&num_bigint::BigInt::from(e.disc), p);
        // x is a square in F_{p²} iff its norm to F_p is a square in F_p.
        let n = (a as u128 * a as u128 + (p as u128 - u as u128) * (b as u128 * b as u128 % p as u128))
            % p as u128;
        n as u64
    };
    Sign::from_bool(legendre(r, p) == 1)
}

fn check_member(e: &ExtField, y: &ExtElement) -> Result<()> {
    if !e.contains(y) {
        return Err(Error::FieldMismatch(format!("element does not lie in {e}")));
    }
    if y.is_nil() {
        return Err(Error::ZeroInput);
    }
    Ok(())
}

/// Class of `y` in `E^×/E^×²`.
pub fn ext_square_class(e: &ExtField, y: &ExtElement) -> Result<ExtSquareClass> {
    check_member(e, y)?;
    Ok(ExtSquareClass {
        odd_valuation: e.valuation(y).rem_euclid(2) == 1,
        unit_square: unit_residue_is_square(e, y),
    })
}

/// Tame Hilbert symbol over `E`:
/// `(-1)^{v(y1)v(y2)(q-1)/2} · χ(ū1)^{v(y2)} · χ(ū2)^{v(y1)}`.
pub fn ext_hilbert_symbol(e: &ExtField, y1: &ExtElement, y2: &ExtElement) -> Result<Sign> {
    check_member(e, y1)?;
    check_member(e, y2)?;
    let v1 = e.valuation(y1).rem_euclid(2) as u64;
    let v2 = e.valuation(y2).rem_euclid(2) as u64;
    let half = (e.residue_size() - 1) / 2;
    let tame = Sign::from_bool((v1 * v2 * half) % 2 == 0);
    Ok(tame * residue_character(e, y1).pow(v2) * residue_character(e, y2).pow(v1))
}

/// `N_{E|F}(y) = a² − d b²`.
pub fn ext_norm(y: &ExtElement) -> Q {
    y.norm()
}

impl fmt::Display for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext:Qp:{}:disc={}", self.p, self.disc)
    }
}

impl FromStr for ExtField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad extension descriptor {s:?}, expected Ext:Qp:<p>:disc=<d>"));
        let rest = s.trim().strip_prefix("Ext:").ok_or_else(bad)?;
        let (base, disc) = rest.rsplit_once(':').ok_or_else(bad)?;
        let disc = disc.strip_prefix("disc=").ok_or_else(bad)?;
        let base: LocalField = base.parse()?;
        let d = base.parse_class(disc)?;
        ExtField::new(base, &d)
    }
}

impl Serialize for ExtField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
