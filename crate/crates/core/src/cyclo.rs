//! Exact arithmetic in ℚ(ζ₈), basis `1, ζ, ζ², ζ³` with `ζ⁴ = −1`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_q, parse_q, q, qf, Q};
use crate::localfield::RootOfUnity8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclo8 {
    c: [Q; 4],
}

impl Cyclo8 {
    pub fn new(c: [Q; 4]) -> Self {
        Cyclo8 { c }
    }

    pub fn zero() -> Self {
        Cyclo8 { c: [Q::zero(), Q::zero(), Q::zero(), Q::zero()] }
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn rational(r: Q) -> Self {
        Cyclo8 { c: [r, Q::zero(), Q::zero(), Q::zero()] }
    }

    /// `ζ^k`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut z = Self::zero();
        if k < 4 {
            z.c[k] = Q::one();
        } else {
            z.c[k - 4] = -Q::one();
        }
        z
    }

    pub fn root(r: RootOfUnity8) -> Self {
        Self::zeta_pow(r.exponent() as i64)
    }

    /// `√2 = ζ − ζ³`.
    pub fn sqrt2() -> Self {
        Cyclo8 { c: [Q::zero(), Q::one(), Q::zero(), -Q::one()] }
    }

    pub fn coords(&self) -> &[Q; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        Cyclo8 { c: std::array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cyclo8 { c: std::array::from_fn(|i| &self.c[i] - &o.c[i]) }
    }

    pub fn scale(&self, r: &Q) -> Self {
        Cyclo8 { c: std::array::from_fn(|i| &self.c[i] * r) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                let t = &self.c[i] * &o.c[j];
                let k = i + j;
                if k < 4 {
                    out.c[k] += t;
                } else {
                    out.c[k - 4] -= t;
                }
            }
        }
        out
    }

    pub fn half(&self) -> Self {
        self.scale(&qf(1, 2))
    }

    /// The exponent `k` with `self = ζ^k`, if any.
    pub fn as_root(&self) -> Option<RootOfUnity8> {
        (0..8).find(|&k| Self::zeta_pow(k) == *self).map(RootOfUnity8::new)
    }
}

impl fmt::Display for Cyclo8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| match i {
                0 => fmt_q(x),
                1 => format!("{}*z", fmt_q(x)),
                _ => format!("{}*z^{i}", fmt_q(x)),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Serialize for Cyclo8 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.c.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclo8 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // A bare string is a rational coefficient.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rational(String),
            Coords(Vec<String>),
        }
        let v = match Repr::deserialize(d)? {
            Repr::Rational(s) => vec![s],
            Repr::Coords(v) => v,
        };
        if v.len() > 4 {
            return Err(serde::de::Error::custom("at most 4 coordinates in Q(zeta8)"));
        }
        let mut c = Cyclo8::zero();
        for (i, s) in v.iter().enumerate() {
            c.c[i] = parse_q(s).map_err(serde::de::Error::custom)?;
        }
        Ok(c)
    }
}
