//! Exact rational arithmetic helpers and the quadratic-extension element type
//! used for every tower layer.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Q, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

/// `x / p^v_p(x)`.
pub fn unit_part(x: &Q, p: u64) -> Q {
    let v = valuation(x, p);
    x / pow_q(&q(p as i64), v)
}

pub fn pow_q(x: &Q, e: i64) -> Q {
    let mut r = Q::one();
    for _ in 0..e.unsigned_abs() {
        r *= x;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn bigint_mod(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    debug_assert!(e.gcd.is_one());
    bigint_mod(&e.x, m)
}

/// Residue of a rational with nonnegative p-adic valuation, modulo `m`
/// (`m` a power of `p`).
pub fn residue(x: &Q, m: u64) -> u64 {
    let n = bigint_mod(x.numer(), m);
    let d = bigint_mod(x.denom(), m);
    mul_mod(n, inv_mod(d, m), m)
}

/// Legendre symbol `(a / p)` for odd prime `p` and `a` coprime to `p`.
pub fn legendre(a: u64, p: u64) -> i8 {
    match mod_pow(a, (p - 1) / 2, p) {
        1 => 1,
        r if r == p - 1 => -1,
        _ => 0,
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Is the nonzero rational a square in Q?
pub fn is_rational_square(x: &Q) -> bool {
    if x.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &(&r * &r) == n
    };
    is_sq(x.numer()) && is_sq(x.denom())
}

/// Exact field (or étale algebra) arithmetic with a fixed underlying Q-basis.
///
/// Elements carry their own defining data (the radicand of each quadratic
/// layer), so constants are produced from an existing element.
pub trait Scalar: Clone + PartialEq + Eq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn embed(&self, r: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_nil(&self) -> bool;
    fn q_dim(&self) -> usize;
    fn q_coords(&self) -> Vec<Q>;
    fn with_q_coords(&self, c: &[Q]) -> Self;
    fn norm_q(&self) -> Q;
    fn trace_q(&self) -> Q;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }
}

impl Scalar for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn embed(&self, r: &Q) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn q_dim(&self) -> usize {
        1
    }
    fn q_coords(&self) -> Vec<Q> {
        vec![self.clone()]
    }
    fn with_q_coords(&self, c: &[Q]) -> Self {
        c[0].clone()
    }
    fn norm_q(&self) -> Q {
        self.clone()
    }
    fn trace_q(&self) -> Q {
        self.clone()
    }
}

/// `a + b·√disc` over a coefficient ring `K`. With `disc = 1` this is the
/// split algebra `K × K` via `(s, t) = (a + b, a − b)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad<K> {
    pub a: K,
    pub b: K,
    pub disc: K,
}

impl<K: Scalar> Quad<K> {
    pub fn new(a: K, b: K, disc: K) -> Self {
        Quad { a, b, disc }
    }

    /// The image of a coefficient-ring element.
    pub fn from_base(a: K, disc: K) -> Self {
        let b = a.zero_like();
        Quad { a, b, disc }
    }

    /// `√disc` itself.
    pub fn sqrt_disc(disc: K) -> Self {
        Quad { a: disc.zero_like(), b: disc.one_like(), disc }
    }

    /// Split algebra element with components `(s, t)`; requires `disc = 1`.
    pub fn from_components(s: &K, t: &K) -> Self {
        let half = s.embed(&qf(1, 2));
        Quad {
            a: s.add(t).mul(&half),
            b: s.sub(t).mul(&half),
            disc: s.one_like(),
        }
    }

    pub fn components(&self) -> (K, K) {
        (self.a.add(&self.b), self.a.sub(&self.b))
    }

    pub fn conj(&self) -> Self {
        Quad { a: self.a.clone(), b: self.b.neg(), disc: self.disc.clone() }
    }

    /// Norm to the coefficient ring: `a² − disc·b²`.
    pub fn norm(&self) -> K {
        self.a.mul(&self.a).sub(&self.disc.mul(&self.b).mul(&self.b))
    }

    pub fn is_in_base(&self) -> bool {
        self.b.is_nil()
    }
}

impl<K: Scalar> Scalar for Quad<K> {
    fn zero_like(&self) -> Self {
        Quad::from_base(self.a.zero_like(), self.disc.clone())
    }
    fn one_like(&self) -> Self {
        Quad::from_base(self.a.one_like(), self.disc.clone())
    }
    fn embed(&self, r: &Q) -> Self {
        Quad::from_base(self.a.embed(r), self.disc.clone())
    }
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.disc, o.disc);
        Quad { a: self.a.add(&o.a), b: self.b.add(&o.b), disc: self.disc.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.disc, o.disc);
        Quad { a: self.a.sub(&o.a), b: self.b.sub(&o.b), disc: self.disc.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.disc, o.disc);
        let a = self.a.mul(&o.a).add(&self.disc.mul(&self.b).mul(&o.b));
        let b = self.a.mul(&o.b).add(&self.b.mul(&o.a));
        Quad { a, b, disc: self.disc.clone() }
    }
    fn neg(&self) -> Self {
        Quad { a: self.a.neg(), b: self.b.neg(), disc: self.disc.clone() }
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        let c = self.conj();
        Some(Quad { a: c.a.mul(&n), b: c.b.mul(&n), disc: self.disc.clone() })
    }
    fn is_nil(&self) -> bool {
        self.a.is_nil() && self.b.is_nil()
    }
    fn q_dim(&self) -> usize {
        2 * self.a.q_dim()
    }
    fn q_coords(&self) -> Vec<Q> {
        let mut v = self.a.q_coords();
        v.extend(self.b.q_coords());
        v
    }
    fn with_q_coords(&self, c: &[Q]) -> Self {
        let h = self.a.q_dim();
        Quad {
            a: self.a.with_q_coords(&c[..h]),
            b: self.b.with_q_coords(&c[h..]),
            disc: self.disc.clone(),
        }
    }
    fn norm_q(&self) -> Q {
        self.norm().norm_q()
    }
    fn trace_q(&self) -> Q {
        self.a.trace_q() * q(2)
    }
}
