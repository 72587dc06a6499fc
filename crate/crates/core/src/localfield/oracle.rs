//! Brute-force conic solvability: `(a, b)_F = +1` iff `z² = a x² + b y²` has a
//! nontrivial solution. Independent of the closed formulas in the parent module.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{LocalField, Sign};
use crate::arith::{bigint_mod, mul_mod, Q};
use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 26;

/// Integer in the same square class, with the even part of its p-adic valuation removed.
fn reduce(x: &Q, p: u64) -> BigInt {
    let mut n = x.numer() * x.denom();
    let pp = BigInt::from(p * p);
    while !n.is_zero() && (&n % &pp).is_zero() {
        n /= &pp;
    }
    n
}

fn val(n: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// The Hensel-sufficient depth `v_p(4ab) + 3`, measured after `a`, `b` are
/// reduced to integers with p-adic valuation ≤ 1.
pub fn oracle_default_depth(field: LocalField, a: &Q, b: &Q) -> u32 {
    match field {
        LocalField::PAdic(p) => {
            let (a, b) = (reduce(a, p), reduce(b, p));
            val(&(BigInt::from(4) * a * b), p) + 3
        }
        _ => 0,
    }
}

/// Decides solvability of `z² = a x² + b y²` by exhaustive search for a
/// primitive solution modulo `p^depth` (p-adic) or by signs (ℝ).
pub fn hilbert_symbol_oracle(field: LocalField, a: &Q, b: &Q, depth: u32) -> Result<Sign> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = match field {
        LocalField::Complex => return Ok(Sign::Plus),
        LocalField::Real => return Ok(Sign::from_bool(a.is_positive() || b.is_positive())),
        LocalField::PAdic(p) => p,
    };
    let required = oracle_default_depth(field, a, b);
    if depth < required {
        return Err(Error::InsufficientDepth { given: depth, required });
    }
    let m = (p as u128).checked_pow(depth).filter(|&m| m <= MAX_MODULUS as u128).ok_or_else(|| {
        Error::Config(format!("oracle modulus {p}^{depth} exceeds {MAX_MODULUS}"))
    })? as u64;
    let (a, b) = (bigint_mod(&reduce(a, p), m), bigint_mod(&reduce(b, p), m));

    let mut squares = vec![false; m as usize];
    let mut b_squares = vec![false; m as usize];
    for z in 0..m {
        let s = mul_mod(z, z, m);
        squares[s as usize] = true;
        b_squares[mul_mod(b, s, m) as usize] = true;
    }
    // Every primitive solution can be scaled so that one coordinate is 1.
    for t in 0..m {
        let t2 = mul_mod(t, t, m);
        // x = 1: z² = a + b t²
        if squares[((a + mul_mod(b, t2, m)) % m) as usize] {
            return Ok(Sign::Plus);
        }
        // y = 1: z² = a t² + b
        if squares[((mul_mod(a, t2, m) + b) % m) as usize] {
            return Ok(Sign::Plus);
        }
        // z = 1: b y² = 1 − a t²
        if b_squares[((1 + m - mul_mod(a, t2, m)) % m) as usize] {
            return Ok(Sign::Plus);
        }
    }
    Ok(Sign::Minus)
}
