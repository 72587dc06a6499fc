//! Elliptic endoscopic data `(n′, n″)` of `Mp(2n)` and the correspondence of
//! stable classes between `SO(2n′+1) × SO(2n″+1)` and `Sp(2n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etale::{check_regular, ClassDatum, DatumKind, Factor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EndoscopicDatum {
    pub n_prime: usize,
    pub n_double_prime: usize,
}

impl EndoscopicDatum {
    pub fn n(&self) -> usize {
        self.n_prime + self.n_double_prime
    }
}

/// All `(n′, n″)` with `n′ + n″ = n`, lexicographically.
pub fn enumerate_elliptic_data(n: usize) -> Vec<EndoscopicDatum> {
    (0..=n).map(|k| EndoscopicDatum { n_prime: k, n_double_prime: n - k }).collect()
}

/// Which side of the endoscopic group a factor of `K` is sent to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Prime,
    #[serde(rename = "doubleprime")]
    DoublePrime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondencePair {
    pub delta: ClassDatum,
    pub partition: Vec<Side>,
    pub datum: EndoscopicDatum,
    /// `(K′, x′)`.
    pub gamma_prime: ClassDatum,
    /// `(K″, −x″)`.
    pub gamma_double_prime: ClassDatum,
}

fn side_datum(delta: &ClassDatum, partition: &[Side], side: Side, negate: bool) -> Result<ClassDatum> {
    let factors: Vec<Factor> = delta
        .factors()
        .iter()
        .zip(partition)
        .filter(|(_, s)| **s == side)
        .map(|(f, _)| Factor {
            shape: f.shape.clone(),
            x: if negate { f.x.neg() } else { f.x.clone() },
            c: None,
        })
        .collect();
    ClassDatum::new(delta.field(), DatumKind::Stable, factors)
}

/// Splits `δ` along `partition`; the `x`-datum of the second side is negated.
pub fn split_correspondence(
    delta: &ClassDatum,
    partition: &[Side],
    declared: Option<EndoscopicDatum>,
) -> Result<CorrespondencePair> {
    if partition.len() != delta.factors().len() {
        return Err(Error::DimensionMismatch(format!(
            "partition has {} entries for {} factors",
            partition.len(),
            delta.factors().len()
        )));
    }
    if !check_regular(delta) {
        return Err(Error::NotRegular);
    }
    let gamma_prime = side_datum(delta, partition, Side::Prime, false)?;
    let gamma_double_prime = side_datum(delta, partition, Side::DoublePrime, true)?;
    let datum = EndoscopicDatum { n_prime: gamma_prime.n(), n_double_prime: gamma_double_prime.n() };
    if let Some(d) = declared {
        if d != datum {
            return Err(Error::DimensionMismatch(format!(
                "partition gives (n′, n″) = ({}, {}), declared ({}, {})",
                datum.n_prime, datum.n_double_prime, d.n_prime, d.n_double_prime
            )));
        }
    }
    if !check_regular(&gamma_double_prime) {
        return Err(Error::NotRegular);
    }
    Ok(CorrespondencePair { delta: delta.clone(), partition: partition.to_vec(), datum, gamma_prime, gamma_double_prime })
}

/// Reassembles `δ`'s stable datum from `(γ′, γ″)`, undoing the sign on `γ″`.
pub fn reassemble(gamma_prime: &ClassDatum, gamma_double_prime: &ClassDatum) -> Result<ClassDatum> {
    if gamma_prime.field() != gamma_double_prime.field() {
        return Err(Error::FieldMismatch("γ′ and γ″ over different fields".into()));
    }
    let mut factors: Vec<Factor> = gamma_prime.stable().factors().to_vec();
    factors.extend(
        gamma_double_prime.stable().factors().iter().map(|f| Factor { x: f.x.neg(), ..f.clone() }),
    );
    ClassDatum::new(gamma_prime.field(), DatumKind::Stable, factors)
}

/// Is `γ = (γ′, γ″)` G-regular, i.e. does it come from a regular `δ`?
pub fn is_g_regular(gamma_prime: &ClassDatum, gamma_double_prime: &ClassDatum) -> bool {
    reassemble(gamma_prime, gamma_double_prime).is_ok_and(|d| check_regular(&d))
}

/// All partitions of the factors of `δ`, in binary-counting order.
pub fn all_partitions(num_factors: usize) -> Vec<Vec<Side>> {
    (0..1usize << num_factors)
        .map(|mask| {
            (0..num_factors)
                .map(|i| if mask >> i & 1 == 1 { Side::DoublePrime } else { Side::Prime })
                .collect()
        })
        .collect()
}

/// Labels of the tori `K_i¹` making up the centralizer.
pub fn centralizer_descriptor(d: &ClassDatum) -> Vec<String> {
    d.factors()
        .iter()
        .map(|f| if f.shape.is_split() { "GL(1) over K♮".to_string() } else { "ker N_{K|K♮}".to_string() })
        .collect()
}
