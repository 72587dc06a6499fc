//! Spinor norms of regular semisimple elements of `SO(2n+1)`: the norm formula
//! `SN = N_{K|F}(ω)` and an independent reflection decomposition on an explicit
//! quadratic space.

use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::error::{Error, Result};
use crate::etale::{norm_to_f, witnesses, ClassDatum, DatumKind};
use crate::linalg::{add_vec, bilinear, sub_vec, Matrix};
use crate::localfield::{hilbert_symbol, square_class, Sign, SquareClass};

/// `V = ⊕ K_i ⊕ F` with `q(v) = Σ Tr_{K_i|F}(c_i v_i τ(v_i)) + v₀²`,
/// and the action of `x` (identity on the line).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSpaceRealization {
    pub gram: Matrix,
    pub action: Matrix,
}

/// `N_{K|F}(ω)` for the standard Hilbert-90 witnesses of `d`.
pub fn spinor_norm_value(d: &ClassDatum) -> Result<Q> {
    let w = witnesses(d)?;
    norm_to_f(d, &w)
}

/// Class of `N_{K|F}(ω)` in `F^×/F^×²`; `c` is never consulted.
pub fn spinor_norm_formula(d: &ClassDatum) -> Result<SquareClass> {
    square_class(d.field(), &spinor_norm_value(d)?)
}

pub fn realize_quadratic_space(d: &ClassDatum) -> Result<QuadraticSpaceRealization> {
    if d.kind() != DatumKind::So {
        return Err(Error::ConventionMismatch);
    }
    let mut grams = Vec::new();
    let mut actions = Vec::new();
    for f in d.factors() {
        let c = f.c.as_ref().expect("validated SO datum");
        let basis = f.shape.f_basis();
        let n = basis.len();
        let mut g = Matrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                g[(j, k)] = c.mul(&basis[j]).mul(&basis[k].tau()).trace_q();
            }
        }
        let cols: Vec<Vec<Q>> = basis.iter().map(|b| f.shape.f_coords(&f.x.mul(b))).collect();
        grams.push(g);
        actions.push(Matrix::from_columns(&cols));
    }
    grams.push(Matrix::identity(1));
    actions.push(Matrix::identity(1));
    let r = QuadraticSpaceRealization { gram: Matrix::direct_sum(&grams), action: Matrix::direct_sum(&actions) };
    r.check()?;
    Ok(r)
}

impl QuadraticSpaceRealization {
    /// `AᵀGA = G`, `det A = 1`, `G` symmetric and non-degenerate.
    pub fn check(&self) -> Result<()> {
        let (g, a) = (&self.gram, &self.action);
        if !g.is_symmetric() || g.det() == q(0) {
            return Err(Error::InvalidDatum("gram matrix is not a non-degenerate symmetric form".into()));
        }
        if a.transpose().mul(g).mul(a) != *g {
            return Err(Error::InvalidDatum("action is not an isometry".into()));
        }
        if a.det() != q(1) {
            return Err(Error::InvalidDatum("action has determinant ≠ 1".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    fn qf(&self, v: &[Q]) -> Q {
        bilinear(&self.gram, v, v)
    }
}

/// An orthogonal basis of anisotropic vectors (Gram–Schmidt; when all remaining
/// vectors are isotropic, `v + w` with `B(v, w) ≠ 0` is used).
fn orthogonal_basis(g: &Matrix) -> Vec<Vec<Q>> {
    let n = g.rows();
    let mut rest: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut e = vec![q(0); n];
            e[i] = q(1);
            e
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    while !rest.is_empty() {
        let (v, drop) = match rest.iter().position(|v| bilinear(g, v, v) != q(0)) {
            Some(i) => (rest[i].clone(), i),
            None => {
                let (i, j) = (0..rest.len())
                    .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| bilinear(g, &rest[i], &rest[j]) != q(0))
                    .expect("non-degenerate form has a non-orthogonal pair");
                (add_vec(&rest[i], &rest[j]), i)
            }
        };
        rest.remove(drop);
        let qv = bilinear(g, &v, &v);
        rest = rest
            .into_iter()
            .map(|w| {
                let t = bilinear(g, &w, &v) / &qv;
                w.iter().zip(&v).map(|(a, b)| a - &t * b).collect::<Vec<Q>>()
            })
            .collect();
        out.push(v);
    }
    out
}

/// Reflection `s_w(v) = v − 2B(v,w)/q(w) · w`.
fn reflect(g: &Matrix, w: &[Q], v: &[Q]) -> Vec<Q> {
    let t = q(2) * bilinear(g, v, w) / bilinear(g, w, w);
    v.iter().zip(w).map(|(a, b)| a - &t * b).collect()
}

/// Writes the action as a product of reflections and returns their vectors.
pub fn reflection_decomposition(r: &QuadraticSpaceRealization) -> Vec<Vec<Q>> {
    let g = &r.gram;
    let basis = orthogonal_basis(g);
    // h = s_{w_k} ⋯ s_{w_1} ∘ A, driven to the identity on e_1, e_2, … in turn.
    let mut images: Vec<Vec<Q>> = basis.iter().map(|e| r.action.apply(e)).collect();
    let mut refl = Vec::new();
    for (i, e) in basis.iter().enumerate() {
        let a = images[i].clone();
        if a == *e {
            continue;
        }
        let diff = sub_vec(&a, e);
        let steps: Vec<Vec<Q>> = if r.qf(&diff) != q(0) {
            vec![diff]
        } else {
            // q(a − e) + q(a + e) = 4 q(e) ≠ 0
            vec![add_vec(&a, e), e.clone()]
        };
        for w in steps {
            for img in images.iter_mut() {
                *img = reflect(g, &w, img);
            }
            refl.push(w);
        }
        debug_assert_eq!(images[i], *e);
    }
    refl
}

/// Product of `q(w)` over a reflection decomposition, as a rational.
pub fn spinor_norm_reflections_value(r: &QuadraticSpaceRealization) -> Q {
    reflection_decomposition(r).iter().map(|w| r.qf(w)).product()
}

/// Spinor norm by reflection decomposition, computed over ℚ and mapped into `F`.
pub fn spinor_norm_reflections(field: crate::localfield::LocalField, r: &QuadraticSpaceRealization) -> SquareClass {
    square_class(field, &spinor_norm_reflections_value(r)).expect("product of anisotropic norms is nonzero")
}

/// Reflection-oracle spinor norm of a datum; stable data are given `c = 1`.
pub fn spinor_norm_oracle(d: &ClassDatum) -> Result<SquareClass> {
    let so = match d.kind() {
        DatumKind::So => d.clone(),
        DatumKind::Stable => {
            d.with_c(DatumKind::So, d.factors().iter().map(|f| f.shape.one()).collect())?
        }
        DatumKind::Sp => return Err(Error::ConventionMismatch),
    };
    Ok(spinor_norm_reflections(d.field(), &realize_quadratic_space(&so)?))
}

/// `s_c(γ) = (c, SN(γ))_F`.
pub fn s_c_character(c: &SquareClass, d: &ClassDatum) -> Result<Sign> {
    Ok(hilbert_symbol(c, &spinor_norm_formula(d)?))
}

/// `s!_c(γ′, γ″) = (c, SN(γ′))_F · (c, SN(γ″))_F`.
pub fn s_shriek_c(c: &SquareClass, gamma_prime: &ClassDatum, gamma_double_prime: &ClassDatum) -> Result<Sign> {
    Ok(s_c_character(c, gamma_prime)? * s_c_character(c, gamma_double_prime)?)
}
