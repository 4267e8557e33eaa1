//! Exact shape spaces on the reference tetrahedron.
//!
//! Each space is stored as a [`RawSpace`]: fields that do not depend on the
//! cell, groups of three directional face bubbles that are combined with a
//! cell-dependent direction, and interior bubbles. On the reference cell the
//! directions are the scaled outward normals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::{ElementConfig, Field, SpaceKind};
use crate::bubbles::{
    combine_directional, directional_face_bubbles, dim_s_layer, interior_bubbles, scaled_normal,
};
use crate::error::{Error, Result};
use crate::polyalg::piecewise::split_center;
use crate::polyalg::poincare::{origin, poincare2_piecewise};
use crate::polyalg::{
    dim_p3, monomials_upto, poincare2, EchelonBasis, MonomialIndex, PiecewisePoly, PiecewiseVec,
    Poly, QMatrix, VecPoly, Q,
};

#[derive(Clone, Debug)]
pub struct RawSpace {
    pub kind: SpaceKind,
    pub config: ElementConfig,
    pub fixed: Vec<Field>,
    /// Directional generators `[g_{i,0}, g_{i,1}, g_{i,2}]` for each face `i`;
    /// the shape function is `Σ_c d_c g_{i,c}` for a face direction `d`.
    pub face_groups: Vec<[PiecewiseVec; 3]>,
    pub interior: Vec<Field>,
}

impl RawSpace {
    pub fn dim(&self) -> usize {
        self.fixed.len() + self.face_groups.len() + self.interior.len()
    }

    /// Basis for the given face directions, ordered fixed, faces, interior.
    pub fn basis(&self, dirs: &[[Q; 3]; 4]) -> Vec<Field> {
        let mut out = self.fixed.clone();
        for (g, d) in self.face_groups.iter().zip(dirs) {
            out.push(Field::Vector(combine_directional(g, d)));
        }
        out.extend(self.interior.iter().cloned());
        out
    }

    pub fn reference_basis(&self) -> Vec<Field> {
        self.basis(&reference_directions())
    }

    pub fn max_degree(&self) -> usize {
        let g = self
            .face_groups
            .iter()
            .flat_map(|g| g.iter())
            .filter_map(PiecewiseVec::degree)
            .max()
            .unwrap_or(0);
        self.fixed
            .iter()
            .chain(&self.interior)
            .map(Field::degree)
            .max()
            .unwrap_or(0)
            .max(g)
    }
}

/// Scaled outward normals of the reference faces.
pub fn reference_directions() -> [[Q; 3]; 4] {
    std::array::from_fn(scaled_normal)
}

pub fn expected_dim(kind: SpaceKind, c: ElementConfig) -> usize {
    let (r, k) = (c.r as i64, c.k as i64);
    match kind {
        SpaceKind::Sigma => dim_p3(r),
        SpaceKind::W => dim_p3(k - 1),
        SpaceKind::SigmaPlus => match c.k {
            1 => 16,
            2 => 37,
            _ => 3 * dim_p3(k) + dim_s_layer(c.k - 1),
        },
        SpaceKind::V => {
            expected_dim(SpaceKind::SigmaPlus, c) + expected_dim(SpaceKind::Sigma, c)
                - expected_dim(SpaceKind::W, c)
                - 1
        }
    }
}

/// Cached raw space for a kind and configuration.
pub fn raw_space(kind: SpaceKind, config: ElementConfig) -> Result<Arc<RawSpace>> {
    static CACHE: OnceLock<Mutex<HashMap<(SpaceKind, ElementConfig), Arc<RawSpace>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("space cache").get(&(kind, config)) {
        return Ok(s.clone());
    }
    let space = Arc::new(match kind {
        SpaceKind::Sigma => sigma(config),
        SpaceKind::W => w_space(config),
        SpaceKind::SigmaPlus => sigma_plus(config)?,
        SpaceKind::V => v_space(config)?,
    });
    let expected = expected_dim(kind, config);
    if space.dim() != expected {
        return Err(Error::Dimension {
            what: format!("{} {config}", kind.name()),
            expected,
            got: space.dim(),
        });
    }
    cache
        .lock()
        .expect("space cache")
        .insert((kind, config), space.clone());
    Ok(space)
}

fn scalar_monomials(deg: usize) -> Vec<Field> {
    monomials_upto(deg)
        .into_iter()
        .map(|e| Field::Scalar(PiecewisePoly::single(Poly::monomial(e, Q::from_integer(1.into())))))
        .collect()
}

fn sigma(config: ElementConfig) -> RawSpace {
    RawSpace {
        kind: SpaceKind::Sigma,
        config,
        fixed: scalar_monomials(config.r),
        face_groups: Vec::new(),
        interior: Vec::new(),
    }
}

fn w_space(config: ElementConfig) -> RawSpace {
    RawSpace {
        kind: SpaceKind::W,
        config,
        fixed: scalar_monomials(config.k - 1),
        face_groups: Vec::new(),
        interior: Vec::new(),
    }
}

fn vector_monomials(deg: usize) -> Vec<VecPoly> {
    let mut out = Vec::new();
    for e in monomials_upto(deg) {
        for c in 0..3 {
            out.push(VecPoly::along(Poly::monomial(e, Q::from_integer(1.into())), c));
        }
    }
    out
}

/// Interior bubbles of `Σ^{+,k}`: order 2 for `k = 2`, order `k` for `k ≥ 3`.
fn sigma_plus_interior(k: usize) -> Result<Vec<PiecewiseVec>> {
    if k < 2 {
        return Ok(Vec::new());
    }
    Ok(interior_bubbles(k - 1)?.iter().map(|b| b.field.clone()).collect())
}

fn sigma_plus(config: ElementConfig) -> Result<RawSpace> {
    let k = config.k;
    let fixed = vector_monomials(k)
        .into_iter()
        .map(|v| Field::Vector(PiecewiseVec::single(v)))
        .collect();
    let face_groups = if k <= 2 {
        directional_face_bubbles()?.as_ref().clone()
    } else {
        Vec::new()
    };
    let interior = sigma_plus_interior(k)?.into_iter().map(Field::Vector).collect();
    Ok(RawSpace {
        kind: SpaceKind::SigmaPlus,
        config,
        fixed,
        face_groups,
        interior,
    })
}

/// `∇Σ^r ⊕ 𝔭²Σ^{+,k}` with base point `0` for polynomial generators and the
/// split center for bubbles; dependent polynomial generators are dropped.
fn v_space(config: ElementConfig) -> Result<RawSpace> {
    let (r, k) = (config.r, config.k);
    let center = split_center();
    let mut candidates: Vec<Field> = Vec::new();
    for e in monomials_upto(r) {
        if e == [0, 0, 0] {
            continue;
        }
        let g = Poly::monomial(e, Q::from_integer(1.into())).grad();
        candidates.push(Field::Vector(PiecewiseVec::single(g)));
    }
    for v in vector_monomials(k) {
        candidates.push(Field::Vector(PiecewiseVec::single(poincare2(&v, &origin()))));
    }
    let groups: Vec<[PiecewiseVec; 3]> = if k <= 2 {
        directional_face_bubbles()?
            .iter()
            .map(|g| {
                Ok([
                    poincare2_piecewise(&g[0], &center)?,
                    poincare2_piecewise(&g[1], &center)?,
                    poincare2_piecewise(&g[2], &center)?,
                ])
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let interior: Vec<Field> = sigma_plus_interior(k)?
        .iter()
        .map(|b| poincare2_piecewise(b, &center).map(Field::Vector))
        .collect::<Result<_>>()?;

    let degree = candidates
        .iter()
        .chain(&interior)
        .map(Field::degree)
        .chain(groups.iter().flat_map(|g| g.iter()).filter_map(PiecewiseVec::degree))
        .max()
        .unwrap_or(0);
    let index = MonomialIndex::new(degree);
    let mut ech = EchelonBasis::new(12 * index.len());
    let mut fixed = Vec::new();
    for f in candidates {
        if ech.insert(&f.flatten(&index)) {
            fixed.push(f);
        }
    }
    // All twelve directional images must be independent of the polynomial
    // part, so every choice of nonzero face directions gives a direct sum.
    let mut with_groups = ech.clone();
    for g in &groups {
        for f in g {
            if !with_groups.insert(&Field::Vector(f.clone()).flatten(&index)) {
                return Err(Error::NotUnisolvent {
                    what: format!("V {config}: directional face bubble images"),
                    null: vec!["dependent directional image".into()],
                });
            }
        }
    }
    for f in &interior {
        if !with_groups.insert(&f.flatten(&index)) {
            return Err(Error::NotUnisolvent {
                what: format!("V {config}: interior bubble images"),
                null: vec!["dependent interior image".into()],
            });
        }
    }
    Ok(RawSpace {
        kind: SpaceKind::V,
        config,
        fixed,
        face_groups: groups,
        interior,
    })
}

/// Polynomial degree reproduced by `V^{r-1,k+1}`: `min{r-1, k+1}`.
pub fn poly_inclusion_degree(config: ElementConfig) -> usize {
    (config.r - 1).min(config.k + 1)
}

/// Exact ranks of the local complex on the reference element.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessTable {
    pub r: usize,
    pub k: usize,
    pub dim_sigma: usize,
    pub dim_v: usize,
    pub dim_sigma_plus: usize,
    pub dim_w: usize,
    pub rank_grad: usize,
    pub rank_curl: usize,
    pub rank_div: usize,
    pub nullity_curl: usize,
    pub nullity_div: usize,
    pub curl_grad_zero: bool,
    pub div_curl_zero: bool,
    /// `∇Σ ⊆ V`, `∇×V ⊆ Σ⁺` and `∇·Σ⁺ ⊆ W`.
    pub inclusions: bool,
    pub alternating_sum: i64,
}

impl ExactnessTable {
    pub fn is_exact(&self) -> bool {
        self.inclusions
            && self.curl_grad_zero
            && self.div_curl_zero
            && self.rank_grad + 1 == self.dim_sigma
            && self.nullity_curl == self.rank_grad
            && self.rank_curl == self.nullity_div
            && self.rank_div == self.dim_w
            && self.alternating_sum == 0
    }
}

/// Coordinates of each image field in the given basis; `None` when some
/// image lies outside the span.
fn coordinate_matrix(basis: &[Field], images: &[Field]) -> Option<QMatrix> {
    let degree = basis
        .iter()
        .chain(images)
        .map(Field::degree)
        .max()
        .unwrap_or(0);
    let index = MonomialIndex::new(degree);
    let width = match basis.first() {
        Some(Field::Vector(_)) => 12 * index.len(),
        _ => 4 * index.len(),
    };
    let mut ech = EchelonBasis::new(width);
    for b in basis {
        if !ech.insert(&b.flatten(&index)) {
            return None;
        }
    }
    let mut m = QMatrix::zeros(basis.len(), images.len());
    for (j, f) in images.iter().enumerate() {
        let c = ech.coords(&f.flatten(&index))?;
        for (i, v) in c.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Some(m)
}

pub fn exactness_table(config: ElementConfig) -> Result<ExactnessTable> {
    let sigma = raw_space(SpaceKind::Sigma, config)?.reference_basis();
    let v = raw_space(SpaceKind::V, config)?.reference_basis();
    let sp = raw_space(SpaceKind::SigmaPlus, config)?.reference_basis();
    let w = raw_space(SpaceKind::W, config)?.reference_basis();

    let grads: Vec<Field> = sigma
        .iter()
        .map(|f| Field::Vector(f.as_scalar().grad()))
        .collect();
    let curls: Vec<Field> = v.iter().map(|f| Field::Vector(f.as_vector().curl())).collect();
    let divs: Vec<Field> = sp.iter().map(|f| Field::Scalar(f.as_vector().div())).collect();

    let dg = coordinate_matrix(&v, &grads);
    let dc = coordinate_matrix(&sp, &curls);
    let dd = coordinate_matrix(&w, &divs);
    let inclusions = dg.is_some() && dc.is_some() && dd.is_some();
    let empty = |r, c| QMatrix::zeros(r, c);
    let dg = dg.unwrap_or_else(|| empty(v.len(), sigma.len()));
    let dc = dc.unwrap_or_else(|| empty(sp.len(), v.len()));
    let dd = dd.unwrap_or_else(|| empty(w.len(), sp.len()));

    let rank_grad = dg.rank();
    let rank_curl = dc.rank();
    let rank_div = dd.rank();
    let alternating_sum =
        1 - sigma.len() as i64 + v.len() as i64 - sp.len() as i64 + w.len() as i64;
    Ok(ExactnessTable {
        r: config.r,
        k: config.k,
        dim_sigma: sigma.len(),
        dim_v: v.len(),
        dim_sigma_plus: sp.len(),
        dim_w: w.len(),
        rank_grad,
        rank_curl,
        rank_div,
        nullity_curl: v.len() - rank_curl,
        nullity_div: sp.len() - rank_div,
        curl_grad_zero: inclusions && dc.mul(&dg).is_zero(),
        div_curl_zero: inclusions && dd.mul(&dc).is_zero(),
        inclusions,
        alternating_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: usize, k: usize) -> ElementConfig {
        ElementConfig::new(r, k).unwrap()
    }

    #[test]
    fn lowest_order_dimensions() {
        let c = cfg(1, 1);
        let dims: Vec<usize> = SpaceKind::ALL
            .iter()
            .map(|&kind| raw_space(kind, c).unwrap().dim())
            .collect();
        assert_eq!(dims, vec![4, 18, 16, 1]);
    }

    #[test]
    fn sigma_plus_dimensions() {
        assert_eq!(raw_space(SpaceKind::SigmaPlus, cfg(2, 2)).unwrap().dim(), 37);
        assert_eq!(raw_space(SpaceKind::SigmaPlus, cfg(3, 3)).unwrap().dim(), 69);
    }

    #[test]
    fn v_dimensions() {
        assert_eq!(raw_space(SpaceKind::V, cfg(2, 1)).unwrap().dim(), 24);
        assert_eq!(raw_space(SpaceKind::V, cfg(3, 1)).unwrap().dim(), 34);
        assert_eq!(raw_space(SpaceKind::V, cfg(2, 2)).unwrap().dim(), 42);
    }

    #[test]
    fn lowest_order_is_exact() {
        let t = exactness_table(cfg(1, 1)).unwrap();
        assert!(t.is_exact(), "{t:?}");
        assert_eq!(t.rank_grad, 3);
        assert_eq!(t.rank_div, 1);
    }

    #[test]
    fn inclusion_degree() {
        assert_eq!(poly_inclusion_degree(cfg(1, 1)), 0);
        assert_eq!(poly_inclusion_degree(cfg(2, 1)), 1);
        assert_eq!(poly_inclusion_degree(cfg(3, 1)), 2);
    }
}
