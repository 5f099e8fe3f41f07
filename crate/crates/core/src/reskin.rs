//! Weights for vertices created on the surface of a skinned mesh.
//!
//! A new point X inside face ABC with barycentric coordinates `(p, q, r)`
//! gets `w_X = p·w_A + q·w_B + r·w_C` over the union of the corners' bones
//! (at most 12). If more than four bones remain, the four largest are kept
//! (ties go to the lower bone id) and renormalized.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rig::{BoneId, Influence, Influences, MAX_INFLUENCES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReskinError {
    #[error("barycentric coordinates ({0}, {1}, {2}) are outside [0, 1] or do not sum to 1")]
    InvalidBary(f64, f64, f64),
    #[error("blended weights are all zero")]
    ZeroBlend,
}

/// Barycentric coordinates of a point in a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaryCoord {
    pub face: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BaryCoord {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(face: usize, p: f64, q: f64, r: f64) -> Result<Self, ReskinError> {
        let ok = |c: f64| (-Self::TOLERANCE..=1.0 + Self::TOLERANCE).contains(&c);
        if !(ok(p) && ok(q) && ok(r) && (p + q + r - 1.0).abs() <= Self::TOLERANCE) {
            return Err(ReskinError::InvalidBary(p, q, r));
        }
        Ok(Self { face, p, q, r })
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.p, self.q, self.r]
    }
}

/// Sparse bone → weight map.
pub type WeightVector = BTreeMap<BoneId, f64>;

/// Adjusts the blended weights before truncation.
pub trait InfluenceFilter {
    fn apply(&self, weights: &mut WeightVector);
}

/// Leaves weights untouched.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityFilter;

impl InfluenceFilter for IdentityFilter {
    fn apply(&self, _weights: &mut WeightVector) {}
}

/// Keeps the four largest weights and renormalizes. Vectors with at most
/// four nonzero entries are returned unchanged.
pub fn finalize(mut weights: WeightVector) -> Result<Influences, ReskinError> {
    weights.retain(|_, w| *w > 0.0);
    if weights.is_empty() {
        return Err(ReskinError::ZeroBlend);
    }
    if weights.len() <= MAX_INFLUENCES {
        return Ok(weights.into_iter().map(|(bone, weight)| Influence { bone, weight }).collect());
    }
    let mut ranked: Vec<(BoneId, f64)> = weights.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(MAX_INFLUENCES);
    let sum: f64 = ranked.iter().map(|(_, w)| w).sum();
    Ok(ranked
        .into_iter()
        .map(|(bone, w)| Influence { bone, weight: w / sum })
        .collect())
}

pub fn blend(corners: [&Influences; 3], bary: [f64; 3]) -> WeightVector {
    let mut acc = WeightVector::new();
    for (inf, c) in corners.into_iter().zip(bary) {
        for i in inf.iter() {
            *acc.entry(i.bone).or_insert(0.0) += c * i.weight;
        }
    }
    acc
}

pub fn weight_by_barycentric_filtered(
    corners: [&Influences; 3],
    bary: &BaryCoord,
    filter: &dyn InfluenceFilter,
) -> Result<Influences, ReskinError> {
    let mut w = blend(corners, bary.weights());
    filter.apply(&mut w);
    finalize(w)
}

pub fn weight_by_barycentric(corners: [&Influences; 3], bary: &BaryCoord) -> Result<Influences, ReskinError> {
    weight_by_barycentric_filtered(corners, bary, &IdentityFilter)
}

/// Weights of the point `(1 − λ)A + λB` on edge AB.
pub fn weight_by_edge(a: &Influences, b: &Influences, lambda: f64) -> Result<Influences, ReskinError> {
    let bary = BaryCoord::new(usize::MAX, 1.0 - lambda, lambda, 0.0)?;
    weight_by_barycentric([a, b, b], &bary)
}
