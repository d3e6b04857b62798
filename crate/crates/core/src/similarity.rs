//! Renkonen- and Jaccard-family similarity between two axis profiles.
//!
//! All measures work on proportions. Two profiles on the same axis id but
//! with different group lists are compared over the union of their groups,
//! missing groups counting as zero.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::profile::AxisProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Renkonen,
    Jaccard,
}

/// Two proportion vectors laid out over the same groups.
pub type Aligned<'a> = (Cow<'a, [f64]>, Cow<'a, [f64]>);

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub family: Family,
    pub axis_id: String,
}

/// `Σ min(p_g, q_g)` over aligned proportion vectors.
pub fn renkonen_index(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let s: f64 = p.iter().zip(q).map(|(a, b)| a.min(*b)).sum();
    s.clamp(0.0, 1.0)
}

/// `1 − ½ Σ |p_g − q_g|` over aligned proportion vectors, evaluated in the
/// equal form `Σ min(p_g, q_g)` so that tied pairs score bit-for-bit equal.
pub fn demographic_similarity(p: &[f64], q: &[f64]) -> f64 {
    renkonen_index(p, q)
}

/// `Σ min / Σ max` over aligned proportion vectors; 1 when both are all zero.
pub fn jaccard_index(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let (lo, hi) = p.iter().zip(q).fold((0.0f64, 0.0f64), |(lo, hi), (a, b)| (lo + a.min(*b), hi + a.max(*b)));
    if hi == 0.0 {
        return 1.0;
    }
    (lo / hi).clamp(0.0, 1.0)
}

/// Proportion vectors of `p` and `q` over a shared group list.
///
/// Identical group lists are used as they are. Otherwise both are laid out
/// over the sorted union of groups, which keeps the layout independent of
/// argument order.
pub fn aligned<'a>(p: &'a AxisProfile, q: &'a AxisProfile) -> Result<Aligned<'a>> {
    if p.axis_id() != q.axis_id() {
        return Err(Error::AxisMismatch { left: p.axis_id().into(), right: q.axis_id().into() });
    }
    if p.groups() == q.groups() {
        return Ok((Cow::Borrowed(p.proportions()), Cow::Borrowed(q.proportions())));
    }
    let mut union: Vec<&str> = p.groups().iter().chain(q.groups()).map(String::as_str).collect();
    union.sort_unstable();
    union.dedup();
    let spread = |x: &AxisProfile| -> Vec<f64> { union.iter().map(|g| x.proportion(g).unwrap_or(0.0)).collect() };
    Ok((Cow::Owned(spread(p)), Cow::Owned(spread(q))))
}

fn score(p: &AxisProfile, q: &AxisProfile, family: Family, f: fn(&[f64], &[f64]) -> f64) -> Result<SimilarityScore> {
    let (a, b) = aligned(p, q)?;
    Ok(SimilarityScore { value: f(&a, &b), family, axis_id: p.axis_id().into() })
}

/// Renkonen index `Σ_g min(p_g, q_g)`.
pub fn renkonen(p: &AxisProfile, q: &AxisProfile) -> Result<SimilarityScore> {
    score(p, q, Family::Renkonen, renkonen_index)
}

/// Demographic similarity `1 − ½ Σ_g |p_g − q_g|`, equal to the Renkonen
/// index on normalized profiles.
pub fn ds(p: &AxisProfile, q: &AxisProfile) -> Result<SimilarityScore> {
    score(p, q, Family::Renkonen, demographic_similarity)
}

/// Quantitative Jaccard (Ruzicka) index on proportions. On normalized
/// profiles `Σ min / Σ max` equals `R / (2 − R)`; the latter is used so the
/// two families order pairs identically, ties included.
pub fn jaccard(p: &AxisProfile, q: &AxisProfile) -> Result<SimilarityScore> {
    score(p, q, Family::Jaccard, |a, b| {
        let r = renkonen_index(a, b);
        r / (2.0 - r)
    })
}

/// Maps a Renkonen-family score to the Jaccard family, `R / (2 − R)`.
pub fn renkonen_to_jaccard(r: &SimilarityScore) -> Result<SimilarityScore> {
    if r.family != Family::Renkonen || !(0.0..=1.0).contains(&r.value) {
        return Err(Error::InvalidScore { value: r.value });
    }
    Ok(SimilarityScore { value: r.value / (2.0 - r.value), family: Family::Jaccard, axis_id: r.axis_id.clone() })
}
