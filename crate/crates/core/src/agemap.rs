//! Labeled structures, realizations `B[φ, A]` and the age-map decision procedure.
//!
//! A map `f` from nodes at level `m` (context `A`) to nodes at level `n`
//! (context `K`) is an age map when it is injective and, for every labeled
//! `(B, φ)` with `B` in the class, `B[φ, A]` is in the class iff `B[f∘φ, K]` is.
//!
//! The search only needs `B` irreducible with `|B| < max |F|`. If some witness
//! exists, shrink it to a minimal one. The forbidden copy in the bad side meets
//! `B` in an irreducible proper substructure of a forbidden structure, and that
//! substructure is itself a witness.

use crate::error::{Error, Result};
use crate::forb::ForbFamily;
use crate::structure::{EnumStructure, View};
use crate::tree::TreeNode;

/// A structure whose points carry tree-node labels of one common level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledStructure {
    pub structure: EnumStructure,
    pub labels: Vec<TreeNode>,
}

/// Why a map is not an age map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgeMapFailure {
    /// Two carrier nodes share an image.
    NotInjective { first: TreeNode, second: TreeNode, image: TreeNode },
    /// `witness` (labeled by source nodes) lands in the class on exactly one side.
    Witness { witness: LabeledStructure, source_in_class: bool, target_in_class: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgeMapVerdict {
    pub is_age_map: bool,
    pub failure: Option<AgeMapFailure>,
}

impl AgeMapVerdict {
    fn ok() -> Self {
        AgeMapVerdict { is_age_map: true, failure: None }
    }
    fn fail(f: AgeMapFailure) -> Self {
        AgeMapVerdict { is_age_map: false, failure: Some(f) }
    }
}

/// `B[φ, A]`: the first `m` points of the context followed by `B`.
pub(crate) struct Realized<'a, V: View + ?Sized> {
    pub base: &'a V,
    pub m: usize,
    pub b: &'a EnumStructure,
    pub labels: Vec<&'a [u8]>,
    pub flip: &'a [u8],
}

impl<V: View + ?Sized> View for Realized<'_, V> {
    fn len(&self) -> usize {
        self.m + self.b.size()
    }
    fn unary(&self, i: usize) -> u8 {
        if i < self.m {
            self.base.unary(i)
        } else {
            self.b.unary(i - self.m)
        }
    }
    fn rel(&self, i: usize, j: usize) -> u8 {
        match (i < self.m, j < self.m) {
            (true, true) => self.base.rel(i, j),
            (true, false) => self.labels[j - self.m][i],
            (false, true) => self.flip[self.labels[i - self.m][j] as usize],
            (false, false) => self.b.rel(i - self.m, j - self.m),
        }
    }
}

fn common_level(labels: &[TreeNode]) -> Result<Option<usize>> {
    let Some(first) = labels.first() else { return Ok(None) };
    if labels.iter().any(|l| l.level() != first.level()) {
        return Err(Error::LevelMismatch("labels differ in level".into()));
    }
    Ok(Some(first.level()))
}

/// The realization `B[φ, A]` as an owned structure.
pub fn realize(b: &EnumStructure, labels: &[TreeNode], context: &EnumStructure) -> Result<EnumStructure> {
    if labels.len() != b.size() {
        return Err(Error::LevelMismatch(format!("{} labels for {} points", labels.len(), b.size())));
    }
    let m = common_level(labels)?.unwrap_or(0);
    if m > context.size() {
        return Err(Error::LevelMismatch(format!("label level {m} exceeds context size {}", context.size())));
    }
    if labels.iter().any(|l| l.digits().iter().any(|&d| d >= context.language().k())) {
        return Err(Error::LevelMismatch("label digit outside the alphabet".into()));
    }
    let view = Realized {
        base: context,
        m,
        b,
        labels: labels.iter().map(|l| l.digits()).collect(),
        flip: context.language().flip_table(),
    };
    Ok(EnumStructure::from_view(context.language(), &view))
}

/// Whether `B[φ, A]` lies in the class.
pub fn in_class(b: &EnumStructure, labels: &[TreeNode], context: &EnumStructure, family: &ForbFamily) -> Result<bool> {
    let r = realize(b, labels, context)?;
    family.contains(&r)
}

/// Membership of `B[φ, A]` given that `A_m` and `B` are both in the class.
fn realized_in(family: &ForbFamily, context: &EnumStructure, m: usize, b: &EnumStructure, labels: Vec<&[u8]>) -> bool {
    let view = Realized { base: context, m, b, labels, flip: family.language().flip_table() };
    (0..b.size()).all(|q| family.contains_with_new_point(&view, m + q))
}

/// Decides whether `pairs` (source node, target node) define an age map from
/// level `m` over `source` to level `n` over `target`. Both contexts must lie
/// in the class.
pub fn is_age_map(
    pairs: &[(TreeNode, TreeNode)],
    source: &EnumStructure,
    target: &EnumStructure,
    family: &ForbFamily,
) -> Result<AgeMapVerdict> {
    let mut pairs = pairs.to_vec();
    pairs.sort();
    pairs.dedup();
    let srcs: Vec<TreeNode> = pairs.iter().map(|p| p.0.clone()).collect();
    let tgts: Vec<TreeNode> = pairs.iter().map(|p| p.1.clone()).collect();
    let (Some(m), Some(n)) = (common_level(&srcs)?, common_level(&tgts)?) else {
        return Ok(AgeMapVerdict::ok());
    };
    if m > source.size() || n > target.size() {
        return Err(Error::LevelMismatch(format!(
            "levels {m} -> {n} over contexts of size {} and {}",
            source.size(),
            target.size()
        )));
    }
    for w in srcs.windows(2) {
        if w[0] == w[1] {
            return Err(Error::BadMap(format!("node {} has two images", w[0])));
        }
    }
    let mut by_target: Vec<(TreeNode, TreeNode)> = pairs.iter().map(|(s, t)| (t.clone(), s.clone())).collect();
    by_target.sort();
    for w in by_target.windows(2) {
        if w[0].0 == w[1].0 {
            return Ok(AgeMapVerdict::fail(AgeMapFailure::NotInjective {
                first: w[0].1.clone(),
                second: w[1].1.clone(),
                image: w[0].0.clone(),
            }));
        }
    }
    if family.forbidden().is_empty() {
        return Ok(AgeMapVerdict::ok());
    }
    Ok(search_witness(&srcs, &tgts, m, n, source, target, family))
}

fn search_witness(
    srcs: &[TreeNode],
    tgts: &[TreeNode],
    m: usize,
    n: usize,
    source: &EnumStructure,
    target: &EnumStructure,
    family: &ForbFamily,
) -> AgeMapVerdict {
    let lang = family.language();
    let x = srcs.len();
    // alive[u][i]: a lone point of type u labeled by carrier node i is in the class (on both sides).
    let mut alive = vec![vec![true; x]; lang.unary_types() as usize];
    for b in family.irr_structures() {
        let d = b.size();
        let mut phi = vec![0usize; d];
        loop {
            let skip = phi.iter().enumerate().any(|(j, &i)| !alive[b.unary(j) as usize][i]);
            if !skip {
                let s_in = realized_in(family, source, m, b, phi.iter().map(|&i| srcs[i].digits()).collect());
                let t_in = realized_in(family, target, n, b, phi.iter().map(|&i| tgts[i].digits()).collect());
                if s_in != t_in {
                    return AgeMapVerdict::fail(AgeMapFailure::Witness {
                        witness: LabeledStructure {
                            structure: b.clone(),
                            labels: phi.iter().map(|&i| srcs[i].clone()).collect(),
                        },
                        source_in_class: s_in,
                        target_in_class: t_in,
                    });
                }
                if d == 1 && !s_in {
                    alive[b.unary(0) as usize][phi[0]] = false;
                }
            }
            if !advance(&mut phi, x) {
                break;
            }
        }
    }
    AgeMapVerdict::ok()
}

/// Odometer step over `x^d`; false after the last tuple.
pub(crate) fn advance(phi: &mut [usize], x: usize) -> bool {
    for j in (0..phi.len()).rev() {
        phi[j] += 1;
        if phi[j] < x {
            return true;
        }
        phi[j] = 0;
    }
    false
}

/// `f'(s⌢i) = f(s)⌢i` for every pair and every digit.
pub fn prime_map(pairs: &[(TreeNode, TreeNode)], k: u8) -> Vec<(TreeNode, TreeNode)> {
    let mut out = Vec::with_capacity(pairs.len() * k as usize);
    for (s, t) in pairs {
        for i in 0..k {
            out.push((s.child(i), t.child(i)));
        }
    }
    out
}

/// Extends a partial map on `S ⊆ T(m)` into `T(n)` to all of `T(m)` by `t ↦ Left(t, n)`.
/// Every partial image must extend its source.
pub fn extend_age_map_left(partial: &[(TreeNode, TreeNode)], m: usize, n: usize, k: u8) -> Result<Vec<(TreeNode, TreeNode)>> {
    if n < m {
        return Err(Error::TooShort { have: m, want: n });
    }
    for (s, t) in partial {
        if s.level() != m || t.level() != n {
            return Err(Error::LevelMismatch(format!("pair {s} -> {t} is not from level {m} to level {n}")));
        }
        if !s.is_prefix_of(t) {
            return Err(Error::ExtensionNotAboveSource(format!("{t} does not extend {s}")));
        }
    }
    let mut out = Vec::with_capacity((k as usize).pow(m as u32));
    for t in TreeNode::level_nodes(k, m) {
        let img = match partial.iter().find(|(s, _)| *s == t) {
            Some((_, g)) => g.clone(),
            None => t.left(n)?,
        };
        out.push((t, img));
    }
    Ok(out)
}
