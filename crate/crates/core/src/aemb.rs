//! Embeddings and aged embeddings of coding trees into a prefix's coding tree.

use std::collections::HashSet;

use crate::agemap::{is_age_map, prime_map, AgeMapVerdict};
use crate::error::{Error, Result};
use crate::forb::{ExtensionType, ForbFamily};
use crate::limit::{Generator, LimitPrefix};
use crate::structure::{is_embedding_values, EnumStructure, View};
use crate::tree::{coding_tree_of, NodeMap, TreeNode};

/// The clause of the embedding definition that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingClause {
    Injective,
    LevelUniform,
    Meets,
    Successors,
    CodingNodes,
}

/// Outcome of [`is_embedding`]; `induced` is the level map when clause 2 holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingVerdict {
    pub ok: bool,
    pub failed: Option<EmbeddingClause>,
    pub induced: Option<Vec<usize>>,
}

/// A map on `T(<|A|)` with its induced level map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgedEmbedding {
    pub source: EnumStructure,
    pub map: NodeMap,
    pub induced: Vec<usize>,
}

/// Why a map is not an aged embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgedFailure {
    Embedding(EmbeddingClause),
    AgeMap { level: usize, verdict: AgeMapVerdict },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgedVerdict {
    pub ok: bool,
    pub failure: Option<AgedFailure>,
    pub induced: Option<Vec<usize>>,
}

fn check_domain(f: &NodeMap, a: &EnumStructure) -> Result<()> {
    if f.depth() != a.size() {
        return Err(Error::DomainIncomplete(format!("map has depth {}, structure has size {}", f.depth(), a.size())));
    }
    if f.k() != a.language().k() {
        return Err(Error::LanguageMismatch("node map alphabet differs".into()));
    }
    Ok(())
}

fn fail(c: EmbeddingClause, induced: Option<Vec<usize>>) -> Result<EmbeddingVerdict> {
    Ok(EmbeddingVerdict { ok: false, failed: Some(c), induced })
}

/// Checks the five embedding clauses; `coding = false` skips clause 5.
pub(crate) fn check_embedding(f: &NodeMap, a: &EnumStructure, ambient: &LimitPrefix, coding: bool) -> Result<EmbeddingVerdict> {
    check_domain(f, a)?;
    let k = f.k();
    let Some(lv) = f.level_map() else { return fail(EmbeddingClause::LevelUniform, None) };
    if lv.windows(2).any(|w| w[0] >= w[1]) {
        return fail(EmbeddingClause::LevelUniform, None);
    }
    let induced = Some(lv.clone());
    let mut seen = HashSet::new();
    for (_, img) in f.pairs() {
        if !seen.insert(img) {
            return fail(EmbeddingClause::Injective, induced);
        }
    }
    // Brute force over all pairs of domain nodes.
    let all = f.pairs();
    for (i, (s, fs)) in all.iter().enumerate() {
        for (t, ft) in &all[i + 1..] {
            let u = s.meet(t);
            if f.get(&u) != Some(&fs.meet(ft)) {
                return fail(EmbeddingClause::Meets, induced);
            }
        }
    }
    for m in 0..f.depth().saturating_sub(1) {
        for (idx, img) in f.level(m).iter().enumerate() {
            let s = TreeNode::from_index(k, m, idx);
            for i in 0..k {
                let child = f.get(&s.child(i)).expect("domain complete");
                if !img.child(i).is_prefix_of(child) {
                    return fail(EmbeddingClause::Successors, induced);
                }
            }
        }
    }
    if coding {
        let ct = coding_tree_of(a.language(), a);
        for (m, &l) in lv.iter().enumerate() {
            if l >= ambient.len() {
                return Err(Error::AmbientTooShallow { need: l + 1, have: ambient.len() });
            }
            if f.get(&ct.nodes[m]) != Some(ambient.node(l)) || a.unary(m) != ambient.unary(l) {
                return fail(EmbeddingClause::CodingNodes, induced);
            }
        }
        debug_assert!(is_embedding_values(&lv, a, ambient.structure(), true));
    }
    Ok(EmbeddingVerdict { ok: true, failed: None, induced })
}

/// Whether `f` embeds `ct^A` into the ambient coding tree; on success the
/// induced level map is an ordered embedding of `A` into the prefix.
pub fn is_embedding(f: &NodeMap, a: &EnumStructure, ambient: &LimitPrefix) -> Result<EmbeddingVerdict> {
    let v = check_embedding(f, a, ambient, true)?;
    if v.ok {
        let lv = v.induced.as_ref().expect("uniform");
        if !is_embedding_values(lv, a, ambient.structure(), true) {
            return fail(EmbeddingClause::CodingNodes, v.induced);
        }
    }
    Ok(v)
}

/// Level-`m` restriction as age-map pairs.
fn level_pairs(f: &NodeMap, m: usize) -> Vec<(TreeNode, TreeNode)> {
    f.level(m)
        .iter()
        .enumerate()
        .map(|(i, img)| (TreeNode::from_index(f.k(), m, i), img.clone()))
        .collect()
}

/// Embedding clauses plus the per-level age-map condition.
pub fn is_aged_embedding(f: &NodeMap, a: &EnumStructure, ambient: &LimitPrefix, family: &ForbFamily) -> Result<AgedVerdict> {
    if !family.contains(a)? {
        return Err(Error::NotInClass("source structure".into()));
    }
    let e = is_embedding(f, a, ambient)?;
    if !e.ok {
        return Ok(AgedVerdict { ok: false, failure: e.failed.map(AgedFailure::Embedding), induced: e.induced });
    }
    for m in 0..a.size() {
        let verdict = is_age_map(&level_pairs(f, m), a, ambient.structure(), family)?;
        if !verdict.is_age_map {
            return Ok(AgedVerdict { ok: false, failure: Some(AgedFailure::AgeMap { level: m, verdict }), induced: e.induced });
        }
    }
    Ok(AgedVerdict { ok: true, failure: None, induced: e.induced })
}

/// `f'` on `T(m)`: `f'(t⌢i) = f(t)⌢i`, and `ε ↦ ε` when `m = 0`. Pairs are in node-index order.
pub fn prime_of(f: &NodeMap) -> Vec<(TreeNode, TreeNode)> {
    let m = f.depth();
    if m == 0 {
        return vec![(TreeNode::root(), TreeNode::root())];
    }
    prime_map(&level_pairs(f, m - 1), f.k())
}

enum Ambient<'a> {
    Fixed(&'a LimitPrefix),
    Growing(&'a mut Generator),
}

impl Ambient<'_> {
    fn prefix(&self) -> &LimitPrefix {
        match self {
            Ambient::Fixed(p) => p,
            Ambient::Growing(g) => g.prefix(),
        }
    }
}

fn extend_in(
    f: &NodeMap,
    a: &EnumStructure,
    gamma: &[(TreeNode, TreeNode)],
    ambient: &mut Ambient<'_>,
    family: &ForbFamily,
) -> Result<NodeMap> {
    let m = f.depth();
    let k = f.k();
    if m >= a.size() {
        return Err(Error::DomainIncomplete(format!("cannot extend past level {}", a.size())));
    }
    let fp = prime_of(f);
    let mut images = Vec::with_capacity(fp.len());
    for (_, x) in &fp {
        let g = gamma
            .iter()
            .find(|(s, _)| s == x)
            .map(|(_, g)| g.clone())
            .ok_or_else(|| Error::DomainIncomplete(format!("γ undefined at {x}")))?;
        if !x.is_prefix_of(&g) {
            return Err(Error::ExtensionNotAboveSource(format!("{g} does not extend {x}")));
        }
        images.push(g);
    }
    let n = images[0].level();
    if images.iter().any(|g| g.level() != n) {
        return Err(Error::LevelMismatch("γ images differ in level".into()));
    }
    if n > ambient.prefix().len() {
        return Err(Error::AmbientTooShallow { need: n, have: ambient.prefix().len() });
    }
    let ct = coding_tree_of(a.language(), a);
    let s = &ct.nodes[m];
    let target = images[s.index(k)].clone();
    let unary = a.unary(m);
    if !family.is_valid_extension(ambient.prefix().structure(), unary, target.digits()) {
        return Err(Error::PrefixExhausted { level: m, dead: true });
    }
    let want = ExtensionType { base_size: n, unary, word: target };
    let found = {
        let p = ambient.prefix();
        (n..p.len()).find(|&r| p.realizes(r, &want))
    };
    let r = match (found, ambient) {
        (Some(r), _) => r,
        (None, Ambient::Growing(g)) => g.step_demand(want)?,
        (None, Ambient::Fixed(_)) => return Err(Error::PrefixExhausted { level: m, dead: false }),
    };
    let mut g = f.clone();
    g.push_level(images.iter().map(|x| x.left(r)).collect::<Result<Vec<_>>>()?)?;
    Ok(g)
}

/// Extends an aged embedding of `ct^A|_m` by one level, choosing the least level
/// `r` at which `Left(γ(f'(c^A(m))), r)` is a coding node of the right type.
/// `gamma` maps each `f'(t)`, `t ∈ T(m)`, to an extension of it.
pub fn extend_aged_embedding(
    f: &NodeMap,
    a: &EnumStructure,
    gamma: &[(TreeNode, TreeNode)],
    ambient: &LimitPrefix,
    family: &ForbFamily,
) -> Result<AgedEmbedding> {
    let g = extend_in(f, a, gamma, &mut Ambient::Fixed(ambient), family)?;
    finish(g, a, ambient, family)
}

fn finish(g: NodeMap, a: &EnumStructure, ambient: &LimitPrefix, family: &ForbFamily) -> Result<AgedEmbedding> {
    let sub = a.prefix(g.depth());
    let v = is_aged_embedding(&g, &sub, ambient, family)?;
    if !v.ok {
        return Err(Error::BadMap(format!("constructed map failed self-check: {:?}", v.failure)));
    }
    Ok(AgedEmbedding { source: sub, induced: v.induced.expect("verified"), map: g })
}

fn identity_gamma(f: &NodeMap) -> Vec<(TreeNode, TreeNode)> {
    prime_of(f).into_iter().map(|(_, x)| (x.clone(), x)).collect()
}

/// Level-by-level construction with `γ` the identity on `f'[T(m)]`.
pub fn find_aged_embedding(a: &EnumStructure, ambient: &LimitPrefix, family: &ForbFamily) -> Result<AgedEmbedding> {
    if !family.contains(a)? {
        return Err(Error::NotInClass("structure embeds a forbidden structure".into()));
    }
    let mut f = NodeMap::new(a.language().k());
    for _ in 0..a.size() {
        let gamma = identity_gamma(&f);
        f = extend_in(&f, a, &gamma, &mut Ambient::Fixed(ambient), family)?;
    }
    finish(f, a, ambient, family)
}

/// As [`find_aged_embedding`], but realizes missing coding nodes as demand
/// levels of `gen` instead of failing.
pub fn find_aged_embedding_growing(a: &EnumStructure, gen: &mut Generator) -> Result<AgedEmbedding> {
    let family = gen.family().clone();
    if !family.contains(a)? {
        return Err(Error::NotInClass("structure embeds a forbidden structure".into()));
    }
    let mut f = NodeMap::new(a.language().k());
    for _ in 0..a.size() {
        let gamma = identity_gamma(&f);
        f = extend_in(&f, a, &gamma, &mut Ambient::Growing(gen), &family)?;
    }
    finish(f, a, gen.prefix(), &family)
}

/// As [`extend_aged_embedding`] over a growing prefix.
pub fn extend_aged_embedding_growing(
    f: &NodeMap,
    a: &EnumStructure,
    gamma: &[(TreeNode, TreeNode)],
    gen: &mut Generator,
) -> Result<AgedEmbedding> {
    let family = gen.family().clone();
    let g = extend_in(f, a, gamma, &mut Ambient::Growing(gen), &family)?;
    finish(g, a, gen.prefix(), &family)
}

/// Aged embeddings with every image level at most `max_level`, ordered by the
/// level map and then by node images; at most `cap`. The flag reports truncation.
pub fn enumerate_aged_embeddings(
    a: &EnumStructure,
    ambient: &LimitPrefix,
    family: &ForbFamily,
    max_level: usize,
    cap: usize,
) -> Result<(Vec<AgedEmbedding>, bool)> {
    if !family.contains(a)? {
        return Err(Error::NotInClass("structure embeds a forbidden structure".into()));
    }
    let mut out = Vec::new();
    if a.size() == 0 {
        if cap == 0 {
            return Ok((out, true));
        }
        out.push(AgedEmbedding { source: a.clone(), map: NodeMap::new(a.language().k()), induced: Vec::new() });
        return Ok((out, false));
    }
    let top = max_level.min(ambient.len().saturating_sub(1));
    let mut en = Enumerator { a, ct: coding_tree_of(a.language(), a).nodes, ambient, family, cap, out: &mut out, capped: false };
    let mut lv = Vec::new();
    en.level_maps(&mut lv, top)?;
    let capped = en.capped;
    Ok((out, capped))
}

struct Enumerator<'a> {
    a: &'a EnumStructure,
    ct: Vec<TreeNode>,
    ambient: &'a LimitPrefix,
    family: &'a ForbFamily,
    cap: usize,
    out: &'a mut Vec<AgedEmbedding>,
    capped: bool,
}

impl Enumerator<'_> {
    fn level_maps(&mut self, lv: &mut Vec<usize>, top: usize) -> Result<()> {
        if self.capped {
            return Ok(());
        }
        let m = lv.len();
        if m == self.a.size() {
            if is_embedding_values(lv, self.a, self.ambient.structure(), true) {
                let mut f = NodeMap::new(self.a.language().k());
                self.nodes(&mut f, lv)?;
            }
            return Ok(());
        }
        let lo = lv.last().map_or(0, |&x| x + 1);
        for r in lo..=top {
            if self.ambient.unary(r) != self.a.unary(m) {
                continue;
            }
            lv.push(r);
            let ok = is_embedding_values(lv, &self.a.prefix(m + 1), self.ambient.structure(), true);
            if ok {
                self.level_maps(lv, top)?;
            }
            lv.pop();
        }
        Ok(())
    }

    fn nodes(&mut self, f: &mut NodeMap, lv: &[usize]) -> Result<()> {
        if self.capped {
            return Ok(());
        }
        let m = f.depth();
        if m == lv.len() {
            if self.out.len() >= self.cap {
                self.capped = true;
                return Ok(());
            }
            self.out.push(AgedEmbedding { source: self.a.clone(), map: f.clone(), induced: lv.to_vec() });
            return Ok(());
        }
        let k = f.k();
        let r = lv[m];
        let fp = prime_of(f);
        let coding_idx = self.ct[m].index(k);
        let code = self.ambient.node(r);
        if !fp[coding_idx].1.is_prefix_of(code) {
            return Ok(());
        }
        let mut options = Vec::with_capacity(fp.len());
        for (i, (_, x)) in fp.iter().enumerate() {
            if i == coding_idx {
                options.push(vec![code.clone()]);
            } else {
                options.push(x.successors(r, k, usize::MAX)?.0);
            }
        }
        let mut choice = vec![0usize; options.len()];
        let sub = self.a.prefix(m + 1);
        loop {
            let images: Vec<TreeNode> = choice.iter().enumerate().map(|(i, &c)| options[i][c].clone()).collect();
            let pairs: Vec<(TreeNode, TreeNode)> =
                images.iter().enumerate().map(|(i, img)| (TreeNode::from_index(k, m, i), img.clone())).collect();
            if is_age_map(&pairs, &sub, self.ambient.structure(), self.family)?.is_age_map {
                f.push_level(images)?;
                let mut g = f.clone();
                std::mem::swap(f, &mut g);
                self.nodes(f, lv)?;
                *f = g.truncate(m);
                if self.capped {
                    return Ok(());
                }
            }
            let mut j = choice.len();
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                choice[j] += 1;
                if choice[j] < options[j].len() {
                    break;
                }
                choice[j] = 0;
            }
        }
    }
}
