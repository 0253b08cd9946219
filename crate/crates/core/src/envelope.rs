//! Critical levels, envelopes, closures and interiors of finite level sets.
//!
//! For a level set `S` and `m < max S`, the projection at `m` is
//! `π_m : {c(a)|_{m+1} : a ∈ S, a > m} → T(m)`. `S` is an envelope iff all meets
//! of its coding nodes lie in `S` and the projection at every `m ∉ S` below
//! `max S` is an age map. This includes levels below `min S`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::aemb::{is_aged_embedding, AgedFailure};
use crate::agemap::{is_age_map, AgeMapFailure, AgeMapVerdict, LabeledStructure};
use crate::error::{Error, Result};
use crate::forb::ForbFamily;
use crate::limit::LimitPrefix;
use crate::structure::induced_substructure;
use crate::tree::{NodeMap, TreeNode};

/// Critical levels of a set: splitting (`sp`) and age-change (`ac`) levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CritReport {
    pub levels: Vec<usize>,
    pub sp: Vec<usize>,
    pub ac: Vec<(usize, LabeledStructure)>,
    /// `(s, Start(s))` for each `s` in the set.
    pub start: Vec<(usize, usize)>,
}

impl CritReport {
    /// `sp ∪ ac`, sorted.
    pub fn crit(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.sp.iter().copied().chain(self.ac.iter().map(|(m, _)| *m)).collect();
        v.sort_unstable();
        v
    }

    pub fn start_levels(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.start.iter().map(|&(_, l)| l).collect();
        s.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeMode {
    /// Meet closure plus age-map projections.
    Combinatorial,
    /// Explicit aged embedding of `ct^S` with induced map `i_S`.
    Definitional,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvelopeFailure {
    MeetOutside { a: usize, b: usize, level: usize },
    Projection { level: usize, verdict: AgeMapVerdict },
    Construction(AgedFailure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeVerdict {
    pub is_envelope: bool,
    pub failure: Option<EnvelopeFailure>,
    /// The attempted aged embedding in definitional mode, kept when it fails verification.
    pub construction: Option<NodeMap>,
}

type Key = (usize, Vec<TreeNode>);

/// Envelope queries over one prefix; projection verdicts are memoized.
pub struct Envelopes<'a> {
    prefix: &'a LimitPrefix,
    family: &'a ForbFamily,
    cache: Mutex<HashMap<Key, Arc<AgeMapVerdict>>>,
}

impl<'a> Envelopes<'a> {
    pub fn new(prefix: &'a LimitPrefix, family: &'a ForbFamily) -> Self {
        Envelopes { prefix, family, cache: Mutex::new(HashMap::new()) }
    }

    pub fn prefix(&self) -> &LimitPrefix {
        self.prefix
    }

    pub fn family(&self) -> &ForbFamily {
        self.family
    }

    fn normalize(&self, s: &[usize]) -> Result<Vec<usize>> {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        if let Some(&bad) = v.iter().find(|&&x| x >= self.prefix.len()) {
            return Err(Error::OutOfRange { index: bad, size: self.prefix.len() });
        }
        Ok(v)
    }

    /// `ℓ(c(a) ∧ c(b))`.
    pub fn meet_level(&self, a: usize, b: usize) -> usize {
        self.prefix.node(a).meet(self.prefix.node(b)).level()
    }

    /// Number of leading zeros of `c(s)`.
    pub fn start(&self, s: usize) -> usize {
        self.prefix.node(s).leading_zeros()
    }

    /// Verdict for `π_m` on the restrictions of the members of `set` above `m`.
    pub fn projection(&self, m: usize, set: &[usize]) -> Arc<AgeMapVerdict> {
        let mut carrier: Vec<TreeNode> =
            set.iter().filter(|&&a| a > m).map(|&a| self.prefix.node(a).restrict(m + 1)).collect();
        carrier.sort();
        carrier.dedup();
        let key = (m, carrier);
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let pairs: Vec<(TreeNode, TreeNode)> = key.1.iter().map(|x| (x.clone(), x.restrict(m))).collect();
        let s = self.prefix.structure();
        let v = Arc::new(is_age_map(&pairs, s, s, self.family).expect("levels lie inside the prefix"));
        self.cache.lock().expect("cache lock").insert(key, v.clone());
        v
    }

    /// Splitting and age-change levels below `max S`, and `Start` of each member.
    pub fn crit(&self, s: &[usize]) -> Result<CritReport> {
        let s = self.normalize(s)?;
        let mut sp = Vec::new();
        let mut ac = Vec::new();
        if let Some(&top) = s.last() {
            for m in 0..top {
                let v = self.projection(m, &s);
                match &v.failure {
                    None => {}
                    Some(AgeMapFailure::NotInjective { .. }) => sp.push(m),
                    Some(AgeMapFailure::Witness { witness, .. }) => ac.push((m, witness.clone())),
                }
            }
        }
        let start = s.iter().map(|&x| (x, self.start(x))).collect();
        Ok(CritReport { levels: s, sp, ac, start })
    }

    pub fn is_envelope(&self, s: &[usize], mode: EnvelopeMode) -> Result<EnvelopeVerdict> {
        let s = self.normalize(s)?;
        match mode {
            EnvelopeMode::Combinatorial => Ok(self.combinatorial(&s)),
            EnvelopeMode::Definitional => self.definitional(&s),
        }
    }

    fn combinatorial(&self, s: &[usize]) -> EnvelopeVerdict {
        let no = |f| EnvelopeVerdict { is_envelope: false, failure: Some(f), construction: None };
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                let level = self.meet_level(a, b);
                if s.binary_search(&level).is_err() {
                    return no(EnvelopeFailure::MeetOutside { a, b, level });
                }
            }
        }
        if let Some(&top) = s.last() {
            for m in 0..top {
                if s.binary_search(&m).is_ok() {
                    continue;
                }
                let v = self.projection(m, s);
                if !v.is_age_map {
                    return no(EnvelopeFailure::Projection { level: m, verdict: (*v).clone() });
                }
            }
        }
        EnvelopeVerdict { is_envelope: true, failure: None, construction: None }
    }

    /// Builds `f(∅) = c(s_0)` and `f(t⌢i) = c(n)|_{s_m}` for the least `n ∈ S` with
    /// `c(n) ⊒ f(t)⌢i`, else `Left(f(t)⌢i, s_m)`; then verifies it.
    fn definitional(&self, s: &[usize]) -> Result<EnvelopeVerdict> {
        let lang = self.family.language();
        let k = lang.k();
        let a = induced_substructure(self.prefix.structure(), s)?;
        let mut f = NodeMap::new(k);
        if let Some(&s0) = s.first() {
            f.push_level(vec![self.prefix.node(s0).clone()])?;
        }
        for m in 1..s.len() {
            let sm = s[m];
            let mut images = Vec::with_capacity(f.level(m - 1).len() * k as usize);
            for img in f.level(m - 1) {
                for i in 0..k {
                    let x = img.child(i);
                    let hit = s.iter().find(|&&n| x.is_prefix_of(self.prefix.node(n)));
                    images.push(match hit {
                        Some(&n) => self.prefix.node(n).restrict(sm),
                        None => x.left(sm)?,
                    });
                }
            }
            f.push_level(images)?;
        }
        let v = is_aged_embedding(&f, &a, self.prefix, self.family)?;
        let ok = v.ok && v.induced.as_deref() == Some(s);
        let failure = if ok {
            None
        } else {
            Some(EnvelopeFailure::Construction(
                v.failure.unwrap_or(AgedFailure::Embedding(crate::aemb::EmbeddingClause::CodingNodes)),
            ))
        };
        Ok(EnvelopeVerdict { is_envelope: ok, failure, construction: Some(f) })
    }

    /// Smallest envelope containing `S`, computed top-down from `max S`.
    pub fn closure(&self, s: &[usize]) -> Result<Vec<usize>> {
        let s = self.normalize(s)?;
        let Some(&top) = s.last() else { return Err(Error::EmptyInput("closure of the empty set".into())) };
        let mut cur = vec![top];
        for m in (0..top).rev() {
            let add = s.binary_search(&m).is_ok()
                || cur.iter().enumerate().any(|(i, &a)| cur[i + 1..].iter().any(|&b| self.meet_level(a, b) == m))
                || !self.projection(m, &cur).is_age_map;
            if add {
                cur.insert(0, m);
            }
        }
        Ok(cur)
    }

    /// Interior of an envelope, in the order levels are added (largest first).
    pub fn interior(&self, e: &[usize]) -> Result<Vec<usize>> {
        let e = self.normalize(e)?;
        if e.is_empty() {
            return Ok(Vec::new());
        }
        if !self.combinatorial(&e).is_envelope {
            return Err(Error::NotAnEnvelope(format!("{e:?}")));
        }
        let mut int = vec![*e.last().expect("nonempty")];
        loop {
            let cl = self.closure(&int)?;
            match e.iter().rev().find(|x| cl.binary_search(x).is_err()) {
                Some(&x) => int.push(x),
                None => return Ok(int),
            }
        }
    }
}

/// `(s − 1) + Σ_{I ∈ Irr} Σ_{j<s} (k^{|I|})^{j+1}`, saturating.
pub fn crit_bound(s: usize, family: &ForbFamily) -> u128 {
    if s == 0 {
        return 0;
    }
    let k = family.language().k() as u128;
    let mut total = (s - 1) as u128;
    for i in family.irr_structures() {
        let base = k.saturating_pow(i.size() as u32);
        let mut p = 1u128;
        for _ in 0..s {
            p = p.saturating_mul(base);
            total = total.saturating_add(p);
        }
    }
    total
}

/// Certified bound on `|closure(S)|` for `|S| = n` inside the range of a nice
/// embedding: `n + (crit_bound(n) + n)·max|F|`, or `2n − 1` when nothing is forbidden.
pub fn envelope_size_bound(n: usize, family: &ForbFamily) -> u128 {
    if n == 0 {
        return 0;
    }
    let n128 = n as u128;
    if family.forbidden().is_empty() {
        return 2 * n128 - 1;
    }
    n128.saturating_add(crit_bound(n, family).saturating_add(n128).saturating_mul(family.max_forbidden() as u128))
}
