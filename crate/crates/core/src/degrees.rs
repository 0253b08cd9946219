//! Labeled census and the degree bound, ordered decompositions, and a finite
//! coloring probe.
//!
//! The bound counts labeled members of `K` on `{0..d−1}` for `1 ≤ d ≤ D`; the
//! empty structure is excluded.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::envelope::{envelope_size_bound, Envelopes};
use crate::error::{Error, Result};
use crate::forb::ForbFamily;
use crate::limit::LimitPrefix;
use crate::par;
use crate::search::for_each_embedding;
use crate::structure::{enumerate_embeddings, induced_substructure, EnumStructure, View};

pub const DEFAULT_CENSUS_CAP: usize = 1 << 20;

/// Labeled members of `K` of each size `1..=d_max`, grown by valid one-point
/// extensions. Fails once a stratum exceeds `cap`.
pub fn census(family: &ForbFamily, d_max: usize, cap: usize, jobs: usize) -> Result<Vec<u64>> {
    let mut level = vec![EnumStructure::empty(family.language())];
    let mut counts = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let next: Vec<EnumStructure> = par::map(jobs, &level, |s| {
            family
                .valid_extensions(s)
                .into_iter()
                .map(|e| {
                    let mut t = s.clone();
                    t.push_point(e.unary, e.word.digits());
                    t
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        if next.len() > cap {
            return Err(Error::CensusTooLarge { size: d, cap });
        }
        counts.push(next.len() as u64);
        level = next;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBoundReport {
    pub size: usize,
    /// The envelope size bound `D` used.
    pub d: usize,
    pub ell: u128,
    /// `census[d − 1]` labeled members on `d` points.
    pub census: Vec<u64>,
}

/// `ℓ = Σ_{1 ≤ d ≤ D} |{B ∈ K on d}|`, with `D` defaulting to the envelope size bound.
pub fn degree_bound(a: &EnumStructure, family: &ForbFamily, d: Option<usize>, cap: usize, jobs: usize) -> Result<DegreeBoundReport> {
    if !family.contains(a)? {
        return Err(Error::NotInClass("the structure embeds a forbidden structure".into()));
    }
    let d = match d {
        Some(d) => d,
        None => usize::try_from(envelope_size_bound(a.size(), family))
            .map_err(|_| Error::CensusTooLarge { size: usize::MAX, cap })?,
    };
    let counts = census(family, d, cap, jobs)?;
    Ok(DegreeBoundReport { size: a.size(), d, ell: counts.iter().map(|&c| c as u128).sum(), census: counts })
}

/// One enumerated presentation `Aσ` and every bijection `σ` producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedVariant {
    pub structure: EnumStructure,
    /// `σ` with `Aσ(i, j) = A(σ(i), σ(j))`.
    pub bijections: Vec<Vec<usize>>,
}

/// Distinct presentations `Aσ` over all permutations, in first-appearance order.
pub fn ordered_decomposition(a: &EnumStructure) -> Vec<OrderedVariant> {
    let n = a.size();
    let mut out: Vec<OrderedVariant> = Vec::new();
    for sigma in (0..n).permutations(n) {
        let s = induced_substructure_permuted(a, &sigma);
        match out.iter_mut().find(|v| v.structure == s) {
            Some(v) => v.bijections.push(sigma),
            None => out.push(OrderedVariant { structure: s, bijections: vec![sigma] }),
        }
    }
    out
}

fn induced_substructure_permuted(a: &EnumStructure, sigma: &[usize]) -> EnumStructure {
    let n = sigma.len();
    let unary: Vec<u8> = sigma.iter().map(|&x| a.unary(x)).collect();
    let table: Vec<Vec<u8>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { a.rel(sigma[i], sigma[j]) }).collect()).collect();
    EnumStructure::from_table(a.language(), &unary, &table).expect("a permuted structure is a structure")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    pub embeddings: usize,
    /// `|OEmb(Aσ_i, B)| · |bijections_i|` per variant.
    pub per_variant: Vec<usize>,
    pub exact: bool,
}

/// Checks that `g ↦ g∘σ⁻¹` over all variants hits each embedding of `A` exactly once.
pub fn partition_check(a: &EnumStructure, target: &EnumStructure) -> Result<PartitionReport> {
    let all: BTreeSet<Vec<usize>> = enumerate_embeddings(a, target, false)?.into_iter().map(|m| m.values).collect();
    let mut hit: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut per_variant = Vec::new();
    for v in ordered_decomposition(a) {
        let gs = enumerate_embeddings(&v.structure, target, true)?;
        per_variant.push(gs.len() * v.bijections.len());
        for g in &gs {
            for sigma in &v.bijections {
                let mut f = vec![0; sigma.len()];
                for (x, &sx) in sigma.iter().enumerate() {
                    f[sx] = g.values[x];
                }
                *hit.entry(f).or_default() += 1;
            }
        }
    }
    let exact = hit.values().all(|&c| c == 1) && hit.keys().cloned().collect::<BTreeSet<_>>() == all;
    Ok(PartitionReport { embeddings: all.len(), per_variant, exact })
}

/// A coloring of ordered embeddings of `A` into a prefix; colors are keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coloring {
    Constant,
    /// The relation between the first two image levels.
    Edge,
    /// Explicit colors keyed by value sequences.
    Table(BTreeMap<Vec<usize>, u32>),
    /// The canonical form of the closure of the image levels.
    Canonical,
}

impl Coloring {
    pub fn color(&self, values: &[usize], env: &Envelopes) -> Result<Vec<u32>> {
        match self {
            Coloring::Constant => Ok(vec![0]),
            Coloring::Edge => Ok(vec![match values {
                [a, b, ..] => env.prefix().structure().rel(*a, *b) as u32,
                _ => 0,
            }]),
            Coloring::Table(t) => t
                .get(values)
                .map(|&c| vec![c])
                .ok_or_else(|| Error::DomainIncomplete(format!("no color for {values:?}"))),
            Coloring::Canonical => canonical_form(env, values),
        }
    }
}

/// Canonical form of a level set: closure membership flags, the induced table on
/// the closure, meet positions, and positions of splitting, age-change and start
/// levels, each encoded as `2·|closure below| + [in closure]`.
pub fn canonical_form(env: &Envelopes, levels: &[usize]) -> Result<Vec<u32>> {
    let mut l = levels.to_vec();
    l.sort_unstable();
    l.dedup();
    let cl = env.closure(&l)?;
    let mut out = vec![cl.len() as u32];
    out.extend(cl.iter().map(|x| l.binary_search(x).is_ok() as u32));
    let ke = induced_substructure(env.prefix().structure(), &cl)?;
    out.extend(ke.unary_types().iter().map(|&u| u as u32));
    for i in 0..cl.len() {
        for j in i + 1..cl.len() {
            out.push(ke.rel(i, j) as u32);
            let m = env.meet_level(cl[i], cl[j]);
            out.push(cl.binary_search(&m).map_or(u32::MAX, |p| p as u32));
        }
    }
    let pos = |m: usize| 2 * cl.partition_point(|&x| x < m) as u32 + cl.binary_search(&m).is_ok() as u32;
    let report = env.crit(&l)?;
    out.push(report.sp.len() as u32);
    out.extend(report.sp.iter().map(|&m| pos(m)));
    out.push(report.ac.len() as u32);
    out.extend(report.ac.iter().map(|(m, _)| pos(*m)));
    out.extend(report.start.iter().map(|&(_, s)| pos(s)));
    Ok(out)
}

/// Distinct colors of `η∘f` over the ordered embeddings `f` of `A` into the window.
pub fn colors_under(
    embeddings: &[Vec<usize>],
    eta: &[usize],
    coloring: &Coloring,
    env: &Envelopes,
) -> Result<BTreeSet<Vec<u32>>> {
    let mut set = BTreeSet::new();
    for f in embeddings {
        let img: Vec<usize> = f.iter().map(|&x| eta[x]).collect();
        set.insert(coloring.color(&img, env)?);
    }
    Ok(set)
}

pub const EXPERIMENT_DISCLAIMER: &str = "finite-window probe only: the reported count is an upper bound found by search over \
     self-embeddings of a finite window and certifies nothing about big Ramsey degrees";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringExperiment {
    pub window: usize,
    /// Best embedding of the window found.
    pub eta: Vec<usize>,
    pub colors: Vec<Vec<u32>>,
    pub identity_count: usize,
    pub evaluated: usize,
    pub budget_exhausted: bool,
}

impl ColoringExperiment {
    pub fn count(&self) -> usize {
        self.colors.len()
    }
}

/// Searches ordered embeddings of `K_w` into the prefix, in lexicographic order and
/// at most `budget` of them, for one minimizing the number of colors used.
pub fn run_coloring_experiment(
    env: &Envelopes,
    a: &EnumStructure,
    coloring: &Coloring,
    window: usize,
    budget: usize,
    jobs: usize,
) -> Result<ColoringExperiment> {
    let prefix: &LimitPrefix = env.prefix();
    if window > prefix.len() {
        return Err(Error::AmbientTooShallow { need: window, have: prefix.len() });
    }
    let w = prefix.structure().prefix(window);
    let embeddings: Vec<Vec<usize>> = enumerate_embeddings(a, &w, true)?.into_iter().map(|m| m.values).collect();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let mut exhausted = false;
    for_each_embedding(&w, prefix.structure(), true, None, None, &mut |vals| {
        if candidates.len() == budget {
            exhausted = true;
            return true;
        }
        candidates.push(vals.to_vec());
        false
    });
    let identity: Vec<usize> = (0..window).collect();
    let identity_count = colors_under(&embeddings, &identity, coloring, env)?.len();
    let results = par::map(jobs, &candidates, |eta| colors_under(&embeddings, eta, coloring, env));
    let mut best: Option<(usize, BTreeSet<Vec<u32>>)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        if best.as_ref().is_none_or(|(_, b)| r.len() < b.len()) {
            best = Some((i, r));
        }
    }
    let (eta, colors) = match best {
        Some((i, c)) => (candidates[i].clone(), c),
        None => (identity, colors_under(&embeddings, &(0..window).collect::<Vec<_>>(), coloring, env)?),
    };
    Ok(ColoringExperiment {
        window,
        eta,
        colors: colors.into_iter().collect(),
        identity_count,
        evaluated: candidates.len(),
        budget_exhausted: exhausted,
    })
}
