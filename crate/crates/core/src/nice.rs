//! The auxiliary structure `Y`, nice embeddings `η : Y → K`, and the envelope
//! built from `η`-copies of irreducible pieces.
//!
//! `Y` adds, for each base point `a`, one copy of `dom(I)` for every ordered
//! embedding of an irreducible `I` ending at `a`. A copy point `(a, r, b)` is
//! related to a base point `n` only when `n > a`, and then like `Irr(a, r)(b)`.
//! The order puts all copies of `a` between `a − 1` and `a`.
//!
//! `η` is nice when every nonzero `R(m, η(y))` has `m ∈ ran η`. Greedy placement
//! in `<_Y` order looks for the least level coding exactly the required word
//! (required digits on `ran η`, zeros elsewhere).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::envelope::Envelopes;
use crate::error::{Error, Result};
use crate::forb::{ExtensionType, ForbFamily};
use crate::limit::{Generator, LimitPrefix};
use crate::structure::{enumerate_embeddings, EnumStructure, View};
use crate::tree::TreeNode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum YPoint {
    Base(usize),
    Copy { a: usize, r: usize, b: usize },
}

/// `Irr(a, r)`: an ordered embedding of `Irr(K)[irr]` into `K` ending at `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrMap {
    pub irr: usize,
    pub values: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct YStructure {
    horizon: usize,
    points: Vec<YPoint>,
    irr: Vec<Vec<IrrMap>>,
    structure: EnumStructure,
}

impl YStructure {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Materialized points in `<_Y` order.
    pub fn points(&self) -> &[YPoint] {
        &self.points
    }

    /// `Irr(a)` in its fixed order.
    pub fn irr(&self, a: usize) -> &[IrrMap] {
        &self.irr[a]
    }

    /// The materialized part of `Y`, enumerated in `<_Y` order.
    pub fn structure(&self) -> &EnumStructure {
        &self.structure
    }

    pub fn position(&self, p: YPoint) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }
}

/// `Irr(a)` over `prefix`: by irreducible index, then by values lexicographically.
pub fn irr_maps(family: &ForbFamily, prefix: &EnumStructure, a: usize) -> Vec<IrrMap> {
    let upto = prefix.prefix(a + 1);
    let mut out = Vec::new();
    for (i, s) in family.irr_structures().iter().enumerate() {
        for f in enumerate_embeddings(s, &upto, true).expect("same language") {
            if f.values.last() == Some(&a) {
                out.push(IrrMap { irr: i, values: f.values });
            }
        }
    }
    out
}

/// Materializes `Y` over `K_{horizon}`.
pub fn build_y(family: &ForbFamily, prefix: &LimitPrefix, horizon: usize) -> Result<YStructure> {
    if horizon > prefix.len() {
        return Err(Error::AmbientTooShallow { need: horizon, have: prefix.len() });
    }
    let k = prefix.structure();
    let irr: Vec<Vec<IrrMap>> = (0..horizon).map(|a| irr_maps(family, k, a)).collect();
    let mut points = Vec::new();
    for (a, maps) in irr.iter().enumerate() {
        for (r, m) in maps.iter().enumerate() {
            points.extend((0..m.values.len()).map(|b| YPoint::Copy { a, r, b }));
        }
        points.push(YPoint::Base(a));
    }
    let irrs = family.irr_structures();
    let unary_of = |p: YPoint| match p {
        YPoint::Base(n) => k.unary(n),
        YPoint::Copy { a, r, b } => irrs[irr[a][r].irr].unary(b),
    };
    // Relation from an earlier point `p` to a later point `q` in `<_Y`.
    let rel = |p: YPoint, q: YPoint| -> u8 {
        match (p, q) {
            (YPoint::Base(m), YPoint::Base(n)) => k.rel(m, n),
            (YPoint::Copy { a, r, b }, YPoint::Base(n)) => {
                if n <= a {
                    0
                } else {
                    k.rel(irr[a][r].values[b], n)
                }
            }
            // Every base point before a copy of `a` is at most `a`.
            (YPoint::Base(_), YPoint::Copy { .. }) => 0,
            (YPoint::Copy { a, r, b }, YPoint::Copy { a: a2, r: r2, b: b2 }) => {
                if (a, r) == (a2, r2) {
                    irrs[irr[a][r].irr].rel(b, b2)
                } else {
                    0
                }
            }
        }
    };
    let mut structure = EnumStructure::empty(family.language());
    for (j, &q) in points.iter().enumerate() {
        let word: Vec<u8> = points[..j].iter().map(|&p| rel(p, q)).collect();
        structure.push_point(unary_of(q), &word);
    }
    Ok(YStructure { horizon, points, irr, structure })
}

/// An ordered embedding of the materialized part of `Y` into a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceEmbedding {
    points: Vec<YPoint>,
    eta: Vec<usize>,
    by_level: BTreeMap<usize, usize>,
}

impl NiceEmbedding {
    fn new(points: Vec<YPoint>, eta: Vec<usize>) -> Self {
        let by_level = eta.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        NiceEmbedding { points, eta, by_level }
    }

    /// `η` on the points of `Y` in `<_Y` order.
    pub fn levels(&self) -> &[usize] {
        &self.eta
    }

    pub fn points(&self) -> &[YPoint] {
        &self.points
    }

    pub fn image(&self, p: YPoint) -> Option<usize> {
        self.points.iter().position(|&q| q == p).map(|i| self.eta[i])
    }

    /// The `Y` point mapped to `level`, if any.
    pub fn preimage(&self, level: usize) -> Option<YPoint> {
        self.by_level.get(&level).map(|&i| self.points[i])
    }

    /// `η(n)` for each base point `n`, in order.
    pub fn base_levels(&self) -> Vec<usize> {
        self.points.iter().zip(&self.eta).filter(|(p, _)| matches!(p, YPoint::Base(_))).map(|(_, &l)| l).collect()
    }

    /// Pairs `(y, m)` with `m < η(y)`, `R(m, η(y)) ≠ 0` and `m ∉ ran η`.
    pub fn nice_violations(&self, prefix: &LimitPrefix) -> Vec<(YPoint, usize)> {
        let mut out = Vec::new();
        for (i, &n) in self.eta.iter().enumerate() {
            for (m, &d) in prefix.node(n).digits().iter().enumerate() {
                if d != 0 && !self.by_level.contains_key(&m) {
                    out.push((self.points[i], m));
                }
            }
        }
        out
    }

    /// Checks `c(n)|_{η(y1)} = Left(c(n)|_{η(y0)+1}, η(y1))` for `n = η(y)` and
    /// consecutive `y0 < y1 ≤ y`. Returns the failing `(y, y1)` pairs.
    pub fn left_pattern_violations(&self, prefix: &LimitPrefix) -> Vec<(YPoint, YPoint)> {
        let mut out = Vec::new();
        for (j, &n) in self.eta.iter().enumerate() {
            let c = prefix.node(n);
            for i1 in 1..=j {
                let (l0, l1) = (self.eta[i1 - 1], self.eta[i1]);
                let ok = c.restrict(l0 + 1).left(l1).map(|x| x == c.restrict(l1)).unwrap_or(false);
                if !ok {
                    out.push((self.points[j], self.points[i1]));
                }
            }
        }
        out
    }

    /// Whether `η` is an ordered embedding of `Y` into `prefix`.
    pub fn is_ordered_embedding(&self, y: &YStructure, prefix: &LimitPrefix) -> bool {
        let s = y.structure();
        let k = prefix.structure();
        self.eta.windows(2).all(|w| w[0] < w[1])
            && (0..s.size()).all(|i| {
                s.unary(i) == k.unary(self.eta[i]) && (0..i).all(|j| s.rel(j, i) == k.rel(self.eta[j], self.eta[i]))
            })
    }
}

/// The extension type the next point needs: required digits on `ran η`, zeros
/// elsewhere, over the base `K_{last + 1}`.
fn requirement(y: &YStructure, eta: &[usize]) -> ExtensionType {
    let j = eta.len();
    let base_size = eta.last().map_or(0, |&l| l + 1);
    let mut word = vec![0u8; base_size];
    for (i, &l) in eta.iter().enumerate() {
        word[l] = y.structure().rel(i, j);
    }
    ExtensionType { base_size, unary: y.structure().unary(j), word: TreeNode::from_digits(word) }
}

/// Greedy nice embedding into a fixed prefix, scanning at most `budget` levels.
pub fn nice_embedding(y: &YStructure, prefix: &LimitPrefix, budget: usize) -> Result<NiceEmbedding> {
    let mut eta: Vec<usize> = Vec::with_capacity(y.points().len());
    let mut spent = 0usize;
    for _ in 0..y.points().len() {
        let e = requirement(y, &eta);
        let mut found = None;
        for n in e.base_size..prefix.len() {
            if spent == budget {
                return Err(Error::BudgetExhausted { spent });
            }
            spent += 1;
            if prefix.realizes(n, &e) {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => eta.push(n),
            None => return Err(Error::BudgetExhausted { spent }),
        }
    }
    Ok(NiceEmbedding::new(y.points().to_vec(), eta))
}

/// Greedy nice embedding that grows `gen` by demand steps when the current
/// prefix has no suitable level.
pub fn nice_embedding_growing(y: &YStructure, gen: &mut Generator) -> Result<NiceEmbedding> {
    let mut eta: Vec<usize> = Vec::with_capacity(y.points().len());
    for _ in 0..y.points().len() {
        let e = requirement(y, &eta);
        let p = gen.prefix();
        let found = (e.base_size..p.len()).find(|&n| p.realizes(n, &e));
        let n = match found {
            Some(n) => n,
            None => gen.step_demand(e)?,
        };
        eta.push(n);
    }
    Ok(NiceEmbedding::new(y.points().to_vec(), eta))
}

/// `E = S ∪ η[copies resolving Crit(S) ∪ Start(S)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceEnvelope {
    pub levels: Vec<usize>,
    /// Each critical or start level with the copy point it resolves to.
    pub resolved: Vec<(usize, YPoint)>,
}

pub fn nice_envelope(s: &[usize], eta: &NiceEmbedding, y: &YStructure, env: &Envelopes) -> Result<NiceEnvelope> {
    let base = eta.base_levels();
    if let Some(&bad) = s.iter().find(|x| !base.contains(x)) {
        return Err(Error::BadMap(format!("level {bad} is not the image of a base point")));
    }
    let report = env.crit(s)?;
    let mut need: Vec<usize> = report.crit();
    // An all-zero coding node has Start(s) = s, which is already in S.
    need.extend(report.start.iter().filter(|&&(x, st)| st != x).map(|&(_, st)| st));
    need.sort_unstable();
    need.dedup();
    let mut levels: Vec<usize> = report.levels.clone();
    let mut resolved = Vec::new();
    for n in need {
        match eta.preimage(n) {
            Some(p @ YPoint::Copy { a, r, .. }) => {
                resolved.push((n, p));
                let d = y.irr(a)[r].values.len();
                for b in 0..d {
                    levels.push(eta.image(YPoint::Copy { a, r, b }).expect("copies are materialized together"));
                }
            }
            _ => return Err(Error::CritResolutionFailure { level: n }),
        }
    }
    levels.sort_unstable();
    levels.dedup();
    Ok(NiceEnvelope { levels, resolved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{envelope_size_bound, EnvelopeMode};
    use crate::fixtures::*;
    use crate::limit::generate_prefix;

    #[test]
    fn irr_of_p4_under_tf() {
        let tf = triangle_free();
        let p = LimitPrefix::new(p4(), Vec::new(), 0);
        let y = build_y(&tf, &p, 2).unwrap();
        assert_eq!(y.irr(0), &[IrrMap { irr: 0, values: vec![0] }]);
        assert_eq!(y.irr(1), &[IrrMap { irr: 0, values: vec![1] }, IrrMap { irr: 1, values: vec![0, 1] }]);
        assert_eq!(
            y.points(),
            &[
                YPoint::Copy { a: 0, r: 0, b: 0 },
                YPoint::Base(0),
                YPoint::Copy { a: 1, r: 0, b: 0 },
                YPoint::Copy { a: 1, r: 1, b: 0 },
                YPoint::Copy { a: 1, r: 1, b: 1 },
                YPoint::Base(1),
            ]
        );
        // The edge copy is an induced edge, related to nothing else.
        let s = y.structure();
        assert_eq!(s.rel(3, 4), 1);
        assert_eq!(s.rel(1, 5), 1);
        assert_eq!((0..6).filter(|&i| i != 3 && i != 4).map(|i| s.rel(i.min(3), i.max(3))).sum::<u8>(), 0);
        assert!(tf.contains(s).unwrap());
    }

    #[test]
    fn free_class_irr_is_one_singleton_per_point() {
        let g = graphs();
        let p = generate_prefix(&g, 5, 0).unwrap();
        let y = build_y(&g, &p, 5).unwrap();
        for a in 0..5 {
            assert_eq!(y.irr(a).len(), 1);
        }
        assert_eq!(y.points().len(), 10);
    }

    #[test]
    fn nice_embedding_properties() {
        let tf = triangle_free();
        let mut gen = Generator::new(tf.clone(), 0).unwrap();
        for _ in 0..24 {
            gen.step();
        }
        let base = gen.prefix().clone();
        let y = build_y(&tf, &base, 4).unwrap();
        assert!(tf.contains(y.structure()).unwrap());
        let eta = nice_embedding_growing(&y, &mut gen).unwrap();
        let p = gen.prefix().clone();
        assert!(eta.is_ordered_embedding(&y, &p));
        assert!(eta.nice_violations(&p).is_empty());
        assert!(eta.left_pattern_violations(&p).is_empty());
        // The fixed-prefix search reproduces the same greedy choice.
        assert_eq!(nice_embedding(&y, &p, usize::MAX).unwrap(), eta);
        assert!(matches!(nice_embedding(&y, &p, 3), Err(Error::BudgetExhausted { .. })));

        let env = Envelopes::new(&p, &tf);
        let base_levels = eta.base_levels();
        for i in 0..base_levels.len() {
            for j in i..base_levels.len() {
                let s: Vec<usize> = if i == j { vec![base_levels[i]] } else { vec![base_levels[i], base_levels[j]] };
                let e = nice_envelope(&s, &eta, &y, &env).unwrap();
                assert!(env.is_envelope(&e.levels, EnvelopeMode::Combinatorial).unwrap().is_envelope);
                assert!(e.levels.len() as u128 <= envelope_size_bound(s.len(), &tf));
                let cl = env.closure(&s).unwrap();
                assert!(cl.iter().all(|x| e.levels.contains(x)));
                assert_eq!(env.interior(&cl).unwrap().iter().copied().collect::<std::collections::BTreeSet<_>>(), s.iter().copied().collect());
            }
        }
        assert!(matches!(nice_envelope(&[eta.levels()[0]], &eta, &y, &env), Err(Error::BadMap(_))));
    }
}
