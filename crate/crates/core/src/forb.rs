//! Classes `Forb(F)` of finite structures omitting a finite set of irreducible structures.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::search;
use crate::structure::{embeds, is_irreducible, EnumStructure, Language, View};
use crate::tree::TreeNode;

/// A free amalgamation class given by its forbidden irreducible structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbFamily {
    lang: Language,
    forbidden: Vec<EnumStructure>,
    irr: Vec<EnumStructure>,
    warnings: Vec<String>,
}

impl ForbFamily {
    /// Rejects reducible members; warns when one member embeds in another.
    pub fn new(lang: Language, forbidden: Vec<EnumStructure>) -> Result<Self> {
        for (i, f) in forbidden.iter().enumerate() {
            if f.language() != &lang {
                return Err(Error::LanguageMismatch(format!("forbidden structure {i}")));
            }
            if !is_irreducible(f) {
                return Err(Error::NotIrreducible { index: i });
            }
        }
        let mut warnings = Vec::new();
        for (i, f) in forbidden.iter().enumerate() {
            for (j, g) in forbidden.iter().enumerate() {
                if i != j && embeds(f, g) {
                    warnings.push(format!("forbidden structure {i} embeds into forbidden structure {j}"));
                }
            }
        }
        let mut fam = ForbFamily { lang, forbidden, irr: Vec::new(), warnings };
        fam.irr = fam.compute_irr();
        Ok(fam)
    }

    pub fn language(&self) -> &Language {
        &self.lang
    }

    pub fn forbidden(&self) -> &[EnumStructure] {
        &self.forbidden
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Largest forbidden size, `0` for the empty family.
    pub fn max_forbidden(&self) -> usize {
        self.forbidden.iter().map(|f| f.size()).max().unwrap_or(0)
    }

    /// Membership in the class.
    pub fn contains(&self, a: &EnumStructure) -> Result<bool> {
        if a.language() != &self.lang {
            return Err(Error::LanguageMismatch("structure and family differ".into()));
        }
        Ok(self.contains_view(a))
    }

    pub fn contains_view<V: View + ?Sized>(&self, a: &V) -> bool {
        !self.forbidden.iter().any(|f| embeds(f, a))
    }

    /// Some forbidden copy `(member index, image)` in `a`, if any.
    pub fn first_forbidden_copy(&self, a: &EnumStructure) -> Option<(usize, Vec<usize>)> {
        for (i, f) in self.forbidden.iter().enumerate() {
            let mut found = None;
            search::for_each_embedding(f, a, false, None, None, &mut |v| {
                found = Some(v.to_vec());
                true
            });
            if let Some(v) = found {
                return Some((i, v));
            }
        }
        None
    }

    /// Membership of `view`, assuming it minus point `q` is already in the class.
    pub fn contains_with_new_point<V: View + ?Sized>(&self, view: &V, q: usize) -> bool {
        !search::copy_through(&self.forbidden, view, q)
    }

    /// Enumerated class members that embed into some forbidden structure, sorted by
    /// size, then unary types, then relation table. With nothing forbidden, the
    /// one-point structures of each unary type.
    pub fn irr_structures(&self) -> &[EnumStructure] {
        &self.irr
    }

    fn compute_irr(&self) -> Vec<EnumStructure> {
        if self.forbidden.is_empty() {
            return (0..self.lang.unary_types())
                .map(|u| EnumStructure::from_upper(&self.lang, &[u], &[]).expect("singleton"))
                .collect();
        }
        let mut out: Vec<EnumStructure> = Vec::new();
        for f in &self.forbidden {
            let n = f.size();
            for d in 1..n {
                for_each_injection(n, d, &mut |seq| {
                    let sub = pick(f, seq);
                    if self.contains_view(&sub) && !out.iter().any(|x| x == &sub) {
                        out.push(sub);
                    }
                });
            }
        }
        out.sort_by_key(|a| (a.size(), a.table_key()));
        out
    }

    /// All one-point extensions of `base` that stay in the class, ordered by
    /// unary type and then lexicographically by word. `base` must be in the class.
    pub fn valid_extensions<V: View + ?Sized>(&self, base: &V) -> Vec<ExtensionType> {
        let mut cur = ExtensionCursor::new(&self.lang, base.len(), None);
        let mut out = Vec::new();
        while let Some(e) = cur.next(self, base) {
            out.push(e);
        }
        out
    }

    /// Whether `base` plus a point of type `unary` with relations `word` stays in the class.
    pub fn is_valid_extension<V: View + ?Sized>(&self, base: &V, unary: u8, word: &[u8]) -> bool {
        if unary >= self.lang.unary_types() || word.len() > base.len() || word.iter().any(|&d| d >= self.lang.k()) {
            return false;
        }
        let view = OnePoint { base, j: word.len(), unary, word, flip: self.lang.flip_table() };
        self.contains_with_new_point(&view, word.len())
    }
}

fn pick(f: &EnumStructure, seq: &[usize]) -> EnumStructure {
    let d = seq.len();
    let table: Vec<Vec<u8>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 0 } else { f.rel(seq[i], seq[j]) }).collect())
        .collect();
    let unary: Vec<u8> = seq.iter().map(|&i| f.unary(i)).collect();
    EnumStructure::from_table(f.language(), &unary, &table).expect("substructure of a valid structure")
}

fn for_each_injection(n: usize, d: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, d: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == d {
            visit(cur);
            return;
        }
        for x in 0..n {
            if !cur.contains(&x) {
                cur.push(x);
                rec(n, d, cur, visit);
                cur.pop();
            }
        }
    }
    rec(n, d, &mut Vec::new(), visit);
}

/// A one-point extension type over the first `base_size` points: the new point's
/// unary type and its relations `rel(i, new)` as a word of length `base_size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtensionType {
    pub base_size: usize,
    pub unary: u8,
    pub word: TreeNode,
}

/// The first `j` points of `base` plus one new point at index `j`.
pub(crate) struct OnePoint<'a, V: View + ?Sized> {
    pub base: &'a V,
    pub j: usize,
    pub unary: u8,
    pub word: &'a [u8],
    pub flip: &'a [u8],
}

impl<V: View + ?Sized> View for OnePoint<'_, V> {
    fn len(&self) -> usize {
        self.j + 1
    }
    fn unary(&self, i: usize) -> u8 {
        if i == self.j {
            self.unary
        } else {
            self.base.unary(i)
        }
    }
    fn rel(&self, a: usize, b: usize) -> u8 {
        if b == self.j {
            self.word[a]
        } else if a == self.j {
            self.flip[self.word[b] as usize]
        } else {
            self.base.rel(a, b)
        }
    }
}

/// Lazy depth-first enumeration of valid extensions of a fixed base.
///
/// Invariant: every proper prefix of `path` is a valid partial extension.
/// Without a permutation the order is lexicographic in `(unary, word)`.
#[derive(Clone, Debug)]
pub struct ExtensionCursor {
    base_size: usize,
    k: u8,
    unary_order: Vec<u8>,
    digit_orders: Option<Vec<Vec<u8>>>,
    u_idx: usize,
    path: Vec<u8>,
    exhausted: bool,
}

impl ExtensionCursor {
    /// `rng` permutes the unary order and the digit order at every position.
    pub fn new(lang: &Language, base_size: usize, rng: Option<&mut ChaCha8Rng>) -> Self {
        let mut unary_order: Vec<u8> = (0..lang.unary_types()).collect();
        let digit_orders = rng.map(|r| {
            unary_order.shuffle(r);
            (0..base_size)
                .map(|_| {
                    let mut d: Vec<u8> = (0..lang.k()).collect();
                    d.shuffle(r);
                    d
                })
                .collect()
        });
        ExtensionCursor { base_size, k: lang.k(), unary_order, digit_orders, u_idx: 0, path: Vec::new(), exhausted: false }
    }

    /// Cursor whose order is seeded from `(seed, base_size)`; seed `0` is lexicographic.
    pub fn seeded(lang: &Language, base_size: usize, seed: u64) -> Self {
        if seed == 0 {
            return Self::new(lang, base_size, None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ base_size as u64);
        Self::new(lang, base_size, Some(&mut rng))
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    fn digit(&self, pos: usize, idx: u8) -> u8 {
        match &self.digit_orders {
            Some(o) => o[pos][idx as usize],
            None => idx,
        }
    }

    fn bump(&mut self) {
        while let Some(last) = self.path.last_mut() {
            *last += 1;
            if *last < self.k {
                return;
            }
            self.path.pop();
        }
        self.u_idx += 1;
        if self.u_idx >= self.unary_order.len() {
            self.exhausted = true;
        }
    }

    /// Next valid extension; `base` must have at least `base_size` points, lie in
    /// the class, and agree with the base used by earlier calls.
    pub fn next<V: View + ?Sized>(&mut self, fam: &ForbFamily, base: &V) -> Option<ExtensionType> {
        let flip = fam.language().flip_table();
        let mut word: Vec<u8> = Vec::with_capacity(self.base_size);
        while !self.exhausted {
            word.clear();
            for (pos, &i) in self.path.iter().enumerate() {
                word.push(self.digit(pos, i));
            }
            let unary = self.unary_order[self.u_idx];
            let view = OnePoint { base, j: word.len(), unary, word: &word, flip };
            if fam.contains_with_new_point(&view, word.len()) {
                if word.len() == self.base_size {
                    let e = ExtensionType { base_size: self.base_size, unary, word: TreeNode::from_digits(word) };
                    self.bump();
                    return Some(e);
                }
                self.path.push(0);
            } else {
                self.bump();
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn triangle_free_membership() {
        let tf = triangle_free();
        assert!(!tf.contains(&k3()).unwrap());
        assert!(tf.contains(&p4()).unwrap());
        assert!(tf.first_forbidden_copy(&k3()).is_some());
        assert_eq!(tf.max_forbidden(), 3);
    }

    #[test]
    fn irr_of_triangle_free() {
        let tf = triangle_free();
        assert_eq!(tf.irr_structures(), &[v1(), e2()]);
    }

    #[test]
    fn irr_of_forbidden_edge() {
        let fam = ForbFamily::new(Language::graphs(), vec![e2()]).unwrap();
        assert_eq!(fam.irr_structures(), &[v1()]);
        let two = two_unary_language();
        let e = EnumStructure::from_upper(&two, &[0, 1], &[(0, 1, 1)]).unwrap();
        let fam = ForbFamily::new(two.clone(), vec![e]).unwrap();
        assert_eq!(graphs_two_unary().irr_structures().len(), 2);
        assert_eq!(graphs().irr_structures(), &[v1()]);
        let singles: Vec<Vec<u8>> = fam.irr_structures().iter().map(|s| s.unary_types().to_vec()).collect();
        assert_eq!(singles, vec![vec![0], vec![1]]);
    }

    #[test]
    fn reducible_member_rejected() {
        let err = ForbFamily::new(Language::graphs(), vec![p4()]).unwrap_err();
        assert_eq!(err, Error::NotIrreducible { index: 0 });
    }

    #[test]
    fn nested_members_warn() {
        let fam = ForbFamily::new(Language::graphs(), vec![e2(), k3()]).unwrap();
        assert_eq!(fam.warnings().len(), 1);
    }

    #[test]
    fn extensions_of_an_edge() {
        let tf = triangle_free();
        let words: Vec<String> = tf.valid_extensions(&e2()).iter().map(|e| e.word.to_word()).collect();
        assert_eq!(words, vec!["00", "01", "10"]);
        let all = graphs().valid_extensions(&e2());
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn free_class_has_all_extensions() {
        let g = graphs();
        for m in 0..5 {
            let base = EnumStructure::from_upper(&Language::graphs(), &vec![0; m], &[]).unwrap();
            assert_eq!(g.valid_extensions(&base).len(), 1 << m);
        }
    }

    #[test]
    fn seeded_cursor_is_a_permutation() {
        let tf = triangle_free();
        let base = p4();
        let mut plain = tf.valid_extensions(&base);
        let mut cur = ExtensionCursor::seeded(tf.language(), base.size(), 7);
        let mut permuted = Vec::new();
        while let Some(e) = cur.next(&tf, &base) {
            permuted.push(e);
        }
        plain.sort();
        permuted.sort();
        assert_eq!(plain, permuted);
    }
}
