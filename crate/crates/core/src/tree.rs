//! The tree `T = k^{<ω}` of finite words and coding trees of enumerated structures.
//!
//! The coding node of point `j` is the word `c(j)` of length `j` with
//! `c(j)(i) = rel(i, j)`. Words are ordered by length, then lexicographically.

use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{EnumStructure, Language, View};

/// A word over `0..k`; its length is its level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreeNode(Vec<u8>);

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

impl TreeNode {
    pub fn root() -> Self {
        TreeNode(Vec::new())
    }

    pub fn from_digits(digits: Vec<u8>) -> Self {
        TreeNode(digits)
    }

    /// Parses a digit string such as `"101"`; `k` bounds every digit.
    pub fn parse(s: &str, k: u8) -> Result<Self> {
        let mut d = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let v = ch
                .to_digit(36)
                .ok_or_else(|| Error::Parse(format!("bad digit {ch:?} in node {s:?}")))? as u8;
            if v >= k {
                return Err(Error::BadDigit { digit: v, k });
            }
            d.push(v);
        }
        Ok(TreeNode(d))
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn digit(&self, i: usize) -> u8 {
        self.0[i]
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Longest common initial segment.
    pub fn meet(&self, other: &TreeNode) -> TreeNode {
        let l = self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count();
        TreeNode(self.0[..l].to_vec())
    }

    /// Restriction to level `n`; requires `n <= level`.
    pub fn restrict(&self, n: usize) -> TreeNode {
        TreeNode(self.0[..n].to_vec())
    }

    /// Appends one digit.
    pub fn child(&self, i: u8) -> TreeNode {
        let mut d = self.0.clone();
        d.push(i);
        TreeNode(d)
    }

    /// Pads with zeros up to level `n`.
    pub fn left(&self, n: usize) -> Result<TreeNode> {
        if n < self.level() {
            return Err(Error::TooShort { have: self.level(), want: n });
        }
        let mut d = self.0.clone();
        d.resize(n, 0);
        Ok(TreeNode(d))
    }

    /// True when every digit is `0`.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    /// Number of leading zeros.
    pub fn leading_zeros(&self) -> usize {
        self.0.iter().take_while(|&&d| d == 0).count()
    }

    /// Positions holding a nonzero digit.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &d)| d != 0).map(|(i, _)| i).collect()
    }

    /// The `k` immediate successors in digit order.
    pub fn immediate_successors(&self, k: u8) -> Vec<TreeNode> {
        (0..k).map(|i| self.child(i)).collect()
    }

    /// Extensions at level `n` in lexicographic order, at most `cap` of them.
    pub fn successors(&self, n: usize, k: u8, cap: usize) -> Result<(Vec<TreeNode>, bool)> {
        if n < self.level() {
            return Err(Error::TooShort { have: self.level(), want: n });
        }
        let extra = n - self.level();
        let mut out = Vec::new();
        let mut tail = vec![0u8; extra];
        loop {
            if out.len() >= cap {
                return Ok((out, true));
            }
            let mut d = self.0.clone();
            d.extend_from_slice(&tail);
            out.push(TreeNode(d));
            let mut i = extra;
            loop {
                if i == 0 {
                    return Ok((out, false));
                }
                i -= 1;
                tail[i] += 1;
                if tail[i] < k {
                    break;
                }
                tail[i] = 0;
            }
        }
    }

    /// Index of this node among the `k^level` nodes of its level, in lexicographic order.
    pub fn index(&self, k: u8) -> usize {
        self.0.iter().fold(0usize, |acc, &d| acc * k as usize + d as usize)
    }

    /// Inverse of [`TreeNode::index`].
    pub fn from_index(k: u8, level: usize, mut idx: usize) -> TreeNode {
        let mut d = vec![0u8; level];
        for slot in d.iter_mut().rev() {
            *slot = (idx % k as usize) as u8;
            idx /= k as usize;
        }
        TreeNode(d)
    }

    /// All nodes of level `m` in lexicographic order.
    pub fn level_nodes(k: u8, m: usize) -> Vec<TreeNode> {
        let count = (k as usize).pow(m as u32);
        (0..count).map(|i| TreeNode::from_index(k, m, i)).collect()
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &d in &self.0 {
            write!(f, "{}", DIGITS[d as usize] as char)?;
        }
        Ok(())
    }
}

impl TreeNode {
    /// Digit string with the empty word rendered as `""`.
    pub fn to_word(&self) -> String {
        self.0.iter().map(|&d| DIGITS[d as usize] as char).collect()
    }
}

/// Coding nodes and unary types of an enumerated structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingTree {
    pub lang: Language,
    pub nodes: Vec<TreeNode>,
    pub unary: Vec<u8>,
}

/// Coding tree of `a`.
pub fn coding_tree_of<V: View + ?Sized>(lang: &Language, a: &V) -> CodingTree {
    let nodes = (0..a.len())
        .map(|j| TreeNode((0..j).map(|i| a.rel(i, j)).collect()))
        .collect();
    CodingTree { lang: lang.clone(), nodes, unary: (0..a.len()).map(|i| a.unary(i)).collect() }
}

/// Inverse of [`coding_tree_of`]; rejects malformed input.
pub fn structure_of(ct: &CodingTree) -> Result<EnumStructure> {
    if ct.nodes.len() != ct.unary.len() {
        return Err(Error::InvalidStructure("node and unary lists differ in length".into()));
    }
    let mut entries = Vec::new();
    for (j, c) in ct.nodes.iter().enumerate() {
        if c.level() != j {
            return Err(Error::LevelMismatch(format!("coding node {j} has level {}", c.level())));
        }
        for (i, &v) in c.digits().iter().enumerate() {
            if v >= ct.lang.k() {
                return Err(Error::BadDigit { digit: v, k: ct.lang.k() });
            }
            if v != 0 {
                entries.push((i, j, v));
            }
        }
    }
    EnumStructure::from_upper(&ct.lang, &ct.unary, &entries)
}

/// A map on `T(<depth)` stored level by level; `levels[m][t.index(k)] = f(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeMap {
    k: u8,
    levels: Vec<Vec<TreeNode>>,
}

impl NodeMap {
    pub fn new(k: u8) -> Self {
        NodeMap { k, levels: Vec::new() }
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Number of complete levels in the domain.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Adds the images of `T(depth)`, indexed by node index.
    pub fn push_level(&mut self, images: Vec<TreeNode>) -> Result<()> {
        let want = (self.k as usize).pow(self.levels.len() as u32);
        if images.len() != want {
            return Err(Error::DomainIncomplete(format!(
                "level {} needs {want} images, got {}",
                self.levels.len(),
                images.len()
            )));
        }
        self.levels.push(images);
        Ok(())
    }

    pub fn level(&self, m: usize) -> &[TreeNode] {
        &self.levels[m]
    }

    pub fn get(&self, t: &TreeNode) -> Option<&TreeNode> {
        self.levels.get(t.level()).map(|l| &l[t.index(self.k)])
    }

    /// Restriction to `T(<m)`.
    pub fn truncate(&self, m: usize) -> NodeMap {
        NodeMap { k: self.k, levels: self.levels[..m.min(self.levels.len())].to_vec() }
    }

    /// Image level of each domain level, if uniform.
    pub fn level_map(&self) -> Option<Vec<usize>> {
        self.levels
            .iter()
            .map(|l| {
                let lv = l[0].level();
                l.iter().all(|x| x.level() == lv).then_some(lv)
            })
            .collect()
    }

    /// All `(t, f(t))` pairs in level order.
    pub fn pairs(&self) -> Vec<(TreeNode, TreeNode)> {
        let mut out = Vec::new();
        for (m, l) in self.levels.iter().enumerate() {
            for (i, img) in l.iter().enumerate() {
                out.push((TreeNode::from_index(self.k, m, i), img.clone()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    fn w(s: &str) -> TreeNode {
        TreeNode::parse(s, 3).unwrap()
    }

    #[test]
    fn coding_tree_examples() {
        let lang = Language::graphs();
        let words: Vec<String> = coding_tree_of(&lang, &p4()).nodes.iter().map(|n| n.to_word()).collect();
        assert_eq!(words, vec!["", "1", "01", "101"]);
        let words: Vec<String> = coding_tree_of(&lang, &r4()).nodes.iter().map(|n| n.to_word()).collect();
        assert_eq!(words, vec!["", "1", "10", "010"]);
    }

    #[test]
    fn round_trip_fixtures() {
        for s in [p4(), r4(), k3(), e2(), v1()] {
            let ct = coding_tree_of(s.language(), &s);
            assert_eq!(structure_of(&ct).unwrap(), s);
        }
    }

    #[test]
    fn malformed_coding_tree_rejected() {
        let ct = CodingTree { lang: Language::graphs(), nodes: vec![w(""), w("11")], unary: vec![0, 0] };
        assert!(matches!(structure_of(&ct), Err(Error::LevelMismatch(_))));
        let ct = CodingTree { lang: Language::graphs(), nodes: vec![w(""), w("2")], unary: vec![0, 0] };
        assert!(matches!(structure_of(&ct), Err(Error::BadDigit { .. })));
    }

    #[test]
    fn meet_and_left() {
        assert_eq!(w("101").meet(&w("100")), w("10"));
        assert_eq!(w("101").meet(&w("101")), w("101"));
        assert_eq!(w("1").left(4).unwrap(), w("1000"));
        assert!(matches!(w("101").left(2), Err(Error::TooShort { have: 3, want: 2 })));
        assert_eq!(w("0102").leading_zeros(), 1);
        assert_eq!(w("").to_string(), "ε");
    }

    #[test]
    fn successors_enumerate_in_order() {
        let (s, capped) = w("1").successors(3, 2, 100).unwrap();
        let words: Vec<String> = s.iter().map(|n| n.to_word()).collect();
        assert_eq!(words, vec!["100", "101", "110", "111"]);
        assert!(!capped);
        let (s, capped) = w("1").successors(3, 2, 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(capped);
        assert_eq!(w("").immediate_successors(3), vec![w("0"), w("1"), w("2")]);
    }

    #[test]
    fn index_round_trip() {
        for (i, t) in TreeNode::level_nodes(3, 3).iter().enumerate() {
            assert_eq!(t.index(3), i);
            assert_eq!(TreeNode::from_index(3, 3, i), *t);
        }
    }
}
