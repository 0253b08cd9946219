//! Finite enumerated structures in a language of binary relations.
//!
//! A language has relation values `0..k`, where `0` means "no relation", and an
//! involution `flip` with `flip(0) = 0`. Every ordered pair of distinct points
//! carries exactly one value and `rel(a, b) = flip(rel(b, a))`. Points also
//! carry a unary type in `0..unary_types`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::search;

/// Relation alphabet with its flip involution and the number of unary types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Language {
    k: u8,
    flip: Vec<u8>,
    unary_types: u8,
}

impl Language {
    /// Language with `k` relation values, the given flip and `k` unary types.
    pub fn new(k: u8, flip: Vec<u8>) -> Result<Self> {
        Self::with_unary_types(k, flip, k)
    }

    pub fn with_unary_types(k: u8, flip: Vec<u8>, unary_types: u8) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidLanguage(format!("k must be at least 2, got {k}")));
        }
        if k > 36 {
            return Err(Error::InvalidLanguage(format!("k must be at most 36, got {k}")));
        }
        if unary_types == 0 {
            return Err(Error::InvalidLanguage("at least one unary type is required".into()));
        }
        if flip.len() != k as usize {
            return Err(Error::InvalidLanguage(format!(
                "flip has length {}, expected {k}",
                flip.len()
            )));
        }
        if flip[0] != 0 {
            return Err(Error::InvalidLanguage("flip(0) must be 0".into()));
        }
        for (i, &v) in flip.iter().enumerate() {
            if v >= k {
                return Err(Error::InvalidLanguage(format!("flip({i}) = {v} is out of range")));
            }
            if flip[v as usize] as usize != i {
                return Err(Error::InvalidLanguage(format!("flip is not an involution at {i}")));
            }
        }
        Ok(Language { k, flip, unary_types })
    }

    /// Identity flip, so every relation is symmetric.
    pub fn symmetric(k: u8, unary_types: u8) -> Result<Self> {
        Self::with_unary_types(k, (0..k).collect(), unary_types)
    }

    /// Simple graphs: one edge value, one vertex type.
    pub fn graphs() -> Self {
        Self::symmetric(2, 1).expect("graph language is valid")
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn unary_types(&self) -> u8 {
        self.unary_types
    }

    pub fn flip(&self, v: u8) -> u8 {
        self.flip[v as usize]
    }

    pub fn flip_table(&self) -> &[u8] {
        &self.flip
    }
}

/// Read access to an enumerated structure; lets searches run over virtual structures.
pub trait View {
    fn len(&self) -> usize;
    fn unary(&self, i: usize) -> u8;
    /// Relation value for `i != j`.
    fn rel(&self, i: usize, j: usize) -> u8;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A structure on `{0, ..., n-1}` stored as a full relation table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnumStructure {
    lang: Language,
    unary: Vec<u8>,
    rel: Vec<u8>,
}

/// One reason a candidate table fails to define a structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Relation value or unary type outside the alphabet.
    Range { a: usize, b: usize, value: u8 },
    /// Entry on the diagonal.
    Diagonal { a: usize },
    /// Point index outside the universe.
    Index { a: usize, b: usize },
    /// `rel(a, b) != flip(rel(b, a))`.
    Flip { a: usize, b: usize },
}

/// Checks a pair table against the language. Missing pairs are `0`.
pub fn validate_structure(
    lang: &Language,
    unary: &[u8],
    rel: &BTreeMap<(usize, usize), u8>,
) -> std::result::Result<EnumStructure, Vec<Violation>> {
    let n = unary.len();
    let mut violations = Vec::new();
    for (a, &u) in unary.iter().enumerate() {
        if u >= lang.unary_types {
            violations.push(Violation::Range { a, b: a, value: u });
        }
    }
    let mut table = vec![0u8; n * n];
    for (&(a, b), &v) in rel {
        if a >= n || b >= n {
            violations.push(Violation::Index { a, b });
            continue;
        }
        if a == b {
            violations.push(Violation::Diagonal { a });
            continue;
        }
        if v >= lang.k {
            violations.push(Violation::Range { a, b, value: v });
            continue;
        }
        table[a * n + b] = v;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if table[a * n + b] != lang.flip(table[b * n + a]) {
                violations.push(Violation::Flip { a, b });
            }
        }
    }
    if violations.is_empty() {
        Ok(EnumStructure { lang: lang.clone(), unary: unary.to_vec(), rel: table })
    } else {
        Err(violations)
    }
}

impl EnumStructure {
    /// Empty structure.
    pub fn empty(lang: &Language) -> Self {
        EnumStructure { lang: lang.clone(), unary: Vec::new(), rel: Vec::new() }
    }

    /// Builds from entries `(a, b, v)` with `a < b`; the reverse direction is `flip(v)`.
    pub fn from_upper(lang: &Language, unary: &[u8], entries: &[(usize, usize, u8)]) -> Result<Self> {
        let n = unary.len();
        let mut s = EnumStructure { lang: lang.clone(), unary: unary.to_vec(), rel: vec![0; n * n] };
        for (i, &u) in unary.iter().enumerate() {
            if u >= lang.unary_types {
                return Err(Error::InvalidStructure(format!("unary type {u} of point {i} out of range")));
            }
        }
        for &(a, b, v) in entries {
            if a >= b || b >= n {
                return Err(Error::InvalidStructure(format!("entry ({a}, {b}) needs a < b < {n}")));
            }
            if v >= lang.k {
                return Err(Error::InvalidStructure(format!("value {v} at ({a}, {b}) out of range")));
            }
            s.rel[a * n + b] = v;
            s.rel[b * n + a] = lang.flip(v);
        }
        Ok(s)
    }

    /// Builds from a full relation table; `table[a][b]` for `a != b`.
    pub fn from_table(lang: &Language, unary: &[u8], table: &[Vec<u8>]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, row) in table.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if a != b && v != 0 {
                    map.insert((a, b), v);
                }
            }
        }
        validate_structure(lang, unary, &map)
            .map_err(|v| Error::InvalidStructure(format!("{v:?}")))
    }

    /// Copies any view into an owned structure.
    pub fn from_view<V: View + ?Sized>(lang: &Language, view: &V) -> Self {
        let n = view.len();
        let mut rel = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    rel[a * n + b] = view.rel(a, b);
                }
            }
        }
        EnumStructure { lang: lang.clone(), unary: (0..n).map(|i| view.unary(i)).collect(), rel }
    }

    pub fn language(&self) -> &Language {
        &self.lang
    }

    pub fn size(&self) -> usize {
        self.unary.len()
    }

    pub fn unary_types(&self) -> &[u8] {
        &self.unary
    }

    /// Nonzero entries `(a, b, v)` with `a < b`.
    pub fn upper_entries(&self) -> Vec<(usize, usize, u8)> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                let v = self.rel[a * n + b];
                if v != 0 {
                    out.push((a, b, v));
                }
            }
        }
        out
    }

    /// Appends one point with the given relations `rel(i, new)` to each existing point.
    pub fn push_point(&mut self, unary: u8, word: &[u8]) {
        let n = self.size();
        debug_assert_eq!(word.len(), n);
        let m = n + 1;
        let mut rel = vec![0u8; m * m];
        for a in 0..n {
            rel[a * m..a * m + n].copy_from_slice(&self.rel[a * n..a * n + n]);
            rel[a * m + n] = word[a];
            rel[n * m + a] = self.lang.flip(word[a]);
        }
        self.rel = rel;
        self.unary.push(unary);
    }

    /// The substructure on the first `m` points.
    pub fn prefix(&self, m: usize) -> EnumStructure {
        let idx: Vec<usize> = (0..m.min(self.size())).collect();
        self.induce(&idx)
    }

    fn induce(&self, idx: &[usize]) -> EnumStructure {
        let m = idx.len();
        let mut rel = vec![0u8; m * m];
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                if i != j {
                    rel[i * m + j] = self.rel(a, b);
                }
            }
        }
        EnumStructure { lang: self.lang.clone(), unary: idx.iter().map(|&a| self.unary[a]).collect(), rel }
    }

    /// Canonical key for deduplication: unary types followed by the table.
    pub fn table_key(&self) -> (Vec<u8>, Vec<u8>) {
        (self.unary.clone(), self.rel.clone())
    }
}

impl View for EnumStructure {
    fn len(&self) -> usize {
        self.unary.len()
    }
    fn unary(&self, i: usize) -> u8 {
        self.unary[i]
    }
    fn rel(&self, i: usize, j: usize) -> u8 {
        self.rel[i * self.unary.len() + j]
    }
}

/// The first `len` points of a larger view.
pub struct PrefixView<'a, V: View + ?Sized> {
    pub base: &'a V,
    pub len: usize,
}

impl<V: View + ?Sized> View for PrefixView<'_, V> {
    fn len(&self) -> usize {
        self.len
    }
    fn unary(&self, i: usize) -> u8 {
        self.base.unary(i)
    }
    fn rel(&self, i: usize, j: usize) -> u8 {
        self.base.rel(i, j)
    }
}

/// A map between universes. `ordered` records whether it was requested as order preserving.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructMap {
    pub values: Vec<usize>,
    pub ordered: bool,
}

impl StructMap {
    /// True when the map is an embedding of `a` into `b` (order preserving if `ordered`).
    pub fn is_embedding<V: View + ?Sized>(&self, a: &EnumStructure, b: &V) -> bool {
        is_embedding_values(&self.values, a, b, self.ordered)
    }
}

/// Embedding test for a raw value vector.
pub fn is_embedding_values<V: View + ?Sized>(values: &[usize], a: &EnumStructure, b: &V, ordered: bool) -> bool {
    if values.len() != a.size() {
        return false;
    }
    for (i, &x) in values.iter().enumerate() {
        if x >= b.len() || b.unary(x) != a.unary(i) {
            return false;
        }
        if ordered && i > 0 && values[i - 1] >= x {
            return false;
        }
        for (j, &y) in values.iter().enumerate().take(i) {
            if x == y || b.rel(y, x) != a.rel(j, i) {
                return false;
            }
        }
    }
    true
}

fn check_same_language(a: &Language, b: &Language) -> Result<()> {
    if a != b {
        return Err(Error::LanguageMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// All embeddings of `a` into `b`, in lexicographic order of value sequences.
pub fn enumerate_embeddings(a: &EnumStructure, b: &EnumStructure, ordered: bool) -> Result<Vec<StructMap>> {
    check_same_language(&a.lang, &b.lang)?;
    let mut out = Vec::new();
    search::for_each_embedding(a, b, ordered, None, None, &mut |vals| {
        out.push(StructMap { values: vals.to_vec(), ordered });
        false
    });
    Ok(out)
}

/// Whether some embedding of `a` into `b` exists.
pub fn embeds<V: View + ?Sized>(a: &EnumStructure, b: &V) -> bool {
    search::for_each_embedding(a, b, false, None, None, &mut |_| true)
}

/// The substructure on a set of points, enumerated in increasing order.
pub fn induced_substructure(a: &EnumStructure, points: &[usize]) -> Result<EnumStructure> {
    let mut idx = points.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&p| p >= a.size()) {
        return Err(Error::OutOfRange { index: bad, size: a.size() });
    }
    Ok(a.induce(&idx))
}

/// Irreducible: every pair of distinct points is related.
pub fn is_irreducible<V: View + ?Sized>(a: &V) -> bool {
    let n = a.len();
    (0..n).all(|i| ((i + 1)..n).all(|j| a.rel(i, j) != 0))
}

/// Result of a free amalgamation: `d` with embeddings `r: b -> d`, `s: c -> d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub d: EnumStructure,
    pub r: StructMap,
    pub s: StructMap,
}

/// Free amalgam of `f: a -> b` and `g: a -> c`. Points of `b` come first, then the
/// points of `c` outside `g[a]` in increasing order; cross pairs outside the common
/// part are unrelated.
pub fn free_amalgam(
    a: &EnumStructure,
    b: &EnumStructure,
    c: &EnumStructure,
    f: &StructMap,
    g: &StructMap,
) -> Result<Amalgam> {
    check_same_language(&a.lang, &b.lang)?;
    check_same_language(&a.lang, &c.lang)?;
    if !is_embedding_values(&f.values, a, b, false) {
        return Err(Error::BadMap("f is not an embedding".into()));
    }
    if !is_embedding_values(&g.values, a, c, false) {
        return Err(Error::BadMap("g is not an embedding".into()));
    }
    let nb = b.size();
    let mut s_vals = vec![usize::MAX; c.size()];
    for (i, &gv) in g.values.iter().enumerate() {
        s_vals[gv] = f.values[i];
    }
    let mut next = nb;
    for v in s_vals.iter_mut() {
        if *v == usize::MAX {
            *v = next;
            next += 1;
        }
    }
    let n = next;
    let mut unary = b.unary.clone();
    unary.resize(n, 0);
    for (x, &sx) in s_vals.iter().enumerate() {
        unary[sx] = c.unary[x];
    }
    let mut table = vec![vec![0u8; n]; n];
    for (x, row) in table.iter_mut().enumerate().take(nb) {
        for (y, cell) in row.iter_mut().enumerate().take(nb) {
            if x != y {
                *cell = b.rel(x, y);
            }
        }
    }
    for x in 0..c.size() {
        for y in 0..c.size() {
            if x != y {
                table[s_vals[x]][s_vals[y]] = c.rel(x, y);
            }
        }
    }
    let d = EnumStructure::from_table(&a.lang, &unary, &table)?;
    Ok(Amalgam {
        d,
        r: StructMap { values: (0..nb).collect(), ordered: false },
        s: StructMap { values: s_vals, ordered: false },
    })
}
