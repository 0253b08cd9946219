//! Finite prefixes of a left-dense enumeration of the Fraïssé limit.
//!
//! Each new level discharges one obligation `(m, e)`: the extension `e` of `K_m`
//! is realized at level `n` with relation `0` to every point in `[m, n)`. FIFO
//! steps take the oldest pending obligation. Demand steps realize a caller-chosen
//! obligation immediately; they are recorded in the schedule so a prefix can be
//! replayed exactly.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forb::{ExtensionCursor, ExtensionType, ForbFamily};
use crate::structure::{EnumStructure, PrefixView, View};
use crate::tree::TreeNode;

/// How a level's obligation was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObligationKind {
    Fifo,
    Demand,
}

/// The obligation discharged at `level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleEntry {
    pub level: usize,
    pub obligation: ExtensionType,
    pub kind: ObligationKind,
}

/// An enumerated structure `K_N` with its coding nodes and optional schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitPrefix {
    structure: EnumStructure,
    nodes: Vec<TreeNode>,
    schedule: Vec<ScheduleEntry>,
    seed: u64,
}

impl LimitPrefix {
    /// Wraps a structure; `schedule` may be empty for hand-built prefixes.
    pub fn new(structure: EnumStructure, schedule: Vec<ScheduleEntry>, seed: u64) -> Self {
        let ct = crate::tree::coding_tree_of(structure.language(), &structure);
        LimitPrefix { structure, nodes: ct.nodes, schedule, seed }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn structure(&self) -> &EnumStructure {
        &self.structure
    }

    /// Coding node `c(n)`.
    pub fn node(&self, n: usize) -> &TreeNode {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Unary type `u(n)`.
    pub fn unary(&self, n: usize) -> u8 {
        self.structure.unary(n)
    }

    pub fn schedule(&self) -> &[ScheduleEntry] {
        &self.schedule
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn push(&mut self, unary: u8, word: Vec<u8>, entry: Option<ScheduleEntry>) {
        self.structure.push_point(unary, &word);
        self.nodes.push(TreeNode::from_digits(word));
        if let Some(e) = entry {
            self.schedule.push(e);
        }
    }

    /// Whether level `n` realizes `e` with a zero tail.
    pub fn realizes(&self, n: usize, e: &ExtensionType) -> bool {
        n < self.len()
            && n >= e.base_size
            && self.unary(n) == e.unary
            && self.nodes[n].digits()[..e.base_size] == *e.word.digits()
            && self.nodes[n].digits()[e.base_size..].iter().all(|&d| d == 0)
    }
}

/// Incremental prefix builder with a FIFO queue of lazily enumerated obligations.
#[derive(Clone, Debug)]
pub struct Generator {
    family: ForbFamily,
    prefix: LimitPrefix,
    queue: VecDeque<ExtensionCursor>,
    enqueued: usize,
}

impl Generator {
    pub fn new(family: ForbFamily, seed: u64) -> Result<Self> {
        let lang = family.language().clone();
        let empty = EnumStructure::empty(&lang);
        if (0..lang.unary_types()).all(|u| !family.is_valid_extension(&empty, u, &[])) {
            return Err(Error::EmptyClass);
        }
        Ok(Generator { family, prefix: LimitPrefix::new(empty, Vec::new(), seed), queue: VecDeque::new(), enqueued: 0 })
    }

    /// Rebuilds generator state by replaying the schedule of `prefix`.
    pub fn from_prefix(family: ForbFamily, prefix: &LimitPrefix) -> Result<Self> {
        let mut g = Generator::new(family, prefix.seed())?;
        if prefix.schedule().len() != prefix.len() {
            return Err(Error::InvalidObligation("prefix has no complete schedule to replay".into()));
        }
        for entry in prefix.schedule() {
            match entry.kind {
                ObligationKind::Fifo => {
                    let got = g.step().clone();
                    if got.obligation != entry.obligation {
                        return Err(Error::InvalidObligation(format!(
                            "replay diverged at level {}",
                            entry.level
                        )));
                    }
                }
                ObligationKind::Demand => {
                    g.step_demand(entry.obligation.clone())?;
                }
            }
        }
        if g.prefix.structure() != prefix.structure() {
            return Err(Error::InvalidObligation("replayed structure differs".into()));
        }
        Ok(g)
    }

    pub fn family(&self) -> &ForbFamily {
        &self.family
    }

    pub fn prefix(&self) -> &LimitPrefix {
        &self.prefix
    }

    pub fn into_prefix(self) -> LimitPrefix {
        self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    fn enqueue_bases(&mut self) {
        let lang = self.family.language().clone();
        while self.enqueued <= self.prefix.len() {
            self.queue.push_back(ExtensionCursor::seeded(&lang, self.enqueued, self.prefix.seed));
            self.enqueued += 1;
        }
    }

    /// Adds one level discharging the oldest pending obligation.
    pub fn step(&mut self) -> &ScheduleEntry {
        self.enqueue_bases();
        loop {
            let cur = self.queue.front_mut().expect("the current base always has an extension");
            let base = PrefixView { base: self.prefix.structure(), len: cur.base_size() };
            match cur.next(&self.family, &base) {
                Some(e) => {
                    self.realize(e, ObligationKind::Fifo);
                    return self.prefix.schedule.last().expect("just pushed");
                }
                None => {
                    self.queue.pop_front();
                }
            }
        }
    }

    /// Adds one level realizing `e` immediately; `e` must be a valid extension of
    /// `K_{e.base_size}`. Returns the new level.
    pub fn step_demand(&mut self, e: ExtensionType) -> Result<usize> {
        self.enqueue_bases();
        if e.base_size > self.prefix.len() || e.word.level() != e.base_size {
            return Err(Error::InvalidObligation(format!(
                "base size {} with word of level {} over a prefix of length {}",
                e.base_size,
                e.word.level(),
                self.prefix.len()
            )));
        }
        if !self.family.is_valid_extension(self.prefix.structure(), e.unary, e.word.digits()) {
            return Err(Error::InvalidObligation(format!("{} over K_{} leaves the class", e.word, e.base_size)));
        }
        let level = self.prefix.len();
        self.realize(e, ObligationKind::Demand);
        Ok(level)
    }

    fn realize(&mut self, e: ExtensionType, kind: ObligationKind) {
        let n = self.prefix.len();
        let mut word = e.word.digits().to_vec();
        word.resize(n, 0);
        let unary = e.unary;
        self.prefix.push(unary, word, Some(ScheduleEntry { level: n, obligation: e, kind }));
    }
}

/// `n` FIFO levels from a fresh generator.
pub fn generate_prefix(family: &ForbFamily, n: usize, seed: u64) -> Result<LimitPrefix> {
    let mut g = Generator::new(family.clone(), seed)?;
    for _ in 0..n {
        g.step();
    }
    Ok(g.into_prefix())
}

/// Left-density certificate up to a horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub horizon: usize,
    /// `(obligation, least witness level)`.
    pub met: Vec<(ExtensionType, usize)>,
    pub unmet: Vec<ExtensionType>,
    /// Schedule entries whose level does not realize the recorded obligation.
    pub violations: Vec<usize>,
}

/// Checks every valid extension of `K_m`, `m <= horizon`, for a zero-tail witness.
pub fn verify_left_dense(prefix: &LimitPrefix, family: &ForbFamily, horizon: usize) -> DensityReport {
    let mut met = Vec::new();
    let mut unmet = Vec::new();
    for m in 0..=horizon.min(prefix.len().saturating_sub(1)) {
        let base = PrefixView { base: prefix.structure(), len: m };
        for e in family.valid_extensions(&base) {
            match (m..prefix.len()).find(|&n| prefix.realizes(n, &e)) {
                Some(n) => met.push((e, n)),
                None => unmet.push(e),
            }
        }
    }
    let violations = prefix
        .schedule()
        .iter()
        .filter(|s| !prefix.realizes(s.level, &s.obligation))
        .map(|s| s.level)
        .collect();
    DensityReport { horizon, met, unmet, violations }
}
