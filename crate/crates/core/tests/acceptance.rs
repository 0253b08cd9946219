//! Acceptance harness. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Reference values come from brute-force
//! oracles defined in this file, not from the library.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bigramsey::aemb::{extend_aged_embedding_growing, find_aged_embedding_growing, is_aged_embedding, prime_of};
use bigramsey::agemap::is_age_map;
use bigramsey::degrees::{canonical_form, census, degree_bound, ordered_decomposition, partition_check};
use bigramsey::envelope::{crit_bound, EnvelopeMode, Envelopes};
use bigramsey::fixtures::{e2, graphs, no_directed_triangle, r4, triangle_free};
use bigramsey::forb::ForbFamily;
use bigramsey::io::PrefixJson;
use bigramsey::limit::{generate_prefix, Generator, LimitPrefix};
use bigramsey::nice::{build_y, nice_embedding_growing, nice_envelope, YPoint};
use bigramsey::structure::{induced_substructure, EnumStructure, Language, View};
use bigramsey::tree::{coding_tree_of, structure_of, NodeMap, TreeNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Table-level oracles
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
struct Table {
    unary: Vec<u8>,
    rel: Vec<Vec<u8>>,
}

impl Table {
    fn of<V: View + ?Sized>(v: &V) -> Table {
        let n = v.len();
        Table {
            unary: (0..n).map(|i| v.unary(i)).collect(),
            rel: (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { v.rel(i, j) }).collect()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.unary.len()
    }

    fn build(&self, lang: &Language) -> EnumStructure {
        EnumStructure::from_table(lang, &self.unary, &self.rel).expect("oracle tables are structures")
    }

    /// Appends a point whose relation from each old point `i` is `word[i]`.
    fn push(&mut self, unary: u8, word: &[u8], flip: &[u8]) {
        let n = self.len();
        for (i, row) in self.rel.iter_mut().enumerate() {
            row.push(word[i]);
        }
        self.rel.push((0..n).map(|i| flip[word[i] as usize]).chain([0]).collect());
        self.unary.push(unary);
    }

    fn induced(&self, pts: &[usize]) -> Table {
        Table {
            unary: pts.iter().map(|&p| self.unary[p]).collect(),
            rel: pts.iter().map(|&p| pts.iter().map(|&q| self.rel[p][q]).collect()).collect(),
        }
    }
}

/// Whether some injection of `f` into `t` preserves unary types and relations.
fn embeds_brute(f: &Table, t: &Table) -> bool {
    fn go(f: &Table, t: &Table, img: &mut Vec<usize>) -> bool {
        let i = img.len();
        if i == f.len() {
            return true;
        }
        for c in 0..t.len() {
            if img.contains(&c) || t.unary[c] != f.unary[i] {
                continue;
            }
            if img.iter().enumerate().all(|(j, &d)| t.rel[d][c] == f.rel[j][i]) {
                img.push(c);
                if go(f, t, img) {
                    return true;
                }
                img.pop();
            }
        }
        false
    }
    go(f, t, &mut Vec::new())
}

fn member_brute(t: &Table, forbidden: &[Table]) -> bool {
    forbidden.iter().all(|f| !embeds_brute(f, t))
}

/// Every table on `n` points over the language, members or not.
fn all_tables(lang: &Language, n: usize) -> Vec<Table> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let k = lang.k() as usize;
    let u = lang.unary_types() as usize;
    let mut out = Vec::new();
    let total_rel = k.pow(pairs.len() as u32);
    let total_un = u.pow(n as u32);
    for code_u in 0..total_un {
        let mut x = code_u;
        let unary: Vec<u8> = (0..n)
            .map(|_| {
                let d = (x % u) as u8;
                x /= u;
                d
            })
            .collect();
        for code in 0..total_rel {
            let mut rel = vec![vec![0u8; n]; n];
            let mut c = code;
            for &(a, b) in &pairs {
                let v = (c % k) as u8;
                c /= k;
                rel[a][b] = v;
                rel[b][a] = lang.flip(v);
            }
            out.push(Table { unary: unary.clone(), rel });
        }
    }
    out
}

fn members_brute(lang: &Language, forbidden: &[Table], n: usize) -> Vec<Table> {
    all_tables(lang, n).into_iter().filter(|t| member_brute(t, forbidden)).collect()
}

fn forbidden_tables(f: &ForbFamily) -> Vec<Table> {
    f.forbidden().iter().map(Table::of).collect()
}

/// `B[φ, A]`: `A_m` followed by `B`, with `rel(i, m+q) = labels[q][i]`.
fn realize_brute(b: &Table, labels: &[&TreeNode], ctx: &Table, flip: &[u8]) -> Table {
    let m = labels.first().map_or(0, |l| l.level());
    let mut t = ctx.induced(&(0..m).collect::<Vec<_>>());
    for (q, label) in labels.iter().enumerate() {
        let mut word: Vec<u8> = label.digits().to_vec();
        word.extend((0..q).map(|p| b.rel[p][q]));
        t.push(b.unary[q], &word, flip);
    }
    t
}

/// Unbounded-size age-map test over every member `B` with `|B| <= max_b` and
/// every labeling, with no pruning.
fn age_map_brute(
    pairs: &[(TreeNode, TreeNode)],
    src: &Table,
    tgt: &Table,
    members: &[Vec<Table>],
    forbidden: &[Table],
    flip: &[u8],
) -> bool {
    let srcs: BTreeSet<&TreeNode> = pairs.iter().map(|p| &p.1).collect();
    if srcs.len() != pairs.len() {
        return false;
    }
    let c = pairs.len();
    for (size, list) in members.iter().enumerate() {
        let combos = c.pow(size as u32);
        for b in list {
            for code in 0..combos {
                let mut x = code;
                let idx: Vec<usize> = (0..size)
                    .map(|_| {
                        let d = x % c;
                        x /= c;
                        d
                    })
                    .collect();
                let ls: Vec<&TreeNode> = idx.iter().map(|&i| &pairs[i].0).collect();
                let lt: Vec<&TreeNode> = idx.iter().map(|&i| &pairs[i].1).collect();
                let a = member_brute(&realize_brute(b, &ls, src, flip), forbidden);
                let z = member_brute(&realize_brute(b, &lt, tgt, flip), forbidden);
                if a != z {
                    return false;
                }
            }
        }
    }
    true
}

fn random_member(lang: &Language, forbidden: &[Table], n: usize, rng: &mut ChaCha8Rng) -> Table {
    let mut t = Table { unary: Vec::new(), rel: Vec::new() };
    while t.len() < n {
        let word: Vec<u8> = (0..t.len()).map(|_| rng.random_range(0..lang.k())).collect();
        let u = rng.random_range(0..lang.unary_types());
        let mut c = t.clone();
        c.push(u, &word, lang.flip_table());
        if member_brute(&c, forbidden) {
            t = c;
        }
    }
    t
}

fn random_node(level: usize, k: u8, rng: &mut ChaCha8Rng) -> TreeNode {
    TreeNode::from_digits((0..level).map(|_| rng.random_range(0..k)).collect())
}

fn mask_set(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn set_mask(s: &[usize]) -> u32 {
    s.iter().fold(0, |m, &i| m | 1 << i)
}

// ---------------------------------------------------------------------------
// Age-map self-checks on constructed maps, shared by criteria 3 to 6
// ---------------------------------------------------------------------------

#[derive(Default)]
struct SelfChecks {
    prime: usize,
    extend: usize,
    failures: Vec<String>,
}

impl SelfChecks {
    /// `f'` on `T(m)` is an age map for every `m <= depth`; and the upward map
    /// `f'(t) ↦ f(t)`, restricted to random subsets and padded with `Left` on
    /// random extra nodes, stays an age map.
    fn aged_embedding(&mut self, f: &NodeMap, a: &EnumStructure, ambient: &LimitPrefix, fam: &ForbFamily, rng: &mut ChaCha8Rng) {
        let k = f.k();
        for m in 1..=f.depth() {
            let pairs = prime_of(&f.truncate(m));
            self.prime += 1;
            match is_age_map(&pairs, a, ambient.structure(), fam) {
                Ok(v) if v.is_age_map => {}
                other => self.failures.push(format!("prime at level {m}: {other:?}")),
            }
            if m == f.depth() {
                continue;
            }
            let gamma: Vec<(TreeNode, TreeNode)> =
                pairs.iter().map(|(t, x)| (x.clone(), f.get(t).expect("level is mapped").clone())).collect();
            let n1 = gamma[0].1.level();
            if gamma.iter().any(|(x, g)| !x.is_prefix_of(g)) {
                self.failures.push(format!("f(t) does not extend f'(t) at level {m}"));
                continue;
            }
            let kept: Vec<(TreeNode, TreeNode)> = gamma.iter().filter(|_| rng.random_bool(0.6)).cloned().collect();
            self.left_extension(&kept, gamma[0].0.level(), n1, k, ambient, fam, rng, 6);
        }
    }

    /// `γ ∪ {x ↦ Left(x, n)}` on `dom γ` plus random extra level-`m` nodes.
    #[allow(clippy::too_many_arguments)]
    fn left_extension(
        &mut self,
        gamma: &[(TreeNode, TreeNode)],
        m: usize,
        n: usize,
        k: u8,
        ambient: &LimitPrefix,
        fam: &ForbFamily,
        rng: &mut ChaCha8Rng,
        extra: usize,
    ) {
        let mut map = gamma.to_vec();
        for _ in 0..extra {
            let x = random_node(m, k, rng);
            if map.iter().all(|(s, _)| *s != x) {
                map.push((x.clone(), x.left(n).expect("n >= m")));
            }
        }
        self.extend += 1;
        match is_age_map(&map, ambient.structure(), ambient.structure(), fam) {
            Ok(v) if v.is_age_map => {}
            other => self.failures.push(format!("Left extension {m}->{n}: {other:?}")),
        }
    }

    /// The inverse of each age-map projection below `max E` goes up one level;
    /// its `Left` extension must stay an age map.
    fn projections(&mut self, e: &[usize], prefix: &LimitPrefix, fam: &ForbFamily, rng: &mut ChaCha8Rng) {
        let Some(&top) = e.last() else { return };
        let k = fam.language().k();
        for m in 0..top {
            if e.contains(&m) {
                continue;
            }
            let up: BTreeSet<(TreeNode, TreeNode)> = e
                .iter()
                .filter(|&&a| a > m)
                .map(|&a| (prefix.node(a).restrict(m), prefix.node(a).restrict(m + 1)))
                .collect();
            let up: Vec<_> = up.into_iter().collect();
            self.left_extension(&up, m, m + 1, k, prefix, fam, rng, 3);
        }
    }
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t: Duration, limit: Duration) -> bool {
    t <= limit
}

fn c1_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut total = 0;
    for fam in [triangle_free(), graphs(), no_directed_triangle()] {
        let lang = fam.language().clone();
        let forb = forbidden_tables(&fam);
        for _ in 0..500 {
            let n = rng.random_range(0..=10);
            let t = random_member(&lang, &forb, n, &mut rng);
            let a = t.build(&lang);
            let ct = coding_tree_of(&lang, &a);
            let columns_ok = (0..n).all(|j| ct.nodes[j].digits() == (0..j).map(|i| t.rel[i][j]).collect::<Vec<_>>());
            let back = structure_of(&ct).ok();
            total += 1;
            if !columns_ok || back.as_ref() != Some(&a) {
                mismatches += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && within(t, Duration::from_secs(5)),
        format!("{total} structures over 3 families, {mismatches} mismatches, {:.2?}", t),
    )
}

fn c2_age_map_completeness() -> Outcome {
    let start = Instant::now();
    let tf = triangle_free();
    let lang = tf.language().clone();
    let forb = forbidden_tables(&tf);
    let members: Vec<Vec<Table>> = (0..=4).map(|n| members_brute(&lang, &forb, n)).collect();
    let prefixes: Vec<LimitPrefix> =
        (0..8).map(|s| generate_prefix(&tf, 6 + (s as usize % 7), s).expect("class is nonempty")).collect();
    let tables: Vec<Table> = prefixes.iter().map(|p| Table::of(p.structure())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut agree, mut disagree, mut yes, mut extension_like) = (0, 0, 0, 0);
    let mut first_bad = String::new();
    for i in 0..1000 {
        let si = rng.random_range(0..prefixes.len());
        let ti = rng.random_range(0..prefixes.len());
        let m = rng.random_range(0..=5usize.min(prefixes[si].len()));
        let ext = i % 2 == 0;
        let n = if ext {
            rng.random_range(m..=5usize.min(prefixes[ti].len()).max(m))
        } else {
            rng.random_range(0..=5usize.min(prefixes[ti].len()))
        };
        if n > prefixes[ti].len() {
            continue;
        }
        let cap_src = 1usize << m;
        let cap_tgt = 1usize << n;
        let size = rng.random_range(1..=4usize.min(cap_src).min(cap_tgt));
        let mut srcs: Vec<TreeNode> = Vec::new();
        while srcs.len() < size {
            let x = random_node(m, 2, &mut rng);
            if !srcs.contains(&x) {
                srcs.push(x);
            }
        }
        let mut pairs: Vec<(TreeNode, TreeNode)> = Vec::new();
        for s in &srcs {
            loop {
                let t = if ext {
                    if rng.random_bool(0.5) {
                        s.left(n).expect("n >= m")
                    } else {
                        let mut d = s.digits().to_vec();
                        d.extend((m..n).map(|_| rng.random_range(0..2u8)));
                        TreeNode::from_digits(d)
                    }
                } else {
                    random_node(n, 2, &mut rng)
                };
                // Collisions are allowed on purpose now and then.
                if pairs.iter().all(|(_, u)| *u != t) || rng.random_bool(0.05) {
                    pairs.push((s.clone(), t));
                    break;
                }
            }
        }
        if ext {
            extension_like += 1;
        }
        let lib = is_age_map(&pairs, prefixes[si].structure(), prefixes[ti].structure(), &tf)
            .expect("well-formed instance")
            .is_age_map;
        let brute = age_map_brute(&pairs, &tables[si], &tables[ti], &members, &forb, lang.flip_table());
        if lib == brute {
            agree += 1;
        } else {
            disagree += 1;
            if first_bad.is_empty() {
                first_bad = format!(" first disagreement {pairs:?} lib={lib}");
            }
        }
        if brute {
            yes += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        disagree == 0 && agree >= 1000 && within(t, Duration::from_secs(120)),
        format!(
            "{agree} agree, {disagree} disagree ({yes} age maps, {extension_like} extension-like), brute |B| <= 4, {:.2?}{first_bad}",
            t
        ),
    )
}

/// Aged embeddings of every triangle-free `A` with `|A| <= 4`, each built over a
/// clone of one generator and grown with demand levels as needed.
struct C4 {
    outcome: Outcome,
    produced: Vec<(NodeMap, EnumStructure, LimitPrefix)>,
}

fn c4_aged_embeddings() -> C4 {
    let start = Instant::now();
    let tf = triangle_free();
    let lang = tf.language().clone();
    let forb = forbidden_tables(&tf);
    let mut base = Generator::new(tf.clone(), 0).expect("class is nonempty");
    for _ in 0..16 {
        base.step();
    }
    let (mut ok, mut bad, mut max_depth) = (0, 0, 0);
    let mut produced = Vec::new();
    let mut notes = String::new();
    for n in 0..=4 {
        for t in members_brute(&lang, &forb, n) {
            let a = t.build(&lang);
            let mut g = base.clone();
            let e = match find_aged_embedding_growing(&a, &mut g) {
                Ok(e) => e,
                Err(err) => {
                    bad += 1;
                    notes = format!(" error {err}");
                    continue;
                }
            };
            let v = is_aged_embedding(&e.map, &a, g.prefix(), &tf).expect("well-formed");
            let k = Table::of(g.prefix().structure());
            let ct = coding_tree_of(&lang, &a);
            let nodes_ok = (0..n).all(|i| {
                e.map.get(&ct.nodes[i]) == Some(g.prefix().node(e.induced[i])) && g.prefix().unary(e.induced[i]) == t.unary[i]
            });
            let copy_ok = k.induced(&e.induced) == t;
            max_depth = max_depth.max(g.len());
            if v.ok && v.induced.as_ref() == Some(&e.induced) && nodes_ok && copy_ok && g.len() <= 256 {
                ok += 1;
            } else {
                bad += 1;
            }
            produced.push((e.map, a, g.into_prefix()));
        }
    }
    let t = start.elapsed();
    C4 {
        outcome: outcome(
            bad == 0 && within(t, Duration::from_secs(300)),
            format!("{ok} structures embedded and verified, {bad} failures, max prefix depth {max_depth}, {:.2?}{notes}", t),
        ),
        produced,
    }
}

/// Envelope status of every subset of `[0, 10]` for one prefix.
struct Window {
    name: &'static str,
    family: ForbFamily,
    prefix: LimitPrefix,
    status: Vec<bool>,
}

fn c5_envelope_equivalence(checks: &mut SelfChecks, rng: &mut ChaCha8Rng) -> (Outcome, Vec<Window>) {
    let start = Instant::now();
    let mut windows = Vec::new();
    let mut detail = Vec::new();
    let mut all_agree = true;
    for (name, fam, seed) in [("TF", triangle_free(), 0u64), ("Forb(empty)", graphs(), 0u64)] {
        let prefix = generate_prefix(&fam, 16, seed).expect("class is nonempty");
        let env = Envelopes::new(&prefix, &fam);
        let mut status = vec![false; 1 << 11];
        let (mut agree, mut count) = (0, 0);
        for mask in 0u32..1 << 11 {
            let s = mask_set(mask);
            let comb = env.is_envelope(&s, EnvelopeMode::Combinatorial).expect("in range");
            let def = env.is_envelope(&s, EnvelopeMode::Definitional).expect("in range");
            if comb.is_envelope == def.is_envelope {
                agree += 1;
            } else {
                all_agree = false;
            }
            if let Some(f) = def.construction.as_ref().filter(|_| def.is_envelope) {
                let src = induced_substructure(prefix.structure(), &s).expect("levels in range");
                checks.aged_embedding(f, &src, &prefix, &fam, rng);
            }
            status[mask as usize] = comb.is_envelope;
            count += comb.is_envelope as usize;
        }
        detail.push(format!("{name}: {agree}/2048 agree, {count} envelopes"));
        windows.push(Window { name, family: fam, prefix, status });
    }
    let t = start.elapsed();
    (
        outcome(all_agree && within(t, Duration::from_secs(600)), format!("{}, {:.2?}", detail.join("; "), t)),
        windows,
    )
}

fn c6_closure_oracle(windows: &[Window], checks: &mut SelfChecks, rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for w in windows {
        let env = Envelopes::new(&w.prefix, &w.family);
        let mut closures: HashMap<u32, u32> = HashMap::new();
        let mut close = |mask: u32| -> u32 {
            *closures.entry(mask).or_insert_with(|| set_mask(&env.closure(&mask_set(mask)).expect("nonempty")))
        };
        let full = (1u32 << 11) - 1;
        let mut above_max = 0;
        for mask in 1..=full {
            let s = mask_set(mask);
            let top = *s.last().expect("nonempty");
            let window = (1u32 << (top + 1)) - 1;
            let cl = close(mask);
            let free = window & !mask;
            let mut envs = Vec::new();
            let mut sub = free;
            loop {
                let e = mask | sub;
                if w.status[e as usize] {
                    envs.push(e);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
            let minimal: Vec<u32> =
                envs.iter().copied().filter(|&e| !envs.iter().any(|&f| f != e && f & e == f)).collect();
            let meet = envs.iter().fold(window, |acc, &e| acc & e);
            if minimal != [cl] || meet != cl {
                failures.push(format!("{}: S={s:?} closure={:?} minimal={:?}", w.name, mask_set(cl), minimal));
            }
            // Envelopes reaching above max(S) must still contain the closure.
            let mut wide = full & !mask;
            loop {
                let e = mask | wide;
                if w.status[e as usize] && e & cl != cl {
                    above_max += 1;
                }
                if wide == 0 {
                    break;
                }
                wide = (wide - 1) & (full & !mask);
            }
        }
        let all_env: Vec<u32> = (1..=full).filter(|&e| w.status[e as usize]).collect();
        let mut intersections = 0;
        for (i, &x) in all_env.iter().enumerate() {
            for &y in &all_env[i + 1..] {
                let both = x & y;
                if both != 0 && !w.status[both as usize] {
                    intersections += 1;
                }
            }
        }
        if intersections != 0 {
            failures.push(format!("{}: {intersections} envelope pairs with a non-envelope intersection", w.name));
        }
        let mut envelopes = 0;
        let mut unique_min = 0;
        for e in 1..=full {
            if !w.status[e as usize] {
                continue;
            }
            envelopes += 1;
            let set = mask_set(e);
            checks.projections(&set, &w.prefix, &w.family, rng);
            let int = env.interior(&set).expect("is an envelope");
            let im = set_mask(&int);
            if int.len() != im.count_ones() as usize || close(im) != e || im & !e != 0 {
                failures.push(format!("{}: interior {int:?} of {set:?}", w.name));
                continue;
            }
            let again = env.interior(&mask_set(close(im))).expect("is an envelope");
            if set_mask(&again) != im {
                failures.push(format!("{}: interior of {set:?} does not stabilize", w.name));
            }
            let mut gens = Vec::new();
            let mut sub = e;
            while sub != 0 {
                if close(sub) == e {
                    gens.push(sub);
                }
                sub = (sub - 1) & e;
            }
            let minimal: Vec<u32> =
                gens.iter().copied().filter(|&g| !gens.iter().any(|&h| h != g && h & g == h)).collect();
            if minimal == [im] {
                unique_min += 1;
            } else {
                failures.push(format!("{}: generators of {set:?} minimal {minimal:?}, interior {int:?}", w.name));
            }
        }
        detail.push(format!(
            "{}: {envelopes} envelopes, {unique_min} with interior the unique minimal generator, {above_max} wider envelopes missing the closure, {intersections} pairs not closed under intersection",
            w.name
        ));
        if above_max != 0 {
            failures.push(format!("{}: {above_max} envelopes above max(S) omit the closure", w.name));
        }
    }
    let t = start.elapsed();
    let first = failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default();
    outcome(
        failures.is_empty() && within(t, Duration::from_secs(900)),
        format!("{}, {:.2?}{first}", detail.join("; "), t),
    )
}

fn c3_self_checks(checks: &SelfChecks, embeddings: usize) -> Outcome {
    let first = checks.failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default();
    outcome(
        checks.failures.is_empty() && checks.prime > 0 && checks.extend > 0,
        format!(
            "{} prime-map checks and {} Left-extension checks over {embeddings} embeddings and all window envelopes, {} failures{first}",
            checks.prime,
            checks.extend,
            checks.failures.len()
        ),
    )
}

fn c7_worked_fixture() -> Outcome {
    let g0 = graphs();
    let p = LimitPrefix::new(r4(), Vec::new(), 0);
    let env = Envelopes::new(&p, &g0);
    let closure = env.closure(&[2, 3]).expect("nonempty");
    let interior = env.interior(&[0, 2, 3]).expect("is an envelope");
    // Oracle: smallest envelope over subsets of [0, 3] containing {2, 3}.
    let oracle: Vec<Vec<usize>> = (0u32..16)
        .filter(|m| m & 0b1100 == 0b1100)
        .map(mask_set)
        .filter(|s| env.is_envelope(s, EnvelopeMode::Definitional).expect("in range").is_envelope)
        .collect();
    let smallest = oracle.iter().min_by_key(|s| s.len()).cloned().unwrap_or_default();
    outcome(
        closure == [0, 2, 3] && interior == [3, 2] && smallest == [0, 2, 3],
        format!("closure {{2,3}} = {closure:?}, interior {{0,2,3}} = {interior:?}, brute smallest envelope {smallest:?}"),
    )
}

fn c8_crit_bound(windows: &[Window]) -> Outcome {
    let start = Instant::now();
    let (mut sets, mut violations) = (0usize, 0usize);
    let mut max_ratio = 0f64;
    let mut worst = String::new();
    let mut record = |s: &[usize], env: &Envelopes, fam: &ForbFamily| {
        let c = env.crit(s).expect("in range").crit().len();
        let b = crit_bound(s.len(), fam);
        sets += 1;
        if (c as u128) > b {
            violations += 1;
        }
        if b > 0 {
            let r = c as f64 / b as f64;
            if r > max_ratio {
                max_ratio = r;
                worst = format!("|S|={} crit={c} bound={b}", s.len());
            }
        }
    };
    for w in windows {
        let env = Envelopes::new(&w.prefix, &w.family);
        for mask in 0u32..1 << 11 {
            record(&mask_set(mask), &env, &w.family);
        }
    }
    let tf = triangle_free();
    let p = generate_prefix(&tf, 64, 8).expect("class is nonempty");
    let env = Envelopes::new(&p, &tf);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10_000 {
        let size = rng.random_range(1..=4);
        let mut s: BTreeSet<usize> = BTreeSet::new();
        while s.len() < size {
            s.insert(rng.random_range(0..64));
        }
        record(&s.into_iter().collect::<Vec<_>>(), &env, &tf);
    }
    let t = start.elapsed();
    outcome(
        violations == 0,
        format!("{sets} sets, {violations} violations, max |crit|/bound = {max_ratio:.4} ({worst}), {:.2?}", t),
    )
}

fn c9_nice_regime() -> Outcome {
    let start = Instant::now();
    let tf = triangle_free();
    let horizon = 6;
    let mut gen = Generator::new(tf.clone(), 0).expect("class is nonempty");
    for _ in 0..horizon {
        gen.step();
    }
    let y = match build_y(&tf, gen.prefix(), horizon) {
        Ok(y) => y,
        Err(e) => return outcome(false, format!("build_y: {e}")),
    };
    let eta = match nice_embedding_growing(&y, &mut gen) {
        Ok(e) => e,
        Err(e) => return outcome(false, format!("nice_embedding: {e}")),
    };
    while gen.len() < 512 {
        gen.step();
    }
    let prefix = gen.into_prefix();
    let env = Envelopes::new(&prefix, &tf);
    let structural = eta.is_ordered_embedding(&y, &prefix) && eta.nice_violations(&prefix).is_empty();
    let base = eta.base_levels();
    let mut failures = Vec::new();
    let mut sets = 0;
    let mut max_env = 0;
    for mask in 1u32..1 << base.len() {
        if mask.count_ones() > 3 {
            continue;
        }
        sets += 1;
        let s: Vec<usize> = mask_set(mask).into_iter().map(|i| base[i]).collect();
        let report = env.crit(&s).expect("in range");
        let mut need = report.crit();
        need.extend(report.start.iter().filter(|&&(x, st)| st != x).map(|&(_, st)| st));
        let unresolved: Vec<usize> =
            need.iter().copied().filter(|&n| !matches!(eta.preimage(n), Some(YPoint::Copy { .. }))).collect();
        if !unresolved.is_empty() {
            failures.push(format!("(a) S={s:?} unresolved {unresolved:?}"));
        }
        let e = match nice_envelope(&s, &eta, &y, &env) {
            Ok(e) => e.levels,
            Err(err) => {
                failures.push(format!("(b) S={s:?}: {err}"));
                continue;
            }
        };
        max_env = max_env.max(e.len());
        let comb = env.is_envelope(&e, EnvelopeMode::Combinatorial).expect("in range").is_envelope;
        let def = env.is_envelope(&e, EnvelopeMode::Definitional).expect("in range").is_envelope;
        if !(comb && def) {
            failures.push(format!("(b) S={s:?} E={e:?} comb={comb} def={def}"));
        }
        let cl = env.closure(&s).expect("nonempty");
        let int: BTreeSet<usize> = env.interior(&cl).expect("closure is an envelope").into_iter().collect();
        if int != s.iter().copied().collect() {
            failures.push(format!("(c) S={s:?} interior(closure)={int:?}"));
        }
        if !cl.iter().all(|x| e.contains(x)) {
            failures.push(format!("(d) S={s:?} closure {cl:?} not in {e:?}"));
        }
        let extra: Vec<usize> = cl
            .iter()
            .copied()
            .filter(|x| !s.contains(x) && !matches!(eta.preimage(*x), Some(YPoint::Copy { .. })))
            .collect();
        if !extra.is_empty() {
            failures.push(format!("(e) S={s:?} closure levels {extra:?} are not copy images"));
        }
    }
    let t = start.elapsed();
    let first = failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default();
    outcome(
        failures.is_empty() && structural && prefix.len() >= 512 && within(t, Duration::from_secs(1800)),
        format!(
            "depth {}, |Y| = {}, {sets} sets, {} failures, ordered and nice: {structural}, largest E {max_env}, {:.2?}{first}",
            prefix.len(),
            y.points().len(),
            failures.len(),
            t
        ),
    )
}

fn c10_envelope_images() -> Outcome {
    let start = Instant::now();
    let tf = triangle_free();
    let depth = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut maps, mut compared, mut mismatches, mut forms, mut form_mismatches) = (0, 0, 0, 0, 0);
    let mut first = String::new();
    for seed in 0..16u64 {
        if maps >= 60 {
            break;
        }
        let mut base = Generator::new(tf.clone(), seed).expect("class is nonempty");
        for _ in 0..48 {
            base.step();
        }
        let a = base.prefix().structure().prefix(depth);
        let src_env = Envelopes::new(base.prefix(), &tf);
        let src: Vec<(bool, Option<Vec<usize>>, Option<Vec<u32>>)> = (0u32..1 << 9)
            .map(|mask| {
                let s = mask_set(mask);
                let st = src_env.is_envelope(&s, EnvelopeMode::Combinatorial).expect("in range").is_envelope;
                let form = (1..=3).contains(&s.len()).then(|| canonical_form(&src_env, &s).expect("in range"));
                (st, (!s.is_empty()).then(|| src_env.closure(&s).expect("nonempty")), form)
            })
            .collect();
        let starts: Vec<usize> = (0..base.len())
            .filter(|&n| base.prefix().node(n).is_zero() && base.prefix().unary(n) == a.unary(0))
            .take(10)
            .collect();
        for s0 in starts {
            let mut gen = base.clone();
            let mut f = NodeMap::new(2);
            f.push_level(vec![gen.prefix().node(s0).clone()]).expect("one root image");
            for _ in 1..depth {
                let fp = prime_of(&f);
                let n0 = fp[0].1.level();
                let target = (n0 + rng.random_range(0..3)).min(gen.len());
                let gamma: Vec<(TreeNode, TreeNode)> =
                    fp.iter().map(|(_, x)| (x.clone(), x.left(target).expect("deeper"))).collect();
                f = match extend_aged_embedding_growing(&f, &a, &gamma, &mut gen) {
                    Ok(e) => e.map,
                    Err(e) => return outcome(false, format!("construction failed: {e}")),
                };
            }
            let v = is_aged_embedding(&f, &a, gen.prefix(), &tf).expect("well-formed");
            let Some(h) = v.induced.filter(|_| v.ok) else {
                return outcome(false, "constructed map is not an aged embedding");
            };
            maps += 1;
            let env = Envelopes::new(gen.prefix(), &tf);
            for mask in 0u32..1 << 9 {
                let s = mask_set(mask);
                let img: Vec<usize> = s.iter().map(|&i| h[i]).collect();
                let st = env.is_envelope(&img, EnvelopeMode::Combinatorial).expect("in range").is_envelope;
                let (want_st, want_cl, want_form) = &src[mask as usize];
                let cl_ok = match want_cl {
                    None => true,
                    Some(cl) => env.closure(&img).expect("nonempty") == cl.iter().map(|&i| h[i]).collect::<Vec<_>>(),
                };
                if let Some(form) = want_form {
                    forms += 1;
                    if canonical_form(&env, &img).expect("in range") != *form {
                        form_mismatches += 1;
                    }
                }
                compared += 1;
                if st != *want_st || !cl_ok {
                    mismatches += 1;
                    if first.is_empty() {
                        first = format!("; first mismatch seed {seed} start {s0} S={s:?} h={h:?}");
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && form_mismatches == 0 && maps >= 50,
        format!(
            "{maps} aged embeddings of ct|10, {compared} sets compared, {mismatches} mismatches, canonical colors preserved on {}/{forms} sets of size 1 to 3, {:.2?}{first}",
            forms - form_mismatches,
            t
        ),
    )
}

fn c11_census() -> Outcome {
    let g0 = graphs();
    let lib = degree_bound(&e2(), &g0, Some(3), 1 << 20, 1).expect("E2 is a graph");
    let oracle: Vec<u64> =
        (1..=3).map(|n| members_brute(g0.language(), &forbidden_tables(&g0), n).len() as u64).collect();
    let ell: u64 = oracle.iter().sum();
    let mut extra = Vec::new();
    let mut extra_ok = true;
    for (name, fam, d) in [("TF", triangle_free(), 4), ("no directed triangle", no_directed_triangle(), 3)] {
        let c = census(&fam, d, 1 << 20, 1).expect("small");
        let o: Vec<u64> =
            (1..=d).map(|n| members_brute(fam.language(), &forbidden_tables(&fam), n).len() as u64).collect();
        extra_ok &= c == o;
        extra.push(format!("{name} {c:?} vs {o:?}"));
    }
    outcome(
        lib.ell == 11 && ell == 11 && lib.census == oracle && extra_ok,
        format!("ell = {} (oracle {ell}), census {:?} vs oracle {oracle:?}; {}", lib.ell, lib.census, extra.join("; ")),
    )
}

fn c12_partition() -> Outcome {
    let arc = EnumStructure::from_upper(no_directed_triangle().language(), &[0, 0], &[(0, 1, 1)]).expect("valid");
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, a, fam) in [("E2", e2(), graphs()), ("arc", arc, no_directed_triangle())] {
        let p = generate_prefix(&fam, 16, 0).expect("class is nonempty");
        let k = Table::of(p.structure());
        let at = Table::of(&a);
        let n = a.size();
        let brute: BTreeSet<Vec<usize>> = (0..16)
            .flat_map(|x| (0..16).map(move |y| vec![x, y]))
            .filter(|f| f[0] != f[1] && k.induced(f) == at)
            .collect();
        let variants = ordered_decomposition(&a);
        let mut hits: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut variants_ok = true;
        for v in &variants {
            let vt = Table::of(&v.structure);
            for sigma in &v.bijections {
                variants_ok &= (0..n).all(|x| (0..n).all(|y| x == y || at.rel[sigma[x]][sigma[y]] == vt.rel[x][y]));
            }
            for x in 0..16 {
                for y in x + 1..16 {
                    if k.induced(&[x, y]) != vt {
                        continue;
                    }
                    for sigma in &v.bijections {
                        let mut f = vec![0; n];
                        f[sigma[0]] = x;
                        f[sigma[1]] = y;
                        *hits.entry(f).or_default() += 1;
                    }
                }
            }
        }
        let exact = hits.values().all(|&c| c == 1) && hits.keys().cloned().collect::<BTreeSet<_>>() == brute;
        let lib = partition_check(&a, p.structure()).expect("same language");
        let this = exact && variants_ok && lib.exact && lib.embeddings == brute.len();
        ok &= this;
        detail.push(format!(
            "{name}: |Emb| = {}, {} variants, per-variant {:?}, exact {this}",
            brute.len(),
            variants.len(),
            lib.per_variant
        ));
    }
    outcome(ok, detail.join("; "))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn c13_determinism() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for fam in [triangle_free(), graphs(), no_directed_triangle()] {
        for seed in [0u64, 7] {
            let a = generate_prefix(&fam, 96, seed).expect("class is nonempty");
            let b = generate_prefix(&fam, 96, seed).expect("class is nonempty");
            let ja = serde_json::to_string(&PrefixJson::from_prefix(&a, Some(&fam))).expect("serializable");
            let jb = serde_json::to_string(&PrefixJson::from_prefix(&b, Some(&fam))).expect("serializable");
            ok &= a == b && ja == jb;
        }
    }
    let dir = std::env::temp_dir().join(format!("bigramsey-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = |n: &str| dir.join(n).display().to_string();
    let bin = env!("CARGO_BIN_EXE_bigramsey");
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");
    let prefix = path("prefix.json");
    let g = run(&["gen", "--family", &fixture("tf.json"), "--size", "20", "--seed", "3", "--out", &prefix]);
    ok &= g.status.success();
    let (tf, p4, v1, g0, r4p) = (fixture("tf.json"), fixture("p4.json"), fixture("v1.json"), fixture("g0.json"), fixture("r4.json"));
    let k3 = fixture("k3.json");
    let cases: Vec<(Vec<&str>, Option<String>)> = vec![
        (vec!["check", "--family", &tf, "--structure", &p4], None),
        (vec!["check", "--family", &tf, "--structure", &k3], None),
        (vec!["gen", "--family", &tf, "--size", "20", "--seed", "3"], None),
        (vec!["verify-dense", "--prefix", &prefix, "--horizon", "2"], None),
        (vec!["ct", "--structure", &p4], None),
        (vec!["agemap", "--prefix", &prefix, "--map", "0:00,1:10"], None),
        (vec!["aemb", "find", "--prefix", &prefix, "--structure", &p4, "--grow"], Some(path("aemb.json"))),
        (vec!["envelope", "check", "--family", &g0, "--prefix", &r4p, "--levels", "2,3"], None),
        (vec!["envelope", "close", "--family", &g0, "--prefix", &r4p, "--levels", "2,3"], None),
        (vec!["envelope", "interior", "--family", &g0, "--prefix", &r4p, "--levels", "0,2,3"], None),
        (vec!["crit", "--prefix", &prefix, "--levels", "3,9,15"], None),
        (vec!["nice", "--prefix", &prefix, "--horizon", "3", "--levels", "0,1"], Some(path("eta.json"))),
        (vec!["bound", "--family", &tf, "--structure", &v1, "--envelope-bound", "4"], None),
        (vec!["experiment", "--prefix", &prefix, "--structure", &v1, "--window", "3", "--budget", "60"], None),
    ];
    for (args, artifact) in &cases {
        let mut outputs = Vec::new();
        for jobs in ["1", "1", "8"] {
            let mut full: Vec<&str> = args.clone();
            full.extend(["--no-timestamp", "--jobs", jobs]);
            if let Some(a) = artifact {
                full.extend(["--out", a.as_str()]);
            }
            let out = run(&full);
            let file = artifact.as_ref().map(|a| std::fs::read(a).unwrap_or_default());
            outputs.push((out.status.code(), out.stdout, file));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        if !same {
            ok = false;
            notes.push(format!("differs: {}", args[..2].join(" ")));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let t = start.elapsed();
    outcome(
        ok,
        format!("generate_prefix over 3 families x 2 seeds, {} CLI reports x 3 runs, {:.2?} {}", cases.len(), t, notes.join("; ")),
    )
}

// ---------------------------------------------------------------------------

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("{} {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };
    report(1, "coding-tree round trip", guarded(c1_round_trip));
    report(2, "age-map decision vs brute force", guarded(c2_age_map_completeness));

    let mut checks = SelfChecks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut c4 = None;
    let o4 = guarded(|| {
        let r = c4_aged_embeddings();
        let o = outcome(r.outcome.pass, r.outcome.detail.clone());
        c4 = Some(r.produced);
        o
    });
    let mut windows = Vec::new();
    let o5 = guarded(|| {
        let (o, w) = c5_envelope_equivalence(&mut checks, &mut rng);
        windows = w;
        o
    });
    let o6 = if windows.is_empty() {
        outcome(false, "no windows from criterion 5")
    } else {
        guarded(|| c6_closure_oracle(&windows, &mut checks, &mut rng))
    };
    let produced = c4.unwrap_or_default();
    let o3 = guarded(|| {
        let tf = triangle_free();
        for (f, a, p) in &produced {
            checks.aged_embedding(f, a, p, &tf, &mut rng);
        }
        c3_self_checks(&checks, produced.len())
    });
    report(3, "prime and Left-extension age maps", o3);
    report(4, "aged embeddings exist", o4);
    report(5, "envelope modes agree", o5);
    report(6, "closure and interior oracle", o6);
    report(7, "worked fixture", guarded(c7_worked_fixture));
    report(
        8,
        "crit bound",
        if windows.is_empty() { outcome(false, "no windows from criterion 5") } else { guarded(|| c8_crit_bound(&windows)) },
    );
    report(9, "nice-embedding regime", guarded(c9_nice_regime));
    report(10, "envelopes commute with aged embeddings", guarded(c10_envelope_images));
    report(11, "degree-bound census", guarded(c11_census));
    report(12, "ordered partition of embeddings", guarded(c12_partition));
    report(13, "determinism", guarded(c13_determinism));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
