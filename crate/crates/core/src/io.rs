//! JSON file formats for languages, structures, families and prefixes.
//!
//! Structure: `{"k", "flip"?, "unary_types"?, "n", "unary", "rel": [[a, b, v], ...]}`
//! lists nonzero entries with `a < b`; `flip` defaults to the identity and
//! `unary_types` to `k`. A family is `{"language": {...}, "forbidden": [...]}`.
//! A prefix is a structure plus `"seed"`, `"schedule"` and optionally `"family"`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::agemap::{AgeMapFailure, AgeMapVerdict, LabeledStructure};
use crate::error::{Error, Result};
use crate::forb::{ExtensionType, ForbFamily};
use crate::limit::{LimitPrefix, ObligationKind, ScheduleEntry};
use crate::structure::{EnumStructure, Language, View};
use crate::tree::{NodeMap, TreeNode};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LanguageJson {
    pub k: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unary_types: Option<u8>,
}

impl LanguageJson {
    pub fn to_language(&self) -> Result<Language> {
        let flip = self.flip.clone().unwrap_or_else(|| (0..self.k).collect());
        Language::with_unary_types(self.k, flip, self.unary_types.unwrap_or(self.k))
    }

    pub fn from_language(lang: &Language) -> Self {
        let identity = lang.flip_table().iter().enumerate().all(|(i, &v)| i == v as usize);
        LanguageJson {
            k: lang.k(),
            flip: (!identity).then(|| lang.flip_table().to_vec()),
            unary_types: (lang.unary_types() != lang.k()).then_some(lang.unary_types()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StructureJson {
    #[serde(flatten)]
    pub language: LanguageJson,
    pub n: usize,
    pub unary: Vec<u8>,
    #[serde(default)]
    pub rel: Vec<[usize; 3]>,
}

impl StructureJson {
    pub fn from_structure(a: &EnumStructure) -> Self {
        StructureJson {
            language: LanguageJson::from_language(a.language()),
            n: a.size(),
            unary: a.unary_types().to_vec(),
            rel: a.upper_entries().into_iter().map(|(x, y, v)| [x, y, v as usize]).collect(),
        }
    }

    /// Builds the structure in `lang` when given (after checking `k` and `flip`
    /// agree), otherwise in the file's own language.
    pub fn to_structure(&self, lang: Option<&Language>) -> Result<EnumStructure> {
        let own = self.language.to_language()?;
        let lang = match lang {
            Some(l) => {
                if l.k() != own.k() || l.flip_table() != own.flip_table() {
                    return Err(Error::LanguageMismatch(format!(
                        "structure has k={} flip={:?}, family has k={} flip={:?}",
                        own.k(),
                        own.flip_table(),
                        l.k(),
                        l.flip_table()
                    )));
                }
                l.clone()
            }
            None => own,
        };
        if self.unary.len() != self.n {
            return Err(Error::InvalidStructure(format!("n = {} but {} unary entries", self.n, self.unary.len())));
        }
        let mut entries = Vec::with_capacity(self.rel.len());
        for &[a, b, v] in &self.rel {
            if a >= b {
                return Err(Error::InvalidStructure(format!("rel entry ({a}, {b}) must have a < b")));
            }
            let v = u8::try_from(v).map_err(|_| Error::InvalidStructure(format!("relation value {v} too large")))?;
            entries.push((a, b, v));
        }
        EnumStructure::from_upper(&lang, &self.unary, &entries)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FamilyJson {
    pub language: LanguageJson,
    #[serde(default)]
    pub forbidden: Vec<StructureJson>,
}

impl FamilyJson {
    pub fn to_family(&self) -> Result<ForbFamily> {
        let lang = self.language.to_language()?;
        let forbidden = self.forbidden.iter().map(|s| s.to_structure(Some(&lang))).collect::<Result<Vec<_>>>()?;
        ForbFamily::new(lang, forbidden)
    }

    pub fn from_family(f: &ForbFamily) -> Self {
        FamilyJson {
            language: LanguageJson::from_language(f.language()),
            forbidden: f.forbidden().iter().map(StructureJson::from_structure).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScheduleJson {
    pub level: usize,
    pub base: usize,
    pub unary: u8,
    pub word: String,
    pub kind: ObligationKind,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PrefixJson {
    #[serde(flatten)]
    pub structure: StructureJson,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub schedule: Vec<ScheduleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyJson>,
}

impl PrefixJson {
    pub fn from_prefix(p: &LimitPrefix, family: Option<&ForbFamily>) -> Self {
        PrefixJson {
            structure: StructureJson::from_structure(p.structure()),
            seed: p.seed(),
            schedule: p
                .schedule()
                .iter()
                .map(|e| ScheduleJson {
                    level: e.level,
                    base: e.obligation.base_size,
                    unary: e.obligation.unary,
                    word: e.obligation.word.to_word(),
                    kind: e.kind,
                })
                .collect(),
            family: family.map(FamilyJson::from_family),
        }
    }

    pub fn to_prefix(&self, lang: Option<&Language>) -> Result<LimitPrefix> {
        let s = self.structure.to_structure(lang)?;
        let k = s.language().k();
        let schedule = self
            .schedule
            .iter()
            .map(|e| {
                Ok(ScheduleEntry {
                    level: e.level,
                    obligation: ExtensionType { base_size: e.base, unary: e.unary, word: TreeNode::parse(&e.word, k)? },
                    kind: e.kind,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LimitPrefix::new(s, schedule, self.seed))
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn structure_value(a: &EnumStructure) -> Value {
    serde_json::to_value(StructureJson::from_structure(a)).expect("serializable")
}

pub fn words(nodes: &[TreeNode]) -> Vec<String> {
    nodes.iter().map(TreeNode::to_word).collect()
}

pub fn labeled_value(l: &LabeledStructure) -> Value {
    json!({ "structure": structure_value(&l.structure), "labels": words(&l.labels) })
}

pub fn age_map_value(v: &AgeMapVerdict) -> Value {
    let failure = match &v.failure {
        None => Value::Null,
        Some(AgeMapFailure::NotInjective { first, second, image }) => json!({
            "kind": "not_injective",
            "first": first.to_word(),
            "second": second.to_word(),
            "image": image.to_word(),
        }),
        Some(AgeMapFailure::Witness { witness, source_in_class, target_in_class }) => json!({
            "kind": "witness",
            "witness": labeled_value(witness),
            "source_in_class": source_in_class,
            "target_in_class": target_in_class,
        }),
    };
    json!({ "is_age_map": v.is_age_map, "failure": failure })
}

/// A node map as `[[source word, image word], ...]` per level.
pub fn node_map_value(f: &NodeMap) -> Value {
    let levels: Vec<Value> = (0..f.depth())
        .map(|m| {
            let k = f.k();
            let pairs: Vec<Value> = f
                .level(m)
                .iter()
                .enumerate()
                .map(|(i, img)| json!([TreeNode::from_index(k, m, i).to_word(), img.to_word()]))
                .collect();
            Value::Array(pairs)
        })
        .collect();
    Value::Array(levels)
}

/// Reads a `--levels` argument such as `2,3` (empty string is the empty set).
pub fn parse_levels(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("level {t:?}: {e}"))))
        .collect()
}

/// Reads a `--map` argument `s:t,s:t` of words; `-` or an empty side is the root.
pub fn parse_map(s: &str, k: u8) -> Result<Vec<(TreeNode, TreeNode)>> {
    let word = |w: &str| if w == "-" { TreeNode::parse("", k) } else { TreeNode::parse(w, k) };
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| Error::Parse(format!("map entry {pair:?} lacks ':'")))?;
            Ok((word(a.trim())?, word(b.trim())?))
        })
        .collect()
}

/// The unary and relation table of a structure view, for compact certificates.
pub fn table_value<V: View + ?Sized>(v: &V) -> Value {
    let n = v.len();
    let unary: Vec<u8> = (0..n).map(|i| v.unary(i)).collect();
    let rel: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            let r = v.rel(a, b);
            (r != 0).then_some([a, b, r as usize])
        })
        .collect();
    json!({ "n": n, "unary": unary, "rel": rel })
}
