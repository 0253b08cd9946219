//! Command-line front end. Every command prints one JSON report.
//!
//! Exit codes: 0 success, 1 domain error (including a failed `check`), 2 usage
//! or input-format error. Reports depend only on input contents and parameters;
//! `--jobs` and output flags never change them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::aemb::{find_aged_embedding, find_aged_embedding_growing, is_aged_embedding, AgedFailure};
use crate::agemap::is_age_map;
use crate::degrees::{degree_bound, run_coloring_experiment, Coloring, DEFAULT_CENSUS_CAP, EXPERIMENT_DISCLAIMER};
use crate::envelope::{crit_bound, envelope_size_bound, EnvelopeFailure, EnvelopeMode, EnvelopeVerdict, Envelopes};
use crate::error::{Error, Result};
use crate::forb::ForbFamily;
use crate::io::{
    age_map_value, labeled_value, node_map_value, parse_json, parse_levels, parse_map, structure_value, words,
    FamilyJson, PrefixJson, StructureJson,
};
use crate::limit::{generate_prefix, verify_left_dense, Generator, LimitPrefix};
use crate::nice::{build_y, nice_embedding_growing, nice_envelope};
use crate::structure::EnumStructure;
use crate::tree::coding_tree_of;

#[derive(Parser, Debug)]
#[command(name = "bigramsey", version, about = "Coding trees, aged embeddings and envelopes for Forb(F) classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Omit the timestamp field.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output file: the prefix for `gen`, the embedding for `nice`, otherwise the report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Membership of a structure in the class.
    Check {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Generate a left-dense prefix.
    Gen {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Left-density certificate up to a horizon.
    VerifyDense {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        horizon: usize,
    },
    /// Coding tree of a structure.
    Ct {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Decide whether a node map is an age map over a prefix.
    Agemap {
        #[command(flatten)]
        src: PrefixArgs,
        /// Pairs `source:target` of words; `-` is the root.
        #[arg(long)]
        map: String,
        /// Source context (defaults to the prefix).
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Aged embeddings.
    Aemb {
        #[command(subcommand)]
        action: AembCommand,
    },
    /// Envelope queries.
    Envelope {
        #[command(subcommand)]
        action: EnvelopeCommand,
    },
    /// Splitting, age-change and start levels of a set.
    Crit {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        levels: String,
    },
    /// Build Y over K_horizon and a nice embedding of it.
    Nice {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        horizon: usize,
        /// Base points of Y whose images form S; reports the envelope from copies.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Degree bound from the labeled census.
    Bound {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        envelope_bound: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CENSUS_CAP)]
        cap: usize,
    },
    /// Finite coloring probe over self-embeddings of a window.
    Experiment {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        structure: PathBuf,
        /// `canonical`, `constant`, `edge`, or a JSON file of `{"values", "color"}` rows.
        #[arg(long, default_value = "canonical")]
        coloring: String,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
}

#[derive(Args, Debug)]
struct PrefixArgs {
    /// Family file; defaults to the family embedded in the prefix.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Prefix file, or `-` for standard input.
    #[arg(long)]
    prefix: PathBuf,
}

#[derive(Subcommand, Debug)]
enum AembCommand {
    /// Construct an aged embedding of a structure into the prefix.
    Find {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        structure: PathBuf,
        /// Grow the prefix with demand levels when it is too shallow.
        #[arg(long)]
        grow: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Combinatorial,
    Definitional,
    Both,
}

#[derive(Subcommand, Debug)]
enum EnvelopeCommand {
    Check {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        levels: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
    },
    Close {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        levels: String,
    },
    Interior {
        #[command(flatten)]
        src: PrefixArgs,
        #[arg(long)]
        levels: String,
    },
}

/// A successful command's payload.
struct Outcome {
    command: &'static str,
    params: Value,
    result: Value,
    certificates: Value,
    warnings: Vec<String>,
    disclaimer: Option<&'static str>,
    exit: i32,
    /// File artifact written to `--out` instead of the report.
    artifact: Option<Value>,
}

impl Outcome {
    fn new(command: &'static str, params: Value, result: Value) -> Self {
        Outcome {
            command,
            params,
            result,
            certificates: json!({}),
            warnings: Vec::new(),
            disclaimer: None,
            exit: 0,
            artifact: None,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    inputs: &'a Value,
    inputs_digest: String,
    result: &'a Value,
    certificates: &'a Value,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    disclaimer: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

/// Input files read so far, keyed by role, for the digest.
#[derive(Default)]
struct Inputs {
    files: BTreeMap<String, Vec<u8>>,
}

impl Inputs {
    fn read(&mut self, role: &str, path: &Path) -> Result<String> {
        let bytes = if path.as_os_str() == "-" {
            let mut b = Vec::new();
            std::io::stdin().read_to_end(&mut b).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            b
        } else {
            std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        };
        let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.files.insert(role.to_string(), bytes);
        Ok(text)
    }

    fn digest(&self, command: &str, params: &Value) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(params).expect("serializable"));
        for (role, bytes) in &self.files {
            h.update((role.len() as u64).to_le_bytes());
            h.update(role.as_bytes());
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        hex::encode(h.finalize())
    }

    fn family(&mut self, path: &Path) -> Result<ForbFamily> {
        let text = self.read("family", path)?;
        parse_json::<FamilyJson>(&text, "family")?.to_family()
    }

    fn structure(&mut self, role: &str, path: &Path, family: Option<&ForbFamily>) -> Result<EnumStructure> {
        let text = self.read(role, path)?;
        parse_json::<StructureJson>(&text, role)?.to_structure(family.map(|f| f.language()))
    }

    /// Reads a prefix file or a `gen` report carrying one, plus the family.
    fn prefix(&mut self, src: &PrefixArgs) -> Result<(ForbFamily, LimitPrefix)> {
        let text = self.read("prefix", &src.prefix)?;
        let value: Value = parse_json(&text, "prefix")?;
        let value = match value.get("result").and_then(|r| r.get("prefix")) {
            Some(p) => p.clone(),
            None => value,
        };
        let pj: PrefixJson = serde_json::from_value(value).map_err(|e| Error::Parse(format!("prefix: {e}")))?;
        let family = match (&src.family, &pj.family) {
            (Some(path), _) => self.family(path)?,
            (None, Some(f)) => f.to_family()?,
            (None, None) => return Err(Error::Parse("no --family given and the prefix embeds none".into())),
        };
        let prefix = pj.to_prefix(Some(family.language()))?;
        if !family.contains(prefix.structure())? {
            return Err(Error::NotInClass("the prefix embeds a forbidden structure".into()));
        }
        Ok((family, prefix))
    }
}

/// Parses `args` (including the program name), runs the command and prints the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut inputs = Inputs::default();
    match dispatch(&cli, &mut inputs) {
        Ok(o) => emit(&cli, &inputs, o),
        Err(e) => {
            let code = if matches!(e, Error::Parse(_)) { 2 } else { 1 };
            let diag = json!({ "error": { "name": e.name(), "message": e.to_string() } });
            say(&render(&diag, cli.pretty));
            eprintln!("bigramsey: {}: {e}", e.name());
            code
        }
    }
}

/// Prints a line, ignoring a closed pipe.
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn render<T: Serialize>(v: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("serializable")
    } else {
        serde_json::to_string(v).expect("serializable")
    }
}

fn emit(cli: &Cli, inputs: &Inputs, o: Outcome) -> i32 {
    let timestamp = (!cli.no_timestamp).then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    });
    let report = Report {
        command: o.command,
        inputs: &o.params,
        inputs_digest: inputs.digest(o.command, &o.params),
        result: &o.result,
        certificates: &o.certificates,
        warnings: &o.warnings,
        disclaimer: o.disclaimer,
        timestamp,
    };
    let text = render(&report, cli.pretty);
    let write = |path: &Path, body: String| -> i32 {
        match std::fs::write(path, body + "\n") {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("bigramsey: cannot write {}: {e}", path.display());
                2
            }
        }
    };
    match (&cli.out, o.artifact) {
        (Some(path), Some(artifact)) => {
            let code = write(path, render(&artifact, cli.pretty));
            say(&text);
            if code != 0 {
                code
            } else {
                o.exit
            }
        }
        (Some(path), None) => {
            let code = write(path, text);
            if code != 0 {
                code
            } else {
                o.exit
            }
        }
        (None, _) => {
            say(&text);
            o.exit
        }
    }
}

fn sha256_hex(v: &Value) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(v).expect("serializable")))
}

fn prefix_value(p: &LimitPrefix, family: &ForbFamily) -> Value {
    serde_json::to_value(PrefixJson::from_prefix(p, Some(family))).expect("serializable")
}

fn envelope_value(v: &EnvelopeVerdict) -> Value {
    let failure = match &v.failure {
        None => Value::Null,
        Some(EnvelopeFailure::MeetOutside { a, b, level }) => {
            json!({ "kind": "meet_outside", "a": a, "b": b, "level": level })
        }
        Some(EnvelopeFailure::Projection { level, verdict }) => {
            json!({ "kind": "projection", "level": level, "verdict": age_map_value(verdict) })
        }
        Some(EnvelopeFailure::Construction(f)) => json!({ "kind": "construction", "detail": aged_failure_value(f) }),
    };
    json!({
        "is_envelope": v.is_envelope,
        "failure": failure,
        "construction": v.construction.as_ref().map(node_map_value),
    })
}

fn aged_failure_value(f: &AgedFailure) -> Value {
    match f {
        AgedFailure::Embedding(c) => json!({ "clause": format!("{c:?}") }),
        AgedFailure::AgeMap { level, verdict } => json!({ "level": level, "age_map": age_map_value(verdict) }),
    }
}

fn parse_coloring(spec: &str, inputs: &mut Inputs) -> Result<Coloring> {
    match spec {
        "canonical" => Ok(Coloring::Canonical),
        "constant" => Ok(Coloring::Constant),
        "edge" => Ok(Coloring::Edge),
        path => {
            #[derive(serde::Deserialize)]
            struct Row {
                values: Vec<usize>,
                color: u32,
            }
            let text = inputs.read("coloring", Path::new(path))?;
            let rows: Vec<Row> = parse_json(&text, "coloring")?;
            Ok(Coloring::Table(rows.into_iter().map(|r| (r.values, r.color)).collect()))
        }
    }
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome> {
    let jobs = cli.jobs.max(1);
    match &cli.command {
        Command::Check { family, structure } => {
            let fam = inputs.family(family)?;
            let a = inputs.structure("structure", structure, Some(&fam))?;
            let copy = fam.first_forbidden_copy(&a);
            let mut o = Outcome::new("check", json!({}), json!({ "member": copy.is_none() }));
            if let Some((j, emb)) = copy {
                o.result["reason"] = json!(format!("not a member: embeds forbidden[{j}]"));
                o.certificates = json!({ "forbidden": j, "embedding": emb });
                o.exit = 1;
            }
            o.warnings = fam.warnings().to_vec();
            Ok(o)
        }
        Command::Gen { family, size, seed } => {
            let fam = inputs.family(family)?;
            let p = generate_prefix(&fam, *size, *seed)?;
            let pv = prefix_value(&p, &fam);
            let mut result = json!({ "size": size, "seed": seed, "prefix_sha256": sha256_hex(&pv) });
            let mut o = Outcome::new("gen", json!({ "size": size, "seed": seed }), Value::Null);
            if cli.out.is_some() {
                o.artifact = Some(pv);
            } else {
                result["prefix"] = pv;
            }
            o.result = result;
            o.warnings = fam.warnings().to_vec();
            Ok(o)
        }
        Command::VerifyDense { src, horizon } => {
            let (fam, p) = inputs.prefix(src)?;
            if *horizon >= p.len().max(1) {
                return Err(Error::AmbientTooShallow { need: horizon + 1, have: p.len() });
            }
            let r = verify_left_dense(&p, &fam, *horizon);
            let ext = |e: &crate::forb::ExtensionType| json!({ "base": e.base_size, "unary": e.unary, "word": e.word.to_word() });
            let mut o = Outcome::new(
                "verify-dense",
                json!({ "horizon": horizon }),
                json!({
                    "horizon": r.horizon,
                    "met": r.met.len(),
                    "unmet": r.unmet.iter().map(ext).collect::<Vec<_>>(),
                    "violations": r.violations,
                }),
            );
            o.certificates =
                json!({ "witnesses": r.met.iter().map(|(e, n)| json!({ "obligation": ext(e), "level": n })).collect::<Vec<_>>() });
            Ok(o)
        }
        Command::Ct { structure } => {
            let a = inputs.structure("structure", structure, None)?;
            let ct = coding_tree_of(a.language(), &a);
            Ok(Outcome::new("ct", json!({}), json!({ "c": words(&ct.nodes), "u": ct.unary })))
        }
        Command::Agemap { src, map, structure } => {
            let (fam, p) = inputs.prefix(src)?;
            let source = match structure {
                Some(path) => inputs.structure("structure", path, Some(&fam))?,
                None => p.structure().clone(),
            };
            let pairs = parse_map(map, fam.language().k())?;
            let v = is_age_map(&pairs, &source, p.structure(), &fam)?;
            let mut o = Outcome::new("agemap", json!({ "map": map }), json!({ "is_age_map": v.is_age_map }));
            o.certificates = age_map_value(&v);
            Ok(o)
        }
        Command::Aemb { action: AembCommand::Find { src, structure, grow } } => {
            let (fam, p) = inputs.prefix(src)?;
            let a = inputs.structure("structure", structure, Some(&fam))?;
            let (emb, ambient) = if *grow {
                let mut g = Generator::from_prefix(fam.clone(), &p)?;
                let e = find_aged_embedding_growing(&a, &mut g)?;
                (e, g.into_prefix())
            } else {
                (find_aged_embedding(&a, &p, &fam)?, p.clone())
            };
            let check = is_aged_embedding(&emb.map, &a, &ambient, &fam)?;
            let mut o = Outcome::new(
                "aemb find",
                json!({ "grow": grow }),
                json!({ "induced": emb.induced, "ambient_depth": ambient.len(), "grown_levels": ambient.len() - p.len() }),
            );
            o.certificates = json!({ "map": node_map_value(&emb.map), "verified": check.ok });
            if *grow && ambient.len() > p.len() {
                o.artifact = Some(prefix_value(&ambient, &fam));
            }
            Ok(o)
        }
        Command::Envelope { action } => envelope_command(action, inputs),
        Command::Crit { src, levels } => {
            let (fam, p) = inputs.prefix(src)?;
            let s = parse_levels(levels)?;
            let env = Envelopes::new(&p, &fam);
            let r = env.crit(&s)?;
            let mut o = Outcome::new(
                "crit",
                json!({ "levels": s }),
                json!({
                    "levels": r.levels,
                    "sp": r.sp,
                    "ac": r.ac.iter().map(|(m, _)| *m).collect::<Vec<_>>(),
                    "crit": r.crit(),
                    "start": r.start.iter().map(|&(x, st)| json!([x, st])).collect::<Vec<_>>(),
                    "crit_bound": crit_bound(r.levels.len(), &fam).to_string(),
                }),
            );
            o.certificates = json!({
                "ac_witnesses": r.ac.iter().map(|(m, w)| json!({ "level": m, "witness": labeled_value(w) })).collect::<Vec<_>>()
            });
            Ok(o)
        }
        Command::Nice { src, horizon, levels } => {
            let (fam, p) = inputs.prefix(src)?;
            let y = build_y(&fam, &p, *horizon)?;
            let mut g = Generator::from_prefix(fam.clone(), &p)?;
            let eta = nice_embedding_growing(&y, &mut g)?;
            let ambient = g.into_prefix();
            let points: Vec<Value> =
                eta.points().iter().zip(eta.levels()).map(|(pt, l)| json!({ "point": pt, "level": l })).collect();
            let mut result = json!({
                "horizon": horizon,
                "y_size": y.points().len(),
                "base_levels": eta.base_levels(),
                "ambient_depth": ambient.len(),
            });
            let mut certificates = json!({
                "eta": points,
                "ordered_embedding": eta.is_ordered_embedding(&y, &ambient),
                "nice_violations": eta.nice_violations(&ambient).len(),
                "left_pattern_violations": eta.left_pattern_violations(&ambient).len(),
            });
            let params = json!({ "horizon": horizon, "levels": levels });
            if let Some(levels) = levels {
                let base = eta.base_levels();
                let s: Vec<usize> = parse_levels(levels)?
                    .into_iter()
                    .map(|n| base.get(n).copied().ok_or(Error::OutOfRange { index: n, size: base.len() }))
                    .collect::<Result<_>>()?;
                let env = Envelopes::new(&ambient, &fam);
                let e = nice_envelope(&s, &eta, &y, &env)?;
                let closure = env.closure(&s)?;
                result["s"] = json!(s);
                result["nice_envelope"] = json!(e.levels);
                result["closure"] = json!(closure);
                result["envelope_size_bound"] = json!(envelope_size_bound(s.len(), &fam).to_string());
                certificates["resolved"] =
                    json!(e.resolved.iter().map(|(n, pt)| json!({ "level": n, "point": pt })).collect::<Vec<_>>());
                certificates["nice_envelope_is_envelope"] =
                    json!(env.is_envelope(&e.levels, EnvelopeMode::Combinatorial)?.is_envelope);
                certificates["interior_of_closure"] = json!(env.interior(&closure)?);
            }
            let mut o = Outcome::new("nice", params, result);
            o.certificates = certificates.clone();
            o.artifact = Some(json!({ "eta": certificates["eta"], "prefix": prefix_value(&ambient, &fam) }));
            Ok(o)
        }
        Command::Bound { family, structure, envelope_bound, cap } => {
            let fam = inputs.family(family)?;
            let a = inputs.structure("structure", structure, Some(&fam))?;
            let r = degree_bound(&a, &fam, *envelope_bound, *cap, jobs)?;
            let mut o = Outcome::new(
                "bound",
                json!({ "envelope_bound": envelope_bound, "cap": cap }),
                json!({
                    "size": r.size,
                    "d": r.d,
                    "ell": r.ell.to_string(),
                    "census": r.census,
                    "d_range": "1..=D",
                    "counting": "labeled",
                    "closed_form_d": envelope_size_bound(r.size, &fam).to_string(),
                }),
            );
            o.certificates = json!({ "structure": structure_value(&a) });
            Ok(o)
        }
        Command::Experiment { src, structure, coloring, window, budget } => {
            let (fam, p) = inputs.prefix(src)?;
            let a = inputs.structure("structure", structure, Some(&fam))?;
            let col = parse_coloring(coloring, inputs)?;
            let env = Envelopes::new(&p, &fam);
            let x = run_coloring_experiment(&env, &a, &col, *window, *budget, jobs)?;
            let mut o = Outcome::new(
                "experiment",
                json!({ "coloring": coloring, "window": window, "budget": budget }),
                json!({
                    "window": x.window,
                    "eta": x.eta,
                    "count": x.count(),
                    "identity_count": x.identity_count,
                    "evaluated": x.evaluated,
                    "budget_exhausted": x.budget_exhausted,
                }),
            );
            o.certificates = json!({ "colors": x.colors });
            o.disclaimer = Some(EXPERIMENT_DISCLAIMER);
            Ok(o)
        }
    }
}

fn envelope_command(action: &EnvelopeCommand, inputs: &mut Inputs) -> Result<Outcome> {
    match action {
        EnvelopeCommand::Check { src, levels, mode } => {
            let (fam, p) = inputs.prefix(src)?;
            let s = parse_levels(levels)?;
            let env = Envelopes::new(&p, &fam);
            let params = json!({ "levels": s, "mode": mode });
            let mut verdicts = serde_json::Map::new();
            if !matches!(mode, ModeArg::Definitional) {
                verdicts.insert("combinatorial".into(), envelope_value(&env.is_envelope(&s, EnvelopeMode::Combinatorial)?));
            }
            if !matches!(mode, ModeArg::Combinatorial) {
                verdicts.insert("definitional".into(), envelope_value(&env.is_envelope(&s, EnvelopeMode::Definitional)?));
            }
            let flags: Vec<bool> = verdicts.values().map(|v| v["is_envelope"].as_bool().unwrap_or(false)).collect();
            let agree = flags.windows(2).all(|w| w[0] == w[1]);
            let mut o = Outcome::new("envelope check", params, json!({ "is_envelope": flags[0], "modes_agree": agree }));
            o.certificates = Value::Object(verdicts);
            if !agree {
                o.warnings.push("combinatorial and definitional verdicts differ".into());
            }
            Ok(o)
        }
        EnvelopeCommand::Close { src, levels } => {
            let (fam, p) = inputs.prefix(src)?;
            let s = parse_levels(levels)?;
            let env = Envelopes::new(&p, &fam);
            let cl = env.closure(&s)?;
            let mut o = Outcome::new("envelope close", json!({ "levels": s }), json!({ "closure": cl }));
            o.certificates = json!({ "closure_is_envelope": env.is_envelope(&cl, EnvelopeMode::Combinatorial)?.is_envelope });
            Ok(o)
        }
        EnvelopeCommand::Interior { src, levels } => {
            let (fam, p) = inputs.prefix(src)?;
            let e = parse_levels(levels)?;
            let env = Envelopes::new(&p, &fam);
            let int = env.interior(&e)?;
            let back = if int.is_empty() { Vec::new() } else { env.closure(&int)? };
            let mut o = Outcome::new("envelope interior", json!({ "levels": e }), json!({ "interior": int }));
            o.certificates = json!({ "closure_of_interior": back });
            Ok(o)
        }
    }
}
