//! Job model behind the `filtrate` binary. Every subcommand is turned into a
//! [`JobSpec`] and executed by [`run`], so single commands and batch files share
//! one code path and one report format.

use std::path::{Path, PathBuf};

use filtrate_core::coeff::RingSpec;
use filtrate_core::emap::{EMap, EMapError};
use filtrate_core::filt::{
    phi, product_sampler, sample_recursive, FiltError, FiltrationSpec, RecursiveScheme, Route, SampleBudget,
};
use filtrate_core::magnus::magnus;
use filtrate_core::massey::{necklace, pairing_matrix, MasseyError};
use filtrate_core::words::{max_generator_in, parse_word, GroupWord, Monomial, WordError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const GRAMMAR: &str = "\
WORDS
  word      := term (\"*\" term)*
  term      := atom (\"^\" signed-int)?
  atom      := generator | \"[\" word \",\" word \"]\" | \"(\" word \")\"
  generator := \"x\" positive-int
  Whitespace is insignificant. The empty word is spelled \"e\".
  [u,v] expands to u^-1*v^-1*u*v.

MONOMIALS (rep --monomial)
  concatenated generators such as x1x2x1

E-MAPS (--emap)
  \"trivial\" | \"const:<a>\" | \"gcdseq:<a1>,<a2>,...\" | \"zass:<p>,<t>\" | \"file:<path>\"
  file: JSON table of rows {\"n\": ..., \"values\": [e(n,1), ..., e(n,n)]}

RINGS (--ring)
  \"Z\" | \"Z/<m>\" with m >= 1

SAMPLING SCHEMES (sample --scheme)
  afilt:<a1>,<a2>,... | zass:<p>,<t> | product:<e-map>

OUTPUT
  JSON report carrying the tool version and seed; all numbers are decimal strings.

EXIT CODES
  0 ok, 2 parse or validation error, 3 precondition violation, 4 route disagreement";

fn default_ring() -> String {
    "Z".into()
}

fn default_count() -> usize {
    SampleBudget::default().count
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Member {
        word: String,
        emap: String,
        level: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<u32>,
        #[serde(default)]
        route: Route,
    },
    Magnus {
        word: String,
        #[serde(default = "default_ring")]
        ring: String,
        cap: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<u32>,
    },
    Rep {
        word: String,
        monomial: String,
        #[serde(default = "default_ring")]
        ring: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<u32>,
    },
    Sample {
        scheme: String,
        level: usize,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<u32>,
    },
    EmapCheck {
        emap: String,
        n_max: usize,
    },
    Massey {
        alphabet: u32,
        level: usize,
        #[serde(default)]
        emit_matrix: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Member { .. } => "member",
            Command::Magnus { .. } => "magnus",
            Command::Rep { .. } => "rep",
            Command::Sample { .. } => "sample",
            Command::EmapCheck { .. } => "emap-check",
            Command::Massey { .. } => "massey",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Invalid = 2,
    Precondition = 3,
    Disagreement = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }

    fn kind(self) -> &'static str {
        match self {
            Exit::Ok => "ok",
            Exit::Invalid => "invalid-input",
            Exit::Precondition => "precondition",
            Exit::Disagreement => "route-disagreement",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
    pub extra: Map<String, Value>,
}

impl Failure {
    fn new(exit: Exit, message: impl Into<String>) -> Self {
        Failure { exit, message: message.into(), extra: Map::new() }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.into(), value);
        self
    }
}

impl From<WordError> for Failure {
    fn from(e: WordError) -> Self {
        let f = Failure::new(Exit::Invalid, e.to_string());
        match e {
            WordError::Syntax { position, .. } => f.with("position", json!(position)),
            _ => f,
        }
    }
}

impl From<EMapError> for Failure {
    fn from(e: EMapError) -> Self {
        let exit = match e {
            EMapError::Syntax(_) | EMapError::File { .. } | EMapError::Invalid(_) => Exit::Invalid,
            _ => Exit::Precondition,
        };
        Failure::new(exit, e.to_string())
    }
}

impl From<FiltError> for Failure {
    fn from(e: FiltError) -> Self {
        match e {
            FiltError::EMap(inner) => inner.into(),
            FiltError::RouteDisagreement { ref word, .. } => {
                let word = word.clone();
                Failure::new(Exit::Disagreement, e.to_string()).with("witness_word", json!(word))
            }
            FiltError::ZeroLevel | FiltError::EmptyMonomial | FiltError::OutOfAlphabet { .. } => {
                Failure::new(Exit::Invalid, e.to_string())
            }
            _ => Failure::new(Exit::Precondition, e.to_string()),
        }
    }
}

impl From<MasseyError> for Failure {
    fn from(e: MasseyError) -> Self {
        Failure::new(Exit::Precondition, e.to_string())
    }
}

/// A finished job: its exit status and JSON report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub exit: Exit,
    pub body: Value,
}

impl Report {
    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}

/// Rewrites every JSON number as its decimal string.
pub fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_numbers(v))).collect()),
        other => other,
    }
}

fn alphabet_for(explicit: Option<u32>, texts: &[&str]) -> Result<u32, Failure> {
    match explicit {
        Some(0) => Err(Failure::new(Exit::Invalid, "alphabet must have at least one generator")),
        Some(k) => Ok(k),
        None => Ok(texts.iter().map(|t| max_generator_in(t)).max().unwrap_or(0).max(1)),
    }
}

fn ring(text: &str) -> Result<RingSpec, Failure> {
    text.parse().map_err(|e: filtrate_core::coeff::RingParseError| Failure::new(Exit::Invalid, e.to_string()))
}

fn word(text: &str, alphabet: u32) -> Result<GroupWord, Failure> {
    Ok(parse_word(text, alphabet)?)
}

fn member(word_text: &str, emap: &str, level: usize, alphabet: Option<u32>, route: Route) -> Result<Value, Failure> {
    let alphabet = alphabet_for(alphabet, &[word_text])?;
    let g = word(word_text, alphabet)?;
    let spec = FiltrationSpec::new(EMap::from_spec(emap)?, level, route)?;
    let d = spec.decide(&g)?;
    let witness = match (&d.series, &d.kernels) {
        (Some(s), _) if !s.member => s.witness.as_ref().map(|w| {
            json!({"degree": w.degree, "word": w.word.to_string(), "coefficient": w.coefficient.to_string()})
        }),
        (_, Some(k)) if !k.member => k.witness.as_ref().map(|(deg, w)| json!({"degree": deg, "word": w.to_string()})),
        _ => None,
    };
    let mut out = json!({
        "word": g.to_string(),
        "alphabet": alphabet,
        "emap": spec.emap().to_string(),
        "level": level,
        "route": route,
        "member": d.member,
        "route_agreement": if d.series.is_some() && d.kernels.is_some() { json!(true) } else { Value::Null },
    });
    if let Some(w) = witness {
        out["witness"] = w;
    }
    Ok(out)
}

fn magnus_job(word_text: &str, ring_text: &str, cap: usize, alphabet: Option<u32>) -> Result<Value, Failure> {
    let alphabet = alphabet_for(alphabet, &[word_text])?;
    let g = word(word_text, alphabet)?;
    let s = magnus(&g, &ring(ring_text)?, cap);
    Ok(json!({"word": g.to_string(), "alphabet": alphabet, "series": s.to_json()}))
}

fn rep(word_text: &str, monomial: &str, ring_text: &str, alphabet: Option<u32>) -> Result<Value, Failure> {
    let alphabet = alphabet_for(alphabet, &[word_text, monomial])?;
    let g = word(word_text, alphabet)?;
    let w = Monomial::parse(monomial, alphabet)?;
    let m = phi(&w, &g, &ring(ring_text)?)?;
    Ok(json!({
        "word": g.to_string(),
        "monomial": w.to_string(),
        "ring": m.ring().to_string(),
        "size": m.size(),
        "matrix": m.rows(),
    }))
}

fn parse_u64s(list: &str, what: &str) -> Result<Vec<u64>, Failure> {
    list.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Failure::new(Exit::Invalid, format!("bad {what} value `{}`", t.trim()))))
        .collect()
}

fn sample(scheme: &str, level: usize, count: usize, alphabet: Option<u32>, seed: u64) -> Result<Value, Failure> {
    let alphabet = match alphabet {
        None => 2,
        given => alphabet_for(given, &[])?,
    };
    let budget = SampleBudget::with_count(count);
    let words = if let Some(rest) = scheme.strip_prefix("afilt:") {
        let s = RecursiveScheme::AFiltration(parse_u64s(rest, "sequence")?);
        sample_recursive(&s, alphabet, level, &budget, seed)?
    } else if let Some(rest) = scheme.strip_prefix("zass:") {
        let v = parse_u64s(rest, "zass")?;
        let [p, t] = v[..] else {
            return Err(Failure::new(Exit::Invalid, format!("scheme `{scheme}` needs zass:<p>,<t>")));
        };
        let t = u32::try_from(t).map_err(|_| Failure::new(Exit::Invalid, "t out of range"))?;
        sample_recursive(&RecursiveScheme::q_zassenhaus(p, t)?, alphabet, level, &budget, seed)?
    } else if let Some(rest) = scheme.strip_prefix("product:") {
        product_sampler(&EMap::from_spec(rest)?, alphabet, level, &budget, seed)?
    } else {
        return Err(Failure::new(
            Exit::Invalid,
            format!("unknown scheme `{scheme}`: expected afilt:<a1>,... | zass:<p>,<t> | product:<e-map>"),
        ));
    };
    Ok(json!({
        "scheme": scheme,
        "level": level,
        "alphabet": alphabet,
        "count": words.len(),
        "words": words.iter().map(GroupWord::to_string).collect::<Vec<_>>(),
    }))
}

fn verdict<V: Serialize>(r: Result<(), V>) -> Value {
    match r {
        Ok(()) => json!({"ok": true}),
        Err(v) => json!({"ok": false, "violation": v}),
    }
}

fn emap_check(spec: &str, n_max: usize) -> Result<Value, Failure> {
    if n_max == 0 {
        return Err(Failure::new(Exit::Invalid, "n_max must be at least 1"));
    }
    let e = EMap::from_spec(spec)?;
    let rows = e
        .levels(n_max)
        .into_iter()
        .map(|n| {
            let values: Vec<String> = e.row(n)?.iter().map(ToString::to_string).collect();
            Ok(json!({"n": n, "values": values}))
        })
        .collect::<Result<Vec<_>, EMapError>>()?;
    Ok(json!({
        "emap": e.to_string(),
        "n_max": n_max,
        "rows": rows,
        "descending": verdict(e.check_descending(n_max)),
        "binomial": verdict(e.check_binomial(n_max)),
        "condition_iii": verdict(e.check_condition_iii(n_max)),
    }))
}

fn massey(alphabet: u32, level: usize, emit_matrix: bool) -> Result<Value, Failure> {
    if alphabet == 0 {
        return Err(Failure::new(Exit::Invalid, "alphabet must have at least one generator"));
    }
    let m = pairing_matrix(alphabet, level)?;
    let rank = m.rank();
    let l = necklace(alphabet as u64, level as u64);
    let mut out = json!({
        "alphabet": alphabet,
        "level": level,
        "rank": rank,
        "necklace": l.to_string(),
        "match": l == num_bigint::BigInt::from(rank),
        "rows": m.num_rows(),
        "cols": m.num_cols(),
    });
    if emit_matrix {
        out["matrix"] = serde_json::to_value(m.to_json()).expect("plain data");
    }
    Ok(out)
}

fn execute(job: &JobSpec) -> Result<Value, Failure> {
    match &job.command {
        Command::Member { word, emap, level, alphabet, route } => member(word, emap, *level, *alphabet, *route),
        Command::Magnus { word, ring, cap, alphabet } => magnus_job(word, ring, *cap, *alphabet),
        Command::Rep { word, monomial, ring, alphabet } => rep(word, monomial, ring, *alphabet),
        Command::Sample { scheme, level, count, alphabet } => {
            sample(scheme, *level, *count, *alphabet, job.seed.unwrap_or(0))
        }
        Command::EmapCheck { emap, n_max } => emap_check(emap, *n_max),
        Command::Massey { alphabet, level, emit_matrix } => massey(*alphabet, *level, *emit_matrix),
    }
}

/// Runs one job. Never panics on bad input; failures become an error report
/// with the matching exit status.
pub fn run(job: &JobSpec) -> Report {
    let mut body = Map::new();
    body.insert("tool".into(), json!("filtrate"));
    body.insert("version".into(), json!(VERSION));
    body.insert("seed".into(), json!(job.seed.unwrap_or(0)));
    body.insert("command".into(), json!(job.command.name()));
    body.insert("job".into(), serde_json::to_value(&job.command).expect("plain data"));
    let exit = match execute(job) {
        Ok(result) => {
            body.insert("status".into(), json!("ok"));
            body.insert("result".into(), result);
            Exit::Ok
        }
        Err(f) => {
            let mut err = Map::new();
            err.insert("kind".into(), json!(f.exit.kind()));
            err.insert("exit".into(), json!(f.exit.code()));
            err.insert("message".into(), json!(f.message));
            err.extend(f.extra);
            body.insert("status".into(), json!("error"));
            body.insert("error".into(), Value::Object(err));
            f.exit
        }
    };
    Report { exit, body: stringify_numbers(Value::Object(body)) }
}

/// A job file is a JSON list of jobs, or an object with a `jobs` list.
pub fn parse_jobs(text: &str) -> Result<Vec<JobSpec>, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let list = match v {
        Value::Object(mut o) => o.remove("jobs").ok_or("job file object has no `jobs` list")?,
        other => other,
    };
    serde_json::from_value(list).map_err(|e| e.to_string())
}

/// Runs jobs on scoped threads; the combined report lists them in file order,
/// so the output does not depend on scheduling.
pub fn run_batch(jobs: &[JobSpec]) -> Report {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(workers).max(1);
    let reports: Vec<Report> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|c| s.spawn(move || c.iter().map(run).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("jobs do not panic")).collect()
    });
    let exit = reports.iter().map(|r| r.exit).max().unwrap_or(Exit::Ok);
    let body = json!({
        "tool": "filtrate",
        "version": VERSION,
        "command": "batch",
        "jobs": reports.iter().map(|r| r.body.clone()).collect::<Vec<_>>(),
    });
    Report { exit, body: stringify_numbers(body) }
}

pub fn batch_failure(message: &str) -> Report {
    let body = json!({
        "tool": "filtrate",
        "version": VERSION,
        "command": "batch",
        "status": "error",
        "error": {"kind": Exit::Invalid.kind(), "exit": Exit::Invalid.code(), "message": message},
    });
    Report { exit: Exit::Invalid, body: stringify_numbers(body) }
}

/// Writes a report to `path`, or standard output when `path` is `None`.
pub fn emit(report: &Report, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, report.to_pretty()),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(report.to_pretty().as_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(v: Value) -> JobSpec {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn documented_examples() {
        let r = run(&job(json!({"command": "member", "word": "[x1,x2]", "emap": "trivial", "level": 3})));
        assert_eq!(r.exit, Exit::Ok);
        assert_eq!(r.body["result"]["member"], json!(false));

        let r = run(&job(json!({"command": "member", "word": "x1**", "emap": "trivial", "level": 2})));
        assert_eq!(r.exit, Exit::Invalid);
        assert_eq!(r.body["error"]["position"], json!("3"));

        let r = run(&job(json!({"command": "massey", "alphabet": 2, "level": 2})));
        assert_eq!(r.body["result"]["rank"], json!("1"));
        assert_eq!(r.body["result"]["necklace"], json!("1"));
        assert_eq!(r.body["result"]["match"], json!(true));
    }

    #[test]
    fn reports_carry_version_and_seed() {
        let r = run(&job(json!({"command": "magnus", "word": "x1", "cap": 1, "seed": 42})));
        assert_eq!(r.body["version"], json!(VERSION));
        assert_eq!(r.body["seed"], json!("42"));
    }

    #[test]
    fn route_disagreement_is_exit_4() {
        let f: Failure = FiltError::RouteDisagreement { word: "x1".into(), series: true, kernels: false }.into();
        assert_eq!(f.exit.code(), 4);
        assert_eq!(f.extra["witness_word"], json!("x1"));
    }

    #[test]
    fn numbers_become_strings() {
        let v = stringify_numbers(json!({"a": [1, -2, {"b": 3.5}], "c": true, "d": null}));
        assert_eq!(v, json!({"a": ["1", "-2", {"b": "3.5"}], "c": true, "d": null}));
    }

    #[test]
    fn job_files_accept_both_layouts() {
        let list = r#"[{"command": "massey", "alphabet": 2, "level": 2}]"#;
        let wrapped = r#"{"jobs": [{"command": "massey", "alphabet": 2, "level": 2}]}"#;
        assert_eq!(parse_jobs(list).unwrap(), parse_jobs(wrapped).unwrap());
        assert!(parse_jobs(r#"{"tasks": []}"#).is_err());
        assert!(parse_jobs(r#"[{"command": "teleport"}]"#).is_err());
    }

    #[test]
    fn batch_exit_is_the_worst_job() {
        let jobs = parse_jobs(
            r#"[{"command": "massey", "alphabet": 2, "level": 1},
                {"command": "magnus", "word": "x1", "cap": 1}]"#,
        )
        .unwrap();
        let r = run_batch(&jobs);
        assert_eq!(r.exit, Exit::Precondition);
        assert_eq!(r.body["jobs"][1]["status"], json!("ok"));
    }
}
