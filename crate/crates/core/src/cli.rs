//! Command-line front end: argument parsing, dispatch, and JSON / CSV / text
//! rendering. Every command builds one JSON document; text output is
//! rendered from that document so both carry the same numbers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ascent::Effort;
use crate::error::{Error, Result};
use crate::fourier::{a_norm, a_norm_contributions, AFunction};
use crate::group::{make_cyclic, make_dihedral, make_symmetric, parse_group, FiniteGroup, GroupBijection};
use crate::homspace::{cb_norm, hom_norm_report, InducedHom};
use crate::lemmas::{estimate_jordan_rho, verify_invmult, verify_norm_gap, verify_unitmult, LemmaReport};
use crate::linalg::C64;
use crate::repr::{character_table, irreps_of};
use crate::reproduce::reproduce;
use crate::search::{enumerate_bijections, min_distortion, norm_gap_scan, SearchOptions};

pub const SCHEMA: u64 = 1;
pub const EFFORT_ENV: &str = "FD_EFFORT";

#[derive(Debug, Parser)]
#[command(name = "fdist", version, about = "Norms and distortion of algebra isomorphisms between Fourier algebras of finite groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer effort; falls back to FD_EFFORT, then `default`.
    #[arg(long, global = true, env = EFFORT_ENV, value_enum)]
    pub effort: Option<EffortName>,
    /// Upper bound on parallel work items.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EffortName {
    Low,
    Default,
    High,
}

impl EffortName {
    pub fn effort(self) -> Effort {
        match self {
            EffortName::Low => Effort::LOW,
            EffortName::Default => Effort::DEFAULT,
            EffortName::High => Effort::HIGH,
        }
    }

    fn name(self) -> &'static str {
        match self {
            EffortName::Low => "low",
            EffortName::Default => "default",
            EffortName::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irreducible representations and character table of a group.
    Irreps {
        /// Group literal (`Z6`, `S3`, `D4`, `Q8`, `Z2xZ2`) or path to a JSON table.
        #[arg(long)]
        group: String,
    },
    /// Fourier-algebra norm of a function.
    Norm {
        #[arg(long)]
        group: String,
        /// Function values as a JSON array of numbers or `[re, im]` pairs.
        #[arg(long, conflicts_with = "fourier_coeffs", required_unless_present = "fourier_coeffs")]
        values: Option<String>,
        /// Comma-separated coefficients `a_j` of `f(k) = Σ a_j e^{2πijk/n}`.
        #[arg(long, allow_hyphen_values = true)]
        fourier_coeffs: Option<String>,
    },
    /// Norms of `T f = f ∘ t` and its inverse for a bijection `t: target → source`.
    Homnorm {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Comma-separated images `t(0), t(1), ...`.
        #[arg(long)]
        bijection: String,
        /// Comma-separated amplification levels.
        #[arg(long, default_value = "1")]
        levels: String,
        /// Also estimate the completely bounded norm of `T`.
        #[arg(long)]
        cb: bool,
    },
    /// Every identity-fixing bijection between two groups of equal order.
    Scan {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// 1 for operator norms only, 2 or more to add that level.
        #[arg(long, default_value_t = 2)]
        level: usize,
        /// Bijections drawn when the order exceeds the exhaustive limit.
        #[arg(long, default_value_t = crate::search::DEFAULT_SAMPLE_SIZE)]
        samples: usize,
    },
    /// Falsification runs for the block-matrix and norm-gap inequalities.
    VerifyLemmas {
        #[arg(long, value_enum, default_value_t = LemmaChoice::All)]
        lemma: LemmaChoice,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Recompute the reference examples.
    ReproducePaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaChoice {
    All,
    Invmult,
    Unitmult,
    NormGap,
    JordanRho,
}

/// Rendered command output plus the process exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: String,
    pub exit_code: i32,
}

/// Group literal, or a JSON table `{"order", "table", "label"}` read from a path.
pub fn load_group(spec: &str) -> Result<FiniteGroup> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return FiniteGroup::from_json(&text);
    }
    parse_group(spec)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad {what} entry '{}'", p.trim()))))
        .collect()
}

fn parse_real_list(s: &str) -> Result<Vec<C64>> {
    let xs: Vec<f64> = parse_list(s, "coefficient")?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericInput);
    }
    Ok(xs.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// JSON array whose entries are numbers or `[re, im]` pairs.
pub fn parse_values(s: &str) -> Result<Vec<C64>> {
    let v: Value = serde_json::from_str(s)?;
    let arr = v.as_array().ok_or_else(|| Error::Parse("values must be a JSON array".into()))?;
    arr.iter()
        .map(|e| match e {
            Value::Number(n) => n.as_f64().map(|x| C64::new(x, 0.0)),
            Value::Array(p) if p.len() == 2 => Some(C64::new(p[0].as_f64()?, p[1].as_f64()?)),
            _ => None,
        })
        .map(|z| z.ok_or_else(|| Error::Parse("entries must be numbers or [re, im] pairs".into())))
        .collect()
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn with_header(command: &str, seed: u64, effort: Option<&str>, body: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "command": command, "seed": seed });
    if let Some(e) = effort {
        doc["effort"] = json!(e);
    }
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

fn effort_of(g: &GlobalArgs) -> EffortName {
    g.effort.unwrap_or(EffortName::Default)
}

fn cmd_irreps(group: &str, g: &GlobalArgs) -> Result<Value> {
    let grp = load_group(group)?;
    let table = irreps_of(&grp, g.seed)?;
    let irreps: Value = serde_json::from_str(&table.to_json())?;
    let ct = character_table(&table);
    Ok(with_header(
        "irreps",
        g.seed,
        None,
        json!({
            "group": grp.label(),
            "order": grp.order(),
            "dims": table.dims(),
            "irreps": irreps,
            "character_table": to_value(&ct)?,
        }),
    ))
}

fn cmd_norm(group: &str, values: Option<&str>, coeffs: Option<&str>, g: &GlobalArgs) -> Result<Value> {
    let grp = load_group(group)?;
    let f = match (values, coeffs) {
        (Some(v), _) => AFunction::new(&grp, parse_values(v)?)?,
        (None, Some(c)) => AFunction::from_cyclic_expansion(&grp, &parse_real_list(c)?)?,
        (None, None) => return Err(Error::Parse("one of --values or --fourier-coeffs is required".into())),
    };
    let table = irreps_of(&grp, g.seed)?;
    let norm = a_norm(&f, &table)?;
    let contributions = a_norm_contributions(&f, &table)?;
    Ok(with_header(
        "norm",
        g.seed,
        None,
        json!({
            "group": grp.label(),
            "dims": table.dims(),
            "norm": norm,
            "contributions": contributions,
        }),
    ))
}

fn cmd_homnorm(source: &str, target: &str, bijection: &str, levels: &str, cb: bool, g: &GlobalArgs) -> Result<Value> {
    let src = load_group(source)?;
    let tgt = load_group(target)?;
    let map: Vec<usize> = parse_list(bijection, "bijection")?;
    let levels: Vec<usize> = parse_list(levels, "level")?;
    let bij = GroupBijection::new(tgt, src, map)?;
    let hom = InducedHom::from_bijection(bij, g.seed)?;
    let effort_name = effort_of(g);
    let effort = effort_name.effort();
    let report = hom_norm_report(&hom, &levels, &effort, g.seed)?;
    let mut body = to_value(&report)?;
    body["is_isomorphism"] = json!(hom.is_group_isomorphism());
    body["is_anti_isomorphism"] = json!(hom.is_anti_isomorphism());
    if cb {
        body["cb_norm"] = to_value(&cb_norm(&hom, &effort, g.seed)?)?;
    }
    Ok(with_header("homnorm", g.seed, Some(effort_name.name()), body))
}

fn cmd_scan(source: &str, target: &str, level: usize, samples: usize, g: &GlobalArgs) -> Result<(Value, Option<String>)> {
    let src = load_group(source)?;
    let tgt = load_group(target)?;
    let effort_name = effort_of(g);
    let opts = SearchOptions { effort: effort_name.effort(), seed: g.seed, sample_size: samples, ..Default::default() };
    let result = if level <= 1 { min_distortion(&src, &tgt, &opts)? } else { norm_gap_scan(&src, &tgt, level, &opts)? };
    let csv = result.to_csv()?;
    let mut body = to_value(&result)?;
    body["level"] = json!(level);
    Ok((with_header("scan", g.seed, Some(effort_name.name()), body), Some(csv)))
}

/// Corpus for the Jordan-defect window: every identity-fixing bijection
/// `Z2×Z2 → Z4`, `Z4 → Z4` and `Z2×Z2 → Z2×Z2`.
fn jordan_corpus(seed: u64) -> Result<Vec<InducedHom>> {
    let z4 = make_cyclic(4)?;
    let v4 = parse_group("Z2xZ2")?;
    let mut out = Vec::new();
    for (a, b) in [(&z4, &v4), (&z4, &z4), (&v4, &v4)] {
        for t in enumerate_bijections(a, b, true, 0, seed)?.bijections {
            out.push(InducedHom::from_bijection(t, seed)?);
        }
    }
    Ok(out)
}

pub const JORDAN_ETAS: [f64; 4] = [0.5, 1.0, 1.4, 2.0];

fn cmd_verify_lemmas(lemma: LemmaChoice, dim: usize, trials: usize, g: &GlobalArgs) -> Result<Value> {
    let want = |l: LemmaChoice| lemma == LemmaChoice::All || lemma == l;
    let mut reports: Vec<LemmaReport> = Vec::new();
    let mut extra = serde_json::Map::new();
    if want(LemmaChoice::Invmult) {
        reports.push(verify_invmult(dim, trials, g.seed)?);
    }
    if want(LemmaChoice::Unitmult) {
        reports.push(verify_unitmult(dim, trials, g.seed)?);
    }
    if want(LemmaChoice::NormGap) {
        for grp in [make_cyclic(6)?, make_symmetric(3)?, make_dihedral(4)?] {
            let table = irreps_of(&grp, g.seed)?;
            reports.push(verify_norm_gap(&table, trials, g.seed)?);
        }
    }
    let effort_name = effort_of(g);
    if want(LemmaChoice::JordanRho) {
        let table = estimate_jordan_rho(&JORDAN_ETAS, &jordan_corpus(g.seed)?, &effort_name.effort(), 64, g.seed)?;
        let mut r = table.to_report();
        r.subject = Some("Z4, Z2xZ2".into());
        reports.push(r);
        extra.insert("jordan_rho".into(), to_value(&table)?);
    }
    let counterexamples = reports.iter().filter(|r| r.counterexample.is_some()).count();
    let mut body = json!({
        "dim": dim,
        "trials": trials,
        "counterexamples": counterexamples,
        "reports": to_value(&reports)?,
    });
    if let Value::Object(b) = &mut body {
        b.extend(extra);
    }
    Ok(with_header("verify-lemmas", g.seed, Some(effort_name.name()), body))
}

fn cmd_reproduce(g: &GlobalArgs) -> Result<(Value, i32)> {
    let effort_name = effort_of(g);
    let report = reproduce(&effort_name.effort(), g.seed)?;
    let code = if report.all_pass { 0 } else { 1 };
    Ok((with_header("reproduce-paper", g.seed, Some(effort_name.name()), to_value(&report)?), code))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar_text).collect();
            out.push(format!("{prefix} = [{}]", items.join(", ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        scalar => out.push(format!("{prefix} = {}", scalar_text(scalar))),
    }
}

/// Human-readable rendering; every number is printed from the JSON value.
pub fn render_text(doc: &Value) -> String {
    let mut lines = Vec::new();
    if doc["command"] == "reproduce-paper" {
        lines.push(format!("{:<30} {:>24} {:>24} {:>10}  result", "row", "expected", "computed", "tolerance"));
        for r in doc["rows"].as_array().into_iter().flatten() {
            lines.push(format!(
                "{:<30} {:>24} {:>24} {:>10}  {}",
                scalar_text(&r["id"]),
                scalar_text(&r["expected"]),
                scalar_text(&r["computed"]),
                scalar_text(&r["tolerance"]),
                if r["pass"] == true { "PASS" } else { "FAIL" }
            ));
        }
        lines.push(String::new());
    }
    flatten("", doc, &mut lines);
    lines.join("\n") + "\n"
}

fn render(doc: &Value, csv: Option<String>, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(doc)? + "\n"),
        Format::Text => Ok(render_text(doc)),
        Format::Csv => csv.ok_or_else(|| Error::Parse("csv output is only available for scan".into())),
    }
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let (doc, csv, exit_code) = match &cli.command {
        Command::Irreps { group } => (cmd_irreps(group, g)?, None, 0),
        Command::Norm { group, values, fourier_coeffs } => {
            (cmd_norm(group, values.as_deref(), fourier_coeffs.as_deref(), g)?, None, 0)
        }
        Command::Homnorm { source, target, bijection, levels, cb } => {
            (cmd_homnorm(source, target, bijection, levels, *cb, g)?, None, 0)
        }
        Command::Scan { source, target, level, samples } => {
            let (doc, csv) = cmd_scan(source, target, *level, *samples, g)?;
            (doc, csv, 0)
        }
        Command::VerifyLemmas { lemma, dim, trials } => {
            let doc = cmd_verify_lemmas(*lemma, *dim, *trials, g)?;
            let code = if doc["counterexamples"] == 0 { 0 } else { 1 };
            (doc, None, code)
        }
        Command::ReproducePaper => {
            let (doc, code) = cmd_reproduce(g)?;
            (doc, None, code)
        }
    };
    let body = render(&doc, csv, g.format)?;
    Ok(Output { body, exit_code })
}

/// Parses `args`, runs, writes the report, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(j) = cli.global.jobs {
        // a second global pool cannot be installed; the first one wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(p) => std::fs::write(p, &out.body).map_err(Error::from),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.body.as_bytes()).map_err(Error::from)
                }
            };
            match written {
                Ok(()) => out.exit_code,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
