//! Command-line front end: one verb per check, JSON in, report out.
//!
//! Exit status: 0 when the check passes, 1 when a mathematical check fails
//! (the report says which), 2 for unreadable or invalid input, 3 when the
//! Gröbner budget runs out.

use std::fmt::Write as _;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{format_rational, GroebnerBudget};
use crate::charts::{change_of_group_compat, pullback_spectral_compat, validate_atlas, CompatReport};
use crate::companion::{classical_companion, slope_inequalities, verify_spectral_recovery, ChartSection};
use crate::cover::{build_cover_algebra, gm_weight_check, jacobian_smoothness, pairing_gram, SmoothnessVerdict};
use crate::invariants::{GroupFamily, GroupTag};
use crate::json::{
    encode_companion, encode_compat, encode_datum, encode_group, encode_matrix, encode_poly, encode_recovery,
    encode_slope, encode_validation, parse_document, Cursor, Decoder, SchemaError,
};
use crate::polarization::{spectral_data, CommutingTuple};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hitchin-spectra", version, about = "Exact checks for spectral data of Higgs fields")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output_format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// JSON input file, or `-` for standard input.
    #[arg(long, default_value = "-")]
    pub input: String,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Polarized invariants of a commuting tuple: {"group", "matrices", "form"?}.
    SpectralData(InputArgs),
    /// Companion Higgs field of a chart section: {"group", "a", "coord"?}.
    Companion(InputArgs),
    /// Spectral-cover algebra report for a group.
    Cover {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
    },
    /// Pullback closed form along φ: {"group", "theta", "phi"}.
    PullbackCheck(InputArgs),
    /// GL_N datum against the pushed-forward G-datum: {"group", "matrices"}.
    ChangeOfGroup(InputArgs),
    /// Cocycle and compatibility identities of a chart atlas.
    AtlasValidate(InputArgs),
    /// Slope inequalities of the SO_odd kernel line, from flags or {"n", "kappa"}.
    Slope {
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(SchemaError),
    Math(Error),
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

struct Report {
    passed: bool,
    json: Value,
    text: String,
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut s = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut s)
            .map_err(|e| SchemaError { path: "$".into(), message: format!("cannot read standard input: {e}") })?;
    } else {
        s = std::fs::read_to_string(path)
            .map_err(|e| SchemaError { path: "$".into(), message: format!("cannot read {path}: {e}") })?;
    }
    Ok(s)
}

fn load(path: &str, stdin: &mut dyn Read) -> Result<Value, Failure> {
    Ok(parse_document(&read_input(path, stdin)?)?)
}

/// Math errors raised while building the input objects are input errors.
fn at_root<T>(r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        if e.is_resource() {
            Failure::Math(e)
        } else {
            Failure::Input(SchemaError { path: "$".into(), message: e.to_string() })
        }
    })
}

fn compat_text(r: &CompatReport) -> String {
    let mut s = format!("{} entries checked, {} mismatches\n", r.checked, r.mismatches.len());
    for m in &r.mismatches {
        let _ = writeln!(s, "  a_{} {}: expected {} got {}", m.j, m.comp, m.expected, m.actual);
    }
    s
}

fn spectral_data_cmd(doc: &Value) -> Result<Report, Failure> {
    let root = Cursor::root(doc);
    let dec = Decoder::from_document(&root)?;
    let group = dec.group(&root.get("group")?)?;
    let mats = dec.matrices(&root.get("matrices")?)?;
    let form = root.get_opt("form")?.map(|f| dec.form(&f)).transpose()?;
    let t = at_root(CommutingTuple::with_form(group, mats, form))?;
    let datum = spectral_data(&t)?;
    let mut text = format!("{} d={}\n", group, datum.d());
    for (j, comp, v) in datum.ordered_entries() {
        let _ = writeln!(text, "a_{j} {comp} = {v}");
    }
    Ok(Report {
        passed: true,
        json: encode_datum(&datum),
        text,
    })
}

fn companion_cmd(doc: &Value) -> Result<Report, Failure> {
    let root = Cursor::root(doc);
    let dec = Decoder::from_document(&root)?;
    let group = dec.group(&root.get("group")?)?;
    let a = dec.poly_list(&root.get("a")?)?;
    let coord = match root.get_opt("coord")? {
        Some(c) => c.str()?.to_string(),
        None => "t".to_string(),
    };
    let section = at_root(ChartSection::new(group, &coord, a))?;
    let bundle = classical_companion(&section)?;
    let recovery = verify_spectral_recovery(&bundle, &section)?;
    let passed = bundle.checks.passed() && recovery.passed();
    let mut text = format!("{group} companion, {}x{}\n", bundle.theta.rows(), bundle.theta.cols());
    for r in bundle.theta.row_vecs() {
        let row: Vec<String> = r.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(text, "  [{}]", row.join(", "));
    }
    let weights: Vec<String> = bundle.summand_weights.iter().map(format_rational).collect();
    let _ = writeln!(text, "summand weights: {}", weights.join(", "));
    let _ = writeln!(text, "checks: {}", if bundle.checks.passed() { "pass" } else { "FAIL" });
    let _ = writeln!(text, "recovery: {}", if recovery.passed() { "pass" } else { "FAIL" });
    for m in &recovery.mismatches {
        let _ = writeln!(text, "  {}: expected {} got {}", m.name, m.expected, m.actual);
    }
    Ok(Report {
        passed,
        json: json!({"bundle": encode_companion(&bundle), "recovery": encode_recovery(&recovery), "passed": passed}),
        text,
    })
}

fn cover_cmd(group: &str, n: usize) -> Result<Report, Failure> {
    let bad = |path: &str, e: Error| Failure::Input(SchemaError { path: path.into(), message: e.to_string() });
    let family: GroupFamily = group.parse().map_err(|e| bad("--group", e))?;
    let group = GroupTag::new(family, n).map_err(|e| bad("--n", e))?;
    let alg = build_cover_algebra(group, None)?;
    let verdict = jacobian_smoothness(&alg, GroebnerBudget::from_env())?;
    let (pairing, gm_weight) = match pairing_gram(&alg) {
        Ok(p) => (Some(p), Some(gm_weight_check(&alg)?)),
        Err(_) => (None, None),
    };
    let witness = match &verdict {
        SmoothnessVerdict::Singular(Some(w)) => Some(
            w.iter()
                .map(|(k, v)| (k.clone(), Value::String(format_rational(v))))
                .collect::<serde_json::Map<_, _>>(),
        ),
        _ => None,
    };
    let mut text = format!("{group}: rank {}\n", alg.module_rank());
    for r in alg.relations() {
        let _ = writeln!(text, "  relation {r}");
    }
    let _ = writeln!(text, "smooth: {}", verdict.is_smooth());
    if let Some(w) = &witness {
        let pts: Vec<String> = w.iter().map(|(k, v)| format!("{k}={}", v.as_str().unwrap_or(""))).collect();
        let _ = writeln!(text, "singular point: {}", pts.join(", "));
    }
    if let (Some(p), Some(w)) = (&pairing, gm_weight) {
        let _ = writeln!(text, "pairing: {}, weight {w}", p.kind.name());
    }
    Ok(Report {
        passed: true,
        json: json!({
            "group": encode_group(group),
            "rank": alg.module_rank(),
            "relations": alg.relations().iter().map(encode_poly).collect::<Vec<_>>(),
            "smooth": verdict.is_smooth(),
            "witness": witness,
            "pairing": pairing.as_ref().map(|p| json!({"kind": p.kind.name(), "gram": encode_matrix(&p.gram)})),
            "gm_weight": gm_weight,
        }),
        text,
    })
}

fn pullback_cmd(doc: &Value) -> Result<Report, Failure> {
    let root = Cursor::root(doc);
    let dec = Decoder::from_document(&root)?;
    let group = dec.group(&root.get("group")?)?;
    let theta = dec.matrix(&root.get("theta")?)?;
    let phi_node = root.get("phi")?;
    let phi = dec.poly_list(&phi_node)?;
    if phi.len() != 2 {
        return Err(phi_node.fail::<()>("phi needs two entries").unwrap_err().into());
    }
    let r = at_root(pullback_spectral_compat(&theta, (&phi[0], &phi[1]), group))?;
    Ok(Report {
        passed: r.passed(),
        json: encode_compat(&r),
        text: compat_text(&r),
    })
}

fn change_of_group_cmd(doc: &Value) -> Result<Report, Failure> {
    let root = Cursor::root(doc);
    let dec = Decoder::from_document(&root)?;
    let group = dec.group(&root.get("group")?)?;
    let mats = dec.matrices(&root.get("matrices")?)?;
    let t = at_root(CommutingTuple::new(group, mats))?;
    let r = at_root(change_of_group_compat(&t))?;
    Ok(Report {
        passed: r.passed(),
        json: encode_compat(&r),
        text: compat_text(&r),
    })
}

fn atlas_cmd(doc: &Value) -> Result<Report, Failure> {
    let root = Cursor::root(doc);
    let dec = Decoder::from_document(&root)?;
    let atlas = dec.atlas(&root)?;
    let r = at_root(validate_atlas(&atlas))?;
    let mut text = format!("{} atlas: {}\n", atlas.mode().name(), if r.is_valid() { "valid" } else { "INVALID" });
    for v in &r.violations {
        let _ = writeln!(text, "  {v}");
    }
    Ok(Report {
        passed: r.is_valid(),
        json: encode_validation(&r),
        text,
    })
}

fn slope_cmd(input: Option<&str>, n: Option<u32>, kappa: Option<&str>, stdin: &mut dyn Read) -> Result<Report, Failure> {
    let dec = Decoder::default();
    let (n, kappa) = match (input, n, kappa) {
        (Some(path), None, None) => {
            let doc = load(path, stdin)?;
            let root = Cursor::root(&doc);
            let n_node = root.get("n")?;
            let n = u32::try_from(n_node.uint()?).or_else(|_| n_node.fail("n is too large"))?;
            (n, dec.rational(&root.get("kappa")?)?)
        }
        (None, Some(n), Some(k)) => {
            let v = Value::String(k.to_string());
            let c = Cursor { value: &v, path: "--kappa".into() };
            (n, dec.rational(&c)?)
        }
        _ => {
            return Err(Failure::Input(SchemaError {
                path: "$".into(),
                message: "slope takes either --input or both --n and --kappa".into(),
            }))
        }
    };
    let r = at_root(slope_inequalities(n, &kappa))?;
    let text = format!(
        "n={} kappa={}: mu={} <= 0: {}, mu <= {}: {}\n",
        r.n,
        format_rational(&r.kappa),
        format_rational(&r.mu),
        r.nonpositive,
        format_rational(&r.second_bound),
        r.below_second_bound
    );
    Ok(Report {
        passed: r.passed(),
        json: encode_slope(&r),
        text,
    })
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

/// Runs one command; `stdin` backs `--input -`.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let result = match &cli.verb {
        Verb::SpectralData(a) => load(&a.input, stdin).and_then(|d| spectral_data_cmd(&d)),
        Verb::Companion(a) => load(&a.input, stdin).and_then(|d| companion_cmd(&d)),
        Verb::Cover { group, n } => cover_cmd(group, *n),
        Verb::PullbackCheck(a) => load(&a.input, stdin).and_then(|d| pullback_cmd(&d)),
        Verb::ChangeOfGroup(a) => load(&a.input, stdin).and_then(|d| change_of_group_cmd(&d)),
        Verb::AtlasValidate(a) => load(&a.input, stdin).and_then(|d| atlas_cmd(&d)),
        Verb::Slope { input, n, kappa } => slope_cmd(input.as_deref(), *n, kappa.as_deref(), stdin),
    };
    let text_mode = cli.output_format == OutputFormat::Text;
    match result {
        Ok(r) => Outcome {
            code: if r.passed { EXIT_OK } else { EXIT_CHECK_FAILED },
            stdout: if text_mode { r.text } else { render(&r.json) },
            stderr: String::new(),
        },
        Err(f) => {
            let (code, kind, path, message) = match f {
                Failure::Input(e) => (EXIT_INPUT, "input", e.path, e.message),
                Failure::Math(e) if e.is_resource() => (EXIT_RESOURCE, "resource", "$".to_string(), e.to_string()),
                Failure::Math(e) => (EXIT_INPUT, "input", "$".to_string(), e.to_string()),
            };
            let stdout = if text_mode {
                String::new()
            } else {
                render(&json!({"error": {"kind": kind, "path": path, "message": message}}))
            };
            Outcome {
                code,
                stdout,
                stderr: format!("error ({kind}) at {path}: {message}\n"),
            }
        }
    }
}

/// Parses `args` (program name first) and runs; clap usage errors exit 2.
pub fn run_args<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code, stdout: rendered, stderr: String::new() }
            }
        }
    }
}
