//! JSON encodings of the exchange types.
//!
//! Rationals are strings `"p/q"` (`"p"` when integral). A polynomial is
//! either `{"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}]}` or an
//! expression string such as `"2*t^2 - a_1"`; strings are parsed over the
//! document's top-level `"vars"` plus whatever identifiers they mention.
//! Decoding errors carry the JSON path of the offending value.
//!
//! Encoding goes through `serde_json::Value`, whose maps are sorted, and
//! polynomial terms follow the canonical exponent order, so output is
//! byte-deterministic.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::algebra::{format_rational, parse_rational, MultiPoly, PolyMatrix, Rational, VarContext};
use crate::charts::{
    AtlasMode, ChartAtlas, ChartPhi, CompatReport, FracMatrix, Fraction, Overlap, ValidationReport, Violation,
};
use crate::companion::{CompanionBundle, RecoveryReport, SlopeReport};
use crate::invariants::{BilinearFormSpec, FormKind, GroupFamily, GroupTag};
use crate::polarization::{EntryMismatch, SpectralDatum, WeakComposition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

pub type SchemaResult<T> = std::result::Result<T, SchemaError>;

fn err<T>(path: &str, message: impl Into<String>) -> SchemaResult<T> {
    Err(SchemaError {
        path: path.to_string(),
        message: message.into(),
    })
}

/// A borrowed JSON value and its path from the document root.
#[derive(Clone)]
pub struct Cursor<'a> {
    pub value: &'a Value,
    pub path: String,
}

impl<'a> Cursor<'a> {
    pub fn root(value: &'a Value) -> Self {
        Cursor {
            value,
            path: "$".into(),
        }
    }

    pub fn fail<T>(&self, message: impl Into<String>) -> SchemaResult<T> {
        err(&self.path, message)
    }

    pub fn object(&self) -> SchemaResult<&'a Map<String, Value>> {
        self.value.as_object().map_or_else(|| self.fail("expected an object"), Ok)
    }

    pub fn get(&self, key: &str) -> SchemaResult<Cursor<'a>> {
        match self.object()?.get(key) {
            Some(v) => Ok(Cursor {
                value: v,
                path: format!("{}.{key}", self.path),
            }),
            None => self.fail(format!("missing field {key:?}")),
        }
    }

    pub fn get_opt(&self, key: &str) -> SchemaResult<Option<Cursor<'a>>> {
        Ok(self.object()?.get(key).filter(|v| !v.is_null()).map(|v| Cursor {
            value: v,
            path: format!("{}.{key}", self.path),
        }))
    }

    pub fn items(&self) -> SchemaResult<Vec<Cursor<'a>>> {
        let arr = self.value.as_array().map_or_else(|| self.fail("expected an array"), Ok)?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, v)| Cursor {
                value: v,
                path: format!("{}[{i}]", self.path),
            })
            .collect())
    }

    pub fn str(&self) -> SchemaResult<&'a str> {
        self.value.as_str().map_or_else(|| self.fail("expected a string"), Ok)
    }

    pub fn uint(&self) -> SchemaResult<u64> {
        self.value
            .as_u64()
            .map_or_else(|| self.fail("expected a non-negative integer"), Ok)
    }
}

/// Variable names declared at the top level of a document.
#[derive(Clone, Debug, Default)]
pub struct Decoder {
    declared: Vec<String>,
}

fn identifiers(src: &str) -> Vec<String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            i += 1;
        }
    }
    out
}

/// Embeds every polynomial into the union of their contexts.
pub fn unify(polys: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let ctx = polys
        .iter()
        .fold(VarContext::empty(), |acc, p| acc.union(p.ctx()));
    polys
        .into_iter()
        .map(|p| p.embed(&ctx).expect("union contains every context"))
        .collect()
}

impl Decoder {
    /// Reads the optional top-level `"vars"` of `doc`.
    pub fn from_document(doc: &Cursor<'_>) -> SchemaResult<Self> {
        let mut declared = Vec::new();
        if doc.value.is_object() {
            if let Some(vars) = doc.get_opt("vars")? {
                for v in vars.items()? {
                    let name = v.str()?.to_string();
                    if declared.contains(&name) {
                        return v.fail(format!("variable {name:?} declared twice"));
                    }
                    declared.push(name);
                }
            }
        }
        Ok(Decoder { declared })
    }

    pub fn rational(&self, c: &Cursor<'_>) -> SchemaResult<Rational> {
        match c.value {
            Value::String(s) => parse_rational(s).or_else(|e| c.fail(e.to_string())),
            Value::Number(n) => match n.as_i64() {
                Some(k) => Ok(Rational::from_integer(k.into())),
                None => c.fail("numbers must be integers; write fractions as \"p/q\""),
            },
            _ => c.fail("expected a rational (\"p/q\" string or integer)"),
        }
    }

    pub fn poly(&self, c: &Cursor<'_>) -> SchemaResult<MultiPoly> {
        match c.value {
            Value::String(s) => {
                let mut names = self.declared.clone();
                for id in identifiers(s) {
                    if !names.contains(&id) {
                        names.push(id);
                    }
                }
                let ctx = VarContext::new(names).or_else(|e| c.fail(e.to_string()))?;
                MultiPoly::parse(&ctx, s).or_else(|e| c.fail(e.to_string()))
            }
            Value::Number(_) => Ok(MultiPoly::constant(&VarContext::empty(), self.rational(c)?)),
            Value::Object(_) => {
                let vars: Vec<String> = c
                    .get("vars")?
                    .items()?
                    .iter()
                    .map(|v| v.str().map(String::from))
                    .collect::<SchemaResult<_>>()?;
                let ctx = VarContext::new(vars).or_else(|e| c.fail(e.to_string()))?;
                let mut terms = Vec::new();
                for t in c.get("terms")?.items()? {
                    let exp_node = t.get("exp")?;
                    let exp = exp_node
                        .items()?
                        .iter()
                        .map(|e| e.uint().and_then(|k| u32::try_from(k).or_else(|_| e.fail("exponent too large"))))
                        .collect::<SchemaResult<Vec<u32>>>()?;
                    if exp.len() != ctx.len() {
                        return exp_node.fail(format!("expected {} exponents", ctx.len()));
                    }
                    terms.push((exp, self.rational(&t.get("coef")?)?));
                }
                MultiPoly::from_terms(&ctx, terms).or_else(|e| c.fail(e.to_string()))
            }
            _ => c.fail("expected a polynomial (string, integer or {\"vars\",\"terms\"} object)"),
        }
    }

    pub fn poly_list(&self, c: &Cursor<'_>) -> SchemaResult<Vec<MultiPoly>> {
        let ps = c.items()?.iter().map(|p| self.poly(p)).collect::<SchemaResult<Vec<_>>>()?;
        Ok(unify(ps))
    }

    pub fn matrix(&self, c: &Cursor<'_>) -> SchemaResult<PolyMatrix> {
        let rows = c.items()?;
        if rows.is_empty() {
            return c.fail("matrix needs at least one row");
        }
        let mut flat = Vec::new();
        let mut width = None;
        for r in &rows {
            let entries = r.items()?;
            if *width.get_or_insert(entries.len()) != entries.len() {
                return r.fail("rows have different lengths");
            }
            for e in &entries {
                flat.push(self.poly(e)?);
            }
        }
        let width = width.unwrap_or(0);
        if width == 0 {
            return c.fail("matrix rows are empty");
        }
        let flat = unify(flat);
        let ctx = flat.first().map(|p| p.ctx().clone()).unwrap_or_else(VarContext::empty);
        PolyMatrix::new(rows.len(), width, &ctx, flat).or_else(|e| c.fail(e.to_string()))
    }

    pub fn group(&self, c: &Cursor<'_>) -> SchemaResult<GroupTag> {
        let fam_node = c.get("family")?;
        let family: GroupFamily = fam_node.str()?.parse().or_else(|e: crate::Error| fam_node.fail(e.to_string()))?;
        let n_node = c.get("n")?;
        let n = usize::try_from(n_node.uint()?).or_else(|_| n_node.fail("n is too large"))?;
        GroupTag::new(family, n).or_else(|e| n_node.fail(e.to_string()))
    }

    pub fn form(&self, c: &Cursor<'_>) -> SchemaResult<BilinearFormSpec> {
        let kind_node = c.get("kind")?;
        let kind = match kind_node.str()? {
            "symmetric" => FormKind::Symmetric,
            "alternating" => FormKind::Alternating,
            other => return kind_node.fail(format!("unknown form kind {other:?}")),
        };
        let gram = self.matrix(&c.get("gram")?)?;
        let orientation = c.get_opt("orientation")?.map(|o| self.rational(&o)).transpose()?;
        BilinearFormSpec::new(kind, gram, orientation).or_else(|e| c.fail(e.to_string()))
    }

    pub fn matrices(&self, c: &Cursor<'_>) -> SchemaResult<Vec<PolyMatrix>> {
        let ms = c.items()?.iter().map(|m| self.matrix(m)).collect::<SchemaResult<Vec<_>>>()?;
        let ctx = ms.iter().fold(VarContext::empty(), |acc, m| acc.union(m.ctx()));
        ms.iter()
            .map(|m| m.embed(&ctx).or_else(|e| c.fail(e.to_string())))
            .collect()
    }

    pub fn fraction(&self, c: &Cursor<'_>) -> SchemaResult<Fraction> {
        if let Value::Object(o) = c.value {
            if o.contains_key("num") {
                let num = self.poly(&c.get("num")?)?;
                let den = match c.get_opt("den")? {
                    Some(d) => self.poly(&d)?,
                    None => MultiPoly::one(&VarContext::empty()),
                };
                return Fraction::new(num, den).or_else(|e| c.fail(e.to_string()));
            }
        }
        Ok(Fraction::from_poly(self.poly(c)?))
    }

    fn frac_matrix(&self, c: &Cursor<'_>) -> SchemaResult<FracMatrix> {
        c.items()?
            .iter()
            .map(|r| r.items()?.iter().map(|e| self.fraction(e)).collect())
            .collect()
    }

    pub fn atlas(&self, c: &Cursor<'_>) -> SchemaResult<ChartAtlas> {
        let mode_node = c.get("mode")?;
        let mode = match mode_node.str()? {
            "fibered-surface" => AtlasMode::FiberedSurface,
            "surface-morphism" => AtlasMode::SurfaceMorphism,
            other => return mode_node.fail(format!("unknown mode {other:?}")),
        };
        let mut charts = Vec::new();
        for ch in c.get("charts")?.items()? {
            let coords = if let Some(one) = ch.get_opt("coord")? {
                vec![one.str()?.to_string()]
            } else {
                ch.get("coords")?
                    .items()?
                    .iter()
                    .map(|x| x.str().map(String::from))
                    .collect::<SchemaResult<_>>()?
            };
            charts.push(coords);
        }
        let mut overlaps = Vec::new();
        if let Some(ovs) = c.get_opt("overlaps")? {
            for o in ovs.items()? {
                let pair_node = o.get("pair")?;
                let pair = pair_node.items()?;
                if pair.len() != 2 {
                    return pair_node.fail("pair needs two chart indices");
                }
                let idx = |p: &Cursor<'_>| p.uint().and_then(|k| usize::try_from(k).or_else(|_| p.fail("index too large")));
                let denominators = match o.get_opt("denominators")? {
                    Some(d) => d.items()?.iter().map(|p| self.poly(p)).collect::<SchemaResult<_>>()?,
                    None => Vec::new(),
                };
                overlaps.push(Overlap {
                    pair: (idx(&pair[0])?, idx(&pair[1])?),
                    h: o.get_opt("h")?.map(|h| self.fraction(&h)).transpose()?,
                    g: self.frac_matrix(&o.get("g")?)?,
                    g_prime: o.get_opt("g_prime")?.map(|g| self.frac_matrix(&g)).transpose()?,
                    denominators,
                });
            }
        }
        let mut phi = Vec::new();
        for p in c.get("phi")?.items()? {
            phi.push(match mode {
                AtlasMode::FiberedSurface => {
                    ChartPhi::Vector(p.items()?.iter().map(|e| self.fraction(e)).collect::<SchemaResult<_>>()?)
                }
                AtlasMode::SurfaceMorphism => ChartPhi::Matrix(self.frac_matrix(&p)?),
            });
        }
        ChartAtlas::new(mode, charts, overlaps, phi).or_else(|e| c.fail(e.to_string()))
    }

    pub fn datum(&self, c: &Cursor<'_>) -> SchemaResult<SpectralDatum> {
        let group = self.group(&c.get("group")?)?;
        let d_node = c.get("d")?;
        let d = usize::try_from(d_node.uint()?).or_else(|_| d_node.fail("d is too large"))?;
        let mut keys = Vec::new();
        let mut values = Vec::new();
        for e in c.get("entries")?.items()? {
            let j_node = e.get("j")?;
            let j = usize::try_from(j_node.uint()?).or_else(|_| j_node.fail("j is too large"))?;
            let comp_node = e.get("comp")?;
            let parts = comp_node
                .items()?
                .iter()
                .map(|x| x.uint().and_then(|k| u32::try_from(k).or_else(|_| x.fail("part too large"))))
                .collect::<SchemaResult<Vec<u32>>>()?;
            let comp = WeakComposition::new(parts).or_else(|er| comp_node.fail(er.to_string()))?;
            keys.push((j, comp));
            values.push(self.poly(&e.get("value")?)?);
        }
        let values = unify(values);
        let ctx = values.first().map(|p| p.ctx().clone()).unwrap_or_else(VarContext::empty);
        SpectralDatum::new(group, d, &ctx, keys.into_iter().zip(values).collect()).or_else(|e| c.fail(e.to_string()))
    }
}

/// Parses a JSON document, reporting syntax errors at the root path.
pub fn parse_document(src: &str) -> SchemaResult<Value> {
    serde_json::from_str(src).or_else(|e| err("$", format!("malformed JSON: {e}")))
}

pub fn encode_rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn encode_poly(p: &MultiPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| json!({"exp": e, "coef": format_rational(c)}))
        .collect();
    json!({"vars": p.ctx().names(), "terms": terms})
}

pub fn encode_matrix(m: &PolyMatrix) -> Value {
    Value::Array(
        m.row_vecs()
            .iter()
            .map(|r| Value::Array(r.iter().map(encode_poly).collect()))
            .collect(),
    )
}

pub fn encode_group(g: GroupTag) -> Value {
    json!({"family": g.family().name(), "n": g.n()})
}

pub fn encode_datum(d: &SpectralDatum) -> Value {
    let entries: Vec<Value> = d
        .ordered_entries()
        .into_iter()
        .map(|(j, comp, v)| json!({"j": j, "comp": comp.parts(), "value": encode_poly(v)}))
        .collect();
    json!({"group": encode_group(d.group()), "d": d.d(), "entries": entries})
}

pub fn encode_fraction(f: &Fraction) -> Value {
    json!({"num": encode_poly(f.num()), "den": encode_poly(f.den())})
}

pub fn encode_violation(v: &Violation) -> Value {
    json!({
        "kind": v.kind.name(),
        "object": v.object,
        "charts": v.charts,
        "entry": v.entry,
        "residual": encode_poly(&v.residual),
    })
}

pub fn encode_validation(r: &ValidationReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "violations": r.violations.iter().map(encode_violation).collect::<Vec<_>>(),
    })
}

pub fn encode_mismatch(m: &EntryMismatch) -> Value {
    json!({
        "j": m.j,
        "comp": m.comp.parts(),
        "expected": encode_poly(&m.expected),
        "actual": encode_poly(&m.actual),
    })
}

pub fn encode_compat(r: &CompatReport) -> Value {
    json!({
        "passed": r.passed(),
        "checked": r.checked,
        "mismatches": r.mismatches.iter().map(encode_mismatch).collect::<Vec<_>>(),
    })
}

pub fn encode_slope(r: &SlopeReport) -> Value {
    json!({
        "n": r.n,
        "kappa": encode_rational(&r.kappa),
        "mu": encode_rational(&r.mu),
        "second_bound": encode_rational(&r.second_bound),
        "nonpositive": r.nonpositive,
        "below_second_bound": r.below_second_bound,
        "passed": r.passed(),
    })
}

pub fn encode_recovery(r: &RecoveryReport) -> Value {
    json!({
        "passed": r.passed(),
        "mismatches": r.mismatches.iter().map(|m| json!({
            "name": m.name,
            "expected": encode_poly(&m.expected),
            "actual": encode_poly(&m.actual),
        })).collect::<Vec<_>>(),
    })
}

pub fn encode_companion(b: &CompanionBundle) -> Value {
    let c = &b.checks;
    json!({
        "group": encode_group(b.group),
        "theta": encode_matrix(&b.theta),
        "summand_weights": b.summand_weights.iter().map(encode_rational).collect::<Vec<_>>(),
        "det_weight": encode_rational(&b.det_weight),
        "pairing": b.pairing.as_ref().map(|p| json!({"kind": p.kind.name(), "gram": encode_matrix(&p.gram)})),
        "kernel_vector": b.kernel_vector.as_ref().map(|v| v.iter().map(encode_poly).collect::<Vec<_>>()),
        "kernel_weight": b.kernel_weight.as_ref().map(encode_rational),
        "checks": {
            "det_weight_zero": c.det_weight_zero,
            "trace_vanishes": c.trace_vanishes,
            "anti_self_adjoint": c.anti_self_adjoint,
            "weights_consistent": c.weights_consistent,
            "kernel_line": c.kernel_line,
            "passed": c.passed(),
        },
    })
}
