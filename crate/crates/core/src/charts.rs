//! Chart atlases for fibered surfaces and surface morphisms.
//!
//! Overlaps are modeled by localizations: each overlap lists the polynomials
//! that become invertible on it, and every transition entry is a fraction
//! whose denominator must be built from those. All identities are checked by
//! clearing denominators, so they are exact polynomial identities.
//!
//! Component indices in violation reports are 1-based (matching `φ¹, φ²`);
//! chart indices are 0-based, as in the atlas input.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraError, MultiPoly, PolyMatrix, VarContext};
use crate::error::{Error, Result};
use crate::invariants::{evaluate_invariants, invariant_system, restriction_polynomials, GroupFamily, GroupTag};
use crate::polarization::{compare_data, pullback_datum, spectral_data, CommutingTuple, EntryMismatch, SpectralDatum};

/// `num / den` with `den ≠ 0`; not reduced.
#[derive(Clone, Debug, PartialEq)]
pub struct Fraction {
    num: MultiPoly,
    den: MultiPoly,
}

impl Fraction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(AlgebraError::DegenerateInput("zero denominator".into()).into());
        }
        let ctx = num.ctx().union(den.ctx());
        Ok(Fraction {
            num: num.embed(&ctx)?,
            den: den.embed(&ctx)?,
        })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.ctx());
        Fraction { num: p, den }
    }

    pub fn zero(ctx: &VarContext) -> Self {
        Fraction::from_poly(MultiPoly::zero(ctx))
    }

    pub fn one(ctx: &VarContext) -> Self {
        Fraction::from_poly(MultiPoly::one(ctx))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn embed(&self, ctx: &VarContext) -> Result<Fraction> {
        Ok(Fraction {
            num: self.num.embed(ctx)?,
            den: self.den.embed(ctx)?,
        })
    }

    pub fn add(&self, o: &Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        Fraction {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn sub(&self, o: &Fraction) -> Fraction {
        self.add(&Fraction {
            num: -&o.num,
            den: o.den.clone(),
        })
    }

    pub fn mul(&self, o: &Fraction) -> Fraction {
        Fraction {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial value when the denominator is a constant.
    pub fn as_poly(&self) -> Option<MultiPoly> {
        let c = self.den.constant_value()?;
        Some(self.num.scale(&num_traits::Inv::inv(c)))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.constant_value().is_some_and(|c| num_traits::One::is_one(&c)) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

pub type FracMatrix = Vec<Vec<Fraction>>;

fn frac_mul(a: &FracMatrix, b: &FracMatrix, ctx: &VarContext) -> FracMatrix {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|k| {
                    let mut acc = Fraction::zero(ctx);
                    for j in 0..inner {
                        acc = acc.add(&a[i][j].mul(&b[j][k]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn frac_identity(n: usize, ctx: &VarContext) -> FracMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Fraction::one(ctx) } else { Fraction::zero(ctx) }).collect())
        .collect()
}

fn poly_to_frac(m: &PolyMatrix) -> FracMatrix {
    m.row_vecs()
        .into_iter()
        .map(|r| r.into_iter().map(Fraction::from_poly).collect())
        .collect()
}

fn frac_det2(m: &FracMatrix) -> Fraction {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtlasMode {
    FiberedSurface,
    SurfaceMorphism,
}

impl AtlasMode {
    pub fn name(&self) -> &'static str {
        match self {
            AtlasMode::FiberedSurface => "fibered-surface",
            AtlasMode::SurfaceMorphism => "surface-morphism",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Overlap {
    pub pair: (usize, usize),
    /// Fibered mode: transition of `f^*Ω¹_C`.
    pub h: Option<Fraction>,
    /// Transition of `Ω¹_X` (fibered) or of the target cotangent bundle (morphism).
    pub g: FracMatrix,
    /// Morphism mode: transition of the source cotangent bundle.
    pub g_prime: Option<FracMatrix>,
    pub denominators: Vec<MultiPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChartPhi {
    /// `(φ¹_α, φ²_α)` of a fibered surface.
    Vector(Vec<Fraction>),
    /// `φ_α` of a surface morphism.
    Matrix(FracMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartAtlas {
    mode: AtlasMode,
    ctx: VarContext,
    charts: Vec<Vec<String>>,
    overlaps: Vec<Overlap>,
    phi: Vec<ChartPhi>,
}

fn union_all<'a, I: IntoIterator<Item = &'a Fraction>>(mut ctx: VarContext, it: I) -> VarContext {
    for f in it {
        ctx = ctx.union(f.num.ctx());
    }
    ctx
}

impl ChartAtlas {
    /// Checks shapes and indices; identities are left to [`validate_atlas`].
    pub fn new(mode: AtlasMode, charts: Vec<Vec<String>>, overlaps: Vec<Overlap>, phi: Vec<ChartPhi>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidAtlas(m));
        if charts.is_empty() {
            return bad("an atlas needs at least one chart".into());
        }
        if phi.len() != charts.len() {
            return bad(format!("{} phi entries for {} charts", phi.len(), charts.len()));
        }
        let is_2x2 = |m: &FracMatrix| m.len() == 2 && m.iter().all(|r| r.len() == 2);
        for (a, p) in phi.iter().enumerate() {
            match (mode, p) {
                (AtlasMode::FiberedSurface, ChartPhi::Vector(v)) if v.len() == 2 => {}
                (AtlasMode::SurfaceMorphism, ChartPhi::Matrix(m)) if is_2x2(m) => {}
                _ => return bad(format!("phi of chart {a} has the wrong shape for {}", mode.name())),
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &overlaps {
            let (a, b) = o.pair;
            if a >= charts.len() || b >= charts.len() || a == b {
                return bad(format!("overlap {:?} does not name two distinct charts", o.pair));
            }
            if !seen.insert(o.pair) {
                return bad(format!("overlap {:?} declared twice", o.pair));
            }
            if !is_2x2(&o.g) {
                return bad(format!("g on overlap {:?} must be 2x2", o.pair));
            }
            match mode {
                AtlasMode::FiberedSurface if o.h.is_none() => {
                    return bad(format!("overlap {:?} needs h in fibered mode", o.pair))
                }
                AtlasMode::SurfaceMorphism => match &o.g_prime {
                    Some(m) if is_2x2(m) => {}
                    _ => return bad(format!("overlap {:?} needs a 2x2 g_prime in morphism mode", o.pair)),
                },
                _ => {}
            }
            if o.denominators.iter().any(|d| d.is_zero()) {
                return bad(format!("overlap {:?} declares a zero denominator", o.pair));
            }
        }
        let mut ctx = VarContext::new(charts.iter().flatten().cloned().collect::<std::collections::BTreeSet<_>>())?;
        for o in &overlaps {
            ctx = union_all(ctx, o.h.iter());
            ctx = union_all(ctx, o.g.iter().flatten());
            if let Some(gp) = &o.g_prime {
                ctx = union_all(ctx, gp.iter().flatten());
            }
            for d in &o.denominators {
                ctx = ctx.union(d.ctx());
            }
        }
        for p in &phi {
            ctx = match p {
                ChartPhi::Vector(v) => union_all(ctx, v.iter()),
                ChartPhi::Matrix(m) => union_all(ctx, m.iter().flatten()),
            };
        }
        // second pass for denominators, which are not visited by union_all
        let mut dens = Vec::new();
        for o in &overlaps {
            dens.extend(o.h.iter().map(|f| f.den.ctx().clone()));
            dens.extend(o.g.iter().flatten().map(|f| f.den.ctx().clone()));
        }
        for d in dens {
            ctx = ctx.union(&d);
        }
        let ef = |f: &Fraction| f.embed(&ctx);
        let em = |m: &FracMatrix| -> Result<FracMatrix> {
            m.iter().map(|r| r.iter().map(ef).collect()).collect()
        };
        let overlaps = overlaps
            .iter()
            .map(|o| {
                Ok(Overlap {
                    pair: o.pair,
                    h: o.h.as_ref().map(ef).transpose()?,
                    g: em(&o.g)?,
                    g_prime: o.g_prime.as_ref().map(em).transpose()?,
                    denominators: o
                        .denominators
                        .iter()
                        .map(|d| d.embed(&ctx))
                        .collect::<std::result::Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let phi = phi
            .iter()
            .map(|p| {
                Ok(match p {
                    ChartPhi::Vector(v) => ChartPhi::Vector(v.iter().map(ef).collect::<Result<_>>()?),
                    ChartPhi::Matrix(m) => ChartPhi::Matrix(em(m)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChartAtlas {
            mode,
            ctx,
            charts,
            overlaps,
            phi,
        })
    }

    pub fn mode(&self) -> AtlasMode {
        self.mode
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn charts(&self) -> &[Vec<String>] {
        &self.charts
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }

    pub fn phi(&self) -> &[ChartPhi] {
        &self.phi
    }

    pub fn overlap(&self, a: usize, b: usize) -> Option<&Overlap> {
        self.overlaps.iter().find(|o| o.pair == (a, b))
    }

    fn phi_vector(&self, a: usize) -> &[Fraction] {
        match &self.phi[a] {
            ChartPhi::Vector(v) => v,
            ChartPhi::Matrix(_) => unreachable!("mode checked at construction"),
        }
    }

    fn phi_matrix(&self, a: usize) -> &FracMatrix {
        match &self.phi[a] {
            ChartPhi::Matrix(m) => m,
            ChartPhi::Vector(_) => unreachable!("mode checked at construction"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `h φ_α = g φ_β` or `g φ_β = φ_α g'`.
    Compatibility,
    /// Transition product over a triple overlap.
    Cocycle,
    /// `t_{αβ} t_{βα} = 1` when both directions are declared.
    Inverse,
    /// `h` or `det g` is not a unit on the overlap.
    NotInvertible,
    /// Higgs fields disagree on an overlap.
    Glue,
}

impl ViolationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ViolationKind::Compatibility => "compatibility",
            ViolationKind::Cocycle => "cocycle",
            ViolationKind::Inverse => "inverse",
            ViolationKind::NotInvertible => "not-invertible",
            ViolationKind::Glue => "glue",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `h`, `g`, `g_prime`, `phi` or `theta`.
    pub object: &'static str,
    pub charts: Vec<usize>,
    /// 1-based entry indices (empty for scalars).
    pub entry: Vec<usize>,
    /// Numerator of `lhs − rhs`.
    pub residual: MultiPoly,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of {} on charts {:?}", self.kind.name(), self.object, self.charts)?;
        if !self.entry.is_empty() {
            write!(f, " at entry {:?}", self.entry)?;
        }
        write!(f, ": residual {}", self.residual)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `p` is a unit after inverting every declared denominator: it divides a
/// power of their product.
fn is_local_unit(p: &MultiPoly, dens: &[MultiPoly]) -> Result<bool> {
    if p.is_zero() {
        return Ok(false);
    }
    let deg = p.total_degree().unwrap_or(0);
    if deg == 0 {
        return Ok(true);
    }
    let mut prod = MultiPoly::one(p.ctx());
    for d in dens {
        prod = &prod * d;
    }
    if prod.is_constant() {
        return Ok(false);
    }
    Ok(prod.pow(deg).div_exact(p)?.is_some())
}

fn check_localized(o: &Overlap, f: &Fraction, what: &str) -> Result<()> {
    if !is_local_unit(&f.den, &o.denominators)? {
        return Err(Error::Localization {
            pair: o.pair,
            detail: format!("denominator {} of {what} is not built from the declared denominators", f.den),
        });
    }
    Ok(())
}

struct Checker<'a> {
    atlas: &'a ChartAtlas,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn scalar(&mut self, kind: ViolationKind, object: &'static str, charts: Vec<usize>, lhs: &Fraction, rhs: &Fraction) {
        let diff = lhs.sub(rhs);
        if !diff.is_zero() {
            self.out.push(Violation {
                kind,
                object,
                charts,
                entry: vec![],
                residual: diff.num,
            });
        }
    }

    fn vector(&mut self, kind: ViolationKind, object: &'static str, charts: Vec<usize>, lhs: &[Fraction], rhs: &[Fraction]) {
        for (i, (l, r)) in lhs.iter().zip(rhs).enumerate() {
            let diff = l.sub(r);
            if !diff.is_zero() {
                self.out.push(Violation {
                    kind,
                    object,
                    charts: charts.clone(),
                    entry: vec![i + 1],
                    residual: diff.num,
                });
            }
        }
    }

    fn matrix(&mut self, kind: ViolationKind, object: &'static str, charts: Vec<usize>, lhs: &FracMatrix, rhs: &FracMatrix) {
        for (i, (lr, rr)) in lhs.iter().zip(rhs).enumerate() {
            for (j, (l, r)) in lr.iter().zip(rr).enumerate() {
                let diff = l.sub(r);
                if !diff.is_zero() {
                    self.out.push(Violation {
                        kind,
                        object,
                        charts: charts.clone(),
                        entry: vec![i + 1, j + 1],
                        residual: diff.num,
                    });
                }
            }
        }
    }

    fn unit(&mut self, o: &Overlap, object: &'static str, f: &Fraction) -> Result<()> {
        if !is_local_unit(&f.num, &o.denominators)? {
            self.out.push(Violation {
                kind: ViolationKind::NotInvertible,
                object,
                charts: vec![o.pair.0, o.pair.1],
                entry: vec![],
                residual: f.num.clone(),
            });
        }
        Ok(())
    }
}

/// Checks every transition identity of the atlas exactly.
pub fn validate_atlas(atlas: &ChartAtlas) -> Result<ValidationReport> {
    let ctx = atlas.ctx().clone();
    for o in atlas.overlaps() {
        for f in o.h.iter() {
            check_localized(o, f, "h")?;
        }
        for f in o.g.iter().flatten() {
            check_localized(o, f, "g")?;
        }
        for f in o.g_prime.iter().flatten().flatten() {
            check_localized(o, f, "g_prime")?;
        }
        for (a, p) in atlas.phi().iter().enumerate() {
            if a != o.pair.0 && a != o.pair.1 {
                continue;
            }
            let entries: Vec<&Fraction> = match p {
                ChartPhi::Vector(v) => v.iter().collect(),
                ChartPhi::Matrix(m) => m.iter().flatten().collect(),
            };
            for f in entries {
                check_localized(o, f, "phi")?;
            }
        }
    }
    let mut ck = Checker { atlas, out: Vec::new() };
    for o in atlas.overlaps() {
        let (a, b) = o.pair;
        let charts = vec![a, b];
        ck.unit(o, "g", &frac_det2(&o.g))?;
        match atlas.mode() {
            AtlasMode::FiberedSurface => {
                let h = o.h.as_ref().expect("checked at construction");
                ck.unit(o, "h", h)?;
                let lhs: Vec<Fraction> = ck.atlas.phi_vector(a).iter().map(|p| h.mul(p)).collect();
                let phib: FracMatrix = ck.atlas.phi_vector(b).iter().map(|p| vec![p.clone()]).collect();
                let rhs: Vec<Fraction> = frac_mul(&o.g, &phib, &ctx).into_iter().map(|mut r| r.remove(0)).collect();
                ck.vector(ViolationKind::Compatibility, "phi", charts.clone(), &lhs, &rhs);
            }
            AtlasMode::SurfaceMorphism => {
                let gp = o.g_prime.as_ref().expect("checked at construction");
                ck.unit(o, "g_prime", &frac_det2(gp))?;
                let lhs = frac_mul(&o.g, ck.atlas.phi_matrix(b), &ctx);
                let rhs = frac_mul(ck.atlas.phi_matrix(a), gp, &ctx);
                ck.matrix(ViolationKind::Compatibility, "phi", charts.clone(), &lhs, &rhs);
            }
        }
        if let Some(back) = atlas.overlap(b, a) {
            if a < b {
                let id = frac_identity(2, &ctx);
                ck.matrix(ViolationKind::Inverse, "g", charts.clone(), &frac_mul(&o.g, &back.g, &ctx), &id);
                if let (Some(h1), Some(h2)) = (&o.h, &back.h) {
                    ck.scalar(ViolationKind::Inverse, "h", charts.clone(), &h1.mul(h2), &Fraction::one(&ctx));
                }
                if let (Some(g1), Some(g2)) = (&o.g_prime, &back.g_prime) {
                    ck.matrix(ViolationKind::Inverse, "g_prime", charts.clone(), &frac_mul(g1, g2, &ctx), &id);
                }
            }
        }
    }
    for ab in atlas.overlaps() {
        for bc in atlas.overlaps() {
            if ab.pair.1 != bc.pair.0 || ab.pair.0 == bc.pair.1 {
                continue;
            }
            let (a, b, c) = (ab.pair.0, ab.pair.1, bc.pair.1);
            let Some(ac) = atlas.overlap(a, c) else { continue };
            let charts = vec![a, b, c];
            ck.matrix(ViolationKind::Cocycle, "g", charts.clone(), &frac_mul(&ab.g, &bc.g, &ctx), &ac.g);
            if let (Some(h1), Some(h2), Some(h3)) = (&ab.h, &bc.h, &ac.h) {
                ck.scalar(ViolationKind::Cocycle, "h", charts.clone(), &h1.mul(h2), h3);
            }
            if let (Some(g1), Some(g2), Some(g3)) = (&ab.g_prime, &bc.g_prime, &ac.g_prime) {
                ck.matrix(ViolationKind::Cocycle, "g_prime", charts.clone(), &frac_mul(g1, g2, &ctx), g3);
            }
        }
    }
    Ok(ValidationReport { violations: ck.out })
}

fn require_valid(atlas: &ChartAtlas) -> Result<()> {
    let report = validate_atlas(atlas)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidAtlas(format!(
            "{} violation(s), first: {v}",
            report.violations.len()
        )));
    }
    Ok(())
}

/// Composite of a morphism atlas `first` (source → middle) with `second`
/// (middle → target): `φ = ψ_α φ_α`, keeping the target transitions of
/// `second` and the source transitions of `first`. Both atlases must share
/// charts and overlaps, and the middle transitions must agree.
pub fn compose_morphism_atlases(first: &ChartAtlas, second: &ChartAtlas) -> Result<ChartAtlas> {
    if first.mode() != AtlasMode::SurfaceMorphism || second.mode() != AtlasMode::SurfaceMorphism {
        return Err(Error::InvalidAtlas("composition needs two surface-morphism atlases".into()));
    }
    if first.charts().len() != second.charts().len() {
        return Err(Error::InvalidAtlas("atlases have different charts".into()));
    }
    let ctx = first.ctx().union(second.ctx());
    let ef = |m: &FracMatrix| -> Result<FracMatrix> {
        m.iter().map(|r| r.iter().map(|f| f.embed(&ctx)).collect()).collect()
    };
    let mut overlaps = Vec::new();
    for o1 in first.overlaps() {
        let o2 = second
            .overlap(o1.pair.0, o1.pair.1)
            .ok_or_else(|| Error::InvalidAtlas(format!("overlap {:?} missing from the second atlas", o1.pair)))?;
        let middle_first = ef(&o1.g)?;
        let middle_second = ef(o2.g_prime.as_ref().expect("morphism mode"))?;
        let agree = middle_first
            .iter()
            .flatten()
            .zip(middle_second.iter().flatten())
            .all(|(x, y)| x.sub(y).is_zero());
        if !agree {
            return Err(Error::InvalidAtlas(format!(
                "middle transitions differ on overlap {:?}",
                o1.pair
            )));
        }
        let mut dens: Vec<MultiPoly> = Vec::new();
        for d in o1.denominators.iter().chain(&o2.denominators) {
            let d = d.embed(&ctx)?;
            if !dens.contains(&d) {
                dens.push(d);
            }
        }
        overlaps.push(Overlap {
            pair: o1.pair,
            h: None,
            g: ef(&o2.g)?,
            g_prime: Some(ef(o1.g_prime.as_ref().expect("morphism mode"))?),
            denominators: dens,
        });
    }
    let phi = (0..first.charts().len())
        .map(|a| {
            let psi = ef(second.phi_matrix(a))?;
            let phi = ef(first.phi_matrix(a))?;
            Ok(ChartPhi::Matrix(frac_mul(&psi, &phi, &ctx)))
        })
        .collect::<Result<Vec<_>>>()?;
    ChartAtlas::new(AtlasMode::SurfaceMorphism, first.charts().to_vec(), overlaps, phi)
}

/// Spectral data of a d = 2 datum pulled back through the chart map of a
/// morphism atlas on chart `a` (polynomial `φ_a` only).
pub fn pullback_datum_on_chart(atlas: &ChartAtlas, a: usize, datum: &SpectralDatum) -> Result<SpectralDatum> {
    if atlas.mode() != AtlasMode::SurfaceMorphism {
        return Err(Error::InvalidAtlas("datum pullback needs a surface-morphism atlas".into()));
    }
    let m = atlas
        .phi
        .get(a)
        .ok_or_else(|| Error::InvalidAtlas(format!("no chart {a}")))?;
    let ChartPhi::Matrix(m) = m else { unreachable!("mode checked") };
    let rows = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|f| f.as_poly().ok_or_else(|| Error::Domain("datum pullback needs polynomial phi".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    pullback_datum(&PolyMatrix::from_rows(rows)?, datum)
}

/// Higgs fields on each chart with the bundle's own transition matrices.
///
/// For `d = 1` the fields take values in `f^*Ω¹_C` and glue by
/// `θ_α G_{αβ} = h_{αβ} G_{αβ} θ_β`; for `d = 2` they take values in `Ω¹_X`
/// and glue by `Θ^i_α G_{αβ} = Σ_j (g_{αβ})^i_j G_{αβ} Θ^j_β`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsChartData {
    pub group: GroupTag,
    pub fields: Vec<Vec<PolyMatrix>>,
    pub bundle_transitions: BTreeMap<(usize, usize), FracMatrix>,
}

impl HiggsChartData {
    pub fn d(&self) -> usize {
        self.fields.first().map_or(0, |f| f.len())
    }
}

/// Glue and integrability failures of `higgs` against `atlas`.
pub fn higgs_violations(atlas: &ChartAtlas, higgs: &HiggsChartData) -> Result<Vec<Violation>> {
    if higgs.fields.len() != atlas.charts().len() {
        return Err(Error::InvalidAtlas(format!(
            "{} Higgs charts for {} atlas charts",
            higgs.fields.len(),
            atlas.charts().len()
        )));
    }
    let d = higgs.d();
    if !(d == 1 || d == 2) || higgs.fields.iter().any(|f| f.len() != d) {
        return Err(Error::InvalidAtlas("every chart needs the same number (1 or 2) of Higgs matrices".into()));
    }
    let mut ctx = atlas.ctx().clone();
    for m in higgs.fields.iter().flatten() {
        ctx = ctx.union(m.ctx());
    }
    for gm in higgs.bundle_transitions.values() {
        ctx = union_all(ctx, gm.iter().flatten());
        for f in gm.iter().flatten() {
            ctx = ctx.union(f.den.ctx());
        }
    }
    let emb = |m: &FracMatrix| -> Result<FracMatrix> {
        m.iter().map(|r| r.iter().map(|f| f.embed(&ctx)).collect()).collect()
    };
    let mut out = Vec::new();
    for (a, fs) in higgs.fields.iter().enumerate() {
        if d == 2 {
            let c = fs[0].embed(&ctx)?.commutator(&fs[1].embed(&ctx)?)?;
            for (k, v) in c.entries().iter().enumerate() {
                if !v.is_zero() {
                    out.push(Violation {
                        kind: ViolationKind::Glue,
                        object: "theta",
                        charts: vec![a],
                        entry: vec![k / c.cols() + 1, k % c.cols() + 1],
                        residual: v.clone(),
                    });
                }
            }
        }
    }
    for o in atlas.overlaps() {
        let (a, b) = o.pair;
        let g_bundle = emb(higgs.bundle_transitions.get(&o.pair).ok_or_else(|| {
            Error::InvalidAtlas(format!("no bundle transition on overlap {:?}", o.pair))
        })?)?;
        let theta = |c: usize, i: usize| -> Result<FracMatrix> { Ok(poly_to_frac(&higgs.fields[c][i].embed(&ctx)?)) };
        let mut ck = Checker { atlas, out: Vec::new() };
        for i in 0..d {
            let lhs = frac_mul(&theta(a, i)?, &g_bundle, &ctx);
            let mut rhs: FracMatrix = lhs.iter().map(|r| r.iter().map(|_| Fraction::zero(&ctx)).collect()).collect();
            for j in 0..d {
                let coef = if d == 1 {
                    o.h.as_ref().ok_or_else(|| Error::InvalidAtlas("d = 1 glue needs h".into()))?.embed(&ctx)?
                } else {
                    o.g[i][j].embed(&ctx)?
                };
                let term = frac_mul(&g_bundle, &theta(b, j)?, &ctx);
                for (rr, tr) in rhs.iter_mut().zip(&term) {
                    for (x, y) in rr.iter_mut().zip(tr) {
                        *x = x.add(&coef.mul(y));
                    }
                }
            }
            let before = ck.out.len();
            ck.matrix(ViolationKind::Glue, "theta", vec![a, b], &lhs, &rhs);
            for v in &mut ck.out[before..] {
                v.entry.insert(0, i + 1);
            }
        }
        out.extend(ck.out);
    }
    Ok(out)
}

/// Pulls a d = 1 Higgs field back along the fibration: chart `α` gets the
/// commuting pair `(φ¹_α θ_α, φ²_α θ_α)`.
pub fn pullback_higgs(atlas: &ChartAtlas, higgs: &HiggsChartData) -> Result<HiggsChartData> {
    if atlas.mode() != AtlasMode::FiberedSurface {
        return Err(Error::InvalidAtlas("pullback needs a fibered-surface atlas".into()));
    }
    require_valid(atlas)?;
    if higgs.d() != 1 {
        return Err(Error::Domain("pullback takes d = 1 Higgs data".into()));
    }
    if let Some(v) = higgs_violations(atlas, higgs)?.first() {
        return Err(Error::InvalidAtlas(format!("input Higgs field does not glue: {v}")));
    }
    let mut fields = Vec::with_capacity(higgs.fields.len());
    for (a, fs) in higgs.fields.iter().enumerate() {
        let phi = atlas.phi_vector(a);
        let mut pair = Vec::with_capacity(2);
        for p in phi {
            let p = p
                .as_poly()
                .ok_or_else(|| Error::Domain(format!("phi on chart {a} must be polynomial to pull back")))?;
            let ctx = fs[0].ctx().union(p.ctx());
            pair.push(fs[0].embed(&ctx)?.scale(&p.embed(&ctx)?)?);
        }
        // integrability is automatic; the constructor asserts it
        let t = CommutingTuple::new(higgs.group, pair)?;
        fields.push(t.matrices().to_vec());
    }
    let out = HiggsChartData {
        group: higgs.group,
        fields,
        bundle_transitions: higgs.bundle_transitions.clone(),
    };
    if let Some(v) = higgs_violations(atlas, &out)?.first() {
        return Err(Error::InvalidAtlas(format!("pulled-back field does not glue: {v}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatReport {
    pub checked: usize,
    pub mismatches: Vec<EntryMismatch>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Entry `(j, (i₁, i₂))` of the spectral data of `(φ¹θ, φ²θ)` must equal
/// `C(e_j, i₁) (φ¹)^{i₁} (φ²)^{i₂} c_j(θ)`.
pub fn pullback_spectral_compat(theta: &PolyMatrix, phi: (&MultiPoly, &MultiPoly), group: GroupTag) -> Result<CompatReport> {
    let ctx = theta.ctx().union(phi.0.ctx()).union(phi.1.ctx());
    let theta = theta.embed(&ctx)?;
    let (p1, p2) = (phi.0.embed(&ctx)?, phi.1.embed(&ctx)?);
    let pair = CommutingTuple::new(group, vec![theta.scale(&p1)?, theta.scale(&p2)?])?;
    let computed = spectral_data(&pair)?;
    let base = evaluate_invariants(group, &theta)?;
    let mut entries = BTreeMap::new();
    for (key, _) in computed.entries() {
        let (j, comp) = key;
        let i = comp.parts();
        let closed = &(&p1.pow(i[0]) * &p2.pow(i[1])) * &base[j - 1];
        entries.insert(key.clone(), closed.scale(&comp.multinomial().into()));
    }
    let expected = SpectralDatum::new(group, 2, &ctx, entries)?;
    Ok(CompatReport {
        checked: expected.entries().len(),
        mismatches: compare_data(&expected, &computed)?,
    })
}

/// Compares the GL_N spectral data of `t` (through the standard
/// representation) with the G-datum pushed through the polarized
/// restriction polynomials.
pub fn change_of_group_compat(t: &CommutingTuple) -> Result<CompatReport> {
    let group = t.group();
    if group.family() == GroupFamily::GL {
        return Err(Error::NoRestriction("change of group needs a classical group".into()));
    }
    let dim = group.dim();
    let gl = GroupTag::new(GroupFamily::GL, dim)?;
    let gl_datum = spectral_data(&CommutingTuple::new(gl, t.matrices().to_vec())?)?;
    let g_datum = spectral_data(t)?;
    let ctx = g_datum.ctx().clone();
    let mut probe = ctx.clone();
    let mut b = Vec::new();
    for i in 1..=t.d() {
        let name = probe.fresh_name(&format!("b{i}"));
        probe = probe.extended(&[name.clone()])?;
        b.push(name);
    }
    let ext = probe;
    let sys = invariant_system(group);
    let mut assignment = BTreeMap::new();
    for (j, sym) in sys.symbols().into_iter().enumerate() {
        assignment.insert(sym, g_datum.generating_polynomial(j + 1, &b)?.embed(&ext)?);
    }
    let fs = restriction_polynomials(group)?;
    let mut entries = BTreeMap::new();
    for (k, f) in fs.iter().enumerate() {
        let pol = f.eval(&assignment, &ext)?;
        let coeffs = pol.coefficients_in(&b)?;
        for comp in crate::polarization::weak_compositions(k as u32 + 1, t.d()) {
            let v = match coeffs.get(comp.parts()) {
                Some(c) => c.embed(&ctx)?,
                None => MultiPoly::zero(&ctx),
            };
            entries.insert((k + 1, comp), v);
        }
    }
    let pushed = SpectralDatum::new(gl, t.d(), &ctx, entries)?;
    Ok(CompatReport {
        checked: pushed.entries().len(),
        mismatches: compare_data(&gl_datum, &pushed)?,
    })
}
