//! Polarized invariants of commuting tuples.
//!
//! For `θ = (θ¹, …, θᵈ)` and an invariant `c_j` of degree `e_j`, expanding
//! `c_j(b_1θ¹ + … + b_dθᵈ)` in auxiliary symbols `b` gives one coefficient per
//! weak composition of `e_j` of length `d`. The collection of these values is
//! a [`SpectralDatum`].

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraError, MultiPoly, PolyMatrix, QMatrix, VarContext};
use crate::error::{Error, Result};
use crate::invariants::{evaluate_invariants_with, invariant_system, lie_membership_with, BilinearFormSpec, GroupTag};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakComposition(Vec<u32>);

impl WeakComposition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("weak composition needs at least one part".into()));
        }
        Ok(WeakComposition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Multinomial coefficient `e! / (i_1! ⋯ i_d!)`.
    pub fn multinomial(&self) -> num_bigint::BigInt {
        let mut acc = num_bigint::BigInt::from(1);
        let mut running = 0;
        for &p in &self.0 {
            running += p;
            acc *= crate::algebra::rational::binomial(running, p);
        }
        acc
    }
}

impl fmt::Display for WeakComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All weak compositions of `e` with `d` parts, in descending lexicographic order.
pub fn weak_compositions(e: u32, d: usize) -> Vec<WeakComposition> {
    fn rec(e: u32, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<WeakComposition>) {
        if d == 1 {
            prefix.push(e);
            out.push(WeakComposition(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=e).rev() {
            prefix.push(first);
            rec(e - first, d - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    rec(e, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Pairwise commuting elements of the Lie algebra of `group`, all over one
/// variable context.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingTuple {
    group: GroupTag,
    matrices: Vec<PolyMatrix>,
    form: Option<BilinearFormSpec>,
}

impl CommutingTuple {
    pub fn new(group: GroupTag, matrices: Vec<PolyMatrix>) -> Result<Self> {
        Self::with_form(group, matrices, None)
    }

    /// Like [`CommutingTuple::new`] but checks membership (and later the
    /// Pfaffian) against `form` instead of the standard form.
    pub fn with_form(group: GroupTag, matrices: Vec<PolyMatrix>, form: Option<BilinearFormSpec>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Domain("a tuple needs at least one matrix".into()));
        }
        let mut ctx = VarContext::empty();
        for m in &matrices {
            ctx = ctx.union(m.ctx());
        }
        let matrices = matrices.iter().map(|m| m.embed(&ctx)).collect::<std::result::Result<Vec<_>, _>>()?;
        for m in &matrices {
            let report = lie_membership_with(group, m, form.as_ref())?;
            if !report.is_member() {
                return Err(Error::NotInLieAlgebra(Box::new(report)));
            }
        }
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                if !matrices[i].commutator(&matrices[j])?.is_zero() {
                    return Err(Error::NotCommuting { i, j });
                }
            }
        }
        Ok(CommutingTuple { group, matrices, form })
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[PolyMatrix] {
        &self.matrices
    }

    pub fn form(&self) -> Option<&BilinearFormSpec> {
        self.form.as_ref()
    }

    pub fn ctx(&self) -> &VarContext {
        self.matrices[0].ctx()
    }

    /// Componentwise `g θ g⁻¹`.
    pub fn conjugate(&self, g: &QMatrix) -> Result<CommutingTuple> {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::InvalidAction("conjugating matrix is singular".into()))?;
        let gp = g.to_poly(self.ctx());
        let ip = inv.to_poly(self.ctx());
        let ms = self
            .matrices
            .iter()
            .map(|m| gp.checked_mul(m)?.checked_mul(&ip))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CommutingTuple::with_form(self.group, ms, self.form.clone())
    }
}

/// Values of all polarized invariants, keyed by generator index `j` (from 1)
/// and weak composition.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDatum {
    group: GroupTag,
    d: usize,
    ctx: VarContext,
    entries: BTreeMap<(usize, WeakComposition), MultiPoly>,
}

impl SpectralDatum {
    /// Checks that the key set is exactly every `(j, i)` with `i` a weak
    /// composition of `e_j` of length `d`.
    pub fn new(
        group: GroupTag,
        d: usize,
        ctx: &VarContext,
        entries: BTreeMap<(usize, WeakComposition), MultiPoly>,
    ) -> Result<Self> {
        let expected = Self::expected_keys(group, d);
        if expected.len() != entries.len() || expected.iter().any(|k| !entries.contains_key(k)) {
            let missing: Vec<String> = expected
                .iter()
                .filter(|k| !entries.contains_key(*k))
                .map(|(j, c)| format!("({j},{c})"))
                .collect();
            let extra: Vec<String> = entries
                .keys()
                .filter(|k| !expected.contains(k))
                .map(|(j, c)| format!("({j},{c})"))
                .collect();
            return Err(Error::Domain(format!(
                "spectral datum keys do not match {group} with d={d}: missing [{}], unexpected [{}]",
                missing.join(" "),
                extra.join(" ")
            )));
        }
        let entries = entries
            .into_iter()
            .map(|(k, v)| Ok((k, v.embed(ctx)?)))
            .collect::<std::result::Result<_, AlgebraError>>()?;
        Ok(SpectralDatum {
            group,
            d,
            ctx: ctx.clone(),
            entries,
        })
    }

    pub fn expected_keys(group: GroupTag, d: usize) -> Vec<(usize, WeakComposition)> {
        let sys = invariant_system(group);
        let mut keys = Vec::new();
        for (j, g) in sys.generators.iter().enumerate() {
            for c in weak_compositions(g.degree, d) {
                keys.push((j + 1, c));
            }
        }
        keys
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn entries(&self) -> &BTreeMap<(usize, WeakComposition), MultiPoly> {
        &self.entries
    }

    pub fn get(&self, j: usize, comp: &[u32]) -> Option<&MultiPoly> {
        self.entries.get(&(j, WeakComposition(comp.to_vec())))
    }

    /// Entries in generator order, then descending composition order.
    pub fn ordered_entries(&self) -> Vec<(usize, &WeakComposition, &MultiPoly)> {
        let mut v: Vec<_> = self.entries.iter().map(|((j, c), p)| (*j, c, p)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)));
        v
    }

    /// `Σ_i entry(j, i) · bⁱ` in `ctx ∪ b`.
    pub fn generating_polynomial(&self, j: usize, b: &[String]) -> Result<MultiPoly> {
        if b.len() != self.d {
            return Err(AlgebraError::Shape(format!("{} symbols for d={}", b.len(), self.d)).into());
        }
        let ctx = self.ctx.extended(b)?;
        let mut acc = MultiPoly::zero(&ctx);
        for ((jj, comp), v) in &self.entries {
            if *jj != j {
                continue;
            }
            let mut term = v.embed(&ctx)?;
            for (name, &p) in b.iter().zip(comp.parts()) {
                term = &term * &MultiPoly::var(&ctx, name)?.pow(p);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn fresh_symbols(ctx: &VarContext, d: usize) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(d);
    let mut probe = ctx.clone();
    for i in 1..=d {
        let name = probe.fresh_name(&format!("b{i}"));
        probe = probe.extended(&[name.clone()]).expect("fresh");
        names.push(name);
    }
    names
}

/// Extracts the b-coefficients of `vals[j]` (which live in `ctx ∪ b`).
fn collect_entries(
    group: GroupTag,
    d: usize,
    ctx: &VarContext,
    b: &[String],
    vals: &[MultiPoly],
) -> Result<SpectralDatum> {
    let sys = invariant_system(group);
    let mut entries = BTreeMap::new();
    for (j, (gen, v)) in sys.generators.iter().zip(vals).enumerate() {
        let coeffs = v.coefficients_in(b)?;
        for (exps, c) in &coeffs {
            if exps.iter().sum::<u32>() != gen.degree && !c.is_zero() {
                return Err(Error::GradingViolation(format!(
                    "{} is not homogeneous of degree {} in the polarization symbols",
                    gen.name, gen.degree
                )));
            }
        }
        for comp in weak_compositions(gen.degree, d) {
            let val = match coeffs.get(comp.parts()) {
                Some(c) => c.embed(ctx)?,
                None => MultiPoly::zero(ctx),
            };
            entries.insert((j + 1, comp), val);
        }
    }
    SpectralDatum::new(group, d, ctx, entries)
}

/// Polarized invariants of `t`: the coefficient of `bⁱ` in `c_j(Σ b_k θᵏ)`.
pub fn spectral_data(t: &CommutingTuple) -> Result<SpectralDatum> {
    let ctx = t.ctx().clone();
    let b = fresh_symbols(&ctx, t.d());
    let ext = ctx.extended(&b)?;
    let mut sum = PolyMatrix::zeros(t.group().dim(), t.group().dim(), &ext);
    for (name, m) in b.iter().zip(t.matrices()) {
        let bm = m.embed(&ext)?.scale(&MultiPoly::var(&ext, name)?)?;
        sum = sum.checked_add(&bm)?;
    }
    let vals = evaluate_invariants_with(t.group(), &sum, t.form())?;
    collect_entries(t.group(), t.d(), &ctx, &b, &vals)
}

fn check_action(x: &QMatrix, d: usize) -> Result<()> {
    if x.rows() != d || x.cols() != d {
        return Err(Error::InvalidAction(format!(
            "expected a {d}x{d} matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    if !x.is_invertible() {
        return Err(Error::InvalidAction("matrix is singular".into()));
    }
    Ok(())
}

/// `θ'ⁱ = Σ_j xⁱ_j θʲ`.
pub fn gld_act(x: &QMatrix, t: &CommutingTuple) -> Result<CommutingTuple> {
    check_action(x, t.d())?;
    let mut out = Vec::with_capacity(t.d());
    for i in 0..t.d() {
        let mut acc = PolyMatrix::zeros(t.group().dim(), t.group().dim(), t.ctx());
        for (j, m) in t.matrices().iter().enumerate() {
            acc = acc.checked_add(&m.scale_rational(x.get(i, j)))?;
        }
        out.push(acc);
    }
    CommutingTuple::with_form(t.group(), out, t.form().cloned())
}

/// The datum that `gld_act(x, T)` must have when `datum` belongs to `T`:
/// expand `Σ_ℓ Π_k (Σ_i b_i xⁱ_k)^{ℓ_k} c_{j,ℓ}` and read off b-coefficients.
pub fn coaction(x: &QMatrix, datum: &SpectralDatum) -> Result<SpectralDatum> {
    check_action(x, datum.d())?;
    pullback_datum(&x.to_poly(datum.ctx()), datum)
}

/// The coaction formula for a `d × d` matrix `x` with polynomial entries,
/// which need not be invertible. This is how spectral data pull back along a
/// chart map whose differential is `x`.
pub fn pullback_datum(x: &PolyMatrix, datum: &SpectralDatum) -> Result<SpectralDatum> {
    let d = datum.d();
    if x.rows() != d || x.cols() != d {
        return Err(Error::InvalidAction(format!("expected a {d}x{d} matrix, got {}x{}", x.rows(), x.cols())));
    }
    let ctx = datum.ctx().union(x.ctx());
    let b = fresh_symbols(&ctx, d);
    let ext = ctx.extended(&b)?;
    let xe = x.embed(&ext)?;
    let linear: Vec<MultiPoly> = (0..d)
        .map(|k| {
            let mut acc = MultiPoly::zero(&ext);
            for (i, name) in b.iter().enumerate() {
                let bi = MultiPoly::var(&ext, name).expect("fresh symbol");
                acc = &acc + &(&bi * xe.get(i, k));
            }
            acc
        })
        .collect();
    let sys = invariant_system(datum.group());
    let mut vals = vec![MultiPoly::zero(&ext); sys.generators.len()];
    for ((j, comp), v) in datum.entries() {
        let mut term = v.embed(&ext)?;
        for (l, &p) in linear.iter().zip(comp.parts()) {
            term = &term * &l.pow(p);
        }
        vals[j - 1] = &vals[j - 1] + &term;
    }
    collect_entries(datum.group(), d, &ctx, &b, &vals)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntryMismatch {
    pub j: usize,
    pub comp: WeakComposition,
    pub expected: MultiPoly,
    pub actual: MultiPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceReport {
    pub mismatches: Vec<EntryMismatch>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub(crate) fn compare_data(expected: &SpectralDatum, actual: &SpectralDatum) -> Result<Vec<EntryMismatch>> {
    let ctx = expected.ctx().union(actual.ctx());
    let mut out = Vec::new();
    for ((j, comp), e) in expected.entries() {
        let e = e.embed(&ctx)?;
        let a = match actual.entries().get(&(*j, comp.clone())) {
            Some(a) => a.embed(&ctx)?,
            None => MultiPoly::zero(&ctx),
        };
        if e != a {
            out.push(EntryMismatch {
                j: *j,
                comp: comp.clone(),
                expected: e,
                actual: a,
            });
        }
    }
    Ok(out)
}

/// Compares `spectral_data(gld_act(x, T))` with `coaction(x, spectral_data(T))`.
pub fn equivariance_check(x: &QMatrix, t: &CommutingTuple) -> Result<EquivarianceReport> {
    let moved = spectral_data(&gld_act(x, t)?)?;
    let predicted = coaction(x, &spectral_data(t)?)?;
    Ok(EquivarianceReport {
        mismatches: compare_data(&predicted, &moved)?,
    })
}

/// Value of each `c_j` on `θ¹ + … + θᵈ`, i.e. the sum of its polarizations.
pub fn diagonal_restriction(datum: &SpectralDatum) -> Vec<MultiPoly> {
    let sys = invariant_system(datum.group());
    let mut out = vec![MultiPoly::zero(datum.ctx()); sys.generators.len()];
    for ((j, _), v) in datum.entries() {
        out[j - 1] = &out[j - 1] + v;
    }
    out
}
