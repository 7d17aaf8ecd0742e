//! Spectral-cover algebras as free modules over the Hitchin base.
//!
//! Each algebra is stored through the matrices of multiplication by its
//! generators in a fixed monomial basis. Everything else (pairing, grading,
//! arbitrary multiplication matrices) is derived from those matrices.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::groebner::{groebner_basis, GroebnerBudget, IdealPresentation, MonomialOrder};
use crate::algebra::{discriminant, AlgebraError, MultiPoly, PolyMatrix, Rational, VarContext};
use crate::error::{Error, Result};
use crate::invariants::{pfaffian, BilinearFormSpec, FormKind, GroupFamily, GroupTag};
use crate::polarization::CommutingTuple;

pub const X: &str = "x";

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAlgebra {
    group: GroupTag,
    base_symbols: Vec<String>,
    base_weights: Vec<i64>,
    /// `x`, plus `p_{n-1}` for the even orthogonal cover.
    generators: Vec<String>,
    /// Context of the coefficient ring (base symbols, or the specialization target).
    base_ctx: VarContext,
    relations: Vec<MultiPoly>,
    basis: Vec<Vec<u32>>,
    gen_matrices: Vec<PolyMatrix>,
    involution_signs: Vec<i8>,
    basis_weights: Vec<i64>,
    top: usize,
    orientation: Option<Rational>,
    specialized: bool,
}

fn a(k: usize) -> String {
    format!("a_{k}")
}

/// Pfaffian symbol `p_k`.
fn p(k: usize) -> String {
    format!("p_{k}")
}

impl SpectralAlgebra {
    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn base_symbols(&self) -> &[String] {
        &self.base_symbols
    }

    pub fn base_weights(&self) -> BTreeMap<String, i64> {
        self.base_symbols.iter().cloned().zip(self.base_weights.iter().copied()).collect()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn base_ctx(&self) -> &VarContext {
        &self.base_ctx
    }

    /// Generators followed by the coefficient symbols.
    pub fn full_ctx(&self) -> VarContext {
        VarContext::new(self.generators.iter().chain(self.base_ctx.names())).expect("generators are fresh")
    }

    pub fn relations(&self) -> &[MultiPoly] {
        &self.relations
    }

    pub fn module_rank(&self) -> usize {
        self.basis.len()
    }

    /// Basis monomials as exponent vectors in the generators.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let ctx = VarContext::new(&self.generators).expect("distinct");
        self.basis
            .iter()
            .map(|e| MultiPoly::monomial(&ctx, e.clone(), Rational::one()).to_string())
            .collect()
    }

    pub fn mult_x(&self) -> &PolyMatrix {
        &self.gen_matrices[0]
    }

    pub fn generator_matrices(&self) -> &[PolyMatrix] {
        &self.gen_matrices
    }

    pub fn involution_signs(&self) -> &[i8] {
        &self.involution_signs
    }

    pub fn basis_weights(&self) -> &[i64] {
        &self.basis_weights
    }

    pub fn top_index(&self) -> usize {
        self.top
    }

    pub fn is_specialized(&self) -> bool {
        self.specialized
    }

    /// Matrix of multiplication by `element`, a polynomial in the generators
    /// with coefficients in the base (in any context whose non-generator
    /// symbols belong to the base context).
    pub fn multiplication_matrix(&self, element: &MultiPoly) -> Result<PolyMatrix> {
        for g in &self.generators {
            if !element.ctx().contains(g) {
                // treat a missing generator as absent from the element
                let ext = element.ctx().extended(&[g.clone()])?;
                return self.multiplication_matrix(&element.embed(&ext)?);
            }
        }
        let parts = element.coefficients_in(&self.generators)?;
        let size = self.module_rank();
        let mut acc = PolyMatrix::zeros(size, size, &self.base_ctx);
        let mut cache: BTreeMap<(usize, u32), PolyMatrix> = BTreeMap::new();
        for (exps, coef) in parts {
            let coef = coef.embed(&self.base_ctx)?;
            let mut term = PolyMatrix::identity(size, &self.base_ctx);
            for (gi, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = match cache.get(&(gi, k)) {
                    Some(m) => m.clone(),
                    None => {
                        let m = self.gen_matrices[gi].pow(k)?;
                        cache.insert((gi, k), m.clone());
                        m
                    }
                };
                term = term.checked_mul(&pw)?;
            }
            acc = acc.checked_add(&term.scale(&coef)?)?;
        }
        Ok(acc)
    }

    /// Coordinates of `element` in the basis.
    pub fn coordinates(&self, element: &MultiPoly) -> Result<Vec<MultiPoly>> {
        Ok(self.multiplication_matrix(element)?.column(0))
    }

    /// Replaces the base symbols by the given values, all living in one context.
    pub fn specialize(&self, values: &BTreeMap<String, MultiPoly>) -> Result<SpectralAlgebra> {
        if self.specialized {
            return Err(Error::Domain("algebra is already specialized".into()));
        }
        for s in &self.base_symbols {
            if !values.contains_key(s) {
                return Err(Error::IncompleteSpecialization(s.clone()));
            }
        }
        if let Some(extra) = values.keys().find(|k| !self.base_symbols.contains(k)) {
            return Err(Error::Domain(format!("{extra} is not a base symbol of {}", self.group)));
        }
        let mut target = VarContext::empty();
        for v in values.values() {
            target = target.union(v.ctx());
        }
        if let Some(g) = self.generators.iter().find(|g| target.contains(g)) {
            return Err(Error::Domain(format!("specialization context uses the generator name {g}")));
        }
        let values: BTreeMap<String, MultiPoly> = values
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.embed(&target)?)))
            .collect::<std::result::Result<_, AlgebraError>>()?;
        let gen_matrices = self
            .gen_matrices
            .iter()
            .map(|m| m.eval(&values, &target))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let full = VarContext::new(self.generators.iter().chain(target.names())).expect("checked above");
        let mut full_values = BTreeMap::new();
        for (k, v) in &values {
            full_values.insert(k.clone(), v.embed(&full)?);
        }
        for g in &self.generators {
            full_values.insert(g.clone(), MultiPoly::var(&full, g)?);
        }
        let relations = self
            .relations
            .iter()
            .map(|r| r.eval(&full_values, &full))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SpectralAlgebra {
            base_ctx: target,
            relations,
            gen_matrices,
            specialized: true,
            ..self.clone()
        })
    }

    /// Substitutes the generator matrices into each relation.
    pub fn relation_residues(&self) -> Result<Vec<PolyMatrix>> {
        self.relations.iter().map(|r| self.multiplication_matrix(r)).collect()
    }

    /// Weighted degree of `poly` under deg(generator) and deg(base symbol);
    /// `None` for zero or inhomogeneous input. Only meaningful before
    /// specialization.
    pub fn weighted_degree(&self, poly: &MultiPoly) -> Option<i64> {
        let mut weights: BTreeMap<&str, i64> = BTreeMap::new();
        weights.insert(X, 1);
        if self.generators.len() > 1 {
            weights.insert(&self.generators[1], self.group.n() as i64 - 1);
        }
        for (s, w) in self.base_symbols.iter().zip(&self.base_weights) {
            weights.insert(s, *w);
        }
        let names = poly.ctx().names();
        let mut deg = None;
        for (e, _) in poly.terms() {
            let d: i64 = e
                .iter()
                .zip(names)
                .map(|(k, name)| *k as i64 * weights.get(name.as_str()).copied().unwrap_or(0))
                .sum();
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        deg
    }
}

/// `x^N + Σ coeffs[k] x^{N-1-k}` as companion data: basis `1, …, x^{N-1}`.
fn univariate(
    group: GroupTag,
    base: Vec<(String, i64)>,
    // coefficient of x^{N-k} for k = 1..=N (None when absent)
    coeffs: Vec<Option<String>>,
) -> SpectralAlgebra {
    let base_symbols: Vec<String> = base.iter().map(|b| b.0.clone()).collect();
    let base_ctx = VarContext::new(&base_symbols).expect("distinct symbols");
    let full = VarContext::new(std::iter::once(X.to_string()).chain(base_symbols.iter().cloned())).expect("distinct");
    let size = coeffs.len();
    let xv = MultiPoly::var(&full, X).expect("x");
    let mut rel = xv.pow(size as u32);
    let mut mx = PolyMatrix::zeros(size, size, &base_ctx);
    for r in 1..size {
        mx.set(r, r - 1, MultiPoly::one(&base_ctx));
    }
    for (k, c) in coeffs.iter().enumerate() {
        // coefficient of x^{size-1-k}
        if let Some(name) = c {
            let power = (size - 1 - k) as u32;
            rel = &rel + &(&MultiPoly::var(&full, name).expect("base symbol") * &xv.pow(power));
            mx.set(size - 1 - k, size - 1, -MultiPoly::var(&base_ctx, name).expect("base symbol"));
        }
    }
    SpectralAlgebra {
        group,
        base_weights: base.iter().map(|b| b.1).collect(),
        base_symbols,
        generators: vec![X.to_string()],
        base_ctx,
        relations: vec![rel],
        basis: (0..size as u32).map(|k| vec![k]).collect(),
        gen_matrices: vec![mx],
        involution_signs: (0..size).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect(),
        basis_weights: (0..size as i64).collect(),
        top: size - 1,
        orientation: None,
        specialized: false,
    }
}

/// The rank-2n algebra `A[x, q]/(p_n − x q, g(x) + q²)` with
/// `g = x^{2n−2} + a_2 x^{2n−4} + … + a_{2n−2}` and `q = p_{n−1}`.
///
/// Basis `1, x, …, x^{2n−2}, q`. The relations give
/// `x·x^{2n−2} = −p_n q − Σ a_{2i} x^{2n−1−2i}`, `x q = p_n`,
/// `q x^k = p_n x^{k−1}` and `q² = −g(x)`.
fn even_orthogonal(group: GroupTag) -> SpectralAlgebra {
    let n = group.n();
    let q = p(n - 1);
    let pn = p(n);
    let mut base: Vec<(String, i64)> = (1..n).map(|i| (a(2 * i), 2 * i as i64)).collect();
    base.push((pn.clone(), n as i64));
    let base_symbols: Vec<String> = base.iter().map(|b| b.0.clone()).collect();
    let base_ctx = VarContext::new(&base_symbols).expect("distinct");
    let full = VarContext::new([X.to_string(), q.clone()].into_iter().chain(base_symbols.iter().cloned())).expect("distinct");
    let size = 2 * n;
    let qi = size - 1;
    let top = size - 2;
    let bv = |s: &str| MultiPoly::var(&base_ctx, s).expect("base symbol");
    let fv = |s: &str| MultiPoly::var(&full, s).expect("symbol");

    let mut mx = PolyMatrix::zeros(size, size, &base_ctx);
    for k in 0..top {
        mx.set(k + 1, k, MultiPoly::one(&base_ctx));
    }
    mx.set(qi, top, -bv(&pn));
    for i in 1..n {
        mx.set(size - 1 - 2 * i, top, -bv(&a(2 * i)));
    }
    mx.set(0, qi, bv(&pn));

    let mut mq = PolyMatrix::zeros(size, size, &base_ctx);
    mq.set(qi, 0, MultiPoly::one(&base_ctx));
    for k in 1..=top {
        mq.set(k - 1, k, bv(&pn));
    }
    mq.set(top, qi, -MultiPoly::one(&base_ctx));
    for i in 1..n {
        mq.set(top - 2 * i, qi, -bv(&a(2 * i)));
    }

    let xv = fv(X);
    let mut g = xv.pow(top as u32);
    for i in 1..n {
        g = &g + &(&fv(&a(2 * i)) * &xv.pow((top - 2 * i) as u32));
    }
    let r1 = &fv(&pn) - &(&xv * &fv(&q));
    let r2 = &g + &fv(&q).pow(2);

    let mut basis: Vec<Vec<u32>> = (0..=top as u32).map(|k| vec![k, 0]).collect();
    basis.push(vec![0, 1]);
    let mut signs: Vec<i8> = (0..=top).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect();
    // x q = p_n is fixed by the involution, so q changes sign with x
    signs.push(-1);
    let mut weights: Vec<i64> = (0..=top as i64).collect();
    weights.push(n as i64 - 1);
    SpectralAlgebra {
        group,
        base_weights: base.iter().map(|b| b.1).collect(),
        base_symbols,
        generators: vec![X.to_string(), q],
        base_ctx,
        relations: vec![r1, r2],
        basis,
        gen_matrices: vec![mx, mq],
        involution_signs: signs,
        basis_weights: weights,
        top,
        orientation: None,
        specialized: false,
    }
}

/// Builds the cover algebra of `group` (GL gives the generic `B_N`), then
/// specializes the base symbols when `specialization` is given.
pub fn build_cover_algebra(group: GroupTag, specialization: Option<&BTreeMap<String, MultiPoly>>) -> Result<SpectralAlgebra> {
    let n = group.n();
    let mut alg = match group.family() {
        GroupFamily::GL => univariate(
            group,
            (1..=n).map(|k| (a(k), k as i64)).collect(),
            (1..=n).map(|k| Some(a(k))).collect(),
        ),
        GroupFamily::SL => univariate(
            group,
            (2..=n + 1).map(|k| (a(k), k as i64)).collect(),
            (1..=n + 1).map(|k| if k >= 2 { Some(a(k)) } else { None }).collect(),
        ),
        GroupFamily::Sp => univariate(
            group,
            (1..=n).map(|i| (a(2 * i), 2 * i as i64)).collect(),
            (1..=2 * n).map(|k| if k % 2 == 0 { Some(a(k)) } else { None }).collect(),
        ),
        GroupFamily::SOOdd => univariate(
            group,
            (1..=n).map(|i| (a(2 * i), 2 * i as i64)).collect(),
            // x (x^{2n} + a_2 x^{2n-2} + … + a_{2n}): coefficient of x^0 is absent
            (1..=2 * n + 1)
                .map(|k| if k % 2 == 0 { Some(a(k)) } else { None })
                .collect(),
        ),
        GroupFamily::SOEven => even_orthogonal(group),
    };
    check_structure(&alg)?;
    if group.family() == GroupFamily::SOEven {
        alg.orientation = Some(pfaffian_orientation(&alg)?);
    }
    match specialization {
        Some(values) => {
            let s = alg.specialize(values)?;
            check_structure(&s)?;
            Ok(s)
        }
        None => Ok(alg),
    }
}

/// Generator matrices commute and satisfy the relations; the basis monomials
/// map to the unit vectors.
fn check_structure(alg: &SpectralAlgebra) -> Result<()> {
    let ms = alg.generator_matrices();
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if !ms[i].commutator(&ms[j])?.is_zero() {
                return Err(Error::Construction("generator matrices do not commute".into()));
            }
        }
    }
    for (k, res) in alg.relation_residues()?.iter().enumerate() {
        if !res.is_zero() {
            return Err(Error::Construction(format!("relation {k} does not annihilate the generator matrices")));
        }
    }
    let det = freeness_determinant(alg)?;
    if det.constant_value().map_or(true, |d| d.is_zero()) {
        return Err(Error::Construction("basis images are not a unimodular frame".into()));
    }
    Ok(())
}

/// Determinant of the matrix whose columns are the coordinates of the basis
/// monomials computed through the generator matrices.
pub fn freeness_determinant(alg: &SpectralAlgebra) -> Result<MultiPoly> {
    let gens = VarContext::new(alg.generators()).expect("distinct");
    let size = alg.module_rank();
    let mut frame = PolyMatrix::zeros(size, size, alg.base_ctx());
    for (k, e) in alg.basis().iter().enumerate() {
        let m = MultiPoly::monomial(&gens, e.clone(), Rational::one());
        for (r, v) in alg.coordinates(&m)?.into_iter().enumerate() {
            frame.set(r, k, v);
        }
    }
    Ok(frame.det()?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreenessCertificate {
    pub frame_determinant: Rational,
    /// Number of reduction rules `y·b_k − Σ_r M_y[r][k] b_r` shown to lie in the
    /// ideal of relations.
    pub reduction_rules: usize,
}

/// Shows that every multiplication rule encoded in the generator matrices is
/// a consequence of the relations.
pub fn certify_freeness(alg: &SpectralAlgebra, budget: GroebnerBudget) -> Result<FreenessCertificate> {
    let det = freeness_determinant(alg)?
        .constant_value()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Error::Construction("basis frame is not unimodular".into()))?;
    let full = alg.full_ctx();
    let ideal = IdealPresentation::new(alg.relations().to_vec(), MonomialOrder::GradedReverseLex)?;
    let gb = groebner_basis(&ideal, budget)?;
    let mono = |e: &[u32]| {
        let mut exps = e.to_vec();
        exps.resize(full.len(), 0);
        MultiPoly::monomial(&full, exps, Rational::one())
    };
    let mut count = 0;
    for (gi, m) in alg.generator_matrices().iter().enumerate() {
        let y = MultiPoly::var(&full, &alg.generators()[gi])?;
        for (k, bk) in alg.basis().iter().enumerate() {
            let mut rule = &y * &mono(bk);
            for (r, br) in alg.basis().iter().enumerate() {
                rule = &rule - &(&m.get(r, k).embed(&full)? * &mono(br));
            }
            if !gb.contains(&rule)? {
                return Err(Error::Construction(format!(
                    "{} * {} does not reduce as recorded",
                    alg.generators()[gi],
                    alg.basis_labels()[k]
                )));
            }
            count += 1;
        }
    }
    Ok(FreenessCertificate {
        frame_determinant: det,
        reduction_rules: count,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingGram {
    pub kind: FormKind,
    pub gram: PolyMatrix,
}

impl PairingGram {
    /// As a bilinear form, oriented for the Pfaffian when the algebra has one.
    pub fn to_form(&self, alg: &SpectralAlgebra) -> Result<BilinearFormSpec> {
        BilinearFormSpec::new(self.kind, self.gram.clone(), alg.orientation.clone())
    }
}

/// `ω(b_r, b_s) = λ(b_r · σ(b_s))` with `λ` the coefficient of the top basis
/// element, checked to be nondegenerate, of the expected symmetry, and
/// anti-self-adjoint for multiplication by `x`.
pub fn pairing_gram(alg: &SpectralAlgebra) -> Result<PairingGram> {
    let kind = match alg.group().family() {
        GroupFamily::SOOdd | GroupFamily::SOEven => FormKind::Symmetric,
        GroupFamily::Sp => FormKind::Alternating,
        f => return Err(Error::InvalidGroup(format!("{f} covers carry no pairing"))),
    };
    let gens = VarContext::new(alg.generators()).expect("distinct");
    let size = alg.module_rank();
    let mut gram = PolyMatrix::zeros(size, size, alg.base_ctx());
    for (r, br) in alg.basis().iter().enumerate() {
        let mr = alg.multiplication_matrix(&MultiPoly::monomial(&gens, br.clone(), Rational::one()))?;
        for s in 0..size {
            let v = mr.get(alg.top_index(), s);
            let v = if alg.involution_signs()[s] < 0 { -v } else { v.clone() };
            gram.set(r, s, v);
        }
    }
    let det = gram.det()?;
    if det.constant_value().map_or(true, |d| d.is_zero()) {
        return Err(Error::Construction(format!("pairing is degenerate: det = {det}")));
    }
    let t = gram.transpose();
    let sym_ok = match kind {
        FormKind::Symmetric => t == gram,
        FormKind::Alternating => t == gram.neg(),
    };
    if !sym_ok {
        return Err(Error::Construction(format!("pairing is not {}", kind.name())));
    }
    let mx = alg.mult_x();
    if !mx.transpose().checked_mul(&gram)?.checked_add(&gram.checked_mul(mx)?)?.is_zero() {
        return Err(Error::Construction("multiplication by x is not anti-self-adjoint".into()));
    }
    Ok(PairingGram { kind, gram })
}

/// `pf(G · M_x) = ρ p_n` with `ρ² = det G`; returns `ρ`.
fn pfaffian_orientation(alg: &SpectralAlgebra) -> Result<Rational> {
    let g = pairing_gram(alg)?;
    let pf = pfaffian(&g.gram.checked_mul(alg.mult_x())?)?;
    let pn = MultiPoly::var(alg.base_ctx(), &p(alg.group().n()))?;
    let rho = pf
        .div_exact(&pn)?
        .and_then(|q| q.constant_value())
        .ok_or_else(|| Error::Construction(format!("Pfaffian {pf} is not a multiple of the base Pfaffian")))?;
    let det = g.gram.det()?.constant_value().expect("checked by pairing_gram");
    if &rho * &rho != det {
        return Err(Error::Construction("Pfaffian normalization does not square to det".into()));
    }
    Ok(rho)
}

/// The uniform shift `w` with `deg ω(b_r, b_s) = deg b_r + deg b_s − w`.
pub fn gm_weight_check(alg: &SpectralAlgebra) -> Result<i64> {
    if alg.is_specialized() {
        return Err(Error::Domain("weights are defined on the unspecialized algebra".into()));
    }
    let g = pairing_gram(alg)?;
    let ws = alg.basis_weights();
    let mut w: Option<i64> = None;
    for r in 0..alg.module_rank() {
        for s in 0..alg.module_rank() {
            let entry = g.gram.get(r, s);
            if entry.is_zero() {
                continue;
            }
            let d = alg.weighted_degree(entry).ok_or_else(|| {
                Error::GradingViolation(format!("pairing entry ({r},{s}) = {entry} is not homogeneous"))
            })?;
            let here = ws[r] + ws[s] - d;
            match w {
                None => w = Some(here),
                Some(prev) if prev != here => {
                    return Err(Error::GradingViolation(format!(
                        "pairing entry ({r},{s}) has shift {here}, expected {prev}"
                    )))
                }
                _ => {}
            }
        }
    }
    w.ok_or_else(|| Error::GradingViolation("pairing is zero".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SmoothnessVerdict {
    Smooth,
    /// Not smooth; carries a rational point of the singular locus when one
    /// was found on the search grid.
    Singular(Option<BTreeMap<String, Rational>>),
}

impl SmoothnessVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self, SmoothnessVerdict::Smooth)
    }
}

fn minors(rows: &[Vec<MultiPoly>], size: usize) -> Vec<MultiPoly> {
    fn choose(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            choose(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let cols = rows[0].len();
    let mut subsets = Vec::new();
    choose(cols, size, 0, &mut Vec::new(), &mut subsets);
    let ctx = rows[0][0].ctx().clone();
    subsets
        .into_iter()
        .map(|cs| {
            let m = PolyMatrix::from_fn(size, size, &ctx, |r, c| rows[r][cs[c]].clone());
            m.det().expect("square")
        })
        .filter(|d| !d.is_zero())
        .collect()
}

/// The Jacobian ideal: relations plus all maximal minors of their Jacobian
/// with respect to every symbol (generators and base).
pub fn jacobian_ideal(alg: &SpectralAlgebra) -> Result<IdealPresentation> {
    let full = alg.full_ctx();
    let rels = alg.relations();
    let jac: Vec<Vec<MultiPoly>> = rels
        .iter()
        .map(|r| full.names().iter().map(|v| r.partial_derivative(v)).collect())
        .collect::<std::result::Result<_, _>>()?;
    let mut gens = rels.to_vec();
    gens.extend(minors(&jac, rels.len()));
    Ok(IdealPresentation::new(gens, MonomialOrder::GradedReverseLex)?)
}

/// Jacobian criterion over the generic base: smooth iff the Jacobian ideal is
/// the unit ideal.
pub fn jacobian_smoothness(alg: &SpectralAlgebra, budget: GroebnerBudget) -> Result<SmoothnessVerdict> {
    if alg.is_specialized() {
        return Err(Error::Domain("smoothness is decided on the unspecialized algebra".into()));
    }
    let ideal = jacobian_ideal(alg)?;
    let gb = groebner_basis(&ideal, budget)?;
    if gb.is_unit_ideal() {
        return Ok(SmoothnessVerdict::Smooth);
    }
    Ok(SmoothnessVerdict::Singular(find_witness(&ideal)?))
}

/// Searches `{0, 1, −1}` values for a common zero of the ideal generators,
/// with `x = 0` tried first.
fn find_witness(ideal: &IdealPresentation) -> Result<Option<BTreeMap<String, Rational>>> {
    let ctx = ideal.ctx().clone();
    let names = ctx.names().to_vec();
    let values = [Rational::zero(), Rational::one(), -Rational::one()];
    let x_pos = names.iter().position(|n| n == X);
    let mut order: Vec<usize> = (0..names.len()).collect();
    if let Some(pos) = x_pos {
        // x varies slowest, so the whole x = 0 stratum comes first
        order.retain(|&i| i != pos);
        order.insert(0, pos);
    }
    let total = 3usize.pow(names.len() as u32);
    let empty = VarContext::empty();
    for idx in 0..total {
        let mut digits = vec![0usize; names.len()];
        let mut rest = idx;
        for &slot in order.iter().rev() {
            digits[slot] = rest % 3;
            rest /= 3;
        }
        let point: BTreeMap<String, MultiPoly> = names
            .iter()
            .zip(&digits)
            .map(|(nm, &d)| (nm.clone(), MultiPoly::constant(&empty, values[d].clone())))
            .collect();
        let mut all_zero = true;
        for g in ideal.generators() {
            if !g.eval(&point, &empty)?.is_zero() {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(Some(
                point
                    .into_iter()
                    .map(|(k, v)| (k, v.constant_value().expect("constant")))
                    .collect(),
            ));
        }
    }
    Ok(None)
}

/// Distinct joint eigenvalues: the characteristic polynomial of `Σ b_k θᵏ` has
/// nonzero discriminant as a polynomial in the `b` (and any other symbols).
pub fn is_multiplicity_free(t: &CommutingTuple) -> Result<bool> {
    let ctx = t.ctx().clone();
    let mut probe = ctx.clone();
    let mut b = Vec::new();
    for i in 1..=t.d() {
        let name = probe.fresh_name(&format!("b{i}"));
        probe = probe.extended(&[name.clone()])?;
        b.push(name);
    }
    let xname = probe.fresh_name(X);
    let ext = probe.extended(&[xname.clone()])?;
    let size = t.matrices()[0].rows();
    let mut sum = PolyMatrix::zeros(size, size, &ext);
    for (name, m) in b.iter().zip(t.matrices()) {
        sum = sum.checked_add(&m.embed(&ext)?.scale(&MultiPoly::var(&ext, name)?)?)?;
    }
    let cp = sum.char_poly()?;
    let xv = MultiPoly::var(&ext, &xname)?;
    let mut f = xv.pow(size as u32);
    for (k, c) in cp.iter().enumerate() {
        f = &f + &(c * &xv.pow((size - 1 - k) as u32));
    }
    Ok(!discriminant(&f, &xname)?.is_zero())
}

#[derive(Clone, Debug, PartialEq)]
pub enum GrssVerdict {
    Grss,
    NotGrss(String),
}

impl GrssVerdict {
    pub fn is_grss(&self) -> bool {
        matches!(self, GrssVerdict::Grss)
    }
}

/// For SO_{2n+1} with `a = (a_2, a_4, …, a_{2n})` over a chart: generically
/// regular semisimple iff `a_{2n} ≢ 0` and the inner factor
/// `x^{2n} + a_2 x^{2n−2} + … + a_{2n}` has nonzero discriminant.
pub fn grss_check(group: GroupTag, a: &[MultiPoly]) -> Result<GrssVerdict> {
    if group.family() != GroupFamily::SOOdd {
        return Err(Error::InvalidGroup(format!("grss criterion is for SO_odd, got {group}")));
    }
    let n = group.n();
    if a.len() != n {
        return Err(Error::InvalidSection(format!("expected {n} coefficients a_2..a_{}, got {}", 2 * n, a.len())));
    }
    if a[n - 1].is_zero() {
        return Ok(GrssVerdict::NotGrss(format!("a_{} vanishes identically", 2 * n)));
    }
    let mut ctx = VarContext::empty();
    for v in a {
        ctx = ctx.union(v.ctx());
    }
    let xname = ctx.fresh_name(X);
    let ext = ctx.extended(&[xname.clone()])?;
    let xv = MultiPoly::var(&ext, &xname)?;
    let mut h = xv.pow(2 * n as u32);
    for (i, v) in a.iter().enumerate() {
        h = &h + &(&v.embed(&ext)? * &xv.pow((2 * n - 2 * (i + 1)) as u32));
    }
    let disc = discriminant(&h, &xname)?;
    if disc.is_zero() {
        return Ok(GrssVerdict::NotGrss(
            "the inner factor has a repeated root identically in the chart coordinate".into(),
        ));
    }
    Ok(GrssVerdict::Grss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use proptest::prelude::*;

    fn tag(f: GroupFamily, n: usize) -> GroupTag {
        GroupTag::new(f, n).unwrap()
    }

    fn budget() -> GroebnerBudget {
        GroebnerBudget::default()
    }

    #[test]
    fn symplectic_rank_two() {
        let alg = build_cover_algebra(tag(GroupFamily::Sp, 1), None).unwrap();
        let c = alg.base_ctx().clone();
        assert_eq!(alg.mult_x(), &PolyMatrix::parse(&c, &[&["0", "-a_2"], &["1", "0"]]).unwrap());
        let full = alg.full_ctx();
        assert_eq!(alg.relations()[0], MultiPoly::parse(&full, "x^2+a_2").unwrap());
        let x2 = MultiPoly::parse(&full, "x^2").unwrap();
        let expect = PolyMatrix::identity(2, &c).scale(&MultiPoly::parse(&c, "-a_2").unwrap()).unwrap();
        assert_eq!(alg.multiplication_matrix(&x2).unwrap(), expect);
        assert_eq!(
            alg.multiplication_matrix(&MultiPoly::one(&full)).unwrap(),
            PolyMatrix::identity(2, &c)
        );
        let g = pairing_gram(&alg).unwrap();
        assert_eq!(g.kind, FormKind::Alternating);
        assert_eq!(g.gram, PolyMatrix::parse(&c, &[&["0", "-1"], &["1", "0"]]).unwrap());
        assert_eq!(gm_weight_check(&alg).unwrap(), 1);
    }

    #[test]
    fn odd_orthogonal_rank_three() {
        let alg = build_cover_algebra(tag(GroupFamily::SOOdd, 1), None).unwrap();
        let c = alg.base_ctx().clone();
        assert_eq!(
            alg.mult_x(),
            &PolyMatrix::parse(&c, &[&["0", "0", "0"], &["1", "0", "-a_2"], &["0", "1", "0"]]).unwrap()
        );
        let g = pairing_gram(&alg).unwrap();
        assert_eq!(
            g.gram,
            PolyMatrix::parse(&c, &[&["0", "0", "1"], &["0", "-1", "0"], &["1", "0", "-a_2"]]).unwrap()
        );
        assert_eq!(gm_weight_check(&alg).unwrap(), 2);
    }

    #[test]
    fn even_orthogonal_rank_four() {
        let alg = build_cover_algebra(tag(GroupFamily::SOEven, 2), None).unwrap();
        assert_eq!(alg.module_rank(), 4);
        let full = alg.full_ctx();
        assert_eq!(alg.relations()[0], MultiPoly::parse(&full, "p_2 - x*p_1").unwrap());
        assert_eq!(alg.relations()[1], MultiPoly::parse(&full, "x^2 + a_2 + p_1^2").unwrap());
        let mq = alg.multiplication_matrix(&MultiPoly::parse(&full, "p_1").unwrap()).unwrap();
        let rhs = alg.multiplication_matrix(&MultiPoly::parse(&full, "-x^2-a_2").unwrap()).unwrap();
        assert_eq!(mq.pow(2).unwrap(), rhs);
        let c = alg.base_ctx().clone();
        let g = pairing_gram(&alg).unwrap();
        assert_eq!(
            g.gram,
            PolyMatrix::parse(
                &c,
                &[&["0", "0", "1", "0"], &["0", "-1", "0", "0"], &["1", "0", "-a_2", "0"], &["0", "0", "0", "1"]]
            )
            .unwrap()
        );
        assert_eq!(gm_weight_check(&alg).unwrap(), 2);
    }

    #[test]
    fn char_poly_of_even_orthogonal_mult_x() {
        for n in 1..=4 {
            let alg = build_cover_algebra(tag(GroupFamily::SOEven, n), None).unwrap();
            let c = alg.base_ctx().clone();
            let cp = alg.mult_x().char_poly().unwrap();
            for (k, v) in cp.iter().enumerate() {
                let idx = k + 1;
                let expect = if idx == 2 * n {
                    MultiPoly::var(&c, &p(n)).unwrap().pow(2)
                } else if idx % 2 == 0 {
                    MultiPoly::var(&c, &a(idx)).unwrap()
                } else {
                    MultiPoly::zero(&c)
                };
                assert_eq!(v, &expect, "n={n} a_{idx}");
            }
        }
    }

    #[test]
    fn structure_for_all_groups() {
        for f in GroupFamily::ALL {
            for n in 1..=4 {
                let g = tag(f, n);
                let alg = build_cover_algebra(g, None).unwrap();
                assert_eq!(alg.module_rank(), g.dim(), "{g}");
                assert!(alg.relation_residues().unwrap().iter().all(|r| r.is_zero()));
                for r in alg.relations() {
                    assert!(alg.weighted_degree(r).is_some(), "{g}: {r}");
                }
                let cert = certify_freeness(&alg, budget()).unwrap();
                assert_eq!(cert.frame_determinant, rat(1));
                assert_eq!(cert.reduction_rules, g.dim() * alg.generators().len());
                if f != GroupFamily::GL && f != GroupFamily::SL {
                    let expected = match f {
                        GroupFamily::SOOdd => 2 * n as i64,
                        GroupFamily::Sp => 2 * n as i64 - 1,
                        _ => 2 * n as i64 - 2,
                    };
                    assert_eq!(gm_weight_check(&alg).unwrap(), expected, "{g}");
                } else {
                    assert!(pairing_gram(&alg).is_err());
                }
            }
        }
    }

    #[test]
    fn orientation_signs() {
        let signs: Vec<Rational> = (1..=4)
            .map(|n| build_cover_algebra(tag(GroupFamily::SOEven, n), None).unwrap().orientation.unwrap())
            .collect();
        assert_eq!(signs, vec![rat(1), rat(1), rat(-1), rat(-1)]);
    }

    #[test]
    fn smoothness_table() {
        for n in 1..=3 {
            for f in [GroupFamily::SL, GroupFamily::Sp, GroupFamily::SOEven] {
                let alg = build_cover_algebra(tag(f, n), None).unwrap();
                assert!(jacobian_smoothness(&alg, budget()).unwrap().is_smooth(), "{f} {n}");
            }
            let alg = build_cover_algebra(tag(GroupFamily::SOOdd, n), None).unwrap();
            match jacobian_smoothness(&alg, budget()).unwrap() {
                SmoothnessVerdict::Singular(Some(w)) => {
                    assert_eq!(w["x"], rat(0));
                    assert!(w.values().all(|v| v.is_zero()));
                }
                other => panic!("SO_odd n={n}: {other:?}"),
            }
        }
    }

    #[test]
    fn specialization_requires_every_symbol() {
        let t = VarContext::new(["t"]).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert("a_2".to_string(), MultiPoly::parse(&t, "t").unwrap());
        let g = tag(GroupFamily::Sp, 2);
        assert!(matches!(
            build_cover_algebra(g, Some(&vals)),
            Err(Error::IncompleteSpecialization(s)) if s == "a_4"
        ));
        vals.insert("a_4".to_string(), MultiPoly::parse(&t, "t^3").unwrap());
        let alg = build_cover_algebra(g, Some(&vals)).unwrap();
        assert_eq!(alg.base_ctx(), &t);
        let pg = pairing_gram(&alg).unwrap();
        assert!(pg.gram.det().unwrap().constant_value().is_some());
        assert!(gm_weight_check(&alg).is_err());
    }

    #[test]
    fn multiplicity_free_examples() {
        let c = VarContext::empty();
        let gl2 = tag(GroupFamily::GL, 2);
        let d = |v: &[i64]| PolyMatrix::diagonal(&v.iter().map(|&k| MultiPoly::from_int(&c, k)).collect::<Vec<_>>()).unwrap();
        let t = CommutingTuple::new(gl2, vec![d(&[1, 1]), d(&[2, 3])]).unwrap();
        assert!(is_multiplicity_free(&t).unwrap());
        let t = CommutingTuple::new(gl2, vec![d(&[1, 1]), d(&[1, 1])]).unwrap();
        assert!(!is_multiplicity_free(&t).unwrap());
        let t = CommutingTuple::new(gl2, vec![d(&[1, 2]), d(&[0, 0])]).unwrap();
        assert!(is_multiplicity_free(&t).unwrap());
        // a nontrivial Jordan block is never multiplicity free
        let j = PolyMatrix::parse(&c, &[&["1", "1"], &["0", "1"]]).unwrap();
        let t = CommutingTuple::new(gl2, vec![j.clone(), j]).unwrap();
        assert!(!is_multiplicity_free(&t).unwrap());
    }

    #[test]
    fn grss_examples() {
        let t = VarContext::new(["t"]).unwrap();
        let so3 = tag(GroupFamily::SOOdd, 1);
        let poly = |s: &str| MultiPoly::parse(&t, s).unwrap();
        assert!(grss_check(so3, &[poly("t")]).unwrap().is_grss());
        assert!(!grss_check(so3, &[poly("0")]).unwrap().is_grss());
        assert!(grss_check(so3, &[poly("t^2")]).unwrap().is_grss());
        // x^4 + 2t x^2 + t^2 = (x^2 + t)^2
        let so5 = tag(GroupFamily::SOOdd, 2);
        assert!(!grss_check(so5, &[poly("2*t"), poly("t^2")]).unwrap().is_grss());
        assert!(grss_check(tag(GroupFamily::Sp, 1), &[poly("t")]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn multiplication_is_a_homomorphism(
            fam in prop::sample::select(vec![GroupFamily::SL, GroupFamily::Sp, GroupFamily::SOOdd, GroupFamily::SOEven]),
            n in 1usize..=3,
            f in prop::collection::vec(((0u32..4, 0u32..2), -3i64..=3), 1..4),
            g in prop::collection::vec(((0u32..4, 0u32..2), -3i64..=3), 1..4),
        ) {
            let alg = build_cover_algebra(tag(fam, n), None).unwrap();
            let gens = VarContext::new(alg.generators()).unwrap();
            let mk = |ts: &[((u32, u32), i64)]| {
                let terms = ts.iter().map(|&((i, j), k)| {
                    let e = if gens.len() == 2 { vec![i, j] } else { vec![i + j] };
                    (e, rat(k))
                });
                MultiPoly::from_terms(&gens, terms).unwrap()
            };
            let (f, g) = (mk(&f), mk(&g));
            let mf = alg.multiplication_matrix(&f).unwrap();
            let mg = alg.multiplication_matrix(&g).unwrap();
            let mfg = alg.multiplication_matrix(&(&f * &g)).unwrap();
            prop_assert_eq!(mf.checked_mul(&mg).unwrap(), mfg);
            let sum = alg.multiplication_matrix(&(&f + &g)).unwrap();
            prop_assert_eq!(mf.checked_add(&mg).unwrap(), sum);
        }
    }
}
