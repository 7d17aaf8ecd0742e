//! Invariant polynomials of GL_N and the classical groups on their standard
//! representations.
//!
//! Generators are coefficients of the characteristic polynomial, plus the
//! Pfaffian for even orthogonal groups. Orthogonal and symplectic groups are
//! realized as the stabilizers of the fixed forms from [`standard_form`].

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraError, MultiPoly, PolyMatrix, QMatrix, Rational, VarContext};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupFamily {
    GL,
    SL,
    SOOdd,
    Sp,
    SOEven,
}

impl GroupFamily {
    pub const ALL: [GroupFamily; 5] = [
        GroupFamily::GL,
        GroupFamily::SL,
        GroupFamily::SOOdd,
        GroupFamily::Sp,
        GroupFamily::SOEven,
    ];

    pub const CLASSICAL: [GroupFamily; 4] = [GroupFamily::SL, GroupFamily::SOOdd, GroupFamily::Sp, GroupFamily::SOEven];

    pub fn name(&self) -> &'static str {
        match self {
            GroupFamily::GL => "GL",
            GroupFamily::SL => "SL",
            GroupFamily::SOOdd => "SO_odd",
            GroupFamily::Sp => "Sp",
            GroupFamily::SOEven => "SO_even",
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupFamily::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidGroup(format!("unknown family {s:?} (expected GL, SL, SO_odd, Sp or SO_even)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupTag {
    family: GroupFamily,
    n: usize,
}

impl GroupTag {
    pub fn new(family: GroupFamily, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("parameter n must be at least 1".into()));
        }
        Ok(GroupTag { family, n })
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension N of the standard representation.
    pub fn dim(&self) -> usize {
        match self.family {
            GroupFamily::GL => self.n,
            GroupFamily::SL => self.n + 1,
            GroupFamily::SOOdd => 2 * self.n + 1,
            GroupFamily::Sp | GroupFamily::SOEven => 2 * self.n,
        }
    }

    /// Number of basic invariants.
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_classical(&self) -> bool {
        self.family != GroupFamily::GL
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.family, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantRule {
    /// Coefficient a_k of det(x - M) = x^N + a_1 x^{N-1} + ... + a_N.
    CharPolyCoeff(usize),
    /// pf(G M) / orientation for the fixed symmetric form G.
    Pfaffian,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantGenerator {
    /// `a_k` or `p_n`.
    pub name: String,
    /// Coordinate symbol `c_j` on the Hitchin base.
    pub symbol: String,
    pub degree: u32,
    pub rule: InvariantRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSystem {
    pub group: GroupTag,
    pub generators: Vec<InvariantGenerator>,
}

impl InvariantSystem {
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn symbols(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.symbol.clone()).collect()
    }

    pub fn symbol_context(&self) -> VarContext {
        VarContext::new(self.symbols()).expect("generator symbols are distinct")
    }
}

pub fn invariant_system(group: GroupTag) -> InvariantSystem {
    let n = group.n();
    let coeff = |j: usize, k: usize| InvariantGenerator {
        name: format!("a_{k}"),
        symbol: format!("c_{j}"),
        degree: k as u32,
        rule: InvariantRule::CharPolyCoeff(k),
    };
    let generators = match group.family() {
        GroupFamily::GL => (1..=n).map(|k| coeff(k, k)).collect(),
        GroupFamily::SL => (1..=n).map(|j| coeff(j, j + 1)).collect(),
        GroupFamily::SOOdd | GroupFamily::Sp => (1..=n).map(|j| coeff(j, 2 * j)).collect(),
        GroupFamily::SOEven => {
            let mut g: Vec<_> = (1..n).map(|j| coeff(j, 2 * j)).collect();
            g.push(InvariantGenerator {
                name: format!("p_{n}"),
                symbol: format!("c_{n}"),
                degree: n as u32,
                rule: InvariantRule::Pfaffian,
            });
            g
        }
    };
    InvariantSystem { group, generators }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Symmetric,
    Alternating,
}

impl FormKind {
    pub fn name(&self) -> &'static str {
        match self {
            FormKind::Symmetric => "symmetric",
            FormKind::Alternating => "alternating",
        }
    }
}

/// A nondegenerate bilinear form `ω(u, v) = uᵀ G v` whose Gram matrix has a
/// nonzero rational determinant. Standard forms are constant; forms coming
/// from spectral covers may have polynomial entries.
///
/// `orientation` is a square root of det G used to normalize the Pfaffian
/// invariant so that `p_n(M)² = det M`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearFormSpec {
    kind: FormKind,
    gram: PolyMatrix,
    orientation: Option<Rational>,
}

impl BilinearFormSpec {
    pub fn new(kind: FormKind, gram: PolyMatrix, orientation: Option<Rational>) -> Result<Self> {
        if !gram.is_square() {
            return Err(AlgebraError::Shape("gram matrix must be square".into()).into());
        }
        let det = gram
            .det()?
            .constant_value()
            .ok_or_else(|| Error::Construction("gram determinant is not a constant".into()))?;
        if det.is_zero() {
            return Err(Error::Construction("gram matrix is singular".into()));
        }
        let t = gram.transpose();
        let ok = match kind {
            FormKind::Symmetric => t == gram,
            FormKind::Alternating => t == gram.neg(),
        };
        if !ok {
            return Err(Error::Construction(format!("gram matrix is not {}", kind.name())));
        }
        if let Some(rho) = &orientation {
            if kind != FormKind::Symmetric || rho * rho != det {
                return Err(Error::Construction("orientation must square to det of a symmetric gram".into()));
            }
        }
        Ok(BilinearFormSpec { kind, gram, orientation })
    }

    pub fn from_rational(kind: FormKind, gram: &QMatrix, orientation: Option<Rational>) -> Result<Self> {
        Self::new(kind, gram.to_poly(&VarContext::empty()), orientation)
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &PolyMatrix {
        &self.gram
    }

    pub fn orientation(&self) -> Option<&Rational> {
        self.orientation.as_ref()
    }

    pub fn size(&self) -> usize {
        self.gram.rows()
    }

    /// The gram matrix and `m` over the union of their contexts.
    fn aligned(&self, m: &PolyMatrix) -> Result<(PolyMatrix, PolyMatrix)> {
        let ctx = m.ctx().union(self.gram.ctx());
        Ok((self.gram.embed(&ctx)?, m.embed(&ctx)?))
    }
}

fn antidiagonal(size: usize) -> QMatrix {
    let mut g = QMatrix::new(size, size, vec![Rational::zero(); size * size]).expect("positive size");
    for i in 0..size {
        g.set(i, size - 1 - i, Rational::one());
    }
    g
}

/// The fixed form preserved by each classical group; `None` for GL and SL.
///
/// Sp uses `[[0, I], [-I, 0]]` and SO_odd the antidiagonal identity. For
/// SO_even with n even the form is antidiagonal; for n odd the two middle
/// coordinates carry an identity block instead, so that det G = 1 and the
/// Pfaffian invariant is rational with `p_n² = det = a_{2n}`.
pub fn standard_form(group: GroupTag) -> Option<BilinearFormSpec> {
    let n = group.n();
    let size = group.dim();
    match group.family() {
        GroupFamily::GL | GroupFamily::SL => None,
        GroupFamily::SOOdd => Some(BilinearFormSpec::from_rational(FormKind::Symmetric, &antidiagonal(size), None).expect("valid")),
        GroupFamily::Sp => {
            let mut g = QMatrix::new(size, size, vec![Rational::zero(); size * size]).expect("positive size");
            for i in 0..n {
                g.set(i, n + i, Rational::one());
                g.set(n + i, i, -Rational::one());
            }
            Some(BilinearFormSpec::from_rational(FormKind::Alternating, &g, None).expect("valid"))
        }
        GroupFamily::SOEven => {
            let mut g = antidiagonal(size);
            if n % 2 == 1 {
                g.set(n - 1, n, Rational::zero());
                g.set(n, n - 1, Rational::zero());
                g.set(n - 1, n - 1, Rational::one());
                g.set(n, n, Rational::one());
            }
            Some(BilinearFormSpec::from_rational(FormKind::Symmetric, &g, Some(Rational::one())).expect("valid"))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipFailure {
    Shape { expected: usize, rows: usize, cols: usize },
    Trace(MultiPoly),
    /// Nonzero entry of `Mᵀ G + G M`.
    Form { row: usize, col: usize, value: MultiPoly },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub group: GroupTag,
    pub failures: Vec<MembershipFailure>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "member of the Lie algebra of {}", self.group);
        }
        let parts: Vec<String> = self
            .failures
            .iter()
            .map(|fl| match fl {
                MembershipFailure::Shape { expected, rows, cols } => {
                    format!("expected {expected}x{expected}, got {rows}x{cols}")
                }
                MembershipFailure::Trace(t) => format!("trace {t}"),
                MembershipFailure::Form { row, col, value } => format!("form entry ({row},{col}) = {value}"),
            })
            .collect();
        write!(f, "not in the Lie algebra of {}: {}", self.group, parts.join("; "))
    }
}

/// Checks `M` against the Lie algebra of `group`, using `form` in place of
/// the standard one when given.
pub fn lie_membership_with(group: GroupTag, m: &PolyMatrix, form: Option<&BilinearFormSpec>) -> Result<MembershipReport> {
    let n = group.dim();
    let mut failures = Vec::new();
    if m.rows() != n || m.cols() != n {
        failures.push(MembershipFailure::Shape {
            expected: n,
            rows: m.rows(),
            cols: m.cols(),
        });
        return Ok(MembershipReport { group, failures });
    }
    match group.family() {
        GroupFamily::GL => {}
        GroupFamily::SL => {
            let t = m.trace()?;
            if !t.is_zero() {
                failures.push(MembershipFailure::Trace(t));
            }
        }
        _ => {
            let std;
            let form = match form {
                Some(f) => f,
                None => {
                    std = standard_form(group).expect("classical form");
                    &std
                }
            };
            if form.size() != n {
                return Err(AlgebraError::Shape(format!("form of size {} for {group}", form.size())).into());
            }
            let (g, m) = form.aligned(m)?;
            let lhs = m.transpose().checked_mul(&g)?.checked_add(&g.checked_mul(&m)?)?;
            for r in 0..n {
                for c in 0..n {
                    let v = lhs.get(r, c);
                    if !v.is_zero() {
                        failures.push(MembershipFailure::Form {
                            row: r,
                            col: c,
                            value: v.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(MembershipReport { group, failures })
}

pub fn lie_membership(group: GroupTag, m: &PolyMatrix) -> Result<MembershipReport> {
    lie_membership_with(group, m, None)
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian(m: &PolyMatrix) -> Result<MultiPoly> {
    let size = m.rows();
    if !m.is_square() || size % 2 == 1 {
        return Err(AlgebraError::Shape(format!("Pfaffian needs even square size, got {}x{}", m.rows(), m.cols())).into());
    }
    let skew = m.transpose().checked_add(m)?;
    if !skew.is_zero() {
        return Err(AlgebraError::Shape("Pfaffian needs a skew-symmetric matrix".into()).into());
    }
    let idx: Vec<usize> = (0..size).collect();
    Ok(pf_rec(m, &idx))
}

fn pf_rec(m: &PolyMatrix, idx: &[usize]) -> MultiPoly {
    if idx.is_empty() {
        return MultiPoly::one(m.ctx());
    }
    let first = idx[0];
    let mut acc = MultiPoly::zero(m.ctx());
    for k in 1..idx.len() {
        let entry = m.get(first, idx[k]);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&i| i != idx[k]).collect();
        let term = entry * &pf_rec(m, &rest);
        if k % 2 == 1 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Values `(c_1(M), …, c_n(M))`, with the Pfaffian taken against `form`
/// when given (SO_even only).
pub fn evaluate_invariants_with(group: GroupTag, m: &PolyMatrix, form: Option<&BilinearFormSpec>) -> Result<Vec<MultiPoly>> {
    let report = lie_membership_with(group, m, form)?;
    if !report.is_member() {
        return Err(Error::NotInLieAlgebra(Box::new(report)));
    }
    let sys = invariant_system(group);
    let cp = m.char_poly()?;
    let mut out = Vec::with_capacity(sys.generators.len());
    for g in &sys.generators {
        match g.rule {
            InvariantRule::CharPolyCoeff(k) => out.push(cp[k - 1].clone()),
            InvariantRule::Pfaffian => {
                let std;
                let form = match form {
                    Some(f) => f,
                    None => {
                        std = standard_form(group).expect("classical form");
                        &std
                    }
                };
                let rho = form
                    .orientation()
                    .ok_or_else(|| Error::Construction("Pfaffian invariant needs an oriented form".into()))?;
                let (g, mm) = form.aligned(m)?;
                let pf = pfaffian(&g.checked_mul(&mm)?)?.scale(&(Rational::one() / rho));
                out.push(pf.embed(m.ctx())?);
            }
        }
    }
    Ok(out)
}

pub fn evaluate_invariants(group: GroupTag, m: &PolyMatrix) -> Result<Vec<MultiPoly>> {
    evaluate_invariants_with(group, m, None)
}

/// `f_1, …, f_N` expressing the characteristic-polynomial coefficients of the
/// standard representation in the symbols `c_1, …, c_n`.
pub fn restriction_polynomials(group: GroupTag) -> Result<Vec<MultiPoly>> {
    if group.family() == GroupFamily::GL {
        return Err(Error::NoRestriction("GL_N is its own standard representation".into()));
    }
    let sys = invariant_system(group);
    let ctx = sys.symbol_context();
    let mut f = vec![MultiPoly::zero(&ctx); group.dim()];
    for g in &sys.generators {
        let c = MultiPoly::var(&ctx, &g.symbol)?;
        match g.rule {
            InvariantRule::CharPolyCoeff(k) => f[k - 1] = c,
            InvariantRule::Pfaffian => f[group.dim() - 1] = c.pow(2),
        }
    }
    Ok(f)
}

/// Symbolic Cartan element in coordinates `t_1, …, t_n`, living in `ctx`
/// (which must contain those symbols).
pub fn cartan_element(group: GroupTag, ctx: &VarContext, stem: &str) -> Result<PolyMatrix> {
    let n = group.n();
    let t = |i: usize| MultiPoly::var(ctx, &format!("{stem}_{i}"));
    let size = group.dim();
    let mut m = PolyMatrix::zeros(size, size, ctx);
    match group.family() {
        GroupFamily::GL => {
            for i in 0..n {
                m.set(i, i, t(i + 1)?);
            }
        }
        GroupFamily::SL => {
            let mut sum = MultiPoly::zero(ctx);
            for i in 0..n {
                let ti = t(i + 1)?;
                sum = &sum + &ti;
                m.set(i, i, ti);
            }
            m.set(n, n, -sum);
        }
        GroupFamily::SOOdd | GroupFamily::Sp | GroupFamily::SOEven => {
            // Sp pairs coordinate i with n + i, the orthogonal forms pair i with size-1-i
            let partner = |i: usize| if group.family() == GroupFamily::Sp { n + i } else { size - 1 - i };
            let odd_even = group.family() == GroupFamily::SOEven && n % 2 == 1;
            let diag_count = if odd_even { n - 1 } else { n };
            for i in 0..diag_count {
                let ti = t(i + 1)?;
                m.set(partner(i), partner(i), -&ti);
                m.set(i, i, ti);
            }
            if odd_even {
                let tn = t(n)?;
                m.set(n - 1, n, tn.clone());
                m.set(n, n - 1, -tn);
            }
        }
    }
    Ok(m)
}

/// Rational basis of the Lie algebra of `group` in its standard representation.
pub fn lie_algebra_basis(group: GroupTag) -> Vec<QMatrix> {
    let size = group.dim();
    let unit = |r: usize, c: usize| {
        let mut e = QMatrix::new(size, size, vec![Rational::zero(); size * size]).expect("positive size");
        e.set(r, c, Rational::one());
        e
    };
    match group.family() {
        GroupFamily::GL => (0..size).flat_map(|r| (0..size).map(move |c| (r, c))).map(|(r, c)| unit(r, c)).collect(),
        GroupFamily::SL => {
            let mut out = Vec::new();
            for r in 0..size {
                for c in 0..size {
                    if r != c {
                        out.push(unit(r, c));
                    }
                }
            }
            for i in 0..size - 1 {
                out.push(unit(i, i).add(&unit(i + 1, i + 1).scale(&-Rational::one())).expect("same shape"));
            }
            out
        }
        _ => {
            // M with G M skew (orthogonal) or symmetric (symplectic)
            let form = standard_form(group).expect("classical form");
            let ginv = form.gram().to_rational().and_then(|g| g.inverse()).expect("constant nondegenerate");
            let sign = match form.kind() {
                FormKind::Symmetric => -Rational::one(),
                FormKind::Alternating => Rational::one(),
            };
            let mut out = Vec::new();
            for r in 0..size {
                let start = if form.kind() == FormKind::Symmetric { r + 1 } else { r };
                for c in start..size {
                    let k = if r == c {
                        unit(r, r)
                    } else {
                        unit(r, c).add(&unit(c, r).scale(&sign)).expect("same shape")
                    };
                    out.push(ginv.mul(&k).expect("same shape"));
                }
            }
            out
        }
    }
}

/// `(I + X)(I − X)⁻¹`, which lies in the group whenever `X` lies in its
/// orthogonal or symplectic Lie algebra. `None` when `I − X` is singular.
pub fn cayley_transform(x: &QMatrix) -> Option<QMatrix> {
    let id = QMatrix::identity(x.rows());
    let plus = id.add(x).ok()?;
    let minus = id.add(&x.scale(&-Rational::one())).ok()?;
    plus.mul(&minus.inverse()?).ok()
}
