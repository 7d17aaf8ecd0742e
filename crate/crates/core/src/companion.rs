//! Companion Higgs fields on a single curve chart.
//!
//! Line bundles over one chart are tracked only through their weights: a
//! summand of weight `w` stands for `(Ω¹)^w`, with half-integers standing for
//! powers of a chosen square root of `Ω¹`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraError, MultiPoly, PolyMatrix, Rational, VarContext};
use crate::cover::{build_cover_algebra, pairing_gram, PairingGram};
use crate::error::{Error, Result};
use crate::invariants::{
    evaluate_invariants_with, invariant_system, restriction_polynomials, BilinearFormSpec, GroupFamily, GroupTag,
};

/// The sections `a_i` (or `p_n`) of the group's Hitchin base restricted to one
/// chart with coordinate `coord`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSection {
    group: GroupTag,
    coord: String,
    names: Vec<String>,
    values: Vec<MultiPoly>,
    weights: Vec<u32>,
}

impl ChartSection {
    /// `values` lists the base coordinates in order: `a_1..a_n` (GL),
    /// `a_2..a_{n+1}` (SL), `a_2, a_4, …, a_{2n}` (Sp, SO_odd) or
    /// `a_2, …, a_{2n−2}, p_n` (SO_even). For all groups but SO_even the full
    /// list `a_1..a_N` is also accepted and must vanish where the group has
    /// no invariant.
    pub fn new(group: GroupTag, coord: &str, values: Vec<MultiPoly>) -> Result<Self> {
        let sys = invariant_system(group);
        let n = sys.generators.len();
        let values = if values.len() == n {
            values
        } else if values.len() == group.dim() && group.family() != GroupFamily::SOEven {
            let mut kept = Vec::with_capacity(n);
            let mut by_k = BTreeMap::new();
            for g in &sys.generators {
                if let crate::invariants::InvariantRule::CharPolyCoeff(k) = g.rule {
                    by_k.insert(k, ());
                }
            }
            for (i, v) in values.into_iter().enumerate() {
                if by_k.contains_key(&(i + 1)) {
                    kept.push(v);
                } else if !v.is_zero() {
                    return Err(Error::InvalidSection(format!("a_{} must vanish for {group}", i + 1)));
                }
            }
            kept
        } else {
            return Err(Error::InvalidSection(format!(
                "{group} expects {n} base coordinates, got {}",
                values.len()
            )));
        };
        let mut ctx = VarContext::new([coord])?;
        for v in &values {
            ctx = ctx.union(v.ctx());
        }
        let values = values
            .iter()
            .map(|v| v.embed(&ctx))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(ChartSection {
            group,
            coord: coord.to_string(),
            names: sys.generators.iter().map(|g| g.name.clone()).collect(),
            weights: sys.degrees(),
            values,
        })
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn coord(&self) -> &str {
        &self.coord
    }

    pub fn ctx(&self) -> &VarContext {
        self.values[0].ctx()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[MultiPoly] {
        &self.values
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    fn assignment(&self) -> BTreeMap<String, MultiPoly> {
        self.names.iter().cloned().zip(self.values.iter().cloned()).collect()
    }
}

/// Companion matrix of `x^n + a_1 x^{n−1} + … + a_n`: ones on the subdiagonal
/// and last column `(−a_n, …, −a_1)`.
pub fn companion_matrix(a: &[MultiPoly]) -> Result<PolyMatrix> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidSection("companion matrix needs at least one coefficient".into()));
    }
    let mut ctx = VarContext::empty();
    for v in a {
        ctx = ctx.union(v.ctx());
    }
    let mut m = PolyMatrix::zeros(n, n, &ctx);
    for r in 1..n {
        m.set(r, r - 1, MultiPoly::one(&ctx));
    }
    for (r, v) in a.iter().rev().enumerate() {
        m.set(r, n - 1, -v.embed(&ctx)?);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompanionChecks {
    /// `None` for GL, which is not twisted.
    pub det_weight_zero: Option<bool>,
    /// SL only: the trace of theta vanishes.
    pub trace_vanishes: Option<bool>,
    /// SO and Sp: theta is anti-self-adjoint for the specialized pairing.
    pub anti_self_adjoint: Option<bool>,
    /// Every entry of theta at `(r, s)` has weight `1 + w_r − w_s`.
    pub weights_consistent: bool,
    /// SO_odd: theta kills the kernel vector.
    pub kernel_line: Option<bool>,
}

impl CompanionChecks {
    pub fn passed(&self) -> bool {
        self.weights_consistent
            && [self.det_weight_zero, self.trace_vanishes, self.anti_self_adjoint, self.kernel_line]
                .iter()
                .all(|c| c.unwrap_or(true))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompanionBundle {
    pub group: GroupTag,
    pub theta: PolyMatrix,
    pub summand_weights: Vec<Rational>,
    pub pairing: Option<PairingGram>,
    /// Form used for membership and the Pfaffian (the pairing, oriented).
    pub form: Option<BilinearFormSpec>,
    pub det_weight: Rational,
    /// SO_odd: coordinates of the section of the weight `−n` kernel line.
    pub kernel_vector: Option<Vec<MultiPoly>>,
    pub kernel_weight: Option<Rational>,
    pub checks: CompanionChecks,
}

fn half(k: i64) -> Rational {
    Rational::new(k.into(), 2.into())
}

/// The companion Higgs field of `group` at `a`: the multiplication-by-x
/// matrix of the cover algebra specialized at `a`, with summands twisted so
/// that the determinant is trivial.
pub fn classical_companion(section: &ChartSection) -> Result<CompanionBundle> {
    let group = section.group();
    let n = group.n() as i64;
    let generic = build_cover_algebra(group, None)?;
    let alg = build_cover_algebra(group, Some(&section.assignment()))?;
    let theta = alg.mult_x().clone();

    let shift = match group.family() {
        GroupFamily::GL => Rational::zero(),
        GroupFamily::SL => half(n),
        GroupFamily::SOOdd => Rational::from_integer(n.into()),
        GroupFamily::Sp => half(2 * n - 1),
        GroupFamily::SOEven => Rational::from_integer((n - 1).into()),
    };
    let summand_weights: Vec<Rational> = generic
        .basis_weights()
        .iter()
        .map(|&d| &shift - Rational::from_integer(d.into()))
        .collect();
    let det_weight: Rational = summand_weights.iter().sum();

    let weights_consistent = weight_bookkeeping(&generic, &summand_weights)?;

    let (pairing, form) = match group.family() {
        GroupFamily::GL | GroupFamily::SL => (None, None),
        _ => {
            let g = pairing_gram(&alg)?;
            let form = g.to_form(&generic)?;
            (Some(g), Some(form))
        }
    };
    let anti_self_adjoint = match &pairing {
        Some(g) => Some(
            theta
                .transpose()
                .checked_mul(&g.gram)?
                .checked_add(&g.gram.checked_mul(&theta)?)?
                .is_zero(),
        ),
        None => None,
    };
    let trace_vanishes = match group.family() {
        GroupFamily::SL => Some(theta.trace()?.is_zero()),
        _ => None,
    };
    let (kernel_vector, kernel_weight, kernel_line) = if group.family() == GroupFamily::SOOdd {
        let v = kernel_vector(section)?;
        let ok = theta.apply(&v)?.iter().all(|e| e.is_zero());
        (Some(v), Some(-Rational::from_integer(n.into())), Some(ok))
    } else {
        (None, None, None)
    };
    let checks = CompanionChecks {
        det_weight_zero: if group.is_classical() { Some(det_weight.is_zero()) } else { None },
        trace_vanishes,
        anti_self_adjoint,
        weights_consistent,
        kernel_line,
    };
    Ok(CompanionBundle {
        group,
        theta,
        summand_weights,
        pairing,
        form,
        det_weight,
        kernel_vector,
        kernel_weight,
        checks,
    })
}

/// Substitutes `a_i → s^i a_i` in the generic multiplication matrix and checks
/// that entry `(r, s)` picks up exactly `s^{1 + w_r − w_s}`.
fn weight_bookkeeping(generic: &crate::cover::SpectralAlgebra, weights: &[Rational]) -> Result<bool> {
    let base = generic.base_ctx();
    let s = base.fresh_name("s");
    let ext = base.extended(&[s.clone()])?;
    let sv = MultiPoly::var(&ext, &s)?;
    let mut assignment = BTreeMap::new();
    for (name, w) in generic.base_weights() {
        let scaled = &MultiPoly::var(&ext, &name)? * &sv.pow(w as u32);
        assignment.insert(name, scaled);
    }
    let theta = generic.mult_x();
    for r in 0..theta.rows() {
        for c in 0..theta.cols() {
            let e = theta.get(r, c);
            if e.is_zero() {
                continue;
            }
            let w = Rational::one() + &weights[r] - &weights[c];
            if !w.is_integer() || w.is_negative() {
                return Ok(false);
            }
            let k: u32 = w.to_integer().try_into().map_err(|_| AlgebraError::Shape("weight overflow".into()))?;
            let lhs = e.eval(&assignment, &ext)?;
            let rhs = &sv.pow(k) * &e.embed(&ext)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Coordinates of `x^{2n} + a_2 x^{2n−2} + … + a_{2n}` in the basis
/// `1, x, …, x^{2n}`; multiplying it by `x` gives the defining relation.
fn kernel_vector(section: &ChartSection) -> Result<Vec<MultiPoly>> {
    let n = section.group().n();
    let ctx = section.ctx();
    let mut v = vec![MultiPoly::zero(ctx); 2 * n + 1];
    v[2 * n] = MultiPoly::one(ctx);
    for (i, a) in section.values().iter().enumerate() {
        // a_{2(i+1)} multiplies x^{2n - 2(i+1)}
        v[2 * n - 2 * (i + 1)] = a.clone();
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryMismatch {
    pub name: String,
    pub expected: MultiPoly,
    pub actual: MultiPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub mismatches: Vec<RecoveryMismatch>,
}

impl RecoveryReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that theta has invariants `a`, and that its characteristic
/// polynomial is the one the restriction polynomials predict from `a`.
pub fn verify_spectral_recovery(bundle: &CompanionBundle, section: &ChartSection) -> Result<RecoveryReport> {
    let group = bundle.group;
    let ctx = bundle.theta.ctx().union(section.ctx());
    let theta = bundle.theta.embed(&ctx)?;
    let vals = evaluate_invariants_with(group, &theta, bundle.form.as_ref())?;
    let mut mismatches = Vec::new();
    for ((name, expected), actual) in section.names().iter().zip(section.values()).zip(&vals) {
        let expected = expected.embed(&ctx)?;
        let actual = actual.embed(&ctx)?;
        if expected != actual {
            mismatches.push(RecoveryMismatch {
                name: name.clone(),
                expected,
                actual,
            });
        }
    }
    if group.is_classical() {
        let sys = invariant_system(group);
        let assignment: BTreeMap<String, MultiPoly> = sys
            .symbols()
            .into_iter()
            .zip(section.values().iter().map(|v| v.embed(&ctx)))
            .map(|(k, v)| v.map(|v| (k, v)))
            .collect::<std::result::Result<_, _>>()?;
        let cp = theta.char_poly()?;
        for (k, f) in restriction_polynomials(group)?.iter().enumerate() {
            let expected = f.eval(&assignment, &ctx)?;
            if expected != cp[k] {
                mismatches.push(RecoveryMismatch {
                    name: format!("a_{} of the standard representation", k + 1),
                    expected,
                    actual: cp[k].clone(),
                });
            }
        }
    }
    Ok(RecoveryReport { mismatches })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeReport {
    pub n: u32,
    pub kappa: Rational,
    pub mu: Rational,
    /// `−(2n−1)/2 · κ`.
    pub second_bound: Rational,
    pub nonpositive: bool,
    pub below_second_bound: bool,
}

impl SlopeReport {
    pub fn passed(&self) -> bool {
        self.nonpositive && self.below_second_bound
    }
}

/// Slope of the weight `−n` kernel line for SO_{2n+1}: with
/// `κ = c_1(f^*Ω¹_C)·L`, the line has `μ = −nκ`; both `μ ≤ 0` and
/// `μ ≤ −(2n−1)/2 · κ` must hold.
pub fn slope_inequalities(n: u32, kappa: &Rational) -> Result<SlopeReport> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if kappa.is_negative() {
        return Err(Error::Domain(format!("kappa must be non-negative, got {kappa}")));
    }
    let n_r = Rational::from_integer(n.into());
    let mu = -(&n_r * kappa);
    let second_bound = -(half(2 * n as i64 - 1) * kappa);
    Ok(SlopeReport {
        n,
        kappa: kappa.clone(),
        nonpositive: mu <= Rational::zero(),
        below_second_bound: mu <= second_bound,
        mu,
        second_bound,
    })
}
