//! Buchberger completion and normal forms, sized for small ideals such as
//! Jacobian ideals of spectral-cover presentations.

use std::cmp::Ordering;

use num_traits::One;

use super::poly::{Exponents, MultiPoly, VarContext};
use super::rational::Rational;
use super::AlgebraError;

/// Default cap on the number of pending critical pairs.
pub const DEFAULT_PAIR_BUDGET: usize = 10_000;

/// Environment variable overriding [`DEFAULT_PAIR_BUDGET`].
pub const BUDGET_ENV_VAR: &str = "HITCHIN_SPECTRA_GROEBNER_BUDGET";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    #[default]
    GradedReverseLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GradedReverseLex => {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            // smaller exponent in the last differing variable wins
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

/// Generators of an ideal together with the monomial order used to decide membership.
#[derive(Clone, Debug)]
pub struct IdealPresentation {
    generators: Vec<MultiPoly>,
    order: MonomialOrder,
}

impl IdealPresentation {
    pub fn new(generators: Vec<MultiPoly>, order: MonomialOrder) -> Result<Self, AlgebraError> {
        let first = generators
            .first()
            .ok_or_else(|| AlgebraError::DegenerateInput("ideal needs at least one generator".into()))?;
        if let Some(bad) = generators.iter().find(|g| g.ctx() != first.ctx()) {
            return Err(AlgebraError::ContextMismatch {
                left: first.ctx().names().to_vec(),
                right: bad.ctx().names().to_vec(),
            });
        }
        Ok(IdealPresentation { generators, order })
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn ctx(&self) -> &VarContext {
        self.generators[0].ctx()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerBudget {
    pub max_pending_pairs: usize,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget {
            max_pending_pairs: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl GroebnerBudget {
    /// Reads [`BUDGET_ENV_VAR`], falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(|max_pending_pairs| GroebnerBudget { max_pending_pairs })
            .unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
}

/// Reduced Gröbner basis: monic, inter-reduced, sorted by leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ctx: VarContext,
    order: MonomialOrder,
    polys: Vec<MultiPoly>,
}

fn leading(p: &MultiPoly, order: MonomialOrder) -> Option<(Exponents, Rational)> {
    let mut best: Option<(&Exponents, &Rational)> = None;
    for (e, c) in p.terms() {
        match best {
            Some((b, _)) if order.cmp(e, b) != Ordering::Greater => {}
            _ => best = Some((e, c)),
        }
    }
    best.map(|(e, c)| (e.clone(), c.clone()))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn monic(p: &MultiPoly, order: MonomialOrder) -> MultiPoly {
    match leading(p, order) {
        Some((_, c)) => p.scale(&(Rational::one() / c)),
        None => p.clone(),
    }
}

/// Full reduction of `p` by `basis` (each element with its cached leading term).
fn reduce(p: &MultiPoly, basis: &[(MultiPoly, Exponents, Rational)], order: MonomialOrder) -> MultiPoly {
    let ctx = p.ctx().clone();
    let mut rem = MultiPoly::zero(&ctx);
    let mut cur = p.clone();
    while let Some((e, c)) = leading(&cur, order) {
        let hit = basis.iter().find(|(_, lm, _)| divides(lm, &e));
        match hit {
            Some((g, lm, lc)) => {
                let shift: Exponents = e.iter().zip(lm).map(|(a, b)| a - b).collect();
                let m = MultiPoly::monomial(&ctx, shift, &c / lc);
                cur = &cur - &(&m * g);
            }
            None => {
                let t = MultiPoly::monomial(&ctx, e, c);
                cur = &cur - &t;
                rem = &rem + &t;
            }
        }
    }
    rem
}

fn s_polynomial(f: &(MultiPoly, Exponents, Rational), g: &(MultiPoly, Exponents, Rational)) -> MultiPoly {
    let ctx = f.0.ctx();
    let lcm: Exponents = f.1.iter().zip(&g.1).map(|(a, b)| *a.max(b)).collect();
    let mf: Exponents = lcm.iter().zip(&f.1).map(|(a, b)| a - b).collect();
    let mg: Exponents = lcm.iter().zip(&g.1).map(|(a, b)| a - b).collect();
    let tf = MultiPoly::monomial(ctx, mf, Rational::one() / &f.2);
    let tg = MultiPoly::monomial(ctx, mg, Rational::one() / &g.2);
    &(&tf * &f.0) - &(&tg * &g.0)
}

pub fn groebner_basis(ideal: &IdealPresentation, budget: GroebnerBudget) -> Result<GroebnerBasis, AlgebraError> {
    let order = ideal.order();
    let ctx = ideal.ctx().clone();
    let mut basis: Vec<(MultiPoly, Exponents, Rational)> = Vec::new();
    for g in ideal.generators() {
        if g.is_zero() {
            continue;
        }
        let g = monic(g, order);
        let (e, c) = leading(&g, order).expect("nonzero");
        basis.push((g, e, c));
    }
    let unit = |ctx: &VarContext| GroebnerBasis {
        ctx: ctx.clone(),
        order,
        polys: vec![MultiPoly::one(ctx)],
    };
    if basis.iter().any(|(g, _, _)| g.is_constant()) {
        return Ok(unit(&ctx));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let lcm_degree = |basis: &[(MultiPoly, Exponents, Rational)], (i, j): (usize, usize)| -> u32 {
        basis[i].1.iter().zip(&basis[j].1).map(|(a, b)| *a.max(b)).sum()
    };
    while !pairs.is_empty() {
        if pairs.len() > budget.max_pending_pairs {
            return Err(AlgebraError::ResourceExhausted {
                basis_size: basis.len(),
                pending_pairs: pairs.len(),
            });
        }
        // normal selection strategy
        let (k, _) = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &p)| lcm_degree(&basis, p))
            .expect("non-empty");
        let (i, j) = pairs.swap_remove(k);
        // Buchberger's first criterion: coprime leading monomials reduce to zero
        if basis[i].1.iter().zip(&basis[j].1).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let r = reduce(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(unit(&ctx));
        }
        let r = monic(&r, order);
        let (e, c) = leading(&r, order).expect("nonzero");
        let n = basis.len();
        basis.push((r, e, c));
        for i in 0..n {
            pairs.push((i, n));
        }
    }
    Ok(GroebnerBasis::reduced_from(ctx, order, basis))
}

impl GroebnerBasis {
    fn reduced_from(ctx: VarContext, order: MonomialOrder, basis: Vec<(MultiPoly, Exponents, Rational)>) -> Self {
        // minimal: drop elements whose leading monomial is divisible by another's
        let mut keep: Vec<(MultiPoly, Exponents, Rational)> = Vec::new();
        for (idx, b) in basis.iter().enumerate() {
            let redundant = basis.iter().enumerate().any(|(j, o)| {
                j != idx && divides(&o.1, &b.1) && (o.1 != b.1 || j < idx)
            });
            if !redundant {
                keep.push(b.clone());
            }
        }
        let mut polys = Vec::with_capacity(keep.len());
        for i in 0..keep.len() {
            let others: Vec<_> = keep
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| b.clone())
                .collect();
            let (g, lm, lc) = &keep[i];
            // the leading term survives, so reduce only the tail
            let tail = g - &MultiPoly::monomial(&ctx, lm.clone(), lc.clone());
            let red = &reduce(&tail, &others, order) + &MultiPoly::monomial(&ctx, lm.clone(), lc.clone());
            polys.push(monic(&red, order));
        }
        polys.sort_by(|a, b| {
            let la = leading(a, order).map(|x| x.0).unwrap_or_default();
            let lb = leading(b, order).map(|x| x.0).unwrap_or_default();
            order.cmp(&la, &lb)
        });
        GroebnerBasis { ctx, order, polys }
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    pub fn normal_form(&self, p: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        if p.ctx() != &self.ctx {
            return Err(AlgebraError::ContextMismatch {
                left: self.ctx.names().to_vec(),
                right: p.ctx().names().to_vec(),
            });
        }
        let cached: Vec<_> = self
            .polys
            .iter()
            .map(|g| {
                let (e, c) = leading(g, self.order).expect("basis elements are nonzero");
                (g.clone(), e, c)
            })
            .collect();
        Ok(reduce(p, &cached, self.order))
    }

    pub fn contains(&self, p: &MultiPoly) -> Result<bool, AlgebraError> {
        Ok(self.normal_form(p)?.is_zero())
    }
}

/// Completes `ideal` and reports whether `p` reduces to zero.
pub fn ideal_membership(
    p: &MultiPoly,
    ideal: &IdealPresentation,
    budget: GroebnerBudget,
) -> Result<Membership, AlgebraError> {
    if p.ctx() != ideal.ctx() {
        return Err(AlgebraError::ContextMismatch {
            left: ideal.ctx().names().to_vec(),
            right: p.ctx().names().to_vec(),
        });
    }
    let gb = groebner_basis(ideal, budget)?;
    Ok(if gb.contains(p)? {
        Membership::Member
    } else {
        Membership::NonMember
    })
}
