use num_traits::Zero;

use super::matrix::PolyMatrix;
use super::poly::MultiPoly;
use super::rational::Rational;
use super::AlgebraError;

/// Sylvester matrix of `p` and `q` with respect to `var`, entries in the
/// context of `p` (which must equal that of `q`).
pub fn sylvester_matrix(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<PolyMatrix, AlgebraError> {
    if p.ctx() != q.ctx() {
        return Err(AlgebraError::ContextMismatch {
            left: p.ctx().names().to_vec(),
            right: q.ctx().names().to_vec(),
        });
    }
    let ctx = p.ctx();
    let pc = p.univariate_coefficients(var)?;
    let qc = q.univariate_coefficients(var)?;
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    if (m == 0 && pc[0].is_zero()) || (n == 0 && qc[0].is_zero()) {
        return Err(AlgebraError::DegenerateInput("resultant of the zero polynomial".into()));
    }
    if m + n == 0 {
        return Err(AlgebraError::DegenerateInput(
            "both polynomials are constant in the elimination variable".into(),
        ));
    }
    let size = m + n;
    let lift = |c: &MultiPoly| c.embed(ctx).expect("coefficients embed in the source context");
    let mut s = PolyMatrix::zeros(size, size, ctx);
    // n shifted rows of p, then m shifted rows of q (highest power first)
    for r in 0..n {
        for k in 0..=m {
            s.set(r, r + k, lift(&pc[m - k]));
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s.set(n + r, r + k, lift(&qc[n - k]));
        }
    }
    Ok(s)
}

pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    sylvester_matrix(p, q, var)?.det()
}

/// Discriminant of `p` in `var`, normalized as
/// `(−1)^{m(m−1)/2} · Res(p, ∂p/∂var) / lc(p)` with `m = deg_var p`,
/// so that `disc(x² + b x + c) = b² − 4c`. The result lives in the context
/// of `p` and does not involve `var`.
pub fn discriminant(p: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    let m = p.degree_in(var)?.unwrap_or(0);
    if m == 0 {
        return Err(AlgebraError::DegenerateInput(format!(
            "discriminant needs positive degree in {var}"
        )));
    }
    let dp = p.partial_derivative(var)?;
    let coeffs = p.univariate_coefficients(var)?;
    let lc = coeffs[m as usize].embed(p.ctx())?;
    let res = resultant(p, &dp, var)?;
    let q = res
        .div_exact(&lc)?
        .ok_or_else(|| AlgebraError::DegenerateInput("leading coefficient does not divide resultant".into()))?;
    let sign_exp = (m as u64) * (m as u64 - 1) / 2;
    Ok(if sign_exp % 2 == 0 { q } else { -q })
}

/// Convenience for univariate rational input: `coeffs[k]` multiplies `x^k`.
pub fn univariate_from_rationals(coeffs: &[Rational], var: &str) -> MultiPoly {
    let ctx = super::poly::VarContext::new([var]).expect("single variable");
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (vec![k as u32], c.clone()));
    MultiPoly::from_terms(&ctx, terms).expect("well-formed exponents")
}
