//! Dense matrices over Q[vars] and over Q.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::{MultiPoly, VarContext};
use super::rational::Rational;
use super::AlgebraError;

/// Row-major matrix of polynomials sharing one variable context.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    ctx: VarContext,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        ctx: &VarContext,
        entries: Vec<MultiPoly>,
    ) -> Result<Self, AlgebraError> {
        if rows == 0 || cols == 0 {
            return Err(AlgebraError::Shape("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(AlgebraError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| e.ctx() != ctx) {
            return Err(AlgebraError::ContextMismatch {
                left: ctx.names().to_vec(),
                right: bad.ctx().names().to_vec(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            ctx: ctx.clone(),
            entries,
        })
    }

    /// Builds from rows, embedding all entries into the union of their contexts.
    pub fn from_rows(rows: Vec<Vec<MultiPoly>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        let mut ctx = VarContext::empty();
        for e in rows.iter().flatten() {
            ctx = ctx.union(e.ctx());
        }
        let entries = rows
            .into_iter()
            .flatten()
            .map(|e| e.embed(&ctx))
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::new(r, c, &ctx, entries)
    }

    pub fn from_fn<F>(rows: usize, cols: usize, ctx: &VarContext, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> MultiPoly,
    {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let e = f(r, c);
                assert_eq!(e.ctx(), ctx, "entry context");
                entries.push(e);
            }
        }
        PolyMatrix {
            rows,
            cols,
            ctx: ctx.clone(),
            entries,
        }
    }

    /// Parses each entry with [`MultiPoly::parse`].
    pub fn parse(ctx: &VarContext, rows: &[&[&str]]) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut entries = Vec::new();
        for row in rows {
            if row.len() != c {
                return Err(AlgebraError::Shape("ragged rows".into()));
            }
            for s in row.iter() {
                entries.push(MultiPoly::parse(ctx, s)?);
            }
        }
        PolyMatrix::new(r, c, ctx, entries)
    }

    pub fn zeros(rows: usize, cols: usize, ctx: &VarContext) -> Self {
        Self::from_fn(rows, cols, ctx, |_, _| MultiPoly::zero(ctx))
    }

    pub fn identity(n: usize, ctx: &VarContext) -> Self {
        Self::from_fn(n, n, ctx, |r, c| {
            if r == c {
                MultiPoly::one(ctx)
            } else {
                MultiPoly::zero(ctx)
            }
        })
    }

    pub fn diagonal(diag: &[MultiPoly]) -> Result<Self, AlgebraError> {
        let n = diag.len();
        let mut rows = vec![vec![]; n];
        let ctx = diag
            .iter()
            .fold(VarContext::empty(), |acc, d| acc.union(d.ctx()));
        for (r, row) in rows.iter_mut().enumerate() {
            for c in 0..n {
                row.push(if r == c {
                    diag[r].embed(&ctx)?
                } else {
                    MultiPoly::zero(&ctx)
                });
            }
        }
        PolyMatrix::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: MultiPoly) {
        assert_eq!(v.ctx(), &self.ctx, "entry context");
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[MultiPoly] {
        &self.entries
    }

    pub fn row_vecs(&self) -> Vec<Vec<MultiPoly>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).clone()).collect())
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<MultiPoly> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    pub fn map<F>(&self, f: F) -> Result<PolyMatrix, AlgebraError>
    where
        F: FnMut(&MultiPoly) -> Result<MultiPoly, AlgebraError>,
    {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        let ctx = entries.first().map(|e| e.ctx().clone()).unwrap_or_else(VarContext::empty);
        PolyMatrix::new(self.rows, self.cols, &ctx, entries)
    }

    pub fn embed(&self, ctx: &VarContext) -> Result<PolyMatrix, AlgebraError> {
        if &self.ctx == ctx {
            return Ok(self.clone());
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.embed(ctx))
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::new(self.rows, self.cols, ctx, entries)
    }

    pub fn eval(
        &self,
        assignment: &BTreeMap<String, MultiPoly>,
        target: &VarContext,
    ) -> Result<PolyMatrix, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.eval(assignment, target))
            .collect::<Result<Vec<_>, _>>()?;
        PolyMatrix::new(self.rows, self.cols, target, entries)
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, &self.ctx, |r, c| self.get(c, r).clone())
    }

    fn check_same(&self, other: &PolyMatrix) -> Result<(), AlgebraError> {
        if self.ctx != other.ctx {
            return Err(AlgebraError::ContextMismatch {
                left: self.ctx.names().to_vec(),
                right: other.ctx.names().to_vec(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        self.check_same(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgebraError::Shape("addition of differently shaped matrices".into()));
        }
        Ok(PolyMatrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| {
            self.get(r, c) + other.get(r, c)
        }))
    }

    pub fn checked_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        self.check_same(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgebraError::Shape("subtraction of differently shaped matrices".into()));
        }
        Ok(PolyMatrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| {
            self.get(r, c) - other.get(r, c)
        }))
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(PolyMatrix::from_fn(self.rows, other.cols, &self.ctx, |r, c| {
            let mut acc = MultiPoly::zero(&self.ctx);
            for k in 0..self.cols {
                let a = self.get(r, k);
                let b = other.get(k, c);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        }))
    }

    pub fn scale(&self, s: &MultiPoly) -> Result<PolyMatrix, AlgebraError> {
        self.map(|e| e.checked_mul(s))
    }

    pub fn scale_rational(&self, s: &Rational) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| self.get(r, c).scale(s))
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| -self.get(r, c))
    }

    /// `A·B − B·A`.
    pub fn commutator(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn pow(&self, k: u32) -> Result<PolyMatrix, AlgebraError> {
        self.require_square()?;
        let mut acc = PolyMatrix::identity(self.rows, &self.ctx);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[MultiPoly]) -> Result<Vec<MultiPoly>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Shape("vector length".into()));
        }
        (0..self.rows)
            .map(|r| {
                let mut acc = MultiPoly::zero(&self.ctx);
                for (c, x) in v.iter().enumerate() {
                    acc = acc.checked_add(&self.get(r, c).checked_mul(x)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn trace(&self) -> Result<MultiPoly, AlgebraError> {
        self.require_square()?;
        Ok((0..self.rows).fold(MultiPoly::zero(&self.ctx), |acc, i| &acc + self.get(i, i)))
    }

    fn require_square(&self) -> Result<(), AlgebraError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(AlgebraError::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Coefficients `[a_1, …, a_N]` with
    /// `det(x·Id − M) = x^N + a_1 x^{N−1} + … + a_N`.
    ///
    /// Berkowitz's division-free recursion, so it works over any polynomial ring.
    pub fn char_poly(&self) -> Result<Vec<MultiPoly>, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        let zero = MultiPoly::zero(&self.ctx);
        // coefficient vector of the trailing (n-k)x(n-k) block, leading 1 first
        let mut coeffs: Vec<MultiPoly> = vec![MultiPoly::one(&self.ctx)];
        for k in (0..n).rev() {
            let m = n - k; // size of current block
            let a = self.get(k, k);
            // Toeplitz first column: 1, -a, -R C, -R A1 C, ...
            let mut col = Vec::with_capacity(m + 1);
            col.push(MultiPoly::one(&self.ctx));
            col.push(-a);
            let mut v: Vec<MultiPoly> = (k + 1..n).map(|r| self.get(r, k).clone()).collect();
            for step in 0..m.saturating_sub(1) {
                let mut rc = zero.clone();
                for (j, x) in v.iter().enumerate() {
                    let rj = self.get(k, k + 1 + j);
                    if !rj.is_zero() && !x.is_zero() {
                        rc = &rc + &(rj * x);
                    }
                }
                col.push(-rc);
                if step + 2 < m {
                    let mut nv = Vec::with_capacity(v.len());
                    for r in 0..v.len() {
                        let mut acc = zero.clone();
                        for (j, x) in v.iter().enumerate() {
                            let e = self.get(k + 1 + r, k + 1 + j);
                            if !e.is_zero() && !x.is_zero() {
                                acc = &acc + &(e * x);
                            }
                        }
                        nv.push(acc);
                    }
                    v = nv;
                }
            }
            // new = T * coeffs, T is (m+1) x m lower-triangular Toeplitz
            let mut next = Vec::with_capacity(m + 1);
            for i in 0..=m {
                let mut acc = zero.clone();
                for (j, cj) in coeffs.iter().enumerate() {
                    if i >= j {
                        let t = &col[i - j];
                        if !t.is_zero() && !cj.is_zero() {
                            acc = &acc + &(t * cj);
                        }
                    }
                }
                next.push(acc);
            }
            coeffs = next;
        }
        coeffs.remove(0);
        Ok(coeffs)
    }

    pub fn det(&self) -> Result<MultiPoly, AlgebraError> {
        let cp = self.char_poly()?;
        let last = cp.last().cloned().unwrap_or_else(|| MultiPoly::one(&self.ctx));
        Ok(if self.rows % 2 == 0 { last } else { -last })
    }

    /// Rational matrix when every entry is constant.
    pub fn to_rational(&self) -> Option<QMatrix> {
        let data = self
            .entries
            .iter()
            .map(MultiPoly::constant_value)
            .collect::<Option<Vec<_>>>()?;
        Some(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMatrix({self} in {:?})", self.ctx)
    }
}

/// Dense rational matrix, used for group elements and change-of-basis data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, AlgebraError> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(AlgebraError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        QMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Rational::one();
        }
        QMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape("inner dimensions differ".into()));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                data.push(acc);
            }
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix, AlgebraError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgebraError::Shape("shapes differ".into()));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> QMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        QMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Gauss–Jordan inverse; `None` when singular or non-square.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a.get(col, col).clone();
            for c in 0..n {
                let v = a.get(col, c) / &p;
                a.set(col, c, v);
                let w = inv.get(col, c) / &p;
                inv.set(col, c, w);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                    let w = inv.get(r, c) - &f * inv.get(col, c);
                    inv.set(r, c, w);
                }
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "det of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                }
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col) / &p;
                for c in col..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && !self.det().is_zero()
    }

    pub fn to_poly(&self, ctx: &VarContext) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, ctx, |r, c| {
            MultiPoly::constant(ctx, self.get(r, c).clone())
        })
    }
}
