//! Independent oracles and seeded generators shared by the integration tests.
//!
//! The oracles only use dense rational linear algebra written here
//! (Gaussian elimination, interpolation), never the library's Berkowitz or
//! Pfaffian code, so agreement is a genuine cross-check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hitchin_spectra::algebra::{MultiPoly, PolyMatrix, QMatrix, Rational, VarContext};
use hitchin_spectra::invariants::{
    cartan_element, cayley_transform, invariant_system, lie_algebra_basis, standard_form, GroupFamily, GroupTag,
    InvariantRule,
};
use hitchin_spectra::polarization::SpectralDatum;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub type Dense = Vec<Vec<Rational>>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tag(f: GroupFamily, n: usize) -> GroupTag {
    GroupTag::new(f, n).unwrap()
}

/// Small rational with numerator in `[-r, r]` and denominator in `1..=3`.
pub fn rand_rat(rng: &mut ChaCha8Rng, r: i64) -> Rational {
    qr(rng.gen_range(-r..=r), rng.gen_range(1..=3))
}

pub fn rand_int(rng: &mut ChaCha8Rng, r: i64) -> Rational {
    q(rng.gen_range(-r..=r))
}

pub fn dense(m: &QMatrix) -> Dense {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c).clone()).collect()).collect()
}

pub fn qmat(d: &Dense) -> QMatrix {
    QMatrix::from_rows(d.clone()).unwrap()
}

pub fn dense_of_poly(m: &PolyMatrix) -> Dense {
    dense(&m.to_rational().expect("constant matrix"))
}

pub fn dmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).fold(Rational::zero(), |acc, l| acc + &a[i][l] * &b[l][j])).collect())
        .collect()
}

pub fn dlin(a: &Dense, s: &Rational, b: &Dense, t: &Rational) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * s + y * t).collect())
        .collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

/// Determinant by Gaussian elimination with row pivoting.
pub fn gauss_det(m: &Dense) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = q(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return q(0);
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Solves `a x = b` for square invertible `a`.
pub fn solve(a: &Dense, b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut m: Dense = a.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(v.clone());
        r
    }).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero()).expect("invertible system");
        m.swap(p, col);
        let piv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &piv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &f * &m[col][c];
                    m[r][c] -= v;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n].clone()).collect()
}

/// Coefficients `c_0..c_deg` of the polynomial through `(x_k, y_k)`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let vander: Dense = xs
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(xs.len());
            let mut p = q(1);
            for _ in 0..xs.len() {
                row.push(p.clone());
                p *= x;
            }
            row
        })
        .collect();
    solve(&vander, ys)
}

/// `[a_1, …, a_N]` with `det(λ − M) = λ^N + a_1 λ^{N−1} + … + a_N`, by
/// evaluating the determinant at `N + 1` points and interpolating.
pub fn oracle_char_poly(m: &Dense) -> Vec<Rational> {
    let n = m.len();
    let xs: Vec<Rational> = (0..=n as i64).map(q).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|l| {
            let shifted: Dense = m
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { l - v } else { -v.clone() }).collect())
                .collect();
            gauss_det(&shifted)
        })
        .collect();
    let coeffs = interpolate(&xs, &ys);
    (1..=n).map(|k| coeffs[n - k].clone()).collect()
}

/// Pfaffian of a skew matrix by symmetric Gaussian elimination.
pub fn oracle_pfaffian(m: &Dense) -> Rational {
    let n = m.len();
    assert!(n % 2 == 0, "odd size");
    let mut a = m.clone();
    let mut pf = q(1);
    let mut k = 0;
    while k < n {
        let Some(p) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return q(0);
        };
        if p != k + 1 {
            a.swap(p, k + 1);
            for r in a.iter_mut() {
                r.swap(p, k + 1);
            }
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf *= &piv;
        // clear rows/columns k and k+1 from the rest with congruence moves
        for i in k + 2..n {
            let f = &a[k][i] / &piv;
            let g = &a[k + 1][i] / &piv;
            for j in 0..n {
                let v = &f * &a[k + 1][j] - &g * &a[k][j];
                a[i][j] -= v;
            }
            for j in 0..n {
                let v = &f * &a[j][k + 1] - &g * &a[j][k];
                a[j][i] -= v;
            }
        }
        k += 2;
    }
    pf
}

/// Values of the invariant generators of `group` at a rational Lie-algebra
/// element, via the oracles above.
pub fn oracle_invariants(group: GroupTag, m: &Dense) -> Vec<Rational> {
    let cp = oracle_char_poly(m);
    invariant_system(group)
        .generators
        .iter()
        .map(|g| match g.rule {
            InvariantRule::CharPolyCoeff(k) => cp[k - 1].clone(),
            InvariantRule::Pfaffian => {
                let form = standard_form(group).unwrap();
                let gram = dense_of_poly(form.gram());
                let rho = form.orientation().unwrap().clone();
                oracle_pfaffian(&dmul(&gram, m)) / rho
            }
        })
        .collect()
}

/// Brute-force datum of a d = 2 rational tuple: `c_j(θ¹ + sθ²)` sampled at
/// `e_j + 1` values of `s` and interpolated, giving the `b₁^{e−i} b₂^i`
/// coefficients.
pub fn oracle_datum(group: GroupTag, pair: (&Dense, &Dense)) -> BTreeMap<(usize, Vec<u32>), Rational> {
    let sys = invariant_system(group);
    let max_deg = sys.generators.iter().map(|g| g.degree).max().unwrap();
    let xs: Vec<Rational> = (0..=max_deg as i64).map(q).collect();
    let samples: Vec<Vec<Rational>> = xs
        .iter()
        .map(|s| oracle_invariants(group, &dlin(pair.0, &q(1), pair.1, s)))
        .collect();
    let mut out = BTreeMap::new();
    for (j, g) in sys.generators.iter().enumerate() {
        let e = g.degree as usize;
        let ys: Vec<Rational> = samples[..=e].iter().map(|v| v[j].clone()).collect();
        let c = interpolate(&xs[..=e], &ys);
        for (i, v) in c.into_iter().enumerate() {
            out.insert((j + 1, vec![(e - i) as u32, i as u32]), v);
        }
    }
    out
}

/// Entries of a datum whose values are all constants.
pub fn datum_values(sd: &SpectralDatum) -> BTreeMap<(usize, Vec<u32>), Rational> {
    sd.entries()
        .iter()
        .map(|((j, c), v)| ((*j, c.parts().to_vec()), v.constant_value().unwrap_or_else(|| panic!("non-constant {v}"))))
        .collect()
}

pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Dense {
    loop {
        let m: Dense = (0..n)
            .map(|i| (0..n).map(|j| rand_int(rng, 2) + if i == j { q(1) } else { q(0) }).collect())
            .collect();
        if !gauss_det(&m).is_zero() {
            return m;
        }
    }
}

/// Random element of the Lie algebra: a combination of a few basis vectors.
pub fn random_lie_element(rng: &mut ChaCha8Rng, group: GroupTag, terms: usize) -> Dense {
    let basis = lie_algebra_basis(group);
    let size = group.dim();
    let mut m = vec![vec![q(0); size]; size];
    for _ in 0..terms {
        let b = dense(&basis[rng.gen_range(0..basis.len())]);
        m = dlin(&m, &q(1), &b, &rand_rat(rng, 3));
    }
    m
}

/// An element of G(Q): arbitrary invertible for GL/SL (conjugation preserves
/// sl), a product of two Cayley transforms otherwise.
pub fn random_group_element(rng: &mut ChaCha8Rng, group: GroupTag) -> Dense {
    match group.family() {
        GroupFamily::GL | GroupFamily::SL => random_invertible(rng, group.dim()),
        _ => {
            let mut g = identity(group.dim());
            for _ in 0..2 {
                loop {
                    let x = random_lie_element(rng, group, 3);
                    if let Some(c) = cayley_transform(&qmat(&x)) {
                        g = dmul(&g, &dense(&c));
                        break;
                    }
                }
            }
            g
        }
    }
}

pub fn inverse(m: &Dense) -> Dense {
    dense(&qmat(m).inverse().expect("invertible"))
}

pub fn conjugate(g: &Dense, m: &Dense) -> Dense {
    dmul(&dmul(g, m), &inverse(g))
}

/// A rational point of the Cartan subalgebra with random coordinates.
pub fn random_cartan(rng: &mut ChaCha8Rng, group: GroupTag) -> Dense {
    let names: Vec<String> = (1..=group.n()).map(|i| format!("t_{i}")).collect();
    let ctx = VarContext::new(names.clone()).unwrap();
    let h = cartan_element(group, &ctx, "t").unwrap();
    let empty = VarContext::empty();
    let assign: BTreeMap<String, MultiPoly> = names
        .into_iter()
        .map(|n| (n, MultiPoly::constant(&empty, rand_rat(rng, 4))))
        .collect();
    dense_of_poly(&h.eval(&assign, &empty).unwrap())
}

/// Random commuting pair in the Lie algebra of `group`: conjugated Cartan
/// pairs, and for GL also `(M, αM² + βM + γ)` with `M` arbitrary.
pub fn random_commuting_pair(rng: &mut ChaCha8Rng, group: GroupTag) -> (Dense, Dense) {
    if group.family() == GroupFamily::GL && rng.gen_bool(0.5) {
        let n = group.dim();
        let m: Dense = (0..n).map(|_| (0..n).map(|_| rand_int(rng, 2)).collect()).collect();
        let m2 = dmul(&m, &m);
        let p = dlin(&dlin(&m2, &rand_int(rng, 2), &m, &rand_int(rng, 2)), &q(1), &identity(n), &rand_int(rng, 2));
        return (m, p);
    }
    let g = random_group_element(rng, group);
    let h1 = random_cartan(rng, group);
    let h2 = random_cartan(rng, group);
    (conjugate(&g, &h1), conjugate(&g, &h2))
}

pub fn poly_matrix(d: &Dense) -> PolyMatrix {
    qmat(d).to_poly(&VarContext::empty())
}

/// Univariate polynomials over Q as coefficient vectors, constant term first.
pub fn upoly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn upoly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let b = upoly_trim(b.to_vec());
    let mut r = upoly_trim(a.to_vec());
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let f = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            let v = &f * c;
            r[shift + i] -= v;
        }
        r = upoly_trim(r);
    }
    r
}

pub fn upoly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = upoly_trim(a.to_vec());
    let mut b = upoly_trim(b.to_vec());
    while !b.is_empty() {
        let r = upoly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

pub fn upoly_derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()
}

/// Squarefree over Q iff gcd(p, p′) is constant.
pub fn upoly_squarefree(p: &[Rational]) -> bool {
    upoly_gcd(p, &upoly_derivative(p)).len() <= 1
}

pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).fold(q(0), |a, b| if b > a { b } else { a })
}

pub fn one() -> Rational {
    Rational::one()
}

// Reference atlases and the mutation corpus.

fn frac(num: &str, den: &str) -> Value {
    json!({"num": num, "den": den})
}

/// Two charts on the line with `t ↦ 1/t` style transitions: φ₀ = (1, 1),
/// φ₁ = (1, t), h₀₁ = t, g₀₁ = diag(t, 1).
pub fn reference_fibered() -> Value {
    json!({
        "mode": "fibered-surface",
        "charts": [{"coord": "t"}, {"coord": "t"}],
        "overlaps": [
            {"pair": [0, 1], "h": "t", "g": [["t", "0"], ["0", "1"]], "denominators": ["t"]},
            {"pair": [1, 0], "h": frac("1", "t"), "g": [[frac("1", "t"), "0"], ["0", "1"]], "denominators": ["t"]}
        ],
        "phi": [["1", "1"], ["1", "t"]]
    })
}

/// Surface-morphism atlas: φ₀ = I, φ₁ = [[1, −1/t], [0, 1]],
/// g₀₁ = [[t, 1], [0, 1]], g′₀₁ = diag(t, 1).
pub fn reference_morphism() -> Value {
    json!({
        "mode": "surface-morphism",
        "charts": [{"coord": "t"}, {"coord": "t"}],
        "overlaps": [
            {"pair": [0, 1], "g": [["t", "1"], ["0", "1"]], "g_prime": [["t", "0"], ["0", "1"]], "denominators": ["t"]},
            {"pair": [1, 0], "g": [[frac("1", "t"), frac("-1", "t")], ["0", "1"]],
             "g_prime": [[frac("1", "t"), "0"], ["0", "1"]], "denominators": ["t"]}
        ],
        "phi": [[["1", "0"], ["0", "1"]], [["1", frac("-1", "t")], ["0", "1"]]]
    })
}

pub struct Mutation {
    pub name: &'static str,
    pub atlas: Value,
    pub kind: &'static str,
    pub object: &'static str,
    pub charts: Vec<usize>,
    pub entry: Vec<usize>,
}

fn mutate(base: Value, pointer: &str, v: Value) -> Value {
    let mut out = base;
    *out.pointer_mut(pointer).unwrap_or_else(|| panic!("no {pointer}")) = v;
    out
}

/// Twenty single-entry mutations of the reference atlases, each with the
/// violation it must produce.
pub fn mutation_corpus() -> Vec<Mutation> {
    let f = reference_fibered;
    let m = reference_morphism;
    let mk = |name, atlas, kind, object, entry: &[usize]| Mutation {
        name,
        atlas,
        kind,
        object,
        charts: vec![0, 1],
        entry: entry.to_vec(),
    };
    vec![
        mk("h01 scaled", mutate(f(), "/overlaps/0/h", json!("2*t")), "compatibility", "phi", &[1]),
        mk("g01 (1,1) scaled", mutate(f(), "/overlaps/0/g/0/0", json!("2*t")), "compatibility", "phi", &[1]),
        mk("g01 (2,2) scaled", mutate(f(), "/overlaps/0/g/1/1", json!("2")), "compatibility", "phi", &[2]),
        mk("g01 (1,2) filled", mutate(f(), "/overlaps/0/g/0/1", json!("1")), "compatibility", "phi", &[1]),
        mk("g01 (2,1) filled", mutate(f(), "/overlaps/0/g/1/0", json!("1")), "compatibility", "phi", &[2]),
        mk("phi0 first", mutate(f(), "/phi/0/0", json!("2")), "compatibility", "phi", &[1]),
        mk("phi0 second", mutate(f(), "/phi/0/1", json!("0")), "compatibility", "phi", &[2]),
        mk("phi1 second", mutate(f(), "/phi/1/1", json!("t^2")), "compatibility", "phi", &[2]),
        mk("phi1 first", mutate(f(), "/phi/1/0", json!("-1")), "compatibility", "phi", &[1]),
        mk("h10 scaled", mutate(f(), "/overlaps/1/h", frac("2", "t")), "inverse", "h", &[]),
        mk("g10 (2,2) negated", mutate(f(), "/overlaps/1/g/1/1", json!("-1")), "inverse", "g", &[2, 2]),
        mk("h01 not a unit", mutate(f(), "/overlaps/0/h", json!("t + 1")), "not-invertible", "h", &[]),
        mk("g01 (1,2) cleared", mutate(m(), "/overlaps/0/g/0/1", json!("0")), "compatibility", "phi", &[1, 2]),
        mk("g'01 (1,1) scaled", mutate(m(), "/overlaps/0/g_prime/0/0", json!("2*t")), "compatibility", "phi", &[1, 1]),
        mk("g'01 (2,2) to t", mutate(m(), "/overlaps/0/g_prime/1/1", json!("t")), "compatibility", "phi", &[2, 2]),
        mk("phi1 (1,2) sign", mutate(m(), "/phi/1/0/1", frac("1", "t")), "compatibility", "phi", &[1, 2]),
        mk("phi0 (2,1) filled", mutate(m(), "/phi/0/1/0", json!("1")), "compatibility", "phi", &[2, 1]),
        mk("g10 (1,1) scaled", mutate(m(), "/overlaps/1/g/0/0", frac("2", "t")), "inverse", "g", &[1, 1]),
        mk("g'10 (2,2) scaled", mutate(m(), "/overlaps/1/g_prime/1/1", json!("2")), "inverse", "g_prime", &[2, 2]),
        mk("g'01 not a unit", mutate(m(), "/overlaps/0/g_prime/0/0", json!("t + 1")), "not-invertible", "g_prime", &[]),
    ]
}
