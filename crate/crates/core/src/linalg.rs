//! Dense linear algebra over a [`GaloisField`]: characteristic and minimal
//! polynomials, regularity, kernels of polynomial evaluations, and the
//! lattice of invariant subspaces of a cyclic endomorphism.
//!
//! Matrices act on column vectors. Subspaces are stored by their reduced
//! row echelon basis, so two subspaces are equal iff their representatives
//! are equal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conjugate::divisor_enumeration;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::field::{FieldElem, GaloisField};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<FieldElem>>", into = "Vec<Vec<FieldElem>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl TryFrom<Vec<Vec<FieldElem>>> for Matrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<FieldElem>>) -> std::result::Result<Self, String> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<Matrix> for Vec<Vec<FieldElem>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

impl Matrix {
    pub fn zeros(f: &GaloisField, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![f.zero(); rows * cols],
        }
    }

    pub fn identity(f: &GaloisField, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        Self::try_from(rows).map_err(Error::Dimension)
    }

    pub fn from_fn(rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> FieldElem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(f: &GaloisField, diag: &[FieldElem]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { f.zero() })
    }

    /// Companion matrix of a monic polynomial: `e_k ↦ e_{k+1}` and the last
    /// column holds the negated low coefficients, so its basis is the
    /// Krylov basis `e_0, C e_0, ..., C^{d-1} e_0`.
    pub fn companion(f: &GaloisField, poly: &Poly) -> Self {
        let d = poly.deg();
        let mut m = Self::zeros(f, d, d);
        for k in 0..d.saturating_sub(1) {
            m.set(k + 1, k, f.one());
        }
        for k in 0..d {
            m.set(k, d - 1, f.neg(&poly.coeff(f, k)));
        }
        m
    }

    pub fn block_diagonal(f: &GaloisField, blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(f, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(off + i, off + j, b.get(i, j).clone());
                }
            }
            off += b.rows;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, g: impl Fn(&FieldElem) -> FieldElem) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(g).collect(),
        }
    }

    /// Entrywise `x ↦ x^{p^k}`.
    pub fn frobenius(&self, f: &GaloisField, k: usize) -> Self {
        self.map(|x| f.frobenius(x, k))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElem::is_zero)
    }

    pub fn add(&self, f: &GaloisField, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, f: &GaloisField, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, f: &GaloisField, c: &FieldElem) -> Self {
        self.map(|x| f.mul(x, c))
    }

    pub fn mul(&self, f: &GaloisField, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &GaloisField, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    pub fn pow(&self, f: &GaloisField, e: usize) -> Self {
        let mut acc = Self::identity(f, self.rows);
        for _ in 0..e {
            acc = acc.mul(f, self);
        }
        acc
    }

    /// Stacks the rows of `self` above the rows of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref(f: &GaloisField, m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(piv) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, piv);
        let inv = f.inv(a.get(r, c)).unwrap();
        for j in c..a.cols {
            let v = f.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if factor.is_zero() {
                continue;
            }
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(f: &GaloisField, m: &Matrix) -> usize {
    rref(f, m).1.len()
}

/// Basis of `{x : m x = 0}` as the rows of a matrix (one row per free
/// column, in column order).
pub fn kernel(f: &GaloisField, m: &Matrix) -> Matrix {
    let (r, pivots) = rref(f, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(f, free.len(), m.cols);
    for (k, &fc) in free.iter().enumerate() {
        out.set(k, fc, f.one());
        for (pr, &pc) in pivots.iter().enumerate() {
            out.set(k, pc, f.neg(r.get(pr, fc)));
        }
    }
    out
}

pub fn inverse(f: &GaloisField, m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
}

pub fn det(f: &GaloisField, m: &Matrix) -> FieldElem {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
            return f.zero();
        };
        if piv != c {
            a.swap_rows(piv, c);
            d = f.neg(&d);
        }
        let pv = a.get(c, c).clone();
        d = f.mul(&d, &pv);
        let inv = f.inv(&pv).unwrap();
        for i in c + 1..n {
            let factor = f.mul(a.get(i, c), &inv);
            if factor.is_zero() {
                continue;
            }
            for j in c..n {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(c, j)));
                a.set(i, j, v);
            }
        }
    }
    d
}

/// Characteristic polynomial `det(T - M)` by reduction to upper Hessenberg
/// form followed by the standard three-term recurrence.
pub fn charpoly(f: &GaloisField, m: &Matrix) -> Poly {
    assert!(m.is_square(), "charpoly of a non-square matrix");
    let n = m.rows;
    let mut h = m.clone();
    for col in 0..n.saturating_sub(2) {
        let r = col + 1;
        let Some(piv) = (r..n).find(|&i| !h.get(i, col).is_zero()) else {
            continue;
        };
        if piv != r {
            h.swap_rows(piv, r);
            for i in 0..n {
                h.data.swap(i * n + piv, i * n + r);
            }
        }
        let inv = f.inv(h.get(r, col)).unwrap();
        for i in r + 1..n {
            let u = f.mul(h.get(i, col), &inv);
            if u.is_zero() {
                continue;
            }
            // row_i -= u row_r ; col_r += u col_i
            for j in 0..n {
                let v = f.sub(h.get(i, j), &f.mul(&u, h.get(r, j)));
                h.set(i, j, v);
            }
            for k in 0..n {
                let v = f.add(h.get(k, r), &f.mul(&u, h.get(k, i)));
                h.set(k, r, v);
            }
        }
    }
    // p_0 = 1; p_k = (T - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
    // (1-indexed; below everything is shifted to 0-indexed storage)
    let x = Poly::x(f);
    let mut ps: Vec<Poly> = vec![Poly::one(f)];
    for k in 0..n {
        let mut pk = x
            .sub(f, &Poly::constant(h.get(k, k).clone()))
            .mul(f, &ps[k]);
        let mut prod = f.one();
        for i in (0..k).rev() {
            prod = f.mul(&prod, h.get(i + 1, i));
            if prod.is_zero() {
                break;
            }
            let coef = f.mul(h.get(i, k), &prod);
            pk = pk.sub(f, &ps[i].scale(f, &coef));
        }
        ps.push(pk);
    }
    ps.pop().unwrap()
}

/// Minimal polynomial from the first linear dependency among
/// `I, M, M^2, ...` viewed as vectors of length `n^2`.
pub fn minpoly(f: &GaloisField, m: &Matrix) -> Poly {
    let n = m.rows;
    let mut powers: Vec<Matrix> = vec![Matrix::identity(f, n)];
    loop {
        let k = powers.len();
        let next = powers[k - 1].mul(f, m);
        // columns = vectorized powers I..M^{k-1}, M^k
        let mut sys = Matrix::zeros(f, n * n, k + 1);
        for (c, pw) in powers.iter().chain(std::iter::once(&next)).enumerate() {
            for (r, v) in pw.entries().iter().enumerate() {
                sys.set(r, c, v.clone());
            }
        }
        let ker = kernel(f, &sys);
        if ker.rows() > 0 {
            // a dependency involving M^k: normalize the M^k coefficient to 1
            let row = ker.row(ker.rows() - 1);
            let lead = row[k].clone();
            let inv = f
                .inv(&lead)
                .expect("first dependency must involve the top power");
            return Poly::new(row.iter().map(|c| f.mul(c, &inv)).collect());
        }
        powers.push(next);
    }
}

fn krylov_rank(f: &GaloisField, m: &Matrix, v: &[FieldElem]) -> usize {
    let n = m.rows;
    let mut rows = Vec::with_capacity(n);
    let mut cur = v.to_vec();
    for _ in 0..n {
        rows.push(cur.clone());
        cur = m.mul_vec(f, &cur);
    }
    rank(f, &Matrix::from_rows(rows).unwrap())
}

/// Whether the minimal polynomial equals the characteristic polynomial.
/// Tries seeded random Krylov vectors first and falls back to the full
/// minimal polynomial, so there are no false negatives.
pub fn is_regular(f: &GaloisField, m: &Matrix) -> bool {
    assert!(m.is_square());
    let n = m.rows;
    if n == 0 {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3 {
        let v: Vec<FieldElem> = (0..n).map(|_| f.random(&mut rng)).collect();
        if krylov_rank(f, m, &v) == n {
            return true;
        }
    }
    minpoly(f, m).deg() == n
}

/// `Q(M)` by Horner's rule.
pub fn eval_poly(f: &GaloisField, m: &Matrix, q: &Poly) -> Matrix {
    let n = m.rows;
    let mut acc = Matrix::zeros(f, n, n);
    for c in q.coeffs().iter().rev() {
        acc = acc.mul(f, m).add(f, &Matrix::identity(f, n).scale(f, c));
    }
    acc
}

/// A subspace of `F^n`, represented canonically by its reduced row echelon
/// basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(f: &GaloisField, n: usize) -> Self {
        Self {
            ambient: n,
            basis: Matrix::zeros(f, 0, n),
        }
    }

    pub fn full(f: &GaloisField, n: usize) -> Self {
        Self {
            ambient: n,
            basis: Matrix::identity(f, n),
        }
    }

    /// Span of the rows of `vectors`.
    pub fn span(f: &GaloisField, vectors: &Matrix) -> Self {
        let n = vectors.cols();
        let (r, pivots) = rref(f, vectors);
        let basis = Matrix::from_fn(pivots.len(), n, |i, j| r.get(i, j).clone());
        Self { ambient: n, basis }
    }

    pub fn from_vectors(f: &GaloisField, n: usize, vectors: &[Vec<FieldElem>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(f, n);
        }
        Self::span(f, &Matrix::from_rows(vectors.to_vec()).unwrap())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains(&self, f: &GaloisField, v: &[FieldElem]) -> bool {
        let row = Matrix::from_rows(vec![v.to_vec()]).unwrap();
        rank(f, &self.basis.vstack(&row)) == self.dim()
    }

    pub fn is_subspace_of(&self, f: &GaloisField, other: &Self) -> bool {
        (0..self.dim()).all(|i| other.contains(f, self.basis.row(i)))
    }

    pub fn sum(&self, f: &GaloisField, other: &Self) -> Self {
        Self::span(f, &self.basis.vstack(&other.basis))
    }

    pub fn intersection(&self, f: &GaloisField, other: &Self) -> Self {
        let (k, l) = (self.dim(), other.dim());
        if k == 0 || l == 0 {
            return Self::zero(f, self.ambient);
        }
        // solve sum a_i u_i - sum b_j w_j = 0
        let n = self.ambient;
        let sys = Matrix::from_fn(n, k + l, |r, c| {
            if c < k {
                self.basis.get(c, r).clone()
            } else {
                f.neg(other.basis.get(c - k, r))
            }
        });
        let ker = kernel(f, &sys);
        let vecs: Vec<Vec<FieldElem>> = (0..ker.rows())
            .map(|i| {
                let coeffs = &ker.row(i)[..k];
                (0..n)
                    .map(|j| {
                        coeffs.iter().enumerate().fold(f.zero(), |acc, (a, c)| {
                            f.add(&acc, &f.mul(c, self.basis.get(a, j)))
                        })
                    })
                    .collect()
            })
            .collect();
        Self::from_vectors(f, n, &vecs)
    }

    /// Image under a matrix acting on column vectors.
    pub fn image(&self, f: &GaloisField, m: &Matrix) -> Self {
        let vecs: Vec<Vec<FieldElem>> = (0..self.dim())
            .map(|i| m.mul_vec(f, self.basis.row(i)))
            .collect();
        Self::from_vectors(f, self.ambient, &vecs)
    }

    pub fn is_invariant(&self, f: &GaloisField, m: &Matrix) -> bool {
        (0..self.dim()).all(|i| self.contains(f, &m.mul_vec(f, self.basis.row(i))))
    }
}

/// Coordinates `c` with `v = Σ c_i basis_i` (basis given as independent
/// rows), or `None` if `v` is outside their span.
pub fn coordinates(f: &GaloisField, basis: &Matrix, v: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let k = basis.rows();
    let n = basis.cols();
    let aug = Matrix::from_fn(n, k + 1, |r, c| {
        if c < k {
            basis.get(c, r).clone()
        } else {
            v[r].clone()
        }
    });
    let (red, pivots) = rref(f, &aug);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut out = vec![f.zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        out[pc] = red.get(row, k).clone();
    }
    Some(out)
}

/// Matrix of `M` restricted to an invariant subspace, in the subspace's
/// echelon basis.
pub fn restriction(f: &GaloisField, w: &Subspace, m: &Matrix) -> Result<Matrix> {
    let k = w.dim();
    let mut out = Matrix::zeros(f, k, k);
    for a in 0..k {
        let image = m.mul_vec(f, w.basis().row(a));
        let c = coordinates(f, w.basis(), &image).ok_or(Error::NotInvariant)?;
        for (b, x) in c.into_iter().enumerate() {
            out.set(b, a, x);
        }
    }
    Ok(out)
}

/// Null space of `Q(M)`.
pub fn kernel_of_poly(f: &GaloisField, m: &Matrix, q: &Poly) -> Subspace {
    Subspace::span(f, &kernel(f, &eval_poly(f, m, q)))
}

/// For regular `M` with `charpoly(M) = ∏ P_i^{a_i}`, the invariant subspace
/// `Ker ∏ P_i^{m_i}(M)` for every divisor exponent vector, in lexicographic
/// order of the vectors.
pub fn invariant_subspaces(
    f: &GaloisField,
    m: &Matrix,
    factors: &[Factor],
) -> Result<Vec<(Vec<usize>, Subspace)>> {
    if !is_regular(f, m) {
        return Err(Error::NotRegular);
    }
    let total: usize = factors.iter().map(|x| x.exponent * x.degree()).sum();
    if total != m.rows() {
        return Err(Error::Dimension(format!(
            "factorization has degree {total}, matrix has size {}",
            m.rows()
        )));
    }
    // kernels of prime powers, then sums
    let prime_powers: Vec<Vec<Subspace>> = factors
        .iter()
        .map(|x| {
            (0..=x.exponent)
                .map(|k| kernel_of_poly(f, m, &x.poly.pow(f, k)))
                .collect()
        })
        .collect();
    Ok(divisor_enumeration(factors)
        .into_iter()
        .map(|mv| {
            let w = mv
                .iter()
                .enumerate()
                .fold(Subspace::zero(f, m.rows()), |acc, (i, &k)| {
                    acc.sum(f, &prime_powers[i][k])
                });
            (mv, w)
        })
        .collect())
}

/// Every invariant subspace of `M`, found by enumerating all subspaces of
/// `F^n` via their reduced echelon forms. Guarded to `n <= 4` over fields
/// of order at most 9.
pub fn naive_subspace_scan(f: &GaloisField, m: &Matrix) -> Result<Vec<Subspace>> {
    let n = m.rows();
    if n > 4 || f.order() > 9 {
        return Err(Error::ScanGuard {
            dim: n,
            order: f.order(),
        });
    }
    let elems: Vec<FieldElem> = f.elements().collect();
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in combinations(n, k) {
            // free positions: row i, column j > pivots[i], j not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| {
                    let pv = &pivots;
                    (pv[i] + 1..n)
                        .filter(move |j| !pv.contains(j))
                        .map(move |j| (i, j))
                })
                .collect();
            let count = (elems.len() as u64).pow(free.len() as u32);
            for code in 0..count {
                let mut b = Matrix::zeros(f, k, n);
                for (i, &pc) in pivots.iter().enumerate() {
                    b.set(i, pc, f.one());
                }
                let mut c = code;
                for &(i, j) in &free {
                    b.set(i, j, elems[(c % elems.len() as u64) as usize].clone());
                    c /= elems.len() as u64;
                }
                let w = Subspace {
                    ambient: n,
                    basis: b,
                };
                if w.is_invariant(f, m) {
                    out.push(w);
                }
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in combinations(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factorize;
    use rand::Rng;

    fn f9() -> GaloisField {
        GaloisField::new(3, vec![1, 0, 1]).unwrap()
    }

    fn jordan(f: &GaloisField, lambda: &FieldElem, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                lambda.clone()
            } else if j == i + 1 {
                f.one()
            } else {
                f.zero()
            }
        })
    }

    /// Independent oracle: Leibniz expansion of det(T - M) with polynomial
    /// entries.
    fn leibniz_charpoly(f: &GaloisField, m: &Matrix) -> Poly {
        let n = m.rows();
        let entry = |i: usize, j: usize| {
            let c = Poly::constant(f.neg(m.get(i, j)));
            if i == j {
                c.add(f, &Poly::x(f))
            } else {
                c
            }
        };
        let mut total = Poly::zero();
        for perm in permutations(n) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let mut term = Poly::one(f);
            for (i, &pi) in perm.iter().enumerate() {
                term = term.mul(f, &entry(i, pi));
            }
            total = if inversions % 2 == 0 {
                total.add(f, &term)
            } else {
                total.sub(f, &term)
            };
        }
        total
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn random_matrix(f: &GaloisField, n: usize, rng: &mut impl Rng) -> Matrix {
        Matrix::from_fn(n, n, |_, _| f.random(rng))
    }

    #[test]
    fn charpoly_examples() {
        let f = f9();
        let id = Matrix::identity(&f, 3);
        assert_eq!(charpoly(&f, &id), Poly::linear(&f, &f.one()).pow(&f, 3));
        let i = f.generator();
        let d = Matrix::diagonal(&f, &[i.clone(), f.neg(&i)]);
        assert_eq!(
            charpoly(&f, &d),
            Poly::new(vec![f.one(), f.zero(), f.one()])
        );
        let q = Poly::new(vec![f.from_int(2), i.clone(), f.zero(), f.one()]);
        assert_eq!(charpoly(&f, &Matrix::companion(&f, &q)), q);
    }

    #[test]
    fn charpoly_matches_leibniz_oracle() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=4 {
            for _ in 0..15 {
                let m = random_matrix(&f, n, &mut rng);
                assert_eq!(charpoly(&f, &m), leibniz_charpoly(&f, &m));
            }
        }
    }

    #[test]
    fn cayley_hamilton_and_det() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let m = random_matrix(&f, n, &mut rng);
            let cp = charpoly(&f, &m);
            assert!(eval_poly(&f, &m, &cp).is_zero());
            let sign = if n % 2 == 0 { f.one() } else { f.from_int(-1) };
            assert_eq!(det(&f, &m), f.mul(&sign, &cp.coeff(&f, 0)));
        }
    }

    #[test]
    fn regularity() {
        let f = f9();
        assert!(!is_regular(&f, &Matrix::identity(&f, 2)));
        let q = Poly::new(vec![f.one(), f.one(), f.zero(), f.one()]);
        assert!(is_regular(&f, &Matrix::companion(&f, &q)));
        assert!(is_regular(&f, &jordan(&f, &f.generator(), 3)));
        // diag(1, 1, 2) is not regular; diag(1, 2, i) is
        let d = Matrix::diagonal(&f, &[f.one(), f.one(), f.from_int(2)]);
        assert!(!is_regular(&f, &d));
        assert_eq!(minpoly(&f, &d).deg(), 2);
        let d = Matrix::diagonal(&f, &[f.one(), f.from_int(2), f.generator()]);
        assert!(is_regular(&f, &d));
    }

    #[test]
    fn kernel_of_poly_examples() {
        let f = f9();
        let lam = f.generator();
        let j = jordan(&f, &lam, 3);
        assert_eq!(kernel_of_poly(&f, &j, &Poly::one(&f)).dim(), 0);
        assert_eq!(
            kernel_of_poly(&f, &j, &charpoly(&f, &j)),
            Subspace::full(&f, 3)
        );
        let k2 = kernel_of_poly(&f, &j, &Poly::linear(&f, &lam).pow(&f, 2));
        let e12 = Subspace::from_vectors(
            &f,
            3,
            &[
                vec![f.one(), f.zero(), f.zero()],
                vec![f.zero(), f.one(), f.zero()],
            ],
        );
        assert_eq!(k2, e12);
    }

    #[test]
    fn inverse_round_trip() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_matrix(&f, 4, &mut rng);
        match inverse(&f, &m) {
            Some(mi) => assert_eq!(m.mul(&f, &mi), Matrix::identity(&f, 4)),
            None => assert!(det(&f, &m).is_zero()),
        }
        assert!(inverse(&f, &Matrix::zeros(&f, 2, 2)).is_none());
    }

    #[test]
    fn jordan_chain_lattice() {
        let f = f9();
        let lam = f.one();
        let j = jordan(&f, &lam, 3);
        let fs = factorize(&f, &charpoly(&f, &j), &mut ChaCha8Rng::seed_from_u64(0));
        let subs = invariant_subspaces(&f, &j, &fs).unwrap();
        let dims: Vec<usize> = subs.iter().map(|(_, w)| w.dim()).collect();
        assert_eq!(dims, vec![0, 1, 2, 3]);
    }

    #[test]
    fn three_eigenvalues_give_eight() {
        let f = f9();
        let d = Matrix::diagonal(&f, &[f.one(), f.from_int(2), f.generator()]);
        let fs = factorize(&f, &charpoly(&f, &d), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(invariant_subspaces(&f, &d, &fs).unwrap().len(), 8);
    }

    #[test]
    fn invariant_subspaces_requires_regular() {
        let f = f9();
        let id = Matrix::identity(&f, 2);
        let fs = factorize(&f, &charpoly(&f, &id), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(invariant_subspaces(&f, &id, &fs), Err(Error::NotRegular));
    }

    #[test]
    fn naive_scan_examples() {
        let f = f9();
        assert_eq!(
            naive_subspace_scan(&f, &Matrix::identity(&f, 1))
                .unwrap()
                .len(),
            2
        );
        // 0, V and the q^2 + 1 = 10 lines of F_9^2
        assert_eq!(
            naive_subspace_scan(&f, &Matrix::identity(&f, 2))
                .unwrap()
                .len(),
            12
        );
        // T^2 + T + 2 has no root in F_9? use an irreducible quadratic over F_9
        let irr = f
            .elements()
            .find_map(|c| {
                let q = Poly::new(vec![c, f.one(), f.one()]);
                crate::factor::is_irreducible(&f, &q).then_some(q)
            })
            .unwrap();
        let m = Matrix::companion(&f, &irr);
        assert_eq!(naive_subspace_scan(&f, &m).unwrap().len(), 2);
        assert!(matches!(
            naive_subspace_scan(&f, &Matrix::identity(&f, 5)),
            Err(Error::ScanGuard { .. })
        ));
    }

    #[test]
    fn all_subspaces_count_matches_gaussian_binomials() {
        // the zero matrix leaves every subspace invariant
        let f = f9();
        let total = naive_subspace_scan(&f, &Matrix::zeros(&f, 3, 3))
            .unwrap()
            .len();
        // [3,0] + [3,1] + [3,2] + [3,3] over q^2 = 9: 1 + 91 + 91 + 1
        assert_eq!(total, 184);
    }

    #[test]
    fn lattice_morphism_for_gcd_and_lcm() {
        let f = f9();
        let lam = f.generator();
        let mu = f.from_int(2);
        let m = Matrix::block_diagonal(&f, &[jordan(&f, &lam, 2), jordan(&f, &mu, 2)]);
        let a = Poly::linear(&f, &lam)
            .pow(&f, 2)
            .mul(&f, &Poly::linear(&f, &mu));
        let b = Poly::linear(&f, &lam).mul(&f, &Poly::linear(&f, &mu).pow(&f, 2));
        let ka = kernel_of_poly(&f, &m, &a);
        let kb = kernel_of_poly(&f, &m, &b);
        assert_eq!(kernel_of_poly(&f, &m, &a.lcm(&f, &b)), ka.sum(&f, &kb));
        assert_eq!(
            kernel_of_poly(&f, &m, &a.gcd(&f, &b)),
            ka.intersection(&f, &kb)
        );
    }
}
