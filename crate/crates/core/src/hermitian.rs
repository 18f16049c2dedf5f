//! Hermitian forms `h(x, y) = xᵀ G conj(y)` on `F_{q^2}^n`, where `conj`
//! is the `q`-power Frobenius; unitarity, anti-involutions, isotropy and
//! the induced structure on subquotients `W^⊥/W`.
//!
//! All functions take the level-2 field explicitly. Matrices act on column
//! vectors and subspaces are the echelon-form [`Subspace`] values from
//! [`crate::linalg`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, GaloisField};
use crate::linalg::{coordinates, det, inverse, kernel, Matrix, Subspace};

fn conj_vec(f: &GaloisField, v: &[FieldElem]) -> Vec<FieldElem> {
    v.iter().map(|x| f.frobenius(x, 1)).collect()
}

/// A nondegenerate hermitian space, certified on construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianSpace {
    gram: Matrix,
}

pub fn validate_space(f: &GaloisField, gram: Matrix) -> Result<HermitianSpace> {
    if !gram.is_square() {
        return Err(Error::Dimension(format!(
            "Gram matrix is {}x{}",
            gram.rows(),
            gram.cols()
        )));
    }
    if gram.transpose() != gram.frobenius(f, 1) {
        return Err(Error::NotConjugateSymmetric);
    }
    if det(f, &gram).is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(HermitianSpace { gram })
}

impl HermitianSpace {
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn form(&self, f: &GaloisField, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        let gy = self.gram.mul_vec(f, &conj_vec(f, y));
        x.iter()
            .zip(&gy)
            .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }
}

/// `h(Mx, My) = h(x, y)` for all `x, y`, i.e. `Mᵀ G conj(M) = G`.
pub fn is_unitary(f: &GaloisField, m: &Matrix, v: &HermitianSpace) -> bool {
    m.is_square()
        && m.rows() == v.dim()
        && m.transpose().mul(f, &v.gram).mul(f, &m.frobenius(f, 1)) == v.gram
}

/// `W^⊥ = {y : h(w, y) = 0 for all w ∈ W}`; the form is conjugate-symmetric
/// so left and right complements agree.
pub fn orth_complement(f: &GaloisField, w: &Subspace, v: &HermitianSpace) -> Subspace {
    if w.dim() == 0 {
        return Subspace::full(f, v.dim());
    }
    // h(w, y) = 0  <=>  conj(w)ᵀ conj(G) y = 0
    let rows = w.basis().frobenius(f, 1).mul(f, &v.gram.frobenius(f, 1));
    Subspace::span(f, &kernel(f, &rows))
}

pub fn is_isotropic(f: &GaloisField, w: &Subspace, v: &HermitianSpace) -> bool {
    let b = w.basis();
    (0..w.dim()).all(|i| (0..w.dim()).all(|j| v.form(f, b.row(i), b.row(j)).is_zero()))
}

/// The structure induced on `W^⊥/W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    pub space: HermitianSpace,
    pub map: Matrix,
    /// Coset representatives spanning a complement of `W` in `W^⊥`.
    pub representatives: Matrix,
}

/// Basis of `W^⊥/W`: the echelon basis of `W` extended by the first rows of
/// the echelon basis of `W^⊥` that enlarge the span.
fn complement_rows(f: &GaloisField, w: &Subspace, wp: &Subspace) -> (Matrix, Matrix) {
    let mut full = w.basis().clone();
    let mut reps: Vec<Vec<FieldElem>> = Vec::new();
    for i in 0..wp.dim() {
        let row = wp.basis().row(i).to_vec();
        let cand = full.vstack(&Matrix::from_rows(vec![row.clone()]).unwrap());
        if crate::linalg::rank(f, &cand) > full.rows() {
            full = cand;
            reps.push(row);
        }
    }
    let reps = if reps.is_empty() {
        Matrix::zeros(f, 0, w.ambient())
    } else {
        Matrix::from_rows(reps).unwrap()
    };
    (full, reps)
}

pub fn induced_subquotient(
    f: &GaloisField,
    w: &Subspace,
    v: &HermitianSpace,
    m: &Matrix,
) -> Result<Subquotient> {
    if !w.is_invariant(f, m) {
        return Err(Error::NotInvariant);
    }
    if !is_isotropic(f, w, v) {
        return Err(Error::NotIsotropic);
    }
    let wp = orth_complement(f, w, v);
    let (full, reps) = complement_rows(f, w, &wp);
    let k = reps.rows();
    let gram = Matrix::from_fn(k, k, |a, b| v.form(f, reps.row(a), reps.row(b)));
    let mut map = Matrix::zeros(f, k, k);
    for a in 0..k {
        let image = m.mul_vec(f, reps.row(a));
        let c = coordinates(f, &full, &image).ok_or_else(|| {
            Error::Inconsistency("W^⊥ is not invariant under a unitary map".into())
        })?;
        for b in 0..k {
            map.set(b, a, c[w.dim() + b].clone());
        }
    }
    Ok(Subquotient {
        space: validate_space(f, gram)?,
        map,
        representatives: reps,
    })
}

/// The conjugate-linear map `x ↦ S·conj(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AntiInvolution {
    s: Matrix,
}

impl AntiInvolution {
    /// Wraps `S` without checks; use [`validate_anti_involution`] to certify.
    pub fn from_matrix(s: Matrix) -> Self {
        Self { s }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn apply(&self, f: &GaloisField, x: &[FieldElem]) -> Vec<FieldElem> {
        self.s.mul_vec(f, &conj_vec(f, x))
    }

    pub fn image(&self, f: &GaloisField, w: &Subspace) -> Subspace {
        let vecs: Vec<Vec<FieldElem>> = (0..w.dim())
            .map(|i| self.apply(f, w.basis().row(i)))
            .collect();
        Subspace::from_vectors(f, w.ambient(), &vecs)
    }

    pub fn is_stable(&self, f: &GaloisField, w: &Subspace) -> bool {
        self.image(f, w) == *w
    }
}

/// Checks `τ̄² = 1`, `τ̄ ḡ τ̄ = ḡ^{-1}` and `h(τ̄x, τ̄y) = h(y, x)`.
pub fn validate_anti_involution(
    f: &GaloisField,
    s: Matrix,
    v: &HermitianSpace,
    g: &Matrix,
) -> Result<AntiInvolution> {
    let n = v.dim();
    if s.rows() != n || s.cols() != n || g.rows() != n || g.cols() != n {
        return Err(Error::Dimension(
            "anti-involution size differs from the space".into(),
        ));
    }
    let sc = s.frobenius(f, 1);
    if s.mul(f, &sc) != Matrix::identity(f, n) {
        return Err(Error::NotInvolutive);
    }
    let ginv = inverse(f, g).ok_or(Error::DoesNotInvertG)?;
    if s.mul(f, &g.frobenius(f, 1)).mul(f, &sc) != ginv {
        return Err(Error::DoesNotInvertG);
    }
    if s.transpose().mul(f, v.gram()).mul(f, &sc) != v.gram().transpose() {
        return Err(Error::NotAntiIsometry);
    }
    Ok(AntiInvolution { s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate::star_in;
    use crate::linalg::{charpoly, restriction};

    fn f9() -> GaloisField {
        GaloisField::new(3, vec![1, 0, 1]).unwrap()
    }

    fn hyperbolic(f: &GaloisField) -> HermitianSpace {
        let g = Matrix::from_fn(2, 2, |i, j| if i != j { f.one() } else { f.zero() });
        validate_space(f, g).unwrap()
    }

    fn line(f: &GaloisField, n: usize, k: usize) -> Subspace {
        let v: Vec<FieldElem> = (0..n)
            .map(|i| if i == k { f.one() } else { f.zero() })
            .collect();
        Subspace::from_vectors(f, n, &[v])
    }

    #[test]
    fn validate_examples() {
        let f = f9();
        assert!(validate_space(&f, Matrix::identity(&f, 3)).is_ok());
        let c = f.add(&f.one(), &f.generator());
        let d = Matrix::diagonal(&f, &[f.one(), c]);
        assert_eq!(validate_space(&f, d), Err(Error::NotConjugateSymmetric));
        assert_eq!(
            validate_space(&f, Matrix::zeros(&f, 2, 2)),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn unitary_examples() {
        let f = f9();
        let std = validate_space(&f, Matrix::identity(&f, 2)).unwrap();
        assert!(is_unitary(&f, &Matrix::identity(&f, 2), &std));
        let lam = f.add(&f.one(), &f.generator());
        let partner = f.inv(&f.frobenius(&lam, 1)).unwrap();
        let m = Matrix::diagonal(&f, &[lam.clone(), partner]);
        assert!(is_unitary(&f, &m, &hyperbolic(&f)));
        // 1 + i has order 8 in F_9^×, so its norm is not 1
        assert_ne!(f.pow(&lam, 4), f.one());
        let m = Matrix::diagonal(&f, &[lam, f.one()]);
        assert!(!is_unitary(&f, &m, &std));
    }

    #[test]
    fn orth_complement_examples() {
        let f = f9();
        let v = hyperbolic(&f);
        assert_eq!(
            orth_complement(&f, &Subspace::zero(&f, 2), &v),
            Subspace::full(&f, 2)
        );
        assert_eq!(orth_complement(&f, &Subspace::full(&f, 2), &v).dim(), 0);
        let l = line(&f, 2, 0);
        assert_eq!(orth_complement(&f, &l, &v), l);
        assert!(is_isotropic(&f, &l, &v));
        assert!(is_isotropic(&f, &Subspace::zero(&f, 2), &v));
        assert!(!is_isotropic(&f, &Subspace::full(&f, 2), &v));
    }

    #[test]
    fn double_complement_and_dimension() {
        let f = f9();
        let v = validate_space(&f, Matrix::identity(&f, 3)).unwrap();
        let i = f.generator();
        let w = Subspace::from_vectors(&f, 3, &[vec![f.one(), i, f.from_int(2)]]);
        let wp = orth_complement(&f, &w, &v);
        assert_eq!(wp.dim(), 2);
        assert_eq!(orth_complement(&f, &wp, &v), w);
    }

    #[test]
    fn subquotient_trivial_cases() {
        let f = f9();
        let v = hyperbolic(&f);
        let lam = f.add(&f.one(), &f.generator());
        let m = Matrix::diagonal(&f, &[lam.clone(), f.inv(&f.frobenius(&lam, 1)).unwrap()]);
        let sq = induced_subquotient(&f, &Subspace::zero(&f, 2), &v, &m).unwrap();
        assert_eq!(sq.space, v);
        assert_eq!(sq.map, m);
        let sq = induced_subquotient(&f, &line(&f, 2, 0), &v, &m).unwrap();
        assert_eq!(sq.space.dim(), 0);
        assert_eq!(
            induced_subquotient(&f, &Subspace::full(&f, 2), &v, &m),
            Err(Error::NotIsotropic)
        );
        assert_eq!(
            induced_subquotient(
                &f,
                &line(&f, 2, 0),
                &v,
                &Matrix::from_fn(2, 2, |_, _| f.one())
            ),
            Err(Error::NotInvariant)
        );
    }

    #[test]
    fn subquotient_of_pair_plus_fixed_line() {
        let f = f9();
        let lam = f.add(&f.one(), &f.generator());
        let partner = f.inv(&f.frobenius(&lam, 1)).unwrap();
        let fixed = f.generator(); // norm one
        let m = Matrix::diagonal(&f, &[lam, partner, fixed.clone()]);
        let gram = Matrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) | (1, 0) | (2, 2) => f.one(),
            _ => f.zero(),
        });
        let v = validate_space(&f, gram).unwrap();
        assert!(is_unitary(&f, &m, &v));
        let w = line(&f, 3, 0);
        let sq = induced_subquotient(&f, &w, &v, &m).unwrap();
        assert_eq!(sq.space.dim(), 1);
        assert_eq!(sq.map, Matrix::diagonal(&f, &[fixed]));
        assert!(is_unitary(&f, &sq.map, &sq.space));

        // charpoly(M) = P_W · P_quot · P_{V/W^⊥} with P_W = P_{V/W^⊥}*
        let wp = orth_complement(&f, &w, &v);
        let p_w = charpoly(&f, &restriction(&f, &w, &m).unwrap());
        let p_wp = charpoly(&f, &restriction(&f, &wp, &m).unwrap());
        let p_top = charpoly(&f, &m).div_exact(&f, &p_wp);
        assert_eq!(star_in(&f, &p_top).unwrap(), p_w);
        assert_eq!(p_w.mul(&f, &charpoly(&f, &sq.map)), p_wp);
    }

    #[test]
    fn anti_involution_checks() {
        let f = f9();
        // 1-dim: g = (1), h = (1), tau = conj
        let v = validate_space(&f, Matrix::identity(&f, 1)).unwrap();
        let g = Matrix::identity(&f, 1);
        let tau = validate_anti_involution(&f, Matrix::identity(&f, 1), &v, &g).unwrap();
        let i = f.generator();
        assert_eq!(tau.apply(&f, std::slice::from_ref(&i)), vec![f.neg(&i)]);
        // S = (i): S conj(S) = i * (-i) = 1, fine; but g = (i) is not inverted by conj
        let gi = Matrix::diagonal(&f, std::slice::from_ref(&i));
        assert!(validate_anti_involution(&f, Matrix::identity(&f, 1), &v, &gi).is_ok());
        // (1 + i)(1 - i) = 2 in F_9
        let two = Matrix::diagonal(&f, &[f.add(&f.one(), &i)]);
        assert_eq!(
            validate_anti_involution(&f, two, &v, &g),
            Err(Error::NotInvolutive)
        );
        // hyperbolic plane with the swap anti-involution
        let h = hyperbolic(&f);
        let swap = h.gram().clone();
        let lam = f.add(&f.one(), &f.generator());
        let m = Matrix::diagonal(&f, &[lam.clone(), f.inv(&f.frobenius(&lam, 1)).unwrap()]);
        assert!(validate_anti_involution(&f, swap.clone(), &h, &m).is_ok());
        assert_eq!(
            validate_anti_involution(&f, Matrix::identity(&f, 2), &h, &m),
            Err(Error::DoesNotInvertG)
        );
    }
}
