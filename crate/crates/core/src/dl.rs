//! Fixed points of a regular elliptic unitary `s` on the Coxeter-type
//! Deligne–Lusztig variety of an odd-dimensional hermitian space, counted
//! by enumerating the eigenlines of `s` over `F_{q^{2t}}`.
//!
//! A line `ℓ` lies in the variety iff `h̃(ℓ, τ^i ℓ) = 0` for `i < d` and
//! `h̃(ℓ, τ^d ℓ) ≠ 0`, where `t = 2d + 1`, `τ` is the coordinatewise
//! `q^2`-Frobenius and `h̃` the sesquilinear extension of `h`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factorize, is_irreducible, roots};
use crate::field::{FieldElem, GaloisField};
use crate::hermitian::HermitianSpace;
use crate::linalg::{charpoly, is_regular, kernel, kernel_of_poly, minpoly, Matrix};
use crate::tower::FieldTower;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenlineRecord {
    pub eigenvalue: FieldElem,
    /// Eigenvector over `F_{q^{2t}}`, first nonzero entry equal to 1.
    pub vector: Vec<FieldElem>,
    /// `h̃(v, τ^i v)` for `i = 0..=d`.
    pub chain_values: Vec<FieldElem>,
}

impl EigenlineRecord {
    pub fn satisfies_chain(&self) -> bool {
        let d = self.chain_values.len() - 1;
        self.chain_values[..d].iter().all(FieldElem::is_zero) && !self.chain_values[d].is_zero()
    }
}

fn normalize(f: &GaloisField, v: &[FieldElem]) -> Vec<FieldElem> {
    let lead = v
        .iter()
        .find(|x| !x.is_zero())
        .expect("zero vector has no line");
    let inv = f.inv(lead).unwrap();
    v.iter().map(|x| f.mul(x, &inv)).collect()
}

/// `h̃(x, y) = Σ x_a conj(y_b) G_ab` with `G` embedded at the level of `x`.
pub fn extended_form(
    tower: &FieldTower,
    gram: &Matrix,
    x: &[FieldElem],
    y: &[FieldElem],
) -> Result<FieldElem> {
    let level = x.first().map_or(2, FieldElem::level);
    let big = tower.level(level)?;
    let mut acc = big.zero();
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            let gab = tower.embed(gram.get(a, b), level)?;
            acc = big.add(&acc, &big.mul(&big.mul(xa, &big.frobenius(yb, 1)), &gab));
        }
    }
    Ok(acc)
}

fn tau_vec(f: &GaloisField, v: &[FieldElem]) -> Vec<FieldElem> {
    v.iter().map(|x| f.frobenius(x, 2)).collect()
}

fn chain(tower: &FieldTower, gram: &Matrix, v: &[FieldElem], d: usize) -> Result<Vec<FieldElem>> {
    let big = tower.level(v[0].level())?;
    let mut out = Vec::with_capacity(d + 1);
    let mut w = v.to_vec();
    for _ in 0..=d {
        out.push(extended_form(tower, gram, v, &w)?);
        w = tau_vec(big, &w);
    }
    Ok(out)
}

/// All `t` eigenlines of `s` with their chain values, in Frobenius-orbit
/// order starting from the smallest root.
pub fn eigenlines(
    tower: &FieldTower,
    space: &HermitianSpace,
    s: &Matrix,
    seed: u64,
) -> Result<Vec<EigenlineRecord>> {
    let f = tower.base();
    let t = space.dim();
    if t.is_multiple_of(2) || s.rows() != t {
        return Err(Error::Precondition(format!(
            "eigenline enumeration needs odd dimension matching s, got {t}"
        )));
    }
    let cp = charpoly(f, s);
    if !is_irreducible(f, &cp) {
        return Err(Error::ReducibleCharpoly);
    }
    let level = 2 * t;
    let big = tower.level(level)?;
    let cp_big = tower.embed_poly(&cp, level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_roots = roots(big, &cp_big, &mut rng);
    let first = all_roots.first().ok_or(Error::BrokenTower(level))?;
    let orbit: Vec<FieldElem> = (0..t).map(|k| big.frobenius(first, 2 * k)).collect();
    let mut sorted = orbit.clone();
    sorted.sort_by_key(|r| r.encode(big.p()));
    if sorted != all_roots {
        return Err(Error::Inconsistency(
            "roots of an irreducible charpoly do not form one Frobenius orbit".into(),
        ));
    }
    let s_big = s.map(|x| tower.embed(x, level).expect("entries live in F_{q^2}"));
    let d = (t - 1) / 2;
    orbit
        .into_iter()
        .map(|lam| {
            let shifted = Matrix::from_fn(t, t, |i, j| {
                if i == j {
                    big.sub(s_big.get(i, j), &lam)
                } else {
                    s_big.get(i, j).clone()
                }
            });
            let ker = kernel(big, &shifted);
            if ker.rows() != 1 {
                return Err(Error::Inconsistency(format!(
                    "eigenspace of dimension {} for a simple eigenvalue",
                    ker.rows()
                )));
            }
            let vector = normalize(big, ker.row(0));
            let chain_values = chain(tower, space.gram(), &vector, d)?;
            Ok(EigenlineRecord {
                eigenvalue: lam,
                vector,
                chain_values,
            })
        })
        .collect()
}

/// The eigenlines of `s` that lie on the variety. For regular elliptic `s`
/// this is every eigenline, so the count equals `t`.
pub fn dl_fixed_points(
    tower: &FieldTower,
    space: &HermitianSpace,
    s: &Matrix,
    seed: u64,
) -> Result<Vec<EigenlineRecord>> {
    Ok(eigenlines(tower, space, s, seed)?
        .into_iter()
        .filter(EigenlineRecord::satisfies_chain)
        .collect())
}

/// Whether `τ` permutes the record lines in a single cycle through all of
/// them.
pub fn galois_orbit_check(tower: &FieldTower, records: &[EigenlineRecord]) -> bool {
    let Some(first) = records.first() else {
        return false;
    };
    let Ok(big) = tower.level(first.vector[0].level()) else {
        return false;
    };
    let n = records.len();
    let mut next = Vec::with_capacity(n);
    for r in records {
        let image = normalize(big, &tau_vec(big, &r.vector));
        match records.iter().position(|o| o.vector == image) {
            Some(j) => next.push(j),
            None => return false,
        }
    }
    let mut seen = vec![false; n];
    let mut i = 0;
    for _ in 0..n {
        if seen[i] {
            return false;
        }
        seen[i] = true;
        i = next[i];
    }
    i == 0 && seen.iter().all(|&b| b)
}

/// Whether a vector over `F_{q^{2t}}` spans an `s`-stable line on the
/// variety.
pub fn line_is_fixed_point(
    tower: &FieldTower,
    space: &HermitianSpace,
    s: &Matrix,
    v: &[FieldElem],
) -> Result<bool> {
    let t = space.dim();
    if t.is_multiple_of(2) || v.len() != t || v.iter().all(FieldElem::is_zero) {
        return Ok(false);
    }
    let level = v[0].level();
    let big = tower.level(level)?;
    let s_big = s.map(|x| tower.embed(x, level).expect("entries live in F_{q^2}"));
    let sv = s_big.mul_vec(big, v);
    let line = normalize(big, v);
    if sv.iter().all(FieldElem::is_zero) || normalize(big, &sv) != line {
        return Ok(false);
    }
    let values = chain(tower, space.gram(), &line, (t - 1) / 2)?;
    let d = values.len() - 1;
    Ok(values[..d].iter().all(FieldElem::is_zero) && !values[d].is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "diagnosis", rename_all = "snake_case")]
pub enum Diagnosis {
    /// The minimal polynomial has a repeated factor; fixed points force
    /// semisimplicity, so the fixed set is empty.
    NotSemisimple {
        factor: Vec<Vec<u32>>,
        exponent: usize,
    },
    /// Semisimple with an eigenspace larger than its factor's degree; the
    /// fixed set is infinite.
    NotRegular {
        factor: Vec<Vec<u32>>,
        eigenspace_dim: usize,
    },
    /// Regular semisimple but not elliptic; no line satisfies the chain.
    NotElliptic {
        factor_degrees: Vec<usize>,
    },
    Finite {
        t: usize,
    },
}

pub fn semisimplicity_probe(f: &GaloisField, s: &Matrix, seed: u64) -> Diagnosis {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mp = minpoly(f, s);
    for x in factorize(f, &mp, &mut rng) {
        if x.exponent > 1 {
            return Diagnosis::NotSemisimple {
                factor: x.poly.to_raw(),
                exponent: x.exponent,
            };
        }
    }
    if !is_regular(f, s) {
        let cp = charpoly(f, s);
        for x in factorize(f, &cp, &mut rng) {
            let dim = kernel_of_poly(f, s, &x.poly).dim();
            if dim > x.degree() {
                return Diagnosis::NotRegular {
                    factor: x.poly.to_raw(),
                    eigenspace_dim: dim,
                };
            }
        }
    }
    let fs = factorize(f, &charpoly(f, s), &mut rng);
    if fs.len() > 1 {
        return Diagnosis::NotElliptic {
            factor_degrees: fs.iter().map(|x| x.degree()).collect(),
        };
    }
    Diagnosis::Finite { t: s.rows() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{coxeter_instance, instance_tower};
    use crate::hermitian::validate_space;

    #[test]
    fn one_dimensional() {
        let inst = coxeter_instance(3, 1, 0).unwrap();
        let recs = dl_fixed_points(&inst.tower, &inst.space, &inst.g, 0).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].chain_values.len(), 1);
        assert!(galois_orbit_check(&inst.tower, &recs));
    }

    #[test]
    fn coxeter_counts_equal_dimension() {
        for (p, t) in [(3, 3), (3, 5), (5, 3)] {
            for seed in 0..3 {
                let inst = coxeter_instance(p, t, seed).unwrap();
                let all = eigenlines(&inst.tower, &inst.space, &inst.g, seed).unwrap();
                assert_eq!(all.len(), t);
                assert!(all.iter().all(EigenlineRecord::satisfies_chain));
                let recs = dl_fixed_points(&inst.tower, &inst.space, &inst.g, seed).unwrap();
                assert_eq!(recs.len(), t);
                assert!(galois_orbit_check(&inst.tower, &recs));
                for r in &recs {
                    assert!(
                        line_is_fixed_point(&inst.tower, &inst.space, &inst.g, &r.vector).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn duplicated_record_breaks_orbit() {
        let inst = coxeter_instance(3, 3, 4).unwrap();
        let mut recs = dl_fixed_points(&inst.tower, &inst.space, &inst.g, 0).unwrap();
        recs[1] = recs[0].clone();
        assert!(!galois_orbit_check(&inst.tower, &recs));
        assert!(!galois_orbit_check(&inst.tower, &[]));
    }

    #[test]
    fn chain_is_frobenius_semilinear() {
        let inst = coxeter_instance(3, 3, 7).unwrap();
        let recs = eigenlines(&inst.tower, &inst.space, &inst.g, 0).unwrap();
        let big = inst.tower.level(6).unwrap();
        let gram = inst.space.gram();
        let (x, y) = (&recs[0].vector, &recs[1].vector);
        let lhs = extended_form(&inst.tower, gram, &tau_vec(big, x), &tau_vec(big, y)).unwrap();
        let rhs = big.frobenius(&extended_form(&inst.tower, gram, x, y).unwrap(), 2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reducible_charpoly_rejected() {
        let tower = instance_tower(3, 3).unwrap();
        let f = tower.base();
        let v = validate_space(f, Matrix::identity(f, 3)).unwrap();
        let s = Matrix::identity(f, 3);
        assert_eq!(
            dl_fixed_points(&tower, &v, &s, 0).unwrap_err(),
            Error::ReducibleCharpoly
        );
    }

    #[test]
    fn probe_diagnoses() {
        let f = GaloisField::new(3, vec![1, 0, 1]).unwrap();
        let lam = f.generator();
        let jordan = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                lam.clone()
            } else if j == i + 1 {
                f.one()
            } else {
                f.zero()
            }
        });
        assert!(matches!(
            semisimplicity_probe(&f, &jordan, 0),
            Diagnosis::NotSemisimple { exponent: 3, .. }
        ));
        assert!(matches!(
            semisimplicity_probe(&f, &Matrix::identity(&f, 3), 0),
            Diagnosis::NotRegular {
                eigenspace_dim: 3,
                ..
            }
        ));
        let diag = Matrix::diagonal(&f, &[f.one(), f.from_int(2), lam]);
        assert!(matches!(
            semisimplicity_probe(&f, &diag, 0),
            Diagnosis::NotElliptic { .. }
        ));
        let inst = coxeter_instance(3, 3, 1).unwrap();
        assert_eq!(
            semisimplicity_probe(inst.field(), &inst.g, 0),
            Diagnosis::Finite { t: 3 }
        );
    }
}
