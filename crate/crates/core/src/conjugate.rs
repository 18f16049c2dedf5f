//! The conjugate-reciprocal operation `P ↦ P*` on `F_{q^2}[T]` and
//! factorizations of characteristic polynomials of unitary elements,
//! together with the involution `P_i ↦ P_i*` on factor indices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{self, Factor};
use crate::field::GaloisField;
use crate::poly::Poly;
use crate::tower::FieldTower;

/// `P*(T) = conj(b_0)^{-1} T^d conj(P)(T^{-1})`, monic; its roots are the
/// conjugate-inverses `r^{-q}` of the roots of `P`.
pub fn star(tower: &FieldTower, poly: &Poly) -> Result<Poly> {
    star_in(tower.base(), poly)
}

pub(crate) fn star_in(f: &GaloisField, poly: &Poly) -> Result<Poly> {
    let d = poly.degree().ok_or(Error::ZeroConstantTerm)?;
    let c0 = &poly.coeffs()[0];
    if c0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    for c in poly.coeffs() {
        f.check(c)?;
    }
    let inv = f.inv(&f.frobenius(c0, 1)).unwrap();
    let coeffs = (0..=d)
        .map(|k| f.mul(&f.frobenius(&poly.coeffs()[d - k], 1), &inv))
        .collect();
    Ok(Poly::new(coeffs))
}

/// `P = ∏ P_i^{a_i}` over `F_{q^2}` with the involution `τ` on indices such
/// that `P_{τ(i)} = P_i*` and `a_{τ(i)} = a_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredCharPoly {
    pub factors: Vec<Factor>,
    pub star_pairing: Vec<usize>,
}

impl FactoredCharPoly {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.exponent * f.degree()).sum()
    }

    pub fn is_self_paired(&self, i: usize) -> bool {
        self.star_pairing[i] == i
    }

    /// Unordered pairs `{i, τ(i)}` with `i < τ(i)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.star_pairing
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| (i, j))
    }

    pub fn reconstruct(&self, f: &GaloisField) -> Poly {
        self.factors.iter().fold(Poly::one(f), |acc, x| {
            acc.mul(f, &x.poly.pow(f, x.exponent))
        })
    }

    /// The monic divisor `∏ P_i^{m_i}`.
    pub fn divisor(&self, f: &GaloisField, m: &[usize]) -> Poly {
        divisor_poly(f, &self.factors, m)
    }
}

pub fn divisor_poly(f: &GaloisField, factors: &[Factor], m: &[usize]) -> Poly {
    factors
        .iter()
        .zip(m)
        .fold(Poly::one(f), |acc, (x, &mi)| acc.mul(f, &x.poly.pow(f, mi)))
}

/// Factors a monic polynomial over `F_{q^2}` and computes the star pairing.
/// Fails when the factor set is not closed under `*` with matching
/// exponents, or when a self-paired factor has even degree.
pub fn factor(tower: &FieldTower, poly: &Poly, seed: u64) -> Result<FactoredCharPoly> {
    let f = tower.base();
    if !poly.is_monic(f) {
        return Err(Error::NotMonic);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = factor::factorize(f, poly, &mut rng);
    let star_pairing = pair_factors(f, &factors)?;
    Ok(FactoredCharPoly {
        factors,
        star_pairing,
    })
}

pub(crate) fn pair_factors(f: &GaloisField, factors: &[Factor]) -> Result<Vec<usize>> {
    let mut pairing = Vec::with_capacity(factors.len());
    for (i, fac) in factors.iter().enumerate() {
        let s = star_in(f, &fac.poly)?;
        let j = factors
            .iter()
            .position(|g| g.poly == s)
            .ok_or_else(|| Error::StarPairing(format!("star of factor {i} is not a factor")))?;
        if factors[j].exponent != fac.exponent {
            return Err(Error::StarPairing(format!(
                "factor {i} has exponent {} but its star partner {j} has exponent {}",
                fac.exponent, factors[j].exponent
            )));
        }
        if i == j && fac.degree() % 2 == 0 {
            return Err(Error::EvenSelfPaired(fac.degree()));
        }
        pairing.push(j);
    }
    Ok(pairing)
}

/// All exponent vectors `0 <= m_i <= a_i` in lexicographic order; each one
/// names the monic divisor `∏ P_i^{m_i}`.
pub fn divisor_enumeration(factors: &[Factor]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(factors.len())];
    for fac in factors {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=fac.exponent).map(move |m| {
                    let mut v = prefix.clone();
                    v.push(m);
                    v
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::make_tower;

    fn setup() -> FieldTower {
        make_tower(3, 2).unwrap()
    }

    #[test]
    fn star_examples_over_f9() {
        let t = setup();
        let f = t.base();
        let i = f.generator();
        let one = f.one();
        // T - 1 is fixed
        let p1 = Poly::linear(f, &one);
        assert_eq!(star(&t, &p1).unwrap(), p1);
        // T - i is fixed: i has norm one
        let pi = Poly::linear(f, &i);
        assert_eq!(star(&t, &pi).unwrap(), pi);
        // T - c -> T + c for c = 1 + i
        let c = f.add(&one, &i);
        let pc = Poly::linear(f, &c);
        assert_eq!(star(&t, &pc).unwrap(), Poly::linear(f, &f.neg(&c)));
    }

    #[test]
    fn star_rejects_zero_constant() {
        let t = setup();
        let f = t.base();
        assert_eq!(star(&t, &Poly::x(f)), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn factor_cube() {
        let t = setup();
        let f = t.base();
        let p = Poly::linear(f, &f.one()).pow(f, 3);
        let fc = factor(&t, &p, 0).unwrap();
        assert_eq!(fc.factors.len(), 1);
        assert_eq!(fc.factors[0].exponent, 3);
        assert_eq!(fc.star_pairing, vec![0]);
    }

    #[test]
    fn factor_pair_plus_fixed() {
        let t = setup();
        let f = t.base();
        let i = f.generator();
        let c = f.add(&f.one(), &i);
        let a = Poly::linear(f, &c);
        let b = Poly::linear(f, &f.neg(&c));
        let e = Poly::linear(f, &i);
        let p = a.mul(f, &b).mul(f, &e);
        let fc = factor(&t, &p, 4).unwrap();
        assert_eq!(fc.factors.len(), 3);
        let ia = fc.factors.iter().position(|x| x.poly == a).unwrap();
        let ib = fc.factors.iter().position(|x| x.poly == b).unwrap();
        let ie = fc.factors.iter().position(|x| x.poly == e).unwrap();
        assert_eq!(fc.star_pairing[ia], ib);
        assert_eq!(fc.star_pairing[ib], ia);
        assert_eq!(fc.star_pairing[ie], ie);
        assert_eq!(fc.reconstruct(f), p);
    }

    #[test]
    fn factor_t2_plus_1() {
        let t = setup();
        let f = t.base();
        let p = Poly::new(vec![f.one(), f.zero(), f.one()]);
        let fc = factor(&t, &p, 0).unwrap();
        let i = f.generator();
        let roots: Vec<Poly> = fc.factors.iter().map(|x| x.poly.clone()).collect();
        assert!(roots.contains(&Poly::linear(f, &i)));
        assert!(roots.contains(&Poly::linear(f, &f.neg(&i))));
        assert!(fc.factors.iter().all(|x| x.exponent == 1));
    }

    #[test]
    fn factor_rejects_unpaired() {
        let t = setup();
        let f = t.base();
        let c = f.add(&f.one(), &f.generator());
        let p = Poly::linear(f, &c);
        assert!(matches!(factor(&t, &p, 0), Err(Error::StarPairing(_))));
    }

    #[test]
    fn divisor_counts() {
        let t = setup();
        let f = t.base();
        let mk = |a| Factor {
            poly: Poly::linear(f, &f.one()),
            exponent: a,
            ddf_degree: 1,
        };
        assert_eq!(divisor_enumeration(&[mk(1)]), vec![vec![0], vec![1]]);
        assert_eq!(divisor_enumeration(&[mk(3)]).len(), 4);
        assert_eq!(divisor_enumeration(&[mk(1), mk(1), mk(1)]).len(), 8);
        assert_eq!(
            divisor_enumeration(&[mk(2), mk(1)])[..3],
            [vec![0, 0], vec![0, 1], vec![1, 0]]
        );
    }
}
