//! Dense univariate polynomials over a [`GaloisField`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::{FieldElem, GaloisField};

/// Little-endian coefficients with no trailing zeros; the zero polynomial
/// has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one(f: &GaloisField) -> Self {
        Self::constant(f.one())
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `T`.
    pub fn x(f: &GaloisField) -> Self {
        Self::new(vec![f.zero(), f.one()])
    }

    /// `T - a`.
    pub fn linear(f: &GaloisField, a: &FieldElem) -> Self {
        Self::new(vec![f.neg(a), f.one()])
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, f: &GaloisField, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self, f: &GaloisField) -> bool {
        self.leading().is_some_and(|c| f.is_one(c))
    }

    pub fn is_one(&self, f: &GaloisField) -> bool {
        self.coeffs.len() == 1 && f.is_one(&self.coeffs[0])
    }

    pub fn add(&self, f: &GaloisField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| f.add(&self.coeff(f, i), &other.coeff(f, i)))
                .collect(),
        )
    }

    pub fn sub(&self, f: &GaloisField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| f.sub(&self.coeff(f, i), &other.coeff(f, i)))
                .collect(),
        )
    }

    pub fn scale(&self, f: &GaloisField, c: &FieldElem) -> Self {
        Self::new(self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, f: &GaloisField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, f: &GaloisField, e: usize) -> Self {
        let mut acc = Self::one(f);
        for _ in 0..e {
            acc = acc.mul(f, self);
        }
        acc
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn divrem(&self, f: &GaloisField, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.leading().unwrap()).unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![f.zero(); r.len() - d];
        for k in (d..r.len()).rev() {
            let c = f.mul(&r[k], &lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                r[k - d + j] = f.sub(&r[k - d + j], &f.mul(&c, b));
            }
            q[k - d] = c;
        }
        r.truncate(d);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, f: &GaloisField, divisor: &Self) -> Self {
        self.divrem(f, divisor).1
    }

    pub fn div_exact(&self, f: &GaloisField, divisor: &Self) -> Self {
        let (q, r) = self.divrem(f, divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &GaloisField) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(c) => self.scale(f, &f.inv(c).unwrap()),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, f: &GaloisField, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn lcm(&self, f: &GaloisField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        self.mul(f, other)
            .div_exact(f, &self.gcd(f, other))
            .monic(f)
    }

    pub fn derivative(&self, f: &GaloisField) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| f.scale(c, (i as u64 % f.p() as u64) as u32))
                .collect(),
        )
    }

    pub fn mulmod(&self, f: &GaloisField, other: &Self, modulus: &Self) -> Self {
        self.mul(f, other).rem(f, modulus)
    }

    pub fn powmod(&self, f: &GaloisField, mut e: u128, modulus: &Self) -> Self {
        let mut base = self.rem(f, modulus);
        let mut acc = Self::one(f).rem(f, modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(f, &base, modulus);
            }
            base = base.mulmod(f, &base, modulus);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, f: &GaloisField, x: &FieldElem) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn map_coeffs(&self, g: impl Fn(&FieldElem) -> FieldElem) -> Self {
        Self::new(self.coeffs.iter().map(g).collect())
    }

    /// Uniformly random polynomial of degree `< bound`.
    pub fn random<R: Rng + ?Sized>(f: &GaloisField, bound: usize, rng: &mut R) -> Self {
        Self::new((0..bound).map(|_| f.random(rng)).collect())
    }

    /// Canonical sort key: degree first, then coefficients from low degree
    /// up, each by integer encoding.
    pub fn sort_key(&self, p: u32) -> (usize, Vec<u128>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().map(|c| c.encode(p)).collect(),
        )
    }

    pub fn to_raw(&self) -> Vec<Vec<u32>> {
        self.coeffs.iter().map(|c| c.coeffs().to_vec()).collect()
    }
}

/// Human-readable rendering over F_{p^2}, coefficients written as
/// `a+bw` where `w` is the level-2 generator.
pub fn render(poly: &Poly) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in poly.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = render_elem(c);
        let mon = match i {
            0 => String::new(),
            1 => "T".into(),
            _ => format!("T^{i}"),
        };
        let term = if i == 0 {
            cs
        } else if cs == "1" {
            mon
        } else {
            format!("({cs}){mon}")
        };
        parts.push(term);
    }
    parts.join(" + ")
}

pub fn render_elem(c: &FieldElem) -> String {
    let terms: Vec<String> = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| match (i, v) {
            (0, _) => v.to_string(),
            (1, 1) => "w".into(),
            (1, _) => format!("{v}w"),
            (_, 1) => format!("w^{i}"),
            _ => format!("{v}w^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> GaloisField {
        GaloisField::new(3, vec![1, 0, 1]).unwrap()
    }

    fn p(f: &GaloisField, cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| f.from_int(c)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = f9();
        let a = p(&f, &[1, 2, 0, 1, 1]);
        let b = p(&f, &[2, 1, 1]);
        let (q, r) = a.divrem(&f, &b);
        assert!(r.deg() < 2);
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
    }

    #[test]
    fn gcd_of_products() {
        let f = f9();
        let x1 = p(&f, &[-1, 1]);
        let x2 = p(&f, &[-2, 1]);
        let x3 = p(&f, &[1, 0, 1]);
        let a = x1.mul(&f, &x2).mul(&f, &x3);
        let b = x1.mul(&f, &x3).mul(&f, &x3);
        assert_eq!(a.gcd(&f, &b), x1.mul(&f, &x3));
        assert_eq!(a.lcm(&f, &b), a.mul(&f, &x3));
    }

    #[test]
    fn derivative_kills_p_powers() {
        let f = f9();
        let a = p(&f, &[1, 0, 0, 1]); // T^3 + 1
        assert!(a.derivative(&f).is_zero());
    }

    #[test]
    fn render_is_readable() {
        let f = f9();
        let i = f.generator();
        let q = Poly::new(vec![f.neg(&i), f.one()]);
        assert_eq!(render(&q), "T + 2w");
        assert_eq!(render(&p(&f, &[1, 0, 1])), "T^2 + 1");
    }
}
