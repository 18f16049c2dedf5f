//! Arithmetic in a single finite field `F_p[T]/(m(T))`.
//!
//! Elements are dense little-endian coefficient vectors in the power basis of
//! the defining polynomial. The field does not own its elements: every
//! operation goes through a `&GaloisField` so that element values stay plain
//! data that can be serialized and shared across threads.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem {
    coeffs: Vec<u32>,
}

impl FieldElem {
    pub fn from_raw(coeffs: Vec<u32>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    /// Extension degree of the field this element belongs to.
    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Integer encoding `sum c_i p^i`. Ordering elements by this value
    /// compares the highest-degree coefficient first.
    pub fn encode(&self, p: u32) -> u128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * p as u128 + c as u128)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p as u64 - 2, p)
}

pub(crate) fn pow_mod(a: u32, mut e: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut base = a as u64 % p64;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        e >>= 1;
    }
    acc as u32
}

/// Dense polynomials over F_p as `Vec<u32>`, little-endian, trimmed.
pub(crate) mod fpx {
    use super::inv_mod;

    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    /// Returns `(quotient, remainder)`. `b` must be nonzero.
    pub fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let lead_inv = inv_mod(b[db], p) as u64;
        let p64 = p as u64;
        let mut q = vec![0u32; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u64 * lead_inv % p64) as u32;
            q[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                let t = (c as u64 * bj as u64) % p64;
                r[shift + j] = ((r[shift + j] as u64 + p64 - t) % p64) as u32;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        divrem(a, b, p).1
    }

    pub fn monic_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            let li = inv_mod(lead, p) as u64;
            for c in x.iter_mut() {
                *c = (*c as u64 * li % p as u64) as u32;
            }
        }
        x
    }

    /// Inverse of `a` modulo the irreducible `m` by the extended Euclidean
    /// algorithm. `a` must be nonzero modulo `m`.
    pub fn inv_modulo(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant
        let c = inv_mod(r0[0], p) as u64;
        let mut out: Vec<u32> = s0
            .into_iter()
            .map(|x| (x as u64 * c % p as u64) as u32)
            .collect();
        trim(&mut out);
        out
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u32], mut e: u128, m: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u32];
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    /// Irreducibility over F_p: no common factor with `T^(p^k) - T` for
    /// any `k <= deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let d = f.len() - 1;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        let mut h = x.clone();
        for _ in 1..=d / 2 {
            h = powmod(&h, p as u128, f, p);
            let g = monic_gcd(&sub(&h, &x, p), f, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// The monic irreducible of degree `d` over F_p whose integer encoding
/// `sum c_i p^i` (over the non-leading coefficients) is smallest, i.e. the
/// lexicographically smallest when comparing from the top coefficient down.
pub fn smallest_irreducible(p: u32, d: usize) -> Vec<u32> {
    let p128 = p as u128;
    for n in 0..p128.pow(d as u32) {
        if n % p128 == 0 {
            continue;
        }
        let mut m: Vec<u32> = (0..d)
            .map(|i| ((n / p128.pow(i as u32)) % p128) as u32)
            .collect();
        m.push(1);
        if fpx::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

/// The field `F_p[T]/(m(T))` for a monic irreducible `m` of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    p: u32,
    degree: usize,
    modulus: Vec<u32>,
    // images of T^i under x -> x^p
    frob: Vec<FieldElem>,
}

impl GaloisField {
    /// `modulus` is little-endian, monic, of length `degree + 1`, and must be
    /// irreducible over F_p (checked).
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if p == 2 || !is_prime(p as u64) {
            return Err(Error::NotOddPrime(p as u64));
        }
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err(Error::NotMonic);
        }
        if let Some(&bad) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::BadResidue {
                value: bad as u64,
                p,
            });
        }
        if !fpx::is_irreducible(&modulus, p) {
            return Err(Error::Precondition(format!(
                "defining polynomial {modulus:?} is reducible mod {p}"
            )));
        }
        let degree = modulus.len() - 1;
        let mut field = Self {
            p,
            degree,
            modulus,
            frob: Vec::new(),
        };
        let xp = field.pow(&field.generator(), p as u128);
        let mut frob = Vec::with_capacity(degree);
        let mut acc = field.one();
        for _ in 0..degree {
            frob.push(acc.clone());
            acc = field.mul(&acc, &xp);
        }
        field.frob = frob;
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements, `p^degree`.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree as u32)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::from_raw(vec![0; self.degree])
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> FieldElem {
        let mut v = vec![0; self.degree];
        v[0] = c.rem_euclid(self.p as i64) as u32;
        FieldElem::from_raw(v)
    }

    /// The class of `T`, a generator of the field over F_p.
    pub fn generator(&self) -> FieldElem {
        if self.degree == 1 {
            let m0 = self.modulus[0];
            return self.from_int(-(m0 as i64));
        }
        let mut v = vec![0; self.degree];
        v[1] = 1;
        FieldElem::from_raw(v)
    }

    pub fn elem(&self, coeffs: Vec<u32>) -> Result<FieldElem> {
        if coeffs.len() != self.degree {
            return Err(Error::LevelMismatch {
                expected: self.degree,
                found: coeffs.len(),
            });
        }
        if let Some(&bad) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::BadResidue {
                value: bad as u64,
                p: self.p,
            });
        }
        Ok(FieldElem::from_raw(coeffs))
    }

    pub fn check(&self, x: &FieldElem) -> Result<()> {
        if x.level() != self.degree {
            return Err(Error::LevelMismatch {
                expected: self.degree,
                found: x.level(),
            });
        }
        Ok(())
    }

    /// Decodes the integer encoding produced by [`FieldElem::encode`].
    pub fn decode(&self, mut n: u128) -> FieldElem {
        let p = self.p as u128;
        let v = (0..self.degree)
            .map(|_| {
                let c = (n % p) as u32;
                n /= p;
                c
            })
            .collect();
        FieldElem::from_raw(v)
    }

    pub fn is_one(&self, x: &FieldElem) -> bool {
        x.coeffs[0] == 1 && x.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem::from_raw(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem::from_raw(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| if x >= y { x - y } else { x + p - y })
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem::from_raw(
            a.coeffs
                .iter()
                .map(|&x| if x == 0 { 0 } else { p - x })
                .collect(),
        )
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let d = self.degree;
        let p = self.p as u64;
        if d == 1 {
            return FieldElem::from_raw(vec![(a.coeffs[0] as u64 * b.coeffs[0] as u64 % p) as u32]);
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        for c in prod.iter_mut() {
            *c %= p;
        }
        // reduce with the monic modulus, top down
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..d {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    prod[k - d + j] = (prod[k - d + j] + (p - c) * m) % p;
                }
            }
        }
        FieldElem::from_raw(prod[..d].iter().map(|&c| c as u32).collect())
    }

    pub fn scale(&self, a: &FieldElem, c: u32) -> FieldElem {
        let p = self.p as u64;
        FieldElem::from_raw(
            a.coeffs
                .iter()
                .map(|&x| (x as u64 * c as u64 % p) as u32)
                .collect(),
        )
    }

    /// Multiplicative inverse via extended Euclid on the defining polynomial.
    /// Returns `None` for zero.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return None;
        }
        let mut poly = a.coeffs.clone();
        fpx::trim(&mut poly);
        let mut out = fpx::inv_modulo(&poly, &self.modulus, self.p);
        out.resize(self.degree, 0);
        Some(FieldElem::from_raw(out))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `x^(p^k)`.
    pub fn frobenius(&self, a: &FieldElem, k: usize) -> FieldElem {
        let mut x = a.clone();
        for _ in 0..k % self.degree {
            x = self.frob_once(&x);
        }
        x
    }

    fn frob_once(&self, a: &FieldElem) -> FieldElem {
        let mut acc = self.zero();
        for (i, &c) in a.coeffs.iter().enumerate() {
            if c != 0 {
                acc = self.add(&acc, &self.scale(&self.frob[i], c));
            }
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem::from_raw((0..self.degree).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// All field elements in integer-encoding order. Intended for small
    /// fields only.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(move |n| self.decode(n))
    }

    /// Whether `a` lies in the prime field.
    pub fn in_prime_field(&self, a: &FieldElem) -> bool {
        a.coeffs[1..].iter().all(|&c| c == 0)
    }
}
