//! Factorization of univariate polynomials over an odd-characteristic
//! finite field: squarefree decomposition, distinct-degree splitting, then
//! seeded Cantor–Zassenhaus equal-degree splitting.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::{FieldElem, GaloisField};
use crate::poly::Poly;

/// A monic irreducible factor with its multiplicity. `ddf_degree` is the
/// degree at which the distinct-degree stage isolated the factor, kept as
/// the irreducibility certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub poly: Poly,
    pub exponent: usize,
    pub ddf_degree: usize,
}

impl Factor {
    pub fn degree(&self) -> usize {
        self.poly.deg()
    }
}

/// Complete factorization of a monic nonzero polynomial into monic
/// irreducibles, in canonical order (degree, then coefficients).
pub fn factorize<R: Rng + ?Sized>(f: &GaloisField, poly: &Poly, rng: &mut R) -> Vec<Factor> {
    assert!(poly.is_monic(f), "factorize expects a monic polynomial");
    let mut out: Vec<Factor> = Vec::new();
    for (part, mult) in squarefree(f, poly) {
        for (block, d) in distinct_degree(f, &part) {
            for irr in equal_degree(f, &block, d, rng) {
                out.push(Factor {
                    poly: irr,
                    exponent: mult,
                    ddf_degree: d,
                });
            }
        }
    }
    // squarefree parts are coprime, but merge defensively when the same
    // irreducible shows up twice after p-th root recursion
    out.sort_by_key(|a| a.poly.sort_key(f.p()));
    let mut merged: Vec<Factor> = Vec::with_capacity(out.len());
    for fac in out {
        match merged.last_mut() {
            Some(last) if last.poly == fac.poly => last.exponent += fac.exponent,
            _ => merged.push(fac),
        }
    }
    merged
}

/// Whether a monic polynomial is irreducible (Rabin-style, no randomness).
pub fn is_irreducible(f: &GaloisField, poly: &Poly) -> bool {
    let Some(d) = poly.degree() else {
        return false;
    };
    if d == 0 {
        return false;
    }
    let q = f.order();
    let x = Poly::x(f);
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = h.powmod(f, q, poly);
        if h.sub(f, &x).gcd(f, poly).deg() > 0 {
            return false;
        }
    }
    true
}

/// All roots in `f` of a nonzero polynomial, sorted by integer encoding.
pub fn roots<R: Rng + ?Sized>(f: &GaloisField, poly: &Poly, rng: &mut R) -> Vec<FieldElem> {
    let monic = poly.monic(f);
    let x = Poly::x(f);
    // product of the distinct linear factors
    let lin = x.powmod(f, f.order(), &monic).sub(f, &x).gcd(f, &monic);
    let mut out: Vec<FieldElem> = equal_degree(f, &lin, 1, rng)
        .into_iter()
        .map(|l| f.neg(&l.coeffs()[0]))
        .collect();
    out.sort_by_key(|r| r.encode(f.p()));
    out
}

/// Squarefree decomposition `poly = prod s_i^i` with each `s_i` squarefree,
/// returned as `(s_i, i)` for nonconstant `s_i`.
pub fn squarefree(f: &GaloisField, poly: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    squarefree_rec(f, &poly.monic(f), 1, &mut out);
    out
}

fn squarefree_rec(f: &GaloisField, a: &Poly, mult: usize, out: &mut Vec<(Poly, usize)>) {
    if a.deg() == 0 {
        return;
    }
    let p = f.p() as usize;
    let da = a.derivative(f);
    if da.is_zero() {
        squarefree_rec(f, &pth_root(f, a), mult * p, out);
        return;
    }
    let mut c = a.gcd(f, &da);
    let mut w = a.div_exact(f, &c);
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(f, &c);
        let z = w.div_exact(f, &y);
        if z.deg() > 0 {
            out.push((z.monic(f), i * mult));
        }
        i += 1;
        w = y;
        c = c.div_exact(f, &w);
    }
    if c.deg() > 0 {
        squarefree_rec(f, &pth_root(f, &c.monic(f)), mult * p, out);
    }
}

/// For `a(T) = b(T)^p`, returns `b`.
fn pth_root(f: &GaloisField, a: &Poly) -> Poly {
    let p = f.p() as usize;
    let k = f.degree();
    Poly::new(
        a.coeffs()
            .iter()
            .step_by(p)
            .map(|c| f.frobenius(c, k - 1))
            .collect(),
    )
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree: `(product, degree)`.
pub fn distinct_degree(f: &GaloisField, a: &Poly) -> Vec<(Poly, usize)> {
    let q = f.order();
    let x = Poly::x(f);
    let mut out = Vec::new();
    let mut rest = a.monic(f);
    let mut h = x.clone();
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(f, q, &rest);
        let g = h.sub(f, &x).gcd(f, &rest);
        if g.deg() > 0 {
            rest = rest.div_exact(f, &g);
            h = h.rem(f, &rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Cantor–Zassenhaus splitting of a monic squarefree product of
/// irreducibles all of degree `d`. Odd characteristic only.
pub fn equal_degree<R: Rng + ?Sized>(
    f: &GaloisField,
    a: &Poly,
    d: usize,
    rng: &mut R,
) -> Vec<Poly> {
    let n = a.deg();
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![a.monic(f)];
    }
    let exp = (f.order().pow(d as u32) - 1) / 2;
    loop {
        let r = Poly::random(f, n, rng);
        if r.deg() == 0 {
            continue;
        }
        let b = r.powmod(f, exp, a).sub(f, &Poly::one(f));
        let g = b.gcd(f, a);
        if g.deg() > 0 && g.deg() < n {
            let h = a.div_exact(f, &g);
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &h, d, rng));
            return out;
        }
    }
}
