//! Construction of certified instances `(V, h, g, τ̄)`: a hermitian space
//! over `F_{q^2}` with a regular unitary `g` and an anti-involution `τ̄`
//! conjugating `g` to its inverse. Instances come either from a block
//! signature or from the Coxeter-torus model `F_{q^{2n}}` with its trace
//! form, and round-trip through JSON with full re-validation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conjugate::{self, star_in, FactoredCharPoly};
use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::field::{smallest_irreducible, FieldElem, GaloisField};
use crate::hermitian::{
    is_unitary, validate_anti_involution, validate_space, AntiInvolution, HermitianSpace,
};
use crate::linalg::{charpoly, inverse, is_regular, Matrix};
use crate::poly::Poly;
use crate::tower::{shared_tower, FieldTower};

const GRAM_TRIES: usize = 64;
const POLY_TRIES: usize = 4000;
const COXETER_TRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    #[serde(rename = "sp")]
    SelfPaired,
    #[serde(rename = "cp")]
    ConjPair,
}

impl BlockKind {
    fn tag(self) -> &'static str {
        match self {
            BlockKind::SelfPaired => "sp",
            BlockKind::ConjPair => "cp",
        }
    }
}

/// One block of a signature. `poly = None` asks for a random irreducible of
/// the given degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub kind: BlockKind,
    pub deg: usize,
    pub exp: usize,
    pub poly: Option<Poly>,
}

impl BlockSpec {
    pub fn dim(&self) -> usize {
        match self.kind {
            BlockKind::SelfPaired => self.deg * self.exp,
            BlockKind::ConjPair => 2 * self.deg * self.exp,
        }
    }
}

/// A list of blocks, written `sp:<deg>:<exp>` / `cp:<deg>:<exp>` joined by
/// `,` or `+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub blocks: Vec<BlockSpec>,
}

impl Signature {
    pub fn new(blocks: Vec<BlockSpec>) -> Self {
        Self { blocks }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(BlockSpec::dim).sum()
    }

    /// Largest self-paired degree, which fixes the tower level needed to
    /// sample self-conjugate irreducibles.
    pub fn max_self_paired_degree(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.kind == BlockKind::SelfPaired)
            .map(|b| b.deg)
            .max()
            .unwrap_or(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Signature("empty signature".into()));
        }
        for b in &self.blocks {
            if b.deg == 0 || b.exp == 0 {
                return Err(Error::Signature(format!(
                    "block {}:{}:{} needs positive degree and exponent",
                    b.kind.tag(),
                    b.deg,
                    b.exp
                )));
            }
            if b.kind == BlockKind::SelfPaired && b.deg % 2 == 0 {
                return Err(Error::EvenSelfPaired(b.deg));
            }
            if let Some(p) = &b.poly {
                if p.deg() != b.deg {
                    return Err(Error::Signature(format!(
                        "explicit polynomial has degree {}, block says {}",
                        p.deg(),
                        b.deg
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.split([',', '+']).map(str::trim) {
            let fields: Vec<&str> = part.split(':').collect();
            let [kind, deg, exp] = fields[..] else {
                return Err(Error::Signature(format!("cannot parse block {part:?}")));
            };
            let kind = match kind {
                "sp" => BlockKind::SelfPaired,
                "cp" => BlockKind::ConjPair,
                other => return Err(Error::Signature(format!("unknown block kind {other:?}"))),
            };
            let num = |x: &str| {
                x.parse::<usize>()
                    .map_err(|_| Error::Signature(format!("bad number {x:?} in {part:?}")))
            };
            blocks.push(BlockSpec {
                kind,
                deg: num(deg)?,
                exp: num(exp)?,
                poly: None,
            });
        }
        let sig = Signature { blocks };
        sig.validate()?;
        Ok(sig)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{}:{}:{}", b.kind.tag(), b.deg, b.exp))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// A realized block: for a conjugate pair, `poly` is one member and its
/// star is implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub kind: BlockKind,
    pub deg: usize,
    pub exp: usize,
    pub poly: Poly,
}

pub fn signature_string(records: &[BlockRecord]) -> String {
    records
        .iter()
        .map(|b| format!("{}:{}:{}", b.kind.tag(), b.deg, b.exp))
        .collect::<Vec<_>>()
        .join(",")
}

/// The signature read off a factorization, with each pair represented by
/// its smaller member, sorted.
pub fn canonical_signature(f: &GaloisField, fact: &FactoredCharPoly) -> Vec<BlockRecord> {
    let mut out: Vec<BlockRecord> = fact
        .factors
        .iter()
        .enumerate()
        .filter(|&(i, _)| fact.star_pairing[i] >= i)
        .map(|(i, x)| BlockRecord {
            kind: if fact.is_self_paired(i) {
                BlockKind::SelfPaired
            } else {
                BlockKind::ConjPair
            },
            deg: x.degree(),
            exp: x.exponent,
            poly: x.poly.clone(),
        })
        .collect();
    canonicalize(f, &mut out);
    out
}

fn canonicalize(f: &GaloisField, records: &mut [BlockRecord]) {
    let p = f.p();
    for r in records.iter_mut() {
        if r.kind == BlockKind::ConjPair {
            if let Ok(s) = star_in(f, &r.poly) {
                if s.sort_key(p) < r.poly.sort_key(p) {
                    r.poly = s;
                }
            }
        }
    }
    records.sort_by(|a, b| {
        (a.kind, a.deg, a.exp, a.poly.sort_key(p)).cmp(&(b.kind, b.deg, b.exp, b.poly.sort_key(p)))
    });
}

/// A certified instance. Construct through [`certify`] or the builders.
#[derive(Clone, Debug)]
pub struct MinusculeInstance {
    pub tower: Arc<FieldTower>,
    pub space: HermitianSpace,
    pub g: Matrix,
    pub tau: AntiInvolution,
    pub fact: FactoredCharPoly,
    pub seed: u64,
    pub signature: Vec<BlockRecord>,
    pub provenance: String,
}

impl MinusculeInstance {
    pub fn n(&self) -> usize {
        self.space.dim()
    }

    pub fn p(&self) -> u32 {
        self.tower.p()
    }

    pub fn field(&self) -> &GaloisField {
        self.tower.base()
    }

    pub fn signature_string(&self) -> String {
        signature_string(&self.signature)
    }
}

/// Tower carrying every level an `n`-dimensional instance can need.
pub fn instance_tower(p: u32, n: usize) -> Result<Arc<FieldTower>> {
    shared_tower(p, 2 * n.max(1))
}

/// Checks every instance axiom and factors the characteristic polynomial.
/// A supplied signature must agree with the factorization up to order and
/// the choice of pair representative.
pub fn certify(
    tower: Arc<FieldTower>,
    gram: Matrix,
    g: Matrix,
    s: Matrix,
    seed: u64,
    signature: Option<Vec<BlockRecord>>,
    provenance: String,
) -> Result<MinusculeInstance> {
    let f = tower.base();
    let space = validate_space(f, gram)?;
    let n = space.dim();
    if g.rows() != n || g.cols() != n {
        return Err(Error::Dimension(format!(
            "g is {}x{}, space has dim {n}",
            g.rows(),
            g.cols()
        )));
    }
    if !is_unitary(f, &g, &space) {
        return Err(Error::NotUnitary);
    }
    if !is_regular(f, &g) {
        return Err(Error::NotRegular);
    }
    let tau = validate_anti_involution(f, s, &space, &g)?;
    let fact = conjugate::factor(&tower, &charpoly(f, &g), seed)?;
    let canonical = canonical_signature(f, &fact);
    let signature = match signature {
        None => canonical,
        Some(given) => {
            let mut check = given.clone();
            canonicalize(f, &mut check);
            if check != canonical {
                return Err(Error::SignatureMismatch(format!(
                    "declared {} but g factors as {}",
                    signature_string(&given),
                    signature_string(&canonical)
                )));
            }
            given
        }
    };
    Ok(MinusculeInstance {
        tower,
        space,
        g,
        tau,
        fact,
        seed,
        signature,
        provenance,
    })
}

// ---------------------------------------------------------------------------
// block instances

/// Builds the block instance for `sig` over `F_{p^2}`.
pub fn block_instance(p: u32, sig: &Signature, seed: u64) -> Result<MinusculeInstance> {
    sig.validate()?;
    let tower = instance_tower(p, sig.dim())?;
    build_block_instance(&tower, sig, seed)
}

/// `g` is block diagonal with companion matrices of `P^a` (and `P*^a` for
/// a pair); `τ̄(g^k e) = g^{-k} e'` where `e, e'` are the cyclic vectors of
/// partnered blocks; `h` is sampled from the solutions of the linear
/// compatibility system.
pub fn build_block_instance(
    tower: &Arc<FieldTower>,
    sig: &Signature,
    seed: u64,
) -> Result<MinusculeInstance> {
    sig.validate()?;
    let f = tower.base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: Vec<Poly> = Vec::new();
    let mut records = Vec::new();
    for b in &sig.blocks {
        let poly = match (&b.poly, b.kind) {
            (Some(p), BlockKind::SelfPaired) => {
                check_self_paired(f, p)?;
                p.clone()
            }
            (Some(p), BlockKind::ConjPair) => {
                check_conj_pair(f, p)?;
                p.clone()
            }
            (None, BlockKind::SelfPaired) => random_self_conjugate(tower, b.deg, &used, &mut rng)?,
            (None, BlockKind::ConjPair) => random_conj_pair(f, b.deg, &used, &mut rng)?,
        };
        let star = star_in(f, &poly)?;
        for q in [&poly, &star] {
            if used.contains(q) {
                return Err(Error::Signature(format!(
                    "factor {} appears in more than one block",
                    crate::poly::render(q)
                )));
            }
        }
        used.push(poly.clone());
        if star != poly {
            used.push(star);
        }
        records.push(BlockRecord {
            kind: b.kind,
            deg: b.deg,
            exp: b.exp,
            poly,
        });
    }

    // segments: (companion block, offset of the partner's cyclic vector)
    let mut companions = Vec::new();
    let mut partner_offsets = Vec::new();
    let mut off = 0;
    for r in &records {
        let m = r.deg * r.exp;
        let pa = r.poly.pow(f, r.exp);
        match r.kind {
            BlockKind::SelfPaired => {
                companions.push(Matrix::companion(f, &pa));
                partner_offsets.push(off);
                off += m;
            }
            BlockKind::ConjPair => {
                let sa = star_in(f, &r.poly)?.pow(f, r.exp);
                companions.push(Matrix::companion(f, &pa));
                companions.push(Matrix::companion(f, &sa));
                partner_offsets.push(off + m);
                partner_offsets.push(off);
                off += 2 * m;
            }
        }
    }
    let n = off;
    let g = Matrix::block_diagonal(f, &companions);
    let ginv = inverse(f, &g).ok_or(Error::ZeroConstantTerm)?;
    let mut s = Matrix::zeros(f, n, n);
    let mut col = 0;
    for (c, &partner) in companions.iter().zip(&partner_offsets) {
        let mut v: Vec<FieldElem> = (0..n)
            .map(|i| if i == partner { f.one() } else { f.zero() })
            .collect();
        for _ in 0..c.rows() {
            for (i, x) in v.iter().enumerate() {
                s.set(i, col, x.clone());
            }
            v = ginv.mul_vec(f, &v);
            col += 1;
        }
    }
    let gram = solve_gram(f, &g, &s, &mut rng)?;
    certify(
        tower.clone(),
        gram,
        g,
        s,
        seed,
        Some(records),
        "block".into(),
    )
}

fn check_self_paired(f: &GaloisField, p: &Poly) -> Result<()> {
    if !p.is_monic(f) {
        return Err(Error::NotMonic);
    }
    if p.deg().is_multiple_of(2) {
        return Err(Error::EvenSelfPaired(p.deg()));
    }
    if !is_irreducible(f, p) {
        return Err(Error::Signature(
            "self-paired polynomial is reducible".into(),
        ));
    }
    if star_in(f, p)? != *p {
        return Err(Error::Signature(
            "self-paired polynomial is not self-conjugate".into(),
        ));
    }
    Ok(())
}

fn check_conj_pair(f: &GaloisField, p: &Poly) -> Result<()> {
    if !p.is_monic(f) {
        return Err(Error::NotMonic);
    }
    if !is_irreducible(f, p) {
        return Err(Error::Signature("pair polynomial is reducible".into()));
    }
    if star_in(f, p)? == *p {
        return Err(Error::Signature("pair polynomial is self-conjugate".into()));
    }
    Ok(())
}

/// Minimal polynomial over `F_{q^2}` of a random norm-one element of
/// `F_{q^{2d}}` that generates it; such polynomials are exactly the
/// self-conjugate irreducibles of degree `d`.
fn random_self_conjugate(
    tower: &FieldTower,
    d: usize,
    used: &[Poly],
    rng: &mut ChaCha8Rng,
) -> Result<Poly> {
    if d.is_multiple_of(2) {
        return Err(Error::EvenSelfPaired(d));
    }
    let big = tower.level(2 * d)?;
    let e = (tower.p() as u128).pow(d as u32) - 1;
    for _ in 0..POLY_TRIES {
        let s = big.pow(&big.random_nonzero(rng), e);
        let Some(poly) = norm_one_minpoly(tower, &s, d)? else {
            continue;
        };
        if !used.contains(&poly) {
            return Ok(poly);
        }
    }
    Err(Error::Signature(format!(
        "no unused self-conjugate irreducible of degree {d} over F_{}^2",
        tower.p()
    )))
}

/// `∏ (T - s^{q^{2k}})` brought down to `F_{q^2}`, or `None` when `s` does
/// not have degree `d` over `F_{q^2}`.
fn norm_one_minpoly(tower: &FieldTower, s: &FieldElem, d: usize) -> Result<Option<Poly>> {
    let big = tower.level(s.level())?;
    let orbit: Vec<FieldElem> = (0..d).map(|k| big.frobenius(s, 2 * k)).collect();
    if orbit[1..].contains(s) {
        return Ok(None);
    }
    let prod = orbit
        .iter()
        .fold(Poly::one(big), |acc, r| acc.mul(big, &Poly::linear(big, r)));
    let coeffs = prod
        .coeffs()
        .iter()
        .map(|c| tower.unembed(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Poly::new(coeffs)))
}

fn random_conj_pair(
    f: &GaloisField,
    d: usize,
    used: &[Poly],
    rng: &mut ChaCha8Rng,
) -> Result<Poly> {
    for _ in 0..POLY_TRIES {
        let mut coeffs: Vec<FieldElem> = (0..d).map(|_| f.random(rng)).collect();
        coeffs.push(f.one());
        let poly = Poly::new(coeffs);
        if poly.coeffs()[0].is_zero() || !is_irreducible(f, &poly) {
            continue;
        }
        let star = star_in(f, &poly)?;
        if star == poly || used.contains(&poly) || used.contains(&star) {
            continue;
        }
        return Ok(poly);
    }
    Err(Error::Signature(format!(
        "no unused conjugate pair of degree {d} found"
    )))
}

// ---------------------------------------------------------------------------
// Gram solving over F_p

/// Samples a nondegenerate `G` with `Gᵀ = conj(G)`, `gᵀ G conj(g) = G` and
/// `Sᵀ G conj(S) = Gᵀ`. The constraints are linear over `F_p` in the `2n^2`
/// coordinates of `G`.
fn solve_gram(f: &GaloisField, g: &Matrix, s: &Matrix, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let n = g.rows();
    let p = f.p();
    let units = [f.one(), f.generator()];
    let gc = g.frobenius(f, 1);
    let sc = s.frobenius(f, 1);
    let nrows = 6 * n * n;
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(2 * n * n);
    for a in 0..n {
        for b in 0..n {
            for e in &units {
                let ec = f.frobenius(e, 1);
                let mut col = vec![0u32; nrows];
                let mut put = |block: usize, i: usize, j: usize, x: &FieldElem| {
                    let base = ((block * n + i) * n + j) * 2;
                    for (k, &c) in x.coeffs().iter().enumerate() {
                        col[base + k] = (col[base + k] + c) % p;
                    }
                };
                // Eᵀ - conj(E)
                put(0, b, a, e);
                put(0, a, b, &f.neg(&ec));
                // gᵀ E conj(g) - E  and  Sᵀ E conj(S) - Eᵀ
                for (block, m, mc) in [(1, g, &gc), (2, s, &sc)] {
                    for i in 0..n {
                        let left = f.mul(m.get(a, i), e);
                        if left.is_zero() {
                            continue;
                        }
                        for j in 0..n {
                            put(block, i, j, &f.mul(&left, mc.get(b, j)));
                        }
                    }
                }
                put(1, a, b, &f.neg(e));
                put(2, b, a, &f.neg(e));
                columns.push(col);
            }
        }
    }
    let rows: Vec<Vec<u32>> = (0..nrows)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let null = fp_nullspace(rows, 2 * n * n, p);
    for _ in 0..GRAM_TRIES {
        let mut v = vec![0u32; 2 * n * n];
        for basis in &null {
            let c = rng.gen_range(0..p);
            for (x, &y) in v.iter_mut().zip(basis) {
                *x = (*x + c * y) % p;
            }
        }
        // fix the overall F_p^× scale: first nonzero coordinate becomes 1
        let Some(&lead) = v.iter().find(|&&x| x != 0) else {
            continue;
        };
        let inv = crate::field::inv_mod(lead, p);
        let gram = Matrix::from_fn(n, n, |a, b| {
            let k = 2 * (a * n + b);
            FieldElem::from_raw(vec![v[k] * inv % p, v[k + 1] * inv % p])
        });
        if validate_space(f, gram.clone()).is_ok() {
            return Ok(gram);
        }
    }
    Err(Error::NoGram {
        tries: GRAM_TRIES,
        solution_dim: null.len(),
    })
}

/// Basis of the null space of a matrix over `F_p`.
fn fp_nullspace(mut rows: Vec<Vec<u32>>, ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = crate::field::inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = (*x + (p - factor) * y) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![0u32; ncols];
            v[fc] = 1;
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[pr][fc]) % p;
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Coxeter-torus instances

/// `F_{q^{2n}}` as an `n`-dimensional `F_{q^2}`-space with basis `ξ^k`,
/// where `ξ` is the generator of the level-`2n` field.
struct CoxeterModel<'a> {
    tower: &'a FieldTower,
    big: &'a GaloisField,
    n: usize,
    basis: Vec<FieldElem>,
    // inverse of the F_p matrix whose columns are ξ^k and ι·ξ^k
    to_coords: Vec<Vec<u32>>,
}

impl<'a> CoxeterModel<'a> {
    fn new(tower: &'a FieldTower, n: usize) -> Result<Self> {
        let big = tower.level(2 * n)?;
        let iota = tower.embed(&tower.base().generator(), 2 * n)?;
        let xi = big.generator();
        let basis: Vec<FieldElem> = (0..n).map(|k| big.pow(&xi, k as u128)).collect();
        let m = 2 * n;
        let p = tower.p();
        let cols: Vec<Vec<u32>> = basis
            .iter()
            .flat_map(|b| [b.coeffs().to_vec(), big.mul(&iota, b).coeffs().to_vec()])
            .collect();
        // augmented [A | I] with A's columns as above
        let rows: Vec<Vec<u32>> = (0..m)
            .map(|r| {
                let mut row: Vec<u32> = cols.iter().map(|c| c[r]).collect();
                row.extend((0..m).map(|j| u32::from(j == r)));
                row
            })
            .collect();
        let to_coords = fp_invert(rows, m, p).ok_or(Error::BrokenTower(2 * n))?;
        Ok(Self {
            tower,
            big,
            n,
            basis,
            to_coords,
        })
    }

    fn coords(&self, y: &FieldElem) -> Vec<FieldElem> {
        let p = self.tower.p() as u64;
        let flat: Vec<u32> = self
            .to_coords
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(y.coeffs())
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum::<u64>()
                    % p) as u32
            })
            .collect();
        (0..self.n)
            .map(|k| FieldElem::from_raw(vec![flat[2 * k], flat[2 * k + 1]]))
            .collect()
    }

    fn matrix_of(&self, map: impl Fn(&FieldElem) -> FieldElem) -> Matrix {
        let cols: Vec<Vec<FieldElem>> = self.basis.iter().map(|b| self.coords(&map(b))).collect();
        Matrix::from_fn(self.n, self.n, |i, j| cols[j][i].clone())
    }

    fn sigma_n(&self, x: &FieldElem) -> FieldElem {
        self.big.frobenius(x, self.n)
    }

    fn trace(&self, y: &FieldElem) -> Result<FieldElem> {
        let t = (0..self.n).fold(self.big.zero(), |acc, k| {
            self.big.add(&acc, &self.big.frobenius(y, 2 * k))
        });
        self.tower.unembed(&t)
    }
}

/// Gauss–Jordan on `[A | I]`, returning `A^{-1}`.
fn fp_invert(mut rows: Vec<Vec<u32>>, m: usize, p: u32) -> Option<Vec<Vec<u32>>> {
    for c in 0..m {
        let piv = (c..m).find(|&i| rows[i][c] != 0)?;
        rows.swap(c, piv);
        let inv = crate::field::inv_mod(rows[c][c], p);
        for x in rows[c].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = rows[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == c || row[c] == 0 {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = (*x + (p - factor) * y) % p;
            }
        }
    }
    Some(rows.into_iter().map(|r| r[m..].to_vec()).collect())
}

pub fn coxeter_instance(p: u32, n: usize, seed: u64) -> Result<MinusculeInstance> {
    let tower = instance_tower(p, n)?;
    random_coxeter_instance(&tower, n, seed)
}

/// `g` = multiplication by a random norm-one generator `s` of
/// `F_{q^{2n}}`, `h(x, y) = Tr(x σ^n(y))`, `τ̄ = σ^n` with `σ` the
/// `q`-Frobenius.
pub fn random_coxeter_instance(
    tower: &Arc<FieldTower>,
    n: usize,
    seed: u64,
) -> Result<MinusculeInstance> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "Coxeter instances need odd n, got {n}"
        )));
    }
    let model = CoxeterModel::new(tower, n)?;
    let big = model.big;
    let e = (tower.p() as u128).pow(n as u32) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = None;
    for _ in 0..COXETER_TRIES {
        let s = big.pow(&big.random_nonzero(&mut rng), e);
        let orbit_ok = (1..n).all(|k| big.frobenius(&s, 2 * k) != s);
        if orbit_ok {
            return coxeter_from_model(tower, &model, &s, seed);
        }
        witness = Some(s);
    }
    let s = witness.unwrap();
    let g = model.matrix_of(|b| big.mul(&s, b));
    Err(Error::NoCoxeterGenerator {
        tries: COXETER_TRIES,
        witness_charpoly: charpoly(tower.base(), &g).to_raw(),
    })
}

/// The Coxeter-model instance for a given norm-one `s` at level `2n`.
/// Fails with [`Error::NotRegular`] when `s` does not generate.
pub fn coxeter_instance_from_element(
    tower: &Arc<FieldTower>,
    n: usize,
    s: &FieldElem,
    seed: u64,
) -> Result<MinusculeInstance> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "Coxeter instances need odd n, got {n}"
        )));
    }
    let model = CoxeterModel::new(tower, n)?;
    model.big.check(s)?;
    let norm = model.big.mul(s, &model.sigma_n(s));
    if !model.big.is_one(&norm) {
        return Err(Error::Precondition("element does not have norm one".into()));
    }
    coxeter_from_model(tower, &model, s, seed)
}

fn coxeter_from_model(
    tower: &Arc<FieldTower>,
    model: &CoxeterModel,
    s: &FieldElem,
    seed: u64,
) -> Result<MinusculeInstance> {
    let big = model.big;
    let n = model.n;
    let g = model.matrix_of(|b| big.mul(s, b));
    let tau = model.matrix_of(|b| model.sigma_n(b));
    let conj_basis: Vec<FieldElem> = model.basis.iter().map(|b| model.sigma_n(b)).collect();
    let mut gram = Matrix::zeros(tower.base(), n, n);
    for a in 0..n {
        for (b, cb) in conj_basis.iter().enumerate() {
            gram.set(a, b, model.trace(&big.mul(&model.basis[a], cb))?);
        }
    }
    certify(tower.clone(), gram, g, tau, seed, None, "coxeter".into())
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    poly2: Vec<u32>,
}

type RawMatrix = Vec<Vec<Vec<u32>>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    kind: BlockKind,
    deg: usize,
    exp: usize,
    poly: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    p: u32,
    n: usize,
    field: FieldJson,
    gram: RawMatrix,
    g: RawMatrix,
    tau: RawMatrix,
    seed: u64,
    signature: Vec<BlockJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

fn raw(m: &Matrix) -> RawMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(FieldElem::into_coeffs).collect())
        .collect()
}

fn to_json(inst: &MinusculeInstance) -> InstanceJson {
    InstanceJson {
        p: inst.p(),
        n: inst.n(),
        field: FieldJson {
            poly2: inst.field().modulus().to_vec(),
        },
        gram: raw(inst.space.gram()),
        g: raw(&inst.g),
        tau: raw(inst.tau.matrix()),
        seed: inst.seed,
        signature: inst
            .signature
            .iter()
            .map(|b| BlockJson {
                kind: b.kind,
                deg: b.deg,
                exp: b.exp,
                poly: b.poly.to_raw(),
            })
            .collect(),
        provenance: Some(inst.provenance.clone()),
    }
}

pub fn instance_to_value(inst: &MinusculeInstance) -> serde_json::Value {
    serde_json::to_value(to_json(inst)).expect("instance JSON is always serializable")
}

pub fn serialize_instance(inst: &MinusculeInstance) -> String {
    serde_json::to_string_pretty(&to_json(inst)).expect("instance JSON is always serializable")
}

pub fn parse_instance(json: &str) -> Result<MinusculeInstance> {
    let doc: InstanceJson = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    instance_from_json(doc)
}

pub fn instance_from_value(value: serde_json::Value) -> Result<MinusculeInstance> {
    let doc: InstanceJson =
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    instance_from_json(doc)
}

fn instance_from_json(doc: InstanceJson) -> Result<MinusculeInstance> {
    if doc.n == 0 {
        return Err(Error::Schema("n must be positive".into()));
    }
    let tower = instance_tower(doc.p, doc.n)?;
    if doc.field.poly2 != smallest_irreducible(doc.p, 2) {
        return Err(Error::Schema(format!(
            "field.poly2 {:?} is not the canonical quadratic {:?}",
            doc.field.poly2,
            smallest_irreducible(doc.p, 2)
        )));
    }
    let f = tower.base();
    let elem =
        |c: Vec<u32>, what: &str| f.elem(c).map_err(|e| Error::Schema(format!("{what}: {e}")));
    let matrix = |m: RawMatrix, what: &str| -> Result<Matrix> {
        if m.len() != doc.n || m.iter().any(|r| r.len() != doc.n) {
            return Err(Error::Schema(format!("{what} must be {0}x{0}", doc.n)));
        }
        let rows = m
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| elem(c, what))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    };
    let gram = matrix(doc.gram, "gram")?;
    let g = matrix(doc.g, "g")?;
    let tau = matrix(doc.tau, "tau")?;
    let signature = doc
        .signature
        .into_iter()
        .map(|b| {
            let poly = Poly::new(
                b.poly
                    .into_iter()
                    .map(|c| elem(c, "signature"))
                    .collect::<Result<Vec<_>>>()?,
            );
            Ok(BlockRecord {
                kind: b.kind,
                deg: b.deg,
                exp: b.exp,
                poly,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    certify(
        tower,
        gram,
        g,
        tau,
        doc.seed,
        Some(signature),
        doc.provenance.unwrap_or_else(|| "explicit".into()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kernel_of_poly;

    fn sig(s: &str) -> Signature {
        s.parse().unwrap()
    }

    #[test]
    fn signature_syntax() {
        let s = sig("cp:1:2+sp:1:3");
        assert_eq!(s.dim(), 7);
        assert_eq!(s.to_string(), "cp:1:2,sp:1:3");
        assert_eq!(sig("sp:1:1, sp:1:1,sp:1:1").blocks.len(), 3);
        assert!(matches!(
            "sp:1".parse::<Signature>(),
            Err(Error::Signature(_))
        ));
        assert!(matches!(
            "xx:1:1".parse::<Signature>(),
            Err(Error::Signature(_))
        ));
        assert!(matches!(
            "sp:0:1".parse::<Signature>(),
            Err(Error::Signature(_))
        ));
        assert_eq!("sp:2:1".parse::<Signature>(), Err(Error::EvenSelfPaired(2)));
    }

    #[test]
    fn trivial_self_paired_line() {
        let tower = instance_tower(3, 1).unwrap();
        let f = tower.base();
        let s = Signature::new(vec![BlockSpec {
            kind: BlockKind::SelfPaired,
            deg: 1,
            exp: 1,
            poly: Some(Poly::linear(f, &f.one())),
        }]);
        let inst = build_block_instance(&tower, &s, 0).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.g, Matrix::identity(f, 1));
        assert_eq!(inst.space.gram(), &Matrix::identity(f, 1));
        assert_eq!(inst.tau.matrix(), &Matrix::identity(f, 1));
    }

    #[test]
    fn hyperbolic_pair() {
        let tower = instance_tower(3, 2).unwrap();
        let f = tower.base();
        let c = f.add(&f.one(), &f.generator());
        let s = Signature::new(vec![BlockSpec {
            kind: BlockKind::ConjPair,
            deg: 1,
            exp: 1,
            poly: Some(Poly::linear(f, &c)),
        }]);
        let inst = build_block_instance(&tower, &s, 5).unwrap();
        let partner = f.inv(&f.frobenius(&c, 1)).unwrap();
        assert_eq!(inst.g, Matrix::diagonal(f, &[c, partner]));
        let gram = inst.space.gram();
        assert!(gram.get(0, 0).is_zero() && gram.get(1, 1).is_zero());
    }

    #[test]
    fn random_cubic_self_paired() {
        let inst = block_instance(3, &sig("sp:3:1"), 11).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.fact.factors.len(), 1);
        assert_eq!(inst.fact.factors[0].degree(), 3);
        assert_eq!(inst.fact.star_pairing, vec![0]);
    }

    #[test]
    fn factorization_matches_signature_shape() {
        for (text, p) in [
            ("cp:1:2,sp:1:3", 3),
            ("cp:2:1,sp:1:1", 5),
            ("sp:1:1,sp:1:1,sp:1:1", 3),
            ("sp:1:1,sp:1:2", 5),
            ("cp:1:1,sp:1:2", 3),
        ] {
            let s = sig(text);
            let inst = block_instance(p, &s, 3).unwrap();
            let f = inst.field();
            assert_eq!(inst.n(), s.dim());
            let mut want: Vec<(BlockKind, usize, usize)> =
                s.blocks.iter().map(|b| (b.kind, b.deg, b.exp)).collect();
            let mut got: Vec<(BlockKind, usize, usize)> = canonical_signature(f, &inst.fact)
                .iter()
                .map(|b| (b.kind, b.deg, b.exp))
                .collect();
            want.sort();
            got.sort();
            assert_eq!(want, got, "{text}");
        }
    }

    #[test]
    fn tau_maps_primary_kernels_to_partners() {
        let inst = block_instance(3, &sig("cp:1:2,sp:1:1"), 9).unwrap();
        let f = inst.field();
        for (i, x) in inst.fact.factors.iter().enumerate() {
            let j = inst.fact.star_pairing[i];
            for m in 0..=x.exponent {
                let k = kernel_of_poly(f, &inst.g, &x.poly.pow(f, m));
                let kj = kernel_of_poly(f, &inst.g, &inst.fact.factors[j].poly.pow(f, m));
                assert_eq!(inst.tau.image(f, &k), kj);
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = block_instance(5, &sig("cp:1:1,sp:1:3"), 17).unwrap();
        let b = block_instance(5, &sig("cp:1:1,sp:1:3"), 17).unwrap();
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
    }

    #[test]
    fn repeated_factor_rejected() {
        let tower = instance_tower(3, 2).unwrap();
        let f = tower.base();
        let one = Poly::linear(f, &f.one());
        let block = BlockSpec {
            kind: BlockKind::SelfPaired,
            deg: 1,
            exp: 1,
            poly: Some(one),
        };
        let s = Signature::new(vec![block.clone(), block]);
        assert!(matches!(
            build_block_instance(&tower, &s, 0),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn coxeter_small_cases() {
        let one = coxeter_instance(3, 1, 2).unwrap();
        let f = one.field();
        let lam = one.g.get(0, 0);
        assert!(f.is_one(&f.pow(lam, 4)));

        let three = coxeter_instance(3, 3, 2).unwrap();
        assert_eq!(three.fact.factors.len(), 1);
        assert_eq!(three.fact.factors[0].degree(), 3);
        assert_eq!(three.fact.factors[0].exponent, 1);
        assert_eq!(three.provenance, "coxeter");
    }

    #[test]
    fn coxeter_norm_one_count() {
        // kernel of the norm F_{3^6} -> F_{3^3}: x^{3^3 + 1} = 1
        let tower = instance_tower(3, 3).unwrap();
        let big = tower.level(6).unwrap();
        let count = big
            .elements()
            .filter(|x| !x.is_zero() && big.is_one(&big.pow(x, 28)))
            .count();
        assert_eq!(count, 28);
    }

    #[test]
    fn coxeter_identity_is_not_regular() {
        let tower = instance_tower(3, 3).unwrap();
        let one = tower.level(6).unwrap().one();
        assert_eq!(
            coxeter_instance_from_element(&tower, 3, &one, 0).unwrap_err(),
            Error::NotRegular
        );
    }

    #[test]
    fn json_round_trip() {
        for inst in [
            block_instance(3, &sig("sp:1:1"), 1).unwrap(),
            block_instance(3, &sig("cp:1:1"), 1).unwrap(),
            block_instance(5, &sig("cp:1:1,sp:1:3"), 1).unwrap(),
            coxeter_instance(3, 3, 1).unwrap(),
        ] {
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            assert_eq!(serialize_instance(&back), text);
            assert_eq!(back.g, inst.g);
            assert_eq!(back.fact, inst.fact);
        }
    }

    #[test]
    fn tampered_and_truncated_json() {
        let inst = block_instance(3, &sig("cp:1:1,sp:1:1"), 4).unwrap();
        let mut v = instance_to_value(&inst);
        v["gram"][0][1] = serde_json::json!([1, 1]);
        let err = instance_from_value(v).unwrap_err();
        assert_eq!(err.to_string(), "not conjugate-symmetric");

        let text = serialize_instance(&inst);
        let cut = &text[..text.len() / 2];
        assert!(matches!(parse_instance(cut), Err(Error::Schema(_))));

        let mut v = instance_to_value(&inst);
        v["field"]["poly2"] = serde_json::json!([2, 1, 1]);
        assert!(matches!(instance_from_value(v), Err(Error::Schema(_))));

        let mut v = instance_to_value(&inst);
        v["signature"][0]["exp"] = serde_json::json!(2);
        assert!(matches!(
            instance_from_value(v),
            Err(Error::SignatureMismatch(_))
        ));
    }
}
