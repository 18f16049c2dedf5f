//! The tower `F_p ⊂ F_{q^2} ⊂ F_{q^{2t}}` (here `q = p`) with its two
//! Frobenius maps and deterministic embeddings of the level-2 field.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor;
use crate::field::{is_prime, smallest_irreducible, FieldElem, GaloisField};
use crate::poly::Poly;

#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u32,
    fields: BTreeMap<usize, GaloisField>,
    // image of the level-2 generator inside each level
    embeddings: BTreeMap<usize, FieldElem>,
}

/// Serialized form `{p, levels, polys}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u32,
    pub levels: Vec<usize>,
    pub polys: Vec<Vec<u32>>,
}

/// Builds the tower with every even level `2, 4, ..., max_level`. Each
/// defining polynomial is the smallest monic irreducible of its degree in
/// integer-encoding order, and each embedding sends the level-2 generator
/// to the smallest root of the level-2 polynomial in that order.
pub fn make_tower(p: u32, max_level: usize) -> Result<FieldTower> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::NotOddPrime(p as u64));
    }
    if max_level < 2 || !max_level.is_multiple_of(2) {
        return Err(Error::BadLevel(max_level));
    }
    let mut fields = BTreeMap::new();
    let mut embeddings = BTreeMap::new();
    let base = GaloisField::new(p, smallest_irreducible(p, 2))?;
    let poly2 = base.modulus().to_vec();
    for level in (2..=max_level).step_by(2) {
        let field = if level == 2 {
            base.clone()
        } else {
            GaloisField::new(p, smallest_irreducible(p, level))?
        };
        let image = if level == 2 {
            field.generator()
        } else {
            let lifted = Poly::new(poly2.iter().map(|&c| field.from_int(c as i64)).collect());
            // the seed only affects the search, not the (sorted) result
            let mut rng = ChaCha8Rng::seed_from_u64(level as u64);
            factor::roots(&field, &lifted, &mut rng)
                .into_iter()
                .next()
                .ok_or(Error::BrokenTower(level))?
        };
        fields.insert(level, field);
        embeddings.insert(level, image);
    }
    Ok(FieldTower {
        p,
        fields,
        embeddings,
    })
}

type TowerCache = Mutex<HashMap<(u32, usize), Arc<FieldTower>>>;

/// Process-wide cache of towers keyed by `(p, max_level)`; towers are
/// immutable once built, so instances can share them.
pub fn shared_tower(p: u32, max_level: usize) -> Result<Arc<FieldTower>> {
    static CACHE: OnceLock<TowerCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&(p, max_level)) {
        return Ok(t.clone());
    }
    let tower = Arc::new(make_tower(p, max_level)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry((p, max_level))
        .or_insert(tower)
        .clone())
}

impl FieldTower {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// The residue characteristic doubles as `q` in this setting.
    pub fn q(&self) -> u32 {
        self.p
    }

    pub fn max_level(&self) -> usize {
        *self.fields.keys().next_back().unwrap()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.fields.keys().copied().collect()
    }

    pub fn level(&self, level: usize) -> Result<&GaloisField> {
        self.fields.get(&level).ok_or(Error::MissingLevel(level))
    }

    /// `F_{q^2}`.
    pub fn base(&self) -> &GaloisField {
        &self.fields[&2]
    }

    pub fn defining_poly(&self, level: usize) -> Result<&[u32]> {
        Ok(self.level(level)?.modulus())
    }

    pub fn descriptor(&self) -> TowerDescriptor {
        TowerDescriptor {
            p: self.p,
            levels: self.levels(),
            polys: self.fields.values().map(|f| f.modulus().to_vec()).collect(),
        }
    }

    /// `x^q` on `F_{q^2}`.
    pub fn conj(&self, x: &FieldElem) -> Result<FieldElem> {
        let f = self.base();
        f.check(x)?;
        Ok(f.frobenius(x, 1))
    }

    /// `x^{q^2}` on the level of `x`.
    pub fn tau_frob(&self, x: &FieldElem) -> Result<FieldElem> {
        let f = self.level(x.level())?;
        Ok(f.frobenius(x, 2))
    }

    pub fn embed(&self, x: &FieldElem, target_level: usize) -> Result<FieldElem> {
        self.base().check(x)?;
        let target = self.level(target_level)?;
        let image = &self.embeddings[&target_level];
        let c = x.coeffs();
        Ok(target.add(&target.from_int(c[0] as i64), &target.scale(image, c[1])))
    }

    pub fn embed_poly(&self, poly: &Poly, target_level: usize) -> Result<Poly> {
        let coeffs = poly
            .coeffs()
            .iter()
            .map(|c| self.embed(c, target_level))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    /// Inverse of [`embed`](Self::embed) on its image.
    pub fn unembed(&self, y: &FieldElem) -> Result<FieldElem> {
        let level = y.level();
        self.level(level)?;
        if level == 2 {
            return Ok(y.clone());
        }
        let image = &self.embeddings[&level];
        // y = a + b*image, where image has some nonzero non-constant coefficient
        let (k, &ik) = image
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &c)| c != 0)
            .ok_or(Error::BrokenTower(level))?;
        let p = self.p as u64;
        let b = (y.coeffs()[k] as u64 * crate::field::inv_mod(ik, self.p) as u64 % p) as u32;
        let a = ((y.coeffs()[0] as u64 + p - b as u64 * image.coeffs()[0] as u64 % p) % p) as u32;
        let candidate = self.base().elem(vec![a, b])?;
        if self.embed(&candidate, level)? != *y {
            return Err(Error::NotInSubfield(y.coeffs().to_vec()));
        }
        Ok(candidate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_quadratics() {
        assert_eq!(
            make_tower(3, 2).unwrap().defining_poly(2).unwrap(),
            &[1, 0, 1]
        );
        assert_eq!(
            make_tower(5, 2).unwrap().defining_poly(2).unwrap(),
            &[2, 0, 1]
        );
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(make_tower(2, 2).unwrap_err(), Error::NotOddPrime(2));
        assert_eq!(make_tower(3, 3).unwrap_err(), Error::BadLevel(3));
        assert_eq!(make_tower(3, 0).unwrap_err(), Error::BadLevel(0));
    }

    #[test]
    fn conj_on_f9() {
        let t = make_tower(3, 2).unwrap();
        let f = t.base();
        let i = f.generator();
        assert_eq!(t.conj(&i).unwrap(), f.neg(&i));
        assert_eq!(t.conj(&f.one()).unwrap(), f.one());
        let c = f.add(&f.one(), &i);
        assert_eq!(t.conj(&c).unwrap(), f.sub(&f.one(), &i));
    }

    #[test]
    fn conj_rejects_wrong_level() {
        let t = make_tower(3, 6).unwrap();
        let x = t.level(6).unwrap().one();
        assert!(matches!(t.conj(&x), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn embed_identity_and_unit() {
        let t = make_tower(3, 6).unwrap();
        let f = t.base();
        let i = f.generator();
        assert_eq!(t.embed(&i, 2).unwrap(), i);
        for level in [2, 4, 6] {
            let one = t.embed(&f.one(), level).unwrap();
            assert!(t.level(level).unwrap().is_one(&one));
        }
    }

    #[test]
    fn embedded_generator_is_the_smaller_root() {
        let t = make_tower(3, 6).unwrap();
        let big = t.level(6).unwrap();
        let image = t.embed(&t.base().generator(), 6).unwrap();
        // brute-force both square roots of -1 in F_{3^6}
        let minus_one = big.from_int(-1);
        let roots: Vec<FieldElem> = big
            .elements()
            .filter(|x| big.mul(x, x) == minus_one)
            .collect();
        assert_eq!(roots.len(), 2);
        let smallest = roots.iter().min_by_key(|r| r.encode(3)).unwrap();
        assert_eq!(&image, smallest);
    }

    #[test]
    fn unembed_round_trip() {
        let t = make_tower(5, 6).unwrap();
        for x in t.base().elements() {
            for level in [2, 4, 6] {
                let y = t.embed(&x, level).unwrap();
                assert_eq!(t.unembed(&y).unwrap(), x);
            }
        }
        let big = t.level(6).unwrap();
        assert!(t.unembed(&big.generator()).is_err());
    }
}
