//! Both sides of the counting identity for a certified instance.
//!
//! The analytic side is the alternating sum `A = -Σ_{W∈𝒲} (-1)^{dim W} dim W`
//! over subspaces stable under `g` and `τ̄`. The geometric side walks every
//! `g`-stable totally isotropic `W`, reads off the induced map on `W^⊥/W`,
//! and adds `t · (a+1)/2` for each stratum whose quotient characteristic
//! polynomial is irreducible. Neither side consults the product formulas,
//! which are computed separately and compared.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::conjugate::{divisor_enumeration, FactoredCharPoly};
use crate::dl::{dl_fixed_points, galois_orbit_check};
use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::forge::{instance_to_value, MinusculeInstance};
use crate::hermitian::{induced_subquotient, is_isotropic, orth_complement};
use crate::linalg::{charpoly, invariant_subspaces, Subspace};
use crate::poly::render;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WMember {
    pub exponents: Vec<usize>,
    pub dim: usize,
}

/// The `g`- and `τ̄`-stable subspaces, indexed by divisor exponent vectors
/// with `m_{τ(i)} = m_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScriptW {
    pub members: Vec<WMember>,
}

impl ScriptW {
    /// `|M_i|` for `i = 0..=n`.
    pub fn level_counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n + 1];
        for m in &self.members {
            counts[m.dim] += 1;
        }
        counts
    }

    pub fn alternating_sum(&self) -> i64 {
        self.members.iter().map(|m| sign(m.dim)).sum()
    }
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn subspace_dim(fact: &FactoredCharPoly, m: &[usize]) -> usize {
    fact.factors
        .iter()
        .zip(m)
        .map(|(x, &k)| k * x.degree())
        .sum()
}

pub fn script_w(inst: &MinusculeInstance) -> ScriptW {
    let fact = &inst.fact;
    let members = divisor_enumeration(&fact.factors)
        .into_iter()
        .filter(|m| (0..m.len()).all(|i| m[fact.star_pairing[i]] == m[i]))
        .map(|m| WMember {
            dim: subspace_dim(fact, &m),
            exponents: m,
        })
        .collect();
    ScriptW { members }
}

/// Exponent vectors of the invariant subspaces that `τ̄` actually maps to
/// themselves, found by testing each one.
pub fn script_w_direct(inst: &MinusculeInstance) -> Result<Vec<Vec<usize>>> {
    let f = inst.field();
    Ok(invariant_subspaces(f, &inst.g, &inst.fact.factors)?
        .into_iter()
        .filter(|(_, w)| inst.tau.is_stable(f, w))
        .map(|(m, _)| m)
        .collect())
}

/// `A = -Σ_{W∈𝒲} (-1)^{dim W} dim W`.
pub fn analytic_count(inst: &MinusculeInstance) -> i64 {
    -script_w(inst)
        .members
        .iter()
        .map(|m| sign(m.dim) * m.dim as i64)
        .sum::<i64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "support")]
pub enum Support {
    Empty,
    Finite { i0: usize },
}

/// `Finite` iff exactly one self-paired factor has odd exponent.
pub fn afl_support(fact: &FactoredCharPoly) -> Result<Support> {
    if fact.degree().is_multiple_of(2) {
        return Err(Error::Precondition(
            "support is defined for odd dimension".into(),
        ));
    }
    let odd: Vec<usize> = (0..fact.len())
        .filter(|&i| fact.is_self_paired(i) && fact.factors[i].exponent % 2 == 1)
        .collect();
    Ok(match odd[..] {
        [i0] => Support::Finite { i0 },
        _ => Support::Empty,
    })
}

fn finite_i0(fact: &FactoredCharPoly) -> Result<usize> {
    match afl_support(fact)? {
        Support::Finite { i0 } => Ok(i0),
        Support::Empty => Err(Error::Precondition("support is empty".into())),
    }
}

fn pair_product(fact: &FactoredCharPoly) -> u64 {
    fact.pairs()
        .map(|(i, _)| 1 + fact.factors[i].exponent as u64)
        .product()
}

/// `∏_{pairs}(1 + a_i) · deg P_{i0}`.
pub fn closed_form_cardinality(fact: &FactoredCharPoly) -> Result<u64> {
    let i0 = finite_i0(fact)?;
    Ok(pair_product(fact) * fact.factors[i0].degree() as u64)
}

/// `∏_{pairs}(1 + a_i) · deg P_{i0} · (a_{i0} + 1)/2`, unsigned.
pub fn closed_form_derivative_magnitude(fact: &FactoredCharPoly) -> Result<u64> {
    let i0 = finite_i0(fact)?;
    Ok(closed_form_cardinality(fact)? * (fact.factors[i0].exponent as u64 + 1) / 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumRecord {
    pub exponents: Vec<usize>,
    pub dim_w: usize,
    /// `dim W^⊥/W`.
    pub t: usize,
    pub quotient_charpoly: String,
    pub fixed_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dl_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois_transitive: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometricSide {
    pub strata: Vec<StratumRecord>,
    pub total: i64,
}

impl GeometricSide {
    pub fn contributing(&self) -> impl Iterator<Item = &StratumRecord> {
        self.strata.iter().filter(|s| s.fixed_count > 0)
    }

    pub fn is_empty(&self) -> bool {
        self.contributing().next().is_none()
    }

    /// Total number of fixed points over all strata.
    pub fn cardinality(&self) -> u64 {
        self.contributing().map(|s| s.fixed_count as u64).sum()
    }
}

/// Scans every `g`-stable subspace, keeping the totally isotropic ones as
/// strata. With `dl_cross_check`, each contributing stratum's fixed count
/// is recomputed by eigenline enumeration and any disagreement is a hard
/// error.
pub fn geometric_count(inst: &MinusculeInstance, dl_cross_check: bool) -> Result<GeometricSide> {
    let f = inst.field();
    if inst.n().is_multiple_of(2) {
        return Err(Error::Precondition(
            "geometric count is defined for odd dimension".into(),
        ));
    }
    let mut strata = Vec::new();
    let mut total = 0i64;
    for (m, w) in invariant_subspaces(f, &inst.g, &inst.fact.factors)? {
        if !is_isotropic(f, &w, &inst.space) {
            continue;
        }
        let sq = induced_subquotient(f, &w, &inst.space, &inst.g)?;
        let t = sq.space.dim();
        let cp = charpoly(f, &sq.map);
        let elliptic = t > 0 && is_irreducible(f, &cp);
        let mut record = StratumRecord {
            exponents: m,
            dim_w: w.dim(),
            t,
            quotient_charpoly: render(&cp),
            fixed_count: if elliptic { t } else { 0 },
            multiplicity: None,
            dl_count: None,
            galois_transitive: None,
        };
        if elliptic {
            let i0 = inst
                .fact
                .factors
                .iter()
                .position(|x| x.poly == cp)
                .ok_or_else(|| {
                    Error::Inconsistency("quotient charpoly is not a factor of charpoly(g)".into())
                })?;
            let mult = (inst.fact.factors[i0].exponent as u64).div_ceil(2);
            record.multiplicity = Some(mult);
            total += t as i64 * mult as i64;
            if dl_cross_check {
                let recs = dl_fixed_points(&inst.tower, &sq.space, &sq.map, inst.seed)?;
                if recs.len() != t {
                    return Err(Error::Inconsistency(format!(
                        "stratum {:?}: formula gives {t} fixed points, eigenlines give {}",
                        record.exponents,
                        recs.len()
                    )));
                }
                record.dl_count = Some(recs.len());
                record.galois_transitive = Some(galois_orbit_check(&inst.tower, &recs));
            }
        }
        strata.push(record);
    }
    Ok(GeometricSide { strata, total })
}

/// A Laurent polynomial in `u` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e).or_insert(0) += c;
        }
        coeffs.retain(|_, c| *c != 0);
        Self { coeffs }
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn value_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn derivative_at_one(&self) -> i64 {
        self.coeffs.iter().map(|(e, c)| e * c).sum()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, (&e, &c)) in self.coeffs.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (k, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = match e {
                0 => String::new(),
                1 => "u".into(),
                _ => format!("u^{e}"),
            };
            match (mag, mono.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => f.write_str(&mono)?,
                _ => write!(f, "{mag}{mono}")?,
            }
        }
        Ok(())
    }
}

/// `Σ_i (-1)^{i+ℓ} |M_i| u^{i+ℓ}` with `ℓ` supplied by the caller.
pub fn orbital_polynomial(inst: &MinusculeInstance, ell: i64) -> LaurentPoly {
    let counts = script_w(inst).level_counts(inst.n());
    LaurentPoly::from_terms(counts.iter().enumerate().map(|(i, &m)| {
        let e = i as i64 + ell;
        (
            e,
            if e.rem_euclid(2) == 0 {
                m as i64
            } else {
                -(m as i64)
            },
        )
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlCheck {
    /// `Σ_{W∈𝒲} (-1)^{dim W}`.
    pub lhs: i64,
    /// Number of `g`-stable `W` with `W = W^⊥`.
    pub rhs: u64,
}

impl FlCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs as i64
    }
}

pub fn fl_check(inst: &MinusculeInstance) -> Result<FlCheck> {
    let n = inst.n();
    if n % 2 == 1 {
        return Err(Error::Precondition(format!(
            "the counting identity needs even dimension, got {n}"
        )));
    }
    let f = inst.field();
    let lhs = script_w(inst).alternating_sum();
    let mut rhs = 0;
    for (_, w) in invariant_subspaces(f, &inst.g, &inst.fact.factors)? {
        if w.dim() == n / 2 && orth_complement(f, &w, &inst.space) == w {
            rhs += 1;
        }
    }
    Ok(FlCheck { lhs, rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    pub level_counts: Vec<usize>,
    pub symmetric: bool,
    /// `W ↦ (τ̄W)^⊥` maps 𝒲 into itself, reverses dimension and squares
    /// to the identity.
    pub involution: bool,
}

pub fn duality_check(inst: &MinusculeInstance) -> Result<DualityCheck> {
    let n = inst.n();
    let f = inst.field();
    let sw = script_w(inst);
    let level_counts = sw.level_counts(n);
    let symmetric = (0..=n).all(|i| level_counts[i] == level_counts[n - i]);
    let members: Vec<Subspace> = invariant_subspaces(f, &inst.g, &inst.fact.factors)?
        .into_iter()
        .filter(|(m, _)| sw.members.iter().any(|x| &x.exponents == m))
        .map(|(_, w)| w)
        .collect();
    let dual = |w: &Subspace| orth_complement(f, &inst.tau.image(f, w), &inst.space);
    let involution = members.iter().all(|w| {
        let d = dual(w);
        d.dim() == n - w.dim() && members.contains(&d) && dual(&d) == *w
    });
    Ok(DualityCheck {
        level_counts,
        symmetric,
        involution,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub ell: i64,
    pub dl_cross_check: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            ell: 0,
            dl_cross_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitalSummary {
    pub ell: i64,
    pub polynomial: String,
    pub value_at_one: i64,
    pub derivative_at_one: i64,
}

/// The two signed readings of the derivative: from the orbital polynomial
/// (depends on `ℓ`), and `-ω · closed_deriv` with `ω = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedValues {
    pub orbital_derivative: i64,
    pub closed_form_displayed: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub vanishing: bool,
    pub orbital_vanishes_at_one: bool,
    pub orbital_derivative_matches: bool,
    pub duality: bool,
    pub script_w_cross_check: bool,
    pub uniform_stratum_type: bool,
    pub dl_transitive: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.vanishing
            && self.orbital_vanishes_at_one
            && self.orbital_derivative_matches
            && self.duality
            && self.script_w_cross_check
            && self.uniform_stratum_type
            && self.dl_transitive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub instance: serde_json::Value,
    pub p: u32,
    pub n: usize,
    pub seed: u64,
    pub signature: String,
    #[serde(rename = "A")]
    pub analytic: i64,
    #[serde(rename = "G")]
    pub geometric: i64,
    pub closed_card: u64,
    pub closed_deriv: u64,
    pub brute_card: u64,
    pub support: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i0: Option<usize>,
    pub level_counts: Vec<usize>,
    pub strata: Vec<StratumRecord>,
    pub orbital: OrbitalSummary,
    pub signed: SignedValues,
    pub multiplicity_regime: &'static str,
    pub checks: Checks,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass && self.checks.all()
    }
}

pub fn afl_verdict(inst: &MinusculeInstance, opts: &VerifyOptions) -> Result<VerificationReport> {
    let n = inst.n();
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "the arithmetic identity needs odd dimension, got {n}"
        )));
    }
    let fact = &inst.fact;
    let sw = script_w(inst);
    let analytic = analytic_count(inst);
    let geo = geometric_count(inst, opts.dl_cross_check)?;
    let support = afl_support(fact)?;
    let (closed_card, closed_deriv, i0) = match support {
        Support::Finite { i0 } => (
            closed_form_cardinality(fact)?,
            closed_form_derivative_magnitude(fact)?,
            Some(i0),
        ),
        Support::Empty => (0, 0, None),
    };
    let brute_card = geo.cardinality();
    let orbital = orbital_polynomial(inst, opts.ell);
    let ell_sign = if opts.ell.rem_euclid(2) == 0 { -1 } else { 1 };

    let mut direct = script_w_direct(inst)?;
    direct.sort();
    let mut listed: Vec<Vec<usize>> = sw.members.iter().map(|m| m.exponents.clone()).collect();
    listed.sort();
    let uniform_stratum_type = match i0 {
        Some(i0) => geo.contributing().all(|s| s.t == fact.factors[i0].degree()),
        None => true,
    };
    let checks = Checks {
        vanishing: sw.alternating_sum() == 0,
        orbital_vanishes_at_one: orbital.value_at_one() == 0,
        orbital_derivative_matches: orbital.derivative_at_one() == ell_sign * analytic,
        duality: {
            let d = duality_check(inst)?;
            d.symmetric && d.involution
        },
        script_w_cross_check: direct == listed,
        uniform_stratum_type,
        dl_transitive: geo
            .contributing()
            .all(|s| s.galois_transitive != Some(false)),
    };

    let verdict_ok = analytic == geo.total
        && match support {
            Support::Finite { .. } => analytic == closed_deriv as i64 && brute_card == closed_card,
            Support::Empty => geo.total == 0,
        };
    let regime = if n as u32 > 2 * inst.p() - 2 {
        "extrapolated"
    } else {
        "proved"
    };
    let mut notes = vec![format!(
        "orbital polynomial uses ell = {}; its derivative at u = 1 equals (-1)^(ell+1) * A",
        opts.ell
    )];
    if regime == "extrapolated" {
        notes.push(format!(
            "multiplicity (a+1)/2 applied beyond n <= 2p - 2 (n = {n}, p = {})",
            inst.p()
        ));
    }
    if support == Support::Empty && !geo.is_empty() {
        notes.push("geometric side found fixed points although support is empty".into());
    }
    if !checks.all() {
        notes.push("one or more structural checks failed".into());
    }
    Ok(VerificationReport {
        instance: instance_to_value(inst),
        p: inst.p(),
        n,
        seed: inst.seed,
        signature: inst.signature_string(),
        analytic,
        geometric: geo.total,
        closed_card,
        closed_deriv,
        brute_card,
        support: match support {
            Support::Finite { .. } => "Finite",
            Support::Empty => "Empty",
        },
        i0,
        level_counts: sw.level_counts(n),
        strata: geo.strata,
        orbital: OrbitalSummary {
            ell: opts.ell,
            polynomial: orbital.to_string(),
            value_at_one: orbital.value_at_one(),
            derivative_at_one: orbital.derivative_at_one(),
        },
        signed: SignedValues {
            orbital_derivative: orbital.derivative_at_one(),
            closed_form_displayed: -(closed_deriv as i64),
        },
        multiplicity_regime: regime,
        checks,
        verdict: if verdict_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{block_instance, coxeter_instance, Signature};

    fn inst(p: u32, s: &str, seed: u64) -> MinusculeInstance {
        block_instance(p, &s.parse::<Signature>().unwrap(), seed).unwrap()
    }

    fn dims(w: &ScriptW) -> Vec<usize> {
        let mut d: Vec<usize> = w.members.iter().map(|m| m.dim).collect();
        d.sort();
        d
    }

    #[test]
    fn script_w_examples() {
        assert_eq!(dims(&script_w(&inst(3, "sp:1:1", 0))), vec![0, 1]);
        assert_eq!(dims(&script_w(&inst(3, "sp:1:3", 0))), vec![0, 1, 2, 3]);
        assert_eq!(
            dims(&script_w(&inst(3, "cp:1:1,sp:1:1", 0))),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_count(&inst(3, "sp:1:1", 0)), 1);
        assert_eq!(analytic_count(&inst(3, "sp:1:3", 0)), 2);
        assert_eq!(analytic_count(&inst(3, "cp:1:1,sp:1:1", 0)), 2);
    }

    #[test]
    fn support_examples() {
        assert_eq!(
            afl_support(&inst(3, "sp:1:1", 0).fact).unwrap(),
            Support::Finite { i0: 0 }
        );
        assert_eq!(
            afl_support(&inst(3, "sp:1:1,sp:1:1,sp:1:1", 0).fact).unwrap(),
            Support::Empty
        );
        let fact = inst(5, "sp:1:3,sp:1:2", 0).fact;
        let Support::Finite { i0 } = afl_support(&fact).unwrap() else {
            panic!("expected finite support");
        };
        assert_eq!(fact.factors[i0].exponent, 3);
        assert!(afl_support(&inst(3, "cp:1:1", 0).fact).is_err());
    }

    #[test]
    fn geometric_examples() {
        let g1 = geometric_count(&inst(3, "sp:1:1", 0), true).unwrap();
        assert_eq!(g1.total, 1);
        assert_eq!(g1.strata.len(), 1);

        let g3 = geometric_count(&inst(3, "sp:1:3", 0), true).unwrap();
        assert_eq!(g3.total, 2);
        let c: Vec<&StratumRecord> = g3.contributing().collect();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].dim_w, c[0].t, c[0].multiplicity), (1, 1, Some(2)));

        let gp = geometric_count(&inst(3, "cp:1:1,sp:1:1", 0), true).unwrap();
        assert_eq!(gp.total, 2);
        assert_eq!(gp.contributing().count(), 2);
    }

    #[test]
    fn closed_form_examples() {
        let card = |s: &str| closed_form_cardinality(&inst(3, s, 2).fact).unwrap();
        assert_eq!(card("sp:3:1"), 3);
        assert_eq!(card("cp:1:1,sp:1:1"), 2);
        assert_eq!(card("cp:1:2,sp:1:1"), 3);
        let deriv = |s: &str| closed_form_derivative_magnitude(&inst(3, s, 2).fact).unwrap();
        assert_eq!(deriv("sp:1:1"), 1);
        assert_eq!(deriv("sp:1:3"), 2);
        assert_eq!(deriv("cp:1:1,sp:1:1"), 2);
    }

    #[test]
    fn orbital_examples() {
        let one = inst(3, "sp:1:1", 0);
        assert_eq!(orbital_polynomial(&one, 0).to_string(), "1 - u");
        assert_eq!(orbital_polynomial(&one, 1).to_string(), "-u + u^2");
        let big = inst(3, "cp:1:2,sp:1:3", 0);
        let poly = orbital_polynomial(&big, 0);
        assert_eq!(poly.value_at_one(), 0);
        assert_eq!(poly.derivative_at_one(), -analytic_count(&big));
        assert_eq!(LaurentPoly::default().to_string(), "0");
        assert_eq!(
            LaurentPoly::from_terms([(-1, 2), (0, -3)]).to_string(),
            "2u^-1 - 3"
        );
    }

    #[test]
    fn fl_examples() {
        let a = fl_check(&inst(3, "cp:1:1", 0)).unwrap();
        assert_eq!((a.lhs, a.rhs), (2, 2));
        let b = fl_check(&inst(3, "sp:1:2", 0)).unwrap();
        assert_eq!((b.lhs, b.rhs), (1, 1));
        assert!(matches!(
            fl_check(&inst(3, "sp:1:1", 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verdict_examples() {
        let opts = VerifyOptions::default();
        let r = afl_verdict(&inst(3, "sp:1:1", 0), &opts).unwrap();
        assert!(r.passed());
        assert_eq!((r.analytic, r.geometric), (1, 1));

        let r = afl_verdict(&inst(3, "sp:1:1,sp:1:1,sp:1:1", 0), &opts).unwrap();
        assert!(r.passed());
        assert_eq!((r.support, r.analytic, r.geometric), ("Empty", 0, 0));

        let r = afl_verdict(&inst(3, "cp:1:2,sp:1:3", 0), &opts).unwrap();
        assert!(r.passed());
        assert_eq!((r.analytic, r.geometric, r.closed_deriv), (6, 6, 6));
        assert_eq!(r.multiplicity_regime, "extrapolated");

        let r = afl_verdict(&coxeter_instance(3, 5, 1).unwrap(), &opts).unwrap();
        assert!(r.passed());
        assert_eq!((r.analytic, r.geometric, r.brute_card), (5, 5, 5));
    }

    #[test]
    fn duality_on_mixed_instance() {
        let d = duality_check(&inst(5, "cp:2:1,sp:1:1", 3)).unwrap();
        assert!(d.symmetric && d.involution);
    }
}
