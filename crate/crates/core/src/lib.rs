//! Exact finite-field verification of the minuscule arithmetic fundamental
//! lemma and the Jacquet–Rallis fundamental lemma counting identity.
//!
//! The analytic side (alternating sums over `g`- and `τ`-stable subspaces),
//! the geometric side (fixed points on Bruhat–Tits strata weighted by
//! multiplicity) and the closed-form product formulas are computed by
//! independent routes and compared exactly.

pub mod conjugate;
pub mod dl;
pub mod engine;
pub mod error;
pub mod factor;
pub mod field;
pub mod forge;
pub mod hermitian;
pub mod linalg;
pub mod poly;
pub mod sweep;
pub mod tower;

pub use conjugate::{star, FactoredCharPoly};
pub use engine::{afl_verdict, fl_check, VerificationReport, VerifyOptions};
pub use error::{Error, Result};
pub use field::{FieldElem, GaloisField};
pub use forge::{
    block_instance, coxeter_instance, parse_instance, serialize_instance, MinusculeInstance,
    Signature,
};
pub use linalg::{Matrix, Subspace};
pub use poly::Poly;
pub use sweep::{run_sweep, SweepConfig, SweepSummary};
pub use tower::{make_tower, shared_tower, FieldTower};
