use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension level {0} is not an even integer >= 2")]
    BadLevel(usize),
    #[error("field level {0} is not present in the tower")]
    MissingLevel(usize),
    #[error("element lives at level {found}, expected level {expected}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("coefficient {value} is not a residue mod {p}")]
    BadResidue { value: u64, p: u32 },
    #[error("no root of the level-2 defining polynomial found at level {0}")]
    BrokenTower(usize),
    #[error("element {0:?} is not in the embedded subfield F_(q^2)")]
    NotInSubfield(Vec<u32>),

    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("polynomial must be monic and nonzero")]
    NotMonic,
    #[error("star pairing inconsistent: {0}")]
    StarPairing(String),
    #[error("self-paired irreducible factor has even degree {0}")]
    EvenSelfPaired(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not regular (minimal polynomial differs from characteristic polynomial)")]
    NotRegular,
    #[error("naive subspace scan refused: dim {dim} over a field of order {order} exceeds the cost guard")]
    ScanGuard { dim: usize, order: u128 },

    #[error("not conjugate-symmetric")]
    NotConjugateSymmetric,
    #[error("degenerate hermitian form")]
    Degenerate,
    #[error("g is not unitary for the hermitian form")]
    NotUnitary,
    #[error("anti-involution is not involutive")]
    NotInvolutive,
    #[error("anti-involution does not conjugate g to its inverse")]
    DoesNotInvertG,
    #[error("anti-involution is not an anti-isometry")]
    NotAntiIsometry,
    #[error("subspace is not invariant under the endomorphism")]
    NotInvariant,
    #[error("subspace is not totally isotropic")]
    NotIsotropic,

    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("no nondegenerate compatible Gram matrix after {tries} tries (solution space dimension {solution_dim})")]
    NoGram { tries: usize, solution_dim: usize },
    #[error("no generating norm-one element after {tries} tries; last witness has charpoly {witness_charpoly:?}")]
    NoCoxeterGenerator {
        tries: usize,
        witness_charpoly: Vec<Vec<u32>>,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("characteristic polynomial is reducible; the fixed set is not finite and nonempty")]
    ReducibleCharpoly,
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
