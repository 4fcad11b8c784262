//! Complete determination of the prime pairs `p, q` for which
//! `sigma(2^a) = p^f1 q^g1`, `sigma(3^b) = p^f2 q^g2`, `sigma(5^c) = p^f3 q^g3`
//! hold simultaneously, with `f_i + g_i >= 1`.
//!
//! The solver runs a three-stage pipeline, every stage emitting checkable
//! certificates:
//!
//! 1. **Baker bounds** ([`baker`]): explicit lower bounds for linear forms in
//!    logarithms (Matveev's theorem) turn the three equations into a
//!    self-referential inequality for `log x`, solved by monotone descent to
//!    astronomical but finite bounds.
//! 2. **Lattice reduction** ([`lattice`]): exact-integer LLL on a scaled
//!    logarithm lattice (de Weger's method) collapses the Baker bound to
//!    `log x < 728`, then `< 355` and `< 250` after case splitting.
//! 3. **Sieve** ([`sieve`]): the handful of admissible exponents below the
//!    reduced bounds is enumerated, classified with a bundled factor table
//!    ([`factor`]), and eliminated one by one through multiplicative-order
//!    constraints ([`order`]) until only four solution families remain.
//!
//! All numerics run on directed-rounding fixed-point intervals over
//! [`num_bigint::BigInt`] ([`mp`]); no floating point participates in any
//! proof-relevant comparison.

pub mod baker;
pub mod factor;
pub mod lattice;
pub mod mp;
pub mod order;
pub mod report;
pub mod sieve;

use num_bigint::BigInt;

/// Crate-wide error type.
///
/// Variants map one-to-one onto the failure modes of the pipeline stages;
/// the CLI translates `Config` into exit code 2 and everything else into 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An interval straddles an integer, so its floor is not determined.
    /// Callers retry at higher precision or abort.
    #[error("ambiguous floor: [{lo}, {hi}] straddles an integer at scale {scale}")]
    AmbiguousFloor { lo: BigInt, hi: BigInt, scale: u32 },

    /// Division by an interval containing zero.
    #[error("interval division by a range containing zero")]
    DivisionByZero,

    /// The reduced lattice is not short enough to certify the de Weger
    /// criterion; the caller must raise the scaling constant C.
    #[error("reduction criterion failed: shortest-vector bound does not exceed {required}")]
    CriterionFailed { required: String },

    /// A lattice basis with linearly dependent columns (zero Gram
    /// determinant) was handed to the reduction.
    #[error("singular basis: {0}")]
    SingularBasis(String),

    /// A factor-table entry failed verification (bad product, composite
    /// factor, or malformed line).
    #[error("factor table: {0}")]
    FactorTable(String),

    /// An order computation was handed a factorization whose product does
    /// not reconstruct the stated modulus minus one.
    #[error("incomplete factorization: {0}")]
    IncompleteFactorization(String),

    /// The screen could not decide omega(x) <= 2 for a surveyed exponent:
    /// the bundled table lacks enough prime factors.
    #[error("unresolved candidate: base {base}, exponent {exponent}: {reason}")]
    UnresolvedCandidate {
        base: u32,
        exponent: u64,
        reason: String,
    },

    /// A candidate survived elimination but matches no known solution
    /// family. Signals an implementation or data error; never silent.
    #[error("unexpected survivor: {0}")]
    UnexpectedSurvivor(String),

    /// An iterative stage exhausted its budget without converging.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// Invalid configuration or CLI usage.
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
