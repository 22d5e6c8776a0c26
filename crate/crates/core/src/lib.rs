//! Exact expansions of prime-indexed quantities into multiple harmonic sums,
//! and an algorithmic prover for supercongruences between them.
//!
//! Everything here is exact rational arithmetic. A quantity `a_p` indexed by
//! primes is represented by an [`MhsSeries`]: a finite sum of terms
//! `c * p^b * H_{p-1}(s)` together with an explicit error term `O(p^N)`.
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature only adds a
//! process-wide Bernoulli number cache.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod composition;
mod error;
pub mod expansions;
pub mod oracle;
pub mod poly;
mod powersum;
pub mod prover;
pub mod series;

pub use arith::{Rational, Valuation};
pub use composition::{CompLinComb, Composition};
pub use error::Error;
pub use expansions::{Expander, QuantitySpec};
pub use poly::IntPoly;
pub use prover::{BasisSource, ProofCertificate, Prover, RelationBasis, RelationVector, Verdict};
pub use series::{CongruenceKind, CongruenceStatement, MhsSeries, MhsTerm};

pub type Result<T> = core::result::Result<T, Error>;

/// Sentinel truncation order meaning "no error term" (the series is exact).
pub const EXACT: i64 = i64::MAX;
