//! Zero-error capacity bounds for the distance graphs `G_n` and `H_n`.
//!
//! The crate builds both sides of the comparison between the Shannon capacity
//! and the entanglement-assisted capacity:
//!
//! * lower bounds on the entangled side from orthonormal representations and
//!   Hadamard-seeded disjoint clique packings, turned into exactly verified
//!   operator-system certificates ([`entcert`]) and simulated as an actual
//!   zero-error protocol ([`channel`]);
//! * upper bounds on the Shannon side from Frankl–Wilson polynomials and the
//!   Haemers rank bound over `F_p` ([`algebra_fp`]), sandwiched against explicit
//!   independent sets ([`alpha`], [`geometry`]);
//! * exact big-integer evaluation of the resulting bound comparison ([`report`]).
//!
//! Data-parallel loops go through [`par`]; disabling the default `parallel`
//! feature runs the same code sequentially with identical results.

pub mod algebra_fp;
pub mod alpha;
pub mod binom;
pub mod bitgraph;
pub mod bitset;
pub mod channel;
pub mod entcert;
pub mod error;
pub mod geometry;
pub mod hadamard;
pub mod par;
pub mod report;

pub use error::{Error, Result};
