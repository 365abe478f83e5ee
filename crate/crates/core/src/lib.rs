//! Constructions and numerical certificates for commutator and
//! self-commutator representations of matrices and truncated compact
//! operators.

pub mod anderson;
pub mod error;
pub mod idealseq;
pub mod liealg;
pub mod minimize;
pub mod numkit;
pub mod report;
pub mod selfcomm;
pub mod staircase;

pub use error::{Error, Result};
pub use numkit::{ComplexMatrix, C64};
pub use report::{Check, CheckKind, SolveReport};
