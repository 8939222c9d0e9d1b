//! Finite generalized quadrangles: field arithmetic, classical and
//! Kantor–Knuth models, incidence checks, permutation groups, subtended
//! ovoids and the covers they induce.

pub mod bitset;
pub mod constructions;
pub mod coverings;
pub mod error;
pub mod galois;
pub mod incidence;
pub mod permgroups;
pub mod subtension;

pub use error::{Error, Result};
