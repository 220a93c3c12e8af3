//! Exact symbolic engine for many-sorted universal algebra: terms, finite
//! algebras, clones of terms and operations, Hall and Bénabou algebras,
//! polyderivators and the transformations between them.

pub mod algebras;
pub mod clones;
pub mod error;
pub mod hallbenabou;
pub mod kernel;
pub mod morphisms;
pub mod random;
pub mod speclang;
pub mod terms;
pub mod transformations;

pub use error::{Error, Result};
