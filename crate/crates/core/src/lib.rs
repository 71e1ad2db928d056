//! Set families, their symmetric-difference sumsets, VC dimension,
//! interpolation degree over prime fields and the Croot–Lev–Pach rank and
//! slice-rank machinery, with exhaustive and seeded checks of the bounds
//! relating them.

pub mod cli;
pub mod clp;
pub mod error;
pub mod family;
pub mod field;
pub mod interpolation;
pub mod vc;
pub mod verify;

pub use error::{Error, Result};
