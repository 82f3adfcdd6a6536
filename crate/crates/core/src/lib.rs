//! Verification engine for homotopy-theoretic constructions in finite
//! presheaf categories.

pub mod audit;
pub mod cylinder;
pub mod error;
pub mod glue;
pub mod homotopy;
pub mod lcc;
pub mod lifting;
pub mod limits;
pub mod nerve;
pub mod presheaf;
pub mod search;
pub mod site;

pub use error::{Error, Result};
