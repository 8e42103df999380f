//! Approximate nondominated solutions under variable domination structures.

pub mod error;
pub mod geometry;
mod numeric;

pub use error::{Error, Result};
pub mod graph;
pub mod scalarize;
pub mod solutions;
pub mod evp;
pub mod constants;
pub mod nonsmooth;
pub mod openness;
pub mod reduction;
pub mod instances_io;
pub mod vds;

use serde::{Deserialize, Serialize};

/// How strong the evidence behind a verdict is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Exact,
    Sampled,
}
