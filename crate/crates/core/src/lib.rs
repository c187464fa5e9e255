//! Numerical workbench for compositions `f ↦ f∘ψ` under weighted derivative bounds.
//!
//! Weights and their Young conjugates, weight sequences, an exact
//! Faà di Bruno engine, model functions with derivative jets, and
//! experiment runners that evaluate inequality chains row by row.

pub mod error;
pub mod experiments;
pub mod fdb;
pub mod functions;
pub mod grid;
pub mod lognum;
pub mod par;
pub mod quad;
pub mod report;
pub mod sequences;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
pub use grid::Grid;
pub use lognum::LogNum;
pub use report::{ChainReport, ChainRow, Check};
