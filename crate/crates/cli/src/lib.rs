//! Command-line front end for `mhs-core`: expression syntax, evaluation,
//! the relation basis cache and certificate files.

pub mod app;
pub mod eval;
pub mod expr;
pub mod files;
