//! Exact chain-level homological algebra over the integers.

pub mod adams;
pub mod ainfty;
pub mod bimodule;
pub mod chains;
pub mod cli;
pub mod hocolim;
pub mod io;
pub mod lemmas;
pub mod library;
pub mod linalg;
pub mod quotient;
pub mod simplicial;
pub mod words;
