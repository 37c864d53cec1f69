//! Phase-space quantum mechanics on a grid: the Moyal star product, Bopp
//! shift operators, and the Jacobi-elliptic box solution of the stationary
//! Gross-Pitaevskii equation in phase space together with its Wigner
//! function.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod gp_model;
pub mod phase_grid;
pub mod star_engine;
pub mod wigner_analysis;

pub use error::{Error, Result};
