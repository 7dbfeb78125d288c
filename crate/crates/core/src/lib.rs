//! Spectral toolkit for nonnegative matrices and integral kernels: compound
//! and Kronecker squares, total-nonnegativity certificates, Nyström
//! discretization, and a verdict engine for the second eigenvalue of
//! 2-totally nonnegative operators.

mod cx;
mod par;
pub mod seed;

pub mod compound;
pub mod error;
pub mod gk;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod positivity;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
