//! Symbol calculus for Mellin and Fourier convolution operators on the half-line.

pub mod error;
pub mod fredholm;
pub mod io;
pub mod kernel;
pub mod lab;
pub mod mellin;
pub mod multiplier;
pub mod quad;
pub mod rectangle;
pub mod special;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
