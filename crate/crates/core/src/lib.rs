//! Separation of point and curve singularities by one pass of wavelet and
//! curvelet thresholding, with coherence, sparsity and phase-space diagnostics.

pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod frame_kernel;
pub mod harness;
pub mod nufft;
pub mod quadrature;
pub mod separation;
pub mod targets;

pub use error::{Error, Result};
