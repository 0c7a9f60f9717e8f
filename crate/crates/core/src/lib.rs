#![allow(clippy::needless_range_loop)]

//! Polarimetric SAR classification toolkit.
//!
//! The pipeline mirrors a standard quad-pol processing chain:
//!
//! 1. **types / eigen** - complex scattering vectors, 3x3 Hermitian coherency
//!    matrices, multi-looking and a Jacobi eigensolver.
//! 2. **speckle** - boxcar multi-looking of single-look complex data and a
//!    span-driven Lee MMSE refinement filter.
//! 3. **decomposition** - entropy / anisotropy / mean-alpha parameters from
//!    the per-pixel eigendecomposition.
//! 4. **wishart** - supervised maximum-likelihood classification under the
//!    complex Wishart model.
//! 5. **svm** - kernel SVM with an SMO solver, one-vs-one multiclass voting.
//! 6. **synth** - synthetic scene generator sampling class-conditional
//!    complex Wishart pixels, used as ground truth for testing.
//! 7. **eval** - confusion matrices and accuracy summaries.
//! 8. **io** - on-disk formats (T3/SLC plane datasets, PGM masks, PPM class
//!    maps, model files, pipeline configuration).

pub mod decomposition;
pub mod eigen;
pub mod error;
pub mod eval;
pub mod io;
pub mod speckle;
pub mod svm;
pub mod synth;
pub mod types;
pub mod wishart;

pub use error::{Error, Result};
