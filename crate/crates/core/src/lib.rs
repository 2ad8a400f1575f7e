//! Band selection and classification for hyperspectral images.
//!
//! The crate is organised around the processing chain:
//!
//! * [`cube`] holds the reflectance cube, its ground truth, quantization of
//!   bands into discrete symbols, the running band-average estimate and
//!   stratified train/test splitting.
//! * [`info`] provides plug-in histogram estimators for entropy, mutual
//!   information and interaction information, plus an exact oracle over
//!   explicit joint PMFs.
//! * [`select`] runs greedy forward selection under one of eight criteria
//!   (MIM, MIBF, MIFS, mRMR, NMIFS, JMI, DISR and MRMS).
//! * [`svm`] trains a one-vs-one RBF support vector machine with SMO.
//! * [`eval`] computes confusion matrices, OA/AA/kappa/specificity and
//!   renders classification maps.
//! * [`io`] reads and writes ENVI cubes, label rasters, synthetic fixtures,
//!   reports and traces.
//! * [`pipeline`] glues the above into select → split → train → evaluate runs.

pub mod cube;
pub mod error;
pub mod eval;
pub mod info;
pub mod io;
pub mod pipeline;
pub mod rng;
pub mod select;
pub mod svm;

pub use error::{Error, Result};
