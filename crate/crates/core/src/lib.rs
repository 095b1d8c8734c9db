//! Direction finding with sparse linear arrays by direct augmentation (DA)
//! and spatial smoothing (SS) followed by ESPRIT.
//!
//! The crate is `no_std` with `alloc`; enable the default `std` feature for
//! `std::error::Error` integration.
//!
//! ```
//! use sla_esprit::{analysis, esprit, signal_sim, SlaGeometry, SourceScene, Variant};
//!
//! let geom = SlaGeometry::mra6();
//! let scene = SourceScene::reference(1.0);
//! let y = signal_sim::sample_snapshots(&geom, &scene, 2000, 7).unwrap();
//! let est = esprit::estimate(&y, scene.num_sources(), Variant::Da).unwrap();
//! let md = analysis::matched_distance(&est.freqs, scene.freqs()).unwrap();
//! assert!(md < 0.05);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod array_model;
pub mod covariance;
mod error;
pub mod esprit;
pub mod fmath;
pub mod linalg;
pub mod signal_sim;

pub use array_model::{Coarray, SlaGeometry};
pub use covariance::{CovarianceSet, LagVector};
pub use error::{Error, Result};
pub use esprit::{FrequencyEstimate, Variant};
pub use linalg::{CMatrix, HermitianEig};
pub use num_complex::Complex64;
pub use signal_sim::{SnapshotMatrix, SourceScene};
