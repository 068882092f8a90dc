//! Gaussian continuous-variable quantum information toolkit.
//!
//! States are described by a covariance matrix `γ` and a displacement vector
//! `d` in interleaved quadrature ordering `(x1, p1, x2, p2, …)`. The vacuum has
//! `γ = I`, so a vacuum quadrature variance is `1/2`.
//!
//! The crate is organised by subsystem:
//!
//! - [`state`]: the [`GaussianState`] type, constructors, symplectic spectra,
//!   entropy, partial trace and Wigner function.
//! - [`ops`]: Gaussian unitaries as [`SymplecticTransform`]s plus homodyne,
//!   heterodyne and Bell measurements.
//! - [`channels`]: Gaussian channels `γ ↦ XᵀγX + Y` and lossy-channel capacity.
//! - [`entanglement`]: partial transposition, two-mode standard form, the
//!   Simon and Giedke separability tests, distillability, symmetrization and
//!   tripartite classification.
//! - [`protocols`]: teleportation, entanglement swapping, dense coding,
//!   beam-splitter entangler, cloning and shift-code error bounds.
//! - [`qkd`]: detector/QBER model and decoy-state tagged-bit verification.
//! - [`estimation`]: heterodyne estimation, Fisher information and distances
//!   on the displaced-thermal family.
//!
//! All operations are pure functions of their inputs. Sampling routines take
//! an explicit seed and use [`rng::SeededRng`].

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod entanglement;
mod error;
pub mod estimation;
pub mod linalg;
pub mod ops;
pub mod protocols;
pub mod qkd;
pub mod rng;
pub mod state;

pub use channels::GaussianChannel;
pub use entanglement::{PartySplit, SeparabilityVerdict, TwoModeStandardForm, Verdict};
pub use error::{Error, Result};
pub use estimation::GaussianFamilyPoint;
pub use ops::{MeasurementRecord, Outcome, SymplecticTransform};
pub use qkd::{DecoyBounds, DecoyObservation, DetectorModel};
pub use state::{g_function, GaussianState, SymplecticSpectrum};

pub use nalgebra::{DMatrix, DVector, Matrix2};
pub use num_complex::Complex64;
