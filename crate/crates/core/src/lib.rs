//! Numerical toolkit for capacities of Lévy-process image sets: Lévy exponents,
//! gauge functions, energies of discrete measures, the Fourier-side capacity
//! criterion, minimal-energy solvers and Monte Carlo checks.
//!
//! The model, measure and kernel types are generic over the scalar; the
//! aliases below fix it to `f64` (or `f32`).

pub mod casebook;
pub mod criterion;
pub mod equilibrium;
pub mod error;
pub mod gauge;
pub mod json;
pub mod levy;
pub mod linalg;
pub mod measure;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use gauge::{GaugeControls, GaugeValue, SignPart};
pub use levy::{ExponentValue, JumpAtom, StablePart};
pub use measure::{DiagonalPolicy, MeasureFile, SetGrid};
pub use scalar::Real;

pub type Triplet = levy::LevyTriplet<f64>;
pub type Triplet32 = levy::LevyTriplet<f32>;
pub type Measure = measure::DiscreteMeasure<f64>;
pub type Measure32 = measure::DiscreteMeasure<f32>;
pub type Kernel = measure::KernelMatrix<f64>;
pub type Kernel32 = measure::KernelMatrix<f32>;
