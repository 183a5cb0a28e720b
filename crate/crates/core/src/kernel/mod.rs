//! Numerical kernel: scalars, grids, Fourier resampling, Gaussian algebra,
//! operators and quadrature.

pub mod fourier;
pub mod gauss;
pub mod grid;
pub mod operator;
pub mod quadrature;
pub mod scalar;

pub use fourier::{resample_axis, ChirpZ};
pub use gauss::{GaussSum, QuadExp};
pub use grid::{tensor, GridSpec, GridVector, TensorGridVector};
pub use operator::{operator_residual, residual_by, BatteryShape, DenseMatrix, LinearOperator, TestBattery};
pub use quadrature::{integrate, Rule};
pub use scalar::{beta, ebar, eta};
