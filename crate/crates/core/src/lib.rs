//! Numerical and exact verification of the Stein's-method analysis of
//! `W = Tr(AO)` for Haar-distributed `O ∈ O(n)`.
//!
//! Layers, bottom up:
//!
//! - [`partitions`], [`symchars`], [`symfun`]: exact algebraic combinatorics
//!   (hooks, Murnaghan–Nakayama characters, Schur and zonal polynomials in
//!   the power-sum basis).
//! - [`matrix`], [`haar`]: dense linear algebra, Haar sampling, the
//!   normalized fixed matrix `A`.
//! - [`heatkernel`]: Brownian motion on `O(n)` and its generator.
//! - [`steinlab`]: Monte Carlo checks of every identity and of the
//!   total-variation bound `2√2/(n−1)`.

pub mod error;
pub mod haar;
pub mod heatkernel;
pub mod matrix;
pub mod partitions;
pub mod report;
pub mod rng;
pub mod steinlab;
pub mod symchars;
pub mod symfun;

pub use error::{Error, Result};
pub use haar::NormalizedA;
pub use matrix::SquareMatrix;
pub use partitions::Partition;
pub use report::{Criterion, EstimateReport};
pub use rng::SeedStream;
