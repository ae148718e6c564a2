//! Simulation and exact filtering of a Brownian motion `W` observed through
//! processes that reveal the signs of `W` at their own zeroes.
//!
//! Two observation models are covered:
//!
//! * **first kind**: `Y = B + alpha * int sgn(W_{g_s(Y)}) ds`, whose filter
//!   `E[W_t | F^Y_t] = sqrt(2 g_t / pi) tanh(alpha Y_t)` is continuous;
//! * **second kind**: `Y = B + alpha * int sgn(W_s) dL_s(Y)`, built from a skew
//!   Brownian motion, whose filter jumps only at the ends of excursions.
//!
//! Every closed form in [`filters`] is paired with a brute-force Monte Carlo
//! check in [`oracle`].
//!
//! ```
//! use azema::{paths::TimeGrid, rng::Seed, solvers, filters};
//!
//! let grid = TimeGrid::with_step(1.0, 1e-3).unwrap();
//! let sc = solvers::solve_first_kind_exact(&grid, Seed::new(7, 0), 1.0);
//! let m = filters::filter_first_kind(&sc, 1.0).unwrap();
//! assert!(m.abs() <= (2.0 / std::f64::consts::PI).sqrt());
//! ```

pub mod cli;
pub mod error;
pub mod filters;
pub mod functionals;
pub mod oracle;
pub mod paths;
pub mod quadrature;
pub mod rng;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
