//! Boundary quantum affine KZ equations for the spin representation of the
//! affine Hecke algebra of type C: power series solutions, elliptic connection
//! matrices, dynamical R- and K-matrices and numerical identity checks.
//!
//! The special functions and series arithmetic in [`numerics`] are generic
//! over the real scalar; everything built on dense linear algebra runs in
//! double precision through the aliases below.

pub mod baxter_face;
pub mod elliptic_connection;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod principal_series;
pub mod qkz_series;
pub mod qkzb;
pub mod spin_rep;
pub mod trig_cocycle;
pub mod weylc;

pub use error::{QkzError, Result};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type Series64 = numerics::TruncatedSeries<f64>;
pub type Series32 = numerics::TruncatedSeries<f32>;
