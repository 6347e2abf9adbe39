//! Special functions, truncated power series and small dense linear algebra.

pub mod linalg;
pub mod series;
pub mod special;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the generic numerics run over (`f32` or `f64`).
pub trait Scalar: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static {}

pub use series::{MultiIndexSet, TruncatedSeries};
pub use special::{qpoch, qpoch_finite, qpow, qpow_re, theta, theta_prod, theta_quadruple_identity_residual};
