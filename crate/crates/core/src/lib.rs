//! Verification engine for the five-dimensional Einstein-Sasaki Y(p,q)
//! metrics: curvature, Killing-Yano forms, metric-cone parallelism and
//! geodesic first integrals.

pub mod chart;
pub mod dual;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod integrability;
pub mod par;
pub mod tensor;

pub use error::{Error, Result};
