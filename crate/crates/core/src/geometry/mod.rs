pub mod calculus;
pub mod curvature;
pub mod field;
pub mod metric;

pub use calculus::{codifferential, covariant_derivative_form, flat, hodge_star, sharp};
pub use curvature::{christoffel, einstein_residual, ricci, riemann, Connection};
pub use field::{exterior_derivative, FormField, FormJet, MonomialForm};
pub use metric::{inverse_metric, metric_cone, metric_ypq, MetricJet, MetricKind, MetricProvider};
