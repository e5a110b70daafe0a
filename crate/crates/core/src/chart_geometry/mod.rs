//! Finite-difference tensor calculus on a single coordinate chart.

pub mod chart;
pub mod connection;
pub mod curvature;
pub mod fd;
pub mod forms;
pub mod tensor;

pub use chart::{metric_inverse, Chart, Domain};
pub use connection::{
    christoffel, covariant_derivative, covariant_derivative_field, gradient, rough_laplacian,
    second_covariant_derivative,
};
pub use curvature::{ricci_operator, riemann, sectional_curvature, Riemann};
pub use fd::{FdConfig, FdOrder, TolClass};
pub use forms::{exterior_derivative, lie_derivative_11};
pub use tensor::{Array3, TensorField, Valence};
