//! Homogeneous monogenic polynomials solving the Riesz system in the unit
//! ball of R³, together with the numerical machinery to check orthonormality,
//! Bohr-type inequalities and hypercomplex-derivative estimates built on them.

pub mod basis;
pub mod bohr;
pub mod diff;
pub mod error;
pub mod quadrature;
pub mod quaternion;
pub mod series;
pub mod special;
pub mod sphere;

pub use basis::{
    enumerate_basis, eval_basis, exact_hyperderivative, pointwise_bound, BasisFrame, BasisIndex,
    Family, Hyperderivative,
};
pub use bohr::{
    bohr_sum, bohr_sup, derivative_bound_rhs, derivative_series_sum, majorant_radius,
    verify_derivative_bound, BohrVariant, BoundReport, MajorantConfig, RadiusReport,
};
pub use error::{Error, Result};
pub use quadrature::{gram_matrix, norm_table, BallRule, GramPart, NormTable};
pub use quaternion::{quat_mul, FieldFn, Point3, Quaternion, ReducedQuaternion};
pub use series::{
    decompose, evaluate, hyperderivative_series, max_modulus, project, sample_random, Constraint,
    MonogenicSeries,
};
pub use special::LegendreConvention;
