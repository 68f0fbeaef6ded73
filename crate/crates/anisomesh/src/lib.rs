//! Anisotropic mesh adaptation for piecewise-linear finite elements in 2D.
//!
//! The crate builds symmetric positive definite metric fields from recovered
//! Hessians of a discrete solution, generates triangulations that are
//! quasi-uniform with respect to such a metric, and drives the classical
//! solve / estimate / adapt loop. Exact per-element expressions for the L²
//! and H¹ interpolation error of quadratic functions are included both as
//! building blocks for the metrics and as cross-checks for the estimator.

pub mod adapt;
pub mod experiment;
pub mod fem;
pub mod fields;
pub mod geom;
pub mod guide;
pub mod interp_error;
pub mod mesh;
pub mod metric;
pub mod problems;
pub mod quadrature;
pub mod recovery;
pub mod svg;
pub mod tensor;


pub use adapt::{adapt_mesh, adaptive_solve, AdaptConfig, AdaptReport};
pub use fields::{ScalarField, TensorField, TensorRole, VectorField};
pub use mesh::{build_mesh, structured_unit_square, ElementGeometry, TriMesh, VertexKind};
pub use metric::{normalize_metric, MetricKind, MetricParams};

pub use tensor::SymTensor2;

/// Errors reported by mesh construction, field operations and solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mesh is not conforming: {0}")]
    NonConforming(String),
    #[error("triangle {index} is degenerate (signed area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("vertex {0} is not referenced by any triangle")]
    DanglingVertex(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("point ({0:.6}, {1:.6}) lies outside the mesh")]
    PointOutsideDomain(f64, f64),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("unsupported dimension {0}, only 2 is handled")]
    UnsupportedDimension(usize),
    #[error("flooring parameter must be positive, got {0:.3e}")]
    NonPositiveAlpha(f64),
    #[error("tensor is not positive definite (eigenvalues {0:.3e}, {1:.3e})")]
    NotSpd(f64, f64),
    #[error("monitor field integrates to zero metric density")]
    ZeroSigma,
    #[error("field holds {field} values but the mesh has {expected}")]
    FieldSizeMismatch { field: usize, expected: usize },
    #[error("problem does not provide an exact {0}")]
    MissingExact(&'static str),
    #[error("boundary tag {tag} has {count} boundary conditions assigned, expected exactly one")]
    BoundaryCondition { tag: i32, count: usize },
    #[error("linear solve stalled at relative residual {residual:.3e} (target {target:.3e})")]
    SolverBreakdown { residual: f64, target: f64 },
    #[error("adaptation aborted at iteration {iteration}: {source}")]
    AdaptAborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
        /// Records of the iterations that completed before the failure.
        report: Box<adapt::AdaptReport>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
