//! Vertex-based fields attached to a triangulation.

use crate::mesh::TriMesh;
use crate::tensor::SymTensor2;
use crate::{Error, Result};

/// What a tensor field represents; metrics must be SPD, Hessians need not be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorRole {
    Hessian,
    Metric,
}

/// One value per mesh vertex.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Self::new(vec![value; len])
    }

    /// Sample a function at every mesh vertex.
    pub fn from_fn(mesh: &TriMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::new(mesh.vertices().iter().map(|p| f(p[0], p[1])).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_bound(&self, mesh: &TriMesh) -> Result<()> {
        check_len(self.values.len(), mesh)
    }
}

/// One planar vector per mesh vertex.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub values: Vec<[f64; 2]>,
}

impl VectorField {
    pub fn new(values: Vec<[f64; 2]>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The two component scalar fields.
    pub fn components(&self) -> (ScalarField, ScalarField) {
        (
            ScalarField::new(self.values.iter().map(|v| v[0]).collect()),
            ScalarField::new(self.values.iter().map(|v| v[1]).collect()),
        )
    }

    pub fn check_bound(&self, mesh: &TriMesh) -> Result<()> {
        check_len(self.values.len(), mesh)
    }
}

/// One symmetric tensor per mesh vertex.
#[derive(Clone, Debug)]
pub struct TensorField {
    pub values: Vec<SymTensor2>,
    pub role: TensorRole,
}

impl TensorField {
    pub fn new(values: Vec<SymTensor2>, role: TensorRole) -> Self {
        Self { values, role }
    }

    /// Sample a tensor-valued function at every mesh vertex.
    pub fn from_fn(mesh: &TriMesh, role: TensorRole, f: impl Fn(f64, f64) -> SymTensor2) -> Self {
        Self::new(
            mesh.vertices().iter().map(|p| f(p[0], p[1])).collect(),
            role,
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_bound(&self, mesh: &TriMesh) -> Result<()> {
        check_len(self.values.len(), mesh)
    }

    /// Largest spectral radius over all vertices.
    pub fn max_spectral_radius(&self) -> f64 {
        self.values
            .iter()
            .map(|t| t.spectral_radius())
            .fold(0.0, f64::max)
    }
}

fn check_len(len: usize, mesh: &TriMesh) -> Result<()> {
    if len != mesh.n_vertices() {
        return Err(Error::FieldSizeMismatch {
            field: len,
            expected: mesh.n_vertices(),
        });
    }
    Ok(())
}
