//! Crouzeix–Raviart nonconforming P1 space: one degree of freedom per face
//! (the face mean), with Dirichlet-face dofs eliminated.
//!
//! On a triangle, the basis function carried by face F is φ_F = 1 − 2λ_v where
//! λ_v is the barycentric coordinate of the vertex opposite F. It equals 1
//! identically along F and has zero mean on the triangle's other two faces, so
//! fields are continuous in face averages only. At a corner with local index m
//! the three basis functions take the values 1 − 2δ_{km}.

use std::sync::Arc;

use crate::error::FemError;
use crate::mesh::{BoundaryTag, Mesh};
use crate::quadrature::EdgeRule;

/// The face-dof space over a mesh. Faces tagged Dirichlet are constrained to
/// zero and carry no degree of freedom.
#[derive(Debug)]
pub struct CRSpace {
    pub mesh: Arc<Mesh>,
    /// Global dof of each face; None for constrained faces.
    pub dof_of_face: Vec<Option<usize>>,
    /// Inverse map, ordered by dof index.
    pub face_of_dof: Vec<usize>,
}

impl CRSpace {
    pub fn new(mesh: Arc<Mesh>) -> Arc<Self> {
        let mut dof_of_face = vec![None; mesh.faces.len()];
        let mut face_of_dof = Vec::with_capacity(mesh.faces.len());
        for (f, face) in mesh.faces.iter().enumerate() {
            if face.tag == Some(BoundaryTag::Dirichlet) {
                continue;
            }
            dof_of_face[f] = Some(face_of_dof.len());
            face_of_dof.push(f);
        }
        Arc::new(CRSpace {
            mesh,
            dof_of_face,
            face_of_dof,
        })
    }

    /// Number of unconstrained degrees of freedom.
    pub fn n_dofs(&self) -> usize {
        self.face_of_dof.len()
    }

    pub fn n_constrained(&self) -> usize {
        self.mesh.faces.len() - self.n_dofs()
    }

    /// Global dofs of a triangle's three faces, indexed like `triangle_faces`.
    pub fn triangle_dofs(&self, t: usize) -> [Option<usize>; 3] {
        let faces = self.mesh.triangle_faces[t];
        [
            self.dof_of_face[faces[0]],
            self.dof_of_face[faces[1]],
            self.dof_of_face[faces[2]],
        ]
    }
}

/// A coefficient vector over a [`CRSpace`]; constrained dofs are implicitly
/// zero.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub space: Arc<CRSpace>,
    pub coefficients: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(space: Arc<CRSpace>) -> Self {
        let n = space.n_dofs();
        DiscreteField {
            space,
            coefficients: vec![0.0; n],
        }
    }

    pub fn from_coefficients(space: Arc<CRSpace>, coefficients: Vec<f64>) -> Self {
        assert_eq!(
            coefficients.len(),
            space.n_dofs(),
            "coefficient count must match the space"
        );
        DiscreteField {
            space,
            coefficients,
        }
    }

    /// Coefficient on a face, zero for constrained faces.
    pub fn coefficient_on_face(&self, face: usize) -> f64 {
        match self.space.dof_of_face[face] {
            Some(dof) => self.coefficients[dof],
            None => 0.0,
        }
    }

    fn local_coefficients(&self, t: usize) -> [f64; 3] {
        let faces = self.space.mesh.triangle_faces[t];
        [
            self.coefficient_on_face(faces[0]),
            self.coefficient_on_face(faces[1]),
            self.coefficient_on_face(faces[2]),
        ]
    }

    /// Value at a point of the closed triangle `t`. Points outside the triangle
    /// beyond a 1e-12 barycentric slack are rejected.
    pub fn evaluate(&self, t: usize, p: [f64; 2]) -> Result<f64, FemError> {
        let lambda = self.space.mesh.barycentric(t, p);
        let slack = lambda.into_iter().fold(f64::INFINITY, f64::min);
        if slack < -1e-12 {
            return Err(FemError::PointOutsideTriangle {
                triangle: t,
                x: p[0],
                y: p[1],
                slack,
            });
        }
        let c = self.local_coefficients(t);
        Ok((0..3).map(|k| c[k] * (1.0 - 2.0 * lambda[k])).sum())
    }

    /// The constant gradient of the affine restriction to triangle `t`.
    pub fn element_gradient(&self, t: usize) -> [f64; 2] {
        let grads = self.space.mesh.barycentric_gradients(t);
        let c = self.local_coefficients(t);
        let mut g = [0.0, 0.0];
        for k in 0..3 {
            g[0] -= 2.0 * c[k] * grads[k][0];
            g[1] -= 2.0 * c[k] * grads[k][1];
        }
        g
    }

    /// Outward normal derivative on a boundary face (constant along the face).
    pub fn normal_derivative(&self, face: usize) -> Result<f64, FemError> {
        let mesh = &self.space.mesh;
        if !mesh.faces[face].is_boundary() {
            return Err(FemError::NotBoundaryFace(face));
        }
        let t = mesh.faces[face].triangles.0;
        let g = self.element_gradient(t);
        let (_, normal) = crate::mesh::face_geometry(mesh, face, t);
        Ok(g[0] * normal[0] + g[1] * normal[1])
    }

    /// Trace values at the face endpoints (in `Face::vertices` order), taken
    /// from the first incident triangle.
    pub fn face_trace(&self, face: usize) -> (f64, f64) {
        let mesh = &self.space.mesh;
        let t = mesh.faces[face].triangles.0;
        let c = self.local_coefficients(t);
        let sum: f64 = c.iter().sum();
        let vertex_value = |v: usize| {
            let m = mesh.triangles[t]
                .iter()
                .position(|&w| w == v)
                .expect("face endpoint must be a triangle corner");
            // φ_k(corner m) = 1 − 2δ_{km}.
            sum - 2.0 * c[m]
        };
        let (a, b) = mesh.faces[face].vertices;
        (vertex_value(a), vertex_value(b))
    }

    /// Mean over a face, from the side of the given incident triangle.
    pub fn face_mean_from(&self, face: usize, t: usize) -> f64 {
        let mesh = &self.space.mesh;
        let c = self.local_coefficients(t);
        let sum: f64 = c.iter().sum();
        let (a, b) = mesh.faces[face].vertices;
        let value_at = |v: usize| {
            let m = mesh.triangles[t]
                .iter()
                .position(|&w| w == v)
                .expect("face endpoint must be a triangle corner");
            sum - 2.0 * c[m]
        };
        // The trace is affine, so the mean is the midpoint value.
        0.5 * (value_at(a) + value_at(b))
    }

    /// self − other, over the same space.
    pub fn sub(&self, other: &DiscreteField) -> DiscreteField {
        assert!(
            Arc::ptr_eq(&self.space, &other.space),
            "fields must share a space"
        );
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a - b)
            .collect();
        DiscreteField {
            space: Arc::clone(&self.space),
            coefficients,
        }
    }
}

/// Interpolate a function into the space: the dof on each face is the face
/// mean of `g`, computed with 2-point Gauss (exact through cubic traces).
pub fn cr_interpolate(space: &Arc<CRSpace>, g: impl Fn(f64, f64) -> f64) -> DiscreteField {
    let mesh = &space.mesh;
    let rule = EdgeRule::two_point();
    let mut coefficients = vec![0.0; space.n_dofs()];
    for (dof, &f) in space.face_of_dof.iter().enumerate() {
        let (a, b) = mesh.faces[f].vertices;
        let [ax, ay] = mesh.vertices[a];
        let [bx, by] = mesh.vertices[b];
        // Mean = integral with the length factor dropped.
        coefficients[dof] = rule.integrate(1.0, |t| g(ax + t * (bx - ax), ay + t * (by - ay)));
    }
    DiscreteField {
        space: Arc::clone(space),
        coefficients,
    }
}
