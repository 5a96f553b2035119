//! Structured triangulations of the unit square [0,1]² with boundary faces
//! classified into Dirichlet, Neumann, and contact parts.
//!
//! The target boundary layout is
//!
//! ```text
//!   Γ_D = [0,1]×{1}   (top, homogeneous Dirichlet)
//!   Γ_N = {0,1}×[0,1] (sides, homogeneous Neumann)
//!   Γ_C = [0,1]×{0}   (bottom, unilateral contact)
//! ```
//!
//! Meshes are built from an n×n grid of cells, each split by one diagonal; the
//! Union Jack pattern alternates the diagonal with the parity of the cell, so
//! h = √2/n and the level parameter of the convergence studies is h/√2 = 1/n.
//! A built mesh is immutable; refinement means rebuilding at 2n.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::FemError;

/// Classification of a boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
    Contact,
}

/// Diagonal layout of the structured grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagonalPattern {
    /// Diagonal direction alternates with the parity of i + j over cells.
    UnionJack,
    /// Every cell uses the lower-left to upper-right diagonal.
    Uniform,
}

/// An edge of the triangulation: a vertex pair with incident-triangle
/// adjacency and an optional boundary tag.
#[derive(Debug, Clone)]
pub struct Face {
    /// Endpoint vertex ids, ascending.
    pub vertices: (usize, usize),
    /// Incident triangles; the second is None exactly on the boundary.
    pub triangles: (usize, Option<usize>),
    /// Boundary classification; None for interior faces and for boundary faces
    /// of a mesh that has not been classified yet.
    pub tag: Option<BoundaryTag>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.triangles.1.is_none()
    }

    pub fn is_interior(&self) -> bool {
        !self.is_boundary()
    }
}

/// Triangulation of the unit square. Triangles are counterclockwise;
/// `triangle_faces[t][k]` is the face opposite local vertex k of triangle t,
/// which is the face carrying the k-th local Crouzeix–Raviart basis function.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub triangle_faces: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// Maximum element diameter, √2/n for these meshes.
    pub h: f64,
    /// Cells per side.
    pub n: usize,
    pub pattern: DiagonalPattern,
}

/// Build the structured n×n triangulation (2n² triangles).
pub fn build_unit_square_mesh(n: usize, pattern: DiagonalPattern) -> Result<Mesh, FemError> {
    if n == 0 {
        return Err(FemError::InvalidResolution(0));
    }
    let step = 1.0 / n as f64;
    let vid = |i: usize, j: usize| j * (n + 1) + i;

    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * step, j as f64 * step]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let d = vid(i, j + 1);
            if cell_uses_ac_diagonal(pattern, i, j) {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    // Faces in first-encounter order over (triangle, opposite-vertex) pairs;
    // this order is what the degree-of-freedom numbering inherits.
    let mut face_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces: Vec<Face> = Vec::new();
    let mut triangle_faces = vec![[usize::MAX; 3]; triangles.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (p, q) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let key = (p.min(q), p.max(q));
            let f = *face_index.entry(key).or_insert_with(|| {
                faces.push(Face {
                    vertices: key,
                    triangles: (t, None),
                    tag: None,
                });
                faces.len() - 1
            });
            if faces[f].triangles.0 != t {
                assert!(
                    faces[f].triangles.1.is_none(),
                    "face shared by more than two triangles"
                );
                faces[f].triangles.1 = Some(t);
            }
            triangle_faces[t][k] = f;
        }
    }

    let mesh = Mesh {
        vertices,
        triangles,
        triangle_faces,
        faces,
        h: 2.0_f64.sqrt() * step,
        n,
        pattern,
    };
    for t in 0..mesh.triangles.len() {
        assert!(
            mesh.triangle_area(t) > 0.0,
            "triangle {t} is not counterclockwise"
        );
    }
    assert_eq!(
        mesh.faces.len(),
        mesh.vertices.len() + mesh.triangles.len() - 1,
        "Euler relation violated"
    );
    Ok(mesh)
}

fn cell_uses_ac_diagonal(pattern: DiagonalPattern, i: usize, j: usize) -> bool {
    match pattern {
        DiagonalPattern::Uniform => true,
        DiagonalPattern::UnionJack => (i + j) % 2 == 0,
    }
}

/// Tag every boundary face by applying `tagger` to its midpoint. Fails if any
/// boundary face is left untagged.
pub fn classify_boundary(
    mut mesh: Mesh,
    tagger: &dyn Fn(f64, f64) -> Option<BoundaryTag>,
) -> Result<Mesh, FemError> {
    for f in 0..mesh.faces.len() {
        if !mesh.faces[f].is_boundary() {
            continue;
        }
        let [x, y] = mesh.face_midpoint(f);
        match tagger(x, y) {
            Some(tag) => mesh.faces[f].tag = Some(tag),
            None => return Err(FemError::UntaggedBoundaryFace { face: f, x, y }),
        }
    }
    Ok(mesh)
}

/// The standard boundary layout: contact at y = 0, Dirichlet at y = 1, Neumann
/// on the two vertical sides.
pub fn standard_tagger() -> impl Fn(f64, f64) -> Option<BoundaryTag> {
    |x: f64, y: f64| {
        let tol = 1e-12;
        if y.abs() < tol {
            Some(BoundaryTag::Contact)
        } else if (y - 1.0).abs() < tol {
            Some(BoundaryTag::Dirichlet)
        } else if x.abs() < tol || (x - 1.0).abs() < tol {
            Some(BoundaryTag::Neumann)
        } else {
            None
        }
    }
}

/// Length of a face and its unit normal pointing out of the given incident
/// triangle. On boundary faces with `side = triangles.0` this is the outward
/// normal of the domain.
///
/// # Panics
/// Panics if `side` is not incident to the face.
pub fn face_geometry(mesh: &Mesh, face: usize, side: usize) -> (f64, [f64; 2]) {
    let f = &mesh.faces[face];
    assert!(
        f.triangles.0 == side || f.triangles.1 == Some(side),
        "triangle {side} is not incident to face {face}"
    );
    let [x0, y0] = mesh.vertices[f.vertices.0];
    let [x1, y1] = mesh.vertices[f.vertices.1];
    let (tx, ty) = (x1 - x0, y1 - y0);
    let length = f64::hypot(tx, ty);
    let mut normal = [ty / length, -tx / length];
    // Orient away from the triangle's vertex opposite this face.
    let opp = mesh.triangles[side]
        .iter()
        .copied()
        .find(|&v| v != f.vertices.0 && v != f.vertices.1)
        .expect("incident triangle must have an off-face vertex");
    let [ox, oy] = mesh.vertices[opp];
    let mid = mesh.face_midpoint(face);
    if (mid[0] - ox) * normal[0] + (mid[1] - oy) * normal[1] < 0.0 {
        normal = [-normal[0], -normal[1]];
    }
    (length, normal)
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let [ax, ay] = self.vertices[a];
        let [bx, by] = self.vertices[b];
        let [cx, cy] = self.vertices[c];
        0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_midpoint(&self, f: usize) -> [f64; 2] {
        let (a, b) = self.faces[f].vertices;
        let [ax, ay] = self.vertices[a];
        let [bx, by] = self.vertices[b];
        [0.5 * (ax + bx), 0.5 * (ay + by)]
    }

    pub fn face_length(&self, f: usize) -> f64 {
        let (a, b) = self.faces[f].vertices;
        let [ax, ay] = self.vertices[a];
        let [bx, by] = self.vertices[b];
        f64::hypot(bx - ax, by - ay)
    }

    /// Outward normal of a boundary face.
    pub fn outward_normal(&self, f: usize) -> Result<[f64; 2], FemError> {
        if !self.faces[f].is_boundary() {
            return Err(FemError::NotBoundaryFace(f));
        }
        Ok(face_geometry(self, f, self.faces[f].triangles.0).1)
    }

    /// Indices of contact-tagged faces, ascending.
    pub fn contact_faces(&self) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| self.faces[f].tag == Some(BoundaryTag::Contact))
            .collect()
    }

    /// Barycentric coordinates of a point with respect to a triangle.
    pub fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [pa, pb, pc] = self.triangle_points(t);
        let two_area = 2.0 * self.triangle_area(t);
        let cross = |o: [f64; 2], u: [f64; 2], v: [f64; 2]| {
            (u[0] - o[0]) * (v[1] - o[1]) - (v[0] - o[0]) * (u[1] - o[1])
        };
        [
            cross(pb, pc, p) / two_area,
            cross(pc, pa, p) / two_area,
            cross(pa, pb, p) / two_area,
        ]
    }

    /// Physical point of a barycentric coordinate triple.
    pub fn barycentric_to_point(&self, t: usize, lambda: [f64; 3]) -> [f64; 2] {
        let pts = self.triangle_points(t);
        let mut p = [0.0, 0.0];
        for k in 0..3 {
            p[0] += lambda[k] * pts[k][0];
            p[1] += lambda[k] * pts[k][1];
        }
        p
    }

    /// Gradients of the three barycentric coordinate functions.
    pub fn barycentric_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [pa, pb, pc] = self.triangle_points(t);
        let two_area = 2.0 * self.triangle_area(t);
        let rot = |from: [f64; 2], to: [f64; 2]| {
            [-(to[1] - from[1]) / two_area, (to[0] - from[0]) / two_area]
        };
        // ∇λ_k is the rotated opposite edge, traversed counterclockwise.
        [rot(pb, pc), rot(pc, pa), rot(pa, pb)]
    }

    /// Triangle containing a point of the unit square, found by grid-cell
    /// arithmetic (no search).
    pub fn locate(&self, p: [f64; 2]) -> usize {
        let n = self.n;
        let cell = |v: f64| ((v * n as f64).floor() as usize).min(n - 1);
        let (i, j) = (cell(p[0]), cell(p[1]));
        let xi = p[0] * n as f64 - i as f64;
        let eta = p[1] * n as f64 - j as f64;
        let base = 2 * (j * n + i);
        if cell_uses_ac_diagonal(self.pattern, i, j) {
            // Diagonal from (i, j) to (i+1, j+1): below it lies [a,b,c].
            if eta <= xi {
                base
            } else {
                base + 1
            }
        } else if xi + eta <= 1.0 {
            base
        } else {
            base + 1
        }
    }
}
