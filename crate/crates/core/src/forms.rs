//! Assembly of the discrete Nitsche contact formulation
//!
//! ```text
//!   A(u, v) = a(u, v) − ⟨∂ₙu, v⟩_Γc + θ₁⟨u, ∂ₙv⟩_Γc + θ₂γ⁻¹⟨u, v⟩_Γc
//!           + ⟨[Pγ(u)]₊, θ₁∂ₙv + θ₂γ⁻¹v⟩_Γc ,     Pγ(u) = γ∂ₙu − u ,
//! ```
//!
//! split into the broken stiffness a(u,v) = Σ_κ (∇u, ∇v)_κ, the linear contact
//! coupling, and the nonlinear positive-part term. On each contact face Pγ(u)
//! is affine, so the face is split at the sign change and every integral below
//! is exact (2-point Gauss on subsegments of polynomial degree ≤ 2).

use serde::Serialize;

use crate::cr_space::{CRSpace, DiscreteField};
use crate::error::FemError;
use crate::mesh::{face_geometry, BoundaryTag};
use crate::quadrature::EdgeRule;
use crate::sparse::CsrMatrix;

/// Parameters of the Nitsche family: γ₀ > 0 with γ = γ₀h, and the variant
/// selectors θ₁ ∈ {−1, 0, 1}, θ₂ ∈ {0, 1}. (θ₁, θ₂) = (1, 0) is the
/// penalty-free nonsymmetric method.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NitscheParams {
    gamma0: f64,
    theta1: f64,
    theta2: f64,
}

impl NitscheParams {
    pub fn new(gamma0: f64, theta1: f64, theta2: f64) -> Result<Self, FemError> {
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(FemError::InvalidParameter(format!(
                "gamma0 must be positive and finite, got {gamma0}"
            )));
        }
        if ![-1.0, 0.0, 1.0].contains(&theta1) {
            return Err(FemError::InvalidParameter(format!(
                "theta1 must be -1, 0, or 1, got {theta1}"
            )));
        }
        if ![0.0, 1.0].contains(&theta2) {
            return Err(FemError::InvalidParameter(format!(
                "theta2 must be 0 or 1, got {theta2}"
            )));
        }
        Ok(NitscheParams {
            gamma0,
            theta1,
            theta2,
        })
    }

    /// The penalty-free nonsymmetric variant (θ₁, θ₂) = (1, 0).
    pub fn penalty_free(gamma0: f64) -> Result<Self, FemError> {
        Self::new(gamma0, 1.0, 0.0)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Nitsche parameter on a mesh of size h.
    pub fn gamma(&self, h: f64) -> f64 {
        self.gamma0 * h
    }
}

/// Assembled linear system over the unconstrained dofs.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub symmetric: bool,
}

/// [x]₊ = max(0, x).
#[inline]
pub fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

/// Element stiffness matrix ∫_κ ∇φ_i·∇φ_j for the three face basis functions,
/// indexed by the opposite vertex.
pub fn local_stiffness(p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let two_area = cross(p[0], p[1], p[2]);
    assert!(two_area > 0.0, "triangle must be counterclockwise");
    let rot = |from: [f64; 2], to: [f64; 2]| {
        [-(to[1] - from[1]) / two_area, (to[0] - from[0]) / two_area]
    };
    let lam = [rot(p[1], p[2]), rot(p[2], p[0]), rot(p[0], p[1])];
    let area = 0.5 * two_area;
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // ∇φ_k = −2∇λ_k, so the product carries a factor 4.
            k[i][j] = 4.0 * area * (lam[i][0] * lam[j][0] + lam[i][1] * lam[j][1]);
        }
    }
    k
}

/// Element load vector ∫_κ f φ_k by the edge-midpoint rule: the basis is 1 at
/// its own face midpoint and 0 at the others, so the entry is area/3 · f(m_k).
pub fn local_load(p: [[f64; 2]; 3], f: &dyn Fn(f64, f64) -> f64) -> [f64; 3] {
    let area = 0.5 * cross(p[0], p[1], p[2]);
    let mut load = [0.0; 3];
    for k in 0..3 {
        let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        load[k] = area / 3.0 * f(m[0], m[1]);
    }
    load
}

/// Broken stiffness matrix Σ_κ (∇u, ∇v)_κ over unconstrained dofs. Symmetric
/// positive semidefinite; definite once Dirichlet dofs are eliminated.
pub fn assemble_stiffness(space: &CRSpace) -> CsrMatrix {
    let mesh = &space.mesh;
    let n = space.n_dofs();
    let mut triplets = Vec::with_capacity(9 * mesh.triangles.len());
    for t in 0..mesh.triangles.len() {
        let k = local_stiffness(mesh.triangle_points(t));
        let dofs = space.triangle_dofs(t);
        for i in 0..3 {
            let Some(gi) = dofs[i] else { continue };
            for j in 0..3 {
                let Some(gj) = dofs[j] else { continue };
                triplets.push((gi, gj, k[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

/// Load vector (f, φ)_Ω over unconstrained dofs.
pub fn assemble_load(space: &CRSpace, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mesh = &space.mesh;
    let mut load = vec![0.0; space.n_dofs()];
    for t in 0..mesh.triangles.len() {
        let local = local_load(mesh.triangle_points(t), &f);
        let dofs = space.triangle_dofs(t);
        for k in 0..3 {
            if let Some(g) = dofs[k] {
                load[g] += local[k];
            }
        }
    }
    load
}

/// Per-face data for contact assembly: the incident triangle's three dofs,
/// their constant normal derivatives, and their trace endpoint values in
/// `Face::vertices` order.
struct ContactFace {
    length: f64,
    dofs: [Option<usize>; 3],
    dn: [f64; 3],
    trace: [(f64, f64); 3],
}

fn contact_face_data(space: &CRSpace, face: usize) -> ContactFace {
    let mesh = &space.mesh;
    let t = mesh.faces[face].triangles.0;
    let (length, normal) = face_geometry(mesh, face, t);
    let grads = mesh.barycentric_gradients(t);
    let (va, vb) = mesh.faces[face].vertices;
    let tri = mesh.triangles[t];
    let local_of = |v: usize| {
        tri.iter()
            .position(|&w| w == v)
            .expect("face endpoint must be a corner of the incident triangle")
    };
    let (ma, mb) = (local_of(va), local_of(vb));
    let mut dn = [0.0; 3];
    let mut trace = [(0.0, 0.0); 3];
    for k in 0..3 {
        dn[k] = -2.0 * (grads[k][0] * normal[0] + grads[k][1] * normal[1]);
        // φ_k at a corner with local index m is 1 − 2δ_{km}.
        trace[k] = (
            1.0 - 2.0 * ((k == ma) as i32 as f64),
            1.0 - 2.0 * ((k == mb) as i32 as f64),
        );
    }
    ContactFace {
        length,
        dofs: space.triangle_dofs(t),
        dn,
        trace,
    }
}

/// Linear contact coupling: per contact face,
/// −⟨∂ₙφ_j, φ_i⟩ + θ₁⟨φ_j, ∂ₙφ_i⟩ + θ₂γ⁻¹⟨φ_j, φ_i⟩ with row i (test) and
/// column j (trial). Nonsymmetric unless θ₁ = −1.
pub fn assemble_contact_linear(space: &CRSpace, params: &NitscheParams) -> CsrMatrix {
    let mesh = &space.mesh;
    let n = space.n_dofs();
    let gamma = params.gamma(mesh.h);
    let mut triplets = Vec::new();
    for face in mesh.contact_faces() {
        let data = contact_face_data(space, face);
        let ell = data.length;
        // ∫_F φ_j ds = ℓ for the face's own basis and 0 for the other two, so
        // the flux terms live in the row and column of the face dof.
        let own = space.dof_of_face[face].map(|d| {
            data.dofs
                .iter()
                .position(|&g| g == Some(d))
                .expect("face dof must be local to the incident triangle")
        });
        if let Some(local_own) = own {
            let row = data.dofs[local_own].expect("own dof exists");
            for j in 0..3 {
                if let Some(col) = data.dofs[j] {
                    triplets.push((row, col, -ell * data.dn[j]));
                }
            }
            for i in 0..3 {
                if let Some(r) = data.dofs[i] {
                    triplets.push((r, row, params.theta1 * ell * data.dn[i]));
                }
            }
        }
        if params.theta2 != 0.0 {
            for i in 0..3 {
                let Some(r) = data.dofs[i] else { continue };
                for j in 0..3 {
                    let Some(c) = data.dofs[j] else { continue };
                    let (a0, a1) = data.trace[i];
                    let (b0, b1) = data.trace[j];
                    // ∫ of a product of affine endpoint interpolants.
                    let mass = ell / 6.0 * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1);
                    triplets.push((r, c, params.theta2 / gamma * mass));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

/// Endpoint values of the affine function Pγ(u) = γ∂ₙu − u on a contact face,
/// in `Face::vertices` order.
pub fn eval_p_gamma_on_face(
    u: &DiscreteField,
    face: usize,
    params: &NitscheParams,
) -> Result<(f64, f64), FemError> {
    let mesh = &u.space.mesh;
    if mesh.faces[face].tag != Some(BoundaryTag::Contact) {
        return Err(FemError::NotContactFace(face));
    }
    let gamma = params.gamma(mesh.h);
    let dn = u.normal_derivative(face)?;
    let (t0, t1) = u.face_trace(face);
    Ok((gamma * dn - t0, gamma * dn - t1))
}

/// Parameter subinterval of [0, 1] where the affine function with endpoint
/// values (p0, p1) is positive. Endpoints at exactly zero are inactive.
pub(crate) fn active_interval(p0: f64, p1: f64) -> Option<(f64, f64)> {
    match (p0 > 0.0, p1 > 0.0) {
        (false, false) => None,
        (true, true) => Some((0.0, 1.0)),
        (true, false) => Some((0.0, p0 / (p0 - p1))),
        (false, true) => Some((p0 / (p0 - p1), 1.0)),
    }
}

/// ∫_F [p]₊ q ds for affine p, q given by endpoint values on a face of the
/// given length; exact via splitting at the root of p.
pub fn integrate_positive_part_times_affine(
    p: (f64, f64),
    q: (f64, f64),
    length: f64,
) -> f64 {
    let Some((a, b)) = active_interval(p.0, p.1) else {
        return 0.0;
    };
    let rule = EdgeRule::two_point();
    let mut acc = 0.0;
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        let s = a + (b - a) * t;
        let pv = p.0 + (p.1 - p.0) * s;
        let qv = q.0 + (q.1 - q.0) * s;
        acc += w * pv * qv;
    }
    length * (b - a) * acc
}

/// ∫ f g ds over the subset of the face where p > 0, for affine p, f, g;
/// exact via the same splitting.
pub fn integrate_affine_product_on_active(
    p: (f64, f64),
    f: (f64, f64),
    g: (f64, f64),
    length: f64,
) -> f64 {
    let Some((a, b)) = active_interval(p.0, p.1) else {
        return 0.0;
    };
    let rule = EdgeRule::two_point();
    let mut acc = 0.0;
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        let s = a + (b - a) * t;
        let fv = f.0 + (f.1 - f.0) * s;
        let gv = g.0 + (g.1 - g.0) * s;
        acc += w * fv * gv;
    }
    length * (b - a) * acc
}

/// Nonlinear contact term N(u): entries ⟨[Pγ(u)]₊, θ₁∂ₙφ_i + θ₂γ⁻¹φ_i⟩_Γc.
pub fn assemble_contact_nonlinear(
    space: &CRSpace,
    params: &NitscheParams,
    u: &DiscreteField,
) -> Vec<f64> {
    let mesh = &space.mesh;
    let gamma = params.gamma(mesh.h);
    let mut out = vec![0.0; space.n_dofs()];
    for face in mesh.contact_faces() {
        let data = contact_face_data(space, face);
        let p = p_gamma_endpoints(&data, u, gamma);
        for i in 0..3 {
            let Some(g) = data.dofs[i] else { continue };
            let (a0, a1) = data.trace[i];
            let q = (
                params.theta1 * data.dn[i] + params.theta2 / gamma * a0,
                params.theta1 * data.dn[i] + params.theta2 / gamma * a1,
            );
            out[g] += integrate_positive_part_times_affine(p, q, data.length);
        }
    }
    out
}

/// Semismooth (generalized) derivative of N at u: on each subsegment where
/// Pγ(u) > 0 the pair (i, j) contributes ⟨γ∂ₙφ_j − φ_j, θ₁∂ₙφ_i + θ₂γ⁻¹φ_i⟩;
/// subsegments with Pγ(u) ≤ 0 contribute nothing.
pub fn assemble_contact_jacobian(
    space: &CRSpace,
    params: &NitscheParams,
    u: &DiscreteField,
) -> CsrMatrix {
    let mesh = &space.mesh;
    let n = space.n_dofs();
    let gamma = params.gamma(mesh.h);
    let mut triplets = Vec::new();
    for face in mesh.contact_faces() {
        let data = contact_face_data(space, face);
        let p = p_gamma_endpoints(&data, u, gamma);
        for i in 0..3 {
            let Some(r) = data.dofs[i] else { continue };
            let (a0, a1) = data.trace[i];
            let test = (
                params.theta1 * data.dn[i] + params.theta2 / gamma * a0,
                params.theta1 * data.dn[i] + params.theta2 / gamma * a1,
            );
            for j in 0..3 {
                let Some(c) = data.dofs[j] else { continue };
                let (b0, b1) = data.trace[j];
                let trial = (gamma * data.dn[j] - b0, gamma * data.dn[j] - b1);
                let v = integrate_affine_product_on_active(p, trial, test, data.length);
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets)
}

/// Endpoint values of Pγ(u) on a contact face, computed from the assembled
/// face data (identical to `eval_p_gamma_on_face`, avoiding re-derivation).
fn p_gamma_endpoints(data: &ContactFace, u: &DiscreteField, gamma: f64) -> (f64, f64) {
    let mut dn_u = 0.0;
    let mut tr0 = 0.0;
    let mut tr1 = 0.0;
    for k in 0..3 {
        let c = data.dofs[k].map_or(0.0, |g| u.coefficients[g]);
        dn_u += c * data.dn[k];
        tr0 += c * data.trace[k].0;
        tr1 += c * data.trace[k].1;
    }
    (gamma * dn_u - tr0, gamma * dn_u - tr1)
}

/// Residual G(u) = (K + C)u + N(u) − load of the discrete problem.
pub fn residual(
    space: &CRSpace,
    params: &NitscheParams,
    u: &DiscreteField,
    load: &[f64],
) -> Result<Vec<f64>, FemError> {
    if load.len() != space.n_dofs() {
        return Err(FemError::DimensionMismatch(format!(
            "load has {} entries for {} dofs",
            load.len(),
            space.n_dofs()
        )));
    }
    let a = assemble_stiffness(space).add(&assemble_contact_linear(space, params));
    let mut r = a.matvec(&u.coefficients);
    let nl = assemble_contact_nonlinear(space, params, u);
    for i in 0..r.len() {
        r[i] += nl[i] - load[i];
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cr_space::{cr_interpolate, CRSpace};
    use crate::mesh::{build_unit_square_mesh, classify_boundary, standard_tagger, DiagonalPattern};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn classified_space(n: usize) -> Arc<CRSpace> {
        let mesh = build_unit_square_mesh(n, DiagonalPattern::UnionJack).unwrap();
        let mesh = classify_boundary(mesh, &standard_tagger()).unwrap();
        CRSpace::new(Arc::new(mesh))
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(2.0), 2.0);
        assert_eq!(positive_part(-3.0), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(-0.0), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(NitscheParams::new(10.0, 1.0, 0.0).is_ok());
        assert!(NitscheParams::new(0.0, 1.0, 0.0).is_err());
        assert!(NitscheParams::new(-1.0, 1.0, 0.0).is_err());
        assert!(NitscheParams::new(10.0, 0.5, 0.0).is_err());
        assert!(NitscheParams::new(10.0, 1.0, 2.0).is_err());
        let p = NitscheParams::penalty_free(10.0).unwrap();
        assert_eq!((p.theta1(), p.theta2()), (1.0, 0.0));
        assert_relative_eq!(p.gamma(0.1), 1.0);
    }

    #[test]
    fn unit_right_triangle_stiffness() {
        let k = local_stiffness([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let expected = [[4.0, -2.0, -2.0], [-2.0, 2.0, 0.0], [-2.0, 0.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(k[i][j], expected[i][j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn local_stiffness_rows_sum_to_zero() {
        let k = local_stiffness([[0.2, 0.1], [0.9, 0.3], [0.4, 0.8]]);
        for row in k {
            let sum: f64 = row.iter().sum();
            assert_relative_eq!(sum, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn unit_right_triangle_load() {
        let load = local_load([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &|_, _| 1.0);
        for entry in load {
            assert_relative_eq!(entry, 1.0 / 6.0, epsilon = 1e-15);
        }
        // Σφ_k = 1, so a constant source integrates to the element area.
        let sum: f64 = load.iter().sum();
        assert_relative_eq!(sum, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn global_stiffness_is_symmetric() {
        let space = classified_space(3);
        let k = assemble_stiffness(&space);
        for (i, j, v) in k.entries() {
            assert_eq!(v, k.get(j, i), "K[{i}][{j}] asymmetric");
        }
    }

    #[test]
    fn stiffness_kernel_is_constants_without_dirichlet() {
        let mesh = build_unit_square_mesh(3, DiagonalPattern::UnionJack).unwrap();
        let space = CRSpace::new(Arc::new(mesh));
        let k = assemble_stiffness(&space);
        let ones = vec![1.0; space.n_dofs()];
        for v in k.matvec(&ones) {
            assert_relative_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn stiffness_is_positive_definite_with_dirichlet() {
        let space = classified_space(2);
        let k = assemble_stiffness(&space);
        let mut x = vec![0.0; space.n_dofs()];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((i * 2654435761) % 1000) as f64 / 1000.0 - 0.3;
        }
        let kx = k.matvec(&x);
        let energy: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
        assert!(energy > 1e-10, "energy {energy} not positive");
    }

    #[test]
    fn penalty_free_contact_matrix_is_skew_symmetric() {
        let space = classified_space(3);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let c = assemble_contact_linear(&space, &params);
        for (i, j, v) in c.entries() {
            assert_eq!(v, -c.get(j, i), "C[{i}][{j}] not skew");
        }
    }

    #[test]
    fn symmetric_variant_contact_matrix_is_symmetric() {
        let space = classified_space(3);
        let params = NitscheParams::new(10.0, -1.0, 1.0).unwrap();
        let c = assemble_contact_linear(&space, &params);
        for (i, j, v) in c.entries() {
            assert_eq!(v, c.get(j, i), "C[{i}][{j}] asymmetric");
        }
    }

    #[test]
    fn theta2_zero_leaves_no_mass_entries() {
        // With θ₂ = 0 every entry involves the contact-face dof as row or
        // column; pairs of non-contact dofs stay empty.
        let space = classified_space(2);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let c = assemble_contact_linear(&space, &params);
        let contact_dofs: Vec<usize> = space
            .mesh
            .contact_faces()
            .iter()
            .map(|&f| space.dof_of_face[f].unwrap())
            .collect();
        for (i, j, v) in c.entries() {
            if v != 0.0 {
                assert!(
                    contact_dofs.contains(&i) || contact_dofs.contains(&j),
                    "unexpected entry ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn contact_flux_entries_match_hand_values() {
        // n = 1: the bottom face's triangle has basis normal derivatives
        // 2 (own face), −2 (diagonal), 0 (right face).
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let c = assemble_contact_linear(&space, &params);
        let mesh = &space.mesh;
        let bottom = mesh.contact_faces()[0];
        let t = mesh.faces[bottom].triangles.0;
        let faces = mesh.triangle_faces[t];
        let dof_of = |f: usize| space.dof_of_face[f].unwrap();
        let diag = (0..3)
            .map(|k| faces[k])
            .find(|&f| mesh.faces[f].is_interior())
            .unwrap();
        let row = dof_of(bottom);
        // −⟨∂ₙφ_diag, φ_bottom⟩ = −ℓ·(−2) = 2; θ₁⟨φ_diag, ∂ₙφ_bottom⟩ lives in
        // the transposed position.
        assert_relative_eq!(c.get(row, dof_of(diag)), 2.0, epsilon = 1e-13);
        assert_relative_eq!(c.get(dof_of(diag), row), -2.0, epsilon = 1e-13);
        // Diagonal entry cancels for θ₁ = 1.
        assert_relative_eq!(c.get(row, row), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn p_gamma_on_zero_field() {
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let u = crate::cr_space::DiscreteField::zeros(Arc::clone(&space));
        let f = space.mesh.contact_faces()[0];
        assert_eq!(eval_p_gamma_on_face(&u, f, &params).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn p_gamma_arithmetic_example() {
        // u = −0.5 − 2y has ∂ₙu = 2 and trace −0.5 on the bottom; with γ = 0.1
        // this gives Pγ = 0.1·2 + 0.5 = 0.7 at both endpoints.
        let space = classified_space(1);
        let h = space.mesh.h;
        let params = NitscheParams::penalty_free(0.1 / h).unwrap();
        let u = cr_interpolate(&space, |_, y| -0.5 - 2.0 * y);
        let f = space.mesh.contact_faces()[0];
        let (p0, p1) = eval_p_gamma_on_face(&u, f, &params).unwrap();
        assert_relative_eq!(p0, 0.7, epsilon = 1e-13);
        assert_relative_eq!(p1, 0.7, epsilon = 1e-13);
    }

    #[test]
    fn p_gamma_sign_flip_example() {
        // u = −1 + 2x has zero normal derivative on the bottom and endpoint
        // traces (−1, 1), so Pγ = −u = (1, −1) for any γ.
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(37.0).unwrap();
        let u = cr_interpolate(&space, |x, _| -1.0 + 2.0 * x);
        let f = space.mesh.contact_faces()[0];
        let (p0, p1) = eval_p_gamma_on_face(&u, f, &params).unwrap();
        assert_relative_eq!(p0, 1.0, epsilon = 1e-13);
        assert_relative_eq!(p1, -1.0, epsilon = 1e-13);
    }

    #[test]
    fn p_gamma_rejects_non_contact_faces() {
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let u = crate::cr_space::DiscreteField::zeros(Arc::clone(&space));
        let neumann = (0..space.mesh.faces.len())
            .find(|&f| space.mesh.faces[f].tag == Some(BoundaryTag::Neumann))
            .unwrap();
        assert!(matches!(
            eval_p_gamma_on_face(&u, neumann, &params),
            Err(FemError::NotContactFace(_))
        ));
    }

    #[test]
    fn nonlinear_term_vanishes_when_p_gamma_negative() {
        let space = classified_space(2);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        // u ≡ 1 near the contact boundary gives Pγ = −1 < 0 everywhere.
        let u = cr_interpolate(&space, |_, _| 1.0);
        let n = assemble_contact_nonlinear(&space, &params, &u);
        assert!(n.iter().all(|&v| v == 0.0));
        let j = assemble_contact_jacobian(&space, &params, &u);
        assert_eq!(j.nnz(), 0);
    }

    #[test]
    fn half_active_face_integrates_to_quarter_triangle() {
        // Pγ endpoints (−1, 1): ∫[Pγ]₊ over the face is ℓ/4, so for θ₂ = 0 the
        // entries are ∂ₙφ_k·ℓ/4 with ∂ₙφ = (2, −2, 0) on the n = 1 mesh.
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(37.0).unwrap();
        let u = cr_interpolate(&space, |x, _| 1.0 - 2.0 * x);
        let f = space.mesh.contact_faces()[0];
        let (p0, p1) = eval_p_gamma_on_face(&u, f, &params).unwrap();
        assert_relative_eq!(p0, -1.0, epsilon = 1e-13);
        assert_relative_eq!(p1, 1.0, epsilon = 1e-13);
        let nvec = assemble_contact_nonlinear(&space, &params, &u);
        let mesh = &space.mesh;
        let t = mesh.faces[f].triangles.0;
        let faces = mesh.triangle_faces[t];
        let mut expected = vec![0.0; space.n_dofs()];
        for k in 0..3 {
            let dn = {
                let grads = mesh.barycentric_gradients(t);
                let (_, normal) = face_geometry(mesh, f, t);
                -2.0 * (grads[k][0] * normal[0] + grads[k][1] * normal[1])
            };
            if let Some(g) = space.dof_of_face[faces[k]] {
                expected[g] = dn / 4.0;
            }
        }
        for (got, want) in nvec.iter().zip(&expected) {
            assert_relative_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn fully_active_nonlinearity_matches_jacobian_action() {
        // u ≡ −1 gives Pγ = 1 > 0 everywhere, so N(u) equals the active
        // bilinear form applied to u.
        for (theta1, theta2) in [(1.0, 0.0), (1.0, 1.0), (-1.0, 1.0)] {
            let space = classified_space(2);
            let params = NitscheParams::new(10.0, theta1, theta2).unwrap();
            let u = cr_interpolate(&space, |_, _| -1.0);
            let n = assemble_contact_nonlinear(&space, &params, &u);
            let j = assemble_contact_jacobian(&space, &params, &u);
            let ju = j.matvec(&u.coefficients);
            for (a, b) in n.iter().zip(&ju) {
                assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn residual_of_zero_is_negated_load() {
        let space = classified_space(2);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let u = crate::cr_space::DiscreteField::zeros(Arc::clone(&space));
        let load = assemble_load(&space, |_, _| 1.0);
        let r = residual(&space, &params, &u, &load).unwrap();
        for (ri, bi) in r.iter().zip(&load) {
            assert_relative_eq!(ri, &-bi, epsilon = 1e-15);
        }
    }

    #[test]
    fn residual_is_affine_in_the_load() {
        let space = classified_space(2);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let u = cr_interpolate(&space, |x, y| -x * y);
        let load = assemble_load(&space, |x, _| 1.0 + x);
        let double: Vec<f64> = load.iter().map(|v| 2.0 * v).collect();
        let r1 = residual(&space, &params, &u, &load).unwrap();
        let r2 = residual(&space, &params, &u, &double).unwrap();
        for i in 0..load.len() {
            assert_relative_eq!(r2[i] - r1[i], -load[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn residual_rejects_wrong_dimensions() {
        let space = classified_space(1);
        let params = NitscheParams::penalty_free(10.0).unwrap();
        let u = crate::cr_space::DiscreteField::zeros(Arc::clone(&space));
        assert!(matches!(
            residual(&space, &params, &u, &[1.0, 2.0]),
            Err(FemError::DimensionMismatch(_))
        ));
    }
}
