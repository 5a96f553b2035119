//! Norms, error measures, and convergence diagnostics
//!
//! The broken norms used throughout are
//!
//! ```text
//!   ‖v‖_{1,h} = ‖∇v‖_h + ‖v‖_Ω ,
//!   ‖v‖_{1,C} = ‖v‖_{1,h} + γ^{1/2}‖∂ₙv‖_Γc + γ^{−1/2}‖v‖_Γc ,
//! ```
//!
//! where ‖∇v‖_h is the element-wise gradient seminorm. For piecewise affine
//! fields every integral here is evaluated exactly: the element mass is
//! diagonal in the face basis, face traces are affine, and the contact
//! residual splits each face at the sign change of Pγ(u).

use std::sync::Arc;

use serde::Serialize;

use crate::cr_space::{CRSpace, DiscreteField};
use crate::error::FemError;
use crate::forms::{self, positive_part, NitscheParams};
use crate::mesh::face_geometry;
use crate::problems::ExactSolution;
use crate::quadrature::{EdgeRule, TriangleRule};

/// Error measures of one solve on one mesh.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub n_dofs: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub contact_residual: f64,
    pub iterations: usize,
}

/// A refinement study: per-level errors and the observed convergence orders,
/// one per consecutive pair of levels (`None` wherever a rate is undefined).
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<ErrorReport>,
    pub eoc_l2: Vec<Option<f64>>,
    pub eoc_h1: Vec<Option<f64>>,
    pub eoc_residual: Vec<Option<f64>>,
}

impl ConvergenceReport {
    pub fn from_levels(levels: Vec<ErrorReport>) -> Result<Self, FemError> {
        let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let pick = |f: &dyn Fn(&ErrorReport) -> f64| -> Vec<f64> { levels.iter().map(f).collect() };
        let eoc_l2 = eoc(&pick(&|l| l.err_l2), &hs)?;
        let eoc_h1 = eoc(&pick(&|l| l.err_h1), &hs)?;
        let eoc_residual = eoc(&pick(&|l| l.contact_residual), &hs)?;
        Ok(ConvergenceReport {
            levels,
            eoc_l2,
            eoc_h1,
            eoc_residual,
        })
    }
}

/// L² norm, exact for piecewise affine fields: the face basis is orthogonal in
/// the edge-midpoint inner product, so ∫_κ v² = (|κ|/3)Σc_k².
pub fn norm_l2(field: &DiscreteField) -> f64 {
    let mesh = &field.space.mesh;
    let mut acc = 0.0;
    for t in 0..mesh.triangles.len() {
        let area = mesh.triangle_area(t);
        let faces = mesh.triangle_faces[t];
        let sum_sq: f64 = faces
            .iter()
            .map(|&f| field.coefficient_on_face(f).powi(2))
            .sum();
        acc += area / 3.0 * sum_sq;
    }
    acc.sqrt()
}

/// Broken gradient seminorm (Σ_κ |κ| |∇v|_κ|²)^{1/2}, exact.
pub fn norm_broken_gradient(field: &DiscreteField) -> f64 {
    let mesh = &field.space.mesh;
    let mut acc = 0.0;
    for t in 0..mesh.triangles.len() {
        let g = field.element_gradient(t);
        acc += mesh.triangle_area(t) * (g[0] * g[0] + g[1] * g[1]);
    }
    acc.sqrt()
}

/// Broken H¹ norm ‖∇v‖_h + ‖v‖_Ω.
pub fn norm_broken_h1(field: &DiscreteField) -> f64 {
    norm_broken_gradient(field) + norm_l2(field)
}

/// The two contact-boundary contributions to ‖·‖_{1,C}: the scaled flux term
/// γ^{1/2}‖∂ₙv‖_Γc and the scaled trace term γ^{−1/2}‖v‖_Γc.
pub fn norm_1c_parts(field: &DiscreteField, params: &NitscheParams) -> (f64, f64) {
    let mesh = &field.space.mesh;
    let gamma = params.gamma(mesh.h);
    let mut flux_sq = 0.0;
    let mut trace_sq = 0.0;
    for face in mesh.contact_faces() {
        let ell = mesh.face_length(face);
        let dn = field
            .normal_derivative(face)
            .expect("contact faces are boundary faces");
        flux_sq += ell * dn * dn;
        let (a, b) = field.face_trace(face);
        trace_sq += ell / 3.0 * (a * a + a * b + b * b);
    }
    (gamma.sqrt() * flux_sq.sqrt(), trace_sq.sqrt() / gamma.sqrt())
}

/// Contact-adapted norm ‖v‖_{1,C}.
pub fn norm_1c(field: &DiscreteField, params: &NitscheParams) -> f64 {
    let (flux, trace) = norm_1c_parts(field, params);
    norm_broken_h1(field) + flux + trace
}

/// L² and broken H¹ errors against a closed-form solution, by element-wise
/// quadrature of degree at least 4. Returns (err_l2, err_h1) with
/// err_h1 = ‖∇(u_h − u)‖_h + ‖u_h − u‖_Ω.
pub fn error_vs_exact(
    field: &DiscreteField,
    exact: &ExactSolution,
    rule: &TriangleRule,
) -> Result<(f64, f64), FemError> {
    if rule.degree < 4 {
        return Err(FemError::InvalidParameter(format!(
            "error quadrature must have degree at least 4, got {}",
            rule.degree
        )));
    }
    let mesh = &field.space.mesh;
    let mut l2_sq = 0.0;
    let mut grad_sq = 0.0;
    for t in 0..mesh.triangles.len() {
        let area = mesh.triangle_area(t);
        let gh = field.element_gradient(t);
        l2_sq += rule.integrate(area, |lambda| {
            let p = mesh.barycentric_to_point(t, lambda);
            let vh = field
                .evaluate(t, p)
                .expect("quadrature point lies in its triangle");
            (vh - (exact.u)(p[0], p[1])).powi(2)
        });
        grad_sq += rule.integrate(area, |lambda| {
            let p = mesh.barycentric_to_point(t, lambda);
            let g = (exact.grad)(p[0], p[1]);
            (gh[0] - g[0]).powi(2) + (gh[1] - g[1]).powi(2)
        });
    }
    let l2 = l2_sq.sqrt();
    Ok((l2, grad_sq.sqrt() + l2))
}

/// Quadrature values of ‖u‖_Ω and ‖u‖_{1,h} = ‖∇u‖ + ‖u‖ for a closed-form
/// function, used to normalize absolute errors.
pub fn exact_norms(
    mesh: &crate::mesh::Mesh,
    exact: &ExactSolution,
    rule: &TriangleRule,
) -> (f64, f64) {
    let mut l2_sq = 0.0;
    let mut grad_sq = 0.0;
    for t in 0..mesh.triangles.len() {
        let area = mesh.triangle_area(t);
        l2_sq += rule.integrate(area, |lambda| {
            let p = mesh.barycentric_to_point(t, lambda);
            (exact.u)(p[0], p[1]).powi(2)
        });
        grad_sq += rule.integrate(area, |lambda| {
            let p = mesh.barycentric_to_point(t, lambda);
            let g = (exact.grad)(p[0], p[1]);
            g[0] * g[0] + g[1] * g[1]
        });
    }
    let l2 = l2_sq.sqrt();
    (l2, grad_sq.sqrt() + l2)
}

/// Contact complementarity residual ‖u_h + [Pγ(u_h)]₊‖_Γc. Zero exactly when
/// the discrete trace satisfies the pointwise contact conditions; integrated
/// exactly by splitting each face at the sign change of Pγ(u_h).
pub fn contact_residual(field: &DiscreteField, params: &NitscheParams) -> f64 {
    let mesh = &field.space.mesh;
    let rule = EdgeRule::two_point();
    let mut acc = 0.0;
    for face in mesh.contact_faces() {
        let (p0, p1) = forms::eval_p_gamma_on_face(field, face, params)
            .expect("contact faces admit Pγ evaluation");
        let (t0, t1) = field.face_trace(face);
        let ell = mesh.face_length(face);
        let mut segments: Vec<(f64, f64, bool)> = Vec::with_capacity(2);
        match forms::active_interval(p0, p1) {
            None => segments.push((0.0, 1.0, false)),
            Some((a, b)) => {
                if a > 0.0 {
                    segments.push((0.0, a, false));
                }
                segments.push((a, b, true));
                if b < 1.0 {
                    segments.push((b, 1.0, false));
                }
            }
        }
        for (a, b, active) in segments {
            for (t, w) in rule.points.iter().zip(&rule.weights) {
                let s = a + (b - a) * t;
                let tr = t0 + (t1 - t0) * s;
                let p = if active { p0 + (p1 - p0) * s } else { 0.0 };
                acc += ell * (b - a) * w * (tr + positive_part(p)).powi(2);
            }
        }
    }
    acc.sqrt()
}

/// Observed convergence orders: one rate log(e_i/e_{i+1})/log(h_i/h_{i+1})
/// per consecutive pair of levels, so the result is one shorter than the
/// input. A vanishing error makes that pair's rate `None`.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<Option<f64>>, FemError> {
    if errors.len() != hs.len() {
        return Err(FemError::DimensionMismatch(format!(
            "{} errors against {} mesh sizes",
            errors.len(),
            hs.len()
        )));
    }
    if errors.len() < 2 {
        return Err(FemError::InvalidParameter(
            "convergence orders need at least two levels".to_string(),
        ));
    }
    if errors.iter().any(|&e| e < 0.0 || !e.is_finite()) {
        return Err(FemError::InvalidParameter(
            "errors must be finite and nonnegative".to_string(),
        ));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) || hs.iter().any(|&h| h <= 0.0) {
        return Err(FemError::InvalidParameter(
            "mesh sizes must be positive and strictly decreasing".to_string(),
        ));
    }
    let mut rates = vec![None; errors.len().saturating_sub(1)];
    for i in 1..errors.len() {
        if errors[i - 1] > 0.0 && errors[i] > 0.0 {
            rates[i - 1] = Some((errors[i - 1] / errors[i]).ln() / (hs[i - 1] / hs[i]).ln());
        }
    }
    Ok(rates)
}

/// The flux-matching field used in the stability argument: given target
/// normal-derivative values r_F on the contact faces, sets the dof of each
/// contact face to r_F divided by its own basis function's normal derivative
/// and every other dof to zero. The result has ∂ₙv = r_F exactly on each
/// contact face, exactly zero mean on every other face, and support in the
/// contact-adjacent elements.
pub fn lemma1_construct(space: &Arc<CRSpace>, r: &[f64]) -> Result<DiscreteField, FemError> {
    let mesh = &space.mesh;
    let contact = mesh.contact_faces();
    if contact.is_empty() {
        return Err(FemError::InvalidParameter(
            "mesh has no contact faces".to_string(),
        ));
    }
    if r.len() != contact.len() {
        return Err(FemError::DimensionMismatch(format!(
            "{} target values for {} contact faces",
            r.len(),
            contact.len()
        )));
    }
    let mut coeffs = vec![0.0; space.n_dofs()];
    for (&face, &target) in contact.iter().zip(r) {
        let t = mesh.faces[face].triangles.0;
        let faces = mesh.triangle_faces[t];
        if faces
            .iter()
            .filter(|&&f| mesh.faces[f].tag == Some(crate::mesh::BoundaryTag::Contact))
            .count()
            > 1
        {
            return Err(FemError::InvalidParameter(format!(
                "triangle {t} touches the contact boundary with more than one face"
            )));
        }
        let local = faces
            .iter()
            .position(|&f| f == face)
            .expect("incident triangle contains its face");
        let grads = mesh.barycentric_gradients(t);
        let (_, normal) = face_geometry(mesh, face, t);
        let dn_own = -2.0 * (grads[local][0] * normal[0] + grads[local][1] * normal[1]);
        if dn_own == 0.0 {
            return Err(FemError::InvalidParameter(format!(
                "face {face} has a degenerate own-basis normal derivative"
            )));
        }
        let dof = space.dof_of_face[face].expect("contact faces are unconstrained");
        coeffs[dof] = target / dn_own;
    }
    Ok(DiscreteField::from_coefficients(Arc::clone(space), coeffs))
}

/// L² and broken H¹ distance between a coarse solve and a finer reference on
/// a nested mesh of the same diagonal pattern, integrated with the given rule
/// over the coarse elements. Returns (err_l2, err_h1) with the same
/// convention as `error_vs_exact`.
pub fn compare_to_reference(
    coarse: &DiscreteField,
    reference: &DiscreteField,
    rule: &TriangleRule,
) -> Result<(f64, f64), FemError> {
    let cm = &coarse.space.mesh;
    let rm = &reference.space.mesh;
    if cm.pattern != rm.pattern {
        return Err(FemError::IncompatibleMeshes(
            "diagonal patterns differ".to_string(),
        ));
    }
    if rm.n % cm.n != 0 {
        return Err(FemError::IncompatibleMeshes(format!(
            "reference resolution {} is not a multiple of {}",
            rm.n, cm.n
        )));
    }
    if rule.degree < 4 {
        return Err(FemError::InvalidParameter(format!(
            "error quadrature must have degree at least 4, got {}",
            rule.degree
        )));
    }
    let mut l2_sq = 0.0;
    let mut grad_sq = 0.0;
    for t in 0..cm.triangles.len() {
        let area = cm.triangle_area(t);
        let gh = coarse.element_gradient(t);
        for (lambda, w) in rule.points.iter().zip(&rule.weights) {
            let p = cm.barycentric_to_point(t, *lambda);
            let vh = coarse
                .evaluate(t, p)
                .expect("quadrature point lies in its triangle");
            let tr = rm.locate(p);
            let vr = reference.evaluate(tr, p)?;
            let gr = reference.element_gradient(tr);
            l2_sq += area * w * (vh - vr).powi(2);
            grad_sq += area * w * ((gh[0] - gr[0]).powi(2) + (gh[1] - gr[1]).powi(2));
        }
    }
    let l2 = l2_sq.sqrt();
    Ok((l2, grad_sq.sqrt() + l2))
}
