//! Nonlinear solution of the discrete contact problem
//!
//! The discrete problem G(u) = (K + C)u + N(u) − b = 0 couples a fixed linear
//! part with the piecewise linear contact term N. Two strategies are offered:
//!
//! * fixed-point iteration on the contact set: u⁺ solves
//!   (K + C + J(u))u⁺ = b, the linear problem that imposes the contact
//!   conditions read off from the current iterate's active set;
//! * semismooth Newton: (K + C + J(u))δ = −G(u), u⁺ = u + damping·δ.
//!
//! Here J(u) is the active-set Jacobian of N. Because N(u) = J(u)u exactly
//! (N is linear on each fixed active set), the two strategies produce the
//! same iterates in exact arithmetic at damping 1; they traverse different
//! arithmetic (a direct solve for u⁺ against an increment solve), which makes
//! their agreement a meaningful cross-check of the assembly and solve paths.
//! A lagged-nonlinearity splitting u⁺ = (K + C)⁻¹(b − N(u)) is not offered:
//! its iteration matrix −(K + C)⁻¹J has spectral radius proportional to γ₀
//! and diverges for exactly the γ₀ range the method's stability requires.
//!
//! Both strategies stop when the relative increment ‖u⁺ − u‖_{1,h}/‖u⁺‖_{1,h}
//! falls under the configured tolerance, then polish with full Newton steps
//! until the residual reaches rounding level, so reported solutions are
//! strategy-independent far below the increment tolerance. A Newton run that
//! stalls (five consecutive non-decreasing increments) falls back to the
//! fixed-point form permanently.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use serde::Serialize;

use crate::analysis::norm_broken_h1;
use crate::cr_space::{CRSpace, DiscreteField};
use crate::error::FemError;
use crate::forms::{
    assemble_contact_jacobian, assemble_contact_linear, assemble_contact_nonlinear, assemble_load,
    assemble_stiffness, LinearSystem, NitscheParams,
};
use crate::problems::ProblemSpec;
use crate::sparse::CsrMatrix;

/// How the nonlinear contact term is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverStrategy {
    FixedPoint,
    SemismoothNewton,
}

/// Iteration controls. `damping` scales each update step and must lie in
/// (0, 1]; 1 is the plain undamped iteration.
#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    pub strategy: SolverStrategy,
    pub rel_increment_tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    #[serde(skip)]
    pub initial_guess: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: SolverStrategy::SemismoothNewton,
            rel_increment_tol: 1e-5,
            max_iter: 100,
            damping: 1.0,
            initial_guess: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n_dofs: usize) -> Result<(), FemError> {
        if !(self.rel_increment_tol > 0.0) || !self.rel_increment_tol.is_finite() {
            return Err(FemError::InvalidParameter(format!(
                "increment tolerance must be positive and finite, got {}",
                self.rel_increment_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(FemError::InvalidParameter(
                "iteration limit must be at least 1".to_string(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(FemError::InvalidParameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if let Some(guess) = &self.initial_guess {
            if guess.len() != n_dofs {
                return Err(FemError::DimensionMismatch(format!(
                    "initial guess has {} entries for {} dofs",
                    guess.len(),
                    n_dofs
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a nonlinear solve. `increment_history` holds the relative
/// increment of every iteration (one entry per iteration, polish steps
/// included); `iterations_to_increment_tol` is the first iteration whose
/// increment fell under the tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub increment_history: Vec<f64>,
    pub final_residual_norm: f64,
    pub iterations_to_increment_tol: Option<usize>,
    pub fell_back_to_fixed_point: bool,
}

/// A sparse LU factorization reusable across solves with different sides.
struct Factored {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl Factored {
    fn new(matrix: &CsrMatrix) -> Result<Self, FemError> {
        let triplets: Vec<Triplet<usize, usize, f64>> = matrix
            .entries()
            .map(|(i, j, v)| Triplet::new(i, j, v))
            .collect();
        let mat =
            SparseColMat::<usize, f64>::try_new_from_triplets(matrix.n_rows(), matrix.n_cols(), &triplets)
                .map_err(|e| FemError::InvalidParameter(format!("sparse assembly failed: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|_| FemError::SingularMatrix)?;
        Ok(Factored {
            lu,
            n: matrix.n_rows(),
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = faer::Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Direct sparse solve with a residual acceptance check: rejects solutions
/// whose residual exceeds 10⁻¹⁰(1 + ‖b‖₂), which also catches NaN.
pub fn solve_linear(system: &LinearSystem) -> Result<Vec<f64>, FemError> {
    let factored = Factored::new(&system.matrix)?;
    let x = factored.solve(&system.rhs);
    let ax = system.matrix.matvec(&x);
    let diff: Vec<f64> = ax.iter().zip(&system.rhs).map(|(a, b)| a - b).collect();
    let residual = l2(&diff);
    let bound = 1e-10 * (1.0 + l2(&system.rhs));
    if !(residual <= bound) {
        return Err(FemError::LinearSolveInaccurate { residual, bound });
    }
    Ok(x)
}

/// Solve the discrete contact problem on a classified space.
pub fn solve_nonlinear(
    space: &Arc<CRSpace>,
    params: &NitscheParams,
    problem: &ProblemSpec,
    config: &SolverConfig,
) -> Result<(DiscreteField, SolveReport), FemError> {
    let n = space.n_dofs();
    config.validate(n)?;
    let a = assemble_stiffness(space).add(&assemble_contact_linear(space, params));
    let load = assemble_load(space, |x, y| (problem.f)(x, y));
    let load_scale = 1.0 + inf_norm(&load);

    let as_field =
        |c: &[f64]| DiscreteField::from_coefficients(Arc::clone(space), c.to_vec());
    let h1 = |c: &[f64]| norm_broken_h1(&as_field(c));
    let residual_of = |field: &DiscreteField, nl: &[f64]| -> Vec<f64> {
        let mut r = a.matvec(&field.coefficients);
        for i in 0..n {
            r[i] += nl[i] - load[i];
        }
        r
    };

    let tol = config.rel_increment_tol;
    let mut u: Vec<f64> = config.initial_guess.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut history: Vec<f64> = Vec::new();
    let mut iterations_to_tol: Option<usize> = None;
    let mut fell_back = false;
    let mut use_newton = config.strategy == SolverStrategy::SemismoothNewton;
    let mut stall = 0usize;
    let mut prev_rel = f64::INFINITY;
    let mut converged = false;

    // Assembly is deterministic, so an unchanged active set reproduces the
    // Jacobian bitwise and the previous factorization can be reused.
    let mut cache: Option<(CsrMatrix, Factored)> = None;

    for iter in 1..=config.max_iter {
        let field = as_field(&u);
        let jac = assemble_contact_jacobian(space, params, &field);
        if cache.as_ref().map_or(true, |(j, _)| *j != jac) {
            let fac = Factored::new(&a.add(&jac))?;
            cache = Some((jac, fac));
        }
        let fac = &cache.as_ref().unwrap().1;
        let next: Vec<f64> = if use_newton {
            let nl = assemble_contact_nonlinear(space, params, &field);
            let g = residual_of(&field, &nl);
            let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
            let delta = fac.solve(&neg_g);
            u.iter()
                .zip(&delta)
                .map(|(&ui, &di)| ui + config.damping * di)
                .collect()
        } else {
            let target = fac.solve(&load);
            u.iter()
                .zip(&target)
                .map(|(&ui, &ti)| ui + config.damping * (ti - ui))
                .collect()
        };
        let diff: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        let inc = h1(&diff);
        let rel = if inc == 0.0 { 0.0 } else { inc / h1(&next) };
        history.push(rel);
        if rel < tol && iterations_to_tol.is_none() {
            iterations_to_tol = Some(iter);
        }
        if use_newton {
            if rel >= prev_rel {
                stall += 1;
            } else {
                stall = 0;
            }
            if stall >= 5 {
                use_newton = false;
                fell_back = true;
                stall = 0;
            }
        }
        prev_rel = rel;
        u = next;
        if rel < tol {
            converged = true;
            break;
        }
    }

    let mut res = {
        let field = as_field(&u);
        let nl = assemble_contact_nonlinear(space, params, &field);
        residual_of(&field, &nl)
    };
    let mut res_inf = inf_norm(&res);

    // Polish: both strategies finish with full Newton steps until the residual
    // reaches rounding level, so reported solutions are strategy-independent
    // far below the increment tolerance. Steps that would not pass the
    // increment test are discarded to keep the report invariants.
    if converged {
        for _ in 0..10 {
            if res_inf <= 1e-10 * load_scale {
                break;
            }
            let field = as_field(&u);
            let jac = assemble_contact_jacobian(space, params, &field);
            if cache.as_ref().map_or(true, |(j, _)| *j != jac) {
                let Ok(fac) = Factored::new(&a.add(&jac)) else {
                    break;
                };
                cache = Some((jac, fac));
            }
            let fac = &cache.as_ref().unwrap().1;
            let neg: Vec<f64> = res.iter().map(|v| -v).collect();
            let delta = fac.solve(&neg);
            let cand: Vec<f64> = u.iter().zip(&delta).map(|(&ui, &di)| ui + di).collect();
            let diff: Vec<f64> = cand.iter().zip(&u).map(|(a, b)| a - b).collect();
            let inc = h1(&diff);
            let rel = if inc == 0.0 { 0.0 } else { inc / h1(&cand) };
            if !(rel < tol) {
                break;
            }
            u = cand;
            history.push(rel);
            let field = as_field(&u);
            let nl = assemble_contact_nonlinear(space, params, &field);
            res = residual_of(&field, &nl);
            res_inf = inf_norm(&res);
        }
    }

    let report = SolveReport {
        converged,
        iterations: history.len(),
        increment_history: history,
        final_residual_norm: res_inf,
        iterations_to_increment_tol: iterations_to_tol,
        fell_back_to_fixed_point: fell_back,
    };
    Ok((as_field(&u), report))
}
