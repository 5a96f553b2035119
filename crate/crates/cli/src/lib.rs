//! Experiment runner: refinement studies of the contact solver with CSV,
//! JSON, and VTK report writers
//!
//! A study sweeps meshes n = 16·2^i for i = 0..levels, solves the configured
//! problem on each, measures relative errors (against the exact solution when
//! one is known, otherwise against a fine same-method reference solve), and
//! attaches observed convergence orders. The binary exposes every knob as a
//! flag; this library exposes the same functionality callable from tests.

pub mod csv;
pub mod json;
pub mod vtk;

use std::sync::Arc;

use serde::Serialize;

use signorini_cr::analysis::{
    compare_to_reference, contact_residual, eoc, error_vs_exact, exact_norms, norm_broken_h1,
    norm_l2,
};
use signorini_cr::mesh::{build_unit_square_mesh, classify_boundary, DiagonalPattern};
use signorini_cr::problems::{known_problem, oscillatory_problem};
use signorini_cr::quadrature::TriangleRule;
use signorini_cr::solver::solve_nonlinear;
use signorini_cr::{
    CRSpace, DiscreteField, FemError, NitscheParams, ProblemSpec, SolveReport, SolverConfig,
    SolverStrategy,
};

/// Which benchmark a study runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProblemKind {
    /// Manufactured solution with known errors.
    Known,
    /// Oscillatory source, measured against a fine reference solve.
    Oscillatory,
}

/// Full description of one study; every field maps to a CLI flag.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub problem: ProblemKind,
    /// Oscillation count N of the oscillatory source; ignored for the known
    /// problem.
    pub n_oscillation: usize,
    /// Number of refinement levels; level i uses n = 16·2^i.
    pub levels: usize,
    pub gamma0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub strategy: SolverStrategy,
    pub rel_increment_tol: f64,
    /// Mesh resolution of the reference solve for problems without an exact
    /// solution; must be a proper structured refinement of the finest level.
    pub reference_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: ProblemKind::Known,
            n_oscillation: 3,
            levels: 4,
            gamma0: 10.0,
            theta1: 1.0,
            theta2: 0.0,
            strategy: SolverStrategy::SemismoothNewton,
            rel_increment_tol: 1e-5,
            reference_n: 512,
        }
    }
}

/// Mesh resolution of refinement level `i`.
pub fn level_resolution(i: usize) -> usize {
    16 << i
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), FemError> {
        if self.levels < 2 {
            return Err(FemError::InvalidParameter(format!(
                "a convergence study needs at least 2 levels, got {}",
                self.levels
            )));
        }
        NitscheParams::new(self.gamma0, self.theta1, self.theta2)?;
        self.solver_config().validate(0)?;
        if self.problem == ProblemKind::Oscillatory {
            if self.n_oscillation == 0 {
                return Err(FemError::InvalidParameter(
                    "oscillation count must be at least 1".to_string(),
                ));
            }
            let finest = level_resolution(self.levels - 1);
            if self.reference_n <= finest || self.reference_n % finest != 0 {
                return Err(FemError::InvalidParameter(format!(
                    "reference resolution {} must be a proper multiple of the finest level {}",
                    self.reference_n, finest
                )));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<NitscheParams, FemError> {
        NitscheParams::new(self.gamma0, self.theta1, self.theta2)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            strategy: self.strategy,
            rel_increment_tol: self.rel_increment_tol,
            ..SolverConfig::default()
        }
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, FemError> {
        match self.problem {
            ProblemKind::Known => Ok(known_problem()),
            ProblemKind::Oscillatory => oscillatory_problem(self.n_oscillation),
        }
    }
}

/// Build the classified Crouzeix–Raviart space for one resolution of the
/// study mesh family.
pub fn classified_space(n: usize, problem: &ProblemSpec) -> Result<Arc<CRSpace>, FemError> {
    let mesh = build_unit_square_mesh(n, DiagonalPattern::UnionJack)?;
    let tagger = &problem.tagger;
    let mesh = classify_boundary(mesh, &|x, y| tagger(x, y))?;
    Ok(CRSpace::new(Arc::new(mesh)))
}

/// Mesh, classify, and solve one resolution with the study's parameters.
pub fn solve_level(
    n: usize,
    config: &RunConfig,
    problem: &ProblemSpec,
) -> Result<(DiscreteField, SolveReport), FemError> {
    let space = classified_space(n, problem)?;
    solve_nonlinear(&space, &config.params()?, problem, &config.solver_config())
}

/// One row of a study.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub n: usize,
    pub h: f64,
    pub n_dofs: usize,
    pub converged: bool,
    pub err_l2_rel: f64,
    pub err_h1_rel: f64,
    pub contact_residual: f64,
    pub solve: SolveReport,
}

/// A full study: configuration echo, per-level rows, and observed orders
/// (one per consecutive level pair).
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub config: RunConfig,
    pub problem_name: String,
    pub levels: Vec<LevelRecord>,
    pub eoc_l2: Vec<Option<f64>>,
    pub eoc_h1: Vec<Option<f64>>,
    pub eoc_residual: Vec<Option<f64>>,
    pub all_converged: bool,
}

/// Study results plus the discrete fields behind them, for export and
/// cross-checks.
pub struct StudyOutput {
    pub report: StudyReport,
    pub fields: Vec<DiscreteField>,
    pub reference: Option<DiscreteField>,
}

/// Run the configured refinement study. Levels that fail to converge are
/// still recorded (and flagged) so partial reports can be written; hard
/// failures such as a singular system abort the study.
pub fn run_convergence_study(config: &RunConfig) -> Result<StudyOutput, FemError> {
    config.validate()?;
    let problem = config.problem_spec()?;
    let params = config.params()?;
    let rule = TriangleRule::degree4();

    let reference = match config.problem {
        ProblemKind::Known => None,
        ProblemKind::Oscillatory => {
            let (field, report) = solve_level(config.reference_n, config, &problem)?;
            if !report.converged {
                return Err(FemError::InvalidParameter(format!(
                    "reference solve at n = {} did not converge",
                    config.reference_n
                )));
            }
            Some(field)
        }
    };

    let mut records = Vec::with_capacity(config.levels);
    let mut fields = Vec::with_capacity(config.levels);
    for i in 0..config.levels {
        let n = level_resolution(i);
        let (field, solve) = solve_level(n, config, &problem)?;
        let (err_l2_rel, err_h1_rel) = match (&problem.exact, &reference) {
            (Some(exact), _) => {
                let (abs_l2, abs_h1) = error_vs_exact(&field, exact, &rule)?;
                let (norm_l2, norm_h1) = exact_norms(&field.space.mesh, exact, &rule);
                (abs_l2 / norm_l2, abs_h1 / norm_h1)
            }
            (None, Some(reference)) => {
                let (abs_l2, abs_h1) = compare_to_reference(&field, reference, &rule)?;
                (abs_l2 / norm_l2(reference), abs_h1 / norm_broken_h1(reference))
            }
            (None, None) => unreachable!("validated configs have an exact solution or reference"),
        };
        records.push(LevelRecord {
            level: i,
            n,
            h: field.space.mesh.h,
            n_dofs: field.space.n_dofs(),
            converged: solve.converged,
            err_l2_rel,
            err_h1_rel,
            contact_residual: contact_residual(&field, &params),
            solve,
        });
        fields.push(field);
    }

    let hs: Vec<f64> = records.iter().map(|r| r.h).collect();
    let series = |f: &dyn Fn(&LevelRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let eoc_l2 = eoc(&series(&|r| r.err_l2_rel), &hs)?;
    let eoc_h1 = eoc(&series(&|r| r.err_h1_rel), &hs)?;
    let eoc_residual = eoc(&series(&|r| r.contact_residual), &hs)?;
    let all_converged = records.iter().all(|r| r.converged);
    let report = StudyReport {
        config: config.clone(),
        problem_name: problem.name.clone(),
        levels: records,
        eoc_l2,
        eoc_h1,
        eoc_residual,
        all_converged,
    };
    Ok(StudyOutput {
        report,
        fields,
        reference,
    })
}
