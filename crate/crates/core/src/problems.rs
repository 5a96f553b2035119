//! Benchmark problem definitions on the unit square
//!
//! Both problems pose −Δu = f with a homogeneous Dirichlet condition on the
//! top edge, homogeneous Neumann conditions on the lateral edges, and the
//! unilateral contact conditions u ≤ 0, ∂ₙu ≤ 0, u·∂ₙu = 0 on the bottom edge.
//!
//! The first has the closed-form solution u = −cos(πy/2)·sin²(πx), which
//! touches the contact boundary with zero normal flux; its source is
//! f = −Δu = π²cos(πy/2)·(2cos(2πx) − sin²(πx)/4). The second family uses the
//! oscillatory source f = (2πN)²cos(2πNx) with no closed form; errors against
//! it are measured with a fine reference solve.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::FemError;
use crate::mesh::{standard_tagger, BoundaryTag};

type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;
type TaggerFn = Arc<dyn Fn(f64, f64) -> Option<BoundaryTag> + Send + Sync>;

/// Closed-form solution with its gradient, for error measurement.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad: GradientFn,
}

/// A contact problem instance: source term, boundary classification, and the
/// exact solution when one is known.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub f: ScalarFn,
    pub tagger: TaggerFn,
    pub exact: Option<ExactSolution>,
}

/// The benchmark with known solution u = −cos(πy/2)·sin²(πx).
///
/// The solution vanishes on the top edge, has zero x-derivative at x ∈ {0, 1},
/// and satisfies the contact conditions on the bottom edge with u < 0 in the
/// interior and u = 0 exactly at the corners; the contact flux ∂ₙu = −∂_y u
/// vanishes identically there.
pub fn known_problem() -> ProblemSpec {
    let u = |x: f64, y: f64| -(PI * y / 2.0).cos() * (PI * x).sin().powi(2);
    let grad = |x: f64, y: f64| {
        [
            -PI * (PI * y / 2.0).cos() * (2.0 * PI * x).sin(),
            PI / 2.0 * (PI * y / 2.0).sin() * (PI * x).sin().powi(2),
        ]
    };
    // f = −Δu with Δu = u_xx + u_yy:
    //   u_xx = −2π²cos(πy/2)cos(2πx),  u_yy = (π²/4)cos(πy/2)sin²(πx).
    let f = |x: f64, y: f64| {
        PI * PI
            * (PI * y / 2.0).cos()
            * (2.0 * (2.0 * PI * x).cos() - 0.25 * (PI * x).sin().powi(2))
    };
    ProblemSpec {
        name: "known".to_string(),
        f: Arc::new(f),
        tagger: Arc::new(standard_tagger()),
        exact: Some(ExactSolution {
            u: Arc::new(u),
            grad: Arc::new(grad),
        }),
    }
}

/// The oscillatory family f = (2πN)²cos(2πNx) for N ≥ 1. No closed-form
/// solution; convergence is measured against a fine same-method solve.
pub fn oscillatory_problem(n_oscillation: usize) -> Result<ProblemSpec, FemError> {
    if n_oscillation == 0 {
        return Err(FemError::InvalidParameter(
            "oscillation count must be at least 1".to_string(),
        ));
    }
    let omega = 2.0 * PI * n_oscillation as f64;
    let f = move |x: f64, _y: f64| omega * omega * (omega * x).cos();
    Ok(ProblemSpec {
        name: format!("oscillatory-{n_oscillation}"),
        f: Arc::new(f),
        tagger: Arc::new(standard_tagger()),
        exact: None,
    })
}
