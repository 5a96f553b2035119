//! Finite-element library for the Signorini (unilateral contact) problem on the
//! unit square, discretized with nonconforming Crouzeix–Raviart elements and a
//! two-parameter family of Nitsche formulations
//!
//! ```text
//!   a(u,v) − ⟨∂ₙu, v⟩_Γc + θ₁⟨u, ∂ₙv⟩_Γc + θ₂γ⁻¹⟨u, v⟩_Γc
//!          + ⟨[Pγ(u)]₊, θ₁∂ₙv + θ₂γ⁻¹v⟩_Γc = (f, v)_Ω ,
//! ```
//!
//! where `Pγ(u) = γ∂ₙu − u` and `[x]₊ = max(0, x)`. The choice (θ₁, θ₂) = (1, 0)
//! is the penalty-free nonsymmetric method; (θ₁, θ₂) = (1, 1) is the classical
//! nonsymmetric Nitsche variant. The Nitsche parameter scales as γ = γ₀h.
//!
//! Modules:
//! - [`mesh`]: structured Union Jack triangulations with tagged boundary faces
//! - [`quadrature`]: triangle and edge rules (including generated Gauss–Legendre)
//! - [`sparse`]: minimal CSR matrix used by assembly
//! - [`cr_space`]: Crouzeix–Raviart space, fields, interpolation, traces
//! - [`forms`]: stiffness, load, and contact-term assembly with exact kink splitting
//! - [`solver`]: sparse direct linear solves, fixed-point and semismooth Newton
//! - [`analysis`]: broken norms, errors, convergence orders, stability diagnostics
//! - [`problems`]: built-in problem definitions

pub mod analysis;
pub mod cr_space;
pub mod error;
pub mod forms;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use analysis::{ConvergenceReport, ErrorReport};
pub use cr_space::{CRSpace, DiscreteField};
pub use error::FemError;
pub use forms::{LinearSystem, NitscheParams};
pub use mesh::{BoundaryTag, DiagonalPattern, Mesh};
pub use problems::ProblemSpec;
pub use solver::{SolveReport, SolverConfig, SolverStrategy};
