//! Spectral-Galerkin model of an extensible beam resting on a viscoelastic
//! foundation, with hinged ends:
//!
//! ```text
//! ∂ₜₜu + ∂ₓₓₓₓu - (β + ∫₀¹|∂ₓu|²) ∂ₓₓu = -ku - δ∂ₜu + f
//! ```
//!
//! * [`modal`]: sine-mode reduction, thresholds `μ_n(k)`, modal norms.
//! * [`statics`]: buckled equilibria, the forced static problem, bifurcation sweeps.
//! * [`stability`]: critical loads `β_c`, `β̄`, the coercivity constant `ν`, region maps.
//! * [`dynamics`]: time integration, energy ledger, decay, absorbing set, basins.

pub mod dynamics;
pub mod modal;
mod quadrature;
pub mod stability;
pub mod statics;
pub mod table;

pub use dynamics::{
    integrate, integrate_partial, BasinLimit, BasinOutcome, DynamicsError, EnergyRecord,
    IntegratorConfig, Trajectory,
};
pub use modal::{lambda_n, mu_n, BeamParams, ModalError, ModalState, SpectralConfig};
pub use stability::{bar_beta, beta_c, classify, nu, StabilityClass, StabilityVerdict};
pub use statics::{
    enumerate_stationary, ContinuumFamily, ForcedStaticSolution, StaticsError, StationaryBranch,
    StationaryKind, StationarySet,
};
