//! Exact spectral reduction of the hinged beam operator.
//!
//! With hinged ends the functions `sin(nπx)` diagonalise `∂ₓₓₓₓ` on `(0, 1)`,
//! so a displacement is stored as its sine amplitudes `a_n`, `u = Σ a_n sin(nπx)`.
//! Every norm used by the model has a closed form in these coordinates:
//!
//! ```text
//! ‖u‖²_ℓ = ½ Σ (n²π²)^ℓ a_n²      ℓ = 0, 1, 2
//! ```
//!
//! The factor ½ comes from `∫₀¹ sin²(nπx) dx`. All inner products in the crate
//! carry the same factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::GaussLegendre;

/// Default number of retained sine modes.
pub const DEFAULT_MODES: usize = 16;

/// Default tolerance for residual and quadrature checks.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

/// Absolute tolerance used when comparing against region boundaries.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModalError {
    #[error("foundation stiffness must be finite and non-negative, got {0}")]
    NegativeStiffness(f64),
    #[error("damping constant must be finite and positive, got {0}")]
    NonPositiveDamping(f64),
    #[error("axial coefficient must be finite, got {0}")]
    NonFiniteBeta(f64),
    #[error("load coefficient {index} is not finite")]
    NonFiniteLoad { index: usize },
    #[error("state vectors must have equal non-zero length (a: {a}, v: {v})")]
    StateShape { a: usize, v: usize },
    #[error("state entry {index} is not finite")]
    NonFiniteState { index: usize },
    #[error("at least one mode is required")]
    NoModes,
    #[error("load function returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("load projection did not converge below {tolerance:e} after {panels} panels")]
    QuadratureNotConverged { panels: usize, tolerance: f64 },
}

/// `λ_n = n⁴π⁴`, the n-th eigenvalue of `∂ₓₓₓₓ` with hinged ends.
pub fn lambda_n(n: usize) -> f64 {
    let w = wavenumber_sq(n);
    w * w
}

/// `(nπ)²`, the eigenvalue of `-∂ₓₓ` on the n-th mode.
#[inline]
pub fn wavenumber_sq(n: usize) -> f64 {
    let w = n as f64 * PI;
    w * w
}

/// Buckling threshold of mode `n`: `μ_n(k) = k/(n²π²) + n²π²`.
pub fn mu_n(n: usize, k: f64) -> f64 {
    let w = wavenumber_sq(n);
    k / w + w
}

/// Model parameters: axial coefficient `beta` (`β = -P`), foundation stiffness `k`,
/// damping `delta` and the sine coefficients of the lateral load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    pub beta: f64,
    pub k: f64,
    pub delta: f64,
    #[serde(default)]
    pub f_modes: Vec<f64>,
}

impl BeamParams {
    pub fn new(beta: f64, k: f64, delta: f64, f_modes: Vec<f64>) -> Result<Self, ModalError> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(ModalError::NonPositiveDamping(delta));
        }
        Self::checked(beta, k, delta, f_modes)
    }

    /// Unloaded beam, `f = 0`.
    pub fn unloaded(beta: f64, k: f64, delta: f64) -> Result<Self, ModalError> {
        Self::new(beta, k, delta, Vec::new())
    }

    /// Undamped beam (`δ = 0`).
    ///
    /// Only meant for energy-conservation checks: the absorbing set, the decay
    /// estimates and the attractor all require positive damping.
    pub fn undamped(beta: f64, k: f64, f_modes: Vec<f64>) -> Result<Self, ModalError> {
        Self::checked(beta, k, 0.0, f_modes)
    }

    fn checked(beta: f64, k: f64, delta: f64, f_modes: Vec<f64>) -> Result<Self, ModalError> {
        if !beta.is_finite() {
            return Err(ModalError::NonFiniteBeta(beta));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(ModalError::NegativeStiffness(k));
        }
        if let Some(index) = f_modes.iter().position(|x| !x.is_finite()) {
            return Err(ModalError::NonFiniteLoad { index });
        }
        Ok(Self {
            beta,
            k,
            delta,
            f_modes,
        })
    }

    /// Re-check the invariants of a value built by hand or deserialised.
    pub fn validate(&self) -> Result<(), ModalError> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(ModalError::NonPositiveDamping(self.delta));
        }
        Self::checked(self.beta, self.k, self.delta, self.f_modes.clone()).map(|_| ())
    }

    /// Load coefficient of mode `n` (1-based), zero past the stored sequence.
    pub fn load(&self, n: usize) -> f64 {
        self.f_modes.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn is_unloaded(&self) -> bool {
        self.f_modes.iter().all(|&f| f == 0.0)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            beta,
            ..self.clone()
        }
    }
}

/// Phase-space point: modal displacements `a` and velocities `v` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalState {
    pub t: f64,
    pub a: Vec<f64>,
    pub v: Vec<f64>,
}

impl ModalState {
    pub fn new(t: f64, a: Vec<f64>, v: Vec<f64>) -> Result<Self, ModalError> {
        if a.len() != v.len() || a.is_empty() {
            return Err(ModalError::StateShape {
                a: a.len(),
                v: v.len(),
            });
        }
        if let Some(index) = a.iter().chain(v.iter()).position(|x| !x.is_finite()) {
            return Err(ModalError::NonFiniteState { index });
        }
        Ok(Self { t, a, v })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            t: 0.0,
            a: vec![0.0; n_modes],
            v: vec![0.0; n_modes],
        }
    }

    /// State at rest with the given displacement, padded with zeros to `n_modes`.
    pub fn at_rest(a: &[f64], n_modes: usize) -> Self {
        let mut s = Self::zeros(n_modes.max(a.len()));
        s.a[..a.len()].copy_from_slice(a);
        s
    }

    pub fn n_modes(&self) -> usize {
        self.a.len()
    }

    /// Squared phase-space norm `‖u‖₂² + ‖∂ₜu‖²`.
    pub fn energy_norm_sq(&self) -> f64 {
        modal_norm_sq(&self.a, 2) + modal_norm_sq(&self.v, 0)
    }

    pub fn negated(&self) -> Self {
        Self {
            t: self.t,
            a: self.a.iter().map(|x| -x).collect(),
            v: self.v.iter().map(|x| -x).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub n_modes: usize,
    pub norm_tolerance: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            n_modes: DEFAULT_MODES,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
        }
    }
}

impl SpectralConfig {
    pub fn new(n_modes: usize, norm_tolerance: f64) -> Result<Self, ModalError> {
        if n_modes == 0 {
            return Err(ModalError::NoModes);
        }
        Ok(Self {
            n_modes,
            norm_tolerance,
        })
    }
}

/// `‖u‖²_ℓ` for `u = Σ a_n sin(nπx)`; `order` is 0, 1 or 2.
pub fn modal_norm_sq(a: &[f64], order: u32) -> f64 {
    0.5 * a
        .iter()
        .enumerate()
        .map(|(i, &x)| wavenumber_sq(i + 1).powi(order as i32) * x * x)
        .sum::<f64>()
}

/// `⟨u, w⟩` in L²(0, 1) for two sine expansions.
pub fn modal_inner(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// `‖u - w‖²_ℓ`, zero-padding the shorter sequence.
pub fn modal_distance_sq(a: &[f64], b: &[f64], order: u32) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n)
        .map(|i| {
            let d = a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0);
            wavenumber_sq(i + 1).powi(order as i32) * d * d
        })
        .sum::<f64>()
}

/// `√λ₁ ‖u‖²_ℓ ≤ ‖u‖²_{ℓ+1}`, with relative slack `tolerance`.
pub fn poincare_check(a: &[f64], order: u32, tolerance: f64) -> bool {
    let lhs = PI * PI * modal_norm_sq(a, order);
    let rhs = modal_norm_sq(a, order + 1);
    lhs <= rhs + tolerance * rhs.abs().max(1.0)
}

/// Sine coefficients `f_n = 2∫₀¹ f(x) sin(nπx) dx`, `n = 1..=n_modes`.
///
/// Composite Gauss–Legendre; the number of panels doubles until every
/// coefficient moves by less than `tolerance`.
pub fn project_load<F>(f: F, n_modes: usize, tolerance: f64) -> Result<Vec<f64>, ModalError>
where
    F: Fn(f64) -> f64,
{
    const MAX_PANELS: usize = 1 << 16;
    if n_modes == 0 {
        return Err(ModalError::NoModes);
    }
    let rule = GaussLegendre::new(8);
    let mut panels = 1;
    let mut prev = coefficients(&f, &rule, panels, n_modes)?;
    loop {
        panels *= 2;
        let next = coefficients(&f, &rule, panels, n_modes)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if change < tolerance {
            return Ok(next);
        }
        if panels >= MAX_PANELS {
            return Err(ModalError::QuadratureNotConverged { panels, tolerance });
        }
        prev = next;
    }
}

fn coefficients<F>(
    f: &F,
    rule: &GaussLegendre,
    panels: usize,
    n_modes: usize,
) -> Result<Vec<f64>, ModalError>
where
    F: Fn(f64) -> f64,
{
    let mut out = vec![0.0; n_modes];
    let width = 1.0 / panels as f64;
    for p in 0..panels {
        let lo = p as f64 * width;
        for (node, weight) in rule.nodes_on(lo, lo + width) {
            let y = f(node);
            if !y.is_finite() {
                return Err(ModalError::NonFiniteSample { x: node });
            }
            for (i, c) in out.iter_mut().enumerate() {
                *c += 2.0 * weight * y * ((i + 1) as f64 * PI * node).sin();
            }
        }
    }
    Ok(out)
}

/// Evaluate `Σ a_n sin(nπx)`.
pub fn synthesize(a: &[f64], x: f64) -> f64 {
    a.iter()
        .enumerate()
        .map(|(i, c)| c * ((i + 1) as f64 * PI * x).sin())
        .sum()
}
