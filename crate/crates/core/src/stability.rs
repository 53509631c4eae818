//! Critical loads and the stability regions of the straight configuration.
//!
//! `β_c(k) = min_n μ_n(k)` is the Euler buckling load. The coercivity of
//! `⟨Lu, u⟩ = ‖u‖₂² + β‖u‖₁² + k‖u‖²` reduces, through the interpolation
//! inequality and `Z = mX`, to the quadratic `η(m) = 1 + βm + km²` on
//! `M = [0, 1/√λ₁]`. Its minimum `ν(β, k)` is positive exactly when
//! `β > -β̄(k)`, with `β̄ = β_c` for `k ≤ λ₁` and `β̄ = 2√k` beyond.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::modal::{lambda_n, mu_n, BeamParams, BOUNDARY_TOLERANCE};
use crate::statics::active_continua;

/// Index `n_k` of the smallest threshold; ties resolve to the smaller index.
pub fn n_k_index(k: f64) -> usize {
    let mut n = 1;
    while mu_n(n + 1, k) < mu_n(n, k) - BOUNDARY_TOLERANCE {
        n += 1;
    }
    n
}

/// Euler buckling load `β_c(k) = min_n μ_n(k)`.
pub fn beta_c(k: f64) -> f64 {
    let n = n_k_index(k);
    mu_n(n, k).min(mu_n(n + 1, k))
}

/// Boundary of the exponential-stability region; `β̄(0) = β_c(0)`.
pub fn bar_beta(k: f64) -> f64 {
    if k <= lambda_n(1) {
        beta_c(k)
    } else {
        2.0 * k.sqrt()
    }
}

/// `ν(β, k) = min_{m ∈ [0, 1/π²]} (1 + βm + km²)`, or `1` when `β ≥ 0`.
///
/// Closed form: the minimum sits at the vertex `m* = -β/(2k)` when it falls
/// inside `M`, at the right end of `M` otherwise.
pub fn nu(beta: f64, k: f64) -> f64 {
    if beta >= 0.0 {
        return 1.0;
    }
    let m_max = 1.0 / (PI * PI);
    if k > 0.0 {
        let vertex = -beta / (2.0 * k);
        if vertex < m_max {
            return 1.0 - beta * beta / (4.0 * k);
        }
    }
    1.0 + beta * m_max + k * m_max * m_max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    ExponentiallyStable,
    StableNonExponentialRegion,
    CriticalBoundary,
    Buckled,
    BuckledResonant,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExponentiallyStable => "exponentially_stable",
            Self::StableNonExponentialRegion => "stable_non_exponential",
            Self::CriticalBoundary => "critical_boundary",
            Self::Buckled => "buckled",
            Self::BuckledResonant => "buckled_resonant",
        }
    }

    pub fn is_buckled(self) -> bool {
        matches!(self, Self::Buckled | Self::BuckledResonant)
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub beta_c: f64,
    pub bar_beta: f64,
    pub nu: f64,
    pub class: StabilityClass,
}

/// Place `(β, k)` against `-β_c(k)`, `-β̄(k)` and the resonant set.
pub fn classify(params: &BeamParams) -> StabilityVerdict {
    classify_point(params.beta, params.k)
}

pub fn classify_point(beta: f64, k: f64) -> StabilityVerdict {
    let bc = beta_c(k);
    let bb = bar_beta(k);
    let nu = nu(beta, k);
    let class = if (beta + bc).abs() < BOUNDARY_TOLERANCE || (beta + bb).abs() < BOUNDARY_TOLERANCE
    {
        StabilityClass::CriticalBoundary
    } else if beta < -bc {
        if active_continua(beta, k).is_empty() {
            StabilityClass::Buckled
        } else {
            StabilityClass::BuckledResonant
        }
    } else if beta > -bb {
        StabilityClass::ExponentiallyStable
    } else {
        StabilityClass::StableNonExponentialRegion
    };
    StabilityVerdict {
        beta_c: bc,
        bar_beta: bb,
        nu,
        class,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub k: f64,
    pub beta: f64,
    pub verdict: StabilityVerdict,
}

pub const MAP_HEADER: &str = "k,beta,class,nu,beta_c,bar_beta";

/// Evenly spaced samples of `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Classification over a `(k, β)` grid; rows ordered by `k`, then `β`.
pub fn stability_map(
    beta_range: (f64, f64),
    k_range: (f64, f64),
    beta_count: usize,
    k_count: usize,
) -> Vec<MapRow> {
    let betas = linspace(beta_range.0, beta_range.1, beta_count);
    linspace(k_range.0, k_range.1, k_count)
        .into_par_iter()
        .flat_map_iter(|k| {
            betas.iter().map(move |&beta| MapRow {
                k,
                beta,
                verdict: classify_point(beta, k),
            })
        })
        .collect()
}
