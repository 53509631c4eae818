use serde::{Deserialize, Serialize};

use super::{integrate_streaming, DynamicsError, IntegratorConfig, Trajectory};
use crate::modal::{modal_distance_sq, modal_norm_sq, BeamParams, ModalState};
use crate::statics::{enumerate_stationary, StationaryKind};

/// Energies below this are treated as underflowed.
const ENERGY_FLOOR: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    /// `-d(ln ℰ)/dt` from a least-squares line.
    pub rate: f64,
    /// RMS deviation of `ln ℰ` from the line, divided by the drop of the line
    /// across the window. Small values mean the decay looks exponential.
    pub linear_fit_residual: f64,
    /// Set when samples were dropped because `ℰ` fell below `1e-250`.
    pub underflow: bool,
}

/// Exponential rate of `ℰ` fitted on the trailing `window` fraction of samples.
pub fn decay_rate(trajectory: &Trajectory, window: f64) -> Result<DecayEstimate, DynamicsError> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(DynamicsError::Config("window must lie in (0, 1]"));
    }
    let records = &trajectory.energies;
    let start = ((1.0 - window) * records.len() as f64).floor() as usize;
    let tail = &records[start.min(records.len())..];
    let underflow = tail.iter().any(|r| r.energy < ENERGY_FLOOR);
    let points: Vec<(f64, f64)> = tail
        .iter()
        .filter(|r| r.energy >= ENERGY_FLOOR)
        .map(|r| (r.t, r.energy.ln()))
        .collect();
    if tail.iter().all(|r| r.energy == 0.0) {
        return Err(DynamicsError::ZeroEnergy);
    }
    if points.len() < 2 {
        return Err(DynamicsError::ShortWindow);
    }
    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - t_mean).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - t_mean) * (p.1 - y_mean)).sum();
    let slope = sxy / sxx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - y_mean - slope * (p.0 - t_mean)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let span = points.last().unwrap().0 - points[0].0;
    let drop = (slope * span).abs();
    Ok(DecayEstimate {
        rate: -slope,
        linear_fit_residual: if drop > 0.0 {
            rms / drop
        } else {
            f64::INFINITY
        },
        underflow,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingReport {
    /// First sample time with `ℰ ≤ radius²`, per trajectory.
    pub entry_times: Vec<Option<f64>>,
    /// Every orbit entered and stayed inside until its horizon.
    pub verdict: bool,
}

pub fn absorbing_check(trajectories: &[Trajectory], radius: f64) -> AbsorbingReport {
    let bound = radius * radius;
    let mut verdict = true;
    let entry_times = trajectories
        .iter()
        .map(|traj| {
            let entry = traj.energies.iter().position(|r| r.energy <= bound);
            match entry {
                Some(i) => {
                    if traj.energies[i..].iter().any(|r| r.energy > bound) {
                        verdict = false;
                    }
                    Some(traj.energies[i].t)
                }
                None => {
                    verdict = false;
                    None
                }
            }
        })
        .collect();
    AbsorbingReport {
        entry_times,
        verdict,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BasinLimit {
    Null,
    Branch { n: usize, positive: bool },
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinOutcome {
    pub limit: BasinLimit,
    pub settle_time: f64,
    /// Phase-space distance to the nearest equilibrium at the last inspected sample.
    pub final_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleCriteria {
    pub distance: f64,
    pub velocity: f64,
    pub consecutive: usize,
}

impl Default for SettleCriteria {
    fn default() -> Self {
        Self {
            distance: 1e-6,
            velocity: 1e-8,
            consecutive: 10,
        }
    }
}

/// Integrate until the orbit sits on one equilibrium for `consecutive`
/// samples, then name it.
pub fn basin_classify(
    initial: &ModalState,
    params: &BeamParams,
    config: &IntegratorConfig,
    settle: &SettleCriteria,
) -> Result<BasinOutcome, DynamicsError> {
    if !params.is_unloaded() {
        return Err(DynamicsError::Loaded);
    }
    let set = enumerate_stationary(params).map_err(|_| DynamicsError::Loaded)?;
    if set.kind == StationaryKind::ResonantContinuum {
        return Err(DynamicsError::InfiniteStationarySet);
    }
    let n = initial.n_modes();
    let mut targets = vec![(BasinLimit::Null, vec![0.0; n])];
    for b in &set.branches {
        if b.mode_index > n {
            continue;
        }
        for positive in [true, false] {
            targets.push((
                BasinLimit::Branch {
                    n: b.mode_index,
                    positive,
                },
                b.amplitudes(positive, n),
            ));
        }
    }

    let mut streak: Option<(BasinLimit, f64, usize)> = None;
    let mut outcome = None;
    let mut last_distance = f64::INFINITY;
    integrate_streaming(initial, params, config, |state| {
        let speed_sq = modal_norm_sq(&state.v, 0);
        let (limit, dist) = targets
            .iter()
            .map(|(limit, a)| {
                (
                    *limit,
                    (modal_distance_sq(&state.a, a, 2) + speed_sq).sqrt(),
                )
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("the null state is always a target");
        last_distance = dist;
        let settled = dist < settle.distance && speed_sq.sqrt() < settle.velocity;
        streak = match (settled, streak) {
            (false, _) => None,
            (true, Some((l, t0, count))) if l == limit => Some((l, t0, count + 1)),
            (true, _) => Some((limit, state.t, 1)),
        };
        if let Some((limit, t0, count)) = streak {
            if count >= settle.consecutive {
                outcome = Some(BasinOutcome {
                    limit,
                    settle_time: t0 - initial.t,
                    final_distance: dist,
                });
                return false;
            }
        }
        true
    })?;
    Ok(outcome.unwrap_or(BasinOutcome {
        limit: BasinLimit::Unresolved,
        settle_time: f64::NAN,
        final_distance: last_distance,
    }))
}
