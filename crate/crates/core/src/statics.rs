//! Stationary solutions of the static beam problem.
//!
//! In modal coordinates the static equation reads, for every mode `n`,
//!
//! ```text
//! n⁴π⁴ a_n + h n²π² a_n + k a_n = f_n,      h = β + ‖u‖₁²
//! ```
//!
//! so the whole nonlinearity is carried by the scalar `h`. Without load a
//! nonzero mode forces `h = -μ_n(k)`, which yields the buckled branches
//! `A_n^± = ±√(-2[β + μ_n(k)]) / (nπ)`. When two thresholds coincide
//! (`k = i²j²π⁴`) the two modes share the same `h` and their amplitudes are
//! only constrained through `‖u‖₁²`, giving a one-parameter family.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modal::{modal_norm_sq, mu_n, wavenumber_sq, BeamParams, BOUNDARY_TOLERANCE};

/// Absolute tolerance on the bracketing interval in `h`.
const ROOT_TOLERANCE: f64 = 1e-12;
/// Uniform panels per inter-pole interval.
const PANELS_PER_INTERVAL: usize = 64;
/// Geometric refinement levels toward each pole.
const POLE_REFINEMENT_LEVELS: i32 = 48;
/// Roots closer than this (relative to the pole magnitude) are rejected.
const POLE_GUARD: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum StaticsError {
    #[error("the load is not zero; use the forced solver")]
    NonzeroLoad,
    #[error(
        "root h = {h} lies within {distance:e} of the pole h = {pole} (ill-conditioned branch)"
    )]
    NearPole { h: f64, pole: f64, distance: f64 },
    #[error("root refinement did not converge near h = {h} (residual {residual:e})")]
    NonConvergence { h: f64, residual: f64 },
    #[error("a sweep needs at least two samples, got {0}")]
    TooFewSteps(usize),
    #[error("at least one mode is required")]
    NoModes,
}

/// A pair of buckled solutions `A_n^± sin(nπx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryBranch {
    pub mode_index: usize,
    pub amplitude_plus: f64,
    pub amplitude_minus: f64,
}

impl StationaryBranch {
    /// Branch of mode `n` for the given `(β, k)`, `None` before its birth.
    pub fn of_mode(n: usize, beta: f64, k: f64) -> Option<Self> {
        let excess = -(beta + mu_n(n, k));
        (excess > 0.0).then(|| {
            let amp = branch_amplitude(n, excess);
            Self {
                mode_index: n,
                amplitude_plus: amp,
                amplitude_minus: -amp,
            }
        })
    }

    /// Displacement amplitudes of the branch with the given sign, over `n_modes` modes.
    pub fn amplitudes(&self, positive: bool, n_modes: usize) -> Vec<f64> {
        let mut a = vec![0.0; n_modes.max(self.mode_index)];
        a[self.mode_index - 1] = if positive {
            self.amplitude_plus
        } else {
            self.amplitude_minus
        };
        a
    }
}

/// `√(2·excess)/(nπ)` where `excess = -(β + μ_n) ≥ 0`.
fn branch_amplitude(n: usize, excess: f64) -> f64 {
    (2.0 * excess.max(0.0)).sqrt() / (n as f64 * PI)
}

/// Two modes `(low, high)` sharing the threshold `mu`; members are
/// `Ã sin(low·πx) + B̃ sin(high·πx)` with `½(Ã²low²π² + B̃²high²π²) = constraint`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumFamily {
    pub low: usize,
    pub high: usize,
    pub mu: f64,
    pub constraint: f64,
}

impl ContinuumFamily {
    /// Member at angle `theta` on the constraint ellipse.
    pub fn member(&self, theta: f64, n_modes: usize) -> Vec<f64> {
        let r = (2.0 * self.constraint).sqrt();
        let mut a = vec![0.0; n_modes.max(self.high)];
        a[self.low - 1] = r * theta.cos() / (self.low as f64 * PI);
        a[self.high - 1] = r * theta.sin() / (self.high as f64 * PI);
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryKind {
    NullOnly,
    FiniteBuckled,
    ResonantContinuum,
}

/// Stationary states of the unloaded problem.
///
/// For [`StationaryKind::ResonantContinuum`] the `branches` list still carries
/// the isolated branches of simple thresholds below `-β`; the degenerate
/// thresholds are described by `continuum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySet {
    pub kind: StationaryKind,
    pub branches: Vec<StationaryBranch>,
    pub continuum: Vec<ContinuumFamily>,
}

impl StationarySet {
    /// Number of isolated solutions, the null one included.
    pub fn isolated_count(&self) -> usize {
        1 + 2 * self.branches.len()
    }

    /// Every isolated stationary displacement, null state first.
    pub fn isolated_states(&self, n_modes: usize) -> Vec<Vec<f64>> {
        let width = self
            .branches
            .iter()
            .map(|b| b.mode_index)
            .max()
            .unwrap_or(0)
            .max(n_modes);
        let mut out = vec![vec![0.0; width]];
        for b in &self.branches {
            out.push(b.amplitudes(true, width));
            out.push(b.amplitudes(false, width));
        }
        out
    }
}

/// `n_⋆(β) = |{n : β + μ_n(k) < 0}|`.
pub fn n_star(params: &BeamParams) -> usize {
    buckled_modes(params.beta, params.k).count()
}

/// Modes whose threshold lies strictly below `-β`.
fn buckled_modes(beta: f64, k: f64) -> impl Iterator<Item = usize> {
    // μ_n is decreasing until n²π² = √k, increasing afterwards.
    let turn = (k.sqrt().sqrt() / PI).ceil() as usize + 1;
    (1..)
        .take_while(move |&n| n <= turn || beta + mu_n(n, k) < 0.0)
        .filter(move |&n| beta + mu_n(n, k) < 0.0)
}

/// Pairs `i < j` with `μ_i(k) = μ_j(k)` within [`BOUNDARY_TOLERANCE`], i.e. `k = i²j²π⁴`.
pub fn resonant_pairs(k: f64) -> Vec<(usize, usize)> {
    let p = k.sqrt() / (PI * PI);
    let mut pairs = Vec::new();
    let mut i = 1usize;
    while (i * i) as f64 <= p + 1.0 {
        let j = (p / i as f64).round() as usize;
        if j > i && (mu_n(i, k) - mu_n(j, k)).abs() < BOUNDARY_TOLERANCE {
            pairs.push((i, j));
        }
        i += 1;
    }
    pairs
}

/// Whether `k` lies in the resonant set.
pub fn is_resonant(k: f64) -> bool {
    !resonant_pairs(k).is_empty()
}

/// Degenerate thresholds lying strictly below `-β`.
pub(crate) fn active_continua(beta: f64, k: f64) -> Vec<ContinuumFamily> {
    resonant_pairs(k)
        .into_iter()
        .filter_map(|(low, high)| {
            let mu = mu_n(low, k).min(mu_n(high, k));
            let constraint = -beta - mu;
            (constraint > 0.0).then_some(ContinuumFamily {
                low,
                high,
                mu,
                constraint,
            })
        })
        .collect()
}

/// Classify and list the stationary states of the unloaded problem.
pub fn enumerate_stationary(params: &BeamParams) -> Result<StationarySet, StaticsError> {
    if !params.is_unloaded() {
        return Err(StaticsError::NonzeroLoad);
    }
    let (beta, k) = (params.beta, params.k);
    let continuum = active_continua(beta, k);
    let degenerate = |n: usize| continuum.iter().any(|c| c.low == n || c.high == n);
    let branches: Vec<_> = buckled_modes(beta, k)
        .filter(|&n| !degenerate(n))
        .filter_map(|n| StationaryBranch::of_mode(n, beta, k))
        .collect();
    let kind = if !continuum.is_empty() {
        StationaryKind::ResonantContinuum
    } else if branches.is_empty() {
        StationaryKind::NullOnly
    } else {
        StationaryKind::FiniteBuckled
    };
    Ok(StationarySet {
        kind,
        branches,
        continuum,
    })
}

/// ℓ² norm of the modal static residual
/// `r_n = n⁴π⁴a_n + (β + ‖u‖₁²)n²π²a_n + k a_n - f_n`.
pub fn static_residual(a: &[f64], params: &BeamParams) -> f64 {
    let h = params.beta + modal_norm_sq(a, 1);
    let n = a.len().max(params.f_modes.len());
    (1..=n)
        .map(|m| {
            let w = wavenumber_sq(m);
            let am = a.get(m - 1).copied().unwrap_or(0.0);
            let r = (w * w + h * w + params.k) * am - params.load(m);
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcedStaticSolution {
    pub a: Vec<f64>,
    pub h: f64,
    pub residual_norm: f64,
}

/// Consistency function of the forced problem in the scalar `h`.
struct Consistency<'a> {
    beta: f64,
    k: f64,
    loads: &'a [f64],
}

impl Consistency<'_> {
    fn amplitudes(&self, h: f64) -> Vec<f64> {
        self.loads
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                if f == 0.0 {
                    0.0
                } else {
                    let w = wavenumber_sq(i + 1);
                    f / (w * w + h * w + self.k)
                }
            })
            .collect()
    }

    /// `g(h) = h - β - ‖u(h)‖₁²`.
    fn g(&self, h: f64) -> f64 {
        h - self.beta - modal_norm_sq(&self.amplitudes(h), 1)
    }
}

/// Sample value at an interval end: poles count as `-∞`.
#[derive(Clone, Copy)]
enum End {
    Pole(f64),
    Value(f64),
}

impl End {
    fn at(self) -> f64 {
        match self {
            End::Pole(x) | End::Value(x) => x,
        }
    }
}

/// All solutions of the forced static problem with `n_modes` retained modes.
///
/// Every root satisfies `h ≥ β`, and above the largest pole `g` is increasing,
/// so the search window is `[β, h_hi]` with `g(h_hi) > 0`. Each interval
/// between poles is sampled on a uniform grid plus a geometric grid toward
/// its poles; sign changes are refined in `h` and the amplitudes are then
/// polished by Newton's method on the full modal system. Roots at a tangency
/// (double roots) between samples can be missed. A zero load yields only the
/// null state.
pub fn solve_static_forced(
    params: &BeamParams,
    n_modes: usize,
    tolerance: f64,
) -> Result<Vec<ForcedStaticSolution>, StaticsError> {
    if n_modes == 0 {
        return Err(StaticsError::NoModes);
    }
    let loads: Vec<f64> = (1..=n_modes).map(|n| params.load(n)).collect();
    if loads.iter().all(|&f| f == 0.0) {
        return Ok(vec![ForcedStaticSolution {
            a: vec![0.0; n_modes],
            h: params.beta,
            residual_norm: 0.0,
        }]);
    }
    let system = Consistency {
        beta: params.beta,
        k: params.k,
        loads: &loads,
    };

    let mut poles: Vec<f64> = loads
        .iter()
        .enumerate()
        .filter(|(_, &f)| f != 0.0)
        .map(|(i, _)| -mu_n(i + 1, params.k))
        .filter(|&p| p >= params.beta)
        .collect();
    poles.sort_by(f64::total_cmp);
    poles.dedup();

    let top = poles.last().copied().unwrap_or(params.beta);
    let mut offset = 1.0;
    while system.g(top + offset) <= 0.0 {
        offset *= 2.0;
    }
    let h_hi = top + offset;

    let mut ends = Vec::with_capacity(poles.len() + 2);
    if poles.first() == Some(&params.beta) {
        // β itself is a pole
    } else {
        ends.push(End::Value(params.beta));
    }
    ends.extend(poles.iter().map(|&p| End::Pole(p)));
    ends.push(End::Value(h_hi));

    let all_poles: Vec<f64> = (1..=n_modes)
        .filter(|&n| loads[n - 1] != 0.0)
        .map(|n| -mu_n(n, params.k))
        .collect();

    let mut roots = Vec::new();
    for pair in ends.windows(2) {
        for h in interval_roots(&system, pair[0], pair[1])? {
            roots.push(h);
        }
    }

    let mut out = Vec::with_capacity(roots.len());
    for h in roots {
        if let Some(&pole) = all_poles
            .iter()
            .min_by(|p, q| (h - **p).abs().total_cmp(&(h - **q).abs()))
        {
            let distance = (h - pole).abs();
            if distance < POLE_GUARD * pole.abs().max(1.0) {
                return Err(StaticsError::NearPole { h, pole, distance });
            }
        }
        let a = polish(&system, system.amplitudes(h));
        let residual_norm = static_residual(&a, params);
        let h = params.beta + modal_norm_sq(&a, 1);
        if residual_norm.is_nan() || residual_norm >= tolerance {
            return Err(StaticsError::NonConvergence {
                h,
                residual: residual_norm,
            });
        }
        out.push(ForcedStaticSolution {
            a,
            h,
            residual_norm,
        });
    }
    Ok(out)
}

fn interval_roots(system: &Consistency, lo: End, hi: End) -> Result<Vec<f64>, StaticsError> {
    let (a, b) = (lo.at(), hi.at());
    let width = b - a;
    if width.is_nan() || width <= 0.0 {
        return Ok(Vec::new());
    }
    let mut xs: Vec<f64> = (1..PANELS_PER_INTERVAL)
        .map(|i| a + width * i as f64 / PANELS_PER_INTERVAL as f64)
        .collect();
    let half = 0.5 * width / PANELS_PER_INTERVAL as f64;
    for j in 1..=POLE_REFINEMENT_LEVELS {
        let d = half * 0.5f64.powi(j);
        if matches!(lo, End::Pole(_)) {
            xs.push(a + d);
        }
        if matches!(hi, End::Pole(_)) {
            xs.push(b - d);
        }
    }
    xs.retain(|&x| x > a && x < b);
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut samples = Vec::with_capacity(xs.len() + 2);
    samples.push(match lo {
        End::Pole(p) => (p, f64::NEG_INFINITY),
        End::Value(x) => (x, system.g(x)),
    });
    samples.extend(xs.into_iter().map(|x| (x, system.g(x))));
    samples.push(match hi {
        End::Pole(p) => (p, f64::NEG_INFINITY),
        End::Value(x) => (x, system.g(x)),
    });

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let ((x0, g0), (x1, g1)) = (w[0], w[1]);
        if g1 == 0.0 {
            roots.push(x1);
        } else if g0 != 0.0 && g0.signum() != g1.signum() {
            roots.push(refine(system, x0, g0, x1, g1)?);
        }
    }
    Ok(roots)
}

/// Illinois-modified regula falsi, with a bisection every third step so the
/// bracket always shrinks.
fn refine(
    system: &Consistency,
    mut x0: f64,
    mut g0: f64,
    mut x1: f64,
    mut g1: f64,
) -> Result<f64, StaticsError> {
    let mut last_side = 0i8;
    for iter in 0..400 {
        if (x1 - x0).abs() <= ROOT_TOLERANCE {
            return Ok(0.5 * (x0 + x1));
        }
        let secant = x1 - g1 * (x1 - x0) / (g1 - g0);
        let x =
            if iter % 3 == 2 || !secant.is_finite() || secant <= x0.min(x1) || secant >= x0.max(x1)
            {
                0.5 * (x0 + x1)
            } else {
                secant
            };
        let g = system.g(x);
        if g == 0.0 {
            return Ok(x);
        }
        if g.signum() == g1.signum() {
            x1 = x;
            g1 = g;
            if last_side == 1 && g0.is_finite() {
                g0 *= 0.5;
            }
            last_side = 1;
        } else {
            x0 = x;
            g0 = g;
            if last_side == -1 && g1.is_finite() {
                g1 *= 0.5;
            }
            last_side = -1;
        }
    }
    let x = 0.5 * (x0 + x1);
    Err(StaticsError::NonConvergence {
        h: x,
        residual: system.g(x).abs(),
    })
}

/// Newton iterations on the modal residual, restricted to loaded modes.
///
/// The Jacobian is `diag(n⁴π⁴ + h n²π² + k) + w wᵀ` with `w_n = n²π² a_n`,
/// inverted by the Sherman–Morrison formula.
fn polish(system: &Consistency, mut a: Vec<f64>) -> Vec<f64> {
    let active: Vec<usize> = (0..a.len()).filter(|&i| system.loads[i] != 0.0).collect();
    let mut best = a.clone();
    let mut best_norm = f64::INFINITY;
    for _ in 0..8 {
        let h = system.beta + modal_norm_sq(&a, 1);
        let mut r = vec![0.0; active.len()];
        let mut d = vec![0.0; active.len()];
        let mut w = vec![0.0; active.len()];
        for (j, &i) in active.iter().enumerate() {
            let ws = wavenumber_sq(i + 1);
            d[j] = ws * ws + h * ws + system.k;
            r[j] = d[j] * a[i] - system.loads[i];
            w[j] = ws * a[i];
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < best_norm {
            best_norm = norm;
            best.clone_from(&a);
        } else {
            break;
        }
        if norm == 0.0 || d.contains(&0.0) {
            break;
        }
        let dinv_r: Vec<f64> = r.iter().zip(&d).map(|(r, d)| r / d).collect();
        let dinv_w: Vec<f64> = w.iter().zip(&d).map(|(w, d)| w / d).collect();
        let denom = 1.0 + w.iter().zip(&dinv_w).map(|(x, y)| x * y).sum::<f64>();
        if denom == 0.0 {
            break;
        }
        let proj = w.iter().zip(&dinv_r).map(|(x, y)| x * y).sum::<f64>() / denom;
        for (j, &i) in active.iter().enumerate() {
            a[i] -= dinv_r[j] - dinv_w[j] * proj;
        }
    }
    best
}

/// One row of a bifurcation diagram; `n = 0` encodes the null branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRow {
    pub beta: f64,
    pub n: usize,
    pub amplitude_plus: f64,
    pub amplitude_minus: f64,
}

pub const BIFURCATION_HEADER: &str = "beta,n,amplitude_plus,amplitude_minus";

/// Static response over `steps` equally spaced values of `β` in `[beta_min, beta_max]`.
///
/// A branch is listed from its birth point `β = -μ_n(k)` on, where its
/// amplitude is zero.
pub fn bifurcation_sweep(
    k: f64,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> Result<Vec<BifurcationRow>, StaticsError> {
    if steps < 2 {
        return Err(StaticsError::TooFewSteps(steps));
    }
    let span = beta_max - beta_min;
    let rows = (0..steps)
        .into_par_iter()
        .map(|i| {
            let beta = if i + 1 == steps {
                beta_max
            } else {
                beta_min + span * i as f64 / (steps - 1) as f64
            };
            let mut rows = vec![BifurcationRow {
                beta,
                n: 0,
                amplitude_plus: 0.0,
                amplitude_minus: 0.0,
            }];
            let turn = (k.sqrt().sqrt() / PI).ceil() as usize + 1;
            for n in (1..).take_while(|&n| n <= turn || beta + mu_n(n, k) <= 0.0) {
                let excess = -(beta + mu_n(n, k));
                if excess >= 0.0 {
                    let amp = branch_amplitude(n, excess);
                    rows.push(BifurcationRow {
                        beta,
                        n,
                        amplitude_plus: amp,
                        amplitude_minus: -amp,
                    });
                }
            }
            rows
        })
        .collect::<Vec<_>>();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const PI2: f64 = PI * PI;
    const PI4: f64 = PI2 * PI2;

    fn unloaded(beta: f64, k: f64) -> BeamParams {
        BeamParams::unloaded(beta, k, 1.0).unwrap()
    }

    // Brute-force count over a generous mode range.
    fn n_star_oracle(beta: f64, k: f64) -> usize {
        (1..=100).filter(|&n| beta + mu_n(n, k) < 0.0).count()
    }

    #[test]
    fn n_star_examples() {
        assert_eq!(n_star(&unloaded(0.0, 0.0)), 0);
        assert_eq!(n_star_oracle(-20.0 * PI2, 0.0), 4);
        assert_eq!(n_star(&unloaded(-20.0 * PI2, 0.0)), 4);
        assert_eq!(n_star_oracle(-2.0 * PI2, 0.0), 1);
        assert_eq!(n_star(&unloaded(-2.0 * PI2, 0.0)), 1);
    }

    #[test]
    fn enumerate_examples() {
        let s = enumerate_stationary(&unloaded(0.0, 1.0)).unwrap();
        assert_eq!(s.kind, StationaryKind::NullOnly);
        assert_eq!(s.isolated_count(), 1);

        let s = enumerate_stationary(&unloaded(-2.0 * PI2, 0.0)).unwrap();
        assert_eq!(s.kind, StationaryKind::FiniteBuckled);
        assert_eq!(s.branches.len(), 1);
        assert_relative_eq!(
            s.branches[0].amplitude_plus,
            2f64.sqrt(),
            max_relative = 1e-14
        );
        assert_eq!(s.branches[0].amplitude_minus, -s.branches[0].amplitude_plus);

        let s = enumerate_stationary(&unloaded(-6.0 * PI2, 4.0 * PI4)).unwrap();
        assert_eq!(s.kind, StationaryKind::ResonantContinuum);
        assert_eq!(s.continuum.len(), 1);
        let fam = s.continuum[0];
        assert_eq!((fam.low, fam.high), (1, 2));
        assert_relative_eq!(fam.mu, 5.0 * PI2, max_relative = 1e-14);
        assert_relative_eq!(fam.constraint, PI2, max_relative = 1e-12);
        // μ₃(4π⁴) = 4π²/9 + 9π² > 6π²: no isolated branch
        assert!(s.branches.is_empty());
    }

    #[test]
    fn resonant_stiffness_below_degenerate_threshold() {
        // k = 9π⁴: μ₁ = μ₃ = 10π² while β_c = μ₂ = 6.25π²
        let k = 9.0 * PI4;
        assert_eq!(resonant_pairs(k), vec![(1, 3)]);
        let s = enumerate_stationary(&unloaded(-8.0 * PI2, k)).unwrap();
        assert_eq!(s.kind, StationaryKind::FiniteBuckled);
        assert_eq!(s.branches.len(), 1);
        assert_eq!(s.branches[0].mode_index, 2);

        let s = enumerate_stationary(&unloaded(-11.0 * PI2, k)).unwrap();
        assert_eq!(s.kind, StationaryKind::ResonantContinuum);
        assert_eq!(s.branches.len(), 1);
        assert_eq!((s.continuum[0].low, s.continuum[0].high), (1, 3));

        // two resonant pairs at k = 36π⁴: μ₁ = μ₆ = 37π², μ₂ = μ₃ = 13π²
        assert_eq!(resonant_pairs(36.0 * PI4), vec![(1, 6), (2, 3)]);
    }

    #[test]
    fn rejects_loaded_problem() {
        let p = BeamParams::new(0.0, 0.0, 1.0, vec![0.1]).unwrap();
        assert_eq!(enumerate_stationary(&p), Err(StaticsError::NonzeroLoad));
    }

    #[test]
    fn residual_examples() {
        let p = unloaded(0.0, 0.0);
        assert_eq!(static_residual(&[0.0; 4], &p), 0.0);
        assert!(static_residual(&[2f64.sqrt()], &unloaded(-2.0 * PI2, 0.0)) < 1e-12);
        assert_relative_eq!(static_residual(&[1.0], &p), 1.5 * PI4, max_relative = 1e-14);
    }

    #[test]
    fn forced_unloaded_is_null() {
        let sols = solve_static_forced(&unloaded(0.0, 1.0), 8, 1e-10).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].a.iter().all(|&x| x == 0.0));
        assert_eq!(sols[0].h, 0.0);
    }

    // Plain bisection on g, independent of the solver's bracketing and polish.
    fn bisect_oracle(beta: f64, f1: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = |h: f64| {
            let a = f1 / (PI4 + h * PI2);
            h - beta - 0.5 * PI2 * a * a
        };
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m).signum() == g(lo).signum() {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn forced_single_mode_tension_free() {
        let p = BeamParams::new(0.0, 0.0, 1.0, vec![0.1]).unwrap();
        let sols = solve_static_forced(&p, 4, 1e-10).unwrap();
        assert_eq!(sols.len(), 1);
        let h = bisect_oracle(0.0, 0.1, 0.0, 1.0);
        assert!(sols[0].h > 0.0);
        assert!((sols[0].h - h).abs() < 1e-12);
        assert!(sols[0].residual_norm < 1e-10);
    }

    #[test]
    fn forced_buckled_has_three_roots() {
        let beta = -15.0 * PI2;
        let p = BeamParams::new(beta, 0.0, 1.0, vec![50.0]).unwrap();
        // sign changes of g on a 10⁴-point grid over (-40π², 40π²)
        let g = |h: f64| {
            let a = 50.0 / (PI4 + h * PI2);
            h - beta - 0.5 * PI2 * a * a
        };
        let grid: Vec<f64> = (0..10_000)
            .map(|i| -40.0 * PI2 + 80.0 * PI2 * (i as f64 + 0.5) / 10_000.0)
            .collect();
        let changes = grid
            .windows(2)
            .filter(|w| g(w[0]).signum() != g(w[1]).signum())
            .count();
        // g → -∞ on both sides of the pole at -π², so every flip is a root
        assert_eq!(changes, 3);

        let sols = solve_static_forced(&p, 4, 1e-10).unwrap();
        assert_eq!(sols.len(), 3);
        for s in &sols {
            assert!(s.residual_norm < 1e-10);
        }
    }

    #[test]
    fn forced_recovers_unforced_set() {
        let beta = -20.0 * PI2;
        let k = 3.0 * PI4;
        let unforced = enumerate_stationary(&unloaded(beta, k)).unwrap();
        let n_modes = 8;
        let eps = 1e-6;
        let p = BeamParams::new(beta, k, 1.0, vec![eps; n_modes]).unwrap();
        let sols = solve_static_forced(&p, n_modes, 1e-10).unwrap();
        for target in unforced.isolated_states(n_modes) {
            let nearest = sols
                .iter()
                .map(|s| crate::modal::modal_distance_sq(&s.a, &target, 0).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-4, "no forced root near {target:?}: {nearest}");
        }
    }

    #[test]
    fn sweep_examples() {
        let rows = bifurcation_sweep(0.0, -PI2, 0.0, 50).unwrap();
        assert!(rows.iter().all(|r| r.n == 0 || r.amplitude_plus == 0.0));
        // the first sample sits on the birth point of mode 1
        assert_eq!(rows[1].n, 1);
        assert_eq!(rows[1].amplitude_plus, 0.0);

        let rows = bifurcation_sweep(0.0, -4.0 * PI2, 0.0, 2).unwrap();
        let r = rows
            .iter()
            .find(|r| r.n == 1 && r.beta == -4.0 * PI2)
            .unwrap();
        assert_relative_eq!(r.amplitude_plus, 6f64.sqrt(), max_relative = 1e-14);

        for k in [0.0, 10.0, 500.0, 4.0 * PI4] {
            let rows = bifurcation_sweep(k, -mu_n(1, k), 0.0, 3).unwrap();
            let birth = rows.iter().find(|r| r.n == 1).unwrap();
            assert_eq!(birth.amplitude_plus, 0.0);
        }
        assert_eq!(
            bifurcation_sweep(0.0, -1.0, 0.0, 1),
            Err(StaticsError::TooFewSteps(1))
        );
    }

    #[test]
    fn branches_solve_static_problem_on_grid() {
        for i in 0..40 {
            for j in 0..40 {
                let beta = -400.0 + 10.0 * i as f64;
                let k = 50.0 * j as f64;
                let p = unloaded(beta, k);
                let s = enumerate_stationary(&p).unwrap();
                if s.kind == StationaryKind::FiniteBuckled {
                    assert_eq!(s.isolated_count(), 2 * n_star(&p) + 1);
                }
                for a in s.isolated_states(4) {
                    assert!(static_residual(&a, &p) < 1e-10);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn amplitude_grows_with_load(n in 1usize..6, k in 0.0f64..2000.0, d1 in 0.01f64..100.0, d2 in 0.01f64..100.0) {
            let base = -mu_n(n, k);
            let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assume!(large - small > 1e-6);
            let a1 = StationaryBranch::of_mode(n, base - small, k).unwrap().amplitude_plus;
            let a2 = StationaryBranch::of_mode(n, base - large, k).unwrap().amplitude_plus;
            prop_assert!(a2 > a1);
        }

        #[test]
        fn continuum_members_are_stationary(theta in 0.0f64..std::f64::consts::TAU, extra in 0.1f64..50.0) {
            let k = 4.0 * PI4;
            let beta = -5.0 * PI2 - extra;
            let s = enumerate_stationary(&unloaded(beta, k)).unwrap();
            prop_assert_eq!(s.kind, StationaryKind::ResonantContinuum);
            let a = s.continuum[0].member(theta, 4);
            prop_assert!(static_residual(&a, &unloaded(beta, k)) < 1e-10);
        }

        #[test]
        fn n_star_matches_scan(beta in -2000.0f64..100.0, k in 0.0f64..5000.0) {
            prop_assert_eq!(n_star(&unloaded(beta, k)), n_star_oracle(beta, k));
        }
    }
}
