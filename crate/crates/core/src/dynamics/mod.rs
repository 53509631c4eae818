//! Time integration of the Galerkin-reduced beam equation.
//!
//! Projected on `sin(nπx)`, the evolution equation becomes
//!
//! ```text
//! ä_n = -n⁴π⁴ a_n - (β + S) n²π² a_n - k a_n - δ ȧ_n + f_n,   S = ½ Σ m²π² a_m²
//! ```
//!
//! The modes interact only through the scalar `S = ‖u‖₁²`, so a mode that
//! starts at rest with zero amplitude and zero load stays there.
//!
//! The reduced system is not stiff for moderate `N`, but an explicit scheme
//! still has to resolve the fastest retained frequency `ω_N ≈ N²π²` whenever
//! mode `N` is excited: the step size scales like `1/N²`.

mod analysis;
mod energy;
pub mod integrator;

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analysis::{
    absorbing_check, basin_classify, decay_rate, AbsorbingReport, BasinLimit, BasinOutcome,
    DecayEstimate, SettleCriteria,
};
pub use energy::{dissipation_check, energy_ledger, EnergyRecord};
pub use integrator::IntegrationError;

use crate::modal::{modal_norm_sq, wavenumber_sq, BeamParams, ModalError, ModalState};
use crate::table::fmt_num;
use integrator::{Dopri5, OdeSystem, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error("invalid integrator configuration: {0}")]
    Config(&'static str),
    #[error("decay fit needs a positive energy on the window")]
    ZeroEnergy,
    #[error("decay fit needs at least two samples in the window")]
    ShortWindow,
    #[error("basin classification requires an unloaded beam with finitely many equilibria")]
    InfiniteStationarySet,
    #[error("basin classification requires f = 0")]
    Loaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    /// `ε` in `Φ_ε`; `None` selects `min(1, k, δ)/2`.
    #[serde(default)]
    pub eps_phi: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.05,
            t_end: 200.0,
            sample_interval: 0.01,
            eps_phi: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_horizon(t_end: f64, sample_interval: f64) -> Self {
        Self {
            t_end,
            sample_interval,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        // written so that NaN fails every check
        let positive = |x: f64| x > 0.0;
        if !(positive(self.rel_tol) && positive(self.abs_tol)) {
            return Err(DynamicsError::Config("tolerances must be positive"));
        }
        if !positive(self.sample_interval) {
            return Err(DynamicsError::Config("sample interval must be positive"));
        }
        if !positive(self.max_step) {
            return Err(DynamicsError::Config("max step must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::Config(
                "end time must be finite and non-negative",
            ));
        }
        Ok(())
    }

    pub fn eps_for(&self, params: &BeamParams) -> f64 {
        self.eps_phi
            .unwrap_or_else(|| 0.5 * params.k.min(params.delta).min(1.0))
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.max_step,
        }
    }
}

/// The modal ODE `y = (a, v)`, with per-mode constants precomputed.
///
/// With `dissipation` set, one more component `D` with `Ḋ = ‖v‖²` is
/// appended, so `∫‖∂ₜu‖²` is integrated along with the orbit.
pub(crate) struct ModalSystem {
    n: usize,
    dissipation: bool,
    wave: Vec<f64>,
    stiffness: Vec<f64>,
    load: Vec<f64>,
    beta: f64,
    delta: f64,
}

impl ModalSystem {
    pub(crate) fn new(params: &BeamParams, n_modes: usize) -> Self {
        let wave: Vec<f64> = (1..=n_modes).map(wavenumber_sq).collect();
        let stiffness = wave.iter().map(|w| w * w + params.k).collect();
        Self {
            n: n_modes,
            dissipation: false,
            wave,
            stiffness,
            load: (1..=n_modes).map(|n| params.load(n)).collect(),
            beta: params.beta,
            delta: params.delta,
        }
    }

    pub(crate) fn with_dissipation(params: &BeamParams, n_modes: usize) -> Self {
        Self {
            dissipation: true,
            ..Self::new(params, n_modes)
        }
    }
}

impl OdeSystem for ModalSystem {
    fn dim(&self) -> usize {
        2 * self.n + usize::from(self.dissipation)
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (a, v) = y[..2 * self.n].split_at(self.n);
        let s = 0.5
            * a.iter()
                .zip(&self.wave)
                .map(|(a, w)| w * a * a)
                .sum::<f64>();
        let tension = self.beta + s;
        let (da, rest) = dy.split_at_mut(self.n);
        da.copy_from_slice(v);
        for i in 0..self.n {
            rest[i] = -(self.stiffness[i] + tension * self.wave[i]) * a[i] - self.delta * v[i]
                + self.load[i];
        }
        if self.dissipation {
            rest[self.n] = modal_norm_sq(v, 0);
        }
    }
}

/// Time derivative `(ȧ, v̇)` of a modal state.
pub fn rhs(state: &ModalState, params: &BeamParams) -> (Vec<f64>, Vec<f64>) {
    let n = state.n_modes();
    let system = ModalSystem::new(params, n);
    let y = pack(state);
    let mut dy = vec![0.0; 2 * n];
    system.eval(state.t, &y, &mut dy);
    let dv = dy.split_off(n);
    (dy, dv)
}

fn pack(state: &ModalState) -> Vec<f64> {
    let mut y = Vec::with_capacity(2 * state.n_modes());
    y.extend_from_slice(&state.a);
    y.extend_from_slice(&state.v);
    y
}

fn unpack(t: f64, y: &[f64], n: usize) -> ModalState {
    let (a, v) = y[..2 * n].split_at(n);
    ModalState {
        t,
        a: a.to_vec(),
        v: v.to_vec(),
    }
}

/// A sampled orbit together with its energy ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: BeamParams,
    pub config: IntegratorConfig,
    pub samples: Vec<ModalState>,
    pub energies: Vec<EnergyRecord>,
    /// `∫‖∂ₜu‖²` from the initial time to each sample.
    pub dissipated: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &ModalState {
        self.samples
            .last()
            .expect("a trajectory holds at least its initial state")
    }

    pub fn n_modes(&self) -> usize {
        self.samples[0].n_modes()
    }

    pub fn write_states_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.n_modes();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("a_{i}")));
        header.extend((1..=n).map(|i| format!("v_{i}")));
        writeln!(w, "{}", header.join(","))?;
        for s in &self.samples {
            let mut row = vec![fmt_num(s.t)];
            row.extend(s.a.iter().chain(&s.v).map(|&x| fmt_num(x)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_energy_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", energy::ENERGY_HEADER)?;
        for e in &self.energies {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_num(e.t),
                fmt_num(e.energy),
                fmt_num(e.lyapunov),
                fmt_num(e.free_energy),
                fmt_num(e.phi),
                fmt_num(e.dissipation_defect)
            )?;
        }
        Ok(())
    }
}

/// Sampling instants `0, Δ, 2Δ, …` capped by `t_end`.
pub(crate) fn sample_times(t0: f64, config: &IntegratorConfig) -> impl Iterator<Item = f64> {
    let dt = config.sample_interval;
    let t_end = t0 + config.t_end;
    let count = (config.t_end / dt * (1.0 + 1e-12)).floor() as usize;
    let exact = (count as f64 * dt - config.t_end).abs() <= 1e-9 * dt;
    let tail = (!exact).then_some(t_end);
    (1..=count)
        .map(move |i| {
            if i == count && exact {
                t_end
            } else {
                t0 + i as f64 * dt
            }
        })
        .chain(tail)
}

/// Sampled solution operator started from `initial`.
///
/// Loads past the retained modes are dropped.
pub fn integrate(
    initial: &ModalState,
    params: &BeamParams,
    config: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    match integrate_partial(initial, params, config)? {
        (trajectory, None) => Ok(trajectory),
        (_, Some(err)) => Err(err),
    }
}

/// Like [`integrate`], but an integrator failure still returns the samples
/// reached before it, together with the error.
pub fn integrate_partial(
    initial: &ModalState,
    params: &BeamParams,
    config: &IntegratorConfig,
) -> Result<(Trajectory, Option<DynamicsError>), DynamicsError> {
    config.validate()?;
    params.validate()?;
    ModalState::new(initial.t, initial.a.clone(), initial.v.clone())?;
    let n = initial.n_modes();
    let eps = config.eps_for(params);
    let system = ModalSystem::with_dissipation(params, n);
    let mut y0 = pack(initial);
    y0.push(0.0);
    let mut stepper = Dopri5::new(&system, initial.t, y0, config.tolerances());

    let mut samples = vec![initial.clone()];
    let mut energies = vec![energy_ledger(initial, params, eps)];
    let mut dissipated = vec![0.0];
    let mut failure = None;
    for t in sample_times(initial.t, config) {
        if let Err(err) = stepper.advance_to(t) {
            failure = Some(err.into());
            break;
        }
        let state = unpack(t, stepper.y(), n);
        let total = stepper.y()[2 * n];
        let prev_record = energies.last().expect("non-empty");
        let prev_total = dissipated.last().expect("non-empty");
        let mut record = energy_ledger(&state, params, eps);
        record.dissipation_defect = (record.free_energy - prev_record.free_energy
            + 2.0 * params.delta * (total - prev_total))
            .abs();
        samples.push(state);
        energies.push(record);
        dissipated.push(total);
    }
    let trajectory = Trajectory {
        params: params.clone(),
        config: *config,
        samples,
        energies,
        dissipated,
    };
    Ok((trajectory, failure))
}

/// Streaming integration used by the basin classifier: calls `visit` at every
/// sample (the initial one included) until it returns `false` or `t_end` is reached.
pub(crate) fn integrate_streaming<F>(
    initial: &ModalState,
    params: &BeamParams,
    config: &IntegratorConfig,
    mut visit: F,
) -> Result<(), DynamicsError>
where
    F: FnMut(&ModalState) -> bool,
{
    config.validate()?;
    let system = ModalSystem::new(params, initial.n_modes());
    let mut stepper = Dopri5::new(&system, initial.t, pack(initial), config.tolerances());
    if !visit(initial) {
        return Ok(());
    }
    for t in sample_times(initial.t, config) {
        stepper.advance_to(t)?;
        if !visit(&unpack(t, stepper.y(), initial.n_modes())) {
            break;
        }
    }
    Ok(())
}

/// Random state with `‖u‖₂² + ‖∂ₜu‖² = energy`, uniform on that sphere in
/// the coordinates of the first `excited` modes.
pub fn random_initial<R: Rng + ?Sized>(
    rng: &mut R,
    energy: f64,
    n_modes: usize,
    excited: usize,
) -> ModalState {
    let m = excited.min(n_modes);
    let g: Vec<f64> = (0..2 * m).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = (2.0 * energy).sqrt();
    let mut state = ModalState::zeros(n_modes);
    for i in 0..m {
        // ½ n⁴π⁴ a² + ½ v² summed equals ½ |g/‖g‖|² · 2E
        state.a[i] = radius * g[i] / norm / wavenumber_sq(i + 1);
        state.v[i] = radius * g[m + i] / norm;
    }
    state
}

/// Modes excited by [`random_ensemble`].
pub const RANDOM_EXCITED_MODES: usize = 4;

/// `count` reproducible random states of energy `energy` in the first four
/// modes, drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_ensemble(seed: u64, energy: f64, n_modes: usize, count: usize) -> Vec<ModalState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_initial(&mut rng, energy, n_modes, RANDOM_EXCITED_MODES))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statics::enumerate_stationary;
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;
    const PI4: f64 = PI2 * PI2;

    #[test]
    fn rhs_examples() {
        let p = BeamParams::unloaded(0.0, 0.0, 1.0).unwrap();
        let (da, dv) = rhs(&ModalState::zeros(3), &p);
        assert!(da.iter().chain(&dv).all(|&x| x == 0.0));

        let p = BeamParams::unloaded(-2.0 * PI2, 0.0, 1.0).unwrap();
        let s = ModalState::at_rest(&[2f64.sqrt()], 4);
        let (da, dv) = rhs(&s, &p);
        assert!(da.iter().all(|&x| x == 0.0));
        assert!(dv.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);

        let p = BeamParams::undamped(0.0, 0.0, vec![]).unwrap();
        let (_, dv) = rhs(&ModalState::at_rest(&[1.0], 1), &p);
        assert!((dv[0] + 1.5 * PI4).abs() < 1e-12);
    }

    #[test]
    fn rhs_vanishes_at_equilibria() {
        for (beta, k) in [
            (-30.0 * PI2, 0.0),
            (-12.0 * PI2, 2.0 * PI4),
            (-40.0 * PI2, 50.0 * PI4),
        ] {
            let p = BeamParams::unloaded(beta, k, 0.7).unwrap();
            let set = enumerate_stationary(&p).unwrap();
            for a in set.isolated_states(8) {
                let (_, dv) = rhs(&ModalState::at_rest(&a, 8), &p);
                assert!(dv.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
            }
        }
        let p = BeamParams::unloaded(-6.0 * PI2, 4.0 * PI4, 1.0).unwrap();
        let set = enumerate_stationary(&p).unwrap();
        for i in 0..100 {
            let a = set.continuum[0].member(i as f64 * 0.0628, 6);
            let (_, dv) = rhs(&ModalState::at_rest(&a, 6), &p);
            assert!(dv.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let p = BeamParams::unloaded(-3.0 * PI2, 10.0, 1.0).unwrap();
        let cfg = IntegratorConfig::with_horizon(5.0, 0.5);
        let traj = integrate(&ModalState::zeros(6), &p, &cfg).unwrap();
        assert_eq!(traj.samples.len(), 11);
        assert!(traj
            .samples
            .iter()
            .all(|s| s.a.iter().chain(&s.v).all(|&x| x == 0.0)));
        assert_eq!(traj.last().t, 5.0);
    }

    #[test]
    fn odd_symmetry() {
        let p = BeamParams::unloaded(-5.0 * PI2, 20.0, 0.5).unwrap();
        let cfg = IntegratorConfig::with_horizon(4.0, 0.1);
        let z0 =
            ModalState::new(0.0, vec![0.05, -0.02, 0.01, 0.0], vec![0.1, 0.0, -0.3, 0.2]).unwrap();
        let plus = integrate(&z0, &p, &cfg).unwrap();
        let minus = integrate(&z0.negated(), &p, &cfg).unwrap();
        for (x, y) in plus.samples.iter().zip(&minus.samples) {
            for (p, m) in x.a.iter().chain(&x.v).zip(y.a.iter().chain(&y.v)) {
                assert!((p + m).abs() <= 1e-12 * p.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sample_grid_hits_end() {
        let cfg = IntegratorConfig::with_horizon(1.0, 0.3);
        let ts: Vec<f64> = sample_times(0.0, &cfg).collect();
        assert_eq!(ts.len(), 4);
        assert_eq!(*ts.last().unwrap(), 1.0);
        let cfg = IntegratorConfig::with_horizon(200.0, 0.01);
        let ts: Vec<f64> = sample_times(0.0, &cfg).collect();
        assert_eq!(ts.len(), 20_000);
        assert_eq!(*ts.last().unwrap(), 200.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn random_initial_has_prescribed_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for e in [0.5, 10.0, 100.0] {
            let s = random_initial(&mut rng, e, 16, 4);
            assert!((s.energy_norm_sq() - e).abs() < 1e-12 * e);
            assert!(s.a[4..].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn ensembles_are_reproducible() {
        let a = random_ensemble(3, 5.0, 8, 4);
        assert_eq!(a, random_ensemble(3, 5.0, 8, 4));
        assert_ne!(a[0], a[1]);
        assert_ne!(a[0], random_ensemble(4, 5.0, 8, 1)[0]);
        assert!(a.iter().all(|s| (s.energy_norm_sq() - 5.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_config() {
        let p = BeamParams::unloaded(0.0, 0.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            sample_interval: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(integrate(&ModalState::zeros(2), &p, &cfg).is_err());
    }

    #[test]
    fn failed_run_keeps_reached_samples() {
        let p = BeamParams::unloaded(-2.0 * PI2, 0.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            rel_tol: 1e-300,
            abs_tol: 1e-300,
            ..IntegratorConfig::with_horizon(1.0, 0.1)
        };
        let z0 = ModalState::at_rest(&[0.5], 2);
        let (partial, err) = integrate_partial(&z0, &p, &cfg).unwrap();
        assert!(matches!(err, Some(DynamicsError::Integration(_))));
        assert_eq!(partial.samples[0], z0);
        assert_eq!(partial.samples.len(), partial.energies.len());
        assert!(integrate(&z0, &p, &cfg).is_err());
    }
}
