use std::io;
use std::path::Path;

use extbeam_core::dynamics::{
    basin_classify, decay_rate, random_ensemble, BasinOutcome, SettleCriteria,
};
use extbeam_core::stability::{n_k_index, stability_map};
use extbeam_core::statics::{bifurcation_sweep, is_resonant};
use extbeam_core::table::{fmt_num, write_bifurcation_csv, write_map_csv, write_stationary_csv};
use extbeam_core::{
    bar_beta, beta_c, enumerate_stationary, integrate_partial, BasinLimit, BeamParams,
    DynamicsError, IntegratorConfig, ModalError, ModalState, StaticsError, StationaryKind,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::args::{
    BasinArgs, BeamArgs, BifurcationArgs, Command, CriticalArgs, DecayArgs, MapArgs, ReplayArgs,
    RunArgs, SimulateArgs, StationaryArgs,
};
use crate::output::{RunManifest, Sink};

const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Decay runs follow ℰ far below the default noise floor of about `abs_tol²`.
const DECAY_ABS_TOL: f64 = 1e-60;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<ModalError> for CliError {
    fn from(e: ModalError) -> Self {
        match e {
            ModalError::QuadratureNotConverged { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<StaticsError> for CliError {
    fn from(e: StaticsError) -> Self {
        match e {
            StaticsError::NonzeroLoad | StaticsError::TooFewSteps(_) | StaticsError::NoModes => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Modal(m) => m.into(),
            DynamicsError::Config(_)
            | DynamicsError::Loaded
            | DynamicsError::InfiniteStationarySet => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match &command {
        Command::Critical(a) => critical(a),
        Command::Stationary(a) => stationary(&command, a),
        Command::Simulate(a) => simulate(&command, a),
        Command::Decay(a) => decay(&command, a),
        Command::Basin(a) => basin(&command, a),
        Command::Map(a) => map(&command, a),
        Command::Bifurcation(a) => bifurcation(&command, a),
        Command::Replay(a) => replay(a),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn check_stiffness(k: f64) -> Result<()> {
    if k.is_finite() && k >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--k must be finite and ≥ 0, got {k}"
        )))
    }
}

#[derive(Serialize)]
struct CriticalReport {
    k: f64,
    beta_c: f64,
    bar_beta: f64,
    n_k: usize,
    resonant: bool,
}

fn critical(args: &CriticalArgs) -> Result<()> {
    check_stiffness(args.k)?;
    let report = CriticalReport {
        k: args.k,
        beta_c: beta_c(args.k),
        bar_beta: bar_beta(args.k),
        n_k: n_k_index(args.k),
        resonant: is_resonant(args.k),
    };
    print!("{}", String::from_utf8_lossy(&to_json(&report)?));
    Ok(())
}

fn beam_params(beam: &BeamArgs) -> Result<BeamParams> {
    Ok(BeamParams::new(
        beam.beta(),
        beam.k,
        beam.delta,
        beam.f_modes.clone(),
    )?)
}

fn stationary(command: &Command, args: &StationaryArgs) -> Result<()> {
    let params = beam_params(&args.beam)?;
    let set = enumerate_stationary(&params)?;
    let mut sink = Sink::new(command, args.out.as_deref());
    if let Some(m) = sink.manifest() {
        m.params = Some(params.clone());
    }
    if set.kind == StationaryKind::ResonantContinuum {
        sink.emit(".json", to_json(&set)?, true)?;
    } else {
        let mut csv = Vec::new();
        write_stationary_csv(&set, &params, &mut csv)?;
        sink.emit(".csv", csv, true)?;
    }
    Ok(sink.finish()?)
}

fn integrator_config(run: &RunArgs, default_abs: f64) -> Result<IntegratorConfig> {
    let config = IntegratorConfig {
        rel_tol: run.rel_tol,
        abs_tol: run.abs_tol.unwrap_or(default_abs),
        max_step: run.max_step,
        t_end: run.t_end,
        sample_interval: run.dt,
        eps_phi: run.eps_phi,
    };
    config.validate()?;
    Ok(config)
}

fn initial_states(run: &RunArgs, count: usize) -> Result<Vec<ModalState>> {
    if run.modes == 0 {
        return Err(CliError::Usage("--modes must be at least 1".into()));
    }
    if run.random {
        if !(run.energy.is_finite() && run.energy >= 0.0) {
            return Err(CliError::Usage(format!(
                "--energy must be ≥ 0, got {}",
                run.energy
            )));
        }
        return Ok(random_ensemble(run.seed, run.energy, run.modes, count));
    }
    if count != 1 {
        return Err(CliError::Usage("--count above 1 needs --random".into()));
    }
    if run.a.len() > run.modes || run.v.len() > run.modes {
        return Err(CliError::Usage(format!(
            "initial data has more entries than --modes {}",
            run.modes
        )));
    }
    let mut a = run.a.clone();
    let mut v = run.v.clone();
    a.resize(run.modes, 0.0);
    v.resize(run.modes, 0.0);
    Ok(vec![ModalState::new(0.0, a, v)?])
}

fn record_run(sink: &mut Sink, run: &RunArgs, params: &BeamParams, config: &IntegratorConfig) {
    if let Some(m) = sink.manifest() {
        m.params = Some(params.clone());
        m.config = Some(*config);
        m.seed = run.random.then_some(run.seed);
    }
}

fn flag_failure(sink: &mut Sink, err: &DynamicsError) {
    if let Some(m) = sink.manifest() {
        m.complete = false;
        m.error = Some(err.to_string());
    }
}

fn simulate(command: &Command, args: &SimulateArgs) -> Result<()> {
    let run = &args.run;
    let params = beam_params(&run.beam)?;
    let config = integrator_config(run, DEFAULT_ABS_TOL)?;
    let initial = initial_states(run, 1)?.remove(0);
    let (trajectory, failure) = integrate_partial(&initial, &params, &config)?;

    let mut sink = Sink::new(command, run.out.as_deref());
    record_run(&mut sink, run, &params, &config);
    let mut states = Vec::new();
    trajectory.write_states_csv(&mut states)?;
    sink.emit(".csv", states, true)?;
    let mut energies = Vec::new();
    trajectory.write_energy_csv(&mut energies)?;
    sink.emit(".energy.csv", energies, false)?;
    if let Some(err) = &failure {
        flag_failure(&mut sink, err);
    }
    sink.finish()?;
    match failure {
        Some(err) => Err(CliError::Numeric(format!("{err}; partial output written"))),
        None => Ok(()),
    }
}

fn decay(command: &Command, args: &DecayArgs) -> Result<()> {
    let run = &args.run;
    let params = beam_params(&run.beam)?;
    let config = integrator_config(run, DECAY_ABS_TOL)?;
    let initial = initial_states(run, 1)?.remove(0);
    let (trajectory, failure) = integrate_partial(&initial, &params, &config)?;

    let mut sink = Sink::new(command, run.out.as_deref());
    record_run(&mut sink, run, &params, &config);
    let mut energies = Vec::new();
    trajectory.write_energy_csv(&mut energies)?;
    sink.emit(".energy.csv", energies, false)?;
    if let Some(err) = failure {
        flag_failure(&mut sink, &err);
        sink.finish()?;
        return Err(CliError::Numeric(format!("{err}; partial output written")));
    }
    let estimate = decay_rate(&trajectory, args.window)?;
    let report = serde_json::to_value(estimate).map_err(|e| CliError::Numeric(e.to_string()))?;
    if let Some(m) = sink.manifest() {
        m.result = Some(report.clone());
    }
    sink.finish()?;
    print!("{}", String::from_utf8_lossy(&to_json(&report)?));
    Ok(())
}

const BASIN_HEADER: &str = "member,limit,n,sign,settle_time,final_distance";

fn basin_row(member: usize, outcome: &BasinOutcome) -> String {
    let (limit, n, sign) = match outcome.limit {
        BasinLimit::Null => ("null", 0, 0),
        BasinLimit::Branch { n, positive } => ("branch", n, if positive { 1 } else { -1 }),
        BasinLimit::Unresolved => ("unresolved", 0, 0),
    };
    format!(
        "{member},{limit},{n},{sign},{},{}",
        fmt_num(outcome.settle_time),
        fmt_num(outcome.final_distance)
    )
}

fn basin(command: &Command, args: &BasinArgs) -> Result<()> {
    let run = &args.run;
    let params = beam_params(&run.beam)?;
    let config = integrator_config(run, DEFAULT_ABS_TOL)?;
    let states = initial_states(run, args.count)?;
    let settle = SettleCriteria::default();
    let outcomes = states
        .par_iter()
        .map(|z0| basin_classify(z0, &params, &config, &settle))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut csv = format!("{BASIN_HEADER}\n");
    for (i, outcome) in outcomes.iter().enumerate() {
        csv.push_str(&basin_row(i, outcome));
        csv.push('\n');
    }
    let mut sink = Sink::new(command, run.out.as_deref());
    record_run(&mut sink, run, &params, &config);
    sink.emit(".csv", csv.into_bytes(), true)?;
    Ok(sink.finish()?)
}

fn map(command: &Command, args: &MapArgs) -> Result<()> {
    check_stiffness(args.k.min)?;
    let rows = stability_map(
        (args.beta.min, args.beta.max),
        (args.k.min, args.k.max),
        args.beta.count,
        args.k.count,
    );
    let mut csv = Vec::new();
    write_map_csv(&rows, &mut csv)?;
    let mut sink = Sink::new(command, args.out.as_deref());
    sink.emit(".csv", csv, true)?;
    Ok(sink.finish()?)
}

fn bifurcation(command: &Command, args: &BifurcationArgs) -> Result<()> {
    check_stiffness(args.k)?;
    if !(args.beta_min.is_finite() && args.beta_max.is_finite() && args.beta_min < args.beta_max) {
        return Err(CliError::Usage(format!(
            "need finite --beta-min < --beta-max, got {} and {}",
            args.beta_min, args.beta_max
        )));
    }
    let rows = bifurcation_sweep(args.k, args.beta_min, args.beta_max, args.steps)?;
    let mut csv = Vec::new();
    write_bifurcation_csv(&rows, &mut csv)?;
    let mut sink = Sink::new(command, args.out.as_deref());
    sink.emit(".csv", csv, true)?;
    Ok(sink.finish()?)
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::load(Path::new(&args.manifest)).map_err(|e| {
        CliError::Usage(format!(
            "cannot read manifest {}: {e}",
            args.manifest.display()
        ))
    })?;
    let mut command = manifest.invocation;
    if matches!(command, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    if let (Some(out), Some(slot)) = (&args.out, command.out_mut()) {
        *slot = Some(out.clone());
    }
    run(command)
}
