//! Energy functionals along an orbit.
//!
//! ```text
//! ℰ = ‖u‖₂² + ‖∂ₜu‖²
//! ℒ = ℰ + ½(β + ‖u‖₁²)² + k‖u‖²
//! ℱ = ℒ - 2⟨f, u⟩,          dℱ/dt = -2δ‖∂ₜu‖²
//! Φ_ε = ℒ + ε⟨∂ₜu, u⟩
//! ```

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::modal::{modal_inner, modal_norm_sq, BeamParams, ModalState};

pub(crate) const ENERGY_HEADER: &str = "t,E,L,F,Phi,defect";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "L")]
    pub lyapunov: f64,
    #[serde(rename = "F")]
    pub free_energy: f64,
    #[serde(rename = "Phi")]
    pub phi: f64,
    /// `|ℱ(tᵢ) - ℱ(tᵢ₋₁) + 2δ∫‖∂ₜu‖²|` over the interval ending here; zero
    /// for an isolated state.
    #[serde(rename = "defect")]
    pub dissipation_defect: f64,
}

pub fn energy_ledger(state: &ModalState, params: &BeamParams, eps: f64) -> EnergyRecord {
    let energy = modal_norm_sq(&state.a, 2) + modal_norm_sq(&state.v, 0);
    let tension = params.beta + modal_norm_sq(&state.a, 1);
    let lyapunov = energy + 0.5 * tension * tension + params.k * modal_norm_sq(&state.a, 0);
    let load_work: f64 = 0.5
        * state
            .a
            .iter()
            .enumerate()
            .map(|(i, a)| params.load(i + 1) * a)
            .sum::<f64>();
    EnergyRecord {
        t: state.t,
        energy,
        lyapunov,
        free_energy: lyapunov - 2.0 * load_work,
        phi: lyapunov + eps * modal_inner(&state.v, &state.a),
        dissipation_defect: 0.0,
    }
}

/// Largest violation of `ℱ(tᵢ) - ℱ(tᵢ₋₁) + 2δ∫‖∂ₜu‖² = 0` between
/// consecutive samples, using the integral carried by the trajectory.
pub fn dissipation_check(trajectory: &Trajectory) -> f64 {
    let params = &trajectory.params;
    let eps = trajectory.config.eps_for(params);
    let free: Vec<f64> = trajectory
        .samples
        .iter()
        .map(|s| energy_ledger(s, params, eps).free_energy)
        .collect();
    free.windows(2)
        .zip(trajectory.dissipated.windows(2))
        .map(|(f, d)| (f[1] - f[0] + 2.0 * params.delta * (d[1] - d[0])).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use std::f64::consts::PI;

    const PI2: f64 = PI * PI;
    const PI4: f64 = PI2 * PI2;

    #[test]
    fn ledger_examples() {
        let p = BeamParams::unloaded(-3.0, 0.0, 1.0).unwrap();
        let r = energy_ledger(&ModalState::zeros(4), &p, 0.3);
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.lyapunov, 4.5);
        assert_eq!(r.free_energy, 4.5);
        assert_eq!(r.phi, 4.5);

        let p = BeamParams::unloaded(0.0, 0.0, 1.0).unwrap();
        let r = energy_ledger(&ModalState::at_rest(&[1.0], 1), &p, 0.0);
        assert!((r.energy - PI4 / 2.0).abs() < 1e-12);
        assert!((r.lyapunov - (PI4 / 2.0 + PI4 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn ledger_relations() {
        let p = BeamParams::new(-7.0, 12.0, 1.0, vec![0.3, -0.2]).unwrap();
        let s = ModalState::new(1.0, vec![0.2, -0.1, 0.05], vec![1.0, 0.5, -2.0]).unwrap();
        let r = energy_ledger(&s, &p, 0.25);
        let tension = p.beta + modal_norm_sq(&s.a, 1);
        let gap = 0.5 * tension * tension + p.k * modal_norm_sq(&s.a, 0);
        assert!((r.lyapunov - r.energy - gap).abs() < 1e-12);
        assert!(r.lyapunov >= r.energy && r.energy >= 0.0);
        let fu = 0.5 * (0.3 * 0.2 + 0.2 * 0.1);
        assert!((r.free_energy - (r.lyapunov - 2.0 * fu)).abs() < 1e-12);
        let vu = 0.5 * (0.2 - 0.05 - 0.1);
        assert!((r.phi - (r.lyapunov + 0.25 * vu)).abs() < 1e-12);
    }

    #[test]
    fn zero_trajectory_has_no_defect() {
        let p = BeamParams::unloaded(-2.0, 1.0, 1.0).unwrap();
        let t = integrate(
            &ModalState::zeros(3),
            &p,
            &IntegratorConfig::with_horizon(2.0, 0.1),
        )
        .unwrap();
        assert_eq!(dissipation_check(&t), 0.0);
    }

    #[test]
    fn undamped_run_conserves_free_energy() {
        let p = BeamParams::undamped(-2.0 * PI2, 5.0, vec![0.4, 0.0, 0.1]).unwrap();
        let z0 =
            ModalState::new(0.0, vec![0.3, 0.05, 0.0, 0.01], vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let t = integrate(&z0, &p, &IntegratorConfig::with_horizon(10.0, 0.01)).unwrap();
        let f0 = t.energies[0].free_energy;
        for e in &t.energies {
            assert!(
                (e.free_energy - f0).abs() < 1e-9 * f0.abs(),
                "{} vs {f0}",
                e.free_energy
            );
        }
        assert!(dissipation_check(&t) < 1e-9 * f0.abs());
    }

    #[test]
    fn check_agrees_with_recorded_defects() {
        let p = BeamParams::new(-3.0 * PI2, 40.0, 0.8, vec![0.5]).unwrap();
        let z0 = ModalState::at_rest(&[0.2, 0.1], 6);
        let t = integrate(&z0, &p, &IntegratorConfig::with_horizon(5.0, 0.01)).unwrap();
        let recorded = t
            .energies
            .iter()
            .map(|e| e.dissipation_defect)
            .fold(0.0, f64::max);
        assert!((dissipation_check(&t) - recorded).abs() < 1e-12);
        for w in t.energies.windows(2) {
            assert!(w[1].free_energy <= w[0].free_energy + 1e-8);
        }
    }
}
