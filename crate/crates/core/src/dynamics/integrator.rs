//! Dormand–Prince 5(4) with a PI step-size controller.
//!
//! Coefficients and controller constants follow Hairer, Nørsett & Wanner's
//! DOPRI5. The local error is measured in the max norm, so components that
//! stay identically zero never influence the step size.

use thiserror::Error;

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IntegrationError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("too many steps ({steps}) before t = {t}")]
    TooManySteps { t: f64, steps: u64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: u64 = 200_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

/// Adaptive stepper holding the current point `(t, y)`.
pub struct Dopri5<'a, S: OdeSystem> {
    system: &'a S,
    tol: Tolerances,
    t: f64,
    y: Vec<f64>,
    h: f64,
    err_old: f64,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    steps: u64,
    rejected: u64,
}

impl<'a, S: OdeSystem> Dopri5<'a, S> {
    pub fn new(system: &'a S, t0: f64, y0: Vec<f64>, tol: Tolerances) -> Self {
        let n = system.dim();
        assert_eq!(y0.len(), n, "state length must match the system dimension");
        let mut k: [Vec<f64>; 7] = Default::default();
        for ki in &mut k {
            *ki = vec![0.0; n];
        }
        system.eval(t0, &y0, &mut k[0]);
        let mut stepper = Self {
            system,
            tol,
            t: t0,
            y: y0,
            h: 0.0,
            err_old: 1e-4,
            k,
            y_stage: vec![0.0; n],
            y_new: vec![0.0; n],
            steps: 0,
            rejected: 0,
        };
        stepper.h = stepper.initial_step();
        stepper
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[f64] {
        &self.k[0]
    }

    pub fn accepted_steps(&self) -> u64 {
        self.steps
    }

    pub fn rejected_steps(&self) -> u64 {
        self.rejected
    }

    fn scale(&self, y0: f64, y1: f64) -> f64 {
        self.tol.abs + self.tol.rel * y0.abs().max(y1.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len();
        // components that start at zero are weighted like the largest one
        let y_max = self.y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..n {
            let sk = self.scale(self.y[i], y_max);
            d0 = d0.max((self.y[i] / sk).abs());
            d1 = d1.max((self.k[0][i] / sk).abs());
        }
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
        .min(self.tol.max_step);
        for i in 0..n {
            self.y_stage[i] = self.y[i] + h0 * self.k[0][i];
        }
        self.system.eval(self.t + h0, &self.y_stage, &mut self.k[1]);
        let mut d2: f64 = 0.0;
        for i in 0..n {
            let sk = self.scale(self.y[i], y_max);
            d2 = d2.max(((self.k[1][i] - self.k[0][i]) / sk).abs());
        }
        d2 /= h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.tol.max_step)
    }

    /// Attempt one step of size `h`; returns the scaled error norm.
    fn try_step(&mut self, h: f64) -> f64 {
        let n = self.y.len();
        let t = self.t;
        let (y, ys, k) = (&self.y, &mut self.y_stage, &mut self.k);

        for i in 0..n {
            ys[i] = y[i] + h * A21 * k[0][i];
        }
        self.system.eval(t + C2 * h, ys, &mut k[1]);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        self.system.eval(t + C3 * h, ys, &mut k[2]);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        self.system.eval(t + C4 * h, ys, &mut k[3]);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        self.system.eval(t + C5 * h, ys, &mut k[4]);
        for i in 0..n {
            ys[i] = y[i]
                + h * (A61 * k[0][i]
                    + A62 * k[1][i]
                    + A63 * k[2][i]
                    + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        self.system.eval(t + h, ys, &mut k[5]);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        self.system.eval(t + h, &self.y_new, &mut k[6]);

        let mut err: f64 = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sk = self.tol.abs + self.tol.rel * y[i].abs().max(self.y_new[i].abs());
            err = err.max((e / sk).abs());
        }
        err
    }

    /// Integrate up to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), IntegrationError> {
        while self.t < t_target {
            let remaining = t_target - self.t;
            let clamped = self.h >= remaining;
            let h = if clamped { remaining } else { self.h };
            if h < 1e-14 * self.t.abs().max(1.0) && !clamped {
                return Err(IntegrationError::StepUnderflow { t: self.t, h });
            }
            let err = self.try_step(h);
            if !err.is_finite() {
                // blow-up or overflow inside the stages; shrink hard
                self.rejected += 1;
                self.h = h * FAC_MIN;
                if self.h < 1e-14 * self.t.abs().max(1.0) {
                    return Err(IntegrationError::NonFinite { t: self.t });
                }
                continue;
            }
            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac =
                    (fac11 / self.err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let h_next = (h / fac).min(self.tol.max_step);
                self.err_old = err.max(1e-4);
                self.t = if clamped { t_target } else { self.t + h };
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.k.swap(0, 6);
                self.steps += 1;
                if self.y.iter().any(|x| !x.is_finite()) {
                    return Err(IntegrationError::NonFinite { t: self.t });
                }
                // a step cut short to land on the target does not shrink the next one
                self.h = if clamped {
                    self.h.max(h_next).min(self.tol.max_step)
                } else {
                    h_next
                };
                if self.steps > MAX_STEPS {
                    return Err(IntegrationError::TooManySteps {
                        t: self.t,
                        steps: self.steps,
                    });
                }
            } else {
                self.rejected += 1;
                self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator {
        omega: f64,
    }

    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -self.omega * self.omega * y[0];
        }
    }

    struct Exponential;

    impl OdeSystem for Exponential {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * t.cos();
        }
    }

    fn tol(rel: f64) -> Tolerances {
        Tolerances {
            rel,
            abs: rel * 1e-2,
            max_step: 1.0,
        }
    }

    #[test]
    fn harmonic_oscillator_matches_closed_form() {
        let sys = Oscillator { omega: 3.0 };
        let mut s = Dopri5::new(&sys, 0.0, vec![1.0, 0.0], tol(1e-10));
        for i in 1..=20 {
            let t = i as f64 * 0.5;
            s.advance_to(t).unwrap();
            assert_eq!(s.t(), t);
            assert!((s.y()[0] - (3.0 * t).cos()).abs() < 1e-8);
            assert!((s.y()[1] + 3.0 * (3.0 * t).sin()).abs() < 3e-8);
        }
    }

    #[test]
    fn non_autonomous_problem() {
        let mut s = Dopri5::new(&Exponential, 0.0, vec![1.0], tol(1e-11));
        s.advance_to(10.0).unwrap();
        assert!((s.y()[0] - 10f64.sin().exp()).abs() < 1e-9);
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let sys = Oscillator { omega: 1.0 };
        let errors: Vec<f64> = [1e-5, 1e-7, 1e-9]
            .iter()
            .map(|&r| {
                let mut s = Dopri5::new(&sys, 0.0, vec![1.0, 0.0], tol(r));
                s.advance_to(20.0).unwrap();
                (s.y()[0] - 20f64.cos()).abs()
            })
            .collect();
        assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    }

    #[test]
    fn zero_state_is_preserved() {
        let sys = Oscillator { omega: 5.0 };
        let mut s = Dopri5::new(&sys, 0.0, vec![0.0, 0.0], tol(1e-10));
        s.advance_to(3.0).unwrap();
        assert_eq!(s.y(), &[0.0, 0.0]);
    }

    struct Blowup;

    impl OdeSystem for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn finite_time_blowup_is_reported() {
        let mut s = Dopri5::new(&Blowup, 0.0, vec![1.0], tol(1e-8));
        assert!(s.advance_to(2.0).is_err());
    }
}
