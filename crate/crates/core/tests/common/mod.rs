//! Helpers shared by the integration tests.

use std::f64::consts::PI;

/// Classical RK4 with its own right-hand side, independent of the library.
pub fn rk4_reference(
    beta: f64,
    k: f64,
    delta: f64,
    a: &[f64],
    t_end: f64,
    h: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let w: Vec<f64> = (1..=n).map(|m| (m as f64 * PI).powi(2)).collect();
    let field = |y: &[f64], dy: &mut [f64]| {
        let s: f64 = 0.5 * (0..n).map(|i| w[i] * y[i] * y[i]).sum::<f64>();
        for i in 0..n {
            dy[i] = y[n + i];
            dy[n + i] = -(w[i] * w[i] + k + (beta + s) * w[i]) * y[i] - delta * y[n + i];
        }
    };
    let mut y: Vec<f64> = a
        .iter()
        .copied()
        .chain(std::iter::repeat_n(0.0, n))
        .collect();
    let steps = (t_end / h).round() as usize;
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![0.0; 2 * n],
        vec![0.0; 2 * n],
        vec![0.0; 2 * n],
        vec![0.0; 2 * n],
    );
    let mut tmp = vec![0.0; 2 * n];
    for _ in 0..steps {
        field(&y, &mut k1);
        for i in 0..2 * n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        field(&tmp, &mut k2);
        for i in 0..2 * n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        field(&tmp, &mut k3);
        for i in 0..2 * n {
            tmp[i] = y[i] + h * k3[i];
        }
        field(&tmp, &mut k4);
        for i in 0..2 * n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let v = y.split_off(n);
    (y, v)
}
