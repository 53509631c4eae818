//! CSV emission shared by every exported table.

use std::io::{self, Write};

use crate::modal::BeamParams;
use crate::stability::{MapRow, MAP_HEADER};
use crate::statics::{static_residual, BifurcationRow, StationarySet, BIFURCATION_HEADER};

pub const STATIONARY_HEADER: &str = "n,sign,amplitude,residual";

/// Full-precision decimal: 17 significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_bifurcation_csv<W: Write>(rows: &[BifurcationRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{BIFURCATION_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_num(r.beta),
            r.n,
            fmt_num(r.amplitude_plus),
            fmt_num(r.amplitude_minus)
        )?;
    }
    Ok(())
}

pub fn write_map_csv<W: Write>(rows: &[MapRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{MAP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_num(r.k),
            fmt_num(r.beta),
            r.verdict.class,
            fmt_num(r.verdict.nu),
            fmt_num(r.verdict.beta_c),
            fmt_num(r.verdict.bar_beta)
        )?;
    }
    Ok(())
}

/// Isolated stationary states, null state first (`n = 0`, `sign = 0`).
pub fn write_stationary_csv<W: Write>(
    set: &StationarySet,
    params: &BeamParams,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "{STATIONARY_HEADER}")?;
    writeln!(
        w,
        "0,0,{},{}",
        fmt_num(0.0),
        fmt_num(static_residual(&[0.0], params))
    )?;
    for b in &set.branches {
        for (sign, positive, amplitude) in
            [(1, true, b.amplitude_plus), (-1, false, b.amplitude_minus)]
        {
            let residual = static_residual(&b.amplitudes(positive, b.mode_index), params);
            writeln!(
                w,
                "{},{sign},{},{}",
                b.mode_index,
                fmt_num(amplitude),
                fmt_num(residual)
            )?;
        }
    }
    Ok(())
}
