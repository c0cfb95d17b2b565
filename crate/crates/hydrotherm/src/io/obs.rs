//! Observation-line CSV export: temperature and pressure sampled along each
//! configured line at every snapshot.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{sample_line, Mesh, ObservationLine};
use crate::sim::State;

use super::vtk::fmt_g9;

pub const CSV_HEADER: &str = "time_s,line_name,arc_length_m,x,y,z,temperature_K,pressure_Pa";

/// Appends one snapshot's samples for every line to `w`. Samples outside the
/// mesh leave the value fields empty.
pub fn append_observations<W: Write>(
    w: &mut W,
    mesh: &Mesh,
    state: &State,
    lines: &[ObservationLine],
) -> Result<()> {
    for line in lines {
        let temperature = sample_line(mesh, &state.temperature, line)?;
        let pressure = sample_line(mesh, &state.pressure, line)?;
        for (ts, ps) in temperature.iter().zip(&pressure) {
            let t_field = ts.value.map(fmt_g9).unwrap_or_default();
            let p_field = ps.value.map(fmt_g9).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                fmt_g9(state.time),
                line.name,
                fmt_g9(ts.arc_length),
                fmt_g9(ts.position[0]),
                fmt_g9(ts.position[1]),
                fmt_g9(ts.position[2]),
                t_field,
                p_field,
            )
            .map_err(|e| Error::io("observation csv".to_string(), e))?;
        }
    }
    Ok(())
}

/// One-shot export of a single snapshot (header plus rows).
pub fn write_observation_csv(
    mesh: &Mesh,
    state: &State,
    lines: &[ObservationLine],
    path: &Path,
) -> Result<()> {
    let ioerr = |e| Error::io(path.display().to_string(), e);
    let file = std::fs::File::create(path).map_err(ioerr)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}").map_err(ioerr)?;
    append_observations(&mut w, mesh, state, lines)?;
    w.flush().map_err(ioerr)
}
