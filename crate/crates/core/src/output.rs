//! CSV and JSON writers. Floats in CSV carry 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::homologous::{OmegaTrajectory, SelfSimilarProfile};
use crate::lagrangian::DeformationMap;
use crate::phase::PhaseOrbit;
use crate::static_ball::BallProfile;

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl IntoIterator<Item = [f64; N]>,
) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header)?;
    for row in rows {
        wr.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    wr.flush()?;
    Ok(())
}

/// CSV with a header and pre-formatted cells.
pub fn write_records<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header)?;
    for row in rows {
        wr.write_record(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_profile_csv<W: Write>(p: &BallProfile, w: W) -> Result<()> {
    write_rows(
        w,
        ["r", "delta", "eta", "y", "F_rad", "F_tan", "mass"],
        p.samples.iter().map(|s| [s.r, s.delta, s.eta, s.y, s.f_rad, s.f_tan, s.mass]),
    )
}

pub fn write_omega_csv<W: Write>(t: &OmegaTrajectory, w: W) -> Result<()> {
    write_rows(w, ["t", "omega", "omegadot"], t.samples.iter().map(|s| [s.t, s.omega, s.omegadot]))
}

pub fn write_self_similar_csv<W: Write>(p: &SelfSimilarProfile, w: W) -> Result<()> {
    write_rows(
        w,
        ["z", "delta0", "eta0", "y0", "F_rad", "F_tan"],
        p.samples().iter().map(|s| [s.r, s.delta, s.eta, s.y, s.f_rad, s.f_tan]),
    )
}

pub fn write_orbit_csv<W: Write>(o: &PhaseOrbit, w: W) -> Result<()> {
    write_rows(w, ["xi", "y", "v"], o.samples.iter().map(|s| [s.xi, s.y, s.v]))
}

pub fn write_deformation_csv<W: Write>(m: &DeformationMap, w: W) -> Result<()> {
    let st = m.stretches();
    write_rows(
        w,
        ["z", "psi", "psiprime", "lambda1", "lambda2"],
        (0..m.z.len()).map(|i| [m.z[i], m.psi[i], m.dpsi[i], st[i].lambda1, st[i].lambda2]),
    )
}

/// Run record written next to every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub build: Option<String>,
    pub command: String,
    /// Fully resolved configuration.
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }
}
