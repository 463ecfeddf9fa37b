use std::io::Write;

use super::{EnergyLedger, ProbeRecord, Snapshot};
use crate::circuit::CircuitGraph;

/// Rows are times, columns node phases (ground omitted).
pub fn write_snapshot_csv<W: Write>(w: W, g: &CircuitGraph, snaps: &[Snapshot]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend(g.node_names()[1..].iter().cloned());
    out.write_record(&header)?;
    for s in snaps {
        let mut row = vec![s.t.to_string()];
        row.extend(s.phi[1..].iter().map(|x| x.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_probe_csv<W: Write>(w: W, p: &ProbeRecord) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", p.name.as_str()])?;
    for (t, v) in &p.samples {
        out.write_record([t.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_energy_csv<W: Write>(w: W, hist: &[(f64, EnergyLedger)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "t",
        "kinetic",
        "inductive",
        "josephson",
        "dissipated",
        "total",
    ])?;
    for (t, e) in hist {
        out.write_record(
            [
                *t,
                e.kinetic,
                e.inductive,
                e.josephson,
                e.dissipated,
                e.total,
            ]
            .map(|x| x.to_string()),
        )?;
    }
    out.flush()?;
    Ok(())
}
