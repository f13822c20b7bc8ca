//! On-disk formats.
//!
//! Every data file is a CSV with a JSON sidecar of the same stem. Floats in
//! CSV files use a fixed `{:.10e}` format so identical runs produce
//! byte-identical files. Grid CSVs are long-form (`axis0,axis1,W`), first
//! axis slowest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{Provenance, SweepResult};
use crate::dynamics::ObservableSeries;
use crate::error::{Error, Result};
use crate::tomography::{GridKind, GridMetadata, WignerGrid};

pub const GRID_FORMAT: &str = "catswap-grid/1";
pub const SWEEP_FORMAT: &str = "catswap-sweep/1";
pub const SERIES_FORMAT: &str = "catswap-series/1";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.10e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisInfo {
    pub name: String,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    /// Periodic axes omit the endpoint `max + step`.
    pub periodic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub format: String,
    pub data: String,
    pub kind: GridKind,
    pub axes: [AxisInfo; 2],
    pub value_column: String,
    pub conventions: Vec<String>,
    pub max_imag_residue: f64,
    pub metadata: GridMetadata,
    pub config_hash: String,
}

fn conventions(kind: GridKind) -> Vec<String> {
    let lines: &[&str] = match kind {
        GridKind::FieldPlane => &[
            "q = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)), hbar = 1",
            "integral of W dq dp = 1",
        ],
        GridKind::SpinSphere => &[
            "theta: colatitude measured from the all-excited pole (S_z = +S); phi: azimuth",
            "integral of W sin(theta) dtheta dphi = sqrt(4 pi / (2S + 1))",
        ],
        GridKind::SpinLambert => &[
            "Lambert azimuthal equal-area map of the spin sphere: r = 2 sin(theta/2), theta_p = phi",
            "r in [0, 2]: the all-excited pole at the centre, its antipode on the boundary",
        ],
    };
    lines.iter().map(|s| s.to_string()).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("cannot create {}", path.display()), e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush()
        .and_then(|_| w.get_ref().sync_data())
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e.into()))?;
    w.write_all(b"\n")
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e))?;
    finish(w, path)
}

fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

fn axis_info(name: &str, values: &[f64], periodic: bool) -> AxisInfo {
    AxisInfo {
        name: name.to_string(),
        count: values.len(),
        min: values.first().copied().unwrap_or(0.0),
        max: values.last().copied().unwrap_or(0.0),
        periodic,
    }
}

/// Writes `<stem>.csv` and `<stem>.json`; returns both paths. Nothing is
/// left behind on failure.
pub fn write_grid(dir: &Path, stem: &str, grid: &WignerGrid, config_hash: &str) -> Result<Vec<PathBuf>> {
    let (csv, json) = paths(dir, stem);
    write_grid_files(&csv, &json, stem, grid, config_hash).inspect_err(|_| {
        let _ = std::fs::remove_file(&csv);
        let _ = std::fs::remove_file(&json);
    })?;
    Ok(vec![csv, json])
}

fn write_grid_files(csv: &Path, json: &Path, stem: &str, grid: &WignerGrid, config_hash: &str) -> Result<()> {
    let [a0, a1] = grid.kind.axis_names();
    let mut w = create(csv)?;
    let io = |e| Error::io(format!("cannot write {}", csv.display()), e);
    writeln!(w, "{a0},{a1},W").map_err(io)?;
    let cols = grid.cols();
    for (i, x) in grid.axis0.iter().enumerate() {
        for (j, y) in grid.axis1.iter().enumerate() {
            let v = grid.values[i * cols + j];
            writeln!(w, "{},{},{}", fmt_float(*x), fmt_float(*y), fmt_float(v)).map_err(io)?;
        }
    }
    finish(w, csv)?;

    let periodic = grid.kind != GridKind::FieldPlane;
    let sidecar = GridSidecar {
        format: GRID_FORMAT.into(),
        data: format!("{stem}.csv"),
        kind: grid.kind,
        axes: [axis_info(a0, &grid.axis0, false), axis_info(a1, &grid.axis1, periodic)],
        value_column: "W".into(),
        conventions: conventions(grid.kind),
        max_imag_residue: grid.max_imag_residue,
        metadata: grid.metadata.clone(),
        config_hash: config_hash.into(),
    };
    write_json(json, &sidecar)
}

fn parse_err(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::io(
        format!("malformed grid file {}", path.display()),
        std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()),
    )
}

/// Reads a grid back from its JSON sidecar and the CSV it names.
pub fn read_grid(sidecar_path: &Path) -> Result<(WignerGrid, GridSidecar)> {
    let text = std::fs::read_to_string(sidecar_path)
        .map_err(|e| Error::io(format!("cannot read {}", sidecar_path.display()), e))?;
    let side: GridSidecar = serde_json::from_str(&text).map_err(|e| parse_err(sidecar_path, e))?;
    let csv_path = sidecar_path.with_file_name(&side.data);
    let body = std::fs::read_to_string(&csv_path)
        .map_err(|e| Error::io(format!("cannot read {}", csv_path.display()), e))?;
    let (rows, cols) = (side.axes[0].count, side.axes[1].count);
    let mut axis0 = Vec::with_capacity(rows);
    let mut axis1 = Vec::with_capacity(cols);
    let mut values = Vec::with_capacity(rows * cols);
    for (n, line) in body.lines().skip(1).enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(&csv_path, format!("line {}: {e}", n + 2)))?;
        if fields.len() != 3 {
            return Err(parse_err(&csv_path, format!("line {}: expected 3 columns", n + 2)));
        }
        if n % cols == 0 {
            axis0.push(fields[0]);
        }
        if n < cols {
            axis1.push(fields[1]);
        }
        values.push(fields[2]);
    }
    if values.len() != rows * cols {
        return Err(parse_err(&csv_path, format!("expected {} rows, found {}", rows * cols, values.len())));
    }
    let grid = WignerGrid {
        kind: side.kind,
        axis0,
        axis1,
        values,
        max_imag_residue: side.max_imag_residue,
        metadata: side.metadata.clone(),
    };
    Ok((grid, side))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSidecar {
    pub format: String,
    pub data: String,
    pub columns: Vec<String>,
    pub provenance: Provenance,
    pub run_config_hash: String,
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "N",
    "gamma",
    "t",
    "fidelity",
    "spin_purity",
    "field_mean_photon_number",
    "best_phase_fidelity",
    "best_phase",
    "fidelity_residue",
    "min_eigenvalue",
    "trace_error",
    "hermiticity_error",
    "excitation_monotone",
    "dt",
    "fock_cutoff",
];

pub fn write_sweep(dir: &Path, stem: &str, result: &SweepResult, config_hash: &str) -> Result<Vec<PathBuf>> {
    let (csv, json) = paths(dir, stem);
    let mut w = create(&csv)?;
    let io = |e| Error::io(format!("cannot write {}", csv.display()), e);
    writeln!(w, "{}", SWEEP_COLUMNS.join(",")).map_err(io)?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in &result.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n_qubits,
            fmt_float(r.gamma),
            fmt_float(r.time),
            fmt_float(r.fidelity),
            fmt_float(r.spin_purity),
            fmt_float(r.mean_photon_number),
            opt(r.best_phase_fidelity),
            opt(r.best_phase),
            fmt_float(r.fidelity_residue),
            fmt_float(r.min_eigenvalue),
            fmt_float(r.trace_error),
            fmt_float(r.hermiticity_error),
            r.excitation_monotone,
            fmt_float(r.step),
            r.fock_cutoff,
        )
        .map_err(io)?;
    }
    finish(w, &csv)?;
    let sidecar = SweepSidecar {
        format: SWEEP_FORMAT.into(),
        data: format!("{stem}.csv"),
        columns: SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect(),
        provenance: result.provenance.clone(),
        run_config_hash: config_hash.into(),
    };
    write_json(&json, &sidecar)?;
    Ok(vec![csv, json])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSidecar {
    pub format: String,
    pub data: String,
    pub columns: Vec<String>,
    pub metadata: Value,
    pub config_hash: String,
}

/// Observable time series: column `t`, then the real part of each series.
pub fn write_series(
    dir: &Path,
    stem: &str,
    times: &[f64],
    series: &[ObservableSeries],
    metadata: Value,
    config_hash: &str,
) -> Result<Vec<PathBuf>> {
    let (csv, json) = paths(dir, stem);
    let mut columns = vec!["t".to_string()];
    columns.extend(series.iter().map(|s| s.name.clone()));
    let mut w = create(&csv)?;
    let io = |e| Error::io(format!("cannot write {}", csv.display()), e);
    writeln!(w, "{}", columns.join(",")).map_err(io)?;
    for (i, t) in times.iter().enumerate() {
        let mut line = fmt_float(*t);
        for s in series {
            line.push(',');
            line.push_str(&fmt_float(s.values[i].re));
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    finish(w, &csv)?;
    write_json(
        &json,
        &SeriesSidecar {
            format: SERIES_FORMAT.into(),
            data: format!("{stem}.csv"),
            columns,
            metadata,
            config_hash: config_hash.into(),
        },
    )?;
    Ok(vec![csv, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WignerGrid {
        WignerGrid {
            kind: GridKind::FieldPlane,
            axis0: vec![-1.0, 0.0, 1.0],
            axis1: vec![-2.0, 2.0],
            values: vec![0.1, -0.2, 0.3, 1.0 / 3.0, 5e-17, -0.0],
            max_imag_residue: 1e-17,
            metadata: GridMetadata {
                time: Some(0.5),
                ..Default::default()
            },
        }
    }

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_grid(dir.path(), "g", &sample(), "abc").unwrap();
        assert_eq!(files.len(), 2);
        let (grid, side) = read_grid(&files[1]).unwrap();
        assert_eq!(side.config_hash, "abc");
        assert_eq!(grid.axis0, sample().axis0);
        assert_eq!(grid.axis1, sample().axis1);
        for (a, b) in grid.values.iter().zip(sample().values) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
        }
        let text = std::fs::read_to_string(&files[0]).unwrap();
        assert!(text.starts_with("q,p,W\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn grid_files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_grid(dir.path(), "a", &sample(), "h").unwrap();
        let b = write_grid(dir.path(), "b", &sample(), "h").unwrap();
        assert_eq!(std::fs::read(&a[0]).unwrap(), std::fs::read(&b[0]).unwrap());
    }

    #[test]
    fn truncated_grid_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_grid(dir.path(), "g", &sample(), "h").unwrap();
        let text = std::fs::read_to_string(&files[0]).unwrap();
        let cut: Vec<&str> = text.lines().take(4).collect();
        std::fs::write(&files[0], cut.join("\n")).unwrap();
        assert!(read_grid(&files[1]).is_err());
    }
}
