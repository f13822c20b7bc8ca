//! Scenario execution for config files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{run_fig3_sweep, SweepParams};
use crate::config::{ExperimentConfig, FieldInit, Scenario, SpinInit, SpinProjection, TimeExpr};
use crate::dynamics::{
    default_step, evolve_lindblad, evolve_schrodinger, EvolutionSpec, InitialState, Observable, ObservableSeries,
};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Factor, HilbertConfig, StateVector};
use crate::operators::{
    collective_spin, excitation_number, number_operator, tavis_cummings_hamiltonian, OperatorMatrix, SpinAxis,
};
use crate::output::{write_grid, write_json, write_series, write_sweep};
use crate::states::{coherent_state, dicke_state, field_cat, fock_state, product_state, spin_cat, spin_coherent_state};
use crate::tomography::{field_wigner, lambert_project, reduce_field, reduce_spins, spin_wigner, GridMetadata, WignerGrid};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides `output.directory`.
    pub out_dir: Option<PathBuf>,
    /// Validate and resolve only; nothing is computed or written.
    pub dry_run: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub config_hash: String,
    pub out_dir: PathBuf,
    pub dry_run: bool,
    pub resolved_times: BTreeMap<String, f64>,
    pub files: Vec<PathBuf>,
}

pub fn run_path(path: &Path, opts: &RunOptions) -> Result<RunReport> {
    let cfg = ExperimentConfig::from_path(path)?;
    run(&cfg, opts)
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let out_dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    let mut report = RunReport {
        scenario: cfg.scenario,
        config_hash: cfg.hash(),
        out_dir: out_dir.clone(),
        dry_run: opts.dry_run,
        resolved_times: resolved_times(cfg)?,
        files: Vec::new(),
    };
    for (name, t) in &report.resolved_times {
        log::info!("{name} = {t:.10}");
    }
    if opts.dry_run {
        return Ok(report);
    }
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::io(format!("cannot create {}", out_dir.display()), e))?;

    let hash = report.config_hash.clone();
    let files = match cfg.scenario {
        Scenario::CatswapSnapshots | Scenario::Custom => snapshots(cfg, &out_dir, &hash)?,
        Scenario::Fig2Wigner => fig2(cfg, &out_dir, &hash)?,
        Scenario::Fig3Sweep => fig3(cfg, &out_dir, &hash)?,
        Scenario::JcCollapseRevival => collapse_revival(cfg, &out_dir, &hash)?,
    };
    report.files.extend(files);
    if cfg.output.frames.is_some() {
        report.files.extend(export_frames(cfg, &out_dir)?);
    }

    let manifest = out_dir.join("manifest.json");
    let names: Vec<String> = report
        .files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    write_json(
        &manifest,
        &json!({
            "config_hash": hash,
            "scenario": cfg.scenario,
            "resolved_times": report.resolved_times,
            "files": names,
            "config": cfg,
        }),
    )?;
    report.files.push(manifest);
    Ok(report)
}

fn resolved_times(cfg: &ExperimentConfig) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    match cfg.scenario {
        Scenario::Fig2Wigner | Scenario::Fig3Sweep => {
            for n in cfg.n_qubits_list() {
                let ts = crate::dynamics::timescales(cfg.coupling(), cfg.nbar(), n)?;
                out.insert(format!("t_r/N (N={n})"), ts.first_revival);
            }
        }
        _ => {
            out.insert("t_final".into(), cfg.t_final()?);
            for e in cfg.snapshot_exprs() {
                out.insert(format!("snapshot {e}"), cfg.resolve_time(&e)?);
            }
            if let Some(frames) = &cfg.output.frames {
                out.insert("frame interval".into(), cfg.resolve_time(&frames.interval)?);
            }
        }
    }
    Ok(out)
}

fn observable(cfg: HilbertConfig, name: &str) -> Result<Observable> {
    let op = match name {
        "photon_number" => number_operator(cfg),
        "sx" => collective_spin(cfg, SpinAxis::X),
        "sy" => collective_spin(cfg, SpinAxis::Y),
        "sz" => collective_spin(cfg, SpinAxis::Z),
        "inversion" => {
            let sz = collective_spin(cfg, SpinAxis::Z);
            let scale = C64::new(2.0 / cfg.n_qubits as f64, 0.0);
            OperatorMatrix::new(cfg, Factor::Spin, sz.entries * scale, true)?
        }
        "excitation_number" => excitation_number(cfg),
        "energy" => tavis_cummings_hamiltonian(cfg),
        other => return Err(Error::config("observables", format!("unknown observable \"{other}\""))),
    };
    Ok(Observable::new(name, op))
}

fn hilbert(cfg: &ExperimentConfig, n_qubits: usize) -> Result<HilbertConfig> {
    HilbertConfig::new(n_qubits, cfg.fock_cutoff(), cfg.coupling())
}

fn initial_state(cfg: &ExperimentConfig, h: HilbertConfig) -> Result<StateVector> {
    let alpha = C64::new(cfg.nbar().sqrt(), 0.0);
    match (cfg.scenario, &cfg.initial) {
        (Scenario::JcCollapseRevival, None) => product_state(&dicke_state(h, 0)?, &coherent_state(h, alpha)?),
        (_, None) => product_state(&spin_cat(h, cfg.z())?, &coherent_state(h, alpha)?),
        (_, Some(init)) => {
            let c = |v: [f64; 2]| C64::new(v[0], v[1]);
            let spin = match &init.spin {
                SpinInit::Coherent { z } => spin_coherent_state(h, c(*z)),
                SpinInit::Cat { z } => spin_cat(h, c(*z))?,
                SpinInit::Dicke { k } => dicke_state(h, *k)?,
            };
            let field = match &init.field {
                FieldInit::Coherent { alpha } => coherent_state(h, c(*alpha))?,
                FieldInit::Cat { alpha, sign } => field_cat(h, c(*alpha), *sign)?,
                FieldInit::Fock { n } => fock_state(h, *n)?,
            };
            product_state(&spin, &field)
        }
    }
}

/// Trajectory data shared by all scenarios; snapshots as density matrices.
struct Run {
    times: Vec<f64>,
    series: Vec<ObservableSeries>,
    snapshots: Vec<(f64, DensityMatrix)>,
}

/// Pure-state evolution when `Γ = 0`, master equation otherwise.
fn evolve(
    cfg: &ExperimentConfig,
    psi0: StateVector,
    gamma: f64,
    t_final: f64,
    observables: Vec<Observable>,
    snapshot_times: Vec<f64>,
) -> Result<Run> {
    let n = psi0.config.n_qubits;
    let ts = crate::dynamics::timescales(cfg.coupling(), cfg.nbar(), n)?;
    let dt = cfg.numerics.dt.unwrap_or_else(|| default_step(&ts, cfg.coupling()));
    let spec = EvolutionSpec::new(InitialState::Pure(psi0), t_final, dt, gamma)
        .with_observables(observables)
        .with_snapshots(snapshot_times)
        .record_every(cfg.record_every());
    if gamma == 0.0 {
        let traj = evolve_schrodinger(&spec)?;
        Ok(Run {
            times: traj.times,
            series: traj.series,
            snapshots: traj.snapshots.into_iter().map(|s| (s.time, s.state.projector())).collect(),
        })
    } else {
        let traj = evolve_lindblad(&spec)?;
        Ok(Run {
            times: traj.times,
            series: traj.series,
            snapshots: traj.snapshots.into_iter().map(|s| (s.time, s.state)).collect(),
        })
    }
}

fn field_grid(cfg: &ExperimentConfig, rho: &DensityMatrix, meta: GridMetadata) -> Result<WignerGrid> {
    let fg = &cfg.output.field_grid;
    let mut grid = field_wigner(
        &reduce_field(rho)?,
        (fg.q_range[0], fg.q_range[1]),
        (fg.p_range[0], fg.p_range[1]),
        (fg.resolution[0], fg.resolution[1]),
    )?;
    grid.metadata = meta;
    Ok(grid)
}

fn spin_grid(cfg: &ExperimentConfig, rho: &DensityMatrix, meta: GridMetadata) -> Result<WignerGrid> {
    let sg = &cfg.output.spin_grid;
    let sphere = spin_wigner(&reduce_spins(rho)?, sg.theta, sg.phi)?;
    let mut grid = match sg.projection {
        SpinProjection::Sphere => sphere,
        SpinProjection::Lambert => lambert_project(&sphere, sg.lambert_radial, sg.lambert_angular)?,
    };
    grid.metadata = meta;
    Ok(grid)
}

fn metadata(cfg: &ExperimentConfig, n_qubits: usize, gamma: f64, time: f64, label: String) -> GridMetadata {
    GridMetadata {
        time: Some(time),
        gamma: Some(gamma),
        n_qubits: Some(n_qubits),
        nbar: Some(cfg.nbar()),
        label: Some(label),
    }
}

fn observables(cfg: &ExperimentConfig, h: HilbertConfig) -> Result<Vec<Observable>> {
    cfg.observables().iter().map(|name| observable(h, name)).collect()
}

fn series_metadata(cfg: &ExperimentConfig, n_qubits: usize, gamma: f64) -> Value {
    json!({
        "n_qubits": n_qubits,
        "gamma": gamma,
        "nbar": cfg.nbar(),
        "coupling": cfg.coupling(),
        "fock_cutoff": cfg.fock_cutoff(),
        "dt": cfg.numerics.dt,
    })
}

fn snapshots(cfg: &ExperimentConfig, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
    let n = cfg.n_qubits();
    let h = hilbert(cfg, n)?;
    let gamma = cfg.gamma();
    let exprs = cfg.snapshot_exprs();
    let mut times: Vec<(f64, TimeExpr)> = exprs
        .iter()
        .map(|e| Ok((cfg.resolve_time(e)?, e.clone())))
        .collect::<Result<_>>()?;
    times.sort_by(|a, b| a.0.total_cmp(&b.0));
    let run = evolve(
        cfg,
        initial_state(cfg, h)?,
        gamma,
        cfg.t_final()?,
        observables(cfg, h)?,
        times.iter().map(|t| t.0).collect(),
    )?;

    let mut files = Vec::new();
    for (i, ((t, rho), (_, expr))) in run.snapshots.iter().zip(&times).enumerate() {
        let meta = metadata(cfg, n, gamma, *t, expr.to_string());
        files.extend(write_grid(dir, &format!("snapshot_{i}_field"), &field_grid(cfg, rho, meta.clone())?, hash)?);
        files.extend(write_grid(dir, &format!("snapshot_{i}_spin"), &spin_grid(cfg, rho, meta)?, hash)?);
    }
    if !run.series.is_empty() {
        files.extend(write_series(
            dir,
            "observables",
            &run.times,
            &run.series,
            series_metadata(cfg, n, gamma),
            hash,
        )?);
    }
    Ok(files)
}

fn fig2(cfg: &ExperimentConfig, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
    let gamma = cfg.gamma();
    let mut files = Vec::new();
    for n in cfg.n_qubits_list() {
        let h = hilbert(cfg, n)?;
        let t = crate::dynamics::timescales(cfg.coupling(), cfg.nbar(), n)?.first_revival;
        let run = evolve(cfg, initial_state(cfg, h)?, gamma, t, Vec::new(), vec![t])?;
        let (time, rho) = &run.snapshots[0];
        let meta = metadata(cfg, n, gamma, *time, "t_r/N".into());
        files.extend(write_grid(dir, &format!("fig2_spin_N{n}"), &spin_grid(cfg, rho, meta)?, hash)?);
    }
    Ok(files)
}

fn fig3(cfg: &ExperimentConfig, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
    let params = SweepParams {
        n_qubits: cfg.n_qubits_list(),
        gammas: cfg.gammas(),
        nbar: cfg.nbar(),
        z: cfg.physics.z.unwrap_or([1.0, 0.0]),
        coupling: cfg.coupling(),
        fock_cutoff: cfg.numerics.fock_cutoff,
        dt: cfg.numerics.dt,
        phase_search: cfg.phase_search(),
    };
    let result = run_fig3_sweep(&params)?;
    write_sweep(dir, "fig3_sweep", &result, hash)
}

fn collapse_revival(cfg: &ExperimentConfig, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
    let n = cfg.n_qubits();
    let h = hilbert(cfg, n)?;
    let gamma = cfg.gamma();
    let run = evolve(cfg, initial_state(cfg, h)?, gamma, cfg.t_final()?, observables(cfg, h)?, Vec::new())?;
    write_series(dir, "collapse_revival", &run.times, &run.series, series_metadata(cfg, n, gamma), hash)
}

/// Number of frames for `[0, t_final]` sampled every `interval`.
pub fn frame_count(t_final: f64, interval: f64) -> usize {
    (t_final / interval + 1e-9).floor() as usize + 1
}

/// Writes `frame_<i>_field` / `frame_<i>_spin` grids at multiples of the
/// configured interval. On any failure the frames written so far are
/// removed before the error is returned.
pub fn export_frames(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let frames = cfg
        .output
        .frames
        .as_ref()
        .ok_or_else(|| Error::config("output.frames", "no frame settings"))?;
    let interval = cfg.resolve_time(&frames.interval)?;
    if !(interval > 0.0) {
        return Err(Error::config("output.frames.interval", "must be positive"));
    }
    let t_final = cfg.t_final()?;
    let count = frame_count(t_final, interval);
    let times: Vec<f64> = (0..count).map(|i| (i as f64 * interval).min(t_final)).collect();
    let hash = cfg.hash();
    let n = cfg.n_qubits();
    let h = hilbert(cfg, n)?;
    let gamma = cfg.gamma();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("cannot create {}", dir.display()), e))?;

    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<()> {
        let run = evolve(cfg, initial_state(cfg, h)?, gamma, t_final, Vec::new(), times)?;
        for (i, (t, rho)) in run.snapshots.iter().enumerate() {
            let meta = metadata(cfg, n, gamma, *t, format!("frame {i}"));
            if frames.field {
                written.extend(write_grid(dir, &format!("frame_{i:05}_field"), &field_grid(cfg, rho, meta.clone())?, &hash)?);
            }
            if frames.spin {
                written.extend(write_grid(dir, &format!("frame_{i:05}_spin"), &spin_grid(cfg, rho, meta)?, &hash)?);
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_counts() {
        assert_eq!(frame_count(0.01, 0.01), 2);
        assert_eq!(frame_count(1.0, 0.3), 4);
        assert_eq!(frame_count(0.0, 0.5), 1);
        assert_eq!(frame_count(2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI / 100.0), 101);
    }
}
