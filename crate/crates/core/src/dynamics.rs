//! Schrödinger and Lindblad time evolution with fixed-step fourth-order
//! Runge-Kutta, and the collapse/revival timescales of the model.
//!
//! The master equation is
//!
//! ```text
//! dρ/dt = −i[H, ρ] + L ρ L† − ½{L†L, ρ},   L = √Γ a
//! ```
//!
//! so photon number decays at rate `Γ` and coherent amplitudes at `Γ/2`.
//! The right-hand side is evaluated with sparse-times-dense kernels; every
//! operator involved has at most two nonzeros per row.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Factor, HilbertConfig, StateVector, TRACE_TOL};
use crate::operators::{
    annihilation, tavis_cummings_hamiltonian, BandedOperator, OperatorMatrix, ScaledBands, SparseOperator,
};

/// Allowed drift of `‖ψ‖` over a pure-state run.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timescales {
    /// `t_R = π / (g √n̄)`
    pub rabi: f64,
    /// `t_c = √2 / g`
    pub collapse: f64,
    /// `t_r = 2π √n̄ / g`
    pub revival: f64,
    /// `t_r / N`
    pub first_revival: f64,
}

pub fn timescales(g: f64, n_bar: f64, n_qubits: usize) -> Result<Timescales> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidConfig(format!("mean photon number must be positive, got {n_bar}")));
    }
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidConfig(format!("coupling must be positive, got {g}")));
    }
    if n_qubits == 0 {
        return Err(Error::InvalidConfig("qubit count must be at least 1".into()));
    }
    let pi = std::f64::consts::PI;
    let revival = 2.0 * pi * n_bar.sqrt() / g;
    Ok(Timescales {
        rabi: pi / (g * n_bar.sqrt()),
        collapse: 2f64.sqrt() / g,
        revival,
        first_revival: revival / n_qubits as f64,
    })
}

/// Default step `min(0.002/g, t_r1/20000)`.
pub fn default_step(ts: &Timescales, g: f64) -> f64 {
    (0.002 / g).min(ts.first_revival / 20000.0)
}

#[derive(Clone, Debug)]
pub enum InitialState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl InitialState {
    pub fn config(&self) -> HilbertConfig {
        match self {
            InitialState::Pure(s) => s.config,
            InitialState::Mixed(r) => r.config,
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            InitialState::Pure(s) => s.projector(),
            InitialState::Mixed(r) => r.clone(),
        }
    }
}

/// A named composite-space operator whose expectation value is recorded.
#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub operator: OperatorMatrix,
}

impl Observable {
    pub fn new(name: impl Into<String>, operator: OperatorMatrix) -> Self {
        Self {
            name: name.into(),
            operator: operator.embed(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionSpec {
    pub initial: InitialState,
    pub t_final: f64,
    pub dt: f64,
    /// Field decay rate `Γ` in units of `g`.
    pub gamma: f64,
    pub observables: Vec<Observable>,
    pub snapshot_times: Vec<f64>,
    /// Observables are sampled every `record_every` steps (and at the end).
    pub record_every: usize,
}

impl EvolutionSpec {
    pub fn new(initial: InitialState, t_final: f64, dt: f64, gamma: f64) -> Self {
        Self {
            initial,
            t_final,
            dt,
            gamma,
            observables: Vec::new(),
            snapshot_times: Vec::new(),
            record_every: 1,
        }
    }

    pub fn with_observables(mut self, observables: Vec<Observable>) -> Self {
        self.observables = observables;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn record_every(mut self, stride: usize) -> Self {
        self.record_every = stride.max(1);
        self
    }

    fn validate(&self) -> Result<StepGrid> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        for w in self.snapshot_times.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidConfig("snapshot times must be sorted".into()));
            }
        }
        if let Some(&t) = self
            .snapshot_times
            .iter()
            .find(|&&t| t < 0.0 || t > self.t_final * (1.0 + 1e-12) + 1e-12)
        {
            return Err(Error::InvalidConfig(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_final
            )));
        }
        let cfg = self.initial.config();
        for obs in &self.observables {
            if obs.operator.dim() != cfg.dim() {
                return Err(Error::DimensionMismatch {
                    expected: cfg.dim(),
                    found: obs.operator.dim(),
                });
            }
        }
        Ok(StepGrid::new(self.t_final, self.dt))
    }
}

/// Uniform step grid that lands exactly on `t_final`.
#[derive(Clone, Copy, Debug)]
struct StepGrid {
    steps: usize,
    h: f64,
}

impl StepGrid {
    fn new(t_final: f64, dt: f64) -> Self {
        if t_final == 0.0 {
            return Self { steps: 0, h: dt };
        }
        let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
        Self {
            steps,
            h: t_final / steps as f64,
        }
    }

    fn nearest_step(&self, t: f64) -> usize {
        ((t / self.h).round() as usize).min(self.steps)
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot<S> {
    pub requested_time: f64,
    pub time: f64,
    pub state: S,
}

#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub name: String,
    pub values: Vec<C64>,
}

impl ObservableSeries {
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub step: f64,
    pub steps: usize,
    /// Times at which observables were sampled.
    pub times: Vec<f64>,
    pub series: Vec<ObservableSeries>,
    pub snapshots: Vec<Snapshot<S>>,
    pub final_state: S,
    /// Largest deviation of the norm (pure) or trace (mixed) from 1.
    pub max_drift: f64,
}

impl<S> Trajectory<S> {
    pub fn series(&self, name: &str) -> Option<&ObservableSeries> {
        self.series.iter().find(|s| s.name == name)
    }
}

struct Recorder {
    ops: Vec<(String, SparseOperator)>,
    every: usize,
    times: Vec<f64>,
    values: Vec<Vec<C64>>,
}

impl Recorder {
    fn new(observables: &[Observable], every: usize) -> Self {
        Self {
            ops: observables
                .iter()
                .map(|o| (o.name.clone(), o.operator.to_sparse()))
                .collect(),
            every: every.max(1),
            times: Vec::new(),
            values: vec![Vec::new(); observables.len()],
        }
    }

    fn due(&self, step: usize, last: usize) -> bool {
        !self.ops.is_empty() && (step % self.every == 0 || step == last)
    }

    fn record_pure(&mut self, t: f64, psi: &DVector<C64>) {
        self.times.push(t);
        for ((_, op), vals) in self.ops.iter().zip(self.values.iter_mut()) {
            let mut acc = ZERO;
            for i in 0..op.dim() {
                let mut row = ZERO;
                for (j, v) in op.row(i) {
                    row += v * psi[j];
                }
                acc += psi[i].conj() * row;
            }
            vals.push(acc);
        }
    }

    fn record_mixed(&mut self, t: f64, rho: &DMatrix<C64>) {
        self.times.push(t);
        for ((_, op), vals) in self.ops.iter().zip(self.values.iter_mut()) {
            // Tr(Oρ) = Σ_i Σ_j O_ij ρ_ji
            let mut acc = ZERO;
            for i in 0..op.dim() {
                for (j, v) in op.row(i) {
                    acc += v * rho[(j, i)];
                }
            }
            vals.push(acc);
        }
    }

    fn finish(self) -> (Vec<f64>, Vec<ObservableSeries>) {
        let series = self
            .ops
            .into_iter()
            .zip(self.values)
            .map(|((name, _), values)| ObservableSeries { name, values })
            .collect();
        (self.times, series)
    }
}

/// Pure-state evolution under the Tavis-Cummings Hamiltonian.
pub fn evolve_schrodinger(spec: &EvolutionSpec) -> Result<Trajectory<StateVector>> {
    let grid = spec.validate()?;
    if spec.gamma != 0.0 {
        return Err(Error::InvalidConfig(
            "Schrodinger evolution requires gamma = 0".into(),
        ));
    }
    let initial = match &spec.initial {
        InitialState::Pure(s) => s.clone(),
        InitialState::Mixed(_) => {
            return Err(Error::InvalidConfig(
                "Schrodinger evolution requires a pure initial state".into(),
            ))
        }
    };
    if initial.factor != Factor::Composite {
        return Err(Error::InvalidConfig("initial state must live on the composite space".into()));
    }
    let cfg = initial.config;
    let h = tavis_cummings_hamiltonian(cfg).to_sparse();
    let dim = cfg.dim();
    let norm0 = initial.norm();

    let mut psi = initial.amplitudes.clone();
    let mut k = [
        DVector::<C64>::zeros(dim),
        DVector::<C64>::zeros(dim),
        DVector::<C64>::zeros(dim),
        DVector::<C64>::zeros(dim),
    ];
    let mut tmp = DVector::<C64>::zeros(dim);
    let mut recorder = Recorder::new(&spec.observables, spec.record_every);
    let snap_steps: Vec<usize> = spec.snapshot_times.iter().map(|&t| grid.nearest_step(t)).collect();
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut max_drift = 0.0f64;
    let hs = grid.h;

    // dψ/dt = −i H ψ
    let rhs = |x: &DVector<C64>, out: &mut DVector<C64>| {
        h.mul_vec_into(x, out);
        for z in out.iter_mut() {
            *z *= -I;
        }
    };

    for step in 0..=grid.steps {
        let t = step as f64 * hs;
        if recorder.due(step, grid.steps) {
            recorder.record_pure(t, &psi);
        }
        for (i, &s) in snap_steps.iter().enumerate() {
            if s == step {
                snapshots.push(Snapshot {
                    requested_time: spec.snapshot_times[i],
                    time: t,
                    state: StateVector {
                        config: cfg,
                        factor: Factor::Composite,
                        amplitudes: psi.clone(),
                    },
                });
            }
        }
        if step == grid.steps {
            break;
        }
        let [k1, k2, k3, k4] = &mut k;
        rhs(&psi, k1);
        tmp.copy_from(&psi);
        tmp.axpy(C64::new(hs / 2.0, 0.0), k1, C64::new(1.0, 0.0));
        rhs(&tmp, k2);
        tmp.copy_from(&psi);
        tmp.axpy(C64::new(hs / 2.0, 0.0), k2, C64::new(1.0, 0.0));
        rhs(&tmp, k3);
        tmp.copy_from(&psi);
        tmp.axpy(C64::new(hs, 0.0), k3, C64::new(1.0, 0.0));
        rhs(&tmp, k4);
        let w = C64::new(hs / 6.0, 0.0);
        psi.axpy(w, k1, C64::new(1.0, 0.0));
        psi.axpy(w * 2.0, k2, C64::new(1.0, 0.0));
        psi.axpy(w * 2.0, k3, C64::new(1.0, 0.0));
        psi.axpy(w, k4, C64::new(1.0, 0.0));

        let drift = (psi.norm() - norm0).abs();
        max_drift = max_drift.max(drift);
        if drift > NORM_DRIFT_TOL {
            return Err(Error::StepSizeTooLarge {
                quantity: "norm",
                drift,
                time: (step + 1) as f64 * hs,
            });
        }
    }

    let (times, series) = recorder.finish();
    Ok(Trajectory {
        step: hs,
        steps: grid.steps,
        times,
        series,
        snapshots,
        final_state: StateVector {
            config: cfg,
            factor: Factor::Composite,
            amplitudes: psi,
        },
        max_drift,
    })
}

/// Right-hand side of the master equation with a single field-loss channel.
pub struct MasterEquation {
    hamiltonian: BandedOperator,
    jump: BandedOperator,
    jump_number: BandedOperator,
    gamma: f64,
    h_left: ScaledBands,
    jump_left: ScaledBands,
    number_left: ScaledBands,
}

impl MasterEquation {
    pub fn new(cfg: HilbertConfig, gamma: f64) -> Self {
        let a = annihilation(cfg).embed().entries;
        let jump = a.map(|x| x * gamma.sqrt());
        let jump_number = jump.adjoint() * &jump;
        let hamiltonian = BandedOperator::from_dense(&tavis_cummings_hamiltonian(cfg).entries);
        let jump = BandedOperator::from_dense(&jump);
        let jump_number = BandedOperator::from_dense(&jump_number);
        Self {
            h_left: hamiltonian.scaled(-I),
            jump_left: jump.scaled(ONE),
            number_left: jump_number.scaled(C64::new(-0.5, 0.0)),
            hamiltonian,
            jump,
            jump_number,
            gamma,
        }
    }

    /// Writes `dρ/dt` into `out`. `rho` must be Hermitian.
    ///
    /// Works one output column at a time so each column is written once;
    /// H and L†L are Hermitian, so `ρH = ρH†` and `ρM = ρM†`.
    pub fn apply_into(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = rho.nrows();
        let xs = rho.as_slice();
        for (c, dst) in out.as_mut_slice().chunks_exact_mut(n).enumerate() {
            dst.fill(ZERO);
            let src = &xs[c * n..(c + 1) * n];
            self.h_left.add_column(ONE, src, dst);
            self.hamiltonian.add_right_column(I, c, xs, dst);
            if self.gamma == 0.0 {
                continue;
            }
            // (L ρ L†)[:, c] = Σ_j conj(L[c, j]) L ρ[:, j]
            for (j, v) in self.jump.row(c) {
                self.jump_left.add_column(v.conj(), &xs[j * n..(j + 1) * n], dst);
            }
            self.number_left.add_column(ONE, src, dst);
            self.jump_number.add_right_column(C64::new(-0.5, 0.0), c, xs, dst);
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        self.apply_into(rho, &mut out);
        out
    }
}

/// `out = x + a y` over the raw column-major storage.
fn shifted_into(out: &mut DMatrix<C64>, x: &DMatrix<C64>, a: f64, y: &DMatrix<C64>) {
    for ((o, xi), yi) in out.as_mut_slice().iter_mut().zip(x.as_slice()).zip(y.as_slice()) {
        *o = xi + yi * a;
    }
}

pub fn evolve_lindblad(spec: &EvolutionSpec) -> Result<Trajectory<DensityMatrix>> {
    let grid = spec.validate()?;
    let rho0 = spec.initial.to_density();
    if rho0.factor != Factor::Composite {
        return Err(Error::InvalidConfig("initial state must live on the composite space".into()));
    }
    rho0.validate(0.0)?;
    let cfg = rho0.config;
    let dim = cfg.dim();
    let master = MasterEquation::new(cfg, spec.gamma);

    let mut rho = rho0.entries.clone();
    let trace0 = rho.trace();
    let mut k: Vec<DMatrix<C64>> = (0..4).map(|_| DMatrix::zeros(dim, dim)).collect();
    let mut tmp = DMatrix::<C64>::zeros(dim, dim);
    let mut recorder = Recorder::new(&spec.observables, spec.record_every);
    let snap_steps: Vec<usize> = spec.snapshot_times.iter().map(|&t| grid.nearest_step(t)).collect();
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut max_drift = 0.0f64;
    let hs = grid.h;

    for step in 0..=grid.steps {
        let t = step as f64 * hs;
        if recorder.due(step, grid.steps) {
            recorder.record_mixed(t, &rho);
        }
        for (i, &s) in snap_steps.iter().enumerate() {
            if s == step {
                let state = DensityMatrix {
                    config: cfg,
                    factor: Factor::Composite,
                    entries: rho.clone(),
                };
                state.validate(t)?;
                snapshots.push(Snapshot {
                    requested_time: spec.snapshot_times[i],
                    time: t,
                    state,
                });
            }
        }
        if step == grid.steps {
            break;
        }
        master.apply_into(&rho, &mut k[0]);
        shifted_into(&mut tmp, &rho, hs / 2.0, &k[0]);
        master.apply_into(&tmp, &mut k[1]);
        shifted_into(&mut tmp, &rho, hs / 2.0, &k[1]);
        master.apply_into(&tmp, &mut k[2]);
        shifted_into(&mut tmp, &rho, hs, &k[2]);
        master.apply_into(&tmp, &mut k[3]);
        let w = hs / 6.0;
        let ks = [k[0].as_slice(), k[1].as_slice(), k[2].as_slice(), k[3].as_slice()];
        for (i, r) in rho.as_mut_slice().iter_mut().enumerate() {
            *r += (ks[0][i] + (ks[1][i] + ks[2][i]) * 2.0 + ks[3][i]) * w;
        }

        let drift = (rho.trace() - trace0).norm();
        max_drift = max_drift.max(drift);
        if drift > TRACE_TOL {
            return Err(Error::StepSizeTooLarge {
                quantity: "trace",
                drift,
                time: (step + 1) as f64 * hs,
            });
        }
    }

    let final_state = DensityMatrix {
        config: cfg,
        factor: Factor::Composite,
        entries: rho,
    };
    let (times, series) = recorder.finish();
    Ok(Trajectory {
        step: hs,
        steps: grid.steps,
        times,
        series,
        snapshots,
        final_state,
        max_drift,
    })
}
