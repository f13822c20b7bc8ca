//! Scalar diagnostics and the fidelity sweep over qubit number and decay rate.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{default_step, evolve_lindblad, timescales, EvolutionSpec, InitialState, Observable};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HilbertConfig, StateVector};
use crate::operators::{excitation_number, number_operator};
use crate::states::{coherent_state, product_state, spin_cat};
use crate::tomography::{reduce_field, reduce_spins};

/// Overlap `⟨ψ|ρ|ψ⟩` clamped to `[0, 1]`; `raw` keeps the unclamped value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub value: f64,
    pub raw: f64,
    pub imag: f64,
}

impl Fidelity {
    /// Amount removed by clamping.
    pub fn residue(&self) -> f64 {
        (self.raw - self.value).abs()
    }
}

fn check_dims(rho: &DensityMatrix, target: &StateVector) -> Result<()> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    Ok(())
}

pub fn fidelity_pure_target(rho: &DensityMatrix, target: &StateVector) -> Result<Fidelity> {
    check_dims(rho, target)?;
    let psi = &target.amplitudes;
    let z = psi.dotc(&(&rho.entries * psi));
    let value = z.re.clamp(0.0, 1.0);
    if (value - z.re).abs() > 1e-9 {
        log::warn!("fidelity {:.12} clamped to [0, 1]", z.re);
    }
    Ok(Fidelity {
        value,
        raw: z.re,
        imag: z.im,
    })
}

/// `Tr(ρ |ψ⟩⟨ψ|)`, unclamped.
pub fn fidelity_trace_form(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    check_dims(rho, target)?;
    let proj = target.projector();
    Ok((&rho.entries * &proj.entries).trace().re)
}

/// Closed-form cat fidelity `(1 + exp[−2|α|²(1 − e^{−Γt})²]) / 2`.
pub fn analytic_damped_cat_fidelity(alpha: f64, gamma: f64, t: f64) -> Result<f64> {
    let gt = gamma * t;
    if !(gt >= 0.0) {
        return Err(Error::InvalidConfig(format!("gamma * t must be non-negative, got {gt}")));
    }
    let decay = 1.0 - (-gt).exp();
    Ok((1.0 + (-2.0 * alpha * alpha * decay * decay).exp()) / 2.0)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// `1 − Tr(ρ²)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Best fidelity with `Θ(e^{iχ} z, N)` over `samples` angles in `[0, π)`.
pub fn phase_searched_spin_cat_fidelity(
    rho_q: &DensityMatrix,
    z: C64,
    samples: usize,
) -> Result<(f64, f64)> {
    let cfg = rho_q.config;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..samples.max(1) {
        let chi = PI * i as f64 / samples.max(1) as f64;
        let target = spin_cat(cfg, z * C64::from_polar(1.0, chi))?;
        let f = fidelity_pure_target(rho_q, &target)?.value;
        if f > best.0 {
            best = (f, chi);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub n_qubits: Vec<usize>,
    pub gammas: Vec<f64>,
    pub nbar: f64,
    /// Spin-cat parameter `z` as `[re, im]`.
    pub z: [f64; 2],
    pub coupling: f64,
    pub fock_cutoff: Option<usize>,
    pub dt: Option<f64>,
    /// Number of azimuths in the orientation search; 0 disables it.
    pub phase_search: usize,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            n_qubits: (2..=6).collect(),
            gammas: vec![1e-4, 1e-3, 1e-2, 1e-1],
            nbar: 25.0,
            z: [1.0, 0.0],
            coupling: 1.0,
            fock_cutoff: None,
            dt: None,
            phase_search: 360,
        }
    }
}

impl SweepParams {
    pub fn z(&self) -> C64 {
        C64::new(self.z[0], self.z[1])
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("sweep params serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_qubits: usize,
    pub gamma: f64,
    pub time: f64,
    pub fidelity: f64,
    pub fidelity_residue: f64,
    pub spin_purity: f64,
    pub mean_photon_number: f64,
    pub best_phase_fidelity: Option<f64>,
    pub best_phase: Option<f64>,
    pub step: f64,
    pub fock_cutoff: usize,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    /// Whether `⟨N_ex⟩` never increased along the trajectory.
    pub excitation_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub dt: Option<f64>,
    pub fock_cutoff: usize,
    pub nbar: f64,
    pub z: [f64; 2],
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn get(&self, n_qubits: usize, gamma: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.n_qubits == n_qubits && r.gamma == gamma)
    }
}

/// Slack allowed when checking that `⟨N_ex⟩` does not increase.
const MONOTONE_SLACK: f64 = 1e-10;

/// Evolves `|α = √n̄⟩ ⊗ |Θ(z, N)⟩` to `t_r/N` under field loss `Γ` and scores
/// the reduced spin state against `|Θ(z, N)⟩`.
pub fn run_sweep_point(params: &SweepParams, n_qubits: usize, gamma: f64) -> Result<SweepRow> {
    let g = params.coupling;
    let cutoff = params
        .fock_cutoff
        .unwrap_or_else(|| HilbertConfig::default_fock_cutoff(params.nbar));
    let cfg = HilbertConfig::new(n_qubits, cutoff, g)?;
    let ts = timescales(g, params.nbar, n_qubits)?;
    let dt = params.dt.unwrap_or_else(|| default_step(&ts, g));
    let z = params.z();

    let target = spin_cat(cfg, z)?;
    let field = coherent_state(cfg, C64::new(params.nbar.sqrt(), 0.0))?;
    let psi0 = product_state(&target, &field)?;
    let t = ts.first_revival;

    let spec = EvolutionSpec::new(InitialState::Pure(psi0), t, dt, gamma)
        .with_observables(vec![Observable::new("excitations", excitation_number(cfg))])
        .with_snapshots(vec![t])
        .record_every(10);
    let traj = evolve_lindblad(&spec)?;
    let rho = &traj.final_state;
    let diag = rho.validate(t)?;

    let nex = traj.series("excitations").map(|s| s.real()).unwrap_or_default();
    let excitation_monotone = nex.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);

    let rho_q = reduce_spins(rho)?;
    let rho_f = reduce_field(rho)?;
    let fid = fidelity_pure_target(&rho_q, &target)?;
    let mean_photon_number = rho_f.expectation(&number_operator(cfg).entries).re;
    let (best_phase_fidelity, best_phase) = if params.phase_search > 0 {
        let (f, chi) = phase_searched_spin_cat_fidelity(&rho_q, z, params.phase_search)?;
        (Some(f), Some(chi))
    } else {
        (None, None)
    };
    log::info!(
        "N = {n_qubits}, gamma = {gamma:e}: F = {:.6} at t = {:.6}",
        fid.value,
        traj.step * traj.steps as f64
    );

    Ok(SweepRow {
        n_qubits,
        gamma,
        time: traj.step * traj.steps as f64,
        fidelity: fid.value,
        fidelity_residue: fid.residue(),
        spin_purity: rho_q.purity(),
        mean_photon_number,
        best_phase_fidelity,
        best_phase,
        step: traj.step,
        fock_cutoff: cutoff,
        min_eigenvalue: diag.min_eigenvalue,
        trace_error: (diag.trace - C64::new(1.0, 0.0)).norm(),
        hermiticity_error: diag.hermiticity_error,
        excitation_monotone,
    })
}

/// Runs every `(N, Γ)` pair on the current rayon pool; rows are sorted by
/// `(N, Γ)` regardless of completion order.
pub fn run_fig3_sweep(params: &SweepParams) -> Result<SweepResult> {
    if params.n_qubits.is_empty() || params.gammas.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one N and one gamma".into()));
    }
    let jobs: Vec<(usize, f64)> = params
        .n_qubits
        .iter()
        .flat_map(|&n| params.gammas.iter().map(move |&g| (n, g)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, g)| run_sweep_point(params, n, g))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.n_qubits
            .cmp(&b.n_qubits)
            .then(a.gamma.total_cmp(&b.gamma))
    });
    let fock_cutoff = params
        .fock_cutoff
        .unwrap_or_else(|| HilbertConfig::default_fock_cutoff(params.nbar));
    Ok(SweepResult {
        rows,
        provenance: Provenance {
            config_hash: params.hash(),
            dt: params.dt,
            fock_cutoff,
            nbar: params.nbar,
            z: params.z,
            coupling: params.coupling,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Factor;
    use crate::states::spin_coherent_state;

    #[test]
    fn self_fidelity_is_one() {
        let cfg = HilbertConfig::new(5, 1, 1.0).unwrap();
        let theta = spin_cat(cfg, C64::new(1.0, 0.0)).unwrap();
        let f = fidelity_pure_target(&theta.projector(), &theta).unwrap();
        assert!((f.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_state_fidelity() {
        let cfg = HilbertConfig::new(4, 1, 1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(cfg, Factor::Spin);
        let target = spin_coherent_state(cfg, C64::new(0.2, -0.7));
        let f = fidelity_pure_target(&rho, &target).unwrap();
        assert!((f.value - 0.2).abs() < 1e-14);
        let tr = fidelity_trace_form(&rho, &target).unwrap();
        assert!((tr - f.raw).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let cfg = HilbertConfig::new(4, 1, 1.0).unwrap();
        let other = HilbertConfig::new(3, 1, 1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(cfg, Factor::Spin);
        let target = spin_coherent_state(other, C64::new(1.0, 0.0));
        assert!(matches!(
            fidelity_pure_target(&rho, &target),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn analytic_cat_limits() {
        assert_eq!(analytic_damped_cat_fidelity(5.0, 0.01, 0.0).unwrap(), 1.0);
        let late = analytic_damped_cat_fidelity(5.0, 1.0, 1e3).unwrap();
        assert!((late - (1.0 + (-50f64).exp()) / 2.0).abs() < 1e-15);
        assert!(analytic_damped_cat_fidelity(5.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn entropy_bounds() {
        let cfg = HilbertConfig::new(5, 1, 1.0).unwrap();
        let pure = spin_coherent_state(cfg, C64::new(0.5, 0.5)).projector();
        assert!(linear_entropy(&pure).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(cfg, Factor::Spin);
        assert!((linear_entropy(&mixed) - (1.0 - 1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn params_hash_is_stable() {
        let p = SweepParams::default();
        assert_eq!(p.hash(), p.clone().hash());
        let mut q = p.clone();
        q.nbar = 9.0;
        assert_ne!(p.hash(), q.hash());
    }
}
