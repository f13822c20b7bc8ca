//! Dimensions and state containers for the Dicke-sector ⊗ Fock product space.
//!
//! Composite amplitudes are stored with the spin (Dicke) index outermost:
//! flat index `k * (n_max + 1) + n`, where `k` counts de-excited spins
//! (`k = 0` is the all-excited state with `S_z = +S`) and `n` is the photon
//! number.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which factor of the product space a vector or matrix lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Spin,
    Field,
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertConfig {
    pub n_qubits: usize,
    pub fock_cutoff: usize,
    /// Atom-field coupling `g` in angular-frequency units; `hbar = 1`.
    pub coupling: f64,
}

impl HilbertConfig {
    pub fn new(n_qubits: usize, fock_cutoff: usize, coupling: f64) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::InvalidConfig("qubit count must be at least 1".into()));
        }
        if fock_cutoff < 1 {
            return Err(Error::InvalidConfig("Fock cutoff must be at least 1".into()));
        }
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "coupling must be finite and non-negative, got {coupling}"
            )));
        }
        Ok(Self {
            n_qubits,
            fock_cutoff,
            coupling,
        })
    }

    /// Cutoff covering a coherent state of mean photon number `nbar` to six
    /// standard deviations plus a five-photon margin (60 for `nbar = 25`).
    pub fn default_fock_cutoff(nbar: f64) -> usize {
        let nbar = nbar.max(0.0);
        (nbar + 6.0 * nbar.sqrt()).ceil() as usize + 5
    }

    pub fn total_spin(&self) -> f64 {
        self.n_qubits as f64 / 2.0
    }

    pub fn spin_dim(&self) -> usize {
        self.n_qubits + 1
    }

    pub fn field_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.field_dim()
    }

    pub fn factor_dim(&self, factor: Factor) -> usize {
        match factor {
            Factor::Spin => self.spin_dim(),
            Factor::Field => self.field_dim(),
            Factor::Composite => self.dim(),
        }
    }

    #[inline]
    pub fn index(&self, k: usize, n: usize) -> usize {
        k * self.field_dim() + n
    }

    /// Inverse of [`HilbertConfig::index`]: `(dicke_k, photon_n)`.
    #[inline]
    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.field_dim(), flat % self.field_dim())
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }
}

/// Pure state on one factor or on the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub config: HilbertConfig,
    pub factor: Factor,
    pub amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(config: HilbertConfig, factor: Factor, amplitudes: DVector<C64>) -> Result<Self> {
        let expected = config.factor_dim(factor);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            config,
            factor,
            amplitudes,
        })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(config: HilbertConfig, factor: Factor, amplitudes: DVector<C64>) -> Result<Self> {
        let mut state = Self::new(config, factor, amplitudes)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidConfig("cannot normalize a null vector".into()));
        }
        state.amplitudes.unscale_mut(norm);
        Ok(state)
    }

    pub fn basis(config: HilbertConfig, factor: Factor, index: usize) -> Result<Self> {
        let dim = config.factor_dim(factor);
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index: index as i64,
                max: dim as i64 - 1,
            });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self {
            config,
            factor,
            amplitudes,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            config: self.config,
            factor: self.factor,
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Mixed state; also used for the reduced field and spin operators.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub config: HilbertConfig,
    pub factor: Factor,
    pub entries: DMatrix<C64>,
}

/// Numerical health of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub trace: C64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

impl DensityMatrix {
    pub fn new(config: HilbertConfig, factor: Factor, entries: DMatrix<C64>) -> Result<Self> {
        let expected = config.factor_dim(factor);
        if entries.nrows() != expected || entries.ncols() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: entries.nrows(),
            });
        }
        Ok(Self {
            config,
            factor,
            entries,
        })
    }

    pub fn maximally_mixed(config: HilbertConfig, factor: Factor) -> Self {
        let dim = config.factor_dim(factor);
        Self {
            config,
            factor,
            entries: DMatrix::identity(dim, dim).map(|x: C64| x / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `max |ρ - ρ†|` elementwise.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let hermitian = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let mut values: Vec<f64> = hermitian.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
        let mut acc = C64::new(0.0, 0.0);
        let dim = self.dim();
        for j in 0..dim {
            for i in 0..dim {
                acc += self.entries[(i, j)] * self.entries[(j, i)];
            }
        }
        acc.re
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            trace: self.trace(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// Checks trace, hermiticity and positivity against the standard tolerances.
    pub fn validate(&self, time: f64) -> Result<Diagnostics> {
        let diag = self.diagnostics();
        if (diag.trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::StepSizeTooLarge {
                quantity: "trace",
                drift: (diag.trace - C64::new(1.0, 0.0)).norm(),
                time,
            });
        }
        if diag.hermiticity_error > HERMITICITY_TOL {
            return Err(Error::StepSizeTooLarge {
                quantity: "hermiticity",
                drift: diag.hermiticity_error,
                time,
            });
        }
        if diag.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::PositivityViolation {
                eigenvalue: diag.min_eigenvalue,
                time,
            });
        }
        Ok(diag)
    }

    /// `Tr(A ρ)` for an operator on the same space.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        // Tr(Aρ) = Σ_ij A_ij ρ_ji
        let dim = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..dim {
            for i in 0..dim {
                acc += op[(i, j)] * self.entries[(j, i)];
            }
        }
        acc
    }
}

pub(crate) fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_dimension_and_indexing() {
        let cfg = HilbertConfig::new(5, 60, 1.0).unwrap();
        assert_eq!(cfg.dim(), 6 * 61);
        assert_eq!(cfg.index(2, 7), 2 * 61 + 7);
        assert_eq!(cfg.split(cfg.index(4, 13)), (4, 13));
        let big = HilbertConfig::new(6, 60, 1.0).unwrap();
        assert_eq!(big.dim(), 427);
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(HilbertConfig::new(0, 10, 1.0).is_err());
        assert!(HilbertConfig::new(1, 0, 1.0).is_err());
        assert!(HilbertConfig::new(1, 4, f64::NAN).is_err());
    }

    #[test]
    fn default_cutoff_for_twenty_five_photons() {
        assert_eq!(HilbertConfig::default_fock_cutoff(25.0), 60);
    }

    #[test]
    fn maximally_mixed_diagnostics() {
        let cfg = HilbertConfig::new(3, 4, 1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(cfg, Factor::Spin);
        let d = rho.validate(0.0).unwrap();
        assert!((d.trace.re - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 0.25).abs() < 1e-14);
        assert!((d.min_eigenvalue - 0.25).abs() < 1e-12);
    }
}
