//! Initial-state constructors: Fock, coherent, spin coherent, Dicke and the
//! two cat-state families.
//!
//! Spin factors are expressed in the Dicke basis `|D_k⟩`, `k` being the number
//! of spins in `|g⟩`. The spin coherent state is the symmetric product
//! `⊗(|e⟩ + z|g⟩)/√(1+|z|²)`, whose Dicke amplitudes are
//! `√C(N,k) z^k / (1+|z|²)^{N/2}`.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{Factor, HilbertConfig, StateVector};

/// Largest probability mass a coherent state may lose beyond the cutoff.
///
/// `n̄ = 25` at the default cutoff 60 leaves 8.6e-10 of Poisson mass beyond
/// the last level.
pub const COHERENT_TAIL_TOL: f64 = 1e-9;

/// Binomial coefficient as f64; exact for the qubit counts used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub fn fock_state(cfg: HilbertConfig, n: usize) -> Result<StateVector> {
    StateVector::basis(cfg, Factor::Field, n)
}

/// Unnormalized truncated coefficients `e^{-|α|²/2} αⁿ/√n!` for `n ≤ n_max`.
fn coherent_coefficients(cfg: &HilbertConfig, alpha: C64) -> Result<DVector<C64>> {
    let nbar = alpha.norm_sqr();
    let n_max = cfg.fock_cutoff as f64;
    if nbar + 6.0 * nbar.sqrt() > n_max {
        return Err(Error::Truncation(format!(
            "|alpha|^2 = {nbar:.4} needs a cutoff of at least {:.0}, have {}",
            (nbar + 6.0 * nbar.sqrt()).ceil(),
            cfg.fock_cutoff
        )));
    }
    let dim = cfg.field_dim();
    let mut coeffs = DVector::<C64>::zeros(dim);
    let mut c = C64::new((-nbar / 2.0).exp(), 0.0);
    coeffs[0] = c;
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        coeffs[n] = c;
    }
    let tail = 1.0 - coeffs.norm_squared();
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Truncation(format!(
            "coherent state with |alpha|^2 = {nbar:.4} loses {tail:.3e} of its norm beyond n = {}",
            cfg.fock_cutoff
        )));
    }
    Ok(coeffs)
}

/// Field coherent state `|α⟩`, renormalized over the truncated basis.
pub fn coherent_state(cfg: HilbertConfig, alpha: C64) -> Result<StateVector> {
    let coeffs = coherent_coefficients(&cfg, alpha)?;
    StateVector::normalized(cfg, Factor::Field, coeffs)
}

/// Spin coherent state `|z,N⟩` in the Dicke basis.
pub fn spin_coherent_state(cfg: HilbertConfig, z: C64) -> StateVector {
    let n = cfg.n_qubits;
    let norm = (1.0 + z.norm_sqr()).powf(-(n as f64) / 2.0);
    let mut amps = DVector::<C64>::zeros(n + 1);
    let mut zk = C64::new(1.0, 0.0);
    for k in 0..=n {
        amps[k] = zk * binomial(n, k).sqrt() * norm;
        zk *= z;
    }
    // Already unit norm analytically; renormalize away rounding.
    let norm = amps.norm();
    amps.unscale_mut(norm);
    StateVector {
        config: cfg,
        factor: Factor::Spin,
        amplitudes: amps,
    }
}

/// Field cat `(|α⟩ ± |−α⟩)`, normalized exactly over the truncated basis.
pub fn field_cat(cfg: HilbertConfig, alpha: C64, sign: i8) -> Result<StateVector> {
    let s = match sign {
        1 => 1.0,
        -1 => -1.0,
        other => {
            return Err(Error::InvalidConfig(format!(
                "cat sign must be +1 or -1, got {other}"
            )))
        }
    };
    if alpha.norm() == 0.0 && s < 0.0 {
        return Err(Error::DegenerateCat(
            "odd cat with alpha = 0 is the null vector".into(),
        ));
    }
    let coeffs = coherent_coefficients(&cfg, alpha)?;
    // ⟨n|−α⟩ = (−1)ⁿ⟨n|α⟩
    let amps = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().enumerate().map(|(n, c)| {
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            c * (1.0 + s * parity)
        }),
    );
    StateVector::normalized(cfg, Factor::Field, amps)
}

/// Spin cat `(|z,N⟩ + |−z,N⟩)`, normalized. Fails for `z = 0`, where both
/// branches are the same state.
pub fn spin_cat(cfg: HilbertConfig, z: C64) -> Result<StateVector> {
    if z.norm() == 0.0 {
        return Err(Error::DegenerateCat(
            "spin cat with z = 0 collapses onto the fully excited state".into(),
        ));
    }
    let plus = spin_coherent_state(cfg, z);
    let minus = spin_coherent_state(cfg, -z);
    StateVector::normalized(cfg, Factor::Spin, plus.amplitudes + minus.amplitudes)
}

/// Dicke state with `k` spins de-excited (`S_z = N/2 − k`).
pub fn dicke_state(cfg: HilbertConfig, k: usize) -> Result<StateVector> {
    StateVector::basis(cfg, Factor::Spin, k)
}

/// Spin ⊗ field tensor product.
pub fn product_state(spin: &StateVector, field: &StateVector) -> Result<StateVector> {
    if spin.factor != Factor::Spin {
        return Err(Error::InvalidConfig("first factor must be a spin state".into()));
    }
    if field.factor != Factor::Field {
        return Err(Error::InvalidConfig("second factor must be a field state".into()));
    }
    if spin.config != field.config {
        return Err(Error::DimensionMismatch {
            expected: spin.config.dim(),
            found: field.config.dim(),
        });
    }
    let cfg = spin.config;
    if spin.dim() != cfg.spin_dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.spin_dim(),
            found: spin.dim(),
        });
    }
    if field.dim() != cfg.field_dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.field_dim(),
            found: field.dim(),
        });
    }
    let amps = spin.amplitudes.kronecker(&field.amplitudes);
    StateVector::new(cfg, Factor::Composite, amps)
}
