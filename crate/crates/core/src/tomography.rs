//! Reduced states and Wigner-function grids.
//!
//! Field quadratures are dimensionless, `q = (a + a†)/√2`, `p = (a − a†)/(i√2)`,
//! so `W(q, p)` integrates to one over `dq dp` and the vacuum peaks at `1/π`.
//! The field Wigner function is evaluated through the displaced parity,
//! `W(q, p) = (1/π) Tr[ρ D(2β) Π]` with `β = (q + ip)/√2`, using exact
//! displacement matrix elements so the truncated basis introduces no error.
//!
//! The spin Wigner function is `W_s(θ, φ) = Σ_{l,m} ρ_lm Y_l^m(θ, φ)` with
//! `ρ_lm = Tr(ρ_Q T_l^m†)`; `θ` is the colatitude measured from the fully
//! excited pole.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Factor};
use crate::operators::multipole_operator;

/// Largest tolerated imaginary part of a Wigner value.
pub const REALITY_TOL: f64 = 1e-8;
/// Largest tolerated |W| mass on the outer ring of a field grid, or population
/// of the last Fock level.
pub const BOUNDARY_MASS_TOL: f64 = 1e-6;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn check_factor(rho: &DensityMatrix, factor: Factor) -> Result<()> {
    if rho.factor != factor {
        return Err(Error::InvalidConfig(format!(
            "expected a {factor:?} density matrix, got {:?}",
            rho.factor
        )));
    }
    Ok(())
}

/// Partial trace over the spins.
pub fn reduce_field(rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_factor(rho, Factor::Composite)?;
    let cfg = rho.config;
    let nf = cfg.field_dim();
    let mut out = DMatrix::<C64>::zeros(nf, nf);
    for k in 0..cfg.spin_dim() {
        let block = rho.entries.view((k * nf, k * nf), (nf, nf));
        out += block;
    }
    DensityMatrix::new(cfg, Factor::Field, out)
}

/// Partial trace over the field.
pub fn reduce_spins(rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_factor(rho, Factor::Composite)?;
    let cfg = rho.config;
    let ns = cfg.spin_dim();
    let nf = cfg.field_dim();
    let mut out = DMatrix::<C64>::zeros(ns, ns);
    for k in 0..ns {
        for kp in 0..ns {
            let mut acc = ZERO;
            for n in 0..nf {
                acc += rho.entries[(k * nf + n, kp * nf + n)];
            }
            out[(k, kp)] = acc;
        }
    }
    DensityMatrix::new(cfg, Factor::Spin, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    FieldPlane,
    SpinSphere,
    SpinLambert,
}

impl GridKind {
    pub fn axis_names(&self) -> [&'static str; 2] {
        match self {
            GridKind::FieldPlane => ["q", "p"],
            GridKind::SpinSphere => ["theta", "phi"],
            GridKind::SpinLambert => ["r", "theta_p"],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub time: Option<f64>,
    pub gamma: Option<f64>,
    pub n_qubits: Option<usize>,
    pub nbar: Option<f64>,
    pub label: Option<String>,
}

/// A sampled quasi-probability distribution. `values` is row-major with the
/// first axis as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub kind: GridKind,
    pub axis0: Vec<f64>,
    pub axis1: Vec<f64>,
    pub values: Vec<f64>,
    pub max_imag_residue: f64,
    pub metadata: GridMetadata,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn periodic(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = axis[i + 1] - axis[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    w
}

impl WignerGrid {
    pub fn rows(&self) -> usize {
        self.axis0.len()
    }

    pub fn cols(&self) -> usize {
        self.axis1.len()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(row, col)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let idx = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
            .0;
        (idx / self.cols(), idx % self.cols())
    }

    /// Quadrature weight for each axis, including the area element.
    fn weights(&self) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            GridKind::FieldPlane => (trapezoid_weights(&self.axis0), trapezoid_weights(&self.axis1)),
            GridKind::SpinSphere => {
                let w0 = trapezoid_weights(&self.axis0)
                    .into_iter()
                    .zip(&self.axis0)
                    .map(|(w, t)| w * t.sin())
                    .collect();
                (w0, vec![2.0 * PI / self.cols() as f64; self.cols()])
            }
            GridKind::SpinLambert => {
                let w0 = trapezoid_weights(&self.axis0)
                    .into_iter()
                    .zip(&self.axis0)
                    .map(|(w, r)| w * r)
                    .collect();
                (w0, vec![2.0 * PI / self.cols() as f64; self.cols()])
            }
        }
    }

    /// Integral of the grid over its natural measure (`dq dp`, `sinθ dθ dφ`
    /// or `r dr dθ_p`).
    pub fn integral(&self) -> f64 {
        let (w0, w1) = self.weights();
        let mut acc = 0.0;
        for i in 0..self.rows() {
            let mut row = 0.0;
            for j in 0..self.cols() {
                row += w1[j] * self.at(i, j);
            }
            acc += w0[i] * row;
        }
        acc
    }

    /// Integral of `|W|` over the outermost ring of cells of a planar grid.
    pub fn boundary_mass(&self) -> f64 {
        let (w0, w1) = self.weights();
        let (r, c) = (self.rows(), self.cols());
        let mut acc = 0.0;
        for i in 0..r {
            for j in 0..c {
                let edge = i == 0 || j == 0 || i + 1 == r || j + 1 == c;
                if edge {
                    acc += w0[i] * w1[j] * self.at(i, j).abs();
                }
            }
        }
        acc
    }
}

/// Matrix of displacement elements `⟨m|D(γ)|n⟩` for `m, n < dim`.
pub(crate) fn displacement_elements(gamma: C64, dim: usize) -> DMatrix<C64> {
    // ⟨n+d|D(γ)|n⟩ = √(n!/(n+d)!) γ^d e^{−|γ|²/2} L_n^{(d)}(|γ|²)
    // ⟨n|D(γ)|n+d⟩ = √(n!/(n+d)!) (−γ*)^d e^{−|γ|²/2} L_n^{(d)}(|γ|²)
    let mut f = DMatrix::<C64>::zeros(dim, dim);
    let x = gamma.norm_sqr();
    if x == 0.0 {
        f.fill_diagonal(C64::new(1.0, 0.0));
        return f;
    }
    let ln_abs = gamma.norm().ln();
    let theta = gamma.arg();
    let mut ln_fact = vec![0.0; dim + 1];
    for k in 1..=dim {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    for d in 0..dim {
        let below = C64::from_polar(1.0, d as f64 * theta);
        let above = C64::from_polar(if d % 2 == 0 { 1.0 } else { -1.0 }, -(d as f64) * theta);
        let df = d as f64;
        // Laguerre recurrence in n, rescaled to stay in range; `ln_scale`
        // is the log of the factor divided out so far.
        let (mut prev, mut cur, mut ln_scale) = (0.0f64, 1.0f64, 0.0f64);
        for n in 0..dim - d {
            if n > 0 {
                let k = (n - 1) as f64;
                let next = ((2.0 * k + 1.0 + df - x) * cur - (k + df) * prev) / (k + 1.0);
                prev = cur;
                cur = next;
                if cur.abs() > 1e150 {
                    prev /= 1e150;
                    cur /= 1e150;
                    ln_scale += 150.0 * std::f64::consts::LN_10;
                }
            }
            let ln_mag = 0.5 * (ln_fact[n] - ln_fact[n + d]) + df * ln_abs - x / 2.0 + ln_scale;
            let v = cur * ln_mag.exp();
            f[(n + d, n)] = below * v;
            if d > 0 {
                f[(n, n + d)] = above * v;
            }
        }
    }
    f
}

/// `(1/π) Tr[ρ D(2β) Π]` at a single phase-space point.
pub fn field_wigner_point(rho_f: &DMatrix<C64>, q: f64, p: f64) -> C64 {
    let dim = rho_f.nrows();
    let beta = C64::new(q, p) / 2f64.sqrt();
    let f = displacement_elements(beta * 2.0, dim);
    // Tr[ρ D Π] = Σ_{n,m} ρ_nm ⟨m|D|n⟩ (−1)ⁿ
    let mut acc = ZERO;
    for n in 0..dim {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut col = ZERO;
        for m in 0..dim {
            col += rho_f[(n, m)] * f[(m, n)];
        }
        acc += col * sign;
    }
    acc / PI
}

/// Field Wigner function on a `resolution.0 × resolution.1` grid spanning
/// `q_range × p_range` (endpoints included).
pub fn field_wigner(
    rho_f: &DensityMatrix,
    q_range: (f64, f64),
    p_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<WignerGrid> {
    check_factor(rho_f, Factor::Field)?;
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::InvalidConfig("field grid needs at least 2 points per axis".into()));
    }
    let last = rho_f.dim() - 1;
    let top = rho_f.entries[(last, last)].re;
    if top > BOUNDARY_MASS_TOL {
        return Err(Error::Truncation(format!(
            "last Fock level carries population {top:.3e}"
        )));
    }
    let qs = linspace(q_range.0, q_range.1, resolution.0);
    let ps = linspace(p_range.0, p_range.1, resolution.1);
    let rows: Vec<Vec<C64>> = qs
        .par_iter()
        .map(|&q| ps.iter().map(|&p| field_wigner_point(&rho_f.entries, q, p)).collect())
        .collect();
    let max_imag_residue = rows.iter().flatten().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let grid = WignerGrid {
        kind: GridKind::FieldPlane,
        axis0: qs,
        axis1: ps,
        values: rows.into_iter().flatten().map(|z| z.re).collect(),
        max_imag_residue,
        metadata: GridMetadata::default(),
    };
    if max_imag_residue > REALITY_TOL {
        return Err(Error::RealityViolation {
            residue: max_imag_residue,
        });
    }
    let boundary = grid.boundary_mass();
    if boundary > BOUNDARY_MASS_TOL {
        return Err(Error::Truncation(format!(
            "Wigner mass {boundary:.3e} on the grid boundary; widen the quadrature range"
        )));
    }
    Ok(grid)
}

/// Complex spherical harmonics with the Condon-Shortley phase for all
/// `0 ≤ l ≤ l_max`, `|m| ≤ l`, at one colatitude; returned as
/// `table[l][m + l] = Y_l^m(θ, 0)` (the `e^{imφ}` factor is applied by the
/// caller).
pub fn spherical_harmonics_theta(l_max: usize, theta: f64) -> Vec<Vec<f64>> {
    let x = theta.cos();
    let s = theta.sin().abs();
    // legendre[m][l] = P_l^m(x) with Condon-Shortley phase
    let mut legendre = vec![vec![0.0; l_max + 1]; l_max + 1];
    let mut pmm = 1.0;
    for m in 0..=l_max {
        if m > 0 {
            pmm *= -((2 * m - 1) as f64) * s;
        }
        legendre[m][m] = pmm;
        if m < l_max {
            legendre[m][m + 1] = x * (2 * m + 1) as f64 * pmm;
        }
        for l in m + 2..=l_max {
            legendre[m][l] = ((2 * l - 1) as f64 * x * legendre[m][l - 1]
                - (l + m - 1) as f64 * legendre[m][l - 2])
                / (l - m) as f64;
        }
    }
    let mut table = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut row = vec![0.0; 2 * l + 1];
        for m in 0..=l {
            // (l−m)!/(l+m)!
            let mut ratio = 1.0;
            for i in (l - m + 1)..=(l + m) {
                ratio /= i as f64;
            }
            let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
            let y = norm * legendre[m][l];
            row[l + m] = y;
            // Y_l^{−m} = (−1)^m conj(Y_l^m); real at φ = 0
            row[l - m] = if m % 2 == 0 { y } else { -y };
        }
        table.push(row);
    }
    table
}

/// Multipole coefficients `ρ_lm = Tr(ρ_Q T_l^m†)`, indexed `[l][m + l]`.
pub fn multipole_coefficients(rho_q: &DensityMatrix) -> Result<Vec<Vec<C64>>> {
    check_factor(rho_q, Factor::Spin)?;
    let cfg = rho_q.config;
    let l_max = cfg.n_qubits;
    let mut out = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut row = Vec::with_capacity(2 * l + 1);
        for m in -(l as i64)..=(l as i64) {
            let t = multipole_operator(cfg, l, m)?.entries;
            // Tr(ρ T†) = Σ_ij ρ_ij conj(T_ij)
            let v = rho_q
                .entries
                .iter()
                .zip(t.iter())
                .fold(ZERO, |acc, (r, t)| acc + r * t.conj());
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

/// Spin Wigner function on `theta_res` colatitudes in `[0, π]` (poles
/// included) by `phi_res` azimuths in `[0, 2π)`.
pub fn spin_wigner(rho_q: &DensityMatrix, theta_res: usize, phi_res: usize) -> Result<WignerGrid> {
    if theta_res < 2 || phi_res < 1 {
        return Err(Error::InvalidConfig("spin grid needs at least 2 colatitudes and 1 azimuth".into()));
    }
    let coeffs = multipole_coefficients(rho_q)?;
    let l_max = rho_q.config.n_qubits;
    let thetas = linspace(0.0, PI, theta_res);
    let phis = periodic(phi_res);
    let phases: Vec<Vec<C64>> = phis
        .iter()
        .map(|&phi| {
            (-(l_max as i64)..=(l_max as i64))
                .map(|m| C64::from_polar(1.0, m as f64 * phi))
                .collect()
        })
        .collect();
    let rows: Vec<Vec<C64>> = thetas
        .par_iter()
        .map(|&theta| {
            let y = spherical_harmonics_theta(l_max, theta);
            phases
                .iter()
                .map(|phase| {
                    let mut acc = ZERO;
                    for l in 0..=l_max {
                        for mi in 0..=2 * l {
                            let m_off = mi as i64 - l as i64 + l_max as i64;
                            acc += coeffs[l][mi] * phase[m_off as usize] * y[l][mi];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let max_imag_residue = rows.iter().flatten().fold(0.0f64, |a, z| a.max(z.im.abs()));
    if max_imag_residue > REALITY_TOL {
        return Err(Error::RealityViolation {
            residue: max_imag_residue,
        });
    }
    Ok(WignerGrid {
        kind: GridKind::SpinSphere,
        axis0: thetas,
        axis1: phis,
        values: rows.into_iter().flatten().map(|z| z.re).collect(),
        max_imag_residue,
        metadata: GridMetadata {
            n_qubits: Some(rho_q.config.n_qubits),
            ..GridMetadata::default()
        },
    })
}

/// Colatitude to Lambert radius: pole at the center, antipode on `r = 2`.
pub fn lambert_radius(theta: f64) -> f64 {
    2.0 * (theta / 2.0).sin()
}

pub fn lambert_colatitude(r: f64) -> f64 {
    2.0 * (r / 2.0).clamp(-1.0, 1.0).asin()
}

/// Bilinear interpolation of a sphere grid, periodic in azimuth.
fn sample_sphere(grid: &WignerGrid, theta: f64, phi: f64) -> f64 {
    let nt = grid.rows();
    let np = grid.cols();
    let dt = grid.axis0[1] - grid.axis0[0];
    let x = ((theta - grid.axis0[0]) / dt).clamp(0.0, (nt - 1) as f64);
    let i0 = (x.floor() as usize).min(nt - 2);
    let fx = x - i0 as f64;
    let y = phi.rem_euclid(2.0 * PI) / (2.0 * PI) * np as f64;
    let j0 = (y.floor() as usize) % np;
    let j1 = (j0 + 1) % np;
    let fy = y - y.floor();
    let v00 = grid.at(i0, j0);
    let v01 = grid.at(i0, j1);
    let v10 = grid.at(i0 + 1, j0);
    let v11 = grid.at(i0 + 1, j1);
    (1.0 - fx) * ((1.0 - fy) * v00 + fy * v01) + fx * ((1.0 - fy) * v10 + fy * v11)
}

/// Resamples a sphere grid onto the Lambert azimuthal equal-area disk,
/// `(r, θ_p) = (2 sin(θ/2), φ)`, with `radial_res` radii in `[0, 2]` and
/// `angular_res` polar angles in `[0, 2π)`.
pub fn lambert_project(grid: &WignerGrid, radial_res: usize, angular_res: usize) -> Result<WignerGrid> {
    if grid.kind != GridKind::SpinSphere {
        return Err(Error::InvalidConfig(format!(
            "Lambert projection needs a spin_sphere grid, got {:?}",
            grid.kind
        )));
    }
    if radial_res < 2 || angular_res < 1 || grid.rows() < 2 {
        return Err(Error::InvalidConfig("Lambert grid resolution too small".into()));
    }
    let radii = linspace(0.0, 2.0, radial_res);
    let angles = periodic(angular_res);
    let values = radii
        .iter()
        .flat_map(|&r| {
            let theta = lambert_colatitude(r);
            angles.iter().map(move |&a| sample_sphere(grid, theta, a))
        })
        .collect();
    Ok(WignerGrid {
        kind: GridKind::SpinLambert,
        axis0: radii,
        axis1: angles,
        values,
        max_imag_residue: grid.max_imag_residue,
        metadata: grid.metadata.clone(),
    })
}
