//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's operator or tomography code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Random density matrix `A A† / Tr`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DMatrix<C64> {
    let a = DMatrix::from_fn(dim, rank, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

// ---- explicit qubit register -------------------------------------------
//
// Basis |b_1 … b_N⟩ ⊗ |n⟩ with bit 1 meaning |g⟩; index = bits·(n_max+1) + n.

pub struct FullSpace {
    pub n: usize,
    pub n_max: usize,
}

impl FullSpace {
    pub fn dim(&self) -> usize {
        (1 << self.n) * (self.n_max + 1)
    }

    fn fd(&self) -> usize {
        self.n_max + 1
    }

    /// `g Σ_k (σ₊ᵏ a + σ₋ᵏ a†)` with `σ₊ = |e⟩⟨g|`.
    pub fn hamiltonian(&self, g: f64) -> DMatrix<C64> {
        let d = self.dim();
        let fd = self.fd();
        let mut h = DMatrix::zeros(d, d);
        for bits in 0..(1usize << self.n) {
            for q in 0..self.n {
                if bits & (1 << q) == 0 {
                    continue;
                }
                // σ₊ᵏ a: |…g…, n⟩ → √n |…e…, n−1⟩
                let up = bits & !(1 << q);
                for n in 1..fd {
                    let v = C64::new(g * (n as f64).sqrt(), 0.0);
                    h[(up * fd + n - 1, bits * fd + n)] += v;
                    h[(bits * fd + n, up * fd + n - 1)] += v;
                }
            }
        }
        h
    }

    pub fn photon_number(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                C64::new((i % self.fd()) as f64, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Field quadrature-like observable `a + a†`.
    pub fn field_x(&self) -> DMatrix<C64> {
        let fd = self.fd();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i / fd == j / fd && (i % fd).abs_diff(j % fd) == 1 {
                C64::new(((i % fd).max(j % fd) as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Collective `S_z = ½ Σ σ_zᵏ`, `σ_z = diag(1, −1)` on `(e, g)`.
    pub fn sz(&self) -> DMatrix<C64> {
        let fd = self.fd();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                let ones = (i / fd).count_ones() as f64;
                C64::new(self.n as f64 / 2.0 - ones, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Collective `S_x = ½ Σ σ_xᵏ`.
    pub fn sx(&self) -> DMatrix<C64> {
        let fd = self.fd();
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for bits in 0..(1usize << self.n) {
            for q in 0..self.n {
                let flip = bits ^ (1 << q);
                for n in 0..fd {
                    m[(flip * fd + n, bits * fd + n)] += C64::new(0.5, 0.0);
                }
            }
        }
        m
    }

    /// Lift a Dicke-basis spin vector (index k = number of |g⟩) times a
    /// field vector into the register.
    pub fn lift(&self, dicke: &[C64], field: &[C64]) -> DVector<C64> {
        let fd = self.fd();
        let mut v = DVector::zeros(self.dim());
        for bits in 0..(1usize << self.n) {
            let k = bits.count_ones() as usize;
            let w = dicke[k] / binomial(self.n, k).sqrt();
            for n in 0..fd {
                v[bits * fd + n] = w * field[n];
            }
        }
        v
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `exp(−iHt)` via eigen-decomposition of the Hermitian `H`.
pub fn propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let phases = DMatrix::from_fn(h.nrows(), h.nrows(), |i, j| {
        if i == j {
            C64::from_polar(1.0, -eig.eigenvalues[i] * t)
        } else {
            ZERO
        }
    });
    u * phases * u.adjoint()
}

pub fn expect(op: &DMatrix<C64>, psi: &DVector<C64>) -> f64 {
    (psi.adjoint() * op * psi)[(0, 0)].re
}

// ---- position-representation Wigner function ---------------------------

/// Normalized Hermite functions `ψ_0 … ψ_{dim−1}` at `x` for
/// `q = (a + a†)/√2`.
pub fn hermite_functions(dim: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    if dim == 0 {
        return out;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if dim > 1 {
        out[1] = 2f64.sqrt() * x * out[0];
    }
    for n in 1..dim.saturating_sub(1) {
        out[n + 1] = (2.0 / (n + 1) as f64).sqrt() * x * out[n] - (n as f64 / (n + 1) as f64).sqrt() * out[n - 1];
    }
    out
}

/// `W(q,p) = (1/2π) ∫ dζ ⟨q+ζ/2|ρ|q−ζ/2⟩ e^{−ipζ}` by the trapezoid rule.
pub fn wigner_quadrature(rho: &DMatrix<C64>, q: f64, p: f64) -> C64 {
    let dim = rho.nrows();
    let half_width = 20.0;
    let steps = 4000;
    let h = 2.0 * half_width / steps as f64;
    let mut acc = ZERO;
    for s in 0..=steps {
        let zeta = -half_width + s as f64 * h;
        let a = hermite_functions(dim, q + zeta / 2.0);
        let b = hermite_functions(dim, q - zeta / 2.0);
        let mut elem = ZERO;
        for m in 0..dim {
            for n in 0..dim {
                elem += rho[(m, n)] * a[m] * b[n];
            }
        }
        let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
        acc += elem * C64::from_polar(w * h, -p * zeta);
    }
    acc / (2.0 * std::f64::consts::PI)
}

// ---- Clebsch-Gordan coefficients by explicit coupling -------------------

/// Spin-`j` lowering matrix in the basis `m = j, j−1, …, −j` (doubled `j`).
fn lowering(two_j: i64) -> DMatrix<f64> {
    let d = (two_j + 1) as usize;
    let j = two_j as f64 / 2.0;
    DMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            let m = j - c as f64;
            ((j + m) * (j - m + 1.0)).sqrt()
        } else {
            0.0
        }
    })
}

/// All coupled states `|J M⟩` in `j1 ⊗ j2` (product basis index
/// `i1·(2j2+1) + i2`, `i = j − m`). Built from the stretched state by
/// lowering and Gram–Schmidt, with the Condon–Shortley phase
/// `⟨j1 j1; j2 J−j1 | J J⟩ > 0`.
pub struct Coupling {
    two_j1: i64,
    two_j2: i64,
    /// `states[(two_J, two_M)]`.
    states: std::collections::HashMap<(i64, i64), DVector<f64>>,
}

impl Coupling {
    pub fn new(two_j1: i64, two_j2: i64) -> Self {
        let d1 = (two_j1 + 1) as usize;
        let d2 = (two_j2 + 1) as usize;
        let lower = lowering(two_j1).kronecker(&DMatrix::identity(d2, d2))
            + DMatrix::identity(d1, d1).kronecker(&lowering(two_j2));
        let mut states: std::collections::HashMap<(i64, i64), DVector<f64>> = std::collections::HashMap::new();
        let two_jmax = two_j1 + two_j2;
        let two_jmin = (two_j1 - two_j2).abs();
        let mut two_big_j = two_jmax;
        while two_big_j >= two_jmin {
            // highest weight: orthogonal to every larger J with M = J
            let two_m = two_big_j;
            let mut top = DVector::<f64>::zeros(d1 * d2);
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    let m = (two_j1 - 2 * i1 as i64) + (two_j2 - 2 * i2 as i64);
                    if m == two_m {
                        top[i1 * d2 + i2] = 1.0 + 0.1 * (i1 as f64);
                    }
                }
            }
            let mut bigger = two_jmax;
            while bigger > two_big_j {
                let other = &states[&(bigger, two_m)];
                let proj = other.dot(&top);
                top -= other * proj;
                bigger -= 2;
            }
            top /= top.norm();
            // sign: ⟨j1 j1; j2 J−j1|J J⟩ > 0 is the i1 = 0 component
            let i2 = ((two_j2 - (two_big_j - two_j1)) / 2) as usize;
            if top[i2] < 0.0 {
                top = -top;
            }
            let mut cur = top;
            let mut m = two_big_j;
            loop {
                states.insert((two_big_j, m), cur.clone());
                if m == -two_big_j {
                    break;
                }
                let next = &lower * &cur;
                cur = &next / next.norm();
                m -= 2;
            }
            two_big_j -= 2;
        }
        Self { two_j1, two_j2, states }
    }

    /// `⟨j1 m1; j2 m2 | J M⟩` with doubled arguments.
    pub fn cg(&self, two_m1: i64, two_m2: i64, two_big_j: i64, two_big_m: i64) -> f64 {
        if two_m1 + two_m2 != two_big_m {
            return 0.0;
        }
        let Some(v) = self.states.get(&(two_big_j, two_big_m)) else {
            return 0.0;
        };
        if two_m1.abs() > self.two_j1 || two_m2.abs() > self.two_j2 {
            return 0.0;
        }
        let i1 = ((self.two_j1 - two_m1) / 2) as usize;
        let i2 = ((self.two_j2 - two_m2) / 2) as usize;
        v[i1 * (self.two_j2 + 1) as usize + i2]
    }
}

/// 3j symbol from the coupling oracle:
/// `(j1 j2 j3; m1 m2 m3) = (−1)^{j1−j2−m3} ⟨j1 m1; j2 m2 | j3 −m3⟩ / √(2j3+1)`.
pub fn three_j_oracle(two_j: [i64; 3], two_m: [i64; 3]) -> f64 {
    let [j1, j2, j3] = two_j;
    let [m1, m2, m3] = two_m;
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 || j3 > j1 + j2 || j3 < (j1 - j2).abs() || (j1 + j2 + j3) % 2 != 0 {
        return 0.0;
    }
    let c = Coupling::new(j1, j2);
    let phase_twice = j1 - j2 - m3;
    let sign = if (phase_twice / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * c.cg(m1, m2, j3, -m3) / ((j3 + 1) as f64).sqrt()
}
