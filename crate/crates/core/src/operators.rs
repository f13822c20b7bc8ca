//! Operator matrices on the spin, field and composite spaces.
//!
//! Collective spin operators act in the Dicke basis with `S_z |D_k⟩ = (S − k)|D_k⟩`,
//! `S = N/2`. `S₊ = Σ_k σ₊ᵏ` with `σ₊ = |e⟩⟨g|` removes one de-excitation:
//! `S₊|D_k⟩ = √(k (N − k + 1)) |D_{k−1}⟩`. Single-qubit `σ_z = diag(1, −1)` on
//! `(|e⟩, |g⟩)`, so `S_z = ½ Σ σ_zᵏ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{hermiticity_error, Factor, HilbertConfig};
use crate::wigner3j::ThreeJSymbol;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub config: HilbertConfig,
    pub factor: Factor,
    pub entries: DMatrix<C64>,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(config: HilbertConfig, factor: Factor, entries: DMatrix<C64>, hermitian: bool) -> Result<Self> {
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
            hermitian,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            ..self.clone()
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    /// Lifts a spin or field factor operator onto the composite space.
    pub fn embed(&self) -> Self {
        let cfg = self.config;
        let entries = match self.factor {
            Factor::Composite => return self.clone(),
            Factor::Spin => self
                .entries
                .kronecker(&DMatrix::<C64>::identity(cfg.field_dim(), cfg.field_dim())),
            Factor::Field => DMatrix::<C64>::identity(cfg.spin_dim(), cfg.spin_dim())
                .kronecker(&self.entries),
        };
        Self {
            config: cfg,
            factor: Factor::Composite,
            entries,
            hermitian: self.hermitian,
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &DVector<C64>) -> C64 {
        psi.dotc(&(&self.entries * psi))
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator::from_dense(&self.entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Field annihilation operator, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(cfg: HilbertConfig) -> OperatorMatrix {
    let dim = cfg.field_dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix {
        config: cfg,
        factor: Factor::Field,
        entries: m,
        hermitian: false,
    }
}

pub fn creation(cfg: HilbertConfig) -> OperatorMatrix {
    annihilation(cfg).adjoint()
}

pub fn number_operator(cfg: HilbertConfig) -> OperatorMatrix {
    let dim = cfg.field_dim();
    let diag = DVector::from_iterator(dim, (0..dim).map(|n| C64::new(n as f64, 0.0)));
    OperatorMatrix {
        config: cfg,
        factor: Factor::Field,
        entries: DMatrix::from_diagonal(&diag),
        hermitian: true,
    }
}

pub fn collective_spin(cfg: HilbertConfig, axis: SpinAxis) -> OperatorMatrix {
    let n = cfg.n_qubits;
    let dim = n + 1;
    let s = cfg.total_spin();
    let mut plus = DMatrix::<C64>::zeros(dim, dim);
    for k in 1..=n {
        plus[(k - 1, k)] = C64::new(((k * (n - k + 1)) as f64).sqrt(), 0.0);
    }
    let (entries, hermitian) = match axis {
        SpinAxis::Plus => (plus, false),
        SpinAxis::Minus => (plus.adjoint(), false),
        SpinAxis::X => ((&plus + plus.adjoint()) * C64::new(0.5, 0.0), true),
        SpinAxis::Y => ((&plus - plus.adjoint()) * C64::new(0.0, -0.5), true),
        SpinAxis::Z => {
            let diag = DVector::from_iterator(dim, (0..dim).map(|k| C64::new(s - k as f64, 0.0)));
            (DMatrix::from_diagonal(&diag), true)
        }
    };
    OperatorMatrix {
        config: cfg,
        factor: Factor::Spin,
        entries,
        hermitian,
    }
}

/// `H = g (S₊ ⊗ a + S₋ ⊗ a†)` on the composite space (`ħ = 1`).
pub fn tavis_cummings_hamiltonian(cfg: HilbertConfig) -> OperatorMatrix {
    let sp = collective_spin(cfg, SpinAxis::Plus).entries;
    let a = annihilation(cfg).entries;
    let absorb = sp.kronecker(&a);
    let entries = (&absorb + absorb.adjoint()) * C64::new(cfg.coupling, 0.0);
    OperatorMatrix {
        config: cfg,
        factor: Factor::Composite,
        entries,
        hermitian: true,
    }
}

/// Photons plus excited spins, `a†a + S_z + S`; conserved by the Hamiltonian.
pub fn excitation_number(cfg: HilbertConfig) -> OperatorMatrix {
    let photons = number_operator(cfg).embed().entries;
    let sz = collective_spin(cfg, SpinAxis::Z).embed().entries;
    let shift = DMatrix::<C64>::identity(cfg.dim(), cfg.dim()) * C64::new(cfg.total_spin(), 0.0);
    OperatorMatrix {
        config: cfg,
        factor: Factor::Composite,
        entries: photons + sz + shift,
        hermitian: true,
    }
}

/// Multipole operator `T_l^m` in the Dicke basis:
/// `Σ_{n,n'} (−1)^{S−n} √(2l+1) (S l S; −n m n') |S:n⟩⟨S:n'|`, with `n = S − k`.
pub fn multipole_operator(cfg: HilbertConfig, l: usize, m: i64) -> Result<OperatorMatrix> {
    let two_s = cfg.n_qubits as i64;
    if l as i64 > two_s {
        return Err(Error::IndexOutOfRange {
            index: l as i64,
            max: two_s,
        });
    }
    if m.abs() > l as i64 {
        return Err(Error::IndexOutOfRange {
            index: m,
            max: l as i64,
        });
    }
    let dim = cfg.spin_dim();
    let mut entries = DMatrix::<C64>::zeros(dim, dim);
    let scale = ((2 * l + 1) as f64).sqrt();
    for row in 0..dim {
        // doubled projections: 2n = 2S − 2k
        let two_n = two_s - 2 * row as i64;
        let sign = if row % 2 == 0 { 1.0 } else { -1.0 };
        for col in 0..dim {
            let two_np = two_s - 2 * col as i64;
            let symbol = ThreeJSymbol::from_doubled([two_s, 2 * l as i64, two_s], [-two_n, 2 * m, two_np])?;
            let v = symbol.value();
            if v != 0.0 {
                entries[(row, col)] = C64::new(sign * scale * v, 0.0);
            }
        }
    }
    Ok(OperatorMatrix {
        config: cfg,
        factor: Factor::Spin,
        entries,
        hermitian: m == 0,
    })
}

/// Compressed-row view of an operator, used in the time-stepping kernels.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for i in 0..dim {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != ZERO {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            dim,
            row_start,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &DVector<C64>, out: &mut DVector<C64>) {
        for i in 0..self.dim {
            let mut acc = ZERO;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            out[i] = acc;
        }
    }

    /// `out = self · x` for a dense square `x`.
    pub fn mul_left_into(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(ZERO);
        self.add_left(ONE, x, out);
    }

    /// `out = x · self†` for a dense square `x`.
    pub fn mul_right_adjoint_into(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(ZERO);
        self.add_right_adjoint(ONE, x, out);
    }

    /// `out += alpha · self · x`.
    pub fn add_left(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.dim;
        debug_assert_eq!(x.nrows(), n);
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for (src, dst) in xs.chunks_exact(n).zip(os.chunks_exact_mut(n)) {
            for (i, d) in dst.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (j, v) in self.row(i) {
                    acc += v * src[j];
                }
                *d += alpha * acc;
            }
        }
    }

    /// `out += alpha · x · self†`.
    pub fn add_right_adjoint(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        // column c of x·S† = Σ_j conj(S[c, j]) x[:, j]
        let n = self.dim;
        debug_assert_eq!(x.ncols(), n);
        let rows = x.nrows();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for (c, dst) in os.chunks_exact_mut(rows).enumerate() {
            for k in self.row_start[c]..self.row_start[c + 1] {
                let w = alpha * self.values[k].conj();
                let j = self.cols[k];
                for (d, s) in dst.iter_mut().zip(&xs[j * rows..(j + 1) * rows]) {
                    *d += w * s;
                }
            }
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_dense(&DMatrix::from_diagonal_element(dim, dim, ONE))
    }
}

/// Operator stored by its nonzero diagonals. Every operator of the model is
/// banded in the flat `k·(n_max+1) + n` layout, with at most two diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    dim: usize,
    /// `(offset, d)` with `d[i] = A[i, i + offset]` for every `i` in range.
    diagonals: Vec<(isize, Vec<C64>)>,
}

impl BandedOperator {
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let n = m.nrows() as isize;
        let mut diagonals = Vec::new();
        for off in -(n - 1)..n {
            let (lo, hi) = (0.max(-off), n.min(n - off));
            let d: Vec<C64> = (lo..hi).map(|i| m[(i as usize, (i + off) as usize)]).collect();
            if d.iter().any(|v| *v != ZERO) {
                diagonals.push((off, d));
            }
        }
        Self {
            dim: n as usize,
            diagonals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.diagonals.len()
    }

    fn rows(&self, off: isize) -> (usize, usize) {
        let n = self.dim as isize;
        (0.max(-off) as usize, n.min(n - off) as usize)
    }

    /// Diagonals premultiplied by `alpha`, for repeated left products.
    pub fn scaled(&self, alpha: C64) -> ScaledBands {
        ScaledBands(
            self.diagonals
                .iter()
                .map(|(off, d)| {
                    let (lo, hi) = self.rows(*off);
                    (*off, lo, hi, Coefficients::new(d.iter().map(|v| alpha * v)))
                })
                .collect(),
        )
    }

    /// `dst += alpha · (x · self†)[:, c]` where `xs` holds `x` column-major.
    pub fn add_right_column(&self, alpha: C64, c: usize, xs: &[C64], dst: &mut [C64]) {
        // column c of x·A† = Σ_off conj(A[c, c + off]) x[:, c + off]
        let rows = dst.len();
        for (off, d) in &self.diagonals {
            let (lo, hi) = self.rows(*off);
            if (lo..hi).contains(&c) {
                let j = (c as isize + off) as usize;
                axpy_scalar(alpha * d[c - lo].conj(), &xs[j * rows..(j + 1) * rows], dst);
            }
        }
    }

    /// `out += alpha · self · x`.
    pub fn add_left(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.dim;
        let bands = self.scaled(alpha);
        for (src, dst) in x.as_slice().chunks_exact(n).zip(out.as_mut_slice().chunks_exact_mut(n)) {
            bands.add_column(ONE, src, dst);
        }
    }

    /// `out += alpha · x · self†`.
    pub fn add_right_adjoint(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let rows = x.nrows();
        let xs = x.as_slice();
        for (c, dst) in out.as_mut_slice().chunks_exact_mut(rows).enumerate() {
            self.add_right_column(alpha, c, xs, dst);
        }
    }

    /// Nonzero entries `(j, A[i, j])` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.diagonals.iter().filter_map(move |(off, d)| {
            let (lo, hi) = self.rows(*off);
            (lo..hi).contains(&i).then(|| ((i as isize + off) as usize, d[i - lo]))
        })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (off, d) in &self.diagonals {
            let (lo, _) = self.rows(*off);
            for (k, v) in d.iter().enumerate() {
                let i = lo + k;
                m[(i, (i as isize + off) as usize)] = *v;
            }
        }
        m
    }
}

/// Output of [`BandedOperator::scaled`]: `(offset, first row, end row, weights)`.
pub struct ScaledBands(Vec<(isize, usize, usize, Coefficients)>);

impl ScaledBands {
    /// `dst += scale · A · src` for a single column `src`.
    pub fn add_column(&self, scale: C64, src: &[C64], dst: &mut [C64]) {
        for (off, lo, hi, w) in &self.0 {
            let shifted = (*lo as isize + off) as usize;
            w.mul_add(scale, &mut dst[*lo..*hi], &src[shifted..shifted + hi - lo]);
        }
    }
}

/// Elementwise weights, kept real or imaginary when possible so the inner
/// loops avoid full complex products.
enum Coefficients {
    Real(Vec<f64>),
    Imag(Vec<f64>),
    Complex(Vec<C64>),
}

impl Coefficients {
    fn new(values: impl Iterator<Item = C64>) -> Self {
        let values: Vec<C64> = values.collect();
        if values.iter().all(|v| v.im == 0.0) {
            Self::Real(values.iter().map(|v| v.re).collect())
        } else if values.iter().all(|v| v.re == 0.0) {
            Self::Imag(values.iter().map(|v| v.im).collect())
        } else {
            Self::Complex(values)
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = C64> + '_> {
        match self {
            Self::Real(w) => Box::new(w.iter().map(|&x| C64::new(x, 0.0))),
            Self::Imag(w) => Box::new(w.iter().map(|&x| C64::new(0.0, x))),
            Self::Complex(w) => Box::new(w.iter().copied()),
        }
    }

    /// `dst[i] += scale · w[i] · src[i]`.
    fn mul_add(&self, scale: C64, dst: &mut [C64], src: &[C64]) {
        if let (Self::Real(w), true) = (self, scale.im == 0.0) {
            let a = scale.re;
            for ((o, s), w) in dst.iter_mut().zip(src).zip(w) {
                o.re += a * w * s.re;
                o.im += a * w * s.im;
            }
            return;
        }
        if scale != ONE {
            for ((o, s), w) in dst.iter_mut().zip(src).zip(self.iter()) {
                *o += scale * w * s;
            }
            return;
        }
        match self {
            Self::Real(w) => {
                for ((o, s), w) in dst.iter_mut().zip(src).zip(w) {
                    o.re += w * s.re;
                    o.im += w * s.im;
                }
            }
            Self::Imag(w) => {
                for ((o, s), w) in dst.iter_mut().zip(src).zip(w) {
                    o.re -= w * s.im;
                    o.im += w * s.re;
                }
            }
            Self::Complex(w) => {
                for ((o, s), w) in dst.iter_mut().zip(src).zip(w) {
                    *o += w * s;
                }
            }
        }
    }
}

/// `dst += w · src`.
fn axpy_scalar(w: C64, src: &[C64], dst: &mut [C64]) {
    if w.im == 0.0 {
        for (o, s) in dst.iter_mut().zip(src) {
            o.re += w.re * s.re;
            o.im += w.re * s.im;
        }
    } else if w.re == 0.0 {
        for (o, s) in dst.iter_mut().zip(src) {
            o.re -= w.im * s.im;
            o.im += w.im * s.re;
        }
    } else {
        for (o, s) in dst.iter_mut().zip(src) {
            *o += w * s;
        }
    }
}

/// `[A, B]`.
pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
