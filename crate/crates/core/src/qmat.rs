//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything in this crate lives on one or two qubits, so matrices are stored
//! inline (no heap allocation) and the Hermitian eigensolver is specialised:
//! a closed form for 2×2 and cyclic Jacobi sweeps for 4×4.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I_UNIT: C64 = C64::new(0.0, 1.0);

/// Off-diagonal magnitude below which a Jacobi sweep is considered converged.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Largest tolerated negative eigenvalue for matrices that are PSD up to rounding.
pub const PSD_SLACK: f64 = 1e-9;

/// Eigenvalues within this fraction of the spectral radius are rounding
/// noise and are taken as exactly zero before a square root.
pub const ZERO_EIG_REL: f64 = 1e-14;

/// Tolerance used when a caller asks for a Hermitian matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat {
    dim: usize,
    data: [C64; 16],
}

impl fmt::Debug for ComplexMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = (0..self.dim)
            .map(|i| &self.data[i * self.dim..(i + 1) * self.dim])
            .collect();
        f.debug_struct("ComplexMat")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::invalid(format!("matrix dimension must be 2 or 4, got {dim}")))
    }
}

impl ComplexMat {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_entries(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut m = Self::zeros(dim)?;
        m.data[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_entries(dim, &c)
    }

    /// Builds a Hermitian matrix. Inputs that deviate from Hermiticity by more
    /// than [`HERMITIAN_TOL`] are rejected; the accepted matrix is symmetrised
    /// exactly as `(M + M†)/2`.
    pub fn hermitian(dim: usize, entries: &[C64]) -> Result<Self> {
        let m = Self::from_entries(dim, entries)?;
        let dev = m.hermiticity_error();
        if dev > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (max |M - M†| = {dev:e})"
            )));
        }
        Ok(m.hermitian_part())
    }

    pub fn diag_real(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * dim + i] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Result<Self> {
        let dim = v.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of bounds");
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of bounds");
        self.data[i * self.dim + j] = value;
    }

    /// Row-major view of the `dim²` entries.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = *self;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for z in out.data[..self.dim * self.dim].iter_mut() {
            *z *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Matrix product; panics if the dimensions differ.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = Self { dim: n, data: [ZERO; 16] };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// `k · self · k†`
    pub fn sandwich(&self, k: &Self) -> Self {
        k.matmul(self).matmul(&k.adjoint())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in comparison");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let id = Self::identity(self.dim).expect("dim already validated");
        self.matmul(&self.adjoint()).max_abs_diff(&id) <= tol
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn max_off_diagonal(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.data[i * n + j].norm());
                }
            }
        }
        m
    }
}

impl Add for ComplexMat {
    type Output = ComplexMat;
    fn add(self, rhs: ComplexMat) -> ComplexMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        out
    }
}

impl Sub for ComplexMat {
    type Output = ComplexMat;
    fn sub(self, rhs: ComplexMat) -> ComplexMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }
}

impl Neg for ComplexMat {
    type Output = ComplexMat;
    fn neg(self) -> ComplexMat {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMat {
    type Output = ComplexMat;
    fn mul(self, rhs: ComplexMat) -> ComplexMat {
        self.matmul(&rhs)
    }
}

impl<'a> Mul<&'a ComplexMat> for &'a ComplexMat {
    type Output = ComplexMat;
    fn mul(self, rhs: &'a ComplexMat) -> ComplexMat {
        self.matmul(rhs)
    }
}

pub fn identity2() -> ComplexMat {
    ComplexMat::identity(2).expect("dim 2")
}

pub fn identity4() -> ComplexMat {
    ComplexMat::identity(4).expect("dim 4")
}

/// Pauli X.
pub fn sigma1() -> ComplexMat {
    ComplexMat::from_entries(2, &[ZERO, ONE, ONE, ZERO]).expect("dim 2")
}

/// Pauli Y, fixed as `[[0, -i], [i, 0]]`.
pub fn sigma2() -> ComplexMat {
    ComplexMat::from_entries(2, &[ZERO, -I_UNIT, I_UNIT, ZERO]).expect("dim 2")
}

/// Pauli Z.
pub fn sigma3() -> ComplexMat {
    ComplexMat::from_entries(2, &[ONE, ZERO, ZERO, -ONE]).expect("dim 2")
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &ComplexMat, b: &ComplexMat) -> Result<ComplexMat> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::invalid(format!(
            "kron expects two 2x2 operands, got {}x{} and {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    let mut out = ComplexMat::zeros(4)?;
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.data[i * 2 + j];
            for k in 0..2 {
                for l in 0..2 {
                    out.data[(2 * i + k) * 4 + (2 * j + l)] = aij * b.data[k * 2 + l];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the second qubit of a two-qubit operator.
pub fn partial_trace_second(m: &ComplexMat) -> Result<ComplexMat> {
    if m.dim != 4 {
        return Err(Error::invalid(format!(
            "partial trace expects a 4x4 operator, got {}x{}",
            m.dim, m.dim
        )));
    }
    let mut out = ComplexMat::zeros(2)?;
    for i in 0..2 {
        for j in 0..2 {
            out.data[i * 2 + j] = (0..2).map(|k| m.data[(2 * i + k) * 4 + (2 * j + k)]).sum();
        }
    }
    Ok(out)
}

/// `e^{i·alpha·σ₂} = cos(alpha)·I + i·sin(alpha)·σ₂`, which with the fixed σ₂
/// convention is the real rotation `[[cos, sin], [-sin, cos]]`.
pub fn rot_sigma2(alpha: f64) -> ComplexMat {
    let (s, c) = alpha.sin_cos();
    ComplexMat::from_real(2, &[c, s, -s, c]).expect("dim 2")
}

/// `cos(alpha)·σ₁ + sin(alpha)·σ₃`, a dichotomic observable in the XZ plane.
pub fn xz_observable(alpha: f64) -> ComplexMat {
    let (s, c) = alpha.sin_cos();
    ComplexMat::from_real(2, &[s, c, c, -s]).expect("dim 2")
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMat,
}

impl HermEig {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// `V · diag(f(λ)) · V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMat {
        let n = self.eigenvectors.dim();
        let mut out = ComplexMat::zeros(n).expect("valid dim");
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.eigenvectors.get(i, k) * w;
                for j in 0..n {
                    out.data[i * n + j] += vi * self.eigenvectors.get(j, k).conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eig_hermitian(m: &ComplexMat) -> Result<HermEig> {
    let dev = m.hermiticity_error();
    if dev > 1e-9 * m.frobenius_norm().max(1.0) {
        return Err(Error::invalid(format!(
            "eigendecomposition requires a Hermitian matrix (max |M - M†| = {dev:e})"
        )));
    }
    let h = m.hermitian_part();
    if !h.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::numerical("matrix has non-finite entries"));
    }
    let (values, vectors) = match h.dim {
        2 => eig2(&h),
        _ => jacobi(&h)?,
    };
    Ok(sort_ascending(values, vectors))
}

fn sort_ascending(values: Vec<f64>, vectors: ComplexMat) -> HermEig {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut sorted = ComplexMat::zeros(n).expect("valid dim");
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted.data[i * n + dst] = vectors.data[i * n + src];
        }
    }
    HermEig {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors: sorted,
    }
}

fn normalise(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn eig2(h: &ComplexMat) -> (Vec<f64>, ComplexMat) {
    let a = h.data[0].re;
    let d = h.data[3].re;
    let b = h.data[1];
    let mean = 0.5 * (a + d);
    let half_gap = (0.5 * (a - d)).hypot(b.norm());
    let lo = mean - half_gap;
    let hi = mean + half_gap;

    if b.norm() <= f64::EPSILON * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
        let vectors = ComplexMat::identity(2).expect("dim 2");
        return (vec![a, d], vectors);
    }

    // (H - λ)v = 0 has solutions (b, λ - a) and (λ - d, b*); pick the one
    // with the larger norm for each eigenvalue.
    let pick = |lambda: f64| {
        let u = [b, C64::new(lambda - a, 0.0)];
        let w = [C64::new(lambda - d, 0.0), b.conj()];
        let nu = u[0].norm_sqr() + u[1].norm_sqr();
        let nw = w[0].norm_sqr() + w[1].norm_sqr();
        normalise(if nu >= nw { u } else { w })
    };
    let v_lo = pick(lo);
    // Second vector built orthogonal to the first: (−v₁*, v₀*).
    let v_hi = [-v_lo[1].conj(), v_lo[0].conj()];
    let vectors =
        ComplexMat::from_entries(2, &[v_lo[0], v_hi[0], v_lo[1], v_hi[1]]).expect("dim 2");
    (vec![lo, hi], vectors)
}

fn jacobi(h: &ComplexMat) -> Result<(Vec<f64>, ComplexMat)> {
    let n = h.dim;
    let mut a = *h;
    let mut v = ComplexMat::identity(n)?;
    let tol = JACOBI_TOL * h.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.max_off_diagonal() < tol {
            let values = (0..n).map(|i| a.data[i * n + i].re).collect();
            return Ok((values, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.data[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase-rotate column q so that a[p][q] becomes real and
                // positive, then apply the real symmetric Jacobi rotation.
                let phase = apq / mag;
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let mut j = ComplexMat::identity(n)?;
                j.data[p * n + p] = C64::new(c, 0.0);
                j.data[p * n + q] = C64::new(s, 0.0);
                j.data[q * n + p] = -phase.conj() * s;
                j.data[q * n + q] = phase.conj() * c;

                a = j.adjoint().matmul(&a).matmul(&j);
                // Rounding leaves tiny imaginary parts on the diagonal.
                for i in 0..n {
                    a.data[i * n + i].im = 0.0;
                }
                a.data[p * n + q] = ZERO;
                a.data[q * n + p] = ZERO;
                v = v.matmul(&j);
            }
        }
    }
    Err(Error::numerical(format!(
        "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-PSD_SLACK, 0)` are treated as zero; anything more
/// negative is rejected with [`Error::NotPsd`]. Positive eigenvalues below
/// [`ZERO_EIG_REL`] times the largest one are also zeroed, since the square
/// root would amplify rounding noise (`√1e-17 ≈ 3e-9`).
pub fn sqrt_psd(m: &ComplexMat) -> Result<ComplexMat> {
    let eig = eig_hermitian(m)?;
    let min = eig.eigenvalues[0];
    if min < -PSD_SLACK {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let radius = eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let floor = ZERO_EIG_REL * radius;
    Ok(eig
        .reconstruct_with(|l| if l <= floor { 0.0 } else { l.sqrt() })
        .hermitian_part())
}
