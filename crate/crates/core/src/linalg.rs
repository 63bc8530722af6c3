//! Small dense complex-matrix kernel.
//!
//! Everything here is sized for the 3x3 state space and the 9x9
//! superoperator space, so robustness beats asymptotics: the Hermitian
//! eigensolver is a cyclic Jacobi sweep and the general exponential is
//! scaling-and-squaring with a fixed-order Taylor kernel.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance for eigensolver inputs.
const HERMITICITY_RTOL: f64 = 1e-10;

/// Dense square complex matrix with a dimension fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major complex entries; `entries.len()` must be `n*n`.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        Ok(Self { n, data: entries })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|k| self[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius norm of `M - M'` (zero for exactly Hermitian input).
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self[(i, j)] - self[(j, i)].conj();
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, rtol: f64) -> bool {
        self.hermiticity_deviation() <= rtol * self.frobenius_norm().max(1.0)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, v.dim()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(ComplexVector::new(out))
    }

    /// Kronecker product, used to lift 3x3 operators to the 9x9
    /// superoperator space.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.n, other.n);
        let mut out = ComplexMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let factor = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = factor * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn conjugated(&self) -> ComplexMatrix {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transposed(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions disagree");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions disagree");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions disagree");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Computational basis vector |k> in an n-dimensional space.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "vector dimensions disagree");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(n, other.dim(), "vector dimensions disagree");
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    pub fn normalized(&self) -> Result<ComplexVector> {
        let norm = self.norm();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self { data: self.data.iter().map(|z| z / norm).collect() })
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        Self { data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), other.dim(), "vector dimensions disagree");
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), other.dim(), "vector dimensions disagree");
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.data.iter()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.data[k]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, k: usize) -> &mut Complex64 {
        &mut self.data[k]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Returns the real eigenvalues in ascending order and a unitary matrix
/// whose columns are the matching eigenvectors, so that
/// `M = V diag(lambda) V'`. Degenerate blocks return an arbitrary
/// orthonormal basis of the degenerate subspace.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    if !m.all_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = m.hermiticity_deviation();
    let tolerance = HERMITICITY_RTOL * m.frobenius_norm().max(1.0);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }

    // Symmetrize once so roundoff in the input cannot leak into the sweep.
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                // Stable root of t^2 - 2 theta t - 1 = 0.
                let t = if theta == 0.0 {
                    -1.0
                } else {
                    -theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_pq = -phase * s;
                let u_qp = phase.conj() * s;
                // B = A U on columns p, q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * c;
                }
                // A = U' B on rows p, q.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * u_qp.conj();
                    a[(q, k)] = apk * u_pq.conj() + aqk * c;
                }
                // Accumulate V = V U.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok((eigenvalues, vectors))
}

/// Unitary propagator `exp(-i H t)` of a Hermitian generator, via
/// eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (eigenvalues, v) = hermitian_eig(h)?;
    let n = h.dim();
    let phases: Vec<Complex64> = eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    // V diag(e^{-i lambda t}) V'
    let mut scaled = v.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= phases[j];
        }
    }
    Ok(&scaled * &v.dagger())
}

/// Matrix exponential of a general square complex matrix by
/// scaling-and-squaring over a fixed-order Taylor kernel.
///
/// The squaring count follows the one-norm, `s = max(0, ceil(log2 ||M||_1))`,
/// which keeps the scaled norm at or below one where the order-18 Taylor
/// truncation sits near 1e-16.
pub fn expm_general(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.all_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let norm = m.one_norm();
    let s = if norm > 1.0 { norm.log2().ceil() as u32 } else { 0 };
    let scaled = m.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));

    const TAYLOR_ORDER: usize = 18;
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=TAYLOR_ORDER {
        term = &term * &scaled;
        term = term.scale(Complex64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// Commutator `[A, B] = AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(&(a * b) - &(b * a))
}
