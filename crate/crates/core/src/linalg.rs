//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything in this crate lives on a single qubit (2×2) or on a qubit pair
//! (4×4), so the storage is a fixed 16-slot array and all operations are
//! plain loops. The two-qubit basis order is |HH⟩, |HV⟩, |VH⟩, |VV⟩, i.e. the
//! first (signal, subsystem A) index is the slow one.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for Hermiticity and unit-trace checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass drops below this
/// (scaled by the matrix norm when that exceeds one).
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Which half of a qubit pair to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl ComplexMatrix {
    fn blank(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "matrix dimension must be 2 or 4");
        Self {
            dim,
            data: [ZERO; 16],
        }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::blank(dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut m = Self::blank(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidDimension {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    /// Builds a matrix from separate real and imaginary row-major grids.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::InvalidDimension {
                expected: re.len(),
                got: im.len(),
            });
        }
        let rows: Vec<Vec<C64>> = re
            .iter()
            .zip(im)
            .map(|(r, i)| {
                if r.len() != i.len() {
                    return Err(Error::InvalidDimension {
                        expected: r.len(),
                        got: i.len(),
                    });
                }
                Ok(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)).collect())
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&rows)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(m)
    }

    /// Rank-one projector |v⟩⟨v| (not normalized).
    pub fn outer(v: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)]).collect())
            .collect()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut out = *self;
        for z in out.data[..self.dim * self.dim].iter_mut() {
            *z = f(*z);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::blank(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// √(Tr(X†X)), summed directly over the entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data[..self.dim * self.dim]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation |A_ij − conj(A_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data[..self.dim * self.dim]
            .iter()
            .zip(&other.data[..self.dim * self.dim])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::InvalidDimension {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        Ok(self * rhs)
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        (u * self) * u.adjoint()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDimension {
            expected: 4,
            got: dim,
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::blank(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
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

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        Mul::mul(&self, &rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        let mut out = *self;
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        let mut out = *self;
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of two 2×2 matrices; block (i, j) of the result is a[i][j]·b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::InvalidDimension {
                expected: 2,
                got: m.dim,
            });
        }
    }
    let mut out = ComplexMatrix::blank(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Reduced 2×2 matrix of a 4×4 operator, keeping the named subsystem.
pub fn partial_trace(m: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.dim != 4 {
        return Err(Error::InvalidDimension {
            expected: 4,
            got: m.dim,
        });
    }
    let mut out = ComplexMatrix::blank(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    Ok(out)
}

/// Tr(ρ²) for a Hermitian ρ, i.e. the squared Frobenius norm.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    let n = rho.frobenius_norm();
    n * n
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim)
            .map(|i| self.vectors[(i, k)])
            .collect()
    }

    /// Rebuilds V·diag(f(λ))·V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim;
        let mut out = ComplexMatrix::blank(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
        }
        out
    }
}

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(h).map(|e| e.values)
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of the pivot A_pq, then applies the
/// real symmetric Jacobi rotation to the resulting real 2×2 block.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.dim;
    // symmetrize so round-off in the input does not leak into the rotations
    let mut a = (h + &h.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(n)?;
    let tol = JACOBI_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // columns p, q of V ← V·R with R = diag(1, conj(phase))·G
                let r_pp = C64::new(c, 0.0);
                let r_pq = C64::new(s, 0.0);
                let r_qp = -phase.conj() * s;
                let r_qq = phase.conj() * c;

                // A ← A·R
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * r_pp + aiq * r_qp;
                    a[(i, q)] = aip * r_pq + aiq * r_qq;
                }
                // A ← R†·A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = r_pp.conj() * apj + r_qp.conj() * aqj;
                    a[(q, j)] = r_pq.conj() * apj + r_qq.conj() * aqj;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * r_pp + viq * r_qp;
                    v[(i, q)] = vip * r_pq + viq * r_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::blank(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.dim {
        for j in 0..a.dim {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// The Pauli matrices and 2×2 identity.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    fn m(rows: [[C64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2")
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2).expect("2x2")
    }

    pub fn x() -> ComplexMatrix {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        m([[o, l], [l, o]])
    }

    pub fn y() -> ComplexMatrix {
        let o = C64::new(0.0, 0.0);
        m([[o, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), o]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).expect("2x2")
    }

    pub fn all() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i4 = kron(&pauli::identity(), &pauli::identity()).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4).unwrap());
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        assert_eq!(
            zz,
            ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn kron_sigma_y_is_antidiagonal() {
        let yy = kron(&pauli::y(), &pauli::y()).unwrap();
        // top-right to bottom-left: (0,3), (1,2), (2,1), (3,0)
        let expected = [-1.0, 1.0, 1.0, -1.0];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(yy[(k, 3 - k)], c(*e, 0.0));
        }
        for i in 0..4 {
            for j in 0..4 {
                if i + j != 3 {
                    assert_eq!(yy[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn kron_rejects_wrong_dimension() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert_eq!(
            kron(&i4, &pauli::x()),
            Err(Error::InvalidDimension {
                expected: 2,
                got: 4
            })
        );
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let mixed = ComplexMatrix::identity(4).unwrap().scale(0.25);
        let half = ComplexMatrix::identity(2).unwrap().scale(0.5);
        for keep in [Subsystem::A, Subsystem::B] {
            assert!(partial_trace(&mixed, keep).unwrap().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_keeps_the_right_factor() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.7, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.3, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_real_diagonal(&[0.9, 0.1]).unwrap();
        let ab = kron(&a, &b).unwrap();
        assert!(partial_trace(&ab, Subsystem::A).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, Subsystem::B).unwrap().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn eigenvalues_of_diagonal_and_pauli() {
        let d = ComplexMatrix::from_real_diagonal(&[0.2, 0.4, 0.1, 0.3]).unwrap();
        let ev = hermitian_eigenvalues(&d).unwrap();
        assert_eq!(ev, vec![0.4, 0.3, 0.2, 0.1]);

        let ev = hermitian_eigenvalues(&pauli::x()).unwrap();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigen_decomposition_reconstructs_input() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.3, 0.4), c(-0.2, 0.1), c(0.0, 0.5)],
            vec![c(0.3, -0.4), c(-0.5, 0.0), c(0.7, 0.0), c(0.1, -0.1)],
            vec![c(-0.2, -0.1), c(0.7, 0.0), c(0.25, 0.0), c(0.0, 0.3)],
            vec![c(0.0, -0.5), c(0.1, 0.1), c(0.0, -0.3), c(2.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.apply(|x| x).max_abs_diff(&h) < 1e-13);
        // eigenvectors are orthonormal
        let vv = e.vectors.adjoint() * e.vectors;
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(4).unwrap()) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = ComplexMatrix::identity(2).unwrap();
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn degenerate_spectrum() {
        // Werner p = 0.5: p|Ψ⁻⟩⟨Ψ⁻| + (1 − p)I/4
        let s = 0.5f64.sqrt();
        let psi = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        let proj = ComplexMatrix::outer(&psi).unwrap();
        let w = &proj.scale(0.5) + &ComplexMatrix::identity(4).unwrap().scale(0.125);
        let ev = hermitian_eigenvalues(&w).unwrap();
        for (got, want) in ev.iter().zip([0.625, 0.125, 0.125, 0.125]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn purity_examples() {
        let mixed = ComplexMatrix::identity(4).unwrap().scale(0.25);
        assert_abs_diff_eq!(purity(&mixed), 0.25, epsilon = 1e-15);
        let s = 0.5f64.sqrt();
        let proj = ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, s)]).unwrap();
        assert_abs_diff_eq!(purity(&proj), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn frobenius_matches_trace_form() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.1)],
            vec![c(0.0, -3.0), c(0.25, 0.0)],
        ])
        .unwrap();
        let tr = (m.adjoint() * m).trace();
        assert_abs_diff_eq!(m.frobenius_norm(), tr.re.sqrt(), epsilon = 1e-12);
    }
}
