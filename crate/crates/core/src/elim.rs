//! Gaussian elimination kernels shared by all backends.
//!
//! Exact backends pivot on the first nonzero entry, which keeps results
//! deterministic; floating backends pivot on the entry of largest modulus.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{RealScalar, Scalar};

fn pivot_row<T: Scalar>(m: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    if T::is_exact() {
        (from..m.rows()).find(|&r| !m[(r, col)].is_zero())
    } else {
        let best = (from..m.rows()).max_by(|&a, &b| {
            m[(a, col)]
                .magnitude()
                .partial_cmp(&m[(b, col)].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!m[(best, col)].approx_zero()).then_some(best)
    }
}

fn swap_rows<T: Scalar>(m: &mut Matrix<T>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let tmp = m[(a, j)].clone();
        m[(a, j)] = m[(b, j)].clone();
        m[(b, j)] = tmp;
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut a = m.clone();
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n {
        let Some(p) = pivot_row(&a, k, k) else {
            return T::zero();
        };
        if p != k {
            swap_rows(&mut a, p, k);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a[(i, j)].clone() * a[(k, k)].clone()
                    - a[(i, k)].clone() * a[(k, j)].clone())
                    / prev.clone();
                a[(i, j)] = v;
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    let d = if n == 0 {
        T::one()
    } else {
        a[(n - 1, n - 1)].clone()
    };
    if sign_flip {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form and the list of pivot columns.
pub fn rref<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = pivot_row(&a, c, r) else {
            if !T::is_exact() {
                for i in r..a.rows() {
                    a[(i, c)] = T::zero();
                }
            }
            continue;
        };
        swap_rows(&mut a, p, r);
        let inv = T::one() / a[(r, c)].clone();
        for j in 0..a.cols() {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..a.rows() {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in 0..a.cols() {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    rref(m).1.len()
}

/// Right-kernel basis as matrix columns (one per free column of the RREF).
pub fn nullspace<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(m.cols(), free.len());
    for (k, &f) in free.iter().enumerate() {
        out[(f, k)] = T::one();
        for (row, &pc) in pivots.iter().enumerate() {
            out[(pc, k)] = -r[(row, f)].clone();
        }
    }
    out
}

/// The columns of `m` at its pivot positions.
pub fn column_basis<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let (_, pivots) = rref(m);
    m.select_columns(&pivots)
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.require_square()?;
    let aug = Matrix::hstack(&[m, &Matrix::identity(n)])?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(r.submatrix(0..n, n..2 * n))
}

/// Solve `A X = B` for square nonsingular `A`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} system with {} right-hand rows",
            b.rows()
        )));
    }
    let aug = Matrix::hstack(&[a, b])?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(r.submatrix(0..n, n..n + b.cols()))
}

/// Solve `V X = W` where `V` has full column rank and the columns of `W`
/// lie in its span (least-squares on floating backends is not attempted).
pub fn solve_in_span<T: Scalar>(v: &Matrix<T>, w: &Matrix<T>) -> Result<Matrix<T>> {
    let k = v.cols();
    let aug = Matrix::hstack(&[v, w])?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < k || pivots[..k].iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Singular);
    }
    if pivots.len() > k {
        return Err(Error::InvalidArgument("vectors are not in the span".into()));
    }
    Ok(r.submatrix(0..k, k..k + w.cols()))
}

/// Counts of positive, negative and zero eigenvalues of a Hermitian matrix,
/// computed by congruence diagonalization (exact backends).
pub fn hermitian_inertia<T: HasRealPart>(h: &Matrix<T>) -> (usize, usize, usize) {
    let n = h.rows();
    let mut a = h.clone();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        let piv = match (k..n).find(|&i| !a[(i, i)].is_zero()) {
            Some(p) => p,
            None => {
                // Every remaining diagonal entry vanishes: fold a nonzero
                // off-diagonal entry onto the diagonal.
                let found = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_zero());
                let Some((i, j)) = found else {
                    break;
                };
                let t = if a[(i, j)].real_part_is_zero() {
                    T::i_unit()
                } else {
                    T::one()
                };
                add_multiple(&mut a, i, j, &t);
                i
            }
        };
        swap_sym(&mut a, piv, k);
        let d = a[(k, k)].clone();
        for i in k + 1..n {
            let f = a[(i, k)].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = v;
            }
            for j in k..n {
                let v = a[(j, i)].clone() - a[(j, k)].clone() * f.conj();
                a[(j, i)] = v;
            }
        }
        match d.real_sign() {
            1 => pos += 1,
            -1 => neg += 1,
            _ => {}
        }
    }
    (pos, neg, n - pos - neg)
}

fn swap_sym<T: Scalar>(a: &mut Matrix<T>, p: usize, k: usize) {
    if p == k {
        return;
    }
    swap_rows(a, p, k);
    for i in 0..a.rows() {
        let tmp = a[(i, p)].clone();
        a[(i, p)] = a[(i, k)].clone();
        a[(i, k)] = tmp;
    }
}

/// Hermitian congruence adding `t` times basis vector `j` to basis vector `i`.
/// With zero diagonal the new `(i, i)` entry is `2 Re(t a_ij)`.
fn add_multiple<T: Scalar>(a: &mut Matrix<T>, i: usize, j: usize, t: &T) {
    for c in 0..a.cols() {
        let v = a[(i, c)].clone() + t.conj() * a[(j, c)].clone();
        a[(i, c)] = v;
    }
    for r in 0..a.rows() {
        let v = a[(r, i)].clone() + a[(r, j)].clone() * t.clone();
        a[(r, i)] = v;
    }
}

/// Access to the real part of a (real or complex) scalar, used to read off
/// signs of Hermitian diagonal entries.
pub trait HasRealPart: Scalar {
    fn real_sign(&self) -> i8;
    fn real_part_is_zero(&self) -> bool;
    fn i_unit() -> Self;
}

impl HasRealPart for crate::scalar::Rational {
    fn real_sign(&self) -> i8 {
        RealScalar::sign(self)
    }

    fn real_part_is_zero(&self) -> bool {
        self.is_zero()
    }

    fn i_unit() -> Self {
        Self::one()
    }
}

impl HasRealPart for crate::scalar::Gaussian {
    fn real_sign(&self) -> i8 {
        RealScalar::sign(&self.re)
    }

    fn real_part_is_zero(&self) -> bool {
        self.re.is_zero()
    }

    fn i_unit() -> Self {
        crate::scalar::Gaussian::new(num_traits::Zero::zero(), num_traits::One::one())
    }
}

use num_traits::{One, Zero};
