//! Dense matrices over a [`Scalar`] backend and the symmetric/skew pair type.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::elim;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix with value semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Square of even size `2m`; returns `m`.
    pub fn require_even_square(&self) -> Result<usize> {
        let n = self.require_square()?;
        if n % 2 == 1 {
            return Err(Error::OddSize(n));
        }
        Ok(n / 2)
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience for literals in tests and constructors.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                T::zero()
            }
        })
    }

    /// Column vector.
    pub fn column_vector(entries: Vec<T>) -> Self {
        let n = entries.len();
        Matrix {
            rows: n,
            cols: 1,
            data: entries,
        }
    }

    /// The standard skew form `[[0, I_m], [-I_m, 0]]` of size `2m`.
    pub fn omega(m: usize) -> Self {
        Self::from_fn(2 * m, 2 * m, |i, j| {
            if j == i + m && i < m {
                T::one()
            } else if i == j + m && j < m {
                -T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(r0 + i, c0 + j)].clone()
        })
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn remove_row_col(&self, row: usize, col: usize) -> Self {
        Self::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let ii = if i >= row { i + 1 } else { i };
            let jj = if j >= col { j + 1 } else { j };
            self[(ii, jj)].clone()
        })
    }

    pub fn hstack(blocks: &[&Matrix<T>]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.cols;
        }
        Ok(out)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn try_mul(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    let slot = &mut out[(i, j)];
                    *slot = slot.clone() + prod;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Matrix<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a.clone(), b.clone()))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn try_add(&self, other: &Matrix<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Matrix<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self - s*I`.
    pub fn shift(&self, s: &T) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] = out[(i, i)].clone() - s.clone();
        }
        out
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let n = self.require_square()?;
        let mut result = Self::identity(n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.magnitude().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Entrywise `scalar_eq` on exact backends; on floats the allowed
    /// deviation is `eps * (1 + max(|entries|))`.
    pub fn approx_eq(&self, other: &Matrix<T>) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        if T::is_exact() {
            return self == other;
        }
        let scale = 1.0 + self.max_abs().max(other.max_abs());
        let tol = crate::scalar::tolerance() * scale;
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a.clone() - b.clone()).magnitude() <= tol)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.approx_eq(&self.transpose())
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.is_square() && self.approx_eq(&-self.transpose())
    }

    pub fn require_symmetric(&self) -> Result<()> {
        self.require_square()?;
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::NotSymmetric)
        }
    }

    pub fn det(&self) -> Result<T> {
        self.require_square()?;
        Ok(elim::det(self))
    }

    pub fn rank(&self) -> usize {
        T::rank_of(self)
    }

    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        elim::inverse(self)
    }

    /// Block-diagonal matrix from square or rectangular blocks.
    pub fn direct_sum(blocks: &[Matrix<T>]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Quadrant-wise direct sum of `2n_i x 2n_i` matrices: each quadrant of
    /// the result is the direct sum of the corresponding quadrants.
    pub fn block_direct_sum(blocks: &[Matrix<T>]) -> Result<Self> {
        let halves = blocks
            .iter()
            .map(Matrix::require_even_square)
            .collect::<Result<Vec<_>>>()?;
        let m: usize = halves.iter().sum();
        let mut out = Self::zeros(2 * m, 2 * m);
        let mut off = 0;
        for (b, &h) in blocks.iter().zip(&halves) {
            for i in 0..2 * h {
                for j in 0..2 * h {
                    let oi = if i < h { off + i } else { m + off + i - h };
                    let oj = if j < h { off + j } else { m + off + j - h };
                    out[(oi, oj)] = b[(i, j)].clone();
                }
            }
            off += h;
        }
        Ok(out)
    }

    /// `S^T M S`.
    pub fn congruent(&self, s: &Matrix<T>) -> Result<Self> {
        s.transpose().try_mul(&self.try_mul(s)?)
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix sum dimensions")
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Scalar> Neg for Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        -&self
    }
}

/// A symmetric `A` together with a nonsingular skew-symmetric `B` of the same even size.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPair<T> {
    a: Matrix<T>,
    b: Matrix<T>,
}

impl<T: Scalar> MatrixPair<T> {
    pub fn new(a: Matrix<T>, b: Matrix<T>) -> Result<Self> {
        let n = a.require_square()?;
        let nb = b.require_square()?;
        if n != nb {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n}, B is {nb}x{nb}"
            )));
        }
        a.require_even_square()?;
        if !a.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !b.is_skew_symmetric() {
            return Err(Error::NotSkewSymmetric);
        }
        if !b.is_nonsingular() {
            return Err(Error::Singular);
        }
        Ok(MatrixPair { a, b })
    }

    /// `(A, Omega_m)`.
    pub fn with_omega(a: Matrix<T>) -> Result<Self> {
        let m = a.require_even_square()?;
        Self::new(a, Matrix::omega(m))
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn into_parts(self) -> (Matrix<T>, Matrix<T>) {
        (self.a, self.b)
    }

    pub fn direct_sum(pairs: &[MatrixPair<T>]) -> Self {
        let a = Matrix::direct_sum(&pairs.iter().map(|p| p.a.clone()).collect::<Vec<_>>());
        let b = Matrix::direct_sum(&pairs.iter().map(|p| p.b.clone()).collect::<Vec<_>>());
        MatrixPair { a, b }
    }
}

/// `(S^T A S, S^T B S)` for nonsingular `S`.
pub fn congruence<T: Scalar>(s: &Matrix<T>, pair: &MatrixPair<T>) -> Result<MatrixPair<T>> {
    let n = s.require_square()?;
    if n != pair.size() {
        return Err(Error::DimensionMismatch(format!(
            "transform is {n}x{n}, pair has size {}",
            pair.size()
        )));
    }
    if !s.is_nonsingular() {
        return Err(Error::Singular);
    }
    let a = pair.a.congruent(s)?;
    let b = pair.b.congruent(s)?;
    if T::is_exact() {
        return Ok(MatrixPair { a, b });
    }
    // Round-off can leave tiny asymmetries; restore exact structure.
    let half = T::from_rational(&crate::scalar::rat(1, 2));
    let a = Matrix::from_fn(n, n, |i, j| {
        (a[(i, j)].clone() + a[(j, i)].clone()) * half.clone()
    });
    let b = Matrix::from_fn(n, n, |i, j| {
        (b[(i, j)].clone() - b[(j, i)].clone()) * half.clone()
    });
    Ok(MatrixPair { a, b })
}

/// Rearranges `(M_1, Omega_{n_1}) (+) ... (+) (M_k, Omega_{n_k})` into
/// `(M_1 [+] ... [+] M_k, Omega_{n_1+...+n_k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rearranged<T> {
    pub pair: MatrixPair<T>,
    /// Permutation matrix `P` with `P^T (direct sum) P = pair`.
    pub permutation: Matrix<T>,
}

pub fn permutation_congruent_rearrange<T: Scalar>(
    pairs: &[MatrixPair<T>],
) -> Result<Rearranged<T>> {
    let mut halves = Vec::with_capacity(pairs.len());
    for p in pairs {
        let h = p.size() / 2;
        if !p.b.approx_eq(&Matrix::omega(h)) {
            return Err(Error::InvalidArgument(
                "B-part of a summand is not Omega".into(),
            ));
        }
        halves.push(h);
    }
    let m: usize = halves.iter().sum();
    // source index (in the plain direct sum) of each target position
    let mut source = vec![0usize; 2 * m];
    let (mut off_direct, mut off_half) = (0, 0);
    for &h in &halves {
        for p in 0..h {
            source[off_half + p] = off_direct + p;
            source[m + off_half + p] = off_direct + h + p;
        }
        off_direct += 2 * h;
        off_half += h;
    }
    let permutation = Matrix::from_fn(2 * m, 2 * m, |i, j| {
        if source[j] == i {
            T::one()
        } else {
            T::zero()
        }
    });
    let a = Matrix::block_direct_sum(&pairs.iter().map(|p| p.a.clone()).collect::<Vec<_>>())?;
    let b = Matrix::omega(m);
    Ok(Rearranged {
        pair: MatrixPair { a, b },
        permutation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    type Q = Rational;

    #[test]
    fn omega_squares_to_minus_identity() {
        for m in 1..5 {
            let w = Matrix::<Q>::omega(m);
            assert_eq!(&w * &w, -Matrix::identity(2 * m));
            assert!(w.is_skew_symmetric());
        }
    }

    #[test]
    fn block_direct_sum_of_omegas_is_omega() {
        let s = Matrix::<Q>::block_direct_sum(&[Matrix::omega(2), Matrix::omega(3)]).unwrap();
        assert_eq!(s, Matrix::omega(5));
        let ones = vec![Matrix::<Q>::omega(1); 4];
        assert_eq!(Matrix::block_direct_sum(&ones).unwrap(), Matrix::omega(4));
        let single = Matrix::<Q>::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(
            Matrix::block_direct_sum(std::slice::from_ref(&single)).unwrap(),
            single
        );
        let odd = Matrix::<Q>::identity(3);
        assert!(matches!(
            Matrix::block_direct_sum(&[odd]),
            Err(Error::OddSize(3))
        ));
    }

    #[test]
    fn direct_sum_small_cases() {
        let i1 = Matrix::<Q>::identity(1);
        let i2 = Matrix::<Q>::identity(2);
        assert_eq!(Matrix::direct_sum(&[i1, i2]), Matrix::identity(3));
        let j = Matrix::<Q>::zeros(1, 1);
        assert_eq!(Matrix::direct_sum(std::slice::from_ref(&j)), j);
    }

    #[test]
    fn congruence_examples() {
        let pair = MatrixPair::with_omega(Matrix::<f64>::diagonal(&[1.0, 4.0])).unwrap();
        let s = Matrix::diagonal(&[2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        let out = congruence(&s, &pair).unwrap();
        assert!(out.a().approx_eq(&Matrix::diagonal(&[2.0, 2.0])));
        assert!(out.b().approx_eq(&Matrix::omega(1)));

        let a = Matrix::<Q>::from_i64_rows(&[&[1, 2], &[2, 5]]);
        let pair = MatrixPair::with_omega(a.clone()).unwrap();
        assert_eq!(congruence(&Matrix::identity(2), &pair).unwrap(), pair);
        let two = Matrix::identity(2).scale(&rat(2, 1));
        let out = congruence(&two, &pair).unwrap();
        assert_eq!(out.a(), &a.scale(&rat(4, 1)));
        assert_eq!(out.b(), &Matrix::omega(1).scale(&rat(4, 1)));
    }

    #[test]
    fn congruence_rejects_singular_and_mismatched() {
        let pair = MatrixPair::with_omega(Matrix::<Q>::identity(2)).unwrap();
        assert_eq!(
            congruence(&Matrix::zeros(2, 2), &pair),
            Err(Error::Singular)
        );
        assert!(matches!(
            congruence(&Matrix::identity(4), &pair),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pair_validation() {
        let a = Matrix::<Q>::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(MatrixPair::with_omega(a), Err(Error::NotSymmetric));
        let b = Matrix::<Q>::zeros(2, 2);
        assert_eq!(
            MatrixPair::new(Matrix::identity(2), b),
            Err(Error::Singular)
        );
        let b = Matrix::<Q>::identity(2);
        assert_eq!(
            MatrixPair::new(Matrix::identity(2), b),
            Err(Error::NotSkewSymmetric)
        );
        assert_eq!(
            MatrixPair::with_omega(Matrix::<Q>::identity(3)),
            Err(Error::OddSize(3))
        );
    }

    #[test]
    fn rearrangement_permutation_maps_direct_sum_to_block_direct_sum() {
        let p1 = MatrixPair::with_omega(Matrix::<Q>::diagonal(&[rat(1, 1), rat(0, 1)])).unwrap();
        let r = permutation_congruent_rearrange(&[p1.clone(), p1.clone()]).unwrap();
        let plain = MatrixPair::direct_sum(&[p1.clone(), p1.clone()]);
        assert_eq!(
            plain.b().congruent(&r.permutation).unwrap(),
            Matrix::omega(2)
        );
        assert_eq!(plain.a().congruent(&r.permutation).unwrap(), *r.pair.a());
        assert_eq!(
            *r.pair.a(),
            Matrix::block_direct_sum(&[p1.a().clone(), p1.a().clone()]).unwrap()
        );

        let single = permutation_congruent_rearrange(std::slice::from_ref(&p1)).unwrap();
        assert_eq!(single.pair, p1);
        assert_eq!(single.permutation, Matrix::identity(2));

        let bad =
            MatrixPair::new(Matrix::<Q>::identity(2), Matrix::omega(1).scale(&rat(2, 1))).unwrap();
        assert!(permutation_congruent_rearrange(&[bad]).is_err());
    }
}
