//! Univariate polynomials over a [`Scalar`] backend.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Coefficients in ascending degree; the zero polynomial has no coefficients
/// and the last stored coefficient is never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.approx_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    /// `x - r`.
    pub fn linear_root(r: T) -> Self {
        Self::new(vec![-r, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.scalar_eq(&T::one()))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = T::one() / l.clone();
                Self::new(
                    self.coeffs
                        .iter()
                        .map(|c| c.clone() * inv.clone())
                        .collect(),
                )
            }
        }
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Matrix substitution `p(M)` by Horner's scheme.
    pub fn eval_matrix(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        let n = m.require_square()?;
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(m)?;
            for i in 0..n {
                acc[(i, i)] = acc[(i, i)].clone() + c.clone();
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// True iff every odd-degree coefficient vanishes, i.e. `p` lies in `F[x^2]`.
    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .skip(1)
            .step_by(2)
            .all(|c| c.approx_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::InvalidPolynomial("division by zero polynomial".into()))?;
        let lead = d.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let f = rem.last().expect("nonempty").clone() / lead.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - f.clone() * c.clone();
            }
            quot[k] = f;
            rem.pop();
            while rem.last().is_some_and(|c| c.approx_zero()) {
                rem.pop();
            }
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, made monic: the product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).expect("nonzero gcd").0.monic()
    }

    /// `p(x) * p(-x)` (always even).
    pub fn times_reflection(&self) -> Self {
        self.mul(&self.reflect())
    }
}

/// `det(xI - M)` by Berkowitz's division-free algorithm.
pub fn char_poly<T: Scalar>(m: &Matrix<T>) -> Result<Polynomial<T>> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Polynomial::one());
    }
    // v holds the coefficients of the characteristic polynomial of the
    // leading r x r principal submatrix, highest degree first.
    let mut v: Vec<T> = vec![T::one(), -m[(0, 0)].clone()];
    for r in 1..n {
        // Toeplitz column for step r: [1, -a, -R C, -R A C, ..., -R A^{r-1} C]
        let a = m[(r, r)].clone();
        let row: Vec<T> = (0..r).map(|j| m[(r, j)].clone()).collect();
        let col: Vec<T> = (0..r).map(|i| m[(i, r)].clone()).collect();
        let mut t = vec![T::one(), -a];
        let mut w = col;
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(&w)
                .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            t.push(-dot);
            w = (0..r)
                .map(|i| (0..r).fold(T::zero(), |acc, j| acc + m[(i, j)].clone() * w[j].clone()))
                .collect();
        }
        // new v = T * v, where T is lower-triangular Toeplitz (r+2) x (r+1)
        let mut nv = vec![T::zero(); r + 2];
        for (i, slot) in nv.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if i >= j {
                    *slot = slot.clone() + t[i - j].clone() * vj.clone();
                }
            }
        }
        v = nv;
    }
    v.reverse();
    Ok(Polynomial::new(v))
}
