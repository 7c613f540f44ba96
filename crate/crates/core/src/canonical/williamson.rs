use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{real_from_na, real_to_na};
use crate::scalar::{tolerance, RealScalar};

/// Positive definiteness by symmetric elimination with diagonal pivoting.
/// Floating pivots must exceed `eps * trace(A) / 2n`.
pub fn is_positive_definite<T: RealScalar>(a: &Matrix<T>) -> Result<bool> {
    let n = a.require_square()?;
    a.require_symmetric()?;
    if n == 0 {
        return Ok(true);
    }
    let threshold = tolerance() * a.trace().to_f64() / n as f64;
    let positive = |x: &T| {
        if T::is_exact() {
            *x > T::zero()
        } else {
            x.to_f64() > threshold
        }
    };
    let mut m = a.clone();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| {
                m[(x, x)]
                    .partial_cmp(&m[(y, y)])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty range");
        if !positive(&m[(p, p)]) {
            return Ok(false);
        }
        if p != k {
            for j in 0..n {
                let t = m[(p, j)].clone();
                m[(p, j)] = m[(k, j)].clone();
                m[(k, j)] = t;
            }
            for i in 0..n {
                let t = m[(i, p)].clone();
                m[(i, p)] = m[(i, k)].clone();
                m[(i, k)] = t;
            }
        }
        let d = m[(k, k)].clone();
        for i in k + 1..n {
            let f = m[(i, k)].clone() / d.clone();
            for j in k + 1..n {
                m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(k, j)].clone();
            }
        }
    }
    Ok(true)
}

/// Symplectic `S` with `S^T A S = D (+) D`.
#[derive(Debug, Clone)]
pub struct Williamson {
    /// Symplectic eigenvalues, descending.
    pub alphas: Vec<f64>,
    pub s: Matrix<f64>,
    /// `||S^T A S - D (+) D||_F`.
    pub residual_form: f64,
    /// `||S^T Omega S - Omega||_F`.
    pub residual_symplectic: f64,
}

impl Williamson {
    pub fn d(&self) -> Matrix<f64> {
        Matrix::diagonal(&self.alphas)
    }

    pub fn diagonal_form(&self) -> Matrix<f64> {
        Matrix::direct_sum(&[self.d(), self.d()])
    }
}

/// Williamson normal form of a real positive definite matrix.
///
/// With `K = A^{-1/2} Omega A^{-1/2}` skew-symmetric, an orthogonal real
/// Schur basis pairs columns `u_j, v_j` with `u_j^T K v_j = beta_j > 0`, and
/// `S = A^{-1/2} [u, v] (D^{1/2} (+) D^{1/2})` with `D = diag(1 / beta_j)`.
/// The Schur form is taken with coordinates `i` and `m + i` adjacent, so an
/// input already of the form `D (+) D` gets `S = I`.
pub fn williamson(a: &Matrix<f64>) -> Result<Williamson> {
    let m = a.require_even_square()?;
    if !is_positive_definite(a)? {
        return Err(Error::NotPositiveDefinite);
    }
    let n = 2 * m;
    let na = real_to_na(a);
    let sym = (&na + na.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let inv_sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let inv_sqrt = &eig.eigenvectors * inv_sqrt_diag * eig.eigenvectors.transpose();
    let omega = real_to_na(&Matrix::omega(m));
    let k = &inv_sqrt * &omega * &inv_sqrt;
    let k = (&k - k.transpose()) * 0.5;
    let interleave = DMatrix::from_fn(
        n,
        n,
        |i, j| if i == (j / 2) + (j % 2) * m { 1.0 } else { 0.0 },
    );
    let k = interleave.transpose() * k * &interleave;
    let schur = nalgebra::linalg::Schur::try_new(k.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Indeterminate("real Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let q = &interleave * q;
    let floor = 10.0 * f64::EPSILON * k.norm();
    let mut pairs: Vec<(f64, usize, f64)> = Vec::with_capacity(m);
    let mut j = 0;
    while j < n {
        if j + 1 >= n || t[(j + 1, j)].abs() <= floor {
            return Err(Error::Indeterminate(
                "skew-symmetric Schur form has a real eigenvalue".into(),
            ));
        }
        let beta = (t[(j, j + 1)] - t[(j + 1, j)]) / 2.0;
        pairs.push((beta.abs(), j, beta.signum()));
        j += 2;
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let alphas: Vec<f64> = pairs.iter().map(|p| 1.0 / p.0).collect();
    let mut o = DMatrix::zeros(n, n);
    for (idx, &(beta, u, flip)) in pairs.iter().enumerate() {
        let scale = (1.0 / beta).sqrt();
        o.set_column(idx, &(q.column(u) * scale));
        o.set_column(m + idx, &(q.column(u + 1) * (flip * scale)));
    }
    let s = refine_symplectic(&inv_sqrt * o, &omega);
    let sm = real_from_na(&s);
    let d = Matrix::diagonal(&alphas);
    let dd = Matrix::direct_sum(&[d.clone(), d]);
    let residual_form = (&a.congruent(&sm)? - &dd).frobenius_norm();
    let residual_symplectic =
        (&Matrix::omega(m).congruent(&sm)? - &Matrix::omega(m)).frobenius_norm();
    Ok(Williamson {
        alphas,
        s: sm,
        residual_form,
        residual_symplectic,
    })
}

/// One first-order correction `S (I - E / 2)` with `E = -Omega S^T Omega S - I`,
/// which removes the linear part of the symplecticity defect.
fn refine_symplectic(s: DMatrix<f64>, omega: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let m = s.transpose() * omega * &s;
    let e = -(omega * m) - DMatrix::identity(n, n);
    &s * (DMatrix::identity(n, n) - e * 0.5)
}

/// The symplectic eigenvalues of a real positive definite matrix, descending.
pub fn symplectic_eigenvalues(a: &Matrix<f64>) -> Result<Vec<f64>> {
    Ok(williamson(a)?.alphas)
}
