use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{tolerance, Scalar};
use crate::spectra::mat_vec;

fn form_value<E: Scalar>(form: &Matrix<E>, x: &[E], y: &[E]) -> E {
    let fy = mat_vec(form, y);
    x.iter()
        .zip(&fy)
        .fold(E::zero(), |acc, (p, q)| acc + p.clone() * q.clone())
}

/// Two families of vectors `(e, f)` in dual position.
pub type DualVectors<E> = (Vec<Vec<E>>, Vec<Vec<E>>);

/// Symplectic Gram-Schmidt over the span of the columns of `vectors` for the
/// skew form `x^T form y`, which must be nondegenerate on that span.
///
/// Returns `(e, f)` with `e_i^T form f_j = delta_ij` and all other pairings
/// zero. Exact backends take the first usable pair, floating backends the
/// pair of largest modulus.
pub fn symplectic_basis<E: Scalar>(
    vectors: &Matrix<E>,
    form: &Matrix<E>,
) -> Result<DualVectors<E>> {
    let mut work: Vec<Vec<E>> = (0..vectors.cols()).map(|j| vectors.column(j)).collect();
    if work.len() % 2 == 1 {
        return Err(Error::OddSize(work.len()));
    }
    let mut scale = 0f64;
    for x in &work {
        for y in &work {
            scale = scale.max(form_value(form, x, y).magnitude());
        }
    }
    let threshold = tolerance() * scale.max(f64::MIN_POSITIVE);
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    while !work.is_empty() {
        let mut pick: Option<(usize, usize, E)> = None;
        'scan: for i in 0..work.len() {
            for j in 0..work.len() {
                if i == j {
                    continue;
                }
                let w = form_value(form, &work[i], &work[j]);
                let usable = if E::is_exact() {
                    !w.is_zero()
                } else {
                    w.magnitude() > threshold
                };
                if !usable {
                    continue;
                }
                let better = pick
                    .as_ref()
                    .is_none_or(|(_, _, p)| w.magnitude() > p.magnitude());
                if better {
                    pick = Some((i, j, w));
                    if E::is_exact() {
                        break 'scan;
                    }
                }
            }
        }
        let (i, j, w) = pick.ok_or(Error::Singular)?;
        let e = work[i].clone();
        let inv = E::one() / w;
        let f: Vec<E> = work[j].iter().map(|x| x.clone() * inv.clone()).collect();
        let (hi, lo) = (i.max(j), i.min(j));
        work.remove(hi);
        work.remove(lo);
        for w in work.iter_mut() {
            let ew = form_value(form, &e, w);
            let fw = form_value(form, &f, w);
            for k in 0..w.len() {
                w[k] = w[k].clone() + fw.clone() * e[k].clone() - ew.clone() * f[k].clone();
            }
        }
        es.push(e);
        fs.push(f);
    }
    Ok((es, fs))
}

/// Nonsingular `T` with `T^T B T = Omega_m` for a nonsingular skew-symmetric `B`.
pub fn reduce_skew_to_omega<E: Scalar>(b: &Matrix<E>) -> Result<Matrix<E>> {
    let m = b.require_even_square()?;
    if !b.is_skew_symmetric() {
        return Err(Error::NotSkewSymmetric);
    }
    if !b.is_nonsingular() {
        return Err(Error::Singular);
    }
    let (es, fs) = symplectic_basis(&Matrix::identity(2 * m), b)?;
    let cols: Vec<Vec<E>> = es.into_iter().chain(fs).collect();
    Ok(Matrix::from_fn(2 * m, 2 * m, |i, j| cols[j][i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    type Q = Rational;

    #[test]
    fn omega_reduces_to_identity() {
        for m in 1..4 {
            let w = Matrix::<Q>::omega(m);
            assert_eq!(reduce_skew_to_omega(&w).unwrap(), Matrix::identity(2 * m));
            let wf = Matrix::<f64>::omega(m);
            assert_eq!(reduce_skew_to_omega(&wf).unwrap(), Matrix::identity(2 * m));
        }
    }

    #[test]
    fn doubled_omega() {
        let b = Matrix::<Q>::omega(1).scale(&rat(2, 1));
        let t = reduce_skew_to_omega(&b).unwrap();
        assert_eq!(t, Matrix::diagonal(&[rat(1, 1), rat(1, 2)]));
    }

    #[test]
    fn permuted_and_general_forms() {
        let perm: Matrix<Q> =
            Matrix::from_i64_rows(&[&[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 1, 0, 0]]);
        let b = Matrix::omega(2).congruent(&perm).unwrap();
        let t = reduce_skew_to_omega(&b).unwrap();
        assert_eq!(b.congruent(&t).unwrap(), Matrix::omega(2));
        let g: Matrix<Q> = Matrix::from_i64_rows(&[
            &[0, 3, -1, 2],
            &[-3, 0, 5, 1],
            &[1, -5, 0, 4],
            &[-2, -1, -4, 0],
        ]);
        let t = reduce_skew_to_omega(&g).unwrap();
        assert_eq!(g.congruent(&t).unwrap(), Matrix::omega(2));
        let gf = g.map(crate::scalar::RealScalar::to_f64);
        let tf = reduce_skew_to_omega(&gf).unwrap();
        assert!(gf.congruent(&tf).unwrap().approx_eq(&Matrix::omega(2)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            reduce_skew_to_omega(&Matrix::<Q>::zeros(2, 2)),
            Err(Error::Singular)
        ));
        assert!(matches!(
            reduce_skew_to_omega(&Matrix::<Q>::identity(2)),
            Err(Error::NotSkewSymmetric)
        ));
        assert!(matches!(
            reduce_skew_to_omega(&Matrix::<Q>::zeros(3, 3)),
            Err(Error::OddSize(3))
        ));
    }
}
