//! Seeded generators for test inputs: symplectic and nonsingular transforms,
//! positive definite matrices and random canonical summand lists.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::canonical::{Phi, Summand};
use crate::matrix::Matrix;
use crate::scalar::{rat, ComplexScalar, Gaussian, Rational, Scalar};

pub use rand::SeedableRng;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

const FINE: i64 = 1 << 20;

/// Entry in `[-1, 1]`: quarters on exact backends, a fine grid otherwise.
fn unit_entry<T: Scalar>(rng: &mut Rng64) -> T {
    if T::is_exact() {
        T::from_rational(&rat(rng.random_range(-4..=4), 4))
    } else {
        T::from_rational(&rat(rng.random_range(-FINE..=FINE), FINE))
    }
}

pub fn random_matrix<T: Scalar>(rng: &mut Rng64, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| unit_entry(rng))
}

/// Complex entries with real and imaginary parts in `[-1, 1]`.
pub fn random_complex_matrix<E: ComplexScalar>(
    rng: &mut Rng64,
    rows: usize,
    cols: usize,
) -> Matrix<E> {
    Matrix::from_fn(rows, cols, |_, _| {
        E::from_parts(unit_entry(rng), unit_entry(rng))
    })
}

pub fn random_symmetric<T: Scalar>(rng: &mut Rng64, n: usize) -> Matrix<T> {
    let m: Matrix<T> = random_matrix(rng, n, n);
    Matrix::from_fn(n, n, |i, j| {
        if i <= j {
            m[(i, j)].clone()
        } else {
            m[(j, i)].clone()
        }
    })
}

/// Unit lower triangular times unit upper triangular, so the determinant is 1.
pub fn random_unimodular<T: Scalar>(rng: &mut Rng64, n: usize) -> Matrix<T> {
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => unit_entry(rng),
        std::cmp::Ordering::Equal => T::one(),
        std::cmp::Ordering::Less => T::zero(),
    });
    let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => unit_entry(rng),
        std::cmp::Ordering::Equal => T::one(),
        std::cmp::Ordering::Greater => T::zero(),
    });
    &l * &u
}

/// Random symplectic matrices as products of elementary factors
/// `[[I, K], [0, I]]`, `[[I, 0], [K, I]]` and `[[U, 0], [0, U^{-T}]]`, where
/// `K` is symmetric with a single nonzero entry pair in `[-1, 1]` and `U` is
/// a transvection `I + t e_i e_j^T` with `t` in `[-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct SymplecticSampler {
    /// Number of elementary factors.
    pub factors: usize,
    /// Redraw while `||S||_max * ||S^{-1}||_max` exceeds this bound.
    pub max_condition: f64,
}

impl Default for SymplecticSampler {
    fn default() -> Self {
        SymplecticSampler {
            factors: 20,
            max_condition: 1e3,
        }
    }
}

/// Nonzero entry in `[-1, 1]`.
fn nonzero_entry<T: Scalar>(rng: &mut Rng64) -> T {
    loop {
        let x: T = unit_entry(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

impl SymplecticSampler {
    fn factor<T: Scalar>(&self, rng: &mut Rng64, m: usize) -> Matrix<T> {
        let mut e = Matrix::identity(2 * m);
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        let t: T = nonzero_entry(rng);
        match rng.random_range(0..3) {
            0 => {
                e[(i, m + j)] = t.clone();
                e[(j, m + i)] = t;
            }
            1 => {
                e[(m + i, j)] = t.clone();
                e[(m + j, i)] = t;
            }
            _ if i != j => {
                // U = I + t e_i e_j^T and U^{-T} = I - t e_j e_i^T
                e[(i, j)] = t.clone();
                e[(m + j, m + i)] = -t;
            }
            _ => {
                e[(i, i)] = t.clone();
                e[(m + i, m + i)] = T::one() / t;
            }
        }
        e
    }

    pub fn sample<T: Scalar>(&self, rng: &mut Rng64, m: usize) -> Matrix<T> {
        let omega = Matrix::<T>::omega(m);
        let mut best: Option<(f64, Matrix<T>)> = None;
        for _ in 0..64 {
            let s = (0..self.factors).fold(Matrix::identity(2 * m), |acc, _| {
                &acc * &self.factor(rng, m)
            });
            let inverse = -(&(&omega * &s.transpose()) * &omega);
            let cond = s.max_abs() * inverse.max_abs();
            if cond <= self.max_condition {
                return s;
            }
            if best.as_ref().is_none_or(|(c, _)| cond < *c) {
                best = Some((cond, s));
            }
        }
        best.expect("at least one draw").1
    }
}

/// Random symplectic matrix of size `2m` with the default sampler.
pub fn random_symplectic<T: Scalar>(rng: &mut Rng64, m: usize) -> Matrix<T> {
    SymplecticSampler::default().sample(rng, m)
}

/// `R^T R` with `R` uniform in `[-1, 1]`, redrawn until positive definite.
pub fn random_spd(rng: &mut Rng64, n: usize) -> Matrix<f64> {
    loop {
        let r: Matrix<f64> = random_matrix(rng, n, n);
        let a = &r.transpose() * &r;
        if crate::canonical::is_positive_definite(&a).unwrap_or(false) {
            return a;
        }
    }
}

const PARAMS: [(i64, i64); 4] = [(1, 2), (1, 1), (2, 1), (3, 1)];

fn param(rng: &mut Rng64) -> Rational {
    let &(p, q) = PARAMS.choose(rng).expect("nonempty");
    rat(p, q)
}

fn sign(rng: &mut Rng64) -> i8 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// Between 1 and `max_count` summands of the real list with `n <= max_n`
/// and parameters from `{1/2, 1, 2, 3}`.
pub fn random_real_summands(
    rng: &mut Rng64,
    max_count: usize,
    max_n: usize,
) -> Vec<Summand<Rational>> {
    let count = rng.random_range(1..=max_count);
    (0..count)
        .map(|_| loop {
            let n = rng.random_range(1..=max_n);
            match rng.random_range(0..5) {
                0 => {
                    return Summand::Hyperbolic {
                        n,
                        phi: Phi::Jordan { a: param(rng) },
                    }
                }
                1 if n % 2 == 1 => {
                    return Summand::Hyperbolic {
                        n,
                        phi: Phi::Jordan { a: rat(0, 1) },
                    }
                }
                2 if n % 2 == 0 => {
                    return Summand::Hyperbolic {
                        n,
                        phi: Phi::Realified {
                            a: param(rng),
                            b: param(rng),
                        },
                    };
                }
                3 => return Summand::P { n, sign: sign(rng) },
                4 => {
                    return Summand::Q {
                        n,
                        sign: sign(rng),
                        c: param(rng),
                    }
                }
                _ => continue,
            }
        })
        .collect()
}

/// Between 1 and `max_count` summands of the complex list: `J_n(a)` with `a`
/// a real or imaginary multiple of `{1/2, 1, 2, 3}` of either sign or
/// `a = 0` for odd `n`, and `P_n`.
pub fn random_complex_summands(
    rng: &mut Rng64,
    max_count: usize,
    max_n: usize,
) -> Vec<Summand<Gaussian>> {
    let count = rng.random_range(1..=max_count);
    (0..count)
        .map(|_| loop {
            let n = rng.random_range(1..=max_n);
            match rng.random_range(0..3) {
                0 => {
                    let p = param(rng) * rat(sign(rng) as i64, 1);
                    let a = match rng.random_range(0..3) {
                        0 => Gaussian::new(p, rat(0, 1)),
                        1 => Gaussian::new(rat(0, 1), p),
                        _ => Gaussian::new(p.clone(), param(rng)),
                    };
                    return Summand::Hyperbolic {
                        n,
                        phi: Phi::Jordan { a },
                    };
                }
                1 if n % 2 == 1 => {
                    return Summand::Hyperbolic {
                        n,
                        phi: Phi::Jordan {
                            a: Gaussian::new(rat(0, 1), rat(0, 1)),
                        },
                    };
                }
                2 => return Summand::P { n, sign: 1 },
                _ => continue,
            }
        })
        .collect()
}

/// `A` assembled as the block-direct sum of the symmetric summand blocks.
pub fn assemble<S: Scalar>(summands: &[Summand<S>]) -> Matrix<S> {
    let blocks: Vec<Matrix<S>> = summands.iter().map(Summand::symmetric_block).collect();
    Matrix::block_direct_sum(&blocks).expect("summand blocks have even size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::is_symplectic;

    #[test]
    fn symplectic_samples() {
        let mut r = rng(1);
        for m in 1..5 {
            let s: Matrix<Rational> = random_symplectic(&mut r, m);
            assert!(is_symplectic(&s).unwrap());
            let f: Matrix<f64> = random_symplectic(&mut r, m);
            assert!(is_symplectic(&f).unwrap());
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a: Matrix<f64> = random_symplectic(&mut rng(7), 3);
        let b: Matrix<f64> = random_symplectic(&mut rng(7), 3);
        assert_eq!(a, b);
        assert_eq!(
            random_real_summands(&mut rng(3), 6, 3),
            random_real_summands(&mut rng(3), 6, 3)
        );
    }

    #[test]
    fn summands_follow_the_lists() {
        let mut r = rng(2);
        for _ in 0..50 {
            for s in random_real_summands(&mut r, 6, 3) {
                match &s {
                    Summand::Hyperbolic {
                        n,
                        phi: Phi::Jordan { a },
                    } => assert!(*a > rat(0, 1) || n % 2 == 1),
                    Summand::Hyperbolic { n, .. } => assert_eq!(n % 2, 0),
                    _ => {}
                }
            }
            let v = random_complex_summands(&mut r, 6, 3);
            assert!(!v.is_empty() && v.len() <= 6);
        }
        let a = assemble(&random_real_summands(&mut r, 4, 3));
        assert!(a.is_symmetric());
    }

    #[test]
    fn spd_samples() {
        let mut r = rng(4);
        let a = random_spd(&mut r, 6);
        assert!(a.is_symmetric());
        assert!(crate::canonical::is_positive_definite(&a).unwrap());
        let u: Matrix<Rational> = random_unimodular(&mut r, 4);
        assert_eq!(u.det().unwrap(), rat(1, 1));
    }
}
