//! Executable battery of the structural identities behind the `P_n` and
//! `Q_n(c)` summands, run in exact arithmetic.

use num_traits::{One, Zero};

use crate::blocks::{
    companion_bidiagonal, jordan, p_block, q_block, q_prime_block, r_matrix, remark_similarity,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::{char_poly, Polynomial};
use crate::scalar::{rat, ComplexScalar, Gaussian, Rational};

/// Largest accepted size bound.
pub const MAX_BOUND: usize = 10;

/// Identity names as they appear in reports.
pub mod names {
    pub const CHAR_POLY_Q: &str = "char_poly(Omega_n Q_n(c)) = (x^2 + c^2)^n";
    pub const RANK_P: &str = "rank(-Omega_n P_n) = 2n - 1";
    pub const NILPOTENT_P: &str = "(-Omega_n P_n)^(2n) = 0";
    pub const SQUARE_P: &str = "-(-Omega_n P_n)^2 = J_n(0)^T (+) J_n(0)";
    pub const RANK_Q: &str = "rank(ci I - Omega_n Q_n(c)) = 2n - 1";
    pub const DET_R: &str = "det R_n = ci (2ci)^(n-1)";
    pub const REMARK: &str = "S^-1 Omega_n Q'_n(c) S = J_n(ci)^P for odd n";
}

/// The parameters `c` every `Q_n(c)` identity is checked at.
pub fn c_values() -> Vec<Rational> {
    vec![rat(1, 1), rat(2, 1), rat(1, 3)]
}

/// Block constructors under test. Replacing one with a faulty version must
/// make the identities that depend on it fail.
#[derive(Clone, Copy)]
pub struct Constructors {
    pub p: fn(usize) -> Matrix<Rational>,
    pub q: fn(usize, &Rational) -> Matrix<Rational>,
}

impl Default for Constructors {
    fn default() -> Self {
        Constructors {
            p: p_block::<Rational>,
            q: q_block::<Rational>,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub n: usize,
    pub c: Option<Rational>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub bound: usize,
    pub checks: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Distinct identities with at least one failing case, in check order.
    pub fn failing_identities(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for c in self.failures() {
            if !out.contains(&c.identity) {
                out.push(c.identity);
            }
        }
        out
    }
}

pub fn verify_suite(bound: usize) -> Result<VerifyReport> {
    verify_suite_with(bound, &Constructors::default())
}

pub fn verify_suite_with(bound: usize, ctor: &Constructors) -> Result<VerifyReport> {
    if bound == 0 || bound > MAX_BOUND {
        return Err(Error::InvalidArgument(format!(
            "size bound must lie in 1..={MAX_BOUND}, got {bound}"
        )));
    }
    let mut checks = Vec::new();
    let mut record = |identity, n, c: Option<&Rational>, passed: Result<bool>| {
        checks.push(IdentityCheck {
            identity,
            n,
            c: c.cloned(),
            passed: passed.unwrap_or(false),
        });
    };
    for n in 1..=bound {
        let omega = Matrix::<Rational>::omega(n);
        let h = -(&omega * &(ctor.p)(n));
        record(names::RANK_P, n, None, Ok(h.rank() == 2 * n - 1));
        record(
            names::NILPOTENT_P,
            n,
            None,
            h.pow(2 * n as u32).map(|m| m.is_zero_matrix()),
        );
        record(names::SQUARE_P, n, None, square_identity(&h, n));
        for c in c_values() {
            let q = (ctor.q)(n, &c);
            record(
                names::CHAR_POLY_Q,
                n,
                Some(&c),
                char_poly_identity(&(&omega * &q), &c, n),
            );
            record(names::RANK_Q, n, Some(&c), Ok(rank_at_ci(&q, &c, n)));
            if n % 2 == 1 {
                record(
                    names::DET_R,
                    n,
                    Some(&c),
                    det_r_matches(n, &c, corrected_det_r(n, &c)),
                );
                record(names::REMARK, n, Some(&c), remark_identity(n, &c));
            }
        }
    }
    Ok(VerifyReport { bound, checks })
}

fn square_identity(h: &Matrix<Rational>, n: usize) -> Result<bool> {
    let j = jordan(n, &Rational::zero());
    Ok(-h.pow(2)? == Matrix::direct_sum(&[j.transpose(), j]))
}

fn char_poly_identity(m: &Matrix<Rational>, c: &Rational, n: usize) -> Result<bool> {
    let base = Polynomial::new(vec![
        c.clone() * c.clone(),
        Rational::zero(),
        Rational::one(),
    ]);
    Ok(char_poly(m)? == base.pow(n as u32))
}

fn lift(m: &Matrix<Rational>) -> Matrix<Gaussian> {
    m.map(|x| Gaussian::from_real(x.clone()))
}

fn rank_at_ci(q: &Matrix<Rational>, c: &Rational, n: usize) -> bool {
    let h = lift(&(&Matrix::omega(n) * q));
    let ci = Gaussian::new(Rational::zero(), c.clone());
    let t = &Matrix::identity(2 * n).scale(&ci) - &h;
    t.rank() == 2 * n - 1
}

/// `(2ci)^(n-1)`.
pub fn two_ci_power(n: usize, c: &Rational) -> Gaussian {
    let two_ci = Gaussian::new(Rational::zero(), rat(2, 1) * c.clone());
    (1..n).fold(Gaussian::one(), |acc, _| acc * two_ci.clone())
}

/// `ci (2ci)^(n-1)`, the value the deleted-row/column matrix actually has.
pub fn corrected_det_r(n: usize, c: &Rational) -> Gaussian {
    Gaussian::new(Rational::zero(), c.clone()) * two_ci_power(n, c)
}

/// Whether `det R_n` equals `expected`.
pub fn det_r_matches(n: usize, c: &Rational, expected: Gaussian) -> Result<bool> {
    Ok(r_matrix::<Gaussian>(n, c).det()? == expected)
}

fn remark_identity(n: usize, c: &Rational) -> Result<bool> {
    let s = remark_similarity::<Rational>(n);
    let lhs = &(&s.inverse()? * &Matrix::omega(n)) * &(&q_prime_block(n, c) * &s);
    Ok(lhs == companion_bidiagonal(n, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tampered_p(n: usize) -> Matrix<Rational> {
        let mut m = p_block::<Rational>(n);
        m[(2 * n - 1, n)] = Rational::one();
        m
    }

    #[test]
    fn all_identities_hold_up_to_three() {
        let report = verify_suite(3).unwrap();
        assert!(report.all_passed(), "{:?}", report.failing_identities());
        assert!(report
            .checks
            .iter()
            .any(|c| c.identity == names::REMARK && c.n == 3));
    }

    #[test]
    fn degenerate_sizes() {
        let report = verify_suite(1).unwrap();
        assert!(report.all_passed());
        assert_eq!(
            report.checks.iter().filter(|c| c.n == 1).count(),
            report.checks.len()
        );
    }

    #[test]
    fn tampered_p_is_caught_by_the_rank_identity() {
        let ctor = Constructors {
            p: tampered_p,
            ..Constructors::default()
        };
        let report = verify_suite_with(2, &ctor).unwrap();
        assert!(!report.all_passed());
        assert_eq!(report.failing_identities()[0], names::RANK_P);
    }

    #[test]
    fn closed_form_without_the_leading_factor_disagrees() {
        for n in [1usize, 3, 5, 7] {
            for c in c_values() {
                assert!(!det_r_matches(n, &c, two_ci_power(n, &c)).unwrap());
                assert!(det_r_matches(n, &c, corrected_det_r(n, &c)).unwrap());
            }
        }
    }

    #[test]
    fn bound_is_checked() {
        assert!(verify_suite(0).is_err());
        assert!(verify_suite(MAX_BOUND + 1).is_err());
    }
}
