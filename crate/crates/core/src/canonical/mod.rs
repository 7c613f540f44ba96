//! Canonical forms of symmetric matrices on a symplectic space.
//!
//! A symmetric `A` paired with `Omega_m` is congruent, through a symplectic
//! transform, to a block-direct sum of summands from one of two lists:
//! hyperbolic summands `[[0, Phi], [Phi^T, 0]]` together with `P_n` over an
//! algebraically closed field, and hyperbolic summands with `+-P_n`,
//! `+-Q_n(c)` over a real closed field. The same lists classify Hamiltonian
//! matrices `H = Omega_m A` under symplectic similarity.

mod classify;
mod reduce;
mod summand;
mod williamson;

use classify::Item;
pub use reduce::{reduce_skew_to_omega, symplectic_basis};
pub use summand::{Phi, Summand, SummandList};
pub use williamson::{is_positive_definite, symplectic_eigenvalues, williamson, Williamson};

use crate::blocks::is_hamiltonian;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixPair};
use crate::scalar::{rat, tolerance, ComplexScalar, Gaussian, Rational, RealScalar, Scalar, C64};
use crate::spectra::{lift_matrix, Spectral};

/// What the assembled canonical matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// A symmetric matrix paired with `Omega`; the certificate `S` satisfies
    /// `S^T A S = canonical` and `S^T B S = Omega`.
    Symmetric,
    /// A Hamiltonian matrix; the certificate is symplectic with
    /// `S^{-1} H S = canonical`.
    Hamiltonian,
}

/// Multiset of canonical summands in normal order, with an optional
/// transform certificate.
#[derive(Debug, Clone)]
pub struct CanonicalDecomposition<S> {
    pub size: usize,
    pub list: SummandList,
    pub form: Form,
    pub summands: Vec<Summand<S>>,
    pub certificate: Option<Matrix<S>>,
    /// Frobenius-norm residual of the certificate check.
    pub residual: Option<f64>,
}

impl<S: Scalar> CanonicalDecomposition<S> {
    /// Block-direct sum of the symmetric summand blocks.
    pub fn symmetric_form(&self) -> Matrix<S> {
        let blocks: Vec<Matrix<S>> = self.summands.iter().map(Summand::symmetric_block).collect();
        Matrix::block_direct_sum(&blocks).expect("even blocks")
    }

    /// Block-direct sum of the Hamiltonian summand blocks.
    pub fn hamiltonian_form(&self) -> Matrix<S> {
        let blocks: Vec<Matrix<S>> = self
            .summands
            .iter()
            .map(Summand::hamiltonian_block)
            .collect();
        Matrix::block_direct_sum(&blocks).expect("even blocks")
    }

    /// The assembled matrix matching [`Form`].
    pub fn canonical_matrix(&self) -> Matrix<S> {
        match self.form {
            Form::Symmetric => self.symmetric_form(),
            Form::Hamiltonian => self.hamiltonian_form(),
        }
    }

    /// Multiset equality of summands (see [`Summand::matches`]).
    pub fn same_summands(&self, other: &Self, tol: f64) -> bool {
        if self.size != other.size || self.summands.len() != other.summands.len() {
            return false;
        }
        let list = if self.list == SummandList::Complex || other.list == SummandList::Complex {
            SummandList::Complex
        } else {
            SummandList::Real
        };
        same_multiset(&self.summands, &other.summands, list, tol)
    }

    /// Decomposition of the negated input; the certificate is dropped.
    pub fn negated(&self) -> Self {
        let flip = self.list == SummandList::Real;
        let mut summands: Vec<Summand<S>> = self
            .summands
            .iter()
            .map(|s| if flip { s.negated() } else { s.clone() })
            .collect();
        summands.sort_by(Summand::normal_cmp);
        CanonicalDecomposition {
            summands,
            certificate: None,
            residual: None,
            ..self.clone()
        }
    }
}

/// Relative tolerance for comparing summand parameters on floating backends.
pub fn comparison_tolerance() -> f64 {
    tolerance().sqrt()
}

/// Validates a symmetric matrix of even size; float inputs that pass the
/// tolerance check are symmetrized exactly.
fn prepared<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    a.require_even_square()?;
    a.require_symmetric()?;
    if T::is_exact() {
        return Ok(a.clone());
    }
    let half = T::from_rational(&rat(1, 2));
    Ok(Matrix::from_fn(a.rows(), a.cols(), |i, j| {
        (a[(i, j)].clone() + a[(j, i)].clone()) * half.clone()
    }))
}

fn finish<S: Scalar>(
    a: &Matrix<S>,
    mut items: Vec<Item<S>>,
    list: SummandList,
) -> Result<CanonicalDecomposition<S>> {
    let size = a.rows();
    let m = size / 2;
    let total: usize = items.iter().map(|it| it.summand.size()).sum();
    if total != size {
        return Err(Error::Indeterminate(format!(
            "summands cover {total} of {size} dimensions"
        )));
    }
    items.sort_by(|x, y| x.summand.normal_cmp(&y.summand));
    let mut dec = CanonicalDecomposition {
        size,
        list,
        form: Form::Symmetric,
        summands: items.iter().map(|it| it.summand.clone()).collect(),
        certificate: None,
        residual: None,
    };
    if items.iter().all(|it| it.piece.is_some()) {
        let mut cols: Vec<Vec<S>> = Vec::with_capacity(size);
        for it in &items {
            cols.extend(it.piece.as_ref().expect("checked").0.iter().cloned());
        }
        for it in &items {
            cols.extend(it.piece.as_ref().expect("checked").1.iter().cloned());
        }
        let s = Matrix::from_fn(size, size, |i, j| cols[j][i].clone());
        let form_gap = (&a.congruent(&s)? - &dec.symmetric_form()).frobenius_norm();
        let omega = Matrix::omega(m);
        let sympl_gap = (&omega.congruent(&s)? - &omega).frobenius_norm();
        dec.residual = Some(form_gap.max(sympl_gap));
        dec.certificate = Some(s);
    }
    Ok(dec)
}

/// `H = Omega_m A`, so that `-Omega_m H = A`.
pub fn hamiltonian_of_form<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let m = a.require_even_square()?;
    a.require_symmetric()?;
    Ok(&Matrix::omega(m) * a)
}

/// Canonical form over the real list for a real symmetric `A` of even size.
pub fn canonicalize_real<T>(a: &Matrix<T>) -> Result<CanonicalDecomposition<T>>
where
    T: Spectral + RealScalar,
    T::Eig: ComplexScalar<Real = T>,
{
    let a = prepared(a)?;
    let items = classify::classify_real(&a)?;
    finish(&a, items, SummandList::Real)
}

/// Canonical form over the complex list; real inputs are treated as complex.
pub fn canonicalize_complex<T: Spectral>(a: &Matrix<T>) -> Result<CanonicalDecomposition<T::Eig>> {
    let ae = lift_matrix(&prepared(a)?);
    let items = classify::classify_complex(&ae)?;
    finish(&ae, items, SummandList::Complex)
}

/// Backends with a canonical list: the real list for real backends and the
/// complex list for complex ones.
pub trait Canonicalize: Spectral {
    const LIST: SummandList;
    fn canonicalize(a: &Matrix<Self>) -> Result<CanonicalDecomposition<Self>>;
}

impl Canonicalize for Rational {
    const LIST: SummandList = SummandList::Real;
    fn canonicalize(a: &Matrix<Self>) -> Result<CanonicalDecomposition<Self>> {
        canonicalize_real(a)
    }
}

impl Canonicalize for f64 {
    const LIST: SummandList = SummandList::Real;
    fn canonicalize(a: &Matrix<Self>) -> Result<CanonicalDecomposition<Self>> {
        canonicalize_real(a)
    }
}

impl Canonicalize for Gaussian {
    const LIST: SummandList = SummandList::Complex;
    fn canonicalize(a: &Matrix<Self>) -> Result<CanonicalDecomposition<Self>> {
        canonicalize_complex(a)
    }
}

impl Canonicalize for C64 {
    const LIST: SummandList = SummandList::Complex;
    fn canonicalize(a: &Matrix<Self>) -> Result<CanonicalDecomposition<Self>> {
        canonicalize_complex(a)
    }
}

/// Canonical form of a pair `(A, B)`: `B` is first brought to `Omega` by
/// [`reduce_skew_to_omega`], and a certificate, when present, satisfies
/// `S^T A S = canonical`, `S^T B S = Omega`.
pub fn canonicalize_pair<T: Canonicalize>(
    pair: &MatrixPair<T>,
) -> Result<CanonicalDecomposition<T>> {
    let t = reduce_skew_to_omega(pair.b())?;
    let reduced = pair.a().congruent(&t)?;
    let reduced = if T::is_exact() {
        reduced
    } else {
        let half = T::from_rational(&rat(1, 2));
        Matrix::from_fn(reduced.rows(), reduced.cols(), |i, j| {
            (reduced[(i, j)].clone() + reduced[(j, i)].clone()) * half.clone()
        })
    };
    let mut dec = T::canonicalize(&reduced)?;
    if let Some(s) = dec.certificate.take() {
        let total = &t * &s;
        let form_gap = (&pair.a().congruent(&total)? - &dec.symmetric_form()).frobenius_norm();
        let omega = Matrix::omega(pair.size() / 2);
        let skew_gap = (&pair.b().congruent(&total)? - &omega).frobenius_norm();
        dec.residual = Some(form_gap.max(skew_gap));
        dec.certificate = Some(total);
    }
    Ok(dec)
}

/// Canonical form of a Hamiltonian matrix under symplectic similarity,
/// computed from the symmetric matrix `-Omega_m H`.
pub fn canonicalize_hamiltonian<T: Canonicalize>(
    h: &Matrix<T>,
) -> Result<CanonicalDecomposition<T>> {
    let m = h.require_even_square()?;
    if !is_hamiltonian(h)? {
        return Err(Error::NotHamiltonian);
    }
    let omega = Matrix::omega(m);
    let a = -(&omega * h);
    let a = if T::is_exact() {
        a
    } else {
        let half = T::from_rational(&rat(1, 2));
        Matrix::from_fn(2 * m, 2 * m, |i, j| {
            (a[(i, j)].clone() + a[(j, i)].clone()) * half.clone()
        })
    };
    let mut dec = T::canonicalize(&a)?;
    dec.form = Form::Hamiltonian;
    if let Some(s) = dec.certificate.take() {
        let corrections: Vec<Matrix<T>> = dec
            .summands
            .iter()
            .map(Summand::hamiltonian_correction)
            .collect();
        let s = &s * &Matrix::block_direct_sum(&corrections)?;
        let inverse = -(&(&omega * &s.transpose()) * &omega);
        let sim_gap = (&(&(&inverse * h) * &s) - &dec.hamiltonian_form()).frobenius_norm();
        let sympl_gap = (&omega.congruent(&s)? - &omega).frobenius_norm();
        dec.residual = Some(sim_gap.max(sympl_gap));
        dec.certificate = Some(s);
    }
    Ok(dec)
}

/// Congruence of two pairs, decided by comparing canonical summands.
pub fn congruent_pairs<T: Canonicalize>(p1: &MatrixPair<T>, p2: &MatrixPair<T>) -> Result<bool> {
    if p1.size() != p2.size() {
        return Err(Error::DimensionMismatch(format!(
            "pair sizes {} and {}",
            p1.size(),
            p2.size()
        )));
    }
    let d1 = canonicalize_pair(p1)?;
    let d2 = canonicalize_pair(p2)?;
    Ok(d1.same_summands(&d2, comparison_tolerance()))
}

/// Symplectic similarity of two Hamiltonian matrices.
pub fn symplectically_similar<T: Canonicalize>(h1: &Matrix<T>, h2: &Matrix<T>) -> Result<bool> {
    if h1.rows() != h2.rows() || h1.cols() != h2.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            h1.rows(),
            h1.cols(),
            h2.rows(),
            h2.cols()
        )));
    }
    let d1 = canonicalize_hamiltonian(h1)?;
    let d2 = canonicalize_hamiltonian(h2)?;
    Ok(d1.same_summands(&d2, comparison_tolerance()))
}

/// Eigenvalue class of `H` that carries signs.
#[derive(Debug, Clone, PartialEq)]
pub enum SignClass<T> {
    Zero,
    /// The pair `+-ci` with `c > 0`.
    Imaginary(T),
}

/// Jordan block sizes of `H` at the class, each with its sign, sorted.
///
/// For the zero class the blocks have even size `2n` and belong to `+-P_n`;
/// at `+-ci` a block of size `n` belongs to `+-Q_n(c)`.
pub fn sign_characteristic<T>(
    h: &Matrix<T>,
    a: &Matrix<T>,
    class: &SignClass<T>,
) -> Result<Vec<(usize, i8)>>
where
    T: Spectral + RealScalar,
    T::Eig: ComplexScalar<Real = T>,
{
    let m = a.require_even_square()?;
    if !(&Matrix::omega(m) * a).approx_eq(h) {
        return Err(Error::InvalidArgument("H must equal Omega A".into()));
    }
    let dec = canonicalize_real(a)?;
    let tol = comparison_tolerance();
    let mut out: Vec<(usize, i8)> = dec
        .summands
        .iter()
        .filter_map(|s| match (s, class) {
            (Summand::P { n, sign }, SignClass::Zero) => Some((2 * n, *sign)),
            (Summand::Q { n, sign, c }, SignClass::Imaginary(target)) => {
                let d = (c.clone() - target.clone()).magnitude();
                let close = if T::is_exact() {
                    c == target
                } else {
                    d <= tol * 1f64.max(c.magnitude())
                };
                close.then_some((*n, *sign))
            }
            _ => None,
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[allow(dead_code)]
#[cfg(test)]
mod tests;

/// Whether two summand lists agree as multisets under [`Summand::matches`].
pub fn same_multiset<S: Scalar>(
    x: &[Summand<S>],
    y: &[Summand<S>],
    list: SummandList,
    tol: f64,
) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut used = vec![false; y.len()];
    x.iter().all(|s| {
        let hit = (0..y.len()).find(|&k| !used[k] && s.matches(&y[k], list, tol));
        hit.map(|k| used[k] = true).is_some()
    })
}
