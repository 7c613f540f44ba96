//! Eigenvalues, Jordan partitions and Jordan chains.
//!
//! Every backend is lifted to a complex field first: rationals to Gaussian
//! rationals, `f64` to complex `f64`. The exact path finds eigenvalues in
//! `Q(i)` from the characteristic polynomial; the floating path clusters the
//! diagonal of a complex Schur form by pseudospectral connectivity.

use nalgebra::DMatrix;

use crate::elim;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{self, Schur};
use crate::poly::{char_poly, Polynomial};
use crate::scalar::{tolerance, ComplexScalar, Gaussian, Rational, Scalar, C64};

/// Eigenvalues with the multiset of Jordan block sizes at each.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure<E> {
    /// Block sizes are sorted in descending order.
    pub entries: Vec<(E, Vec<usize>)>,
}

impl<E: Scalar> JordanStructure<E> {
    pub fn dimension(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, s)| s.iter().sum::<usize>())
            .sum()
    }

    pub fn sizes_at(&self, lambda: &E) -> Option<&[usize]> {
        self.entries
            .iter()
            .find(|(l, _)| l.scalar_eq(lambda))
            .map(|(_, s)| s.as_slice())
    }

    /// Equality up to reordering, eigenvalues compared with `scalar_eq`.
    pub fn same_as(&self, other: &Self) -> bool {
        if self.entries.len() != other.entries.len() {
            return false;
        }
        let mut used = vec![false; other.entries.len()];
        for (l, s) in &self.entries {
            let hit = other
                .entries
                .iter()
                .enumerate()
                .find(|(k, (m, t))| !used[*k] && m.scalar_eq(l) && t == s);
            match hit {
                Some((k, _)) => used[k] = true,
                None => return false,
            }
        }
        true
    }
}

/// `v_1 .. v_k` with `(M - lambda) v_1 = 0` and `(M - lambda) v_{j+1} = v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain<E> {
    pub eigenvalue: E,
    pub vectors: Vec<Vec<E>>,
}

/// One eigenvalue with an invariant-subspace basis `V` of its generalized
/// eigenspace and the restriction `R` (`M V = V R`).
#[derive(Debug, Clone)]
pub struct EigenBlock<E> {
    pub eigenvalue: E,
    pub sizes: Vec<usize>,
    pub basis: Matrix<E>,
    pub restriction: Matrix<E>,
}

/// Block sizes from kernel dimensions `d_0 = 0 <= d_1 <= ...` (Weyr to Segre).
pub fn sizes_from_kernel_dims(dims: &[usize]) -> Option<Vec<usize>> {
    let weyr: Vec<usize> = dims
        .windows(2)
        .map(|w| w[1].checked_sub(w[0]))
        .collect::<Option<_>>()?;
    if weyr.windows(2).any(|w| w[1] > w[0]) {
        return None;
    }
    let mut sizes = Vec::new();
    for (j, &count) in weyr.iter().enumerate() {
        let next = weyr.get(j + 1).copied().unwrap_or(0);
        for _ in 0..count - next {
            sizes.push(j + 1);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Some(sizes)
}

/// Ranks of `N^k` for `k = 0..=max` predicted by a block-size multiset.
pub fn rank_sequence_from_sizes(n: usize, sizes: &[usize], max: usize) -> Vec<usize> {
    (0..=max)
        .map(|k| n - sizes.iter().map(|&s| s.min(k)).sum::<usize>())
        .collect()
}

pub trait EigenField: ComplexScalar {
    fn eigen_blocks(m: &Matrix<Self>) -> Result<Vec<EigenBlock<Self>>>;

    /// Inertia `(positive, negative, zero)` of a Hermitian matrix, or `None`
    /// when it cannot be decided within tolerance.
    fn inertia(h: &Matrix<Self>) -> Option<(usize, usize, usize)>;

    /// Signs `(positive, negative)` of a Hermitian matrix expected to have
    /// rank `count`, or `None` when that rank is not clearly present.
    fn dominant_signs(h: &Matrix<Self>, count: usize) -> Option<(usize, usize)> {
        let (p, q, _) = Self::inertia(h)?;
        (p + q == count).then_some((p, q))
    }
}

/// Backends whose matrices can be analysed over a complex extension.
pub trait Spectral: Scalar {
    type Eig: EigenField;
    fn lift(&self) -> Self::Eig;
    /// Inverse of `lift`; `None` when the value has no image in the backend.
    fn from_eig(e: &Self::Eig) -> Option<Self>;
}

impl Spectral for Rational {
    type Eig = Gaussian;
    fn lift(&self) -> Gaussian {
        Gaussian::new(self.clone(), Rational::from_integer(0.into()))
    }
    fn from_eig(e: &Gaussian) -> Option<Self> {
        num_traits::Zero::is_zero(&e.im).then(|| e.re.clone())
    }
}

impl Spectral for Gaussian {
    type Eig = Gaussian;
    fn lift(&self) -> Gaussian {
        self.clone()
    }
    fn from_eig(e: &Gaussian) -> Option<Self> {
        Some(e.clone())
    }
}

impl Spectral for f64 {
    type Eig = C64;
    fn lift(&self) -> C64 {
        C64::new(*self, 0.0)
    }
    fn from_eig(e: &C64) -> Option<Self> {
        (e.im.abs() <= tolerance() * 1f64.max(e.re.abs())).then_some(e.re)
    }
}

impl Spectral for C64 {
    type Eig = C64;
    fn lift(&self) -> C64 {
        *self
    }
    fn from_eig(e: &C64) -> Option<Self> {
        Some(*e)
    }
}

pub fn lift_matrix<T: Spectral>(m: &Matrix<T>) -> Matrix<T::Eig> {
    m.map(Spectral::lift)
}

pub fn jordan_structure<T: Spectral>(m: &Matrix<T>) -> Result<JordanStructure<T::Eig>> {
    m.require_square()?;
    let blocks = T::Eig::eigen_blocks(&lift_matrix(m))?;
    Ok(JordanStructure {
        entries: blocks
            .into_iter()
            .map(|b| (b.eigenvalue, b.sizes))
            .collect(),
    })
}

pub fn is_similar<T: Spectral>(m: &Matrix<T>, n: &Matrix<T>) -> Result<bool> {
    if m.rows() != n.rows() || m.cols() != n.cols() {
        return Ok(false);
    }
    Ok(jordan_structure(m)?.same_as(&jordan_structure(n)?))
}

/// Kernel bases of `N^j` for `j = 1, 2, ...` until they stabilise, for a
/// square `N`. Each step solves `N x in span(K_{j-1})`.
fn kernel_staircase<E: Scalar>(n_mat: &Matrix<E>) -> Vec<Matrix<E>> {
    if !E::is_exact() {
        return power_kernels(n_mat);
    }
    let k = n_mat.rows();
    let mut out: Vec<Matrix<E>> = Vec::new();
    let mut prev: Matrix<E> = Matrix::zeros(k, 0);
    loop {
        let aug = Matrix::hstack(&[n_mat, &-&prev]).expect("same row count");
        let ns = E::nullspace_of(&aug);
        let x = ns.submatrix(0..k, 0..ns.cols());
        let basis = E::column_basis_of(&x);
        if basis.cols() == prev.cols() {
            break;
        }
        let done = basis.cols() == k;
        out.push(basis.clone());
        prev = basis;
        if done {
            break;
        }
    }
    out
}

/// Kernel bases of `N, N^2, ...` computed from the powers directly, so that
/// rounding in one level does not feed into the next. Singular values of
/// `N^j` below `eps * ||N^{j-1}||_2 * ||N||_2` count as zero.
fn power_kernels<E: Scalar>(n_mat: &Matrix<E>) -> Vec<Matrix<E>> {
    let k = n_mat.rows();
    let norm = E::spectral_norm(n_mat);
    let mut previous_norm = 1.0;
    let mut out: Vec<Matrix<E>> = Vec::new();
    let mut power = n_mat.clone();
    for _ in 0..k {
        let basis = E::nullspace_above(&power, tolerance() * previous_norm * norm);
        if out
            .last()
            .is_some_and(|p: &Matrix<E>| p.cols() >= basis.cols())
        {
            break;
        }
        let done = basis.cols() == k;
        out.push(basis);
        if done {
            break;
        }
        previous_norm = E::spectral_norm(&power);
        power = &power * n_mat;
    }
    out
}

/// Required ratio between the kept and dropped eigenvalues of a sign Gram matrix.
const SIGN_GAP: f64 = 10.0;

pub(crate) fn partition_of<E: Scalar>(n_mat: &Matrix<E>) -> Result<(Vec<usize>, Vec<Matrix<E>>)> {
    let k = n_mat.rows();
    let stairs = kernel_staircase(n_mat);
    let mut dims = vec![0];
    dims.extend(stairs.iter().map(Matrix::cols));
    if *dims.last().expect("nonempty") != k {
        return Err(Error::Indeterminate(
            "generalized eigenspace is not nilpotent within tolerance".into(),
        ));
    }
    let sizes = sizes_from_kernel_dims(&dims)
        .ok_or_else(|| Error::Indeterminate("inconsistent kernel dimensions".into()))?;
    Ok((sizes, stairs))
}

/// Jordan chains at `lambda`, longest first, one per block.
pub fn jordan_chains<T: Spectral>(
    m: &Matrix<T>,
    lambda: &T::Eig,
) -> Result<Vec<JordanChain<T::Eig>>> {
    m.require_square()?;
    let blocks = T::Eig::eigen_blocks(&lift_matrix(m))?;
    let block = blocks
        .iter()
        .find(|b| b.eigenvalue.scalar_eq(lambda))
        .ok_or(Error::NotAnEigenvalue)?;
    chains_in_block(block)
}

pub fn chains_in_block<E: Scalar>(block: &EigenBlock<E>) -> Result<Vec<JordanChain<E>>> {
    let k = block.restriction.rows();
    let nr = block.restriction.shift(&block.eigenvalue);
    let (sizes, stairs) = partition_of(&nr)?;
    let max = sizes.first().copied().unwrap_or(0);
    let mut generators: Vec<(Vec<E>, usize)> = Vec::new();
    for s in (1..=max).rev() {
        let wanted = sizes.iter().filter(|&&t| t == s).count();
        if wanted == 0 {
            continue;
        }
        // span of ker N^{s-1} and of N^{t-s} g for longer chains
        let mut cols: Vec<Vec<E>> = if s >= 2 {
            (0..stairs[s - 2].cols())
                .map(|j| stairs[s - 2].column(j))
                .collect()
        } else {
            Vec::new()
        };
        for (g, t) in &generators {
            let mut v = g.clone();
            for _ in 0..t - s {
                v = mat_vec(&nr, &v);
            }
            cols.push(v);
        }
        let mut current = columns_to_matrix(k, &cols);
        let mut rank = current.rank();
        let mut found = 0;
        for j in 0..stairs[s - 1].cols() {
            if found == wanted {
                break;
            }
            let cand = stairs[s - 1].column(j);
            let trial =
                Matrix::hstack(&[&current, &Matrix::column_vector(cand.clone())]).expect("rows");
            let r = trial.rank();
            if r > rank {
                rank = r;
                current = trial;
                generators.push((cand, s));
                found += 1;
            }
        }
        if found != wanted {
            return Err(Error::Indeterminate(
                "could not complete Jordan chains".into(),
            ));
        }
    }
    let mut chains = Vec::new();
    for (g, s) in generators {
        let mut local = vec![g];
        for _ in 1..s {
            let next = mat_vec(&nr, local.last().expect("nonempty"));
            local.push(next);
        }
        local.reverse();
        let vectors = local.iter().map(|v| mat_vec(&block.basis, v)).collect();
        chains.push(JordanChain {
            eigenvalue: block.eigenvalue.clone(),
            vectors,
        });
    }
    Ok(chains)
}

pub(crate) fn mat_vec<E: Scalar>(m: &Matrix<E>, v: &[E]) -> Vec<E> {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(E::zero(), |acc, j| acc + m[(i, j)].clone() * v[j].clone()))
        .collect()
}

pub(crate) fn columns_to_matrix<E: Scalar>(rows: usize, cols: &[Vec<E>]) -> Matrix<E> {
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
}

// ---------------------------------------------------------------- exact path

/// Convergents of the continued fraction of `x`, up to denominator `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        if !r.is_finite() || r.abs() > 1e15 {
            break;
        }
        let a = r.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        out.push(Rational::new(h2.into(), k2.into()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

fn numeric_roots(p: &Polynomial<Gaussian>) -> Vec<C64> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let monic = p.monic();
    let comp = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -monic.coeff(i).to_c64()
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Schur::new(&comp).eigenvalues()
}

/// Roots of `chi` in `Q(i)` with multiplicities; fails unless `chi` splits there.
pub fn gaussian_roots(chi: &Polynomial<Gaussian>) -> Result<Vec<(Gaussian, usize)>> {
    let mut rest = chi.squarefree_part();
    let mut roots: Vec<Gaussian> = Vec::new();
    let approx = numeric_roots(&rest);
    for z in approx {
        let scale = 1f64.max(z.norm());
        let close = |v: f64| {
            move |q: &Rational| (crate::scalar::RealScalar::to_f64(q) - v).abs() <= 1e-6 * scale
        };
        let res: Vec<Rational> = convergents(z.re, 1 << 40)
            .into_iter()
            .filter(close(z.re))
            .collect();
        let ims: Vec<Rational> = convergents(z.im, 1 << 40)
            .into_iter()
            .filter(close(z.im))
            .collect();
        let mut hit = None;
        'search: for re in &res {
            for im in &ims {
                let cand = Gaussian::new(re.clone(), im.clone());
                if num_traits::Zero::is_zero(&rest.eval(&cand)) {
                    hit = Some(cand);
                    break 'search;
                }
            }
        }
        if let Some(r) = hit {
            rest = rest.div_rem(&Polynomial::linear_root(r.clone()))?.0;
            roots.push(r);
        }
    }
    if rest.degree() != Some(0) {
        return Err(Error::UnsupportedSpectrum(
            "characteristic polynomial does not split over the Gaussian rationals".into(),
        ));
    }
    let mut out = Vec::new();
    for r in roots {
        let lin = Polynomial::linear_root(r.clone());
        let mut q = chi.clone();
        let mut mult = 0;
        loop {
            let (quot, rem) = q.div_rem(&lin)?;
            if !rem.is_zero() {
                break;
            }
            q = quot;
            mult += 1;
        }
        out.push((r, mult));
    }
    // deterministic order: by real part, then imaginary part
    out.sort_by_key(|(a, _)| (a.re.clone(), a.im.clone()));
    Ok(out)
}

impl EigenField for Gaussian {
    fn inertia(h: &Matrix<Gaussian>) -> Option<(usize, usize, usize)> {
        (h == &h.adjoint()).then(|| elim::hermitian_inertia(h))
    }

    fn eigen_blocks(m: &Matrix<Gaussian>) -> Result<Vec<EigenBlock<Gaussian>>> {
        let n = m.require_square()?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let chi = char_poly(m)?;
        let mut out = Vec::new();
        for (lambda, mult) in gaussian_roots(&chi)? {
            let nm = m.shift(&lambda);
            let basis = elim::nullspace(&nm.pow(mult as u32)?);
            if basis.cols() != mult {
                return Err(Error::Indeterminate(
                    "generalized eigenspace has the wrong dimension".into(),
                ));
            }
            let restriction = elim::solve_in_span(&basis, &(m * &basis))?;
            let (sizes, _) = partition_of(&restriction.shift(&lambda))?;
            out.push(EigenBlock {
                eigenvalue: lambda,
                sizes,
                basis,
                restriction,
            });
        }
        Ok(out)
    }
}

// ------------------------------------------------------------- floating path

/// Threshold for joining eigenvalues: `eps * ||M||_F` (at least `eps`).
pub fn cluster_threshold(m: &DMatrix<C64>) -> f64 {
    tolerance() * m.norm().max(1.0)
}

/// Floating eigen-decomposition into clusters of a reordered Schur form.
pub fn float_eigen_blocks(m: &Matrix<C64>) -> Result<Vec<EigenBlock<C64>>> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let a = numeric::to_na(m);
    let schur = Schur::new(&a);
    let eigs = schur.eigenvalues();
    let clusters = numeric::pseudospectral_clusters(&a, &eigs, cluster_threshold(&a));
    let mut out = Vec::new();
    for cluster in clusters {
        let mut s = schur.clone();
        // Eigenvalue positions are stable under reordering of the original
        // Schur form, so select by the original indices.
        let select: Vec<bool> = (0..n).map(|i| cluster.contains(&i)).collect();
        let k = s.reorder(&select);
        let t11 = s.t.view((0, 0), (k, k)).clone_owned();
        let q1 = s.q.view((0, 0), (n, k)).clone_owned();
        let mu = (0..k).fold(C64::new(0.0, 0.0), |acc, i| acc + t11[(i, i)]) / k as f64;
        let restriction = numeric::from_na(&t11);
        let (sizes, _) = partition_of(&restriction.shift(&mu))?;
        out.push(EigenBlock {
            eigenvalue: mu,
            sizes,
            basis: numeric::from_na(&q1),
            restriction,
        });
    }
    let sep_ok = out.iter().enumerate().all(|(i, b)| {
        out.iter()
            .skip(i + 1)
            .all(|c| (b.eigenvalue - c.eigenvalue).norm() > 10.0 * tolerance())
    });
    if !sep_ok {
        return Err(Error::Indeterminate(
            "eigenvalue clusters are not separated".into(),
        ));
    }
    Ok(out)
}

impl EigenField for C64 {
    fn inertia(h: &Matrix<C64>) -> Option<(usize, usize, usize)> {
        numeric::hermitian_inertia(&numeric::to_na(h))
    }

    fn dominant_signs(h: &Matrix<C64>, count: usize) -> Option<(usize, usize)> {
        numeric::dominant_signs(&numeric::to_na(h), count, SIGN_GAP)
    }

    fn eigen_blocks(m: &Matrix<C64>) -> Result<Vec<EigenBlock<C64>>> {
        float_eigen_blocks(m)
    }
}
