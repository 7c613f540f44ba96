//! Constructors for the named canonical matrices and pairs, and the
//! structural predicates (symplectic, Hamiltonian, existence of a skew
//! partner `Psi~` with `Psi~ Psi` symmetric).

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixPair};
use crate::poly::{char_poly, Polynomial};
use crate::scalar::{FieldClass, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    Jordan,
    RealifiedJordan,
    Frobenius,
    Omega,
    P,
    Pprime,
    Q,
    Qprime,
}

impl BlockKind {
    pub fn code(self) -> &'static str {
        match self {
            BlockKind::Jordan => "J",
            BlockKind::RealifiedJordan => "JR",
            BlockKind::Frobenius => "F",
            BlockKind::Omega => "Omega",
            BlockKind::P => "P",
            BlockKind::Pprime => "Pp",
            BlockKind::Q => "Q",
            BlockKind::Qprime => "Qp",
        }
    }

    pub fn from_code(code: &str) -> Option<BlockKind> {
        Some(match code {
            "J" => BlockKind::Jordan,
            "JR" => BlockKind::RealifiedJordan,
            "F" => BlockKind::Frobenius,
            "Omega" => BlockKind::Omega,
            "P" => BlockKind::P,
            "Pp" => BlockKind::Pprime,
            "Q" => BlockKind::Q,
            "Qp" => BlockKind::Qprime,
            _ => return None,
        })
    }
}

/// Description of one named block. The scalar parameters a kind does not
/// use are ignored; for `Frobenius`, `n` is the power `s` of `poly`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec<T> {
    pub kind: BlockKind,
    pub n: usize,
    pub a: Option<T>,
    pub b: Option<T>,
    pub c: Option<T>,
    pub poly: Option<Polynomial<T>>,
    pub sign: i8,
}

impl<T: Scalar> BlockSpec<T> {
    fn bare(kind: BlockKind, n: usize) -> Self {
        BlockSpec {
            kind,
            n,
            a: None,
            b: None,
            c: None,
            poly: None,
            sign: 1,
        }
    }

    pub fn jordan(n: usize, a: T) -> Self {
        BlockSpec {
            a: Some(a),
            ..Self::bare(BlockKind::Jordan, n)
        }
    }

    /// `J_n(a+bi)` realified to size `2n`.
    pub fn realified(n: usize, a: T, b: T) -> Self {
        BlockSpec {
            a: Some(a),
            b: Some(b),
            ..Self::bare(BlockKind::RealifiedJordan, n)
        }
    }

    /// Companion block of `p^s`.
    pub fn frobenius(p: Polynomial<T>, s: usize) -> Self {
        BlockSpec {
            poly: Some(p),
            ..Self::bare(BlockKind::Frobenius, s)
        }
    }

    pub fn omega(n: usize) -> Self {
        Self::bare(BlockKind::Omega, n)
    }

    pub fn p(n: usize) -> Self {
        Self::bare(BlockKind::P, n)
    }

    pub fn p_prime(n: usize) -> Self {
        Self::bare(BlockKind::Pprime, n)
    }

    pub fn q(n: usize, c: T) -> Self {
        BlockSpec {
            c: Some(c),
            ..Self::bare(BlockKind::Q, n)
        }
    }

    pub fn q_prime(n: usize, c: T) -> Self {
        BlockSpec {
            c: Some(c),
            ..Self::bare(BlockKind::Qprime, n)
        }
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.sign = sign;
        self
    }

    fn param(&self, v: &Option<T>, name: &str) -> Result<T> {
        v.clone().ok_or_else(|| {
            Error::InvalidBlock(format!("{} block needs parameter {name}", self.kind.code()))
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidBlock(
                "size parameter must be at least 1".into(),
            ));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidBlock(format!(
                "sign must be +1 or -1, got {}",
                self.sign
            )));
        }
        match self.kind {
            BlockKind::Jordan => {
                self.param(&self.a, "a")?;
            }
            BlockKind::RealifiedJordan => {
                self.param(&self.a, "a")?;
                if !self.param(&self.b, "b")?.is_positive_real() {
                    return Err(Error::InvalidBlock(
                        "realified Jordan block needs b > 0".into(),
                    ));
                }
            }
            BlockKind::Q | BlockKind::Qprime => {
                if !self.param(&self.c, "c")?.is_positive_real() {
                    return Err(Error::InvalidBlock("Q blocks need c > 0".into()));
                }
            }
            BlockKind::Frobenius => {
                let p = self.poly.as_ref().ok_or_else(|| {
                    Error::InvalidBlock("Frobenius block needs a polynomial".into())
                })?;
                if !p.is_monic() || p.degree().unwrap_or(0) == 0 {
                    return Err(Error::InvalidBlock(
                        "Frobenius polynomial must be monic of degree >= 1".into(),
                    ));
                }
                if irreducibility(p) == Irreducibility::Reducible {
                    return Err(Error::InvalidBlock(
                        "Frobenius polynomial is reducible".into(),
                    ));
                }
            }
            BlockKind::Omega | BlockKind::P | BlockKind::Pprime => {}
        }
        Ok(())
    }
}

/// Outcome of the irreducibility check, which is decided only up to degree 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    Unchecked,
}

pub fn irreducibility<T: Scalar>(p: &Polynomial<T>) -> Irreducibility {
    match p.degree() {
        None | Some(0) => Irreducibility::Reducible,
        Some(1) => Irreducibility::Irreducible,
        Some(2) => {
            let (c0, c1, c2) = (p.coeff(0), p.coeff(1), p.coeff(2));
            let disc = c1.clone() * c1 - T::from_i64(4) * c0 * c2;
            if disc.is_square_in_field() {
                Irreducibility::Reducible
            } else {
                Irreducibility::Irreducible
            }
        }
        Some(_) => Irreducibility::Unchecked,
    }
}

/// `J_n(a)`: `a` on the diagonal, ones on the superdiagonal.
pub fn jordan<T: Scalar>(n: usize, a: &T) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            a.clone()
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Block upper bidiagonal matrix with `diag` on the diagonal and `upper`
/// on the superdiagonal, both `k x k`, repeated `count` times.
fn block_bidiagonal<T: Scalar>(count: usize, diag: &Matrix<T>, upper: &Matrix<T>) -> Matrix<T> {
    let k = diag.rows();
    let mut out = Matrix::zeros(k * count, k * count);
    for b in 0..count {
        out.set_block(b * k, b * k, diag);
        if b + 1 < count {
            out.set_block(b * k, (b + 1) * k, upper);
        }
    }
    out
}

/// `J_n(a+bi)` realified: 2x2 blocks `[[a, b], [-b, a]]` with `I_2` above the diagonal.
pub fn realified_jordan<T: Scalar>(n: usize, a: &T, b: &T) -> Matrix<T> {
    let d = Matrix::from_rows(vec![
        vec![a.clone(), b.clone()],
        vec![-b.clone(), a.clone()],
    ])
    .expect("2x2");
    block_bidiagonal(n, &d, &Matrix::identity(2))
}

/// Companion matrix of `p^s`: ones below the diagonal and the negated
/// coefficients, constant term first, in the last column.
pub fn frobenius<T: Scalar>(p: &Polynomial<T>, s: usize) -> Matrix<T> {
    let chi = p.pow(s as u32);
    let n = chi.degree().unwrap_or(0);
    Matrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -chi.coeff(i)
        } else if i == j + 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

pub fn p_block<T: Scalar>(n: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n - 1 - i)] = T::one();
        if i >= 1 {
            m[(n + i, 2 * n - i)] = T::one();
        }
    }
    m
}

pub fn p_prime_block<T: Scalar>(n: usize) -> Matrix<T> {
    let j = jordan(n, &T::zero());
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.set_block(0, n, &j);
    m.set_block(n, 0, &j.transpose());
    m[(n, n)] = T::one();
    m
}

/// `C = [[0, 1], [-c^2, 0]]`.
fn companion_c<T: Scalar>(c: &T) -> Matrix<T> {
    Matrix::from_rows(vec![
        vec![T::zero(), T::one()],
        vec![-(c.clone() * c.clone()), T::zero()],
    ])
    .expect("2x2")
}

pub fn q_block<T: Scalar>(n: usize, c: &T) -> Matrix<T> {
    let mut m = Matrix::zeros(2 * n, 2 * n);
    if n % 2 == 1 {
        for i in 0..n {
            let v = if i % 2 == 0 { c.clone() } else { -c.clone() };
            m[(i, n - 1 - i)] = v.clone();
            m[(n + i, 2 * n - 1 - i)] = v;
            if i + 1 < n {
                m[(i, n + i + 1)] = T::one();
                m[(n + i + 1, i)] = T::one();
            }
        }
    } else {
        let upper = block_bidiagonal(n / 2, &companion_c(c), &Matrix::identity(2));
        m.set_block(0, n, &upper);
        m.set_block(n, 0, &upper.transpose());
        m.set_block(n, n, &Matrix::identity(2));
    }
    m
}

pub fn q_prime_block<T: Scalar>(n: usize, c: &T) -> Matrix<T> {
    if n.is_multiple_of(2) {
        return q_block(n, c);
    }
    let cc = companion_c(c);
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m[(0, 0)] = c.clone() * c.clone();
    m[(n, n)] = T::one();
    if n > 1 {
        m[(0, n + 2)] = T::one();
        m[(n + 2, 0)] = T::one();
        m[(n, n + 1)] = T::one();
        m[(n + 1, n)] = T::one();
    }
    let k = (n - 1) / 2;
    for b in 0..k {
        let r = 1 + 2 * b;
        m.set_block(r, n + r, &cc);
        m.set_block(n + r, r, &cc.transpose());
        if b + 1 < k {
            m.set_block(r, n + r + 2, &Matrix::identity(2));
            m.set_block(n + r + 2, r, &Matrix::identity(2));
        }
    }
    m
}

/// The matrix described by `spec`, multiplied by its sign.
pub fn make_block<T: Scalar>(spec: &BlockSpec<T>) -> Result<Matrix<T>> {
    spec.validate()?;
    let n = spec.n;
    let m = match spec.kind {
        BlockKind::Jordan => jordan(n, spec.a.as_ref().expect("validated")),
        BlockKind::RealifiedJordan => realified_jordan(
            n,
            spec.a.as_ref().expect("validated"),
            spec.b.as_ref().expect("validated"),
        ),
        BlockKind::Frobenius => frobenius(spec.poly.as_ref().expect("validated"), n),
        BlockKind::Omega => Matrix::omega(n),
        BlockKind::P => p_block(n),
        BlockKind::Pprime => p_prime_block(n),
        BlockKind::Q => q_block(n, spec.c.as_ref().expect("validated")),
        BlockKind::Qprime => q_prime_block(n, spec.c.as_ref().expect("validated")),
    };
    Ok(if spec.sign < 0 { -m } else { m })
}

/// `P_Phi = ([[0, Phi], [Phi^T, 0]], Omega_n)`.
pub fn make_pair_type_i<T: Scalar>(phi: &Matrix<T>) -> Result<MatrixPair<T>> {
    let n = phi.require_square()?;
    let mut a = Matrix::zeros(2 * n, 2 * n);
    a.set_block(0, n, phi);
    a.set_block(n, 0, &phi.transpose());
    MatrixPair::new(a, Matrix::omega(n))
}

/// `Psi` together with a nonsingular skew `Psi~` such that `Psi~ Psi` is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct TildePsi<T> {
    psi: Matrix<T>,
    tilde: Matrix<T>,
}

impl<T: Scalar> TildePsi<T> {
    pub fn new(psi: Matrix<T>, tilde: Matrix<T>) -> Result<Self> {
        let n = psi.require_square()?;
        if tilde.rows() != n || tilde.cols() != n {
            return Err(Error::DimensionMismatch(
                "Psi and Psi~ differ in size".into(),
            ));
        }
        if !tilde.is_skew_symmetric() {
            return Err(Error::NotSkewSymmetric);
        }
        if !tilde.is_nonsingular() {
            return Err(Error::Singular);
        }
        if !(&tilde * &psi).is_symmetric() {
            return Err(Error::InvalidArgument("Psi~ Psi is not symmetric".into()));
        }
        Ok(TildePsi { psi, tilde })
    }

    pub fn psi(&self) -> &Matrix<T> {
        &self.psi
    }

    pub fn tilde(&self) -> &Matrix<T> {
        &self.tilde
    }
}

/// `Q_Psi^f = (Psi~ Psi f(Psi), Psi~ f(Psi))` for nonzero even `f` with
/// `deg f < deg p_Psi`.
pub fn make_pair_type_ii<T: Scalar>(t: &TildePsi<T>, f: &Polynomial<T>) -> Result<MatrixPair<T>> {
    if f.is_zero() {
        return Err(Error::InvalidPolynomial("f must be nonzero".into()));
    }
    if !f.is_even() {
        return Err(Error::InvalidPolynomial(
            "f must have only even-degree terms".into(),
        ));
    }
    let p = char_poly(&t.psi)?.squarefree_part();
    if f.degree() >= p.degree() {
        return Err(Error::InvalidPolynomial(
            "deg f must be below deg p_Psi".into(),
        ));
    }
    let fpsi = f.eval_matrix(&t.psi)?;
    let b = &t.tilde * &fpsi;
    let a = &(&t.tilde * &t.psi) * &fpsi;
    MatrixPair::new(a, b)
}

/// `S^T Omega S = Omega`.
pub fn is_symplectic<T: Scalar>(s: &Matrix<T>) -> Result<bool> {
    let m = s.require_even_square()?;
    let omega = Matrix::omega(m);
    Ok(omega.congruent(s)?.approx_eq(&omega))
}

/// `Omega H` symmetric.
pub fn is_hamiltonian<T: Scalar>(h: &Matrix<T>) -> Result<bool> {
    let m = h.require_even_square()?;
    Ok((&Matrix::omega(m) * h).is_symmetric())
}

fn approx_poly_eq<T: Scalar>(p: &Polynomial<T>, q: &Polynomial<T>) -> bool {
    let n = p.coeffs().len().max(q.coeffs().len());
    (0..n).all(|k| p.coeff(k).scalar_eq(&q.coeff(k)))
}

fn is_x<T: Scalar>(p: &Polynomial<T>) -> bool {
    p.degree() == Some(1) && p.coeff(0).approx_zero()
}

/// Whether `Psi~` exists for `Psi` with `char_poly(Psi) = p^s`, decided by
/// the criterion matching the backend's field class.
pub fn tilde_exists<T: Scalar>(psi: &Matrix<T>, p: &Polynomial<T>) -> Result<bool> {
    let n = psi.require_square()?;
    let p = p.monic();
    let d = p
        .degree()
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::InvalidPolynomial("p must be nonconstant".into()))?;
    let chi = char_poly(psi)?;
    if n % d != 0 || !approx_poly_eq(&p.pow((n / d) as u32), &chi) {
        return Err(Error::NotPowerOfIrreducible);
    }
    if n % 2 == 1 {
        return Ok(false);
    }
    Ok(match T::FIELD_CLASS {
        FieldClass::General => is_x(&p) || p.is_even(),
        FieldClass::AlgebraicallyClosed => is_x(&p),
        FieldClass::RealClosed => {
            is_x(&p) || (d == 2 && p.is_even() && p.coeff(0).is_positive_real())
        }
    })
}

/// Chain basis `V = [v_1 .. v_n]` of a single nilpotent Jordan block, with
/// `Psi v_1 = 0` and `Psi v_{j+1} = v_j`.
pub fn nilpotent_chain_basis<T: Scalar>(psi: &Matrix<T>) -> Result<Matrix<T>> {
    let n = psi.require_square()?;
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let top = psi.pow(n as u32 - 1)?;
    if !(&top * psi).approx_eq(&Matrix::zeros(n, n)) {
        return Err(Error::NotNilpotent);
    }
    let rank = psi.rank();
    if rank + 1 != n {
        return Err(Error::MultipleBlocks(n - rank));
    }
    let generator = if T::is_exact() {
        (0..n).find(|&j| (0..n).any(|i| !top[(i, j)].is_zero()))
    } else {
        (0..n).max_by(|&a, &b| {
            let na: f64 = (0..n).map(|i| top[(i, a)].magnitude().powi(2)).sum();
            let nb: f64 = (0..n).map(|i| top[(i, b)].magnitude().powi(2)).sum();
            na.total_cmp(&nb)
        })
    }
    .ok_or(Error::NotNilpotent)?;
    let mut v = Matrix::zeros(n, n);
    let mut cur: Vec<T> = (0..n)
        .map(|i| if i == generator { T::one() } else { T::zero() })
        .collect();
    for k in (0..n).rev() {
        for (i, x) in cur.iter().enumerate() {
            v[(i, k)] = x.clone();
        }
        cur = (0..n)
            .map(|i| {
                (0..n).fold(T::zero(), |acc, j| {
                    acc + psi[(i, j)].clone() * cur[j].clone()
                })
            })
            .collect();
    }
    Ok(v)
}

/// `n x n` anti-diagonal with entries `1, -1, 1, ...` from the top-right corner.
pub fn alternating_antidiagonal<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        if i + j + 1 == n {
            if i % 2 == 0 {
                T::one()
            } else {
                -T::one()
            }
        } else {
            T::zero()
        }
    })
}

/// `Psi~ = S^T K S` where `Psi = S^{-1} J_n(0) S` and `K` is the alternating anti-diagonal.
pub fn make_tilde_nilpotent<T: Scalar>(psi: &Matrix<T>) -> Result<TildePsi<T>> {
    let n = psi.require_square()?;
    if n % 2 == 1 {
        return Err(Error::OddSize(n));
    }
    let v = nilpotent_chain_basis(psi)?;
    let s = v.inverse()?;
    let tilde = alternating_antidiagonal::<T>(n).congruent(&s)?;
    let tilde = if T::is_exact() {
        tilde
    } else {
        let half = T::from_rational(&crate::scalar::rat(1, 2));
        Matrix::from_fn(n, n, |i, j| {
            (tilde[(i, j)].clone() - tilde[(j, i)].clone()) * half.clone()
        })
    };
    TildePsi::new(psi.clone(), tilde)
}

/// Representatives `(Psi, Omega_n)` of the `2n x 2n` matrices admitting a
/// skew partner: `-Omega_n P_n` always, and `-Omega_n Q_n(c)` for each
/// requested `c` unless the backend is algebraically closed.
pub fn canonical_tilde_representatives<T: Scalar>(
    n: usize,
    c_values: &[T],
) -> Result<Vec<TildePsi<T>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let omega = Matrix::omega(n);
    let mut out = vec![TildePsi::new(-(&omega * &p_block(n)), omega.clone())?];
    if T::FIELD_CLASS != FieldClass::AlgebraicallyClosed {
        for c in c_values {
            if !c.is_positive_real() {
                return Err(Error::InvalidBlock("Q blocks need c > 0".into()));
            }
            out.push(TildePsi::new(-(&omega * &q_block(n, c)), omega.clone())?);
        }
    }
    Ok(out)
}

/// Similarity from the remark on alternative blocks: the `n x n` reversal
/// direct-summed with `diag(1, 1, -1, -1, 1, 1, ...)`.
pub fn remark_similarity<T: Scalar>(n: usize) -> Matrix<T> {
    let rev = Matrix::from_fn(
        n,
        n,
        |i, j| if i + j + 1 == n { T::one() } else { T::zero() },
    );
    let signs: Vec<T> = (0..n)
        .map(|i| if i % 4 < 2 { T::one() } else { -T::one() })
        .collect();
    Matrix::direct_sum(&[rev, Matrix::diagonal(&signs)])
}

/// Block bidiagonal matrix with `C = [[0, 1], [-c^2, 0]]` on the diagonal
/// and `I_2` above it (`n` blocks).
pub fn companion_bidiagonal<T: Scalar>(n: usize, c: &T) -> Matrix<T> {
    block_bidiagonal(n, &companion_c(c), &Matrix::identity(2))
}

/// `ci I - Omega_n Q_n(c)` with column `n + 1` and the last row removed
/// (1-based numbering), over a complex backend.
pub fn r_matrix<T: crate::scalar::ComplexScalar>(n: usize, c: &T::Real) -> Matrix<T> {
    let cc = T::from_real(c.clone());
    let h = &Matrix::omega(n) * &q_block::<T>(n, &cc);
    let t = &Matrix::identity(2 * n).scale(&(T::i() * cc)) - &h;
    t.remove_row_col(2 * n - 1, n)
}
