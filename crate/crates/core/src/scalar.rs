//! Scalar field backends.
//!
//! Four backends share one trait: exact rationals, exact Gaussian rationals,
//! and `f64` reals/complexes compared under a process-wide tolerance.

use std::fmt::Debug;
use std::ops::Neg;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::elim;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric;

pub type Rational = BigRational;
pub type Gaussian = Complex<BigRational>;
pub type C64 = Complex<f64>;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(DEFAULT_TOLERANCE.to_bits());

/// Current comparison tolerance for the floating backends.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Replace the floating comparison tolerance. Must be positive and finite.
pub fn set_tolerance(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    TOLERANCE_BITS.store(eps.to_bits(), Ordering::Relaxed);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    GaussianRational,
    FloatReal,
    FloatComplex,
}

impl Backend {
    pub fn is_exact(self) -> bool {
        matches!(self, Backend::Rational | Backend::GaussianRational)
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::GaussianRational => "gaussian-rational",
            Backend::FloatReal => "real",
            Backend::FloatComplex => "complex",
        }
    }
}

/// Which family of fields a backend stands in for when a result depends on
/// the ground field (existence of skew partners, canonical lists).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldClass {
    General,
    AlgebraicallyClosed,
    RealClosed,
}

pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const BACKEND: Backend;
    const FIELD_CLASS: FieldClass;

    fn from_rational(r: &Rational) -> Self;

    fn conj(&self) -> Self;

    /// Absolute value as an `f64` (approximate for exact backends).
    fn magnitude(&self) -> f64;

    fn to_c64(&self) -> C64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn is_exact() -> bool {
        Self::BACKEND.is_exact()
    }

    fn approx_zero(&self) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= tolerance()
        }
    }

    /// Exact equality, or `|a-b| <= eps * max(1, |a|, |b|)` on floats.
    fn scalar_eq(&self, other: &Self) -> bool {
        if Self::is_exact() {
            self == other
        } else {
            let diff = (self.clone() - other.clone()).magnitude();
            diff <= tolerance() * 1f64.max(self.magnitude()).max(other.magnitude())
        }
    }

    /// Real and strictly positive (beyond tolerance on floats).
    fn is_positive_real(&self) -> bool {
        let z = self.to_c64();
        z.im.abs() <= tolerance() * 1f64.max(z.re.abs()) && z.re > tolerance()
    }

    /// Whether the element has a square root in the backend's field.
    fn is_square_in_field(&self) -> bool;

    fn rank_of(m: &Matrix<Self>) -> usize {
        elim::rank(m)
    }

    /// Columns form a basis of the right kernel.
    fn nullspace_of(m: &Matrix<Self>) -> Matrix<Self> {
        elim::nullspace(m)
    }

    /// Columns form a basis of the column space.
    fn column_basis_of(m: &Matrix<Self>) -> Matrix<Self> {
        elim::column_basis(m)
    }

    /// Like [`Scalar::nullspace_of`], with singular values up to `floor`
    /// counted as zero on floating backends.
    fn nullspace_above(m: &Matrix<Self>, _floor: f64) -> Matrix<Self> {
        Self::nullspace_of(m)
    }

    /// Largest singular value, for floating backends; the Frobenius norm
    /// elsewhere.
    fn spectral_norm(m: &Matrix<Self>) -> f64 {
        m.frobenius_norm()
    }
}

pub trait RealScalar: Scalar + PartialOrd {
    type Complex: ComplexScalar<Real = Self>;

    fn to_f64(&self) -> f64;

    fn from_f64(v: f64) -> Option<Self>;

    /// Nonnegative square root, when one exists in the backend.
    fn sqrt(&self) -> Option<Self>;

    /// `(x, y)` with `x^2 + y^2 = self`, when the backend can find one.
    fn two_squares(&self) -> Option<(Self, Self)> {
        self.sqrt().map(|s| (s, Self::zero()))
    }

    /// Sign with tolerance: values that are `approx_zero` give 0.
    fn sign(&self) -> i8 {
        if self.approx_zero() {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

pub trait ComplexScalar: Scalar {
    type Real: RealScalar<Complex = Self>;

    fn from_parts(re: Self::Real, im: Self::Real) -> Self;

    fn re(&self) -> Self::Real;

    fn im(&self) -> Self::Real;

    fn from_real(re: Self::Real) -> Self {
        Self::from_parts(re, Self::Real::zero())
    }

    fn i() -> Self {
        Self::from_parts(Self::Real::zero(), Self::Real::one())
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;
    const FIELD_CLASS: FieldClass = FieldClass::General;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }

    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(self), 0.0)
    }

    fn is_positive_real(&self) -> bool {
        self.is_positive()
    }

    fn is_square_in_field(&self) -> bool {
        let perfect = |v: &BigInt| {
            let r = v.sqrt();
            &(&r * &r) == v
        };
        !self.is_negative() && perfect(self.numer()) && perfect(self.denom())
    }
}

impl RealScalar for Rational {
    type Complex = Gaussian;

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_f64(v: f64) -> Option<Self> {
        <Rational as FromPrimitive>::from_f64(v)
    }

    fn sqrt(&self) -> Option<Self> {
        if !self.is_square_in_field() {
            return None;
        }
        Some(Rational::new(self.numer().sqrt(), self.denom().sqrt()))
    }

    /// Writes `p/q` as `(x^2 + y^2) / q^2` with `x^2 + y^2 = pq`, searching
    /// `x` up to a bounded size.
    fn two_squares(&self) -> Option<(Self, Self)> {
        if let Some(s) = self.sqrt() {
            return Some((s, Rational::zero()));
        }
        if self.is_negative() {
            return None;
        }
        let target = (self.numer() * self.denom()).to_u128()?;
        let limit = (target as f64).sqrt() as u128 + 1;
        if limit > 1 << 22 {
            return None;
        }
        let q = Rational::from_integer(self.denom().clone());
        (0..=limit).find_map(|x| {
            let rest = target.checked_sub(x * x)?;
            let y = (rest as f64).sqrt().round() as u128;
            (y * y == rest).then(|| {
                (
                    Rational::from_integer(BigInt::from(x)) / q.clone(),
                    Rational::from_integer(BigInt::from(y)) / q.clone(),
                )
            })
        })
    }

    fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl Scalar for Gaussian {
    const BACKEND: Backend = Backend::GaussianRational;
    const FIELD_CLASS: FieldClass = FieldClass::AlgebraicallyClosed;

    fn from_rational(r: &Rational) -> Self {
        Complex::new(r.clone(), Rational::zero())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    /// Stands in for an algebraically closed field.
    fn is_square_in_field(&self) -> bool {
        true
    }
}

impl ComplexScalar for Gaussian {
    type Real = Rational;

    fn from_parts(re: Rational, im: Rational) -> Self {
        Complex::new(re, im)
    }

    fn re(&self) -> Rational {
        self.re.clone()
    }

    fn im(&self) -> Rational {
        self.im.clone()
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::FloatReal;
    const FIELD_CLASS: FieldClass = FieldClass::RealClosed;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }

    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }

    fn is_square_in_field(&self) -> bool {
        *self >= -tolerance()
    }

    fn rank_of(m: &Matrix<Self>) -> usize {
        numeric::rank(&m.map(|x| C64::new(*x, 0.0)))
    }

    fn nullspace_of(m: &Matrix<Self>) -> Matrix<Self> {
        numeric::real_nullspace(m)
    }

    fn column_basis_of(m: &Matrix<Self>) -> Matrix<Self> {
        numeric::real_column_basis(m)
    }
}

impl RealScalar for f64 {
    type Complex = C64;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
}

impl Scalar for C64 {
    const BACKEND: Backend = Backend::FloatComplex;
    const FIELD_CLASS: FieldClass = FieldClass::AlgebraicallyClosed;

    fn from_rational(r: &Rational) -> Self {
        C64::new(rational_to_f64(r), 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn is_square_in_field(&self) -> bool {
        true
    }

    fn rank_of(m: &Matrix<Self>) -> usize {
        numeric::rank(m)
    }

    fn nullspace_of(m: &Matrix<Self>) -> Matrix<Self> {
        numeric::nullspace(m)
    }

    fn column_basis_of(m: &Matrix<Self>) -> Matrix<Self> {
        numeric::column_basis(m)
    }

    fn nullspace_above(m: &Matrix<Self>, floor: f64) -> Matrix<Self> {
        numeric::nullspace_with_floor(m, floor)
    }

    fn spectral_norm(m: &Matrix<Self>) -> f64 {
        numeric::singular_values(&numeric::to_na(m))
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

impl ComplexScalar for C64 {
    type Real = f64;

    fn from_parts(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn im(&self) -> f64 {
        self.im
    }
}

/// Parse `"p/q"`, `"p"` or a finite decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(p) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(p));
    }
    // decimal with optional exponent
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if shift >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-shift) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Canonical `"p/q"` (or `"p"` when q = 1) rendering.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Runtime-tagged scalar used at the I/O boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyScalar {
    Rational(Rational),
    Gaussian(Gaussian),
    Real(f64),
    Complex(C64),
}

impl AnyScalar {
    pub fn backend(&self) -> Backend {
        match self {
            AnyScalar::Rational(_) => Backend::Rational,
            AnyScalar::Gaussian(_) => Backend::GaussianRational,
            AnyScalar::Real(_) => Backend::FloatReal,
            AnyScalar::Complex(_) => Backend::FloatComplex,
        }
    }
}

/// Backend-checked equality.
pub fn scalar_eq(a: &AnyScalar, b: &AnyScalar) -> Result<bool> {
    match (a, b) {
        (AnyScalar::Rational(x), AnyScalar::Rational(y)) => Ok(x.scalar_eq(y)),
        (AnyScalar::Gaussian(x), AnyScalar::Gaussian(y)) => Ok(x.scalar_eq(y)),
        (AnyScalar::Real(x), AnyScalar::Real(y)) => Ok(x.scalar_eq(y)),
        (AnyScalar::Complex(x), AnyScalar::Complex(y)) => Ok(x.scalar_eq(y)),
        _ => Err(Error::BackendMismatch(
            a.backend().name(),
            b.backend().name(),
        )),
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_equality_is_lowest_terms() {
        assert!(scalar_eq(
            &AnyScalar::Rational(rat(1, 2)),
            &AnyScalar::Rational(rat(2, 4))
        )
        .unwrap());
        assert!(!scalar_eq(
            &AnyScalar::Rational(rat(1, 2)),
            &AnyScalar::Rational(rat(1, 3))
        )
        .unwrap());
        assert_eq!(rat(2, -4).denom(), &BigInt::from(2));
    }

    #[test]
    fn float_equality_within_tolerance() {
        let eps = tolerance();
        assert_eq!(eps, DEFAULT_TOLERANCE);
        assert!(1.0f64.scalar_eq(&(1.0 + eps / 2.0)));
        assert!(!1.0f64.scalar_eq(&(1.0 + 10.0 * eps)));
        assert!(1e6f64.scalar_eq(&(1e6 + 1e-4)));
    }

    #[test]
    fn mismatched_backends_are_rejected() {
        let err = scalar_eq(&AnyScalar::Real(1.0), &AnyScalar::Rational(rat(1, 1))).unwrap_err();
        assert!(matches!(err, Error::BackendMismatch(..)));
    }

    #[test]
    fn parses_rational_text() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5e2").unwrap(), rat(-150, 1));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(4, -6)), "-2/3");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn squares_and_positivity() {
        assert!(rat(9, 4).is_square_in_field());
        assert!(!rat(2, 1).is_square_in_field());
        assert!(!rat(-1, 1).is_square_in_field());
        assert!(rat(1, 3).is_positive_real());
        assert!(!Gaussian::new(rat(1, 1), rat(1, 1)).is_positive_real());
        assert!(!(-2.0f64).is_square_in_field());
        assert!(C64::new(2.0, 0.0).is_positive_real());
        assert_eq!(RealScalar::sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(RealScalar::sqrt(&rat(2, 1)), None);
        let (x, y) = rat(5, 9).two_squares().unwrap();
        assert_eq!(x.clone() * x + y.clone() * y, rat(5, 9));
        assert_eq!(rat(3, 1).two_squares(), None);
        assert_eq!(RealScalar::sqrt(&4.0f64), Some(2.0));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(set_tolerance(0.0).is_err());
        assert!(set_tolerance(f64::NAN).is_err());
    }
}
