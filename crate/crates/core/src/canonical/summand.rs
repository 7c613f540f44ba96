use std::cmp::Ordering;

use crate::blocks::{jordan, p_block, q_block, realified_jordan};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, C64};

/// Parameter block `Phi` of a hyperbolic summand.
#[derive(Debug, Clone, PartialEq)]
pub enum Phi<S> {
    /// `J_n(a)`.
    Jordan { a: S },
    /// `J_{n/2}(a + bi)` realified to size `n`.
    Realified { a: S, b: S },
}

/// One block-direct summand of a canonical form.
///
/// `n` is the half size: every summand occupies `2n` rows. For a hyperbolic
/// summand it is the size of `Phi`; for `P_n` and `Q_n(c)` it is their index.
#[derive(Debug, Clone, PartialEq)]
pub enum Summand<S> {
    Hyperbolic { n: usize, phi: Phi<S> },
    P { n: usize, sign: i8 },
    Q { n: usize, sign: i8, c: S },
}

/// Which list of summands a decomposition is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummandList {
    /// Algebraically closed ground field: `P_n` carry no sign and `J_n(a)`
    /// is determined up to `a -> -a`.
    Complex,
    /// Real closed ground field: signed `P_n`, signed `Q_n(c)`.
    Real,
}

impl<S> Summand<S> {
    /// The same summand with every parameter passed through `f`.
    pub fn map_params<U>(&self, f: impl Fn(&S) -> U) -> Summand<U> {
        match self {
            Summand::Hyperbolic {
                n,
                phi: Phi::Jordan { a },
            } => Summand::Hyperbolic {
                n: *n,
                phi: Phi::Jordan { a: f(a) },
            },
            Summand::Hyperbolic {
                n,
                phi: Phi::Realified { a, b },
            } => Summand::Hyperbolic {
                n: *n,
                phi: Phi::Realified { a: f(a), b: f(b) },
            },
            Summand::P { n, sign } => Summand::P { n: *n, sign: *sign },
            Summand::Q { n, sign, c } => Summand::Q {
                n: *n,
                sign: *sign,
                c: f(c),
            },
        }
    }
}

impl<S: Scalar> Summand<S> {
    pub fn half(&self) -> usize {
        match self {
            Summand::Hyperbolic { n, .. } | Summand::P { n, .. } | Summand::Q { n, .. } => *n,
        }
    }

    pub fn size(&self) -> usize {
        2 * self.half()
    }

    /// `+1` for hyperbolic summands.
    pub fn sign(&self) -> i8 {
        match self {
            Summand::Hyperbolic { .. } => 1,
            Summand::P { sign, .. } | Summand::Q { sign, .. } => *sign,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Summand::Hyperbolic { .. } => "hyperbolic",
            Summand::P { .. } => "P",
            Summand::Q { .. } => "Q",
        }
    }

    /// Named scalar parameters in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, S)> {
        match self {
            Summand::Hyperbolic {
                phi: Phi::Jordan { a },
                ..
            } => vec![("a", a.clone())],
            Summand::Hyperbolic {
                phi: Phi::Realified { a, b },
                ..
            } => vec![("a", a.clone()), ("b", b.clone())],
            Summand::P { .. } => Vec::new(),
            Summand::Q { c, .. } => vec![("c", c.clone())],
        }
    }

    pub fn phi_matrix(&self) -> Option<Matrix<S>> {
        match self {
            Summand::Hyperbolic {
                n,
                phi: Phi::Jordan { a },
            } => Some(jordan(*n, a)),
            Summand::Hyperbolic {
                n,
                phi: Phi::Realified { a, b },
            } => Some(realified_jordan(n / 2, a, b)),
            _ => None,
        }
    }

    /// The symmetric matrix of the summand (its `B`-part is `Omega_n`).
    pub fn symmetric_block(&self) -> Matrix<S> {
        let signed = |m: Matrix<S>, s: i8| if s < 0 { -m } else { m };
        match self {
            Summand::Hyperbolic { n, .. } => {
                let phi = self.phi_matrix().expect("hyperbolic");
                let mut m = Matrix::zeros(2 * n, 2 * n);
                m.set_block(0, *n, &phi);
                m.set_block(*n, 0, &phi.transpose());
                m
            }
            Summand::P { n, sign } => signed(p_block(*n), *sign),
            Summand::Q { n, sign, c } => signed(q_block(*n, c), *sign),
        }
    }

    /// The Hamiltonian matrix of the summand: `diag(Phi, -Phi^T)` for
    /// hyperbolic summands and `Omega_n` times the symmetric block otherwise.
    pub fn hamiltonian_block(&self) -> Matrix<S> {
        match self {
            Summand::Hyperbolic { .. } => {
                let phi = self.phi_matrix().expect("hyperbolic");
                Matrix::direct_sum(&[phi.clone(), -phi.transpose()])
            }
            _ => &Matrix::omega(self.half()) * &self.symmetric_block(),
        }
    }

    /// Symplectic `D` with `D^{-1} (Omega X) D` equal to the Hamiltonian
    /// block, where `X` is the symmetric block.
    pub fn hamiltonian_correction(&self) -> Matrix<S> {
        let n = self.half();
        match self {
            Summand::Hyperbolic { phi, .. } => {
                let r = match phi {
                    Phi::Jordan { .. } => reversal(n),
                    Phi::Realified { .. } => {
                        let e = Matrix::diagonal(&[S::one(), -S::one()]);
                        let k = n / 2;
                        let mut r = Matrix::zeros(n, n);
                        for b in 0..k {
                            r.set_block(2 * b, 2 * (k - 1 - b), &e);
                        }
                        r
                    }
                };
                Matrix::direct_sum(&[r.clone(), r])
            }
            _ => Matrix::identity(2 * n),
        }
    }

    /// The summand describing the negated form: signs of `P` and `Q` flip.
    pub fn negated(&self) -> Self {
        match self {
            Summand::Hyperbolic { .. } => self.clone(),
            Summand::P { n, sign } => Summand::P { n: *n, sign: -sign },
            Summand::Q { n, sign, c } => Summand::Q {
                n: *n,
                sign: -sign,
                c: c.clone(),
            },
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Summand::Hyperbolic {
                phi: Phi::Jordan { .. },
                ..
            } => 0,
            Summand::Hyperbolic {
                phi: Phi::Realified { .. },
                ..
            } => 1,
            Summand::P { .. } => 2,
            Summand::Q { .. } => 3,
        }
    }

    /// Normal order: type, `n`, sign, then parameters.
    pub fn normal_cmp(&self, other: &Self) -> Ordering {
        let key = |s: &Self| (s.rank(), s.half(), s.sign());
        key(self).cmp(&key(other)).then_with(|| {
            let flat = |s: &Self| -> Vec<f64> {
                s.params()
                    .iter()
                    .flat_map(|(_, v)| {
                        let z: C64 = v.to_c64();
                        [z.re, z.im]
                    })
                    .collect()
            };
            let (x, y) = (flat(self), flat(other));
            x.iter()
                .zip(&y)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    /// Same summand, parameters compared exactly on exact backends and
    /// within relative tolerance `tol` otherwise. Under the complex list a
    /// Jordan parameter also matches its negative.
    pub fn matches(&self, other: &Self, list: SummandList, tol: f64) -> bool {
        if self.rank() != other.rank() || self.half() != other.half() || self.sign() != other.sign()
        {
            return false;
        }
        let close = |p: &S, q: &S| {
            if S::is_exact() {
                p == q
            } else {
                let d = (p.clone() - q.clone()).magnitude();
                d <= tol * 1f64.max(p.magnitude()).max(q.magnitude())
            }
        };
        let (x, y) = (self.params(), other.params());
        let direct = x.iter().zip(&y).all(|((_, p), (_, q))| close(p, q));
        let flipped = list == SummandList::Complex
            && matches!(
                self,
                Summand::Hyperbolic {
                    phi: Phi::Jordan { .. },
                    ..
                }
            )
            && close(&x[0].1, &-y[0].1.clone());
        direct || flipped
    }
}

fn reversal<S: Scalar>(n: usize) -> Matrix<S> {
    Matrix::from_fn(
        n,
        n,
        |i, j| if i + j + 1 == n { S::one() } else { S::zero() },
    )
}
