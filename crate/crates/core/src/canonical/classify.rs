//! Reading canonical summands off the Jordan data of `H = Omega_m A`.
//!
//! Eigenvalue clusters are matched with their mirror images `-conj(mu)` and
//! conjugates. Zero and purely imaginary clusters carry signs, which are the
//! inertia of a Hermitian Gram matrix built on the top level of the Jordan
//! chains; all other clusters give hyperbolic summands.

use super::reduce::symplectic_basis;
use super::summand::{Phi, Summand};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{ComplexScalar, RealScalar, Scalar};
use crate::spectra::{lift_matrix, partition_of, EigenBlock, EigenField, Spectral};

/// Columns `(e, f)` of a transform taking the summand's coordinates to the
/// input's: `e` fills the first half of the summand, `f` the second.
pub(super) type Piece<S> = (Vec<Vec<S>>, Vec<Vec<S>>);

pub(super) struct Item<S> {
    pub summand: Summand<S>,
    pub piece: Option<Piece<S>>,
}

impl<S> Item<S> {
    fn bare(summand: Summand<S>) -> Self {
        Item {
            summand,
            piece: None,
        }
    }
}

/// For every cluster, the index of the cluster nearest to `target(mu)`.
/// The result must be an involution that preserves block sizes.
fn pair_up<E: Scalar>(blocks: &[EigenBlock<E>], target: impl Fn(&E) -> E) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        let t = target(&b.eigenvalue);
        let best = (0..blocks.len())
            .min_by(|&x, &y| {
                let dx = (blocks[x].eigenvalue.clone() - t.clone()).magnitude();
                let dy = (blocks[y].eigenvalue.clone() - t.clone()).magnitude();
                dx.total_cmp(&dy)
            })
            .expect("nonempty");
        if E::is_exact() && !blocks[best].eigenvalue.scalar_eq(&t) {
            return Err(Error::Indeterminate(
                "spectrum lacks the Hamiltonian symmetry".into(),
            ));
        }
        out.push(best);
    }
    for (i, &j) in out.iter().enumerate() {
        if out[j] != i || blocks[i].sizes != blocks[j].sizes {
            return Err(Error::Indeterminate(
                "eigenvalue clusters do not pair up".into(),
            ));
        }
    }
    Ok(out)
}

fn distinct_sizes(sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &s in sizes {
        match out.iter_mut().find(|(l, _)| *l == s) {
            Some((_, c)) => *c += 1,
            None => out.push((s, 1)),
        }
    }
    out
}

fn i_power<E: ComplexScalar>(k: usize) -> E {
    (0..k % 4).fold(E::one(), |acc, _| acc * E::i())
}

/// Numbers of `+` and `-` summands among the blocks of size `len` of one
/// cluster (`zero` selects the zero-eigenvalue recipe).
fn sign_counts<E: EigenField>(
    ae: &Matrix<E>,
    block: &EigenBlock<E>,
    stairs: &[Matrix<E>],
    len: usize,
    count: usize,
    zero: bool,
) -> Result<(usize, usize)> {
    let nr = block.restriction.shift(&block.eigenvalue);
    let xi = &stairs[len - 1];
    let form = &(&block.basis.adjoint() * ae) * &block.basis;
    let power = if zero { len - 2 } else { len - 1 };
    let mut g = &(&(&xi.adjoint() * &form) * &nr.pow(power as u32)?) * xi;
    if !zero {
        g = g.scale(&i_power(len - 1));
    }
    if !E::is_exact() {
        g = Matrix::from_fn(g.rows(), g.cols(), |i, j| {
            (g[(i, j)].clone() + g[(j, i)].conj()) * E::from_rational(&crate::scalar::rat(1, 2))
        });
    }
    let (p, q) = E::dominant_signs(&g, count).ok_or_else(|| {
        Error::Indeterminate(format!(
            "sign Gram matrix for {count} blocks of size {len} is not clearly of rank {count}"
        ))
    })?;
    let reference = if zero {
        if (len / 2 - 1).is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else if len % 2 == 1 {
        if ((len - 1) / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        -1
    };
    Ok(if reference > 0 { (p, q) } else { (q, p) })
}

/// Hermitian congruence `C^* G C = diag(d)`.
fn hermitian_diagonalize<E: ComplexScalar>(g: &Matrix<E>) -> Option<(Matrix<E>, Vec<E::Real>)> {
    let n = g.rows();
    let mut a = g.clone();
    let mut c = Matrix::<E>::identity(n);
    let floor = crate::scalar::tolerance() * g.max_abs().max(f64::MIN_POSITIVE);
    let nonzero = |z: &E| {
        if E::is_exact() {
            !z.is_zero()
        } else {
            z.magnitude() > floor
        }
    };
    let apply = |a: &mut Matrix<E>, c: &mut Matrix<E>, x: &Matrix<E>| {
        *a = &(&x.adjoint() * &*a) * x;
        *c = &*c * x;
    };
    for k in 0..n {
        let diag = (k..n).filter(|&i| nonzero(&a[(i, i)]));
        let piv = if E::is_exact() {
            diag.into_iter().next()
        } else {
            diag.max_by(|&x, &y| a[(x, x)].magnitude().total_cmp(&a[(y, y)].magnitude()))
        };
        let piv = match piv {
            Some(p) => p,
            None => {
                let (i, j) = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .find(|&(i, j)| nonzero(&a[(i, j)]))?;
                let mut x = Matrix::identity(n);
                x[(j, i)] = a[(i, j)].conj();
                apply(&mut a, &mut c, &x);
                i
            }
        };
        if piv != k {
            let mut x = Matrix::<E>::identity(n);
            x[(piv, piv)] = E::zero();
            x[(k, k)] = E::zero();
            x[(piv, k)] = E::one();
            x[(k, piv)] = E::one();
            apply(&mut a, &mut c, &x);
        }
        let mut x = Matrix::identity(n);
        for i in k + 1..n {
            x[(k, i)] = -(a[(k, i)].clone() / a[(k, k)].clone());
        }
        apply(&mut a, &mut c, &x);
    }
    Some((c, (0..n).map(|i| a[(i, i)].re()).collect()))
}

fn real_part<T, E>(v: &Matrix<E>) -> Matrix<T>
where
    T: RealScalar,
    E: ComplexScalar<Real = T>,
{
    v.map(ComplexScalar::re)
}

fn imag_part<T, E>(v: &Matrix<E>) -> Matrix<T>
where
    T: RealScalar,
    E: ComplexScalar<Real = T>,
{
    v.map(ComplexScalar::im)
}

/// Real basis of the real subspace spanned by the real and imaginary parts.
fn real_span<T, E>(v: &Matrix<E>) -> Matrix<T>
where
    T: RealScalar,
    E: ComplexScalar<Real = T>,
{
    let stacked = Matrix::hstack(&[&real_part(v), &imag_part(v)]).expect("same rows");
    T::column_basis_of(&stacked)
}

/// Split `e` and its dual `f = W (E^T Omega W)^{-1}` into groups of columns.
fn dual_pieces<S: Scalar>(e: &Matrix<S>, w: &Matrix<S>, group: usize) -> Option<Vec<Piece<S>>> {
    if e.cols() != w.cols() || !e.cols().is_multiple_of(group) {
        return None;
    }
    let omega = Matrix::omega(e.rows() / 2);
    let pairing = &(&e.transpose() * &omega) * w;
    let f = w * &pairing.inverse().ok()?;
    Some(
        (0..e.cols() / group)
            .map(|g| {
                let cols =
                    |m: &Matrix<S>| (g * group..(g + 1) * group).map(|j| m.column(j)).collect();
                (cols(e), cols(&f))
            })
            .collect(),
    )
}

fn zero_pieces<S: Scalar>(basis: &Matrix<S>) -> Option<Vec<Piece<S>>> {
    let (es, fs) = symplectic_basis(basis, &Matrix::omega(basis.rows() / 2)).ok()?;
    Some(
        es.into_iter()
            .zip(fs)
            .map(|(e, f)| (vec![e], vec![f]))
            .collect(),
    )
}

/// Attach pieces in order; all or nothing.
fn attach<S>(items: &mut [Item<S>], pieces: Option<Vec<Piece<S>>>) {
    if let Some(pieces) = pieces {
        if pieces.len() == items.len() {
            for (item, piece) in items.iter_mut().zip(pieces) {
                item.piece = Some(piece);
            }
        }
    }
}

/// Pieces for semisimple `+-Q_1(c)` summands, each tagged with its sign.
fn imaginary_pieces<T, E>(ae: &Matrix<E>, v: &Matrix<E>, c: &T) -> Option<Vec<(i8, Piece<T>)>>
where
    T: RealScalar,
    E: ComplexScalar<Real = T>,
{
    let g = &(&v.adjoint() * ae) * v;
    let (cm, d) = hermitian_diagonalize(&g)?;
    let x = v * &cm;
    let two_c = T::from_i64(2) * c.clone();
    let mut out = Vec::new();
    for (j, dj) in d.iter().enumerate() {
        let s = dj.sign();
        if s == 0 {
            return None;
        }
        let (x_re, x_im) = (two_c.clone() / dj.abs()).two_squares()?;
        let scale = E::from_parts(x_re, x_im);
        let col: Vec<E> = x.column(j).into_iter().map(|z| z * scale.clone()).collect();
        let u: Vec<T> = col.iter().map(ComplexScalar::re).collect();
        let w: Vec<T> = col
            .iter()
            .map(|z| if s > 0 { z.im() } else { -z.im() })
            .collect();
        out.push((s, (vec![u], vec![w])));
    }
    Some(out)
}

fn attach_by_sign<S>(items: &mut [Item<S>], pieces: Option<Vec<(i8, Piece<S>)>>)
where
    S: Scalar,
{
    let Some(pieces) = pieces else { return };
    let mut slots: Vec<Option<Piece<S>>> = (0..items.len()).map(|_| None).collect();
    for (s, piece) in pieces {
        match (0..items.len()).find(|&k| slots[k].is_none() && items[k].summand.sign() == s) {
            Some(k) => slots[k] = Some(piece),
            None => return,
        }
    }
    if slots.iter().all(Option::is_some) {
        for (item, slot) in items.iter_mut().zip(slots) {
            item.piece = slot;
        }
    }
}

/// Summands of the real list for a symmetric `a` of even size.
pub(super) fn classify_real<T>(a: &Matrix<T>) -> Result<Vec<Item<T>>>
where
    T: Spectral + RealScalar,
    T::Eig: ComplexScalar<Real = T>,
{
    let m = a.rows() / 2;
    let h = &Matrix::omega(m) * a;
    let ae = lift_matrix(a);
    let blocks = T::Eig::eigen_blocks(&lift_matrix(&h))?;
    let mirror = pair_up(&blocks, |z| -z.conj())?;
    let conj = pair_up(&blocks, |z| z.conj())?;
    let semisimple = blocks.iter().all(|b| b.sizes.iter().all(|&s| s == 1));
    let two = T::from_i64(2);
    let four = T::from_i64(4);
    let mut items = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let mu = &block.eigenvalue;
        let (mi, ci) = (mirror[i], conj[i]);
        match (mi == i, ci == i) {
            (true, true) => {
                let nr = block.restriction.shift(mu);
                let (sizes, stairs) = partition_of(&nr)?;
                let mut local = Vec::new();
                for (len, count) in distinct_sizes(&sizes) {
                    if len % 2 == 0 {
                        let (p, q) = sign_counts(&ae, block, &stairs, len, count, true)?;
                        local.extend((0..p).map(|_| {
                            Item::bare(Summand::P {
                                n: len / 2,
                                sign: 1,
                            })
                        }));
                        local.extend((0..q).map(|_| {
                            Item::bare(Summand::P {
                                n: len / 2,
                                sign: -1,
                            })
                        }));
                    } else {
                        if count % 2 == 1 {
                            return Err(Error::Indeterminate(format!(
                                "odd number of zero-eigenvalue blocks of odd size {len}"
                            )));
                        }
                        let zero = Phi::Jordan { a: T::zero() };
                        local.extend((0..count / 2).map(|_| {
                            Item::bare(Summand::Hyperbolic {
                                n: len,
                                phi: zero.clone(),
                            })
                        }));
                    }
                }
                if semisimple {
                    attach(&mut local, zero_pieces(&real_span(&block.basis)));
                }
                items.extend(local);
            }
            (true, false) => {
                let other = &blocks[ci].eigenvalue;
                if mu.im() <= other.im() {
                    continue;
                }
                let c = (mu.im() - other.im()) / two.clone();
                let nr = block.restriction.shift(mu);
                let (sizes, stairs) = partition_of(&nr)?;
                let mut local = Vec::new();
                for (len, count) in distinct_sizes(&sizes) {
                    let (p, q) = sign_counts(&ae, block, &stairs, len, count, false)?;
                    local.extend((0..p).map(|_| {
                        Item::bare(Summand::Q {
                            n: len,
                            sign: 1,
                            c: c.clone(),
                        })
                    }));
                    local.extend((0..q).map(|_| {
                        Item::bare(Summand::Q {
                            n: len,
                            sign: -1,
                            c: c.clone(),
                        })
                    }));
                }
                if semisimple {
                    attach_by_sign(&mut local, imaginary_pieces(&ae, &block.basis, &c));
                }
                items.extend(local);
            }
            (false, true) => {
                let other = &blocks[mi].eigenvalue;
                if mu.re() <= other.re() {
                    continue;
                }
                let a = (mu.re() - other.re()) / two.clone();
                let mut local: Vec<Item<T>> = block
                    .sizes
                    .iter()
                    .map(|&len| {
                        Item::bare(Summand::Hyperbolic {
                            n: len,
                            phi: Phi::Jordan { a: a.clone() },
                        })
                    })
                    .collect();
                if semisimple {
                    attach(
                        &mut local,
                        dual_pieces(&real_span(&block.basis), &real_span(&blocks[mi].basis), 1),
                    );
                }
                items.extend(local);
            }
            (false, false) => {
                let (m_eig, c_eig) = (&blocks[mi].eigenvalue, &blocks[ci].eigenvalue);
                if mu.re() <= m_eig.re() || mu.im() <= c_eig.im() {
                    continue;
                }
                let cm_eig = &blocks[conj[mi]].eigenvalue;
                let a = (mu.re() + c_eig.re() - m_eig.re() - cm_eig.re()) / four.clone();
                let b = (mu.im() - c_eig.im() + m_eig.im() - cm_eig.im()) / four.clone();
                let mut local: Vec<Item<T>> = block
                    .sizes
                    .iter()
                    .map(|&len| {
                        Item::bare(Summand::Hyperbolic {
                            n: 2 * len,
                            phi: Phi::Realified {
                                a: a.clone(),
                                b: b.clone(),
                            },
                        })
                    })
                    .collect();
                if semisimple {
                    let re = real_part(&block.basis);
                    let im = imag_part(&block.basis);
                    let e = Matrix::from_fn(re.rows(), 2 * re.cols(), |r, j| {
                        if j % 2 == 0 {
                            re[(r, j / 2)].clone()
                        } else {
                            -im[(r, j / 2)].clone()
                        }
                    });
                    attach(
                        &mut local,
                        dual_pieces(&e, &real_span(&blocks[mi].basis), 2),
                    );
                }
                items.extend(local);
            }
        }
    }
    Ok(items)
}

/// Summands of the complex list for a symmetric `ae` of even size.
pub(super) fn classify_complex<E: EigenField>(ae: &Matrix<E>) -> Result<Vec<Item<E>>> {
    let m = ae.rows() / 2;
    let h = &Matrix::omega(m) * ae;
    let blocks = E::eigen_blocks(&h)?;
    let mirror = pair_up(&blocks, |z| -z.clone())?;
    let semisimple = blocks.iter().all(|b| b.sizes.iter().all(|&s| s == 1));
    let mut items = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let mi = mirror[i];
        if mi == i {
            let mut local = Vec::new();
            for (len, count) in distinct_sizes(&block.sizes) {
                if len % 2 == 0 {
                    local.extend((0..count).map(|_| {
                        Item::bare(Summand::P {
                            n: len / 2,
                            sign: 1,
                        })
                    }));
                } else {
                    if count % 2 == 1 {
                        return Err(Error::Indeterminate(format!(
                            "odd number of zero-eigenvalue blocks of odd size {len}"
                        )));
                    }
                    let zero = Phi::Jordan { a: E::zero() };
                    local.extend((0..count / 2).map(|_| {
                        Item::bare(Summand::Hyperbolic {
                            n: len,
                            phi: zero.clone(),
                        })
                    }));
                }
            }
            if semisimple {
                attach(&mut local, zero_pieces(&block.basis));
            }
            items.extend(local);
            continue;
        }
        let d = block.eigenvalue.clone() - blocks[mi].eigenvalue.clone();
        let s = d.re().sign();
        if s < 0 || (s == 0 && d.im().sign() <= 0) {
            continue;
        }
        let a = d * E::from_rational(&crate::scalar::rat(1, 2));
        let mut local: Vec<Item<E>> = block
            .sizes
            .iter()
            .map(|&len| {
                Item::bare(Summand::Hyperbolic {
                    n: len,
                    phi: Phi::Jordan { a: a.clone() },
                })
            })
            .collect();
        if semisimple {
            attach(&mut local, dual_pieces(&block.basis, &blocks[mi].basis, 1));
        }
        items.extend(local);
    }
    Ok(items)
}
