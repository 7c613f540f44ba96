//! Floating-point kernels: SVD-based rank and kernels, a reorderable complex
//! Schur form, pseudospectral eigenvalue clustering and Hermitian inertia.

use nalgebra::DMatrix;

use crate::matrix::Matrix;
use crate::scalar::{tolerance, C64};

/// Relative gap between consecutive singular values that overrides the
/// plain threshold when it sits close to it.
const RANK_GAP: f64 = 1e3;

pub fn to_na(m: &Matrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<C64>) -> Matrix<C64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn real_to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn real_from_na(m: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank of a descending singular-value list.
///
/// The base rule counts values above `eps * max(1, s_1)`. When a gap wider
/// than [`RANK_GAP`] straddles a value within three orders of magnitude of
/// that threshold, the split is moved to the gap.
pub fn rank_from_singular_values(sv: &[f64]) -> usize {
    let Some(&top) = sv.first() else {
        return 0;
    };
    let tau = tolerance() * top.max(1.0);
    let base = sv.iter().filter(|&&s| s > tau).count();
    let mut best: Option<(f64, usize)> = None;
    for k in 0..sv.len().saturating_sub(1) {
        let below = sv[k + 1];
        let ratio = if below > 0.0 {
            sv[k] / below
        } else {
            f64::INFINITY
        };
        let near = sv[k] >= tau / RANK_GAP && below <= tau * RANK_GAP;
        if near && ratio > RANK_GAP && sv[k] > 0.0 && best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, k + 1));
        }
    }
    best.map_or(base, |(_, r)| r)
}

/// [`rank_from_singular_values`], additionally treating singular values at
/// or below `floor` as zero.
pub fn rank_above(sv: &[f64], floor: f64) -> usize {
    rank_from_singular_values(sv).min(sv.iter().filter(|&&s| s > floor).count())
}

pub fn rank(m: &Matrix<C64>) -> usize {
    rank_from_singular_values(&singular_values(&to_na(m)))
}

fn padded_square(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (r, c) = m.shape();
    if r >= c {
        return m.clone();
    }
    let mut out = DMatrix::zeros(c, c);
    out.view_mut((0, 0), (r, c)).copy_from(m);
    out
}

/// Orthonormal kernel basis (columns), by SVD.
pub fn nullspace_na(m: &DMatrix<C64>) -> DMatrix<C64> {
    nullspace_floor_na(m, 0.0)
}

/// Kernel basis treating singular values at or below `floor` as zero.
pub fn nullspace_floor_na(m: &DMatrix<C64>, floor: f64) -> DMatrix<C64> {
    let c = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(c, c);
    }
    let sq = padded_square(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let r = rank_above(&sv, floor);
    let idx = &order[r..];
    DMatrix::from_fn(c, idx.len(), |i, j| v_t[(idx[j], i)].conj())
}

/// Orthonormal basis of the column space, by SVD.
pub fn column_basis_na(m: &DMatrix<C64>) -> DMatrix<C64> {
    let r0 = m.nrows();
    if m.ncols() == 0 || r0 == 0 {
        return DMatrix::zeros(r0, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let r = rank_from_singular_values(&sv);
    DMatrix::from_fn(r0, r, |i, j| u[(i, order[j])])
}

pub fn nullspace(m: &Matrix<C64>) -> Matrix<C64> {
    from_na(&nullspace_na(&to_na(m)))
}

pub fn column_basis(m: &Matrix<C64>) -> Matrix<C64> {
    from_na(&column_basis_na(&to_na(m)))
}

pub fn nullspace_with_floor(m: &Matrix<C64>, floor: f64) -> Matrix<C64> {
    from_na(&nullspace_floor_na(&to_na(m), floor))
}

/// Signs `(positive, negative)` of the `count` eigenvalues of largest modulus
/// of a Hermitian matrix. `None` unless they exceed the rest by `gap`.
pub fn dominant_signs(h: &DMatrix<C64>, count: usize, gap: f64) -> Option<(usize, usize)> {
    let (mut vals, _) = hermitian_eigen(h);
    if count > vals.len() {
        return None;
    }
    vals.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let top = vals.first().map_or(0.0, |v| v.abs());
    let smallest_kept = if count == 0 {
        f64::INFINITY
    } else {
        vals[count - 1].abs()
    };
    let largest_dropped = vals.get(count).map_or(0.0, |v| v.abs());
    if smallest_kept <= tolerance() * top.max(f64::MIN_POSITIVE)
        || smallest_kept <= gap * largest_dropped
    {
        return None;
    }
    let p = vals[..count].iter().filter(|&&v| v > 0.0).count();
    Some((p, count - p))
}

/// Real orthonormal kernel basis.
pub fn real_nullspace(m: &Matrix<f64>) -> Matrix<f64> {
    let c = m.cols();
    if m.rows() == 0 {
        return Matrix::identity(c);
    }
    let a = real_to_na(m);
    let sq = if a.nrows() >= c {
        a
    } else {
        let mut out = DMatrix::zeros(c, c);
        out.view_mut((0, 0), a.shape()).copy_from(&a);
        out
    };
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let r = rank_from_singular_values(&sv);
    let idx = &order[r..];
    Matrix::from_fn(c, idx.len(), |i, j| v_t[(idx[j], i)])
}

/// Real orthonormal column-space basis.
pub fn real_column_basis(m: &Matrix<f64>) -> Matrix<f64> {
    let r0 = m.rows();
    if m.cols() == 0 || r0 == 0 {
        return Matrix::zeros(r0, 0);
    }
    let svd = real_to_na(m).svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let r = rank_from_singular_values(&sv);
    Matrix::from_fn(r0, r, |i, j| u[(i, order[j])])
}

/// Smallest singular value of `m - z I`.
pub fn sigma_min_shifted(m: &DMatrix<C64>, z: C64) -> f64 {
    let n = m.nrows();
    let mut s = m.clone();
    for i in 0..n {
        s[(i, i)] -= z;
    }
    s.svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Complex Schur form `M = Q T Q*` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

impl Schur {
    /// Shifted retries recover from the QR iteration stalling on spectra
    /// symmetric about the origin.
    pub fn new(m: &DMatrix<C64>) -> Schur {
        let n = m.nrows();
        let scale = m.norm().max(1.0);
        let limit = 200 * n.max(1);
        let (q, mut t) = [0.0, 0.137, -0.291, 0.613]
            .iter()
            .find_map(|&k| {
                let shift = C64::new(k, 0.7 * k) * scale;
                let shifted = m + DMatrix::identity(n, n) * shift;
                nalgebra::linalg::Schur::try_new(shifted, f64::EPSILON, limit).map(|s| {
                    let (q, t) = s.unpack();
                    (q, t - DMatrix::identity(n, n) * shift)
                })
            })
            .unwrap_or_else(|| m.clone().schur().unpack());
        for j in 0..n {
            for i in j + 1..n {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Schur { q, t }
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Exchange diagonal entries `k` and `k + 1` by a unitary rotation.
    fn swap_adjacent(&mut self, k: usize) {
        let n = self.t.nrows();
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        let t12 = self.t[(k, k + 1)];
        let v0 = t12;
        let v1 = t22 - t11;
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        if norm == 0.0 {
            return;
        }
        let c = v0 / norm;
        let s = v1 / norm;
        // G = [[c, -conj(s)], [s, conj(c)]]; its first column is the eigenvector for t22.
        let g = [[c, -s.conj()], [s, c.conj()]];
        for j in 0..n {
            let a = self.t[(k, j)];
            let b = self.t[(k + 1, j)];
            self.t[(k, j)] = g[0][0].conj() * a + g[1][0].conj() * b;
            self.t[(k + 1, j)] = g[0][1].conj() * a + g[1][1].conj() * b;
        }
        for i in 0..n {
            let a = self.t[(i, k)];
            let b = self.t[(i, k + 1)];
            self.t[(i, k)] = a * g[0][0] + b * g[1][0];
            self.t[(i, k + 1)] = a * g[0][1] + b * g[1][1];
            let a = self.q[(i, k)];
            let b = self.q[(i, k + 1)];
            self.q[(i, k)] = a * g[0][0] + b * g[1][0];
            self.q[(i, k + 1)] = a * g[0][1] + b * g[1][1];
        }
        self.t[(k + 1, k)] = C64::new(0.0, 0.0);
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
    }

    /// Reorder so that the diagonal entries flagged in `select` come first,
    /// preserving relative order within both groups. Returns how many were
    /// selected.
    pub fn reorder(&mut self, select: &[bool]) -> usize {
        let mut flags = select.to_vec();
        let mut placed = 0;
        for i in 0..flags.len() {
            if flags[i] {
                let mut pos = i;
                while pos > placed {
                    self.swap_adjacent(pos - 1);
                    flags.swap(pos - 1, pos);
                    pos -= 1;
                }
                placed += 1;
            }
        }
        placed
    }
}

/// Groups eigenvalue indices into clusters whose members are joined by a
/// path inside the `eta`-pseudospectrum of `m` (segments between eigenvalues
/// on which `sigma_min(m - zI) <= eta` at every sample point).
pub fn pseudospectral_clusters(m: &DMatrix<C64>, eigs: &[C64], eta: f64) -> Vec<Vec<usize>> {
    const SAMPLES: usize = 8;
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(((eigs[i] - eigs[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut failed: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for (_, i, j) in pairs {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri == rj {
            continue;
        }
        let key = (ri.min(rj), ri.max(rj));
        if failed.contains(&key) {
            continue;
        }
        let (a, b) = (eigs[i], eigs[j]);
        // midpoint first: most separated pairs fail there
        let mut ts = vec![0.5];
        ts.extend(
            (1..SAMPLES)
                .map(|k| k as f64 / SAMPLES as f64)
                .filter(|&t| t != 0.5),
        );
        let connected = ts
            .iter()
            .all(|&t| sigma_min_shifted(m, a + (b - a) * t) <= eta);
        if connected {
            parent[ri] = rj;
        } else {
            failed.insert(key);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let e = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Positive/negative/zero counts of a Hermitian matrix, treating eigenvalues
/// with modulus at most `eps * max(1, max |eigenvalue|)` as zero. Returns
/// `None` when an eigenvalue falls in the ambiguous band around that cutoff.
pub fn hermitian_inertia(h: &DMatrix<C64>) -> Option<(usize, usize, usize)> {
    let (vals, _) = hermitian_eigen(h);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tau = tolerance() * top.max(1.0);
    let mut counts = (0, 0, 0);
    for v in vals {
        if v.abs() <= tau {
            counts.2 += 1;
        } else if v.abs() <= tau * RANK_GAP {
            return None;
        } else if v > 0.0 {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    Some(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rank_and_kernels() {
        let m: Matrix<C64> = Matrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = nullspace(&m);
        assert_eq!(k.cols(), 2);
        assert!((&m * &k).max_abs() < 1e-12);
        assert_eq!(column_basis(&m).cols(), 1);
        let r: Matrix<f64> = Matrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        assert_eq!(real_nullspace(&r).cols(), 1);
        assert_eq!(real_column_basis(&r).cols(), 1);
    }

    #[test]
    fn gap_rule_moves_the_split_near_threshold() {
        assert_eq!(rank_from_singular_values(&[1.0, 0.5, 1e-17]), 2);
        assert_eq!(rank_from_singular_values(&[1.0, 5e-9, 1e-15]), 1);
        assert_eq!(rank_from_singular_values(&[1.0, 2e-7, 1e-16]), 2);
        assert_eq!(rank_from_singular_values(&[1.0, 1e-4]), 2);
        assert_eq!(rank_from_singular_values(&[1.0, 5e-10, 4e-10]), 1);
        assert_eq!(rank_from_singular_values(&[]), 0);
    }

    #[test]
    fn schur_reordering_keeps_similarity() {
        let m = DMatrix::from_fn(4, 4, |i, j| {
            c(((i * 3 + j * 7) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64)
        });
        let mut s = Schur::new(&m);
        let eig = s.eigenvalues();
        let sel = [false, true, false, true];
        assert_eq!(s.reorder(&sel), 2);
        let back = &s.q * &s.t * s.q.adjoint();
        assert!((back - &m).norm() < 1e-10);
        assert!((s.t[(0, 0)] - eig[1]).norm() < 1e-10);
        assert!((s.t[(1, 1)] - eig[3]).norm() < 1e-10);
        for j in 0..4 {
            for i in j + 1..4 {
                assert_eq!(s.t[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn clusters_join_defective_eigenvalues() {
        // J_3(1) (+) (5): the perturbed triple must form one cluster
        let mut m = DMatrix::from_element(4, 4, c(0.0, 0.0));
        for i in 0..3 {
            m[(i, i)] = c(1.0, 0.0);
        }
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 2)] = c(1.0, 0.0);
        m[(3, 3)] = c(5.0, 0.0);
        m[(2, 0)] = c(1e-12, 0.0);
        let eigs = Schur::new(&m).eigenvalues();
        let groups = pseudospectral_clusters(&m, &eigs, 1e-9 * m.norm());
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().any(|g| g.len() == 3));
    }

    #[test]
    fn inertia_counts() {
        let h = DMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([2.0, -1.0, 0.0][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert_eq!(hermitian_inertia(&h), Some((1, 1, 1)));
        let amb = DMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c([1.0, 1e-8][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert_eq!(hermitian_inertia(&amb), None);
    }
}
