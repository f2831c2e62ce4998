//! Small dense linear-algebra helpers shared by the geometric modules.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

/// Error-free product: returns `(p, e)` with `p + e == a * b` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum: returns `(s, e)` with `s + e == a + b` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dot product in twice the working precision (Ogita-Rump-Oishi Dot2).
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (p, ep) = two_prod(*a, *b);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// Bilinear form `x^T B y`; the final contraction is compensated.
pub fn form_value(b: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let by = b * y;
    dot2(x.as_slice(), by.as_slice())
}

/// Singular values (descending) and matching right singular vectors of `m`.
///
/// Wide matrices are padded with zero rows so that a full basis of right
/// singular vectors is always returned.
pub fn right_singular(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut pairs: Vec<(f64, DVector<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, vt.row(i).transpose()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.into_iter().unzip()
}

/// Unit vector spanning (approximately) the kernel of `m`: the right singular
/// vector of the smallest singular value, together with all singular values.
pub fn null_vector(m: &DMatrix<f64>) -> (DVector<f64>, Vec<f64>) {
    let (s, v) = right_singular(m);
    let last = v.last().cloned().expect("non-empty matrix");
    (last, s)
}

/// Orthonormal basis of the span of `vectors`, keeping directions whose
/// singular value exceeds `ratio` times the largest one.
pub fn span_basis(vectors: &[DVector<f64>], ratio: f64) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let d = vectors[0].len();
    let m = DMatrix::from_fn(vectors.len(), d, |i, j| vectors[i][j]);
    let (s, v) = right_singular(&m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Vec::new();
    }
    s.iter()
        .zip(v)
        .take(vectors.len().min(d))
        .filter(|(sv, _)| **sv > ratio * top)
        .map(|(_, v)| v)
        .collect()
}

/// Numerical rank of a list of vectors at relative threshold `ratio`.
pub fn rank(vectors: &[DVector<f64>], ratio: f64) -> usize {
    span_basis(vectors, ratio).len()
}

/// Least-squares coefficients `c` minimizing `|sum c_i v_i - target|`,
/// together with the residual norm.
pub fn least_squares(vectors: &[DVector<f64>], target: &DVector<f64>) -> (DVector<f64>, f64) {
    let d = target.len();
    let m = DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j][i]);
    let svd = m.clone().svd(true, true);
    let c = svd
        .solve(target, 1e-13 * svd.singular_values.max())
        .unwrap_or_else(|_| DVector::zeros(vectors.len()));
    let res = (&m * &c - target).norm();
    (c, res)
}

/// Roots of `a s^2 + 2 h s + c = 0` computed without cancellation, or `None`
/// when the discriminant is negative or the leading coefficient vanishes.
pub fn quadratic_roots(a: f64, h: f64, c: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return None;
    }
    let disc = h.mul_add(h, -a * c);
    if disc < 0.0 {
        return None;
    }
    let q = -(h + h.signum() * disc.sqrt());
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let r1 = q / a;
    let r2 = c / q;
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Closest point to the origin in the convex hull of `points`
/// (Wolfe's algorithm). Returns the point and its barycentric weights.
pub fn min_norm_point(points: &[DVector<f64>]) -> (DVector<f64>, Vec<f64>) {
    let n = points.len();
    assert!(n > 0, "min_norm_point needs at least one point");
    let scale = points
        .iter()
        .map(|p| p.norm_squared())
        .fold(0.0, f64::max)
        .max(1e-300);
    let tol = 1e-13 * scale;

    let start = (0..n)
        .min_by(|&i, &j| {
            points[i]
                .norm_squared()
                .total_cmp(&points[j].norm_squared())
        })
        .unwrap_or(0);
    let mut active = vec![start];
    let mut w = vec![1.0];
    let combine = |active: &[usize], w: &[f64]| {
        let mut x = DVector::zeros(points[0].len());
        for (k, &i) in active.iter().enumerate() {
            x += &points[i] * w[k];
        }
        x
    };

    for _major in 0..(50 * n + 50) {
        let x = combine(&active, &w);
        let xx = x.norm_squared();
        let (j, xp) = (0..n)
            .map(|j| (j, x.dot(&points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if xx - xp <= tol || active.contains(&j) {
            break;
        }
        active.push(j);
        w.push(0.0);
        for _minor in 0..(n + 5) {
            let v = affine_min_norm(points, &active);
            if v.iter().all(|&c| c > 1e-14) {
                w = v;
                break;
            }
            let mut theta = 1.0_f64;
            for k in 0..active.len() {
                if v[k] <= 1e-14 && w[k] - v[k] > 0.0 {
                    theta = theta.min(w[k] / (w[k] - v[k]));
                }
            }
            for k in 0..active.len() {
                w[k] = (1.0 - theta) * w[k] + theta * v[k];
            }
            let mut k = 0;
            while k < active.len() {
                if w[k] <= 1e-14 {
                    active.remove(k);
                    w.remove(k);
                } else {
                    k += 1;
                }
            }
            let sum: f64 = w.iter().sum();
            w.iter_mut().for_each(|c| *c /= sum);
            if active.is_empty() {
                active.push(j);
                w.push(1.0);
                break;
            }
        }
    }
    let x = combine(&active, &w);
    let mut full = vec![0.0; n];
    for (k, &i) in active.iter().enumerate() {
        full[i] = w[k];
    }
    (x, full)
}

/// Affine-hull minimum-norm coefficients of the points indexed by `active`.
fn affine_min_norm(points: &[DVector<f64>], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            m[(a, b)] = points[active[a]].dot(&points[active[b]]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let svd = m.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14 * svd.singular_values.max())
        .unwrap_or_else(|_| DVector::from_element(k + 1, 1.0 / k as f64));
    let mut v: Vec<f64> = sol.iter().take(k).copied().collect();
    let sum: f64 = v.iter().sum();
    if sum.abs() > 1e-300 {
        v.iter_mut().for_each(|c| *c /= sum);
    }
    v
}

/// Uniform-grid index for nearest-point queries on short coordinate vectors.
#[derive(Clone, Debug)]
pub struct GridIndex {
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<DVector<f64>>,
}

impl GridIndex {
    pub fn new(cell: f64) -> Self {
        Self {
            cell,
            buckets: HashMap::new(),
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &DVector<f64> {
        &self.points[i]
    }

    fn key(&self, c: &DVector<f64>) -> Vec<i64> {
        c.iter().map(|x| (x / self.cell).floor() as i64).collect()
    }

    /// Indices of stored points within `cell` of `c` (Euclidean), in insertion order.
    pub fn near(&self, c: &DVector<f64>) -> Vec<usize> {
        let key = self.key(c);
        let mut cells = vec![key.clone()];
        for i in 0..key.len() {
            let mut more = Vec::with_capacity(2 * cells.len());
            for cell in &cells {
                for d in [-1, 1] {
                    let mut k = cell.clone();
                    k[i] += d;
                    more.push(k);
                }
            }
            cells.extend(more);
        }
        let mut out: Vec<usize> = cells
            .iter()
            .filter_map(|k| self.buckets.get(k))
            .flatten()
            .copied()
            .filter(|&j| (&self.points[j] - c).norm() < self.cell)
            .collect();
        out.sort_unstable();
        out
    }

    /// Stores `c` and returns its index.
    pub fn insert(&mut self, c: DVector<f64>) -> usize {
        let k = self.key(&c);
        let id = self.points.len();
        self.buckets.entry(k).or_default().push(id);
        self.points.push(c);
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot2_recovers_cancelled_terms() {
        let x = [1e16, 1.0, -1e16];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&x, &y), 1.0);
    }

    #[test]
    fn quadratic_roots_are_accurate_for_tiny_root() {
        // s^2 - 2e8 s + 1 = 0 has roots ~5e-9 and ~2e8
        let (r1, r2) = quadratic_roots(1.0, -1e8, 1.0).unwrap();
        assert!((r1 - 5e-9).abs() < 1e-22);
        assert!((r2 - 2e8).abs() < 1e-6);
    }

    #[test]
    fn null_vector_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let (v, _) = null_vector(&m);
        assert!((v[2].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn min_norm_point_of_segment() {
        let pts = vec![
            DVector::from_vec(vec![-1.0, 1.0]),
            DVector::from_vec(vec![1.0, 1.0]),
        ];
        let (x, w) = min_norm_point(&pts);
        assert!((x[0]).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_norm_point_inside_triangle_is_origin() {
        let pts = vec![
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![-1.0, 1.0]),
            DVector::from_vec(vec![-1.0, -1.0]),
        ];
        let (x, _) = min_norm_point(&pts);
        assert!(x.norm() < 1e-12);
    }

    #[test]
    fn span_basis_detects_rank() {
        let v = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ];
        assert_eq!(rank(&v, 1e-8), 2);
    }
}
