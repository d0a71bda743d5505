//! Concrete realization of the Temperley-Lieb category on `(R^n)^{⊗k}`:
//! dense evaluation of diagrams, the tower of isometries `ι_k : H_k -> (R^n)^{⊗k}`,
//! isotypic projections and matrix-free application.

use std::collections::BTreeMap;

use faer::{Mat, MatRef, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{shape, Error, Result};
use crate::qnum::{path_multiplicity, QContext};
use crate::tensor::{self, pow};
use crate::tl::TLElement;

/// Largest number of entries of a dense operator.
pub const DENSE_CAP: usize = 2187 * 2187;
/// Largest ambient dimension `n^k` of a tower level.
pub const TOWER_CAP: usize = 6561;

/// Largest tower level allowed for a given `n`.
pub fn default_kmax(n: usize) -> usize {
    let mut k = 0;
    while pow(n, k + 1) <= TOWER_CAP {
        k += 1;
    }
    k
}

/// A dense real operator `(R^n)^{⊗legs_in} -> (R^n)^{⊗legs_out}`.
#[derive(Clone, Debug)]
pub struct DenseOp {
    pub legs_in: usize,
    pub legs_out: usize,
    pub n: usize,
    pub entries: Mat<f64>,
}

impl DenseOp {
    pub fn identity(n: usize, legs: usize) -> Self {
        let d = pow(n, legs);
        Self { legs_in: legs, legs_out: legs, n, entries: Mat::identity(d, d) }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.entries.ncols() {
            return Err(shape(self.entries.ncols(), v.len()));
        }
        Ok(mat_vec(self.entries.as_ref(), v))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.legs_in != other.legs_out || self.n != other.n {
            return Err(shape(self.legs_in, other.legs_out));
        }
        Ok(Self {
            legs_in: other.legs_in,
            legs_out: self.legs_out,
            n: self.n,
            entries: &self.entries * &other.entries,
        })
    }

    pub fn trace(&self) -> f64 {
        (0..self.entries.nrows().min(self.entries.ncols())).map(|i| self.entries[(i, i)]).sum()
    }

    /// Operator norm from the singular values.
    pub fn norm_svd(&self) -> f64 {
        self.entries
            .as_ref()
            .singular_values()
            .map(|s| s.into_iter().fold(0.0, f64::max))
            .unwrap_or(f64::NAN)
    }

    /// Operator norm by the power method on `x^T x`.
    pub fn norm_power(&self, seed: u64) -> f64 {
        let a = self.entries.as_ref();
        power_norm(a.ncols(), seed, |x| mat_vec_t(a, &mat_vec(a, x)))
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_diff(&self, other: &Mat<f64>) -> f64 {
        max_abs_diff(self.entries.as_ref(), other.as_ref())
    }
}

pub fn mat_vec(a: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    let x = MatRef::from_column_major_slice(v, v.len(), 1);
    let y = a * x;
    y.col_as_slice(0).to_vec()
}

pub fn mat_vec_t(a: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    mat_vec(a.transpose(), v)
}

pub fn max_abs_diff(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

/// Largest singular value of an operator given through its Gram map
/// `x -> A^T A x` on a space of dimension `dim`.
pub fn power_norm(dim: usize, seed: u64, gram: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut x = gaussian_vector(dim, seed);
    let nx = tensor::norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let y = gram(&x);
        let next = tensor::dot(&x, &y);
        let ny = tensor::norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        x = y.into_iter().map(|v| v / ny).collect();
        let converged = (next - lambda).abs() <= 1e-10 * next.abs();
        lambda = next;
        if converged {
            break;
        }
    }
    lambda.max(0.0).sqrt()
}

pub fn gaussian_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Something that acts on vectors of `(R^n)^{⊗legs_in}`.
pub trait Operator {
    fn legs_in(&self) -> usize;
    fn legs_out(&self) -> usize;
    fn ambient_n(&self) -> usize;
    fn apply_unchecked(&self, v: &[f64]) -> Vec<f64>;
}

impl Operator for DenseOp {
    fn legs_in(&self) -> usize {
        self.legs_in
    }
    fn legs_out(&self) -> usize {
        self.legs_out
    }
    fn ambient_n(&self) -> usize {
        self.n
    }
    fn apply_unchecked(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(self.entries.as_ref(), v)
    }
}

impl Operator for TLElement {
    fn legs_in(&self) -> usize {
        self.shape().1
    }
    fn legs_out(&self) -> usize {
        self.shape().0
    }
    fn ambient_n(&self) -> usize {
        self.delta() as usize
    }
    fn apply_unchecked(&self, v: &[f64]) -> Vec<f64> {
        let n = self.ambient_n();
        let (a, _) = self.shape();
        let mut out = vec![0.0; pow(n, a)];
        for (p, c) in self.terms() {
            let c = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
            for_each_label(p, n, |o, i| out[o] += c * v[i]);
        }
        out
    }
}

/// Matrix-free application of a diagram combination or dense operator.
pub fn apply_op<O: Operator + ?Sized>(x: &O, v: &[f64]) -> Result<Vec<f64>> {
    let expected = pow(x.ambient_n(), x.legs_in());
    if v.len() != expected {
        return Err(shape(expected, v.len()));
    }
    Ok(x.apply_unchecked(v))
}

/// Calls `f(out_index, in_index)` for every nonzero matrix entry (all equal to
/// one) of the diagram evaluated with the cup `Σ e_i ⊗ e_i`.
fn for_each_label(p: &crate::tl::Pairing, n: usize, mut f: impl FnMut(usize, usize)) {
    let (a, b) = (p.top(), p.bottom());
    let mut strides: Vec<(usize, usize)> = Vec::new();
    let stride = |x: usize| -> (usize, usize) {
        if x < a {
            (pow(n, a - 1 - x), 0)
        } else {
            (0, pow(n, b - 1 - (x - a)))
        }
    };
    for (x, y) in p.pairs() {
        let (ox, ix) = stride(x);
        let (oy, iy) = stride(y);
        strides.push((ox + oy, ix + iy));
    }
    let pairs = strides.len();
    let mut labels = vec![0usize; pairs];
    let (mut o, mut i) = (0usize, 0usize);
    loop {
        f(o, i);
        let mut pos = 0;
        loop {
            if pos == pairs {
                return;
            }
            labels[pos] += 1;
            o += strides[pos].0;
            i += strides[pos].1;
            if labels[pos] < n {
                break;
            }
            o -= n * strides[pos].0;
            i -= n * strides[pos].1;
            labels[pos] = 0;
            pos += 1;
        }
    }
}

/// Dense matrix of a diagram combination, the cup going to `Σ e_i ⊗ e_i`.
pub fn diagram_to_matrix(x: &TLElement, ctx: &QContext) -> Result<DenseOp> {
    let n = ctx.n;
    if x.delta() != ctx.delta {
        return Err(shape(format!("delta {}", ctx.delta), format!("delta {}", x.delta())));
    }
    let (a, b) = x.shape();
    let (rows, cols) = (pow(n, a), pow(n, b));
    if rows.saturating_mul(cols) > DENSE_CAP {
        return Err(Error::Resource {
            what: format!("dense operator on {b} -> {a} legs"),
            requested: rows * cols,
            cap: DENSE_CAP,
        });
    }
    let mut m = Mat::<f64>::zeros(rows, cols);
    for (p, c) in x.terms() {
        let c = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
        for_each_label(p, n, |o, i| m[(o, i)] += c);
    }
    Ok(DenseOp { legs_in: b, legs_out: a, n, entries: m })
}

/// Coordinates in `H_a ⊗ H_b` (row-major, index `s * d_b + t`) of an
/// ambient vector on `a + b` legs.
pub fn to_coords(y: &[f64], left: &Mat<f64>, right: &Mat<f64>) -> Vec<f64> {
    let (na, nb) = (left.nrows(), right.nrows());
    assert_eq!(y.len(), na * nb);
    let m = MatRef::from_column_major_slice(y, nb, na);
    let c = right.transpose() * (m * left);
    c.col_iter().flat_map(|col| col.iter().copied().collect::<Vec<_>>()).collect()
}

/// Inverse of [`to_coords`] on `H_a ⊗ H_b`.
pub fn from_coords(c: &[f64], left: &Mat<f64>, right: &Mat<f64>) -> Vec<f64> {
    let (da, db) = (left.ncols(), right.ncols());
    assert_eq!(c.len(), da * db);
    let cm = MatRef::from_column_major_slice(c, db, da);
    let y = right * (cm * left.transpose());
    y.col_iter().flat_map(|col| col.iter().copied().collect::<Vec<_>>()).collect()
}

/// `(w ⊗ id_n) c`, where the rows of `c` are indexed by `s * n + i`.
pub fn lift(w: &Mat<f64>, c: &Mat<f64>, n: usize) -> Mat<f64> {
    let d = w.ncols();
    assert_eq!(c.nrows(), d * n);
    let rows = w.nrows() * n;
    let mut out = Mat::<f64>::zeros(rows, c.ncols());
    for i in 0..n {
        let ci = Mat::from_fn(d, c.ncols(), |s, col| c[(s * n + i, col)]);
        let block = w * &ci;
        for col in 0..c.ncols() {
            for row in 0..w.nrows() {
                out[(row * n + i, col)] = block[(row, col)];
            }
        }
    }
    out
}

/// `(w ⊗ id_n)^T y` for the columns `y` of `ys`; inverse of [`lift`] on its range.
pub fn unlift(w: &Mat<f64>, ys: &Mat<f64>, n: usize) -> Mat<f64> {
    let d = w.ncols();
    assert_eq!(ys.nrows(), w.nrows() * n);
    let mut out = Mat::<f64>::zeros(d * n, ys.ncols());
    for i in 0..n {
        let yi = Mat::from_fn(w.nrows(), ys.ncols(), |row, col| ys[(row * n + i, col)]);
        let block = w.transpose() * &yi;
        for col in 0..ys.ncols() {
            for s in 0..d {
                out[(s * n + i, col)] = block[(s, col)];
            }
        }
    }
    out
}

/// Flips column signs so that the first entry of magnitude above `tol` is positive.
pub fn fix_signs(m: &mut Mat<f64>, tol: f64) {
    for j in 0..m.ncols() {
        let first = (0..m.nrows()).map(|i| m[(i, j)]).find(|x| x.abs() > tol);
        if matches!(first, Some(x) if x < 0.0) {
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

/// Orthonormal bases of `H_k ⊂ (R^n)^{⊗k}` for `k = 0..=kmax`.
#[derive(Clone, Debug)]
pub struct IsometryTower {
    pub n: usize,
    pub ctx: QContext,
    pub iotas: Vec<Mat<f64>>,
    /// `paths[k][r] = m(k, r)`.
    pub paths: Vec<Vec<u128>>,
    dims: Vec<f64>,
}

impl IsometryTower {
    pub fn build(kmax: usize, ctx: &QContext) -> Result<Self> {
        let n = ctx.n;
        let ambient = pow(n, kmax);
        if kmax > default_kmax(n) {
            return Err(Error::Resource { what: format!("tower level {kmax}"), requested: ambient, cap: TOWER_CAP });
        }
        let mut iotas = vec![Mat::<f64>::identity(1, 1)];
        if kmax >= 1 {
            iotas.push(Mat::<f64>::identity(n, n));
        }
        for k in 2..=kmax {
            let next = Self::next_level(&iotas[k - 1], &iotas[k - 2], k, ctx)?;
            iotas.push(next);
        }
        Ok(Self::from_iotas(ctx.clone(), iotas))
    }

    pub(crate) fn from_iotas(ctx: QContext, iotas: Vec<Mat<f64>>) -> Self {
        let kmax = iotas.len() - 1;
        let paths = (0..=kmax).map(|k| (0..=k).map(|r| path_multiplicity(k, r)).collect()).collect();
        let dims = tensor::dims_f64(ctx.n, 2 * kmax + 4);
        Self { n: ctx.n, ctx, iotas, paths, dims }
    }

    fn next_level(prev: &Mat<f64>, prev2: &Mat<f64>, k: usize, ctx: &QContext) -> Result<Mat<f64>> {
        let n = ctx.n;
        let (dk, d1, d2) = (ctx.dim(k), prev.ncols(), prev2.ncols());
        // columns (id_{k-2} ⊗ T_1) ι_{k-2} in H_{k-1} ⊗ H_1 coordinates
        let mut cups = Mat::<f64>::zeros(pow(n, k), d2);
        for c in 0..d2 {
            let col = tensor::cup(prev2.col_as_slice(c), n, k - 2, k - 2);
            cups.col_as_slice_mut(c).copy_from_slice(&col);
        }
        let b = unlift(prev, &cups, n);
        let ratio = ctx.dim_f64(k as i64 - 2) / ctx.dim_f64(k as i64 - 1);
        let dim = d1 * n;
        let gram = &b * b.transpose();
        let proj = Mat::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.0 } - ratio * gram[(i, j)]);
        let eig = proj
            .as_ref()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Degenerate { k, r: None, detail: format!("eigensolver: {e:?}") })?;
        let values = eig.S().column_vector();
        let mut ones = Vec::new();
        for i in 0..dim {
            let x = values[i];
            if (0.9..=1.1).contains(&x) {
                ones.push(i);
            } else if !(-0.1..=0.1).contains(&x) {
                return Err(Error::Degenerate { k, r: None, detail: format!("eigenvalue {x} not near 0 or 1") });
            }
        }
        if ones.len() != dk {
            return Err(Error::Degenerate {
                k,
                r: None,
                detail: format!("found {} unit eigenvalues, expected {dk}", ones.len()),
            });
        }
        let u = eig.U();
        let v = Mat::from_fn(dim, dk, |i, j| u[(i, ones[j])]);
        let mut iota = lift(prev, &v, n);
        fix_signs(&mut iota, 1e-10);
        Ok(iota)
    }

    pub fn kmax(&self) -> usize {
        self.iotas.len() - 1
    }

    pub fn iota(&self, k: usize) -> Result<&Mat<f64>> {
        self.iotas.get(k).ok_or_else(|| Error::Resource {
            what: format!("tower level {k}"),
            requested: k,
            cap: self.kmax(),
        })
    }

    pub fn dim(&self, k: usize) -> usize {
        self.ctx.dim(k)
    }

    /// `U_j(n)` as doubles, long enough for every matrix-free projection
    /// the tower's levels lead to.
    pub fn dims_f64(&self) -> &[f64] {
        &self.dims
    }

    /// Matrix-free `P_k` on legs `off..off + k` of a vector on `legs` legs.
    pub fn project(&self, v: &[f64], legs: usize, off: usize, k: usize) -> Vec<f64> {
        if k <= self.dims.len() {
            tensor::jw_apply(v, self.n, legs, off, k, &self.dims)
        } else {
            tensor::jw_apply(v, self.n, legs, off, k, &tensor::dims_f64(self.n, k + 1))
        }
    }

    /// `J_k = ι_k^T R ι_k`, with `R` reversing the legs.
    pub fn reversal(&self, k: usize) -> Result<Mat<f64>> {
        let iota = self.iota(k)?;
        let mut rev = Mat::<f64>::zeros(iota.nrows(), iota.ncols());
        for c in 0..iota.ncols() {
            let col = tensor::reverse_legs(iota.col_as_slice(c), self.n, k);
            rev.col_as_slice_mut(c).copy_from_slice(&col);
        }
        Ok(iota.transpose() * &rev)
    }

    /// `φ^{s,1}_r` in coordinates of `H_s ⊗ H_1`, for `r = s ± 1`.
    pub fn step_isometry(&self, s: usize, r: usize) -> Result<Mat<f64>> {
        let n = self.n;
        let is = self.iota(s)?;
        if r == s + 1 {
            return Ok(unlift(is, self.iota(r)?, n));
        }
        if r + 1 != s {
            return Err(Error::InvalidArgument(format!("no step from {s} to {r}")));
        }
        let ir = self.iota(r)?;
        let mut cups = Mat::<f64>::zeros(pow(n, s + 1), ir.ncols());
        for c in 0..ir.ncols() {
            let col = tensor::cup(ir.col_as_slice(c), n, r, r);
            cups.col_as_slice_mut(c).copy_from_slice(&col);
        }
        let mut phi = unlift(is, &cups, n);
        let scale = (self.dims[r] / self.dims[s]).sqrt();
        for j in 0..phi.ncols() {
            for i in 0..phi.nrows() {
                phi[(i, j)] *= scale;
            }
        }
        Ok(phi)
    }

    /// Isometries `H_r -> (R^n)^{⊗k}`, one per path `0 -> r` of length `k`.
    pub fn path_isometries(&self, k: usize, r: usize) -> Result<Vec<Mat<f64>>> {
        if r > k || (k - r) % 2 == 1 {
            return Ok(Vec::new());
        }
        let ambient = pow(self.n, k);
        if ambient * ambient > DENSE_CAP {
            return Err(Error::Resource { what: format!("paths into {k} legs"), requested: ambient * ambient, cap: DENSE_CAP });
        }
        let mut layer: BTreeMap<usize, Vec<Mat<f64>>> = BTreeMap::new();
        layer.insert(0, vec![Mat::identity(1, 1)]);
        for step in 1..=k {
            let left = k - step;
            let mut next = BTreeMap::new();
            for t in (0..=step.min(self.kmax())).filter(|&t| (step - t) % 2 == 0 && t.abs_diff(r) <= left) {
                let mut ws = Vec::new();
                for s in [t.checked_sub(1), Some(t + 1)].into_iter().flatten() {
                    let Some(prev) = layer.get(&s) else { continue };
                    let phi = self.step_isometry(s, t)?;
                    ws.extend(prev.iter().map(|w| lift(w, &phi, self.n)));
                }
                next.insert(t, ws);
            }
            layer = next;
        }
        Ok(layer.remove(&r).unwrap_or_default())
    }
}

/// `Q^k_r`, the projection onto the `H_r`-isotypic part of `(R^n)^{⊗k}`.
/// Returns `(projection, admissible)`; parity violations give zero.
pub fn isotypic_projection(k: usize, r: usize, tower: &IsometryTower) -> Result<(DenseOp, bool)> {
    let n = tower.n;
    let d = pow(n, k);
    let mut q = Mat::<f64>::zeros(d, d);
    let admissible = r <= k && (k - r) % 2 == 0;
    if admissible {
        for w in tower.path_isometries(k, r)? {
            q += &w * w.transpose();
        }
    }
    Ok((DenseOp { legs_in: k, legs_out: k, n, entries: q }, admissible))
}
