//! Fixed vectors, middle insertions, fusion isometries `φ^{k,l}_r` and the
//! algebra of matrix coefficients `v^k_{ij}`.

use std::collections::{BTreeMap, HashMap};

use faer::Mat;

use crate::error::{Error, Result};
use crate::par;
use crate::qnum::QContext;
use crate::rep::{power_norm, to_coords, IsometryTower};
use crate::tensor::{self, pow};

/// `T_m = (P_m ⊗ P_m)(id_{m-1} ⊗ T_1 ⊗ id_{m-1}) T_{m-1}` on `2m` legs.
pub fn fixed_vector(m: usize, tower: &IsometryTower) -> Vec<f64> {
    let n = tower.n;
    let mut t = vec![1.0];
    for j in 1..=m {
        t = tensor::cup(&t, n, 2 * (j - 1), j - 1);
        t = tower.project(&t, 2 * j, 0, j);
        t = tower.project(&t, 2 * j, j, j);
    }
    t
}

/// Inserts the vector `t` (on `t_legs` legs) at leg `pos` of `v` (on `legs` legs).
pub fn insert_at(v: &[f64], n: usize, legs: usize, pos: usize, t: &[f64], t_legs: usize) -> Vec<f64> {
    let outer = pow(n, pos);
    let inner = pow(n, legs - pos);
    let mid = pow(n, t_legs);
    let mut out = vec![0.0; v.len() * mid];
    for a in 0..outer {
        for (s, &ts) in t.iter().enumerate() {
            if ts == 0.0 {
                continue;
            }
            let base = (a * mid + s) * inner;
            for c in 0..inner {
                out[base + c] = ts * v[a * inner + c];
            }
        }
    }
    out
}

/// Adjoint of [`insert_at`]: contracts legs `pos..pos + t_legs` against `t`.
pub fn contract_at(w: &[f64], n: usize, legs: usize, pos: usize, t: &[f64], t_legs: usize) -> Vec<f64> {
    let outer = pow(n, pos);
    let inner = pow(n, legs - pos - t_legs);
    let mid = pow(n, t_legs);
    let mut out = vec![0.0; outer * inner];
    for a in 0..outer {
        for (s, &ts) in t.iter().enumerate() {
            if ts == 0.0 {
                continue;
            }
            let base = (a * mid + s) * inner;
            for c in 0..inner {
                out[a * inner + c] += ts * w[base + c];
            }
        }
    }
    out
}

/// `T^m_{ab}`: `ζ ⊗ ξ -> ζ ⊗ T_m ⊗ ξ` for `v` on `(a - m) + (b - m)` legs.
pub fn middle_insertion(a: usize, b: usize, m: usize, v: &[f64], tower: &IsometryTower) -> Result<Vec<f64>> {
    let legs = check_insertion(a, b, m, v.len(), tower.n, 0)?;
    Ok(insert_at(v, tower.n, legs, a - m, &fixed_vector(m, tower), 2 * m))
}

/// `T^{m*}_{ab}`, the adjoint of [`middle_insertion`].
pub fn middle_contraction(a: usize, b: usize, m: usize, w: &[f64], tower: &IsometryTower) -> Result<Vec<f64>> {
    check_insertion(a, b, m, w.len(), tower.n, 2 * m)?;
    Ok(contract_at(w, tower.n, a + b, a - m, &fixed_vector(m, tower), 2 * m))
}

fn check_insertion(a: usize, b: usize, m: usize, len: usize, n: usize, extra: usize) -> Result<usize> {
    if m > a.min(b) {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds min({a}, {b})")));
    }
    let legs = a + b - 2 * m;
    if len != pow(n, legs + extra) {
        return Err(crate::error::shape(pow(n, legs + extra), len));
    }
    Ok(legs)
}

/// `(N^{k,l}_m)^2` from the closed product formula (Kac case, qdim = dim).
pub fn norm_squared_formula(k: usize, l: usize, m: usize, ctx: &QContext) -> f64 {
    let d = |j: i64| ctx.dim_f64(j);
    let (k, l, m) = (k as i64, l as i64, m as i64);
    let mut value = d(k) / d(k - m);
    for q in 1..=m {
        value *= 1.0 - d(k - m) * d(l - m - 1) / (d(k - q + 1) * d(l - q));
    }
    value
}

/// Operator norm of `(P_k ⊗ P_l) T^m_{kl}` on `H_r`, by power iteration,
/// matrix free.
pub fn norm_direct(k: usize, l: usize, m: usize, tower: &IsometryTower, seed: u64) -> f64 {
    let n = tower.n;
    let r = k + l - 2 * m;
    let gram = |x: &[f64]| -> Vec<f64> {
        let x = tower.project(x, r, 0, r);
        let y = tensor::cup_nested(&x, n, r, k - m, m);
        let y = tower.project(&y, k + l, 0, k);
        let y = tower.project(&y, k + l, k, l);
        let z = tensor::cap_nested(&y, n, k + l, k - m, m);
        tower.project(&z, r, 0, r)
    };
    power_norm(pow(n, r), seed, gram)
}

/// The data of the fusion channel `H_r ⊂ H_k ⊗ H_l`, `r = k + l - 2m`.
#[derive(Clone, Debug)]
pub struct FusionCell {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub r: usize,
    pub fixed: Vec<f64>,
    /// `(d_k d_l) x d_r` coordinates, rows indexed `i * d_l + a`.
    pub phi: Mat<f64>,
    pub norm_direct: f64,
    pub norm_formula: f64,
    pub flagged: bool,
}

impl FusionCell {
    pub fn usable(&self) -> Result<&Mat<f64>> {
        if self.flagged {
            return Err(Error::Degenerate {
                k: self.k,
                r: Some(self.r),
                detail: format!(
                    "norms disagree for (k, l, m) = ({}, {}, {}): direct {} vs formula {}",
                    self.k, self.l, self.m, self.norm_direct, self.norm_formula
                ),
            });
        }
        Ok(&self.phi)
    }
}

pub fn fusion_isometry(k: usize, l: usize, m: usize, tower: &IsometryTower) -> Result<FusionCell> {
    if m > k.min(l) {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds min({k}, {l})")));
    }
    let n = tower.n;
    let r = k + l - 2 * m;
    let (ik, il, ir) = (tower.iota(k)?, tower.iota(l)?, tower.iota(r)?);
    let norm_formula = norm_squared_formula(k, l, m, &tower.ctx).sqrt();
    let norm_direct = norm_direct(k, l, m, tower, 0x5eed);
    if norm_direct < 1e-12 {
        return Err(Error::Degenerate { k, r: Some(r), detail: "vanishing intertwiner".into() });
    }
    let columns = par::map(ir.ncols(), |c| {
        let y = tensor::cup_nested(ir.col_as_slice(c), n, r, k - m, m);
        to_coords(&y, ik, il)
    });
    let phi = Mat::from_fn(ik.ncols() * il.ncols(), ir.ncols(), |i, c| columns[c][i] / norm_direct);
    let flagged = (norm_direct - norm_formula).abs() > 1e-8 * norm_formula.max(1.0);
    Ok(FusionCell { k, l, m, r, fixed: fixed_vector(m, tower), phi, norm_direct, norm_formula, flagged })
}

/// Matrix-free projection of `y ∈ H_k ⊗ H_l` onto its `H_r` component:
/// `(1/N^2) (P_k ⊗ P_l) T^μ P_r T^{μ*} y` with `μ = (k + l - r)/2`.
/// `y` is assumed to lie in `H_k ⊗ H_l`.
pub fn fusion_projector(y: &[f64], k: usize, l: usize, r: usize, tower: &IsometryTower) -> Vec<f64> {
    let n = tower.n;
    if r > k + l || r < k.abs_diff(l) || (k + l - r) % 2 == 1 {
        return vec![0.0; y.len()];
    }
    let mu = (k + l - r) / 2;
    let scale = 1.0 / norm_squared_formula(k, l, mu, &tower.ctx);
    let z = tensor::cap_nested(y, n, k + l, k - mu, mu);
    let z = tower.project(&z, r, 0, r);
    let w = tensor::cup_nested(&z, n, r, k - mu, mu);
    let w = tower.project(&w, k + l, 0, k);
    let mut w = tower.project(&w, k + l, k, l);
    w.iter_mut().for_each(|x| *x *= scale);
    w
}

/// `h((v^k_{ij})^* v^l_{ab})`, by Schur orthogonality (Kac case).
pub fn haar_pair(k: usize, i: usize, j: usize, l: usize, a: usize, b: usize, tower: &IsometryTower) -> Result<f64> {
    let (dk, dl) = (tower.dim(k), tower.dim(l));
    if i >= dk || j >= dk || a >= dl || b >= dl {
        return Err(Error::InvalidArgument("coefficient index out of range".into()));
    }
    Ok(if k == l && i == a && j == b { 1.0 / dk as f64 } else { 0.0 })
}

/// An element `Σ_k Σ_{ij} X^k_{ij} v^k_{ij}` of the coefficient algebra.
#[derive(Clone, Debug, Default)]
pub struct Coeff {
    pub blocks: BTreeMap<usize, Mat<f64>>,
}

impl Coeff {
    pub fn block(k: usize, x: Mat<f64>) -> Self {
        let mut blocks = BTreeMap::new();
        blocks.insert(k, x);
        Self { blocks }
    }

    pub fn add_scaled(&mut self, c: f64, other: &Coeff) {
        for (&k, x) in &other.blocks {
            let entry = self.blocks.entry(k).or_insert_with(|| Mat::zeros(x.nrows(), x.ncols()));
            for j in 0..x.ncols() {
                for i in 0..x.nrows() {
                    entry[(i, j)] += c * x[(i, j)];
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.blocks.keys().copied().max().unwrap_or(0)
    }

    /// Largest entrywise difference, missing blocks counting as zero.
    pub fn max_diff(&self, other: &Coeff) -> f64 {
        let mut m: f64 = 0.0;
        let keys: std::collections::BTreeSet<usize> =
            self.blocks.keys().chain(other.blocks.keys()).copied().collect();
        for k in keys {
            let (a, b) = (self.blocks.get(&k), other.blocks.get(&k));
            let (rows, cols) = a.or(b).map(|x| (x.nrows(), x.ncols())).unwrap();
            for j in 0..cols {
                for i in 0..rows {
                    let x = a.map_or(0.0, |x| x[(i, j)]);
                    let y = b.map_or(0.0, |y| y[(i, j)]);
                    m = m.max((x - y).abs());
                }
            }
        }
        m
    }
}

/// Fusion data for products of coefficients up to a fixed degree.
#[derive(Clone, Debug)]
pub struct CoeffAlgebra {
    pub ctx: QContext,
    pub degree: usize,
    dims: Vec<usize>,
    /// `(k, l) -> [(r, φ^{k,l}_r)]`.
    pub(crate) cells: HashMap<(usize, usize), Vec<(usize, Mat<f64>)>>,
    /// `J_k = ι_k^T R ι_k`.
    reversals: Vec<Mat<f64>>,
}

impl CoeffAlgebra {
    /// Builds every `φ^{k,l}_r` with `k, l <= degree`; needs `2 degree <= tower.kmax()`.
    pub fn build(degree: usize, tower: &IsometryTower) -> Result<Self> {
        if 2 * degree > tower.kmax() {
            return Err(Error::Resource {
                what: format!("coefficient products of degree {degree}"),
                requested: 2 * degree,
                cap: tower.kmax(),
            });
        }
        let mut keys = Vec::new();
        for k in 0..=degree {
            for l in 0..=degree {
                for m in 0..=k.min(l) {
                    keys.push((k, l, m));
                }
            }
        }
        let built = par::map(keys.len(), |i| {
            let (k, l, m) = keys[i];
            fusion_isometry(k, l, m, tower)
        });
        let mut cells: HashMap<(usize, usize), Vec<(usize, Mat<f64>)>> = HashMap::new();
        for cell in built {
            let cell = cell?;
            let phi = cell.usable()?.clone();
            cells.entry((cell.k, cell.l)).or_default().push((cell.r, phi));
        }
        Self::from_cells(degree, tower, cells)
    }

    pub(crate) fn from_cells(
        degree: usize,
        tower: &IsometryTower,
        mut cells: HashMap<(usize, usize), Vec<(usize, Mat<f64>)>>,
    ) -> Result<Self> {
        for list in cells.values_mut() {
            list.sort_by_key(|(r, _)| *r);
        }
        let reversals = (0..=2 * degree).map(|k| tower.reversal(k)).collect::<Result<Vec<_>>>()?;
        let dims = (0..=2 * degree).map(|k| tower.dim(k)).collect();
        Ok(Self { ctx: tower.ctx.clone(), degree, dims, cells, reversals })
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn cells(&self, k: usize, l: usize) -> Result<&[(usize, Mat<f64>)]> {
        self.cells.get(&(k, l)).map(|v| v.as_slice()).ok_or_else(|| Error::Resource {
            what: format!("fusion cells ({k}, {l})"),
            requested: k.max(l),
            cap: self.degree,
        })
    }

    pub fn reversal(&self, k: usize) -> &Mat<f64> {
        &self.reversals[k]
    }

    pub fn basis(&self, k: usize, i: usize, j: usize) -> Coeff {
        let d = self.dims[k];
        Coeff::block(k, Mat::from_fn(d, d, |a, b| if a == i && b == j { 1.0 } else { 0.0 }))
    }

    pub fn one(&self) -> Coeff {
        self.basis(0, 0, 0)
    }

    pub fn product(&self, x: &Coeff, y: &Coeff) -> Result<Coeff> {
        let mut out = Coeff::default();
        for (&k, xb) in &x.blocks {
            for (&l, yb) in &y.blocks {
                let kron = kron_mat(xb, yb);
                for (r, phi) in self.cells(k, l)? {
                    let block = phi.transpose() * (&kron * phi);
                    out.add_scaled(1.0, &Coeff::block(*r, block));
                }
            }
        }
        Ok(out)
    }

    /// The involution: `(v^k_{st})^* = Σ J_{s's} J_{t't} v^k_{s't'}`.
    pub fn star(&self, x: &Coeff) -> Coeff {
        let blocks = x
            .blocks
            .iter()
            .map(|(&k, b)| {
                let j = &self.reversals[k];
                (k, j * (b * j))
            })
            .collect();
        Coeff { blocks }
    }

    /// Haar state: the coefficient of `1`.
    pub fn haar(&self, x: &Coeff) -> f64 {
        x.blocks.get(&0).map_or(0.0, |b| b[(0, 0)])
    }

    pub fn counit(&self, x: &Coeff) -> f64 {
        self.central(x, |_| 1.0)
    }

    pub fn psi(&self, x: &Coeff) -> f64 {
        self.central(x, |r| self.ctx.psi_eigenvalue(r))
    }

    /// `Σ_k w(k) Tr X^k`, the functional `v^k_{ij} -> w(k) δ_{ij}`.
    pub fn central(&self, x: &Coeff, w: impl Fn(usize) -> f64) -> f64 {
        x.blocks.iter().map(|(&k, b)| w(k) * (0..b.nrows()).map(|i| b[(i, i)]).sum::<f64>()).sum()
    }

    /// `h(x^* y)` computed from Schur orthogonality.
    pub fn inner(&self, x: &Coeff, y: &Coeff) -> f64 {
        let mut total = 0.0;
        for (k, a) in &x.blocks {
            if let Some(b) = y.blocks.get(k) {
                let mut s = 0.0;
                for j in 0..a.ncols() {
                    for i in 0..a.nrows() {
                        s += a[(i, j)] * b[(i, j)];
                    }
                }
                total += s / self.dims[*k] as f64;
            }
        }
        total
    }

    /// Matrix `[f(x^* y)]` over the basis `{v^k_{ij} : k <= degree}`, for
    /// a central functional `f(v^r_{st}) = w(r) δ_{st}`. Rows and columns are
    /// ordered by `(k, i, j)`.
    pub fn central_gram(&self, degree: usize, w: impl Fn(usize) -> f64) -> Result<Mat<f64>> {
        let offsets = self.basis_offsets(degree);
        let size = *offsets.last().unwrap();
        let mut out = Mat::<f64>::zeros(size, size);
        for k in 0..=degree {
            for l in 0..=degree {
                let (dk, dl) = (self.dims[k], self.dims[l]);
                // G = Σ_r w(r) (J_k ⊗ 1) φ_r φ_r^T, rows (i, a), cols (j, b)
                let mut g = Mat::<f64>::zeros(dk * dl, dk * dl);
                for (r, phi) in self.cells(k, l)? {
                    let c = w(*r);
                    if c != 0.0 {
                        let pp = phi * phi.transpose();
                        for j in 0..g.ncols() {
                            for i in 0..g.nrows() {
                                g[(i, j)] += c * pp[(i, j)];
                            }
                        }
                    }
                }
                let jk = &self.reversals[k];
                let jl = Mat::<f64>::identity(dl, dl);
                let jj = kron_mat(jk, &jl);
                let g = &jj * (&g * &jj);
                for i in 0..dk {
                    for j in 0..dk {
                        for a in 0..dl {
                            for b in 0..dl {
                                let row = offsets[k] + i * dk + j;
                                let col = offsets[l] + a * dl + b;
                                out[(row, col)] = g[(i * dl + a, j * dl + b)];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Start index of each degree in the basis ordering used by [`Self::central_gram`].
    pub fn basis_offsets(&self, degree: usize) -> Vec<usize> {
        let mut offsets = vec![0];
        for k in 0..=degree {
            offsets.push(offsets[k] + self.dims[k] * self.dims[k]);
        }
        offsets
    }
}

pub fn kron_mat(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Structure constants of `v^k_{ij} v^l_{ab} = Σ_{r,s,t} c[(i,j),(a,b) -> (r,s,t)] v^r_{st}`.
#[derive(Clone, Debug)]
pub struct CoeffProduct {
    pub k: usize,
    pub l: usize,
    pub dl: usize,
    pub channels: Vec<(usize, Mat<f64>)>,
}

impl CoeffProduct {
    pub fn coefficient(&self, i: usize, j: usize, a: usize, b: usize, r: usize, s: usize, t: usize) -> f64 {
        self.channels
            .iter()
            .find(|(rr, _)| *rr == r)
            .map_or(0.0, |(_, phi)| phi[(i * self.dl + a, s)] * phi[(j * self.dl + b, t)])
    }

    pub fn expand(&self, i: usize, j: usize, a: usize, b: usize) -> Coeff {
        let mut out = Coeff::default();
        for (r, phi) in &self.channels {
            let (x, y) = (i * self.dl + a, j * self.dl + b);
            let block = Mat::from_fn(phi.ncols(), phi.ncols(), |s, t| phi[(x, s)] * phi[(y, t)]);
            out.blocks.insert(*r, block);
        }
        out
    }
}

pub fn coeff_product(k: usize, l: usize, tower: &IsometryTower) -> Result<CoeffProduct> {
    let mut channels = Vec::new();
    for m in 0..=k.min(l) {
        let cell = fusion_isometry(k, l, m, tower)?;
        channels.push((cell.r, cell.usable()?.clone()));
    }
    channels.sort_by_key(|(r, _)| *r);
    Ok(CoeffProduct { k, l, dl: tower.dim(l), channels })
}
