//! Evaluation characters at orthogonal matrices, Brannan's multipliers, the
//! derivation `δ_X` with its cocycle, and conditional negativity of `ψ`.

use faer::{Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{shape, Error, Result};
use crate::fusion::CoeffAlgebra;
use crate::qnum::{chebyshev, chebyshev_ratio};
use crate::rep::IsometryTower;
use crate::tensor;

/// An orthogonal matrix `g` together with a tangent direction `X ∈ o_n`.
#[derive(Clone, Debug)]
pub struct OrthogonalProbe {
    pub g: Mat<f64>,
    pub x: Mat<f64>,
    /// Rotation angle when `g = g_t`.
    pub t: Option<f64>,
}

impl OrthogonalProbe {
    /// `g_t = id_{n-2} ⊕ R_t`, with `X` the generator of the rotation.
    pub fn rotation(n: usize, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("rotation needs n >= 2, got {n}")));
        }
        let mut g = Mat::<f64>::identity(n, n);
        let mut x = Mat::<f64>::zeros(n, n);
        let (a, b) = (n - 2, n - 1);
        g[(a, a)] = t.cos();
        g[(a, b)] = -t.sin();
        g[(b, a)] = t.sin();
        g[(b, b)] = t.cos();
        x[(a, b)] = -1.0;
        x[(b, a)] = 1.0;
        Ok(Self { g, x, t: Some(t) })
    }

    /// Haar-random orthogonal matrix (QR of a Gaussian matrix, signs fixed by
    /// the diagonal of `R`) and a Gaussian antisymmetric tangent.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Mat<f64> = Mat::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let qr = a.qr();
        let (q, r) = (qr.compute_Q(), qr.R());
        let g = Mat::from_fn(n, n, |i, j| q[(i, j)] * r[(j, j)].signum());
        Self { g, x: random_antisymmetric(n, &mut rng), t: None }
    }

    /// Validates `g^T g = id` within `tol` and `X^T = -X` exactly.
    pub fn new(g: Mat<f64>, x: Mat<f64>, tol: f64) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n || x.nrows() != n || x.ncols() != n {
            return Err(shape(format!("{n}x{n}"), format!("{}x{} and {}x{}", g.nrows(), g.ncols(), x.nrows(), x.ncols())));
        }
        let dev = orthogonality_defect(&g);
        if dev > tol {
            return Err(Error::InvalidArgument(format!("matrix is not orthogonal: |g^T g - id| = {dev:e}")));
        }
        if (0..n).any(|i| (0..n).any(|j| x[(i, j)] != -x[(j, i)])) {
            return Err(Error::InvalidArgument("tangent matrix is not antisymmetric".into()));
        }
        Ok(Self { g, x, t: None })
    }

    /// Reads `g` from whitespace-separated rows; `X` is set to zero.
    pub fn from_text(text: &str, tol: f64) -> Result<Self> {
        let g = parse_matrix(text)?;
        let n = g.nrows();
        Self::new(g, Mat::zeros(n, n), tol)
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.g[(i, i)]).sum()
    }
}

pub fn random_antisymmetric(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let mut x = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = StandardNormal.sample(rng);
            x[(i, j)] = v;
            x[(j, i)] = -v;
        }
    }
    x
}

/// `E_{ab} - E_{ba}` (0-based).
pub fn elementary_antisymmetric(n: usize, a: usize, b: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| {
        if (i, j) == (a, b) {
            1.0
        } else if (i, j) == (b, a) {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn orthogonality_defect(g: &Mat<f64>) -> f64 {
    let gg = g.transpose() * g;
    crate::rep::max_abs_diff(gg.as_ref(), Mat::<f64>::identity(g.nrows(), g.ncols()).as_ref())
}

/// Parses a square matrix from whitespace-separated rows; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_matrix(text: &str) -> Result<Mat<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|w| w.parse::<f64>().map_err(|e| Error::Parse(format!("{w:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::Parse(format!("expected {n} entries per row, found {}", bad.len())));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé(6) approximant.
pub fn expm(a: &Mat<f64>) -> Mat<f64> {
    const C: [f64; 7] = [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0];
    let n = a.nrows();
    let norm = (0..n).map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a * faer::Scale(0.5f64.powi(squarings));
    let id = Mat::<f64>::identity(n, n);
    let mut num = id.clone();
    let mut den = id.clone();
    let mut power = id;
    for (k, c) in C.iter().enumerate().skip(1) {
        power = &power * &scaled;
        num += &power * faer::Scale(*c);
        den += &power * faer::Scale(if k % 2 == 0 { *c } else { -*c });
    }
    use faer::linalg::solvers::Solve;
    let mut out = den.partial_piv_lu().solve(&num);
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}

fn compress<F: Fn(&[f64]) -> Vec<f64> + Sync>(iota: &Mat<f64>, op: F) -> Mat<f64> {
    let d = iota.ncols();
    let images: Vec<Vec<f64>> = crate::par::map(d, |j| op(iota.col_as_slice(j)));
    let images = Mat::from_fn(iota.nrows(), d, |i, j| images[j][i]);
    iota.transpose() * images
}

/// `u^r(g) = ι_r^T g^{⊗r} ι_r`.
pub fn corep_matrix(r: usize, g: &Mat<f64>, tower: &IsometryTower) -> Result<Mat<f64>> {
    let n = tower.n;
    if g.nrows() != n || g.ncols() != n {
        return Err(shape(format!("{n}x{n}"), format!("{}x{}", g.nrows(), g.ncols())));
    }
    let iota = tower.iota(r)?;
    let flat: Vec<f64> = (0..n * n).map(|i| g[(i / n, i % n)]).collect();
    Ok(compress(iota, |v| tensor::apply_tensor_power(v, n, r, &flat)))
}

/// `d_X u^r = ι_r^T (Σ_a id ⊗ .. ⊗ X ⊗ .. ⊗ id) ι_r`.
pub fn derivative_matrix(r: usize, x: &Mat<f64>, tower: &IsometryTower) -> Result<Mat<f64>> {
    let n = tower.n;
    if x.nrows() != n || x.ncols() != n {
        return Err(shape(format!("{n}x{n}"), format!("{}x{}", x.nrows(), x.ncols())));
    }
    let iota = tower.iota(r)?;
    let flat: Vec<f64> = (0..n * n).map(|i| x[(i / n, i % n)]).collect();
    Ok(compress(iota, |v| tensor::apply_leg_sum(v, n, r, &flat)))
}

/// The per-block eigenvalue of the multiplier at `g`, with its Chebyshev value.
#[derive(Clone, Copy, Debug)]
pub struct Compression {
    /// `Σ_k u^r_{kk}(g) / U_r(n)`.
    pub value: f64,
    /// `U_r(Tr g) / U_r(n)`.
    pub expected: f64,
}

impl Compression {
    pub fn deviation(&self) -> f64 {
        (self.value - self.expected).abs()
    }
}

pub fn multiplier_compression(r: usize, probe: &OrthogonalProbe, tower: &IsometryTower) -> Result<Compression> {
    let u = corep_matrix(r, &probe.g, tower)?;
    let tr: f64 = (0..u.nrows()).map(|i| u[(i, i)]).sum();
    let dim = tower.ctx.dim_f64(r as i64);
    Ok(Compression { value: tr / dim, expected: chebyshev(r, &probe.trace()) / dim })
}

/// `(‖d_X u^r‖_HS^2, Tr(X^T X) d_r U'_r(n)/U_r(n))`.
pub fn properness_check(r: usize, x: &Mat<f64>, tower: &IsometryTower) -> Result<(f64, f64)> {
    let d = derivative_matrix(r, x, tower)?;
    let lhs = d.squared_norm_l2();
    let rhs = x.squared_norm_l2() * tower.ctx.dim_f64(r as i64) * tower.ctx.psi_eigenvalue(r);
    Ok((lhs, rhs))
}

/// `G_{jj'} = Σ_i <c_X(v^r_{ij}), c_X(v^r_{ij'})>` with
/// `c_X(v^r_{ij}) = Σ_{kl} (d_X u^r)_{kl} v^r_{ik} (v^r_{jl})^*`.
///
/// Each `Σ_{kl} D_{kl} v_{ik} ⊗ (v_{jl})^*` is the rank-one tensor
/// `(e_i ⊗ J e_j)(vec(D J))^T`, so its products only need `φ^T` applied to two vectors.
pub fn cocycle_gram(r: usize, x: &Mat<f64>, tower: &IsometryTower, alg: &CoeffAlgebra) -> Result<Mat<f64>> {
    let d = derivative_matrix(r, x, tower)?;
    let dr = d.nrows();
    let j = alg.reversal(r);
    let dj = &d * j;
    let w: Vec<f64> = (0..dr * dr).map(|idx| dj[(idx / dr, idx % dr)]).collect();
    let mut g = Mat::<f64>::zeros(dr, dr);
    for (s, phi) in alg.cells(r, r)? {
        let pw = crate::rep::mat_vec_t(phi.as_ref(), &w);
        let weight = tensor::dot(&pw, &pw) / alg.dim(*s) as f64;
        // φ^T (e_i ⊗ J e_j) for all i, j
        let proj: Vec<Vec<Vec<f64>>> = (0..dr)
            .map(|i| {
                (0..dr)
                    .map(|jj| {
                        let mut u = vec![0.0; dr * dr];
                        for b in 0..dr {
                            u[i * dr + b] = j[(b, jj)];
                        }
                        crate::rep::mat_vec_t(phi.as_ref(), &u)
                    })
                    .collect()
            })
            .collect();
        for a in 0..dr {
            for b in 0..dr {
                let s: f64 = (0..dr).map(|i| tensor::dot(&proj[i][a], &proj[i][b])).sum();
                g[(a, b)] += weight * s;
            }
        }
    }
    Ok(g)
}

/// Largest eigenvalue of `[f(x^* y)]`, symmetrized and compressed to `ker ε`,
/// over `{v^r_{ij} : r <= degree}` for the central functional `f(v^r_{st}) = w(r) δ_{st}`.
pub fn compressed_max_eigenvalue(alg: &CoeffAlgebra, degree: usize, w: impl Fn(usize) -> f64) -> Result<(Mat<f64>, f64)> {
    let m = alg.central_gram(degree, w)?;
    let size = m.nrows();
    // ε(v^r_{ij}) = δ_{ij}
    let offsets = alg.basis_offsets(degree);
    let mut eps = vec![0.0; size];
    for r in 0..=degree {
        let d = alg.dim(r);
        for i in 0..d {
            eps[offsets[r] + i * d + i] = 1.0;
        }
    }
    let ee = tensor::dot(&eps, &eps);
    let proj = Mat::from_fn(size, size, |i, j| if i == j { 1.0 } else { 0.0 } - eps[i] * eps[j] / ee);
    let basis = eigvecs_near_one(&proj)?;
    let sym = Mat::from_fn(size, size, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let compressed = basis.transpose() * (&sym * &basis);
    Ok((m, max_eigenvalue(&compressed)?))
}

/// `ψ` on `ker ε`: the matrix `[ψ(x^* y)]` and the top eigenvalue of its compression.
pub fn cnd_check(degree: usize, alg: &CoeffAlgebra) -> Result<(Mat<f64>, f64)> {
    let ctx = alg.ctx.clone();
    compressed_max_eigenvalue(alg, degree, |r| ctx.psi_eigenvalue(r))
}

/// `[τ_s(x^* y)]` with `τ_s(v^r_{ij}) = δ_{ij} U_r(s)/U_r(n)`, and its smallest eigenvalue.
pub fn tau_gram(degree: usize, s: f64, alg: &CoeffAlgebra) -> Result<(Mat<f64>, f64)> {
    let n = alg.ctx.n as f64;
    let m = alg.central_gram(degree, |r| chebyshev_ratio(r, s, n))?;
    let sym = Mat::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let min = -max_eigenvalue(&(sym * faer::Scale(-1.0)))?;
    Ok((m, min))
}

fn max_eigenvalue(m: &Mat<f64>) -> Result<f64> {
    let vals = m
        .as_ref()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Degenerate { k: m.nrows(), r: None, detail: format!("eigensolver: {e:?}") })?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn eigvecs_near_one(p: &Mat<f64>) -> Result<Mat<f64>> {
    let eig = p
        .as_ref()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Degenerate { k: p.nrows(), r: None, detail: format!("eigensolver: {e:?}") })?;
    let vals = eig.S().column_vector();
    let keep: Vec<usize> = (0..p.nrows()).filter(|&i| vals[i] > 0.5).collect();
    let u = eig.U();
    Ok(Mat::from_fn(p.nrows(), keep.len(), |i, c| u[(i, keep[c])]))
}

/// `sup_{k <= kmax} U_k(s)/U_k(n) · (n/s)^k`.
pub fn brannan_decay_sup(s: f64, n: f64, kmax: usize) -> f64 {
    (0..=kmax).map(|k| chebyshev_ratio(k, s, n) * (n / s).powi(k as i32)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::QContext;

    fn tower(k: usize) -> IsometryTower {
        IsometryTower::build(k, &QContext::new(3).unwrap()).unwrap()
    }

    #[test]
    fn small_coreps() {
        let t = tower(2);
        let p = OrthogonalProbe::random(3, 5);
        assert!(orthogonality_defect(&p.g) < 1e-12);
        let u0 = corep_matrix(0, &p.g, &t).unwrap();
        assert!((u0[(0, 0)] - 1.0).abs() < 1e-14);
        let u1 = corep_matrix(1, &p.g, &t).unwrap();
        // ι_1 is an orthonormal basis of R^3 with fixed signs, possibly permuted
        let i1 = t.iota(1).unwrap();
        let expected = i1.transpose() * (&p.g * i1);
        assert!(crate::rep::max_abs_diff(u1.as_ref(), expected.as_ref()) < 1e-12);
    }

    #[test]
    fn second_character() {
        let t = tower(2);
        let p = OrthogonalProbe::rotation(3, 0.7).unwrap();
        let u = corep_matrix(2, &p.g, &t).unwrap();
        let tr: f64 = (0..u.nrows()).map(|i| u[(i, i)]).sum();
        let s = 1.0 + 2.0 * 0.7f64.cos();
        assert!((tr - (s * s - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn exponential_of_rotation_generator() {
        let p = OrthogonalProbe::rotation(3, 1.3).unwrap();
        let e = expm(&(&p.x * faer::Scale(1.3)));
        assert!(crate::rep::max_abs_diff(e.as_ref(), p.g.as_ref()) < 1e-13);
        let z = expm(&Mat::<f64>::zeros(3, 3));
        assert!(crate::rep::max_abs_diff(z.as_ref(), Mat::<f64>::identity(3, 3).as_ref()) == 0.0);
    }

    #[test]
    fn parse_and_validate() {
        let p = OrthogonalProbe::from_text("# swap\n0 1 0\n1 0 0\n0 0 1\n", 1e-12).unwrap();
        assert_eq!(p.trace(), 1.0);
        assert!(OrthogonalProbe::from_text("1 1\n0 1\n", 1e-12).is_err());
        assert!(OrthogonalProbe::from_text("1 0\n0\n", 1e-12).is_err());
        assert!(OrthogonalProbe::from_text("1 x\n0 1\n", 1e-12).is_err());
        let x = elementary_antisymmetric(3, 0, 1);
        assert!(OrthogonalProbe::new(Mat::identity(3, 3), x.transpose().to_owned(), 1e-12).is_ok());
        assert!(OrthogonalProbe::new(Mat::identity(3, 3), Mat::identity(3, 3), 1e-12).is_err());
    }

    #[test]
    fn first_cocycle_gram() {
        let t = tower(2);
        let alg = CoeffAlgebra::build(1, &t).unwrap();
        let x = elementary_antisymmetric(3, 0, 1);
        let g = cocycle_gram(1, &x, &t, &alg).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 2.0 / 3.0 } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-8, "{i} {j} {}", g[(i, j)]);
            }
        }
    }

    #[test]
    fn decay_sup_at_n() {
        assert!((brannan_decay_sup(3.0, 3.0, 10) - 1.0).abs() < 1e-12);
    }
}
