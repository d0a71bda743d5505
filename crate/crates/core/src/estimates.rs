//! Brute-force evaluation of the trace sums and norms controlling the
//! adjoint representation, with the growth/decay verdicts applied to them.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{fusion_projector, norm_squared_formula};
use crate::par;
use crate::rep::{power_norm, IsometryTower};
use crate::tensor::{self, kron, pow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FarApart,
    SSum,
    SSumDiag,
    AdjointCoeff,
    AdjointStateNorm,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FarApart => "far-apart",
            Family::SSum => "s-sum",
            Family::SSumDiag => "s-sum-diag",
            Family::AdjointCoeff => "adjoint-coeff",
            Family::AdjointStateNorm => "adjoint-state-norm",
        }
    }
}

/// One computed value together with the shape of its bound at that `k`.
#[derive(Clone, Debug, Serialize)]
pub struct Point {
    pub k: usize,
    pub computed: f64,
    pub bound_shape: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub family: Family,
    /// Human-readable statement of the bound being tested.
    pub anchor: String,
    pub params: Vec<(String, i64)>,
    pub values: Vec<Point>,
    pub fitted: Vec<(String, f64)>,
    pub pass: bool,
    pub seed: u64,
}

impl EstimateReport {
    pub fn fitted(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn param(&self, name: &str) -> Option<i64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn check_tower(tower: &IsometryTower, k: usize) -> Result<()> {
    tower.iota(k).map(|_| ())
}

/// `‖(P_{a+b} ⊗ P_c) Q^{a+b+c}_r (P_a ⊗ P_{b+c})‖`, matrix free.
pub fn far_apart_norm(a: usize, b: usize, c: usize, r: usize, tower: &IsometryTower) -> Result<f64> {
    let total = a + b + c;
    if r > total {
        return Err(Error::InvalidArgument(format!("r = {r} exceeds a + b + c = {total}")));
    }
    if (total - r) % 2 == 1 {
        return Ok(0.0);
    }
    let left = |x: &[f64]| {
        let y = tower.project(x, total, 0, a);
        tower.project(&y, total, a, b + c)
    };
    let right = |x: &[f64]| {
        let y = tower.project(x, total, 0, a + b);
        tower.project(&y, total, a + b, c)
    };
    let forward = |x: &[f64]| right(&fusion_projector(&left(x), a, b + c, r, tower));
    let backward = |x: &[f64]| left(&fusion_projector(&left(&right(x)), a, b + c, r, tower));
    Ok(power_norm(pow(tower.n, total), 0xfa2, |x| backward(&forward(x))))
}

/// The sums `S^k_r` (`r = k - l, ..., k + l - 2m - 2`) and `S^k_+`.
#[derive(Clone, Debug, Serialize)]
pub struct SSums {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub components: Vec<(usize, f64)>,
    pub plus: f64,
    /// The same contraction with the projections replaced by the identity.
    pub total: f64,
}

pub fn s_sum(k: usize, l: usize, m: usize, zeta: &[f64], tower: &IsometryTower) -> Result<SSums> {
    if l == 0 || m > l || l > k {
        return Err(Error::InvalidArgument(format!("need 0 <= m <= l <= k, l != 0; got k={k} l={l} m={m}")));
    }
    let n = tower.n;
    if zeta.len() != pow(n, l) {
        return Err(crate::error::shape(pow(n, l), zeta.len()));
    }
    check_tower(tower, k)?;
    let iota = tower.iota(k)?;
    let big = k + l - 2 * m;
    let rs: Vec<usize> = (k - l..big.saturating_sub(1)).step_by(2).collect();
    let per_p = par::map(iota.ncols(), |p| {
        let e = iota.col_as_slice(p);
        let y = tensor::cap_nested(&kron(e, zeta), n, k + l, k - m, m);
        let x = tensor::cap_nested(&kron(zeta, e), n, k + l, l - m, m);
        let comps: Vec<f64> =
            rs.iter().map(|&r| tensor::dot(&x, &fusion_projector(&y, k - m, l - m, r, tower))).collect();
        let plus = tensor::dot(&x, &tower.project(&y, big, 0, big));
        (comps, plus, tensor::dot(&x, &y))
    });
    let mut components: Vec<(usize, f64)> = rs.iter().map(|&r| (r, 0.0)).collect();
    let (mut plus, mut total) = (0.0, 0.0);
    for (comps, p, t) in per_p {
        for (slot, c) in components.iter_mut().zip(comps) {
            slot.1 += c;
        }
        plus += p;
        total += t;
    }
    Ok(SSums { k, l, m, components, plus, total })
}

/// `S^k(ζ, ξ) = Σ_p ((id_{m̄} ⊗ T_{m̄}^* ⊗ id)(ζ ⊗ e_p) | (id ⊗ T_m^* ⊗ id_m)(e_p ⊗ ξ))`.
pub fn s_sum_diag(k: usize, m: usize, mbar: usize, zeta: &[f64], xi: &[f64], tower: &IsometryTower) -> Result<f64> {
    if m == 0 || mbar == 0 || m + mbar > k {
        return Err(Error::InvalidArgument(format!("need m, mbar >= 1 and m + mbar <= k; got {m}, {mbar}, {k}")));
    }
    let n = tower.n;
    if zeta.len() != pow(n, 2 * mbar) || xi.len() != pow(n, 2 * m) {
        return Err(crate::error::shape(
            format!("{} and {}", pow(n, 2 * mbar), pow(n, 2 * m)),
            format!("{} and {}", zeta.len(), xi.len()),
        ));
    }
    let iota = tower.iota(k)?;
    Ok(par::sum(iota.ncols(), |p| {
        let e = iota.col_as_slice(p);
        let left = tensor::cap_nested(&kron(zeta, e), n, 2 * mbar + k, mbar, mbar);
        let right = tensor::cap_nested(&kron(e, xi), n, k + 2 * m, k - m, m);
        tensor::dot(&left, &right)
    }))
}

/// Per-channel contributions `C^r_{ij}` and `Σ_{ij} |Σ_r C^r_{ij}|^2`.
#[derive(Clone, Debug)]
pub struct AdjointCoeff {
    pub k: usize,
    pub l: usize,
    pub channels: Vec<(usize, Mat<f64>)>,
    pub summed_square: f64,
}

impl AdjointCoeff {
    /// `Σ_r C^r`, the values `φ(v^k_{ij})`.
    pub fn total(&self) -> Mat<f64> {
        let d = self.channels.first().map_or(0, |(_, c)| c.nrows());
        let mut out = Mat::<f64>::zeros(d, d);
        for (_, c) in &self.channels {
            out += c;
        }
        out
    }
}

pub fn adjoint_coeff(k: usize, l: usize, a: usize, b: usize, tower: &IsometryTower) -> Result<AdjointCoeff> {
    if l == 0 || l > k {
        return Err(Error::InvalidArgument(format!("need 0 < l <= k, got k={k} l={l}")));
    }
    adjoint_coeff_any(k, l, a, b, tower)
}

fn adjoint_coeff_any(k: usize, l: usize, a: usize, b: usize, tower: &IsometryTower) -> Result<AdjointCoeff> {
    let n = tower.n;
    let (ik, il) = (tower.iota(k)?, tower.iota(l)?);
    let (dk, dl) = (ik.ncols(), il.ncols());
    if a >= dl || b >= dl {
        return Err(Error::InvalidArgument(format!("indices ({a}, {b}) out of range for d = {dl}")));
    }
    let (ea, eb) = (il.col_as_slice(a), il.col_as_slice(b));
    let mut channels = Vec::new();
    for mu in 0..=k.min(l) {
        let r = k + l - 2 * mu;
        let big = pow(n, r);
        let scale = 1.0 / norm_squared_formula(k, l, mu, &tower.ctx);
        // A^r_{ij} = <T^{μ*}_{lk}(e_a ⊗ e_i), P_r T^{μ*}_{kl}(e_j ⊗ e_a)> / N^2
        let left = par::map(dk, |i| tensor::cap_nested(&kron(ea, ik.col_as_slice(i)), n, k + l, l - mu, mu));
        let right = par::map(dk, |j| {
            let y = tensor::cap_nested(&kron(ik.col_as_slice(j), ea), n, k + l, k - mu, mu);
            tower.project(&y, r, 0, r)
        });
        let wl = Mat::from_fn(big, dk, |x, i| left[i][x]);
        let wr = Mat::from_fn(big, dk, |x, j| right[j][x]);
        let amat = wl.transpose() * &wr;
        let bsum = par::sum(dk, |p| {
            let e = ik.col_as_slice(p);
            let x = tensor::cap_nested(&kron(eb, e), n, k + l, l - mu, mu);
            let y = tensor::cap_nested(&kron(e, eb), n, k + l, k - mu, mu);
            tensor::dot(&x, &tower.project(&y, r, 0, r))
        }) * scale;
        let factor = scale * bsum / tower.dim(r) as f64;
        channels.push((r, Mat::from_fn(dk, dk, |i, j| amat[(i, j)] * factor)));
    }
    channels.sort_by_key(|(r, _)| *r);
    let mut out = AdjointCoeff { k, l, channels, summed_square: 0.0 };
    let t = out.total();
    out.summed_square = (0..dk).flat_map(|i| (0..dk).map(move |j| (i, j))).map(|(i, j)| t[(i, j)].powi(2)).sum();
    Ok(out)
}

/// `‖φ_k‖^2 = d_k Σ_{ij} |φ(v^k_{ij})|^2` for `k = 1..=kmax`, where
/// `φ = ω_ξ ∘ ad` with `ξ = Λ_h(v^{m*}_{ab})`.
pub fn adjoint_state_norms(m: usize, a: usize, b: usize, kmax: usize, tower: &IsometryTower) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    (1..=kmax)
        .map(|k| adjoint_coeff_any(k, m, a, b, tower).map(|c| tower.dim(k) as f64 * c.summed_square))
        .collect()
}

/// `Σ_k e^{-2λk} ‖φ_k‖^2` over the computed range (`norms[0]` is `k = 1`).
pub fn weighted_sum(norms: &[f64], lambda: f64) -> f64 {
    norms.iter().enumerate().map(|(i, v)| (-2.0 * lambda * (i + 1) as f64).exp() * v).sum()
}

/// A unit vector of `H_l`: `P_l` applied to a seeded Gaussian, normalized.
pub fn random_unit(l: usize, seed: u64, tower: &IsometryTower) -> Vec<f64> {
    let v = crate::rep::gaussian_vector(pow(tower.n, l), seed);
    let mut v = tower.project(&v, l, 0, l);
    let nv = tensor::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

pub const FAR_APART_ANCHOR: &str = "||(P_{a+b} x P_c) Q_r (P_a x P_{b+c})|| <= C_1 q^b";
pub const S_SUM_ANCHOR: &str = "|S^k_r| <= C^l ||zeta||^2; |S^k_+| <= k C^l ||zeta||^2 (l != 2m), (Ck)^l ||zeta||^2 (l = 2m)";
pub const S_SUM_DIAG_ANCHOR: &str = "|S^k(zeta, xi)| <= (Ck)^{m+mbar} ||zeta|| ||xi||";
pub const ADJOINT_ANCHOR: &str = "sum_ij |sum_r C^r_ij|^2 <= C_l k^{2l} q^k";
pub const STATE_ANCHOR: &str = "||phi_k||^2 <= D C_m k^{2m}; sum_k e^{-2 lambda k} ||phi_k||^2 < inf";

/// Far-apart decay for `a = c = 1`, `b = 1..=bmax`, channel `r = a + b + c - 2`:
/// the fitted slope of `log ‖·‖` against `b` must not exceed `log q + 0.15`.
pub fn far_apart_report(bmax: usize, tower: &IsometryTower) -> Result<EstimateReport> {
    let q = tower.ctx.q;
    let mut values = Vec::new();
    for b in 1..=bmax {
        let r = b;
        let v = far_apart_norm(1, b, 1, r, tower)?;
        values.push(Point { k: b, computed: v, bound_shape: q.powi(b as i32) });
    }
    let xs: Vec<f64> = values.iter().map(|p| p.k as f64).collect();
    let ys: Vec<f64> = values.iter().map(|p| p.computed.ln()).collect();
    let (slope, intercept) = fit_line(&xs, &ys);
    let threshold = q.ln() + 0.15;
    let strict = values.iter().all(|p| p.computed > 0.0 && p.computed < 1.0);
    Ok(EstimateReport {
        family: Family::FarApart,
        anchor: FAR_APART_ANCHOR.into(),
        params: vec![("a".into(), 1), ("c".into(), 1), ("bmax".into(), bmax as i64)],
        values,
        fitted: vec![("slope".into(), slope), ("C1".into(), intercept.exp()), ("threshold".into(), threshold)],
        pass: strict && slope <= threshold,
        seed: 0,
    })
}

/// The sums `S^k_r`, `S^k_+` for `k = l..=kmax` and a random unit `ζ ∈ H_l`.
///
/// Verdict: every channel's running maximum of `|S^k_r|` grows by at most 5%
/// from `k = kmax - 2` to `kmax`, and the log-log slope of `|S^k_+|` is at most
/// `1.3` (`l != 2m`) or `l + 0.3` (`l = 2m`). The decomposition must add up to
/// the unprojected contraction within `1e-7`.
pub fn s_sum_report(l: usize, m: usize, kmax: usize, seed: u64, tower: &IsometryTower) -> Result<EstimateReport> {
    let zeta = random_unit(l, seed, tower);
    let ks: Vec<usize> = (l.max(1)..=kmax).collect();
    let sums = ks.iter().map(|&k| s_sum(k, l, m, &zeta, tower)).collect::<Result<Vec<_>>>()?;
    let mut values = Vec::new();
    let mut consistent = true;
    for s in &sums {
        let decomposed = s.components.iter().map(|c| c.1).sum::<f64>() + s.plus;
        consistent &= (decomposed - s.total).abs() <= 1e-7 * s.total.abs().max(1.0);
        values.push(Point { k: s.k, computed: s.plus, bound_shape: if l == 2 * m { (s.k as f64).powi(l as i32) } else { s.k as f64 } });
    }
    // channels are indexed by their offset from the lowest one, r = k - l + 2j
    let channels = l - m;
    let mut stable = true;
    let mut worst_growth: f64 = 0.0;
    for j in 0..channels {
        let series: Vec<(usize, f64)> = sums
            .iter()
            .filter_map(|s| s.components.get(j).map(|c| (s.k, c.1.abs())))
            .collect();
        let running = |upto: usize| series.iter().filter(|(k, _)| *k <= upto).map(|p| p.1).fold(0.0, f64::max);
        if kmax >= 2 && series.iter().any(|(k, _)| *k <= kmax - 2) {
            let (early, late) = (running(kmax - 2), running(kmax));
            if early > 0.0 {
                worst_growth = worst_growth.max(late / early - 1.0);
                stable &= late <= 1.05 * early;
            }
        }
    }
    let fit_pts: Vec<&Point> = values.iter().filter(|p| p.computed.abs() > 1e-300).collect();
    let xs: Vec<f64> = fit_pts.iter().map(|p| (p.k as f64).ln()).collect();
    let ys: Vec<f64> = fit_pts.iter().map(|p| p.computed.abs().ln()).collect();
    let slope = if xs.len() >= 2 { fit_line(&xs, &ys).0 } else { 0.0 };
    let limit = if l == 2 * m { l as f64 + 0.3 } else { 1.3 };
    let cmax = sums
        .iter()
        .flat_map(|s| s.components.iter().map(|c| c.1.abs()))
        .fold(0.0, f64::max);
    Ok(EstimateReport {
        family: Family::SSum,
        anchor: S_SUM_ANCHOR.into(),
        params: vec![("l".into(), l as i64), ("m".into(), m as i64), ("kmax".into(), kmax as i64)],
        values,
        fitted: vec![
            ("plus_slope".into(), slope),
            ("plus_slope_limit".into(), limit),
            ("max_channel".into(), cmax),
            ("channel_growth".into(), worst_growth),
        ],
        pass: consistent && stable && slope <= limit,
        seed,
    })
}

/// `S^k(ζ, ξ)` for `k = m + mbar..=kmax`; verdict on the log-log slope
/// of `|S^k|`, at most `m + mbar + 0.3`.
pub fn s_sum_diag_report(
    m: usize,
    mbar: usize,
    kmax: usize,
    seed: u64,
    tower: &IsometryTower,
) -> Result<EstimateReport> {
    let zeta = random_unit(2 * mbar, seed, tower);
    let xi = random_unit(2 * m, seed + 1, tower);
    let mut values = Vec::new();
    for k in m + mbar..=kmax {
        let v = s_sum_diag(k, m, mbar, &zeta, &xi, tower)?;
        values.push(Point { k, computed: v, bound_shape: (k as f64).powi((m + mbar) as i32) });
    }
    let pts: Vec<&Point> = values.iter().filter(|p| p.computed.abs() > 1e-300).collect();
    let xs: Vec<f64> = pts.iter().map(|p| (p.k as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.computed.abs().ln()).collect();
    let slope = if xs.len() >= 2 { fit_line(&xs, &ys).0 } else { 0.0 };
    let limit = (m + mbar) as f64 + 0.3;
    Ok(EstimateReport {
        family: Family::SSumDiag,
        anchor: S_SUM_DIAG_ANCHOR.into(),
        params: vec![("m".into(), m as i64), ("mbar".into(), mbar as i64), ("kmax".into(), kmax as i64)],
        values,
        fitted: vec![("slope".into(), slope), ("slope_limit".into(), limit)],
        pass: slope <= limit,
        seed,
    })
}

/// `q^{-k} Σ_{ij} |Σ_r C^r_{ij}|^2` for `k = l..=kmax`; verdict on its
/// log-log slope, at most `2l + 0.5`.
pub fn adjoint_report(l: usize, a: usize, b: usize, kmax: usize, tower: &IsometryTower) -> Result<EstimateReport> {
    let q = tower.ctx.q;
    let mut values = Vec::new();
    for k in l..=kmax {
        let c = adjoint_coeff(k, l, a, b, tower)?;
        values.push(Point { k, computed: c.summed_square / q.powi(k as i32), bound_shape: (k as f64).powi(2 * l as i32) });
    }
    let pts: Vec<&Point> = values.iter().filter(|p| p.computed > 1e-300).collect();
    let xs: Vec<f64> = pts.iter().map(|p| (p.k as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.computed.ln()).collect();
    let slope = if xs.len() >= 2 { fit_line(&xs, &ys).0 } else { 0.0 };
    let limit = 2.0 * l as f64 + 0.5;
    let constant = values.iter().map(|p| p.computed / p.bound_shape).fold(0.0, f64::max);
    Ok(EstimateReport {
        family: Family::AdjointCoeff,
        anchor: ADJOINT_ANCHOR.into(),
        params: vec![("l".into(), l as i64), ("a".into(), a as i64), ("b".into(), b as i64), ("kmax".into(), kmax as i64)],
        values,
        fitted: vec![("slope".into(), slope), ("slope_limit".into(), limit), ("C_l".into(), constant)],
        pass: slope <= limit,
        seed: 0,
    })
}

/// `‖φ_k‖^2` for `k = 1..=kmax` with fitted `D = max_k ‖φ_k‖^2 / k^{2m}`.
/// Verdict: finite values, log-log slope at most `2m + 0.5`, and weighted
/// sums finite and decreasing in `λ ∈ {0.1, 0.5, 1}`.
pub fn adjoint_state_report(m: usize, a: usize, b: usize, kmax: usize, tower: &IsometryTower) -> Result<EstimateReport> {
    let norms = adjoint_state_norms(m, a, b, kmax, tower)?;
    let values: Vec<Point> = norms
        .iter()
        .enumerate()
        .map(|(i, &v)| Point { k: i + 1, computed: v, bound_shape: ((i + 1) as f64).powi(2 * m as i32) })
        .collect();
    let d = values.iter().map(|p| p.computed / p.bound_shape).fold(0.0, f64::max);
    let pts: Vec<&Point> = values.iter().filter(|p| p.computed > 1e-300).collect();
    let xs: Vec<f64> = pts.iter().map(|p| (p.k as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.computed.ln()).collect();
    let slope = if xs.len() >= 2 { fit_line(&xs, &ys).0 } else { 0.0 };
    let sums: Vec<f64> = [0.1, 0.5, 1.0].iter().map(|&lam| weighted_sum(&norms, lam)).collect();
    let decreasing = sums.windows(2).all(|w| w[1] < w[0]);
    let finite = norms.iter().chain(&sums).all(|v| v.is_finite());
    let limit = 2.0 * m as f64 + 0.5;
    Ok(EstimateReport {
        family: Family::AdjointStateNorm,
        anchor: STATE_ANCHOR.into(),
        params: vec![("m".into(), m as i64), ("a".into(), a as i64), ("b".into(), b as i64), ("kmax".into(), kmax as i64)],
        values,
        fitted: vec![
            ("D".into(), d),
            ("slope".into(), slope),
            ("slope_limit".into(), limit),
            ("sum_lambda_0.1".into(), sums[0]),
            ("sum_lambda_0.5".into(), sums[1]),
            ("sum_lambda_1".into(), sums[2]),
        ],
        pass: finite && decreasing && slope <= limit,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::QContext;

    fn tower(k: usize) -> IsometryTower {
        IsometryTower::build(k, &QContext::new(3).unwrap()).unwrap()
    }

    #[test]
    fn far_apart_edge_cases() {
        let t = tower(3);
        assert!((far_apart_norm(1, 1, 1, 3, &t).unwrap() - 1.0).abs() < 1e-8);
        let v = far_apart_norm(1, 1, 1, 1, &t).unwrap();
        assert!(v > 0.0 && v < 1.0, "{v}");
        assert_eq!(far_apart_norm(1, 1, 1, 2, &t).unwrap(), 0.0);
    }

    #[test]
    fn s_sum_consistency() {
        let t = tower(4);
        let zeta = random_unit(2, 3, &t);
        for m in 0..=2 {
            let s = s_sum(4, 2, m, &zeta, &t).unwrap();
            let sum: f64 = s.components.iter().map(|c| c.1).sum::<f64>() + s.plus;
            assert!((sum - s.total).abs() < 1e-9, "m={m}: {sum} vs {}", s.total);
        }
        assert!(s_sum(2, 0, 0, &[1.0], &t).is_err());
    }

    #[test]
    fn s_sum_small_total() {
        // k = l = 1, m = 0, ζ = e_1: Σ_p <e_1 ⊗ e_p, e_p ⊗ e_1> = 1
        let t = tower(2);
        let s = s_sum(1, 1, 0, &[1.0, 0.0, 0.0], &t).unwrap();
        assert!((s.total - 1.0).abs() < 1e-12);
        assert_eq!(s.components.len(), 1);
    }

    #[test]
    fn s_sum_diag_zero() {
        let t = tower(3);
        let zeta = random_unit(2, 1, &t);
        assert_eq!(s_sum_diag(2, 1, 1, &zeta, &vec![0.0; 9], &t).unwrap(), 0.0);
        assert!(s_sum_diag(1, 1, 1, &zeta, &zeta, &t).is_err());
    }

    #[test]
    fn s_sum_diag_swap_symmetry() {
        let t = tower(4);
        let zeta = random_unit(4, 1, &t);
        let xi = random_unit(2, 2, &t);
        let a = s_sum_diag(4, 1, 2, &zeta, &xi, &t).unwrap();
        let rz = tensor::reverse_legs(&zeta, 3, 4);
        let rx = tensor::reverse_legs(&xi, 3, 2);
        let b = s_sum_diag(4, 2, 1, &rx, &rz, &t).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn fit_exact_line() {
        let (s, c) = fit_line(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
    }
}
