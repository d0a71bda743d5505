//! Evaluation of the estimate families and structural checks as report groups.

use fon_core::deform::{self, OrthogonalProbe};
use fon_core::estimates;
use fon_core::fusion::CoeffAlgebra;
use fon_core::qnum::{chebyshev, path_multiplicity};
use fon_core::rep::{diagram_to_matrix, max_abs_diff, IsometryTower};
use fon_core::tl::{JonesWenzl, TLElement};
use fon_core::{par, Error, Result};
use num_traits::ToPrimitive;

use crate::report::{Group, Index};

pub const ESTIMATE_FAMILIES: &[&str] = &["far-apart", "s-sum", "s-sum-diag", "adjoint-coeff", "adjoint-state-norm"];
pub const DEFORM_FAMILIES: &[&str] = &["character", "multiplier", "derivative", "properness", "cocycle", "cnd", "tau", "brannan", "asymptotics"];
pub const STRUCTURE_FAMILIES: &[&str] = &["jw", "tower", "norms"];

pub struct Ctx<'a> {
    pub n: usize,
    pub kmax: usize,
    pub tol: f64,
    pub seed: u64,
    pub tower: &'a IsometryTower,
    pub alg: Option<&'a CoeffAlgebra>,
}

fn at_k(k: usize) -> Index {
    Index { k: Some(k as i64), ..Index::default() }
}

fn at_r(r: usize) -> Index {
    Index { r: Some(r as i64), ..Index::default() }
}

fn p(name: &str, v: usize) -> (String, i64) {
    (name.to_string(), v as i64)
}

/// Largest `k` used by the estimate families: 7 for `n = 3`, 5 for `n = 4`.
pub fn estimate_kmax(n: usize, kmax: usize) -> usize {
    let cap = match n {
        3 => 7,
        4 => 5,
        _ => 4,
    };
    kmax.min(cap)
}

pub fn run_family(name: &str, c: &Ctx<'_>) -> Result<Vec<Group>> {
    match name {
        "far-apart" => Ok(vec![Group::from_estimate(&estimates::far_apart_report(5, c.tower)?, c.n, c.tol)]),
        "s-sum" => s_sums(c),
        "s-sum-diag" => {
            let k = estimate_kmax(c.n, c.kmax);
            Ok(vec![Group::from_estimate(&estimates::s_sum_diag_report(1, 1, k, c.seed, c.tower)?, c.n, c.tol)])
        }
        "adjoint-coeff" => {
            let k = estimate_kmax(c.n, c.kmax);
            Ok(vec![Group::from_estimate(&estimates::adjoint_report(1, 0, 0, k, c.tower)?, c.n, c.tol)])
        }
        "adjoint-state-norm" => {
            let k = estimate_kmax(c.n, c.kmax);
            Ok(vec![Group::from_estimate(&estimates::adjoint_state_report(1, 0, 0, k, c.tower)?, c.n, c.tol)])
        }
        "jw" => Ok(vec![jw_exact(c)?]),
        "tower" => Ok(vec![tower_consistency(c)?]),
        "norms" => Ok(vec![norms(c)?]),
        "character" => Ok(vec![character(c)?]),
        "multiplier" => Ok(vec![multiplier(c)?]),
        "derivative" => Ok(vec![derivative(c)?]),
        "properness" => Ok(vec![properness(c)?]),
        "cocycle" => Ok(vec![cocycle(c)?]),
        "cnd" => Ok(vec![cnd(c)?]),
        "tau" => tau(c),
        "brannan" => Ok(vec![brannan(c)?]),
        "asymptotics" => Ok(vec![asymptotics(c)]),
        other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
    }
}

fn s_sums(c: &Ctx<'_>) -> Result<Vec<Group>> {
    let k = estimate_kmax(c.n, c.kmax);
    let mut jobs = Vec::new();
    for l in 1..=2usize.min(k) {
        for m in 0..=l {
            for s in 0..3 {
                jobs.push((l, m, c.seed + s));
            }
        }
    }
    jobs.iter()
        .map(|&(l, m, seed)| estimates::s_sum_report(l, m, k, seed, c.tower).map(|r| Group::from_estimate(&r, c.n, c.tol)))
        .collect()
}

/// `p_k ∘ p_k = p_k`, `e_i ∘ p_k = 0`, `tr(p_k) = U_k(n)`, all exact.
pub fn jw_exact(c: &Ctx<'_>) -> Result<Group> {
    let kmax = c.kmax.min(8);
    let delta = c.n as i64;
    let table = JonesWenzl::build(kmax, delta)?;
    let mut g = Group::new("jw", "p_k p_k = p_k, e_i p_k = 0, tr p_k = U_k(n)", vec![p("kmax", kmax)], None);
    let results = par::map(kmax, |i| -> Result<(bool, bool, bool)> {
        let k = i + 1;
        let pk = table.get(k).ok_or_else(|| Error::InvalidArgument(format!("p_{k} not built")))?;
        let idem = &pk.compose(pk)? == pk;
        let killed = (1..k).all(|j| TLElement::e(j, k, delta).and_then(|e| e.compose(pk)).map_or(false, |x| x.is_empty()));
        let trace = pk.markov_trace()? == num_rational::BigRational::from_integer(chebyshev(k, &num_bigint::BigInt::from(delta)));
        Ok((idem, killed, trace))
    });
    for (i, res) in results.into_iter().enumerate() {
        let (idem, killed, trace) = res?;
        let ok = idem && killed && trace;
        g.push(c.n, at_k(i + 1), if ok { 0.0 } else { 1.0 }, 0.0, ok, 0.0);
    }
    Ok(g)
}

/// Isometry defect, agreement with the dense Jones-Wenzl projection, and the
/// dimension count `Σ_r m(k, r) d_r = n^k`.
pub fn tower_consistency(c: &Ctx<'_>) -> Result<Group> {
    let mut g = Group::new("tower", "iota_k^T iota_k = id, iota_k iota_k^T = p_k", vec![p("kmax", c.tower.kmax())], None);
    let ctx = &c.tower.ctx;
    for k in 1..=c.tower.kmax() {
        let iota = c.tower.iota(k)?;
        let nk = c.n.pow(k as u32) as f64;
        let gram = iota.transpose() * iota;
        let defect = max_abs_diff(gram.as_ref(), faer::Mat::<f64>::identity(gram.nrows(), gram.ncols()).as_ref());
        let count: u128 = (0..=k).map(|r| path_multiplicity(k, r) * ctx.dim_exact(r).to_u128().unwrap_or(0)).sum();
        let mut ok = defect <= 1e-9 * nk && count == (c.n as u128).pow(k as u32);
        let mut value = defect;
        if c.n.pow(k as u32) <= 729 {
            let pk = diagram_to_matrix(&fon_core::tl::jones_wenzl(k, ctx.delta)?, ctx)?;
            let diff = pk.max_diff(&(iota * iota.transpose()));
            ok &= diff <= 1e-8;
            value = value.max(diff);
        } else {
            let v = fon_core::rep::gaussian_vector(iota.ncols(), c.seed);
            let x = fon_core::rep::mat_vec(iota.as_ref(), &v);
            let px = c.tower.project(&x, k, 0, k);
            let diff = x.iter().zip(&px).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ok &= diff <= 1e-8;
            value = value.max(diff);
        }
        g.push(c.n, at_k(k), value, 1e-8, ok, 1e-8);
    }
    Ok(g)
}

/// Largest `k, l` for the intertwiner-norm table.
pub fn norms_cap(n: usize) -> usize {
    match n {
        3 => 5,
        4 => 4,
        5 => 3,
        _ => 2,
    }
}

pub fn norms(c: &Ctx<'_>) -> Result<Group> {
    let cap = norms_cap(c.n);
    let mut g = Group::new("norms", "N_direct = N_formula (intertwiner norm product formula)", vec![p("kl_max", cap)], None);
    let mut cells = Vec::new();
    for k in 1..=cap {
        for l in 1..=cap {
            for m in 0..=k.min(l) {
                cells.push((k, l, m));
            }
        }
    }
    let values = par::map(cells.len(), |i| {
        let (k, l, m) = cells[i];
        let direct = fon_core::fusion::norm_direct(k, l, m, c.tower, 0x5eed);
        let formula = fon_core::fusion::norm_squared_formula(k, l, m, &c.tower.ctx).sqrt();
        (direct, formula)
    });
    for (&(k, l, m), (direct, formula)) in cells.iter().zip(values) {
        let dev = (direct - formula).abs();
        let idx = Index { k: Some(k as i64), l: Some(l as i64), m: Some(m as i64), r: Some((k + l - 2 * m) as i64) };
        g.push(c.n, idx, direct, formula, dev <= c.tol * formula.max(1.0), c.tol);
    }
    Ok(g)
}

fn probes(n: usize, seed: u64) -> Result<Vec<OrthogonalProbe>> {
    let mut out = (1..=10).map(|i| OrthogonalProbe::rotation(n, 0.1 * i as f64)).collect::<Result<Vec<_>>>()?;
    out.extend((0..5).map(|s| OrthogonalProbe::random(n, seed + s)));
    Ok(out)
}

fn rmax(c: &Ctx<'_>) -> usize {
    c.tower.kmax().min(6)
}

fn trace(m: &faer::Mat<f64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn character(c: &Ctx<'_>) -> Result<Group> {
    let ps = probes(c.n, c.seed)?;
    let mut g = Group::new("character", "Tr u^r(g) = U_r(Tr g)", vec![p("probes", ps.len()), p("rmax", rmax(c))], Some(c.seed));
    for r in 0..=rmax(c) {
        let devs = ps
            .iter()
            .map(|pr| deform::corep_matrix(r, &pr.g, c.tower).map(|u| (trace(&u) - chebyshev(r, &pr.trace())).abs()))
            .collect::<Result<Vec<_>>>()?;
        let dev = devs.into_iter().fold(0.0, f64::max);
        g.push(c.n, at_r(r), dev, c.tol, dev <= c.tol, c.tol);
    }
    Ok(g)
}

pub fn multiplier(c: &Ctx<'_>) -> Result<Group> {
    let ps = probes(c.n, c.seed)?;
    let mut g = Group::new("multiplier", "E o A_g o iota = T_s, eigenvalue U_r(s)/U_r(n)", vec![p("rmax", rmax(c))], Some(c.seed));
    for r in 0..=rmax(c) {
        let mut dev: f64 = 0.0;
        for pr in &ps {
            dev = dev.max(deform::multiplier_compression(r, pr, c.tower)?.deviation());
        }
        g.push(c.n, at_r(r), dev, 1e-9, dev <= 1e-9, 1e-9);
    }
    Ok(g)
}

pub fn derivative(c: &Ctx<'_>) -> Result<Group> {
    let pr = OrthogonalProbe::random(c.n, c.seed);
    let h = 1e-5;
    let plus = deform::expm(&(&pr.x * faer::Scale(h)));
    let minus = deform::expm(&(&pr.x * faer::Scale(-h)));
    let mut g = Group::new("derivative", "d_X u^r = d/dt u^r(exp tX) at t = 0", vec![p("rmax", rmax(c))], Some(c.seed));
    for r in 1..=rmax(c) {
        let d = deform::derivative_matrix(r, &pr.x, c.tower)?;
        let fd = (deform::corep_matrix(r, &plus, c.tower)? - deform::corep_matrix(r, &minus, c.tower)?) * faer::Scale(0.5 / h);
        let dev = max_abs_diff(d.as_ref(), fd.as_ref());
        g.push(c.n, at_r(r), dev, 1e-6, dev <= 1e-6, 1e-6);
    }
    Ok(g)
}

pub fn properness(c: &Ctx<'_>) -> Result<Group> {
    let x = deform::elementary_antisymmetric(c.n, 0, 1);
    let mut g = Group::new("properness", "||d_X u^r||_HS^2 = Tr(X^T X) d_r U'_r(n)/U_r(n)", vec![p("rmax", rmax(c))], None);
    for r in 1..=rmax(c) {
        let (lhs, rhs) = deform::properness_check(r, &x, c.tower)?;
        let rel = (lhs - rhs).abs() / rhs;
        g.push(c.n, at_r(r), rel, 1e-6, rel <= 1e-6, 1e-6);
    }
    g.fitted.push(("c_rmax".into(), c.tower.ctx.psi_eigenvalue(rmax(c))));
    Ok(g)
}

fn need_alg<'a>(c: &Ctx<'a>, family: &str) -> Result<&'a CoeffAlgebra> {
    c.alg.ok_or_else(|| Error::Resource { what: format!("{family}: coefficient products"), requested: 4, cap: c.tower.kmax() })
}

pub fn cocycle(c: &Ctx<'_>) -> Result<Group> {
    let alg = need_alg(c, "cocycle")?;
    let x = deform::elementary_antisymmetric(c.n, 0, 1);
    let rm = alg.degree.min(3);
    let mut g = Group::new("cocycle", "sum_i <c_X(v_ij), c_X(v_ij')> = Tr(X^T X) U'_r(n)/U_r(n) delta_jj'", vec![p("rmax", rm)], None);
    for r in 1..=rm {
        let gram = deform::cocycle_gram(r, &x, c.tower, alg)?;
        let expected = x.squared_norm_l2() * c.tower.ctx.psi_eigenvalue(r);
        let mut dev: f64 = 0.0;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let e = if i == j { expected } else { 0.0 };
                dev = dev.max((gram[(i, j)] - e).abs() / expected);
            }
        }
        g.push(c.n, at_r(r), dev, 1e-6, dev <= 1e-6, 1e-6);
    }
    Ok(g)
}

pub fn cnd(c: &Ctx<'_>) -> Result<Group> {
    let alg = need_alg(c, "cnd")?;
    let degree = alg.degree.min(2);
    let (_, top) = deform::cnd_check(degree, alg)?;
    let mut g = Group::new("cnd", "psi(x^* x) <= 0 on ker epsilon", vec![p("L", degree)], None);
    g.push(c.n, Index { k: Some(degree as i64), ..Index::default() }, top, c.tol, top <= c.tol, c.tol);
    // x = v_11 - 1: psi(x^* x) = c_2 (1 - 1/n) - 2/n, which is -1/6 at n = 3
    let mut x = alg.basis(1, 0, 0);
    x.add_scaled(-1.0, &alg.one());
    let value = alg.psi(&alg.product(&alg.star(&x), &x)?);
    let nf = c.n as f64;
    let expected = c.tower.ctx.psi_eigenvalue(2) * (1.0 - 1.0 / nf) - 2.0 / nf;
    g.push(c.n, Index { k: Some(1), ..Index::default() }, value, expected, (value - expected).abs() <= 1e-10, 1e-10);
    Ok(g)
}

pub fn tau(c: &Ctx<'_>) -> Result<Vec<Group>> {
    let alg = need_alg(c, "tau")?;
    let degree = alg.degree.min(2);
    let nf = c.n as f64;
    [nf - 0.5, nf - 0.1]
        .iter()
        .map(|&s| {
            let (_, min) = deform::tau_gram(degree, s, alg)?;
            let mut g = Group::new("tau", "tau_s Gram positive semidefinite", vec![p("L", degree), ("s_milli".into(), (s * 1000.0).round() as i64)], None);
            g.push(c.n, Index { k: Some(degree as i64), ..Index::default() }, min, -c.tol, min >= -c.tol, c.tol);
            Ok(g)
        })
        .collect()
}

pub fn brannan(c: &Ctx<'_>) -> Result<Group> {
    let nf = c.n as f64;
    let mut g = Group::new("brannan", "sup_k U_k(s)/U_k(n) (n/s)^k < inf, s = n - 2 + 2 cos t", vec![p("kmax", 40)], None);
    for (i, t) in [0.1f64, 0.5, 1.0].into_iter().enumerate() {
        let s = nf - 2.0 + 2.0 * t.cos();
        let sup = deform::brannan_decay_sup(s, nf, 40);
        g.push(c.n, Index { r: Some(i as i64), ..Index::default() }, sup, 10.0, sup.is_finite() && sup <= 10.0, 0.0);
    }
    Ok(g)
}

/// `|c_r - r / sqrt(n^2 - 4)| <= 1` for `r <= 200`, and the differences
/// `c_{r+1} - c_r` for `r >= 100` agree pairwise within `1e-6`.
pub fn asymptotics(c: &Ctx<'_>) -> Group {
    let q = &c.tower.ctx;
    let nf = c.n as f64;
    let slope = 1.0 / (nf * nf - 4.0).sqrt();
    let mut g = Group::new("asymptotics", "c_r = r / sqrt(n^2 - 4) + O(1)", vec![p("rmax", 200)], None);
    let dev = (0..=200).map(|r| (q.psi_eigenvalue(r) - r as f64 * slope).abs()).fold(0.0, f64::max);
    g.push(c.n, at_r(200), dev, 1.0, dev <= 1.0, 1.0);
    let inc = |r: usize| q.psi_eigenvalue(r + 1) - q.psi_eigenvalue(r);
    let incs: Vec<f64> = (100..200).map(inc).collect();
    let cauchy = incs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - incs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    g.push(c.n, at_r(100), cauchy, 1e-6, cauchy <= 1e-6, 1e-6);
    g.fitted.push(("slope".into(), inc(199)));
    g
}
