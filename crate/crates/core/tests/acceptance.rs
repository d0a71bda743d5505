//! The twelve acceptance criteria, one line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::*;
use faer::Mat;
use fon_core::deform::{self, OrthogonalProbe};
use fon_core::estimates::{self, random_unit};
use fon_core::fusion::{norm_direct, norm_squared_formula, CoeffAlgebra};
use fon_core::qnum::{chebyshev, path_multiplicity};
use fon_core::rep::{diagram_to_matrix, gaussian_vector, mat_vec as iota_apply, max_abs_diff, IsometryTower};
use fon_core::tl::{JonesWenzl, TLElement};
use fon_core::QContext;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

type Outcome = (bool, String);

fn tower(n: usize, k: usize) -> IsometryTower {
    IsometryTower::build(k, &QContext::new(n).unwrap()).unwrap()
}

/// `n = 3` up to level 8, shared by most criteria.
fn tower3() -> &'static IsometryTower {
    static T: OnceLock<IsometryTower> = OnceLock::new();
    T.get_or_init(|| tower(3, 8))
}

fn alg3() -> &'static CoeffAlgebra {
    static A: OnceLock<CoeffAlgebra> = OnceLock::new();
    A.get_or_init(|| CoeffAlgebra::build(3, tower3()).unwrap())
}

fn jones_wenzl_exact() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in [3usize, 4, 5] {
        let delta = n as i64;
        let table = JonesWenzl::build(8, delta).unwrap();
        for k in 1..=8 {
            let pk = table.get(k).unwrap();
            let idem = &pk.compose(pk).unwrap() == pk;
            let killed = (1..k).all(|i| TLElement::e(i, k, delta).unwrap().compose(pk).unwrap().is_empty());
            let trace = pk.markov_trace().unwrap() == BigRational::from_integer(chebyshev(k, &BigInt::from(delta)));
            if !(idem && killed && trace) {
                bad.push(format!("n={n} k={k}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    (bad.is_empty() && fast, format!("24 projections exact, {:.1}s of 60s; failures: {bad:?}", elapsed.as_secs_f64()))
}

fn tower_consistency() -> Outcome {
    let t = tower3();
    let n = 3usize;
    let (mut worst_iso, mut worst_jw, mut counts) = (0.0f64, 0.0f64, true);
    let mut ok = true;
    for k in 1..=8 {
        let iota = t.iota(k).unwrap();
        let nk = n.pow(k as u32);
        let gram = iota.transpose() * iota;
        let iso = max_abs_diff(gram.as_ref(), Mat::<f64>::identity(gram.nrows(), gram.ncols()).as_ref());
        ok &= iso <= 1e-9 * nk as f64;
        worst_iso = worst_iso.max(iso / nk as f64);
        let count: u128 = (0..=k).map(|r| path_multiplicity(k, r) * t.ctx.dim_exact(r).to_u128().unwrap()).sum();
        counts &= count == nk as u128;
        let diff = if k <= 6 {
            let pk = diagram_to_matrix(&fon_core::tl::jones_wenzl(k, 3).unwrap(), &t.ctx).unwrap();
            pk.max_diff(&(iota * iota.transpose()))
        } else {
            (0..4)
                .map(|s| {
                    let v = gaussian_vector(nk, 100 + s);
                    let wenzl = t.project(&v, k, 0, k);
                    let range = iota_apply(iota.as_ref(), &fon_core::rep::mat_vec_t(iota.as_ref(), &v));
                    wenzl.iter().zip(&range).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        ok &= diff <= 1e-8;
        worst_jw = worst_jw.max(diff);
    }
    (
        ok && counts,
        format!("max |i^T i - id|/n^k = {worst_iso:.2e}, max |i i^T - p_k| = {worst_jw:.2e}, dimension counts exact: {counts}"),
    )
}

fn intertwiner_norms() -> Outcome {
    let t = tower3();
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for k in 1..=5 {
        for l in 1..=5 {
            for m in 0..=k.min(l) {
                let direct = norm_direct(k, l, m, t, 7);
                let formula = norm_squared_formula(k, l, m, &t.ctx).sqrt();
                worst = worst.max((direct - formula).abs());
                cells += 1;
            }
        }
    }
    (worst <= 1e-8, format!("{cells} triples, max |N_direct - N_formula| = {worst:.2e}"))
}

fn far_apart() -> Outcome {
    let rep = estimates::far_apart_report(5, tower3()).unwrap();
    let slope = rep.fitted("slope").unwrap();
    let limit = tower3().ctx.q.ln() + 0.15;
    (rep.pass && slope <= limit, format!("slope {slope:.4} <= {limit:.4}"))
}

fn s_sums() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for l in 1..=2usize {
        for m in 0..=l {
            let mut growth: f64 = 0.0;
            let mut slope = f64::NEG_INFINITY;
            for seed in [42, 43, 44] {
                let rep = estimates::s_sum_report(l, m, 7, seed, tower3()).unwrap();
                ok &= rep.pass;
                growth = growth.max(rep.fitted("channel_growth").unwrap());
                slope = slope.max(rep.fitted("plus_slope").unwrap());
                let limit = if l == 2 * m { l as f64 + 0.3 } else { 1.3 };
                ok &= slope <= limit && growth <= 0.05;
            }
            lines.push(format!("(l={l},m={m}) growth {growth:.3} slope {slope:.3}"));
        }
    }
    (ok, lines.join("; "))
}

fn adjoint_decay() -> Outcome {
    let t = tower3();
    let mut ok = true;
    let mut details = Vec::new();
    for (a, b) in [(0, 0), (0, 2), (1, 1)] {
        let rep = estimates::adjoint_report(1, a, b, 7, t).unwrap();
        let slope = rep.fitted("slope").unwrap();
        ok &= slope <= 2.5;
        details.push(format!("slope(a={a},b={b}) {slope:.3}"));
        let state = estimates::adjoint_state_report(1, a, b, 7, t).unwrap();
        let sums: Vec<f64> = ["sum_lambda_0.1", "sum_lambda_0.5", "sum_lambda_1"].iter().map(|s| state.fitted(s).unwrap()).collect();
        ok &= sums.iter().all(|s| s.is_finite()) && sums.windows(2).all(|w| w[1] < w[0]);
        if (a, b) == (0, 0) {
            details.push(format!("weighted sums {:.4} > {:.4} > {:.4}", sums[0], sums[1], sums[2]));
        }
    }
    (ok, details.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let t = tower(3, 4);
    let ctx = &t.ctx;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut track = |got: f64, expected: f64| {
        worst = worst.max((got - expected).abs());
        count += 1;
    };
    for (a, b, c) in [(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1)] {
        let total = a + b + c;
        for r in (total % 2..=total).step_by(2) {
            track(estimates::far_apart_norm(a, b, c, r, &t).unwrap(), far_apart_dense(a, b, c, r, ctx));
        }
    }
    for k in 1..=3 {
        for l in 1..=(4 - k).min(k) {
            for m in 0..=k.min(l) {
                let zeta = random_unit(l, 42 + k as u64, &t);
                let got = estimates::s_sum(k, l, m, &zeta, &t).unwrap();
                let rs: Vec<usize> = got.components.iter().map(|c| c.0).collect();
                let (comps, plus, total) = s_sum_dense(k, l, m, &zeta, &rs, ctx);
                for (c, e) in got.components.iter().zip(&comps) {
                    track(c.1, *e);
                }
                track(got.plus, plus);
                track(got.total, total);
            }
        }
    }
    let (zeta, xi) = (random_unit(2, 5, &t), random_unit(2, 6, &t));
    track(estimates::s_sum_diag(2, 1, 1, &zeta, &xi, &t).unwrap(), s_sum_diag_dense(2, 1, 1, &zeta, &xi, ctx));
    for (k, l) in [(1, 1), (2, 1), (3, 1), (2, 2)] {
        let dl = t.dim(l);
        for (a, b) in [(0, 0), (0, dl - 1), (dl - 1, 1)] {
            let got = estimates::adjoint_coeff(k, l, a, b, &t).unwrap();
            let expected = adjoint_dense(k, l, a, b, &t);
            let total = got.total();
            let mut sq = 0.0;
            for i in 0..expected.nrows() {
                for j in 0..expected.ncols() {
                    track(total[(i, j)], expected[(i, j)]);
                    sq += expected[(i, j)].powi(2);
                }
            }
            track(got.summed_square, sq);
        }
    }
    for m in [1, 2] {
        let norms = estimates::adjoint_state_norms(m, 0, 0, 4 - m, &t).unwrap();
        for k in 1..=4 - m {
            let c = adjoint_dense(k, m, 0, 0, &t);
            track(norms[k - 1], t.dim(k) as f64 * c.squared_norm_l2());
        }
    }
    (worst <= 1e-8, format!("{count} values, max deviation {worst:.2e}"))
}

fn probes(n: usize) -> Vec<OrthogonalProbe> {
    let mut out: Vec<_> = (1..=10).map(|i| OrthogonalProbe::rotation(n, 0.1 * i as f64).unwrap()).collect();
    out.extend((0..5).map(|s| OrthogonalProbe::random(n, 42 + s)));
    out
}

fn characters() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [3, 4] {
        let owned;
        let t = if n == 3 {
            tower3()
        } else {
            owned = tower(4, 6);
            &owned
        };
        for p in probes(n) {
            for r in 0..=6 {
                let u = deform::corep_matrix(r, &p.g, t).unwrap();
                let tr: f64 = (0..u.nrows()).map(|i| u[(i, i)]).sum();
                worst = worst.max((tr - chebyshev(r, &p.trace())).abs());
            }
        }
    }
    (worst <= 1e-8, format!("15 probes, n in {{3, 4}}, r <= 6, max deviation {worst:.2e}"))
}

fn properness() -> Outcome {
    let t = tower3();
    let x = deform::elementary_antisymmetric(3, 0, 1);
    let mut worst: f64 = 0.0;
    for r in 1..=6 {
        let (lhs, rhs) = deform::properness_check(r, &x, t).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    let y = OrthogonalProbe::random(3, 9).x;
    for r in 1..=6 {
        let (lhs, rhs) = deform::properness_check(r, &y, t).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    let mut cocycle: f64 = 0.0;
    for r in 1..=3 {
        let gram = deform::cocycle_gram(r, &x, t, alg3()).unwrap();
        let expected = x.squared_norm_l2() * t.ctx.psi_eigenvalue(r);
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let e = if i == j { expected } else { 0.0 };
                cocycle = cocycle.max((gram[(i, j)] - e).abs() / expected);
            }
        }
    }
    (worst <= 1e-6 && cocycle <= 1e-6, format!("HS identity rel. deviation {worst:.2e}, cocycle Gram rel. deviation {cocycle:.2e}"))
}

fn conditional_negativity() -> Outcome {
    let mut tops = Vec::new();
    for n in [3, 4] {
        let t = tower(n, 4);
        let alg = CoeffAlgebra::build(2, &t).unwrap();
        tops.push(deform::cnd_check(2, &alg).unwrap().1);
    }
    let alg = alg3();
    let mut x = alg.basis(1, 0, 0);
    x.add_scaled(-1.0, &alg.one());
    let hand = alg.psi(&alg.product(&alg.star(&x), &x).unwrap());
    let ok = tops.iter().all(|&t| t <= 1e-8) && (hand + 1.0 / 6.0).abs() <= 1e-10;
    (ok, format!("max eigenvalue n=3 {:.2e}, n=4 {:.2e}; psi((v11 - 1)^2) = {hand:.12}", tops[0], tops[1]))
}

fn brannan() -> Outcome {
    let n = 3.0f64;
    let alg = alg3();
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.1f64, 0.5, 1.0] {
        let s = n - 2.0 + 2.0 * t.cos();
        let sup = deform::brannan_decay_sup(s, n, 40);
        let (_, min) = deform::tau_gram(2, s, alg).unwrap();
        ok &= sup.is_finite() && sup <= 10.0 && min >= -1e-8;
        parts.push(format!("t={t}: sup {sup:.3}, min eig {min:.1e}"));
    }
    (ok, parts.join("; "))
}

fn asymptotics() -> Outcome {
    let ctx = QContext::new(3).unwrap();
    let slope = 1.0 / 5f64.sqrt();
    let dev = (0..=200).map(|r| (ctx.psi_eigenvalue(r) - r as f64 * slope).abs()).fold(0.0, f64::max);
    let incs: Vec<f64> = (100..200).map(|r| ctx.psi_eigenvalue(r + 1) - ctx.psi_eigenvalue(r)).collect();
    let spread = incs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - incs.iter().cloned().fold(f64::INFINITY, f64::min);
    (dev <= 1.0 && spread <= 1e-6, format!("max |c_r - r/sqrt 5| = {dev:.4}, increment spread for r >= 100 = {spread:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Jones-Wenzl projections exact", jones_wenzl_exact),
        ("tower consistency", tower_consistency),
        ("intertwiner norm formula", intertwiner_norms),
        ("far-apart decay", far_apart),
        ("S-sum bounds", s_sums),
        ("adjoint coefficient decay", adjoint_decay),
        ("dense oracle equivalence", oracle_equivalence),
        ("character identity", characters),
        ("properness and cocycle Gram", properness),
        ("conditional negativity", conditional_negativity),
        ("Brannan decay and tau positivity", brannan),
        ("c_r asymptotics", asymptotics),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failures += usize::from(!pass);
        println!(
            "criterion {:>2} {:<34} {}  [{:.1}s] {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
