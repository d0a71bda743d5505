//! Dense index-loop oracles that avoid the fusion machinery entirely.
#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use fon_core::rep::{diagram_to_matrix, IsometryTower};
use fon_core::tl::{jones_wenzl, Pairing, TLElement};
use fon_core::QContext;

/// Noncrossing perfect matchings of `0..len`, as partner arrays.
pub fn nc_pairings(len: usize) -> Vec<Vec<usize>> {
    fn go(points: &[usize], out: &mut Vec<(usize, usize)>, acc: &mut Vec<Vec<(usize, usize)>>) {
        if points.is_empty() {
            acc.push(out.clone());
            return;
        }
        let first = points[0];
        for j in (1..points.len()).step_by(2) {
            out.push((first, points[j]));
            let inside = &points[1..j];
            let outside = &points[j + 1..];
            let mut inner_acc = Vec::new();
            go(inside, &mut Vec::new(), &mut inner_acc);
            for inner in inner_acc {
                let mut with_inner = out.clone();
                with_inner.extend(inner);
                go(outside, &mut with_inner, acc);
            }
            out.pop();
        }
    }
    let points: Vec<usize> = (0..len).collect();
    let mut acc = Vec::new();
    go(&points, &mut Vec::new(), &mut acc);
    acc.into_iter()
        .map(|pairs| {
            let mut partner = vec![0; len];
            for (a, b) in pairs {
                partner[a] = b;
                partner[b] = a;
            }
            partner
        })
        .collect()
}

/// Number of cycles in the union of two perfect matchings.
pub fn loops(p: &[usize], q: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        loop {
            seen[x] = true;
            let y = p[x];
            seen[y] = true;
            x = q[y];
            if x == start {
                break;
            }
        }
    }
    count
}

/// Weingarten matrix: the inverse of `[n^{loops(p, q)}]` over noncrossing pairings.
pub fn weingarten(n: usize, len: usize) -> (Vec<Vec<usize>>, Mat<f64>) {
    let ps = nc_pairings(len);
    let gram = Mat::from_fn(ps.len(), ps.len(), |i, j| (n as f64).powi(loops(&ps[i], &ps[j]) as i32));
    let id = Mat::from_fn(ps.len(), ps.len(), |i, j| if i == j { 1.0 } else { 0.0 });
    let w = gram.partial_piv_lu().solve(&id);
    (ps, w)
}

/// `Σ_α x_α` over multi-indices constant on the blocks of `p`.
pub fn pair_sum(x: &[f64], n: usize, p: &[usize]) -> f64 {
    let len = p.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; len];
    for (flat, &v) in x.iter().enumerate() {
        let mut rest = flat;
        for slot in idx.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        if (0..len).all(|a| idx[a] == idx[p[a]]) {
            total += v;
        }
    }
    total
}

/// Haar state of `Σ x_α y_β u_{α_1 β_1} ⋯ u_{α_L β_L}` by the Weingarten formula.
pub fn haar_word(n: usize, x: &[f64], y: &[f64], ps: &[Vec<usize>], w: &Mat<f64>) -> f64 {
    let xs: Vec<f64> = ps.iter().map(|p| pair_sum(x, n, p)).collect();
    let ys: Vec<f64> = ps.iter().map(|p| pair_sum(y, n, p)).collect();
    let mut total = 0.0;
    for i in 0..ps.len() {
        for j in 0..ps.len() {
            total += xs[i] * w[(i, j)] * ys[j];
        }
    }
    total
}

pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

pub fn reverse(v: &[f64], n: usize, legs: usize) -> Vec<f64> {
    (0..v.len())
        .map(|flat| {
            let mut rest = flat;
            let mut rev = 0;
            for _ in 0..legs {
                rev = rev * n + rest % n;
                rest /= n;
            }
            v[rev]
        })
        .collect()
}

/// Contracts the listed leg pairs of `v` (on `legs` legs) against `δ`.
pub fn contract_pairs(v: &[f64], n: usize, legs: usize, pairs: &[(usize, usize)]) -> Vec<f64> {
    let mut removed = vec![false; legs];
    for &(a, b) in pairs {
        removed[a] = true;
        removed[b] = true;
    }
    let kept: Vec<usize> = (0..legs).filter(|&a| !removed[a]).collect();
    let mut out = vec![0.0; n.pow(kept.len() as u32)];
    let mut idx = vec![0usize; legs];
    for (flat, &x) in v.iter().enumerate() {
        let mut rest = flat;
        for slot in idx.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
            let o = kept.iter().fold(0, |acc, &a| acc * n + idx[a]);
            out[o] += x;
        }
    }
    out
}

/// `m` nested caps on legs `pos..pos + 2m`.
pub fn nested_pairs(pos: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m).map(|j| (pos + j, pos + 2 * m - 1 - j)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(a: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

/// Dense Jones-Wenzl projection on `k` legs from the exact diagram.
pub fn jw_dense(k: usize, ctx: &QContext) -> Mat<f64> {
    if k == 0 {
        return identity(1);
    }
    let p = jones_wenzl(k, ctx.n as i64).unwrap();
    diagram_to_matrix(&p, ctx).unwrap().entries
}

/// `A ⊗ B` for square matrices.
pub fn kron_mat(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |i, j| {
        a[(i / b.nrows(), j / b.ncols())] * b[(i % b.nrows(), j % b.ncols())]
    })
}

pub fn identity(d: usize) -> Mat<f64> {
    Mat::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// Orthogonal projection onto the `H_r`-isotypic part of `(R^n)^{⊗legs}`:
/// the range of all diagrams `legs <- r` composed with `p_r`.
pub fn isotypic_dense(legs: usize, r: usize, ctx: &QContext) -> Mat<f64> {
    let dim = ctx.n.pow(legs as u32);
    if r > legs || (legs - r) % 2 == 1 {
        return Mat::zeros(dim, dim);
    }
    let pr = jw_dense(r, ctx);
    let mut cols = Vec::new();
    for d in Pairing::all(legs, r) {
        let m = diagram_to_matrix(&TLElement::from_pairing(d, ctx.n as i64), ctx).unwrap().entries;
        let mp = &m * &pr;
        for c in 0..mp.ncols() {
            cols.push((0..dim).map(|i| mp[(i, c)]).collect::<Vec<_>>());
        }
    }
    let c = Mat::from_fn(dim, cols.len(), |i, j| cols[j][i]);
    let gram = &c * c.transpose();
    let eig = gram.as_ref().self_adjoint_eigen(Side::Lower).unwrap();
    let vals = eig.S().column_vector();
    let u = eig.U();
    let scale = (0..dim).map(|i| vals[i]).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..dim).filter(|&i| vals[i] > 1e-9 * scale).collect();
    Mat::from_fn(dim, dim, |i, j| keep.iter().map(|&c| u[(i, c)] * u[(j, c)]).sum())
}

pub fn max_singular(a: &Mat<f64>) -> f64 {
    a.as_ref().singular_values().unwrap().into_iter().fold(0.0, f64::max)
}

pub fn col(m: &Mat<f64>, c: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, c)]).collect()
}

/// `||(P_{a+b} ⊗ P_c) Q_r (P_a ⊗ P_{b+c})||` from dense matrices.
pub fn far_apart_dense(a: usize, b: usize, c: usize, r: usize, ctx: &QContext) -> f64 {
    let left = kron_mat(&jw_dense(a, ctx), &jw_dense(b + c, ctx));
    let right = kron_mat(&jw_dense(a + b, ctx), &jw_dense(c, ctx));
    let q = isotypic_dense(a + b + c, r, ctx);
    max_singular(&(&right * &q * &left))
}

/// Channel components for the listed `rs`, then `S_+` and the unprojected total.
pub fn s_sum_dense(k: usize, l: usize, m: usize, zeta: &[f64], rs: &[usize], ctx: &QContext) -> (Vec<f64>, f64, f64) {
    let n = ctx.n;
    let pk = jw_dense(k, ctx);
    let big = k + l - 2 * m;
    let pbig = jw_dense(big, ctx);
    let qs: Vec<Mat<f64>> = rs.iter().map(|&r| isotypic_dense(big, r, ctx)).collect();
    let mut comps = vec![0.0; rs.len()];
    let (mut plus, mut total) = (0.0, 0.0);
    for alpha in 0..pk.ncols() {
        let e = col(&pk, alpha);
        let y = contract_pairs(&kron(&e, zeta), n, k + l, &nested_pairs(k - m, m));
        let x = contract_pairs(&kron(zeta, &e), n, k + l, &nested_pairs(l - m, m));
        for (slot, q) in comps.iter_mut().zip(&qs) {
            *slot += dot(&x, &mat_vec(q, &y));
        }
        plus += dot(&x, &mat_vec(&pbig, &y));
        total += dot(&x, &y);
    }
    (comps, plus, total)
}

pub fn s_sum_diag_dense(k: usize, m: usize, mbar: usize, zeta: &[f64], xi: &[f64], ctx: &QContext) -> f64 {
    let n = ctx.n;
    let pk = jw_dense(k, ctx);
    (0..pk.ncols())
        .map(|alpha| {
            let e = col(&pk, alpha);
            let l = contract_pairs(&kron(zeta, &e), n, 2 * mbar + k, &nested_pairs(mbar, mbar));
            let r = contract_pairs(&kron(&e, xi), n, k + 2 * m, &nested_pairs(k - m, m));
            dot(&l, &r)
        })
        .sum()
}

/// `Σ_p h((v^k_{jp} v^l_{ab})^* v^l_{ab} v^k_{ip})` through the Weingarten formula.
pub fn adjoint_dense(k: usize, l: usize, a: usize, b: usize, tower: &IsometryTower) -> Mat<f64> {
    let n = tower.n;
    let (ik, il) = (tower.iota(k).unwrap(), tower.iota(l).unwrap());
    let (ea, eb) = (col(il, a), col(il, b));
    let (ps, w) = weingarten(n, 2 * (k + l));
    let mut right = vec![0.0; n.pow(2 * (k + l) as u32)];
    for p in 0..ik.ncols() {
        let ep = col(ik, p);
        let v = kron(&reverse(&kron(&ep, &eb), n, k + l), &kron(&eb, &ep));
        right.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
    }
    let rs: Vec<f64> = ps.iter().map(|p| pair_sum(&right, n, p)).collect();
    let wr: Vec<f64> = (0..ps.len()).map(|i| (0..ps.len()).map(|j| w[(i, j)] * rs[j]).sum()).collect();
    let dk = ik.ncols();
    Mat::from_fn(dk, dk, |i, j| {
        let (ei, ej) = (col(ik, i), col(ik, j));
        let v = kron(&reverse(&kron(&ej, &ea), n, k + l), &kron(&ea, &ei));
        ps.iter().zip(&wr).map(|(p, x)| pair_sum(&v, n, p) * x).sum()
    })
}
