//! Leg-wise contractions on vectors of `(R^n)^{⊗k}`.
//!
//! A vector on `k` legs has length `n^k`, with the first leg most significant
//! (row-major Kronecker order).

pub fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Number of legs of a vector of length `len`; panics if `len` is not a power of `n`.
pub fn legs_of(len: usize, n: usize) -> usize {
    let mut k = 0;
    let mut m = 1;
    while m < len {
        m *= n;
        k += 1;
    }
    assert_eq!(m, len, "length {len} is not a power of {n}");
    k
}

pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Contracts legs `pos` and `pos + 1` against the cap `T_1^*`.
pub fn cap(v: &[f64], n: usize, legs: usize, pos: usize) -> Vec<f64> {
    assert!(pos + 2 <= legs);
    let outer = pow(n, pos);
    let inner = pow(n, legs - pos - 2);
    let mut out = vec![0.0; outer * inner];
    for a in 0..outer {
        let dst = &mut out[a * inner..(a + 1) * inner];
        for s in 0..n {
            let base = ((a * n + s) * n + s) * inner;
            for (d, x) in dst.iter_mut().zip(&v[base..base + inner]) {
                *d += x;
            }
        }
    }
    out
}

/// Adds `coef` times the cup `T_1` inserted at leg `pos` of `v` (on `legs`
/// legs) into `out` (on `legs + 2` legs).
pub fn cup_add(v: &[f64], n: usize, legs: usize, pos: usize, coef: f64, out: &mut [f64]) {
    assert!(pos <= legs);
    let outer = pow(n, pos);
    let inner = pow(n, legs - pos);
    debug_assert_eq!(out.len(), outer * n * n * inner);
    for a in 0..outer {
        let src = &v[a * inner..(a + 1) * inner];
        for s in 0..n {
            let base = ((a * n + s) * n + s) * inner;
            for (d, x) in out[base..base + inner].iter_mut().zip(src) {
                *d += coef * x;
            }
        }
    }
}

pub fn cup(v: &[f64], n: usize, legs: usize, pos: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len() * n * n];
    cup_add(v, n, legs, pos, 1.0, &mut out);
    out
}

/// Contracts the `2m` legs starting at `pos` against `m` nested caps.
pub fn cap_nested(v: &[f64], n: usize, legs: usize, pos: usize, m: usize) -> Vec<f64> {
    let mut cur = v.to_vec();
    let mut cur_legs = legs;
    for j in 0..m {
        cur = cap(&cur, n, cur_legs, pos + m - 1 - j);
        cur_legs -= 2;
    }
    cur
}

/// Inserts `m` nested cups starting at leg `pos`.
pub fn cup_nested(v: &[f64], n: usize, legs: usize, pos: usize, m: usize) -> Vec<f64> {
    let mut cur = v.to_vec();
    let mut cur_legs = legs;
    for j in 0..m {
        cur = cup(&cur, n, cur_legs, pos + j);
        cur_legs += 2;
    }
    cur
}

/// Applies the `n x n` matrix `g` (row-major) to leg `pos`.
pub fn apply_leg(v: &[f64], n: usize, legs: usize, pos: usize, g: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    apply_leg_add(v, n, legs, pos, g, &mut out);
    out
}

fn apply_leg_add(v: &[f64], n: usize, legs: usize, pos: usize, g: &[f64], out: &mut [f64]) {
    let outer = pow(n, pos);
    let inner = pow(n, legs - pos - 1);
    for a in 0..outer {
        for i in 0..n {
            let dst = (a * n + i) * inner;
            for j in 0..n {
                let gij = g[i * n + j];
                if gij == 0.0 {
                    continue;
                }
                let src = (a * n + j) * inner;
                for c in 0..inner {
                    out[dst + c] += gij * v[src + c];
                }
            }
        }
    }
}

/// `g^{⊗legs} v`.
pub fn apply_tensor_power(v: &[f64], n: usize, legs: usize, g: &[f64]) -> Vec<f64> {
    let mut cur = v.to_vec();
    for pos in 0..legs {
        cur = apply_leg(&cur, n, legs, pos, g);
    }
    cur
}

/// `Σ_a id ⊗ .. ⊗ x (leg a) ⊗ .. ⊗ id` applied to `v`.
pub fn apply_leg_sum(v: &[f64], n: usize, legs: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for pos in 0..legs {
        apply_leg_add(v, n, legs, pos, x, &mut out);
    }
    out
}

/// Reverses the order of the legs.
pub fn reverse_legs(v: &[f64], n: usize, legs: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (idx, &x) in v.iter().enumerate() {
        let mut rest = idx;
        let mut rev = 0;
        for _ in 0..legs {
            rev = rev * n + rest % n;
            rest /= n;
        }
        out[rev] = x;
    }
    out
}

/// Applies the Jones-Wenzl projection `P_k` to legs `off..off + k`, matrix
/// free, by the generalized Wenzl recursion
/// `P_k = (P_{k-1} ⊗ 1) + Σ_i (-1)^{k-i} (d_{i-1}/d_{k-1}) (id ⊗ T_1 ⊗ id ⊗ T_1^*)(P_{k-1} ⊗ 1)`.
/// `dims[j]` must hold `U_j(n)` for `j < k`.
pub fn jw_apply(v: &[f64], n: usize, legs: usize, off: usize, k: usize, dims: &[f64]) -> Vec<f64> {
    assert!(off + k <= legs);
    let mut w = v.to_vec();
    jw_in_place(&mut w, n, legs, off, k, dims);
    w
}

fn jw_in_place(w: &mut Vec<f64>, n: usize, legs: usize, off: usize, k: usize, dims: &[f64]) {
    if k <= 1 {
        return;
    }
    jw_in_place(w, n, legs, off, k - 1, dims);
    let capped = cap(w, n, legs, off + k - 2);
    for i in 1..k {
        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign * dims[i - 1] / dims[k - 1];
        cup_add(&capped, n, legs - 2, off + i - 1, coef, w);
    }
}

/// `U_j(n)` for `j = 0..len`, as doubles.
pub fn dims_f64(n: usize, len: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..len {
        out.push(cur);
        let next = nf * cur - prev;
        prev = cur;
        cur = next;
    }
    out
}
