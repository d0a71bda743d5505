//! Chebyshev polynomials, q-numbers and the scalar eigenvalues of the
//! Brannan multipliers and of the form psi.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Ambient parameters of `O_n^+` in the Kac case.
#[derive(Clone, Debug, PartialEq)]
pub struct QContext {
    pub n: usize,
    pub delta: i64,
    pub q: f64,
    pub rho: f64,
}

impl QContext {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("n must be at least 3, got {n}")));
        }
        let nf = n as f64;
        let root = (nf * nf - 4.0).sqrt();
        Ok(Self {
            n,
            delta: n as i64,
            q: 2.0 / (nf + root),
            rho: (nf + root) / 2.0,
        })
    }

    /// `dim H_k = U_k(n)` as an exact integer.
    pub fn dim_exact(&self, k: usize) -> BigInt {
        chebyshev(k, &BigInt::from(self.n))
    }

    /// `dim H_k` as a machine integer; panics if it does not fit.
    pub fn dim(&self, k: usize) -> usize {
        self.dim_exact(k).to_usize().expect("dimension exceeds usize")
    }

    /// `U_k(n)` as a double, for `k < 0` returns 0.
    pub fn dim_f64(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            chebyshev(k as usize, &(self.n as f64))
        }
    }

    pub fn psi_eigenvalue(&self, r: usize) -> f64 {
        psi_eigenvalue_exact(r, self.n).to_f64().unwrap_or(f64::NAN)
    }

    pub fn brannan_eigenvalue(&self, k: usize, s: f64) -> Result<f64> {
        let n = self.n as f64;
        if !(s > 2.0 && s <= n) {
            return Err(Error::InvalidArgument(format!("s must lie in (2, {n}], got {s}")));
        }
        Ok(chebyshev_ratio(k, s, n))
    }
}

/// `U_k(x)` from `U_0 = 1`, `U_1 = x`, `U_{k+1} = x U_k - U_{k-1}`.
pub fn chebyshev<T>(k: usize, x: &T) -> T
where
    T: Clone + One + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T> + Sub<&'a T, Output = T>,
{
    let mut prev = T::zero();
    let mut cur = T::one();
    for _ in 0..k {
        let next = &(x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(U_k(x), U'_k(x))` via the coupled recursion `U'_{k+1} = x U'_k + U_k - U'_{k-1}`.
pub fn chebyshev_with_derivative<T>(k: usize, x: &T) -> (T, T)
where
    T: Clone + One + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T> + Sub<&'a T, Output = T> + Add<&'a T, Output = T>,
{
    let (mut u_prev, mut u) = (T::zero(), T::one());
    let (mut d_prev, mut d) = (T::zero(), T::zero());
    for _ in 0..k {
        let u_next = &(x * &u) - &u_prev;
        let d_next = &(&(x * &d) - &d_prev) + &u;
        u_prev = std::mem::replace(&mut u, u_next);
        d_prev = std::mem::replace(&mut d, d_next);
    }
    (u, d)
}

/// `U_k(s) / U_k(n)` as a product of the successive ratios
/// `U_j(x) / U_{j-1}(x)`, which stays finite for large `k`.
pub fn chebyshev_ratio(k: usize, s: f64, n: f64) -> f64 {
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    let mut ratio = 1.0;
    for _ in 0..k {
        a = s - 1.0 / a;
        b = n - 1.0 / b;
        ratio *= a / b;
    }
    ratio
}

pub fn psi_eigenvalue_exact(r: usize, n: usize) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(n));
    let (u, d) = chebyshev_with_derivative(r, &x);
    d / u
}

/// Number of ±1 lattice paths of length `k` from 0 to `r` staying nonnegative.
pub fn path_multiplicity(k: usize, r: usize) -> u128 {
    if r > k || (k - r) % 2 == 1 {
        return 0;
    }
    let mut row = vec![0u128; k + 2];
    row[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; k + 2];
        for (h, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            next[h + 1] += c;
            if h > 0 {
                next[h - 1] += c;
            }
        }
        row = next;
    }
    row[r]
}
