use std::sync::OnceLock;

use faer::Mat;
use fon_core::deform::{corep_matrix, multiplier_compression, OrthogonalProbe};
use fon_core::rep::{from_coords, gaussian_vector, lift, mat_vec, mat_vec_t, to_coords, unlift, IsometryTower};
use fon_core::tensor::dot;
use fon_core::QContext;
use proptest::prelude::*;

fn tower() -> &'static IsometryTower {
    static T: OnceLock<IsometryTower> = OnceLock::new();
    T.get_or_init(|| IsometryTower::build(5, &QContext::new(3).unwrap()).unwrap())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coordinates_round_trip(a in 0usize..=3, b in 0usize..=2, seed in any::<u64>()) {
        let t = tower();
        let (left, right) = (t.iota(a).unwrap(), t.iota(b).unwrap());
        let c = gaussian_vector(t.dim(a) * t.dim(b), seed);
        let y = from_coords(&c, left, right);
        prop_assert_eq!(y.len(), 3usize.pow((a + b) as u32));
        prop_assert!(max_diff(&to_coords(&y, left, right), &c) < 1e-12);
        prop_assert!((dot(&y, &y) - dot(&c, &c)).abs() < 1e-10 * dot(&c, &c).max(1.0));
    }

    #[test]
    fn lift_round_trip(k in 1usize..=4, cols in 1usize..=3, seed in any::<u64>()) {
        let t = tower();
        let w = t.iota(k).unwrap();
        let d = w.ncols() * 3;
        let g = gaussian_vector(d * cols, seed);
        let c = Mat::from_fn(d, cols, |i, j| g[j * d + i]);
        let back = unlift(w, &lift(w, &c, 3), 3);
        let err = (0..d).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| (back[(i, j)] - c[(i, j)]).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn projection_is_orthogonal(k in 1usize..=5, seed in any::<u64>()) {
        let t = tower();
        let len = 3usize.pow(k as u32);
        let (v, w) = (gaussian_vector(len, seed), gaussian_vector(len, seed ^ 0xabc));
        let pv = t.project(&v, k, 0, k);
        prop_assert!(max_diff(&t.project(&pv, k, 0, k), &pv) < 1e-10);
        prop_assert!((dot(&pv, &w) - dot(&v, &t.project(&w, k, 0, k))).abs() < 1e-9);
        let iota = t.iota(k).unwrap();
        let range = mat_vec(iota.as_ref(), &mat_vec_t(iota.as_ref(), &v));
        prop_assert!(max_diff(&pv, &range) < 1e-10);
    }

    #[test]
    fn coreps_are_multiplicative(r in 0usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = tower();
        let (g, h) = (OrthogonalProbe::random(3, s1).g, OrthogonalProbe::random(3, s2).g);
        let lhs = corep_matrix(r, &(&g * &h), t).unwrap();
        let rhs = corep_matrix(r, &g, t).unwrap() * corep_matrix(r, &h, t).unwrap();
        prop_assert!((lhs - rhs).norm_max() < 1e-10);
    }

    #[test]
    fn multiplier_compression_is_scalar(r in 0usize..=4, seed in any::<u64>()) {
        let c = multiplier_compression(r, &OrthogonalProbe::random(3, seed), tower()).unwrap();
        prop_assert!(c.deviation() < 1e-9);
    }
}
