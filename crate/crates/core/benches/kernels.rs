use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fon_core::deform::{corep_matrix, OrthogonalProbe};
use fon_core::estimates::{adjoint_coeff, random_unit, s_sum};
use fon_core::fusion::CoeffAlgebra;
use fon_core::par::{self, Exec};
use fon_core::rep::IsometryTower;
use fon_core::QContext;

fn policies() -> [(&'static str, Exec); 2] {
    [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)]
}

fn kernels(c: &mut Criterion) {
    let tower = IsometryTower::build(7, &QContext::new(3).unwrap()).unwrap();
    let zeta = random_unit(2, 42, &tower);
    let g = OrthogonalProbe::random(3, 1).g;

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, exec) in policies() {
        par::set_exec(exec);
        group.bench_function(BenchmarkId::new("s_sum_k7_l2_m1", name), |b| b.iter(|| s_sum(7, 2, 1, &zeta, &tower).unwrap()));
        group.bench_function(BenchmarkId::new("adjoint_coeff_k6_l1", name), |b| {
            b.iter(|| adjoint_coeff(6, 1, 0, 0, &tower).unwrap())
        });
        group.bench_function(BenchmarkId::new("corep_matrix_r6", name), |b| b.iter(|| corep_matrix(6, &g, &tower).unwrap()));
        group.bench_function(BenchmarkId::new("coeff_algebra_degree2", name), |b| {
            b.iter(|| CoeffAlgebra::build(2, &tower).unwrap())
        });
    }
    par::set_exec(Exec::Parallel);
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
