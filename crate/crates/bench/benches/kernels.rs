use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fracburgers::banded::BandedMatrix;
use fracburgers::compact::{psi_apply, CompactAverage};
use fracburgers::fractional::l1_explicit_part;
use fracburgers::L1Weights;
use fracburgers_bench::{history, smooth};

fn memory_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("l1_explicit_part");
    for n in [256, 2048] {
        let h = history(80, n + 1);
        let w = L1Weights::new(0.5, 1.0 / n as f64, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| l1_explicit_part(&w, &h, black_box(n)))
        });
    }
    group.finish();
}

fn banded_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("pentadiagonal_factor_solve");
    for dim in [79, 1023] {
        let mut a = BandedMatrix::zeros(dim, 2, 2);
        for i in 0..dim {
            for j in i.saturating_sub(2)..(i + 3).min(dim) {
                let v = if i == j {
                    6.0
                } else {
                    -1.0 / (1 + i.abs_diff(j)) as f64
                };
                a.set(i, j, v);
            }
        }
        let rhs: Vec<f64> = (0..dim).map(|i| (i as f64).sin()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| a.factor().unwrap().solve(black_box(&rhs)))
        });
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let u = smooth(256);
    let avg = CompactAverage::new(*u.grid()).unwrap();
    c.bench_function("psi_apply/256", |b| b.iter(|| psi_apply(black_box(&u), &u)));
    c.bench_function("recover_w/256", |b| b.iter(|| avg.recover_w(black_box(&u))));
}

criterion_group!(benches, memory_sum, banded_solve, operators);
criterion_main!(benches);
