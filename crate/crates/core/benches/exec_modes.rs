use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convexgeo::dc::{check_midpoint_4concavity, ProductPoint};
use convexgeo::fixtures;
use convexgeo::geodesic::{intrinsic_diameter, DiameterOptions, GeodesicOptions};
use convexgeo::Exec;

fn modes(c: &mut Criterion) {
    let mesh = fixtures::random_hull(200, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pairs: Vec<(ProductPoint, ProductPoint)> = (0..64)
        .map(|_| {
            let mut p = || mesh.random_point(&mut rng);
            (ProductPoint { x1: p(), x2: p() }, ProductPoint { x1: p(), x2: p() })
        })
        .collect();
    let opts = GeodesicOptions::default();

    let mut g = c.benchmark_group("midpoint_4c_64_pairs");
    g.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_midpoint_4concavity(&mesh, &pairs, &opts, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("diameter_hull_200");
    g.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        let d = DiameterOptions { exec, ..DiameterOptions::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &d, |b, d| {
            b.iter(|| intrinsic_diameter(&mesh, 400, d).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, modes);
criterion_main!(benches);
