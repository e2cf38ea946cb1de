mod common;

use common::unfold::Polyhedron;
use convexgeo::fixtures;
use convexgeo::geodesic::{midpoint, shortest_path, DistanceField, GeodesicOptions, SourceSet};
use convexgeo::{SurfacePoint, Vec3};
use rand::SeedableRng;

fn opts() -> GeodesicOptions {
    GeodesicOptions::exact(1e-9)
}

fn at(m: &convexgeo::ConvexSurfaceMesh, p: [f64; 3]) -> SurfacePoint {
    m.closest_point(&Vec3::new(p[0], p[1], p[2]))
}

#[test]
fn cube_opposite_vertices() {
    let m = fixtures::unit_cube();
    let r = shortest_path(&m, &m.vertex_point(0), &m.vertex_point(6), &opts()).unwrap();
    assert!((r.length - 5f64.sqrt()).abs() < 1e-9, "{}", r.length);
    assert!(r.lower_bound <= r.length && r.relative_gap() <= 1e-9);
    assert!(r.lower_bound >= 3f64.sqrt());
}

#[test]
fn cube_face_centers() {
    let m = fixtures::unit_cube();
    let r = shortest_path(&m, &at(&m, [0.5, 0.5, 0.0]), &at(&m, [0.5, 0.5, 1.0]), &opts()).unwrap();
    assert!((r.length - 2.0).abs() < 1e-9, "{}", r.length);
}

#[test]
fn identical_points_have_zero_length() {
    let m = fixtures::unit_cube();
    let p = at(&m, [0.3, 0.0, 0.4]);
    let r = shortest_path(&m, &p, &p, &opts()).unwrap();
    assert_eq!(r.length, 0.0);
    assert_eq!(r.path.len(), 1);
}

#[test]
fn tetrahedron_opposite_edge_midpoints() {
    let m = fixtures::regular_tetrahedron(1.0);
    let mid = |a: usize, b: usize| m.closest_point(&((m.vertices[a] + m.vertices[b]) / 2.0));
    let r = shortest_path(&m, &mid(0, 1), &mid(2, 3), &opts()).unwrap();
    assert!((r.length - 1.0).abs() < 1e-9, "{}", r.length);
}

#[test]
fn random_cube_pairs_match_oracle() {
    let m = fixtures::unit_cube();
    let cube = Polyhedron::unit_cube();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let a = m.random_point(&mut rng);
        let b = m.random_point(&mut rng);
        let (pa, pb) = (m.point(&a), m.point(&b));
        let oracle = cube.distance([pa.x, pa.y, pa.z], [pb.x, pb.y, pb.z], 6);
        let r = shortest_path(&m, &a, &b, &opts()).unwrap();
        assert!((r.length - oracle).abs() < 1e-9, "engine {} oracle {}", r.length, oracle);
        let poly = convexgeo::geodesic::polyline_length(&m, &r.path);
        assert!((poly - r.length).abs() < 1e-9, "path {} vs length {}", poly, r.length);
    }
}

#[test]
fn midpoint_across_an_edge() {
    let m = fixtures::unit_cube();
    // Symmetric about the edge x = 1, z = 0.
    let a = at(&m, [0.8, 0.5, 0.0]);
    let b = at(&m, [1.0, 0.5, 0.2]);
    let r = shortest_path(&m, &a, &b, &opts()).unwrap();
    assert!((r.length - 0.4).abs() < 1e-12);
    let s = midpoint(&m, &r).unwrap();
    assert!((m.point(&s) - Vec3::new(1.0, 0.5, 0.0)).norm() < 1e-12);
}

#[test]
fn field_from_vertex_reaches_opposite_vertex_six_ways() {
    let m = fixtures::unit_cube();
    let f = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None).unwrap();
    assert!((f.vertex_values[6] - 5f64.sqrt()).abs() < 1e-12);
    let ws = f.near_minimal(&m.vertex_point(6), 1e-9);
    assert_eq!(ws.len(), 6, "{:?}", ws.iter().map(|w| &w.edges).collect::<Vec<_>>());
    for w in &ws {
        assert!((w.length - 5f64.sqrt()).abs() < 1e-9);
    }
}

#[test]
fn random_hull_pairs_match_oracle() {
    for seed in 0..3 {
        let m = fixtures::random_hull(20, seed);
        let poly = Polyhedron {
            vertices: m.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
            faces: m.triangles.iter().map(|t| t.to_vec()).collect(),
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100 + seed);
        for _ in 0..15 {
            let a = m.random_point(&mut rng);
            let b = m.random_point(&mut rng);
            let (pa, pb) = (m.point(&a), m.point(&b));
            let oracle = poly.distance([pa.x, pa.y, pa.z], [pb.x, pb.y, pb.z], 12);
            let r = shortest_path(&m, &a, &b, &opts()).unwrap();
            assert!((r.length - oracle).abs() < 1e-9, "seed {seed}: engine {} oracle {}", r.length, oracle);
        }
    }
}
