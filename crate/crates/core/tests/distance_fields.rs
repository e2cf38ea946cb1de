use convexgeo::fixtures;
use convexgeo::geodesic::{DistanceField, SourceSet};
use convexgeo::levelset::*;
use convexgeo::Exec;
use std::f64::consts::PI;

#[test]
fn quarter_circles_around_a_cube_vertex() {
    let m = fixtures::unit_cube();
    let f = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None).unwrap();
    let ls = extract_level_set(&f, 0.5, DEFAULT_SUBDIV, Exec::Parallel).unwrap();
    let topo = levelset_topology(&m, &ls);
    assert_eq!(topo.n_components, 1);
    assert!(topo.closed[0] && topo.simple);
    assert!((ls.total_length - 0.75 * PI).abs() < 0.01 * 0.75 * PI);
    // Finer subdivision converges to the arc length from below.
    let fine = extract_level_set(&f, 0.5, 32, Exec::Parallel).unwrap();
    assert!(fine.total_length > ls.total_length && fine.total_length < 0.75 * PI);
    assert!((fine.total_length - 0.75 * PI).abs() < 1e-3);
}

#[test]
fn empty_level_sets() {
    let m = fixtures::unit_cube();
    let f = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None).unwrap();
    let ls = extract_level_set(&f, 2.5, DEFAULT_SUBDIV, Exec::Sequential).unwrap();
    assert!(ls.polylines.is_empty());
    assert_eq!(levelset_topology(&m, &ls).n_components, 0);
    let whole = DistanceField::build(&m, &SourceSet::whole_mesh(&m), None).unwrap();
    assert!(extract_level_set(&whole, 0.3, DEFAULT_SUBDIV, Exec::Sequential).unwrap().polylines.is_empty());
    assert!(extract_level_set(&f, 0.0, DEFAULT_SUBDIV, Exec::Sequential).is_err());
}

#[test]
fn two_sources_give_two_circles() {
    let m = fixtures::unit_cube();
    let s = SourceSet::points([m.vertex_point(0), m.vertex_point(6)]);
    let f = DistanceField::build(&m, &s, None).unwrap();
    let ls = extract_level_set(&f, 0.4, DEFAULT_SUBDIV, Exec::Sequential).unwrap();
    let topo = levelset_topology(&m, &ls);
    assert_eq!(topo.n_components, 2);
    assert!(topo.closed.iter().all(|c| *c) && topo.simple);
}

#[test]
fn scan_flags_maximum_and_merges() {
    let m = fixtures::unit_cube();
    let f = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None).unwrap();
    let grid = [0.3, 0.5, 0.8, 2.0, 2.22];
    let scan = scan_regular_values(&f, &grid, 0.05, None, DEFAULT_SUBDIV, Exec::Sequential).unwrap();
    assert_eq!(scan[0].flag, RadiusFlag::Regular);
    assert_eq!(scan[1].flag, RadiusFlag::Regular);
    assert!(scan[1].all_closed && scan[1].n_components == 1);
    assert_eq!(scan[4].flag, RadiusFlag::NearCritical);

    let s = SourceSet::points([m.vertex_point(0), m.vertex_point(6)]);
    let f = DistanceField::build(&m, &s, None).unwrap();
    let grid: Vec<f64> = (1..=12).map(|i| 0.1 * i as f64).collect();
    let scan = scan_regular_values(&f, &grid, 0.02, None, DEFAULT_SUBDIV, Exec::Sequential).unwrap();
    assert_eq!(scan[3].n_components, 2);
    let half = 5f64.sqrt() / 2.0;
    let near: Vec<_> = scan.iter().filter(|e| e.flag == RadiusFlag::NearCritical).collect();
    assert!(!near.is_empty());
    assert!(near.iter().any(|e| (e.r - half).abs() < 0.15), "{near:?}");
    assert!(scan_regular_values(&f, &[0.5, 0.4], 0.01, None, 4, Exec::Sequential).is_err());
}

#[test]
fn opposite_vertex_is_multijoined() {
    let m = fixtures::unit_cube();
    let e = estimate_multijoined_locus(&m, &SourceSet::vertex(&m, 0), 20.0, None, 0, Exec::Parallel).unwrap();
    let s = e
        .samples
        .iter()
        .find(|s| m.as_vertex(&s.point) == Some(6))
        .expect("opposite vertex in estimate");
    assert!(s.n_witnesses >= 2);
    assert_eq!(s.kind, LocusKind::Multijoined);
    for w in &s.witnesses {
        assert!((w.length - 5f64.sqrt()).abs() <= e.eps_tie);
    }
    assert_ne!(s.witnesses[0].faces, s.witnesses[1].faces);
}

#[test]
fn whole_mesh_has_no_exoskeleton() {
    let m = fixtures::unit_cube();
    let e = estimate_multijoined_locus(&m, &SourceSet::whole_mesh(&m), 20.0, None, 0, Exec::Sequential).unwrap();
    assert!(e.samples.is_empty());
}

#[test]
fn distinct_endpoints_are_ambiguous() {
    let m = fixtures::unit_cube();
    let s = SourceSet::points([m.vertex_point(0), m.vertex_point(6)]);
    let f = DistanceField::build(&m, &s, None).unwrap();
    let eps = 10.0 * f.e_field;
    // Equidistant from both sources, sqrt(1.25) away, on the edge x = 1, y = 0.
    let p = m.closest_point(&convexgeo::Vec3::new(1.0, 0.0, 0.5));
    let s = classify_point(&f, &p, eps).expect("tie point");
    assert_eq!(s.kind, LocusKind::Ambiguous);
    assert!((s.distance - 1.25f64.sqrt()).abs() < 1e-12);
    assert_ne!(s.witnesses[0].component, s.witnesses[1].component);
    let off = m.closest_point(&convexgeo::Vec3::new(1.0, 0.0, 0.3));
    assert!(classify_point(&f, &off, eps).is_none());
}
