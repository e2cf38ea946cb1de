mod common;

use common::unfold::Polyhedron;

// Values produced by the oracle alone and frozen before the engine existed.
const CUBE_OPPOSITE_VERTICES: f64 = 2.236_067_977_499_79;
const CUBE_OPPOSITE_FACE_CENTERS: f64 = 2.0;
const TETRA_OPPOSITE_EDGE_MIDPOINTS: f64 = 1.0;

#[test]
fn oracle_cube_opposite_vertices() {
    let cube = Polyhedron::unit_cube();
    let d = cube.distance([0., 0., 0.], [1., 1., 1.], 4);
    assert!((d - CUBE_OPPOSITE_VERTICES).abs() < 1e-12, "{d}");
    assert!((d - 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn oracle_cube_face_centers() {
    let cube = Polyhedron::unit_cube();
    let d = cube.distance([0.5, 0.5, 0.], [0.5, 0.5, 1.], 4);
    assert!((d - CUBE_OPPOSITE_FACE_CENTERS).abs() < 1e-12, "{d}");
}

#[test]
fn oracle_tetrahedron_opposite_edge_midpoints() {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    let t = Polyhedron::regular_tetrahedron(1.0);
    // Edge (v0,v1) and edge (v2,v3).
    let m01 = [s, 0.0, 0.0];
    let m23 = [-s, 0.0, 0.0];
    let d = t.distance(m01, m23, 4);
    assert!((d - TETRA_OPPOSITE_EDGE_MIDPOINTS).abs() < 1e-12, "{d}");
}

#[test]
fn oracle_same_face_is_euclidean() {
    let cube = Polyhedron::unit_cube();
    let d = cube.distance([0.1, 0.2, 0.], [0.7, 0.9, 0.], 4);
    assert!((d - (0.36f64 + 0.49).sqrt()).abs() < 1e-12);
}
