//! Reference surfaces used by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Vec3;
use crate::hull::convex_hull;
use crate::mesh::ConvexSurfaceMesh;

const CUBE_QUADS: [[usize; 4]; 6] = [
    [0, 3, 2, 1],
    [4, 5, 6, 7],
    [0, 1, 5, 4],
    [1, 2, 6, 5],
    [2, 3, 7, 6],
    [3, 0, 4, 7],
];

fn cube_corners() -> Vec<Vec3> {
    [
        [0., 0., 0.],
        [1., 0., 0.],
        [1., 1., 0.],
        [0., 1., 0.],
        [0., 0., 1.],
        [1., 0., 1.],
        [1., 1., 1.],
        [0., 1., 1.],
    ]
    .iter()
    .map(|p| Vec3::new(p[0], p[1], p[2]))
    .collect()
}

/// `[0,1]^3` with vertex `i` at the usual OFF position; vertices 0 and 6 are opposite.
pub fn unit_cube() -> ConvexSurfaceMesh {
    let tris = CUBE_QUADS
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    ConvexSurfaceMesh::new(cube_corners(), tris).expect("cube is valid")
}

/// Axis-aligned cube `[-h,h]^3` centred at the origin.
pub fn centered_cube(h: f64) -> ConvexSurfaceMesh {
    unit_cube()
        .map_vertices(|v| (v - Vec3::repeat(0.5)) * (2.0 * h))
        .expect("cube is valid")
}

/// Unit cube whose faces are fanned around their centres; the centre of the
/// bottom face is moved by `push` along its outward normal.
pub fn cube_with_face_centers(push: f64) -> ConvexSurfaceMesh {
    let mut verts = cube_corners();
    let mut tris = Vec::new();
    for (i, q) in CUBE_QUADS.iter().enumerate() {
        let mut c = q.iter().map(|&v| verts[v]).sum::<Vec3>() / 4.0;
        if i == 0 {
            c.z -= push;
        }
        let ci = verts.len();
        verts.push(c);
        for k in 0..4 {
            tris.push([q[k], q[(k + 1) % 4], ci]);
        }
    }
    ConvexSurfaceMesh::new(verts, tris).expect("fanned cube is a closed surface")
}

/// Regular tetrahedron with the given edge length.
pub fn regular_tetrahedron(edge: f64) -> ConvexSurfaceMesh {
    let s = edge / (2.0 * 2f64.sqrt());
    let verts = vec![
        Vec3::new(s, s, s),
        Vec3::new(s, -s, -s),
        Vec3::new(-s, s, -s),
        Vec3::new(-s, -s, s),
    ];
    ConvexSurfaceMesh::new(verts, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).expect("tetrahedron is valid")
}

/// Hull of `n` random points on the ellipsoid with semi-axes `(1, 0.8, 0.6)`.
pub fn random_hull(n: usize, seed: u64) -> ConvexSurfaceMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec3> = (0..n)
        .map(|_| loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let r = v.norm();
            if r > 0.1 && r <= 1.0 {
                let u = v / r;
                break Vec3::new(u.x, 0.8 * u.y, 0.6 * u.z);
            }
        })
        .collect();
    let h = convex_hull(&pts, 1e-12).expect("random points span space");
    ConvexSurfaceMesh::new(h.vertices, h.triangles).expect("hull is valid")
}
