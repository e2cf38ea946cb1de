//! Incremental 3D convex hull.
//!
//! Points closer than `eps` to a hull facet are treated as non-extreme, so
//! coplanar samples (cube corners plus points on its faces) never become hull
//! vertices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::Vec3;

#[derive(Debug, Clone)]
pub struct Hull {
    /// Extreme points, in the order they were first used.
    pub vertices: Vec<Vec3>,
    /// Indices into `points` of each hull vertex.
    pub source_index: Vec<usize>,
    /// Outward-oriented triangles over `vertices`.
    pub triangles: Vec<[usize; 3]>,
}

struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let n = (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
        let normal = n.normalize();
        Face {
            v,
            offset: normal.dot(&points[v[0]]),
            normal,
            alive: true,
        }
    }

    fn height(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Convex hull of `points`; `rel_eps` is relative to the bounding-box diagonal.
pub fn convex_hull(points: &[Vec3], rel_eps: f64) -> Result<Hull> {
    if points.len() < 4 {
        return Err(Error::Degenerate("fewer than 4 points".into()));
    }
    let (lo, hi) = points.iter().fold(
        (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let diag = (hi - lo).norm();
    if !diag.is_finite() || diag == 0.0 {
        return Err(Error::Degenerate("points coincide or are not finite".into()));
    }
    let eps = rel_eps * diag;

    // Initial tetrahedron from extreme points.
    let i0 = (0..points.len())
        .min_by(|&a, &b| points[a].x.total_cmp(&points[b].x))
        .unwrap();
    let i1 = (0..points.len())
        .max_by(|&a, &b| {
            (points[a] - points[i0])
                .norm_squared()
                .total_cmp(&(points[b] - points[i0]).norm_squared())
        })
        .unwrap();
    let dir = (points[i1] - points[i0]).normalize();
    let line_dist = |p: &Vec3| {
        let d = p - points[i0];
        (d - dir * d.dot(&dir)).norm()
    };
    let i2 = (0..points.len())
        .max_by(|&a, &b| line_dist(&points[a]).total_cmp(&line_dist(&points[b])))
        .unwrap();
    if line_dist(&points[i2]) <= eps {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let n = (points[i1] - points[i0])
        .cross(&(points[i2] - points[i0]))
        .normalize();
    let i3 = (0..points.len())
        .max_by(|&a, &b| {
            n.dot(&(points[a] - points[i0]))
                .abs()
                .total_cmp(&n.dot(&(points[b] - points[i0])).abs())
        })
        .unwrap();
    if n.dot(&(points[i3] - points[i0])).abs() <= eps {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    let centroid = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Face>, edge_face: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let f = Face::new(points, v);
        let id = faces.len();
        for k in 0..3 {
            edge_face.insert((v[k], v[(k + 1) % 3]), id);
        }
        faces.push(f);
    };
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let f = Face::new(points, tri);
        let v = if f.height(&centroid) > 0.0 {
            [tri[0], tri[2], tri[1]]
        } else {
            tri
        };
        add_face(&mut faces, &mut edge_face, v);
    }

    let mut used = vec![false; points.len()];
    for i in [i0, i1, i2, i3] {
        used[i] = true;
    }

    for (pi, p) in points.iter().enumerate() {
        if used[pi] {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.height(p) > eps)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut is_visible = vec![false; faces.len()];
        for &f in &visible {
            is_visible[f] = true;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let twin = edge_face[&(b, a)];
                if !is_visible[twin] {
                    horizon.push((a, b));
                }
            }
        }
        for &f in &visible {
            faces[f].alive = false;
            let v = faces[f].v;
            for k in 0..3 {
                edge_face.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            add_face(&mut faces, &mut edge_face, [a, b, pi]);
        }
        used[pi] = true;
    }

    let mut remap = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut source_index = Vec::new();
    let mut triangles = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        let mut tri = [0; 3];
        for (slot, &v) in tri.iter_mut().zip(&f.v) {
            if remap[v] == usize::MAX {
                remap[v] = vertices.len();
                vertices.push(points[v]);
                source_index.push(v);
            }
            *slot = remap[v];
        }
        triangles.push(tri);
    }
    Ok(Hull {
        vertices,
        source_index,
        triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cube_corners_with_face_points_give_the_cube() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        pts.push(Vec3::new(0.5, 0.5, 0.0));
        pts.push(Vec3::new(0.3, 1.0, 0.7));
        pts.push(Vec3::new(0.5, 0.5, 0.5));
        let h = convex_hull(&pts, 1e-10).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.triangles.len(), 12);
    }

    #[test]
    fn sphere_points_are_all_extreme() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec3> = (0..200)
            .map(|_| {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                v.normalize()
            })
            .collect();
        let h = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(h.vertices.len(), 200);
        assert_eq!(h.triangles.len(), 2 * 200 - 4);
        for t in &h.triangles {
            let n = (h.vertices[t[1]] - h.vertices[t[0]]).cross(&(h.vertices[t[2]] - h.vertices[t[0]]));
            for v in &h.vertices {
                assert!(n.dot(&(v - h.vertices[t[0]])) <= 1e-12);
            }
        }
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(convex_hull(&pts, 1e-10), Err(Error::Degenerate(_))));
    }
}
