//! Closed convex triangle meshes and points on them.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geom::{closest_point_on_triangle, Vec2, Vec3};
use crate::hull::convex_hull;

/// Barycentric coordinates closer than this to zero are snapped onto the edge or vertex.
pub const BARY_SNAP: f64 = 1e-12;

/// A location on the surface: a face index and barycentric coordinates in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub face: usize,
    pub bary: [f64; 3],
}

impl SurfacePoint {
    pub fn new(face: usize, bary: [f64; 3]) -> Self {
        SurfacePoint { face, bary }
    }
}

/// Planar layout of a face relative to one of its edges.
///
/// Edge `k` runs from `v[k]` at the origin to `v[k+1]` at `(len, 0)`; the
/// opposite corner `v[k+2]` sits at `apex` with positive `y`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeFrame {
    pub len: f64,
    pub apex: Vec2,
}

/// Closed convex surface given as an outward-oriented triangle mesh.
#[derive(Debug, Clone)]
pub struct ConvexSurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// `neighbors[f][k] = (g, j)`: edge `k` of `f` is edge `j` of `g`, traversed the other way.
    pub neighbors: Vec<[(usize, u8); 3]>,
    pub vertex_faces: Vec<Vec<usize>>,
    pub normals: Vec<Vec3>,
    pub offsets: Vec<f64>,
    pub areas: Vec<f64>,
    pub frames: Vec<[EdgeFrame; 3]>,
    /// Mean of the vertices; strictly interior for a nondegenerate convex body.
    pub interior: Vec3,
    /// Bounding-box diagonal.
    pub scale: f64,
}

impl ConvexSurfaceMesh {
    /// Builds adjacency and orients every face away from the vertex mean.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.len() < 4 || triangles.len() < 4 {
            return Err(Error::Degenerate("too few vertices or faces".into()));
        }
        for t in &triangles {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::Degenerate(format!("face {t:?} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Degenerate(format!("face {t:?} repeats a vertex")));
            }
        }
        let interior = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
        let (lo, hi) = vertices.iter().fold(
            (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
            |(lo, hi), p| (lo.inf(p), hi.sup(p)),
        );
        let scale = (hi - lo).norm();
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::Degenerate("vertices coincide or are not finite".into()));
        }

        let mut triangles = triangles;
        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for t in triangles.iter_mut() {
            let [a, b, c] = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
            let mut n = (b - a).cross(&(c - a));
            let area = 0.5 * n.norm();
            if area <= 1e-14 * scale * scale {
                return Err(Error::Degenerate(format!("face {t:?} has zero area")));
            }
            if n.dot(&((a + b + c) / 3.0 - interior)) < 0.0 {
                t.swap(1, 2);
                n = -n;
            }
            normals.push(n / (2.0 * area));
            areas.push(area);
        }

        let mut directed: HashMap<(usize, usize), (usize, u8)> = HashMap::with_capacity(3 * triangles.len());
        for (f, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if directed.insert(e, (f, k as u8)).is_some() {
                    return Err(Error::NonManifoldEdge(e.0.min(e.1), e.0.max(e.1)));
                }
            }
        }
        let mut neighbors = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let mut nb = [(0usize, 0u8); 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                nb[k] = *directed.get(&(b, a)).ok_or(Error::OpenSurface(a.min(b), a.max(b)))?;
            }
            neighbors.push(nb);
        }

        let mut vertex_faces = vec![Vec::new(); vertices.len()];
        for (f, t) in triangles.iter().enumerate() {
            for &v in t {
                vertex_faces[v].push(f);
            }
        }
        if let Some(v) = vertex_faces.iter().position(Vec::is_empty) {
            return Err(Error::Degenerate(format!("vertex {v} is not used by any face")));
        }
        let euler = vertices.len() as i64 - (directed.len() / 2) as i64 + triangles.len() as i64;
        if euler != 2 {
            return Err(Error::EulerCharacteristic(euler));
        }

        let volume: f64 = triangles
            .iter()
            .map(|t| {
                (vertices[t[0]] - interior).dot(&(vertices[t[1]] - interior).cross(&(vertices[t[2]] - interior)))
            })
            .sum::<f64>()
            / 6.0;
        if volume <= 1e-12 * scale.powi(3) {
            return Err(Error::Degenerate("enclosed volume is zero".into()));
        }

        let offsets = triangles
            .iter()
            .zip(&normals)
            .map(|(t, n)| n.dot(&vertices[t[0]]))
            .collect();
        let frames = triangles
            .iter()
            .map(|t| {
                let mut fr = [EdgeFrame { len: 0.0, apex: Vec2::zeros() }; 3];
                for (k, slot) in fr.iter_mut().enumerate() {
                    let a = vertices[t[k]];
                    let b = vertices[t[(k + 1) % 3]];
                    let c = vertices[t[(k + 2) % 3]];
                    let len = (b - a).norm();
                    let ex = (b - a) / len;
                    let ac = c - a;
                    let cx = ac.dot(&ex);
                    let cy = (ac - ex * cx).norm();
                    *slot = EdgeFrame { len, apex: Vec2::new(cx, cy) };
                }
                fr
            })
            .collect();

        Ok(ConvexSurfaceMesh {
            vertices,
            triangles,
            neighbors,
            vertex_faces,
            normals,
            offsets,
            areas,
            frames,
            interior,
            scale,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Embedded position of a surface point.
    pub fn point(&self, p: &SurfacePoint) -> Vec3 {
        let t = self.triangles[p.face];
        self.vertices[t[0]] * p.bary[0] + self.vertices[t[1]] * p.bary[1] + self.vertices[t[2]] * p.bary[2]
    }

    /// Checks the face index and barycentric coordinates, renormalizing tiny drift.
    pub fn check_point(&self, p: &SurfacePoint) -> Result<SurfacePoint> {
        if p.face >= self.num_faces() {
            return Err(Error::InvalidPoint(format!("face {} out of range", p.face)));
        }
        let s: f64 = p.bary.iter().sum();
        if p.bary.iter().any(|b| !b.is_finite() || *b < -1e-9) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPoint(format!("barycentric coordinates {:?}", p.bary)));
        }
        let b = p.bary.map(|b| b.max(0.0));
        let s: f64 = b.iter().sum();
        Ok(SurfacePoint::new(p.face, b.map(|x| x / s)))
    }

    /// Surface point sitting at vertex `v`.
    pub fn vertex_point(&self, v: usize) -> SurfacePoint {
        let f = self.vertex_faces[v][0];
        let mut bary = [0.0; 3];
        bary[self.triangles[f].iter().position(|&w| w == v).unwrap()] = 1.0;
        SurfacePoint::new(f, bary)
    }

    /// Vertex coinciding with `p`, if any.
    pub fn as_vertex(&self, p: &SurfacePoint) -> Option<usize> {
        let nz: SmallVec<[usize; 3]> = (0..3).filter(|&i| p.bary[i] > BARY_SNAP).collect();
        (nz.len() == 1).then(|| self.triangles[p.face][nz[0]])
    }

    /// Every face containing `p`, with `p` expressed in that face's barycentrics.
    pub fn locations(&self, p: &SurfacePoint) -> SmallVec<[(usize, [f64; 3]); 8]> {
        let mut out = SmallVec::new();
        let t = self.triangles[p.face];
        let nz: SmallVec<[usize; 3]> = (0..3).filter(|&i| p.bary[i] > BARY_SNAP).collect();
        match nz.len() {
            1 => {
                let v = t[nz[0]];
                for &f in &self.vertex_faces[v] {
                    let mut b = [0.0; 3];
                    b[self.triangles[f].iter().position(|&w| w == v).unwrap()] = 1.0;
                    out.push((f, b));
                }
            }
            2 => {
                // Edge k runs v[k] -> v[k+1]; the zero coordinate is k+2.
                let zero = (0..3).find(|i| !nz.contains(i)).unwrap();
                let k = (zero + 1) % 3;
                let s = p.bary[k] + p.bary[(k + 1) % 3];
                let (ba, bb) = (p.bary[k] / s, p.bary[(k + 1) % 3] / s);
                let mut b = [0.0; 3];
                b[k] = ba;
                b[(k + 1) % 3] = bb;
                out.push((p.face, b));
                let (g, j) = self.neighbors[p.face][k];
                let j = j as usize;
                let mut b = [0.0; 3];
                b[j] = bb;
                b[(j + 1) % 3] = ba;
                out.push((g, b));
            }
            _ => out.push((p.face, p.bary)),
        }
        out
    }

    /// Nearest surface point to an arbitrary point of space.
    pub fn closest_point(&self, q: &Vec3) -> SurfacePoint {
        let mut best = (f64::INFINITY, SurfacePoint::new(0, [1.0, 0.0, 0.0]));
        for (f, t) in self.triangles.iter().enumerate() {
            let (c, b) = closest_point_on_triangle(q, &self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]);
            let d = (c - q).norm_squared();
            if d < best.0 {
                best = (d, SurfacePoint::new(f, b));
            }
        }
        best.1
    }

    /// Distance from a point of space to the surface.
    pub fn distance_to_surface(&self, q: &Vec3) -> f64 {
        (self.point(&self.closest_point(q)) - q).norm()
    }

    /// Area-weighted uniform random point.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint {
        let total = self.total_area();
        let mut target = rng.gen::<f64>() * total;
        let mut face = self.num_faces() - 1;
        for (f, a) in self.areas.iter().enumerate() {
            if target < *a {
                face = f;
                break;
            }
            target -= a;
        }
        let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        SurfacePoint::new(face, [1.0 - u - v, u, v])
    }

    /// Position of a face point in the planar frame of edge `k`.
    pub fn local_2d(&self, face: usize, k: usize, bary: &[f64; 3]) -> Vec2 {
        let fr = &self.frames[face][k];
        Vec2::new(bary[(k + 1) % 3] * fr.len, 0.0) + fr.apex * bary[(k + 2) % 3]
    }

    /// Inverse of [`local_2d`](Self::local_2d).
    pub fn bary_from_local(&self, face: usize, k: usize, p: &Vec2) -> [f64; 3] {
        let fr = &self.frames[face][k];
        let c = p.y / fr.apex.y;
        let b1 = (p.x - c * fr.apex.x) / fr.len;
        let mut out = [0.0; 3];
        out[k] = 1.0 - b1 - c;
        out[(k + 1) % 3] = b1;
        out[(k + 2) % 3] = c;
        out
    }

    /// Euclidean distance between two points in a common face.
    pub fn in_face_distance(&self, face: usize, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (self.local_2d(face, 0, a) - self.local_2d(face, 0, b)).norm()
    }

    /// Largest face circumradius; every surface point lies this close to a vertex.
    /// Distance from the interior reference point to the nearest face plane.
    pub fn inner_radius(&self) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, h)| h - n.dot(&self.interior))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_circumradius(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                crate::geom::circumradius((b - c).norm(), (a - c).norm(), (a - b).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.vertices.iter().map(f).collect(), self.triangles.clone())
    }
}

/// Outcome of [`validate_convex`].
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    /// Largest distance of a mesh vertex strictly inside the hull of all vertices.
    pub max_vertex_depth: f64,
    pub worst_vertex: Option<usize>,
    /// Largest height of any vertex above the supporting plane of a mesh face.
    pub max_face_violation: f64,
    pub worst_face: Option<usize>,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Default convexity tolerance: `1e-9` times the bounding-box diagonal.
pub fn default_tol_convex(mesh: &ConvexSurfaceMesh) -> f64 {
    1e-9 * mesh.scale
}

/// Measures how far the mesh is from being the boundary of its own convex hull.
pub fn validate_convex(mesh: &ConvexSurfaceMesh, tol_convex: f64) -> Result<ConvexityReport> {
    let hull = convex_hull(&mesh.vertices, 1e-12)?;
    let planes: Vec<(Vec3, f64)> = hull
        .triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| hull.vertices[i]);
            let n = (b - a).cross(&(c - a)).normalize();
            (n, n.dot(&a))
        })
        .collect();
    let mut max_vertex_depth = 0.0;
    let mut worst_vertex = None;
    for (i, v) in mesh.vertices.iter().enumerate() {
        let depth = planes.iter().map(|(n, h)| h - n.dot(v)).fold(f64::INFINITY, f64::min);
        if depth > max_vertex_depth {
            max_vertex_depth = depth;
            worst_vertex = Some(i);
        }
    }
    let mut max_face_violation = 0.0;
    let mut worst_face = None;
    for (f, (n, h)) in mesh.normals.iter().zip(&mesh.offsets).enumerate() {
        let above = mesh.vertices.iter().map(|v| n.dot(v) - h).fold(0.0, f64::max);
        if above > max_face_violation {
            max_face_violation = above;
            worst_face = Some(f);
        }
    }
    let deviation = f64::max(max_vertex_depth, max_face_violation);
    Ok(ConvexityReport {
        max_vertex_depth,
        worst_vertex,
        max_face_violation,
        worst_face,
        deviation,
        tolerance: tol_convex,
        pass: deviation <= tol_convex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cube_combinatorics() {
        let m = fixtures::unit_cube();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_faces(), 12);
        assert_eq!(m.euler_characteristic(), 2);
        for (f, nb) in m.neighbors.iter().enumerate() {
            for (k, &(g, j)) in nb.iter().enumerate() {
                let t = m.triangles[f];
                let s = m.triangles[g];
                assert_eq!(s[j as usize], t[(k + 1) % 3]);
                assert_eq!(s[(j as usize + 1) % 3], t[k]);
            }
        }
    }

    #[test]
    fn inward_faces_are_flipped() {
        let cube = fixtures::unit_cube();
        let mut tris = cube.triangles.clone();
        tris[3].swap(0, 1);
        let m = ConvexSurfaceMesh::new(cube.vertices.clone(), tris).unwrap();
        for (f, n) in m.normals.iter().enumerate() {
            let c = m.triangles[f].iter().map(|&i| m.vertices[i]).sum::<Vec3>() / 3.0;
            assert!(n.dot(&(c - m.interior)) > 0.0);
        }
    }

    #[test]
    fn deleted_face_is_open() {
        let cube = fixtures::unit_cube();
        let mut tris = cube.triangles.clone();
        tris.pop();
        assert!(matches!(
            ConvexSurfaceMesh::new(cube.vertices.clone(), tris),
            Err(Error::OpenSurface(..))
        ));
    }

    #[test]
    fn edge_points_have_two_locations() {
        let m = fixtures::unit_cube();
        let p = SurfacePoint::new(0, [0.5, 0.5, 0.0]);
        let locs = m.locations(&p);
        assert_eq!(locs.len(), 2);
        for (f, b) in locs {
            assert!((m.point(&SurfacePoint::new(f, b)) - m.point(&p)).norm() < 1e-15);
        }
        let v = m.vertex_point(6);
        assert_eq!(m.locations(&v).len(), m.vertex_faces[6].len());
    }

    #[test]
    fn local_frame_round_trip() {
        let m = fixtures::regular_tetrahedron(1.0);
        let b = [0.2, 0.3, 0.5];
        for k in 0..3 {
            let p = m.local_2d(1, k, &b);
            let back = m.bary_from_local(1, k, &p);
            for i in 0..3 {
                assert!((back[i] - b[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn convexity_of_cube_and_dented_cube() {
        let r = validate_convex(&fixtures::unit_cube(), 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.deviation, 0.0);
        let dented = fixtures::cube_with_face_centers(-0.1);
        let r = validate_convex(&dented, 1e-9).unwrap();
        assert!(!r.pass);
        assert!((r.max_vertex_depth - 0.1).abs() < 1e-12);
    }
}
