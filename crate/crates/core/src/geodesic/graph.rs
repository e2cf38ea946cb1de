//! Steiner-point graph approximation of the intrinsic metric.
//!
//! Each mesh edge carries `m` evenly spaced interior nodes; nodes on the
//! boundary of a common face are joined by straight segments. Graph paths
//! are genuine surface curves, so their length bounds the distance from
//! above.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

pub(crate) struct SteinerGraph<'m> {
    mesh: &'m ConvexSurfaceMesh,
    m: usize,
    /// Undirected edge id of each `(face, local edge)`.
    edge_id: Vec<[usize; 3]>,
    /// Endpoints (low, high) of each undirected edge.
    edges: Vec<(usize, usize)>,
    /// The (at most two) faces on each undirected edge.
    edge_faces: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy)]
struct D(f64);
impl PartialEq for D {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o).is_eq()
    }
}
impl Eq for D {}
impl PartialOrd for D {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for D {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

pub(crate) struct GraphPath {
    pub length: f64,
    pub path: Vec<SurfacePoint>,
    /// Sum of node spacings over the edges the path crosses.
    pub slack: f64,
}

impl<'m> SteinerGraph<'m> {
    pub fn new(mesh: &'m ConvexSurfaceMesh, m: usize) -> Self {
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_faces = Vec::new();
        let mut edge_id = vec![[0; 3]; mesh.num_faces()];
        for (f, t) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *ids.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_faces.push([f, f]);
                    edges.len() - 1
                });
                edge_faces[id][1] = f;
                edge_id[f][k] = id;
            }
        }
        SteinerGraph { mesh, m, edge_id, edges, edge_faces }
    }

    fn num_nodes(&self) -> usize {
        self.mesh.num_vertices() + self.edges.len() * self.m
    }

    /// Node as a point of `face`, which must contain it.
    fn node_in_face(&self, node: usize, face: usize) -> [f64; 3] {
        let t = self.mesh.triangles[face];
        let nv = self.mesh.num_vertices();
        let mut b = [0.0; 3];
        if node < nv {
            b[t.iter().position(|&v| v == node).unwrap()] = 1.0;
            return b;
        }
        let e = (node - nv) / self.m;
        let s = ((node - nv) % self.m + 1) as f64 / (self.m + 1) as f64;
        let (lo, hi) = self.edges[e];
        b[t.iter().position(|&v| v == lo).unwrap()] = 1.0 - s;
        b[t.iter().position(|&v| v == hi).unwrap()] = s;
        b
    }

    fn face_nodes(&self, face: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.mesh.triangles[face].to_vec();
        let nv = self.mesh.num_vertices();
        for k in 0..3 {
            let e = self.edge_id[face][k];
            out.extend((0..self.m).map(|s| nv + e * self.m + s));
        }
        out
    }

    fn node_faces(&self, node: usize) -> Vec<usize> {
        let nv = self.mesh.num_vertices();
        if node < nv {
            self.mesh.vertex_faces[node].clone()
        } else {
            self.edge_faces[(node - nv) / self.m].to_vec()
        }
    }

    fn spacing(&self, e: usize) -> f64 {
        let (a, b) = self.edges[e];
        (self.mesh.vertices[a] - self.mesh.vertices[b]).norm() / (self.m + 1) as f64
    }

    pub fn shortest(&self, a: &SurfacePoint, b: &SurfacePoint) -> GraphPath {
        let mesh = self.mesh;
        let n = self.num_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        let a_locs = mesh.locations(a);
        let b_locs = mesh.locations(b);

        let mut best = f64::INFINITY;
        let mut best_end = None;
        for (fa, ba) in &a_locs {
            for (fb, bb) in &b_locs {
                if fa == fb {
                    let d = mesh.in_face_distance(*fa, ba, bb);
                    if d < best {
                        best = d;
                        best_end = Some((usize::MAX, *fa));
                    }
                }
            }
            for node in self.face_nodes(*fa) {
                let d = mesh.in_face_distance(*fa, ba, &self.node_in_face(node, *fa));
                if d < dist[node] {
                    dist[node] = d;
                    heap.push(Reverse((D(d), node)));
                }
            }
        }
        let target_faces: Vec<usize> = b_locs.iter().map(|(f, _)| *f).collect();
        while let Some(Reverse((D(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if d >= best {
                break;
            }
            for f in self.node_faces(u) {
                let bu = self.node_in_face(u, f);
                if let Some(pos) = target_faces.iter().position(|&t| t == f) {
                    let dd = d + mesh.in_face_distance(f, &bu, &b_locs[pos].1);
                    if dd < best {
                        best = dd;
                        best_end = Some((u, f));
                    }
                }
                for v in self.face_nodes(f) {
                    if v == u {
                        continue;
                    }
                    let nd = d + mesh.in_face_distance(f, &bu, &self.node_in_face(v, f));
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev[v] = u;
                        heap.push(Reverse((D(nd), v)));
                    }
                }
            }
        }

        let (mut node, _) = best_end.expect("surface is connected");
        let mut nodes = Vec::new();
        while node != usize::MAX {
            nodes.push(node);
            node = prev[node];
        }
        nodes.reverse();
        // Express each node in a face shared with its successor.
        let mut path = vec![*a];
        let mut slack = 0.0;
        let nv = mesh.num_vertices();
        for (i, &u) in nodes.iter().enumerate() {
            let next_faces = if i + 1 < nodes.len() {
                self.node_faces(nodes[i + 1])
            } else {
                target_faces.clone()
            };
            let f = self
                .node_faces(u)
                .into_iter()
                .find(|f| next_faces.contains(f))
                .unwrap_or_else(|| self.node_faces(u)[0]);
            path.push(SurfacePoint::new(f, self.node_in_face(u, f)));
            if u >= nv {
                slack += self.spacing((u - nv) / self.m);
            }
        }
        path.push(*b);
        GraphPath { length: best, path, slack }
    }
}
