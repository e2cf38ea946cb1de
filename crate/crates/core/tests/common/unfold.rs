//! Brute-force unfolding oracle for geodesics on polyhedra with planar polygonal faces.
//!
//! Enumerates every chain of distinct adjacent faces up to a length bound,
//! lays the chain flat and keeps straight segments that cross each shared
//! edge. Shares no code with the propagation engine.

#![allow(dead_code)]

type P3 = [f64; 3];
type P2 = [f64; 2];

pub struct Polyhedron {
    pub vertices: Vec<P3>,
    /// Polygonal faces, vertices in cyclic order.
    pub faces: Vec<Vec<usize>>,
}

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}
fn scale(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// A point given by its position and a face that contains it.
#[derive(Clone, Copy)]
pub struct Loc {
    pub face: usize,
    pub pos: P3,
}

impl Polyhedron {
    pub fn unit_cube() -> Self {
        let vertices = vec![
            [0., 0., 0.],
            [1., 0., 0.],
            [1., 1., 0.],
            [0., 1., 0.],
            [0., 0., 1.],
            [1., 0., 1.],
            [1., 1., 1.],
            [0., 1., 1.],
        ];
        let faces = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
        ];
        Polyhedron { vertices, faces }
    }

    pub fn regular_tetrahedron(edge: f64) -> Self {
        let s = edge / (2.0 * 2f64.sqrt());
        Polyhedron {
            vertices: vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
            faces: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        }
    }

    fn shared_edge(&self, f: usize, g: usize) -> Option<(usize, usize)> {
        let a = &self.faces[f];
        for i in 0..a.len() {
            let (p, q) = (a[i], a[(i + 1) % a.len()]);
            if self.faces[g].contains(&p) && self.faces[g].contains(&q) {
                return Some((p, q));
            }
        }
        None
    }

    /// Faces whose closure contains `pos`.
    pub fn faces_containing(&self, pos: P3) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| {
                let vs: Vec<P3> = self.faces[f].iter().map(|&i| self.vertices[i]).collect();
                let n = {
                    let (u, v) = (sub(vs[1], vs[0]), sub(vs[2], vs[0]));
                    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
                };
                let n = scale(n, 1.0 / norm(n));
                if dot(n, sub(pos, vs[0])).abs() > 1e-9 {
                    return false;
                }
                (0..vs.len()).all(|i| {
                    let e = sub(vs[(i + 1) % vs.len()], vs[i]);
                    let w = sub(pos, vs[i]);
                    let c = [e[1] * w[2] - e[2] * w[1], e[2] * w[0] - e[0] * w[2], e[0] * w[1] - e[1] * w[0]];
                    dot(c, n) >= -1e-9
                })
            })
            .collect()
    }

    /// Shortest unfolded distance over face chains with at most `max_faces` faces.
    pub fn distance(&self, a: P3, b: P3, max_faces: usize) -> f64 {
        let mut best = f64::INFINITY;
        let targets = self.faces_containing(b);
        for f0 in self.faces_containing(a) {
            let mut chain = vec![f0];
            self.search(a, b, &targets, &mut chain, max_faces, &mut best);
        }
        best
    }

    fn search(&self, a: P3, b: P3, targets: &[usize], chain: &mut Vec<usize>, max_faces: usize, best: &mut f64) {
        let last = *chain.last().unwrap();
        if targets.contains(&last) {
            if let Some(d) = self.unfolded_length(a, b, chain) {
                *best = best.min(d);
            }
        }
        if chain.len() == max_faces {
            return;
        }
        for g in 0..self.faces.len() {
            if !chain.contains(&g) && self.shared_edge(last, g).is_some() {
                chain.push(g);
                self.search(a, b, targets, chain, max_faces, best);
                chain.pop();
            }
        }
    }

    fn unfolded_length(&self, a: P3, b: P3, chain: &[usize]) -> Option<f64> {
        // 2D frame of the first face.
        let f0 = &self.faces[chain[0]];
        let o = self.vertices[f0[0]];
        let ex = {
            let d = sub(self.vertices[f0[1]], o);
            scale(d, 1.0 / norm(d))
        };
        let w = sub(self.vertices[f0[2]], o);
        let ey = {
            let d = sub(w, scale(ex, dot(w, ex)));
            scale(d, 1.0 / norm(d))
        };
        let to2 = |p: P3| -> P2 {
            let d = sub(p, o);
            [dot(d, ex), dot(d, ey)]
        };
        let mut placed: Vec<(usize, P2)> = f0.iter().map(|&i| (i, to2(self.vertices[i]))).collect();
        let start = to2(a);
        let mut edges: Vec<(P2, P2)> = Vec::new();
        let mut end = if chain.len() == 1 { Some(to2(b)) } else { None };

        for win in chain.windows(2) {
            let (f, g) = (win[0], win[1]);
            let (p, q) = self.shared_edge(f, g).unwrap();
            let pp = placed.iter().find(|(i, _)| *i == p).unwrap().1;
            let qq = placed.iter().find(|(i, _)| *i == q).unwrap().1;
            // A vertex of f off the edge decides which side is "behind".
            let other = placed.iter().find(|(i, _)| *i != p && *i != q).unwrap().1;
            let e2 = [qq[0] - pp[0], qq[1] - pp[1]];
            let len = (e2[0] * e2[0] + e2[1] * e2[1]).sqrt();
            let u2 = [e2[0] / len, e2[1] / len];
            let mut n2 = [-u2[1], u2[0]];
            if n2[0] * (other[0] - pp[0]) + n2[1] * (other[1] - pp[1]) > 0.0 {
                n2 = [-n2[0], -n2[1]];
            }
            let e3 = sub(self.vertices[q], self.vertices[p]);
            let u3 = scale(e3, 1.0 / norm(e3));
            let place = |x: P3| -> P2 {
                let d = sub(x, self.vertices[p]);
                let along = dot(d, u3);
                let perp = norm(sub(d, scale(u3, along)));
                [pp[0] + along * u2[0] + perp * n2[0], pp[1] + along * u2[1] + perp * n2[1]]
            };
            placed = self.faces[g].iter().map(|&i| (i, place(self.vertices[i]))).collect();
            edges.push((pp, qq));
            if g == *chain.last().unwrap() {
                end = Some(place(b));
            }
        }
        let end = end?;
        for (p, q) in &edges {
            if !segment_meets(start, end, *p, *q) {
                return None;
            }
        }
        Some(((end[0] - start[0]).powi(2) + (end[1] - start[1]).powi(2)).sqrt())
    }
}

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Closed-segment intersection with a small tolerance.
fn segment_meets(a: P2, b: P2, p: P2, q: P2) -> bool {
    let eps = 1e-12;
    let d1 = cross(p, q, a);
    let d2 = cross(p, q, b);
    let d3 = cross(a, b, p);
    let d4 = cross(a, b, q);
    if (d1 > eps && d2 > eps) || (d1 < -eps && d2 < -eps) {
        return false;
    }
    if (d3 > eps && d4 > eps) || (d3 < -eps && d4 < -eps) {
        return false;
    }
    if d1.abs() <= eps && d2.abs() <= eps {
        // Collinear: require overlap.
        let t = |x: P2| (x[0] - p[0]) * (q[0] - p[0]) + (x[1] - p[1]) * (q[1] - p[1]);
        let l = t(q);
        let (ta, tb) = (t(a), t(b));
        return ta.max(tb) >= -eps && ta.min(tb) <= l + eps;
    }
    true
}
