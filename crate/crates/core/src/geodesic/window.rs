//! Exact propagation of geodesic windows across the faces of a convex mesh.
//!
//! A window sits on a directed edge `(face, k)` and carries the unfolded
//! source image in that edge's frame: the edge is the segment
//! `[0, len] x {0}`, the face being entered lies at `y > 0` and the image at
//! `y < 0`. Convex surfaces have no saddle vertices, so no pseudo-sources are
//! ever spawned; geodesics never bend at a vertex.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use smallvec::{smallvec, SmallVec};

use crate::geom::{quadratic_roots, Vec2};
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

pub(crate) const NONE: u32 = u32::MAX;

/// Unfolded source: a point, or a line for sources of positive length.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Image {
    Point(Vec2),
    /// Distance is `(p - o) . n`, rays travel along `n`.
    Line { o: Vec2, n: Vec2 },
}

fn perp_left(u: Vec2) -> Vec2 {
    Vec2::new(-u.y, u.x)
}

impl Image {
    pub fn dist(&self, p: &Vec2) -> f64 {
        match self {
            Image::Point(i) => (p - i).norm(),
            Image::Line { o, n } => (p - o).dot(n),
        }
    }

    /// Abscissa where the route to `p` crosses the edge line `y = 0`.
    pub fn hit_x(&self, p: &Vec2) -> f64 {
        match self {
            Image::Point(i) => {
                if p.y == 0.0 {
                    p.x
                } else {
                    i.x + (p.x - i.x) * (-i.y) / (p.y - i.y)
                }
            }
            Image::Line { n, .. } => p.x - n.x * p.y / n.y,
        }
    }

    /// Re-express in the frame with origin `origin` and x-axis `u`.
    fn to_frame(self, origin: Vec2, u: Vec2) -> Image {
        let w = perp_left(u);
        let tp = |p: Vec2| Vec2::new((p - origin).dot(&u), (p - origin).dot(&w));
        match self {
            Image::Point(i) => Image::Point(tp(i)),
            Image::Line { o, n } => Image::Line {
                o: tp(o),
                n: Vec2::new(n.dot(&u), n.dot(&w)),
            },
        }
    }

    /// Same image seen from the twin edge, `(x, y) -> (len - x, -y)`.
    fn mirrored(self, len: f64) -> Image {
        match self {
            Image::Point(i) => Image::Point(Vec2::new(len - i.x, -i.y)),
            Image::Line { o, n } => Image::Line {
                o: Vec2::new(len - o.x, -o.y),
                n: -n,
            },
        }
    }

    fn profile(&self, sigma: f64) -> Profile {
        match self {
            Image::Point(i) => Profile::Hyp { a: i.x, b2: i.y * i.y, s: sigma },
            Image::Line { o, n } => Profile::Lin {
                slope: n.x,
                icpt: sigma - o.x * n.x - o.y * n.y,
            },
        }
    }
}

/// Distance restricted to the edge line, as a function of the abscissa.
#[derive(Debug, Clone, Copy)]
enum Profile {
    /// `s + sqrt((x - a)^2 + b2)`
    Hyp { a: f64, b2: f64, s: f64 },
    /// `slope * x + icpt`
    Lin { slope: f64, icpt: f64 },
}

impl Profile {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Hyp { a, b2, s } => s + ((x - a) * (x - a) + b2).sqrt(),
            Profile::Lin { slope, icpt } => slope * x + icpt,
        }
    }
}

/// Abscissae where `p(x) = q(x) + eps` may hold (a superset of the true roots).
fn crossings(p: &Profile, q: &Profile, eps: f64) -> SmallVec<[f64; 2]> {
    match (*p, *q) {
        (Profile::Hyp { a, b2, s: s1 }, Profile::Hyp { a: c, b2: d2, s: s2 }) => {
            // sqrt(q1) - sqrt(q2) = k
            let k = s2 + eps - s1;
            let m = 2.0 * (c - a);
            let c0 = a * a + b2 - c * c - d2;
            let ck = c0 - k * k;
            let k2 = k * k;
            quadratic_roots(m * m - 4.0 * k2, 2.0 * m * ck + 8.0 * k2 * c, ck * ck - 4.0 * k2 * (c * c + d2))
        }
        (Profile::Hyp { a, b2, s }, Profile::Lin { slope, icpt }) => {
            // sqrt((x-a)^2 + b2) = slope x + beta
            let beta = icpt + eps - s;
            quadratic_roots(
                1.0 - slope * slope,
                -2.0 * a - 2.0 * slope * beta,
                a * a + b2 - beta * beta,
            )
        }
        (Profile::Lin { slope, icpt }, Profile::Hyp { a, b2, s }) => {
            let beta = icpt - s - eps;
            quadratic_roots(
                1.0 - slope * slope,
                -2.0 * a - 2.0 * slope * beta,
                a * a + b2 - beta * beta,
            )
        }
        (Profile::Lin { slope: m1, icpt: c1 }, Profile::Lin { slope: m2, icpt: c2 }) => {
            let dm = m1 - m2;
            if dm.abs() < 1e-300 {
                smallvec![]
            } else {
                smallvec![(c2 + eps - c1) / dm]
            }
        }
    }
}

type Intervals = SmallVec<[(f64, f64); 4]>;

/// Parts of `[lo, hi]` where `p` exceeds `q` by more than `eps`.
fn dominated(p: &Profile, q: &Profile, lo: f64, hi: f64, eps: f64) -> Intervals {
    let mut cuts: SmallVec<[f64; 4]> = smallvec![lo, hi];
    for r in crossings(p, q, eps) {
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let h = |x: f64| p.eval(x) - q.eval(x) - eps;
    // Endpoints may sit on a root, where h vanishes up to rounding.
    let near_root = |x: f64| h(x) > -eps - 1e-12 * (1.0 + q.eval(x).abs());
    let mut out = Intervals::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        if h(0.5 * (a + b)) > 0.0 && near_root(a) && near_root(b) {
            match out.last_mut() {
                Some(last) if last.1 >= a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
    }
    out
}

fn subtract(keep: &mut Intervals, cut: &Intervals) {
    for &(a, b) in cut {
        let mut next = Intervals::new();
        for &(lo, hi) in keep.iter() {
            if b <= lo || a >= hi {
                next.push((lo, hi));
                continue;
            }
            if a > lo {
                next.push((lo, a));
            }
            if b < hi {
                next.push((b, hi));
            }
        }
        *keep = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum State {
    Queued,
    Popped,
    Dead,
}

#[derive(Debug, Clone)]
pub(crate) struct Window {
    pub face: u32,
    pub edge: u8,
    pub t0: f64,
    pub t1: f64,
    pub image: Image,
    pub sigma: f64,
    pub comp: u32,
    pub parent: u32,
    pub depth: u32,
    pub state: State,
}

impl Window {
    pub fn edge_dist(&self, x: f64) -> f64 {
        self.sigma + self.image.profile(0.0).eval(x)
    }

    fn min_dist(&self) -> f64 {
        match self.image {
            Image::Point(i) => {
                let cx = i.x.clamp(self.t0, self.t1);
                self.sigma + ((cx - i.x).powi(2) + i.y * i.y).sqrt()
            }
            Image::Line { .. } => self.edge_dist(self.t0).min(self.edge_dist(self.t1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, u32);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Stop condition for a propagation run.
pub(crate) trait Monitor {
    /// Called after a window entering `face` has been finalized.
    fn on_enter(&mut self, engine: &Engine, face: usize, window: u32);
    /// True once no window with key at least `key` can matter.
    fn done(&self, key: f64) -> bool;
}

pub(crate) struct Exhaust;

impl Monitor for Exhaust {
    fn on_enter(&mut self, _: &Engine, _: usize, _: u32) {}
    fn done(&self, _: f64) -> bool {
        false
    }
}

pub(crate) struct Engine<'m> {
    pub mesh: &'m ConvexSurfaceMesh,
    pub windows: Vec<Window>,
    edge_windows: Vec<Vec<u32>>,
    /// Finalized windows entering each face.
    pub face_windows: Vec<Vec<u32>>,
    /// Upper bounds on the distance of each vertex (exact once propagation ends).
    pub vertex_dist: Vec<f64>,
    /// Faces lying inside a source component.
    pub zero_face: Vec<Option<u32>>,
    heap: BinaryHeap<Reverse<Key>>,
    pub tie_eps: f64,
    pub max_depth: u32,
}

impl<'m> Engine<'m> {
    pub fn new(mesh: &'m ConvexSurfaceMesh, tie_eps: f64) -> Self {
        let nf = mesh.num_faces();
        Engine {
            mesh,
            windows: Vec::new(),
            edge_windows: vec![Vec::new(); 3 * nf],
            face_windows: vec![Vec::new(); nf],
            vertex_dist: vec![f64::INFINITY; mesh.num_vertices()],
            zero_face: vec![None; nf],
            heap: BinaryHeap::new(),
            tie_eps,
            max_depth: 0,
        }
    }

    pub fn bound_vertex(&mut self, v: usize, d: f64) {
        if d < self.vertex_dist[v] {
            self.vertex_dist[v] = d;
        }
    }

    fn vertex_profile(&self, v: usize, at: Vec2) -> Option<Profile> {
        let d = self.vertex_dist[v];
        d.is_finite().then_some(Profile::Hyp { a: at.x, b2: at.y * at.y, s: d })
    }

    /// Pieces of `[t0, t1]` on which `w` is not beaten by a known route.
    fn undominated(&self, w: &Window, skip: u32) -> Intervals {
        let m = self.mesh;
        let f = w.face as usize;
        let k = w.edge as usize;
        let fr = m.frames[f][k];
        let tri = m.triangles[f];
        let (twin, tk) = m.neighbors[f][k];
        let tfr = m.frames[twin][tk as usize];
        let eps = self.tie_eps;
        let mine = w.image.profile(w.sigma);
        let mut keep: Intervals = smallvec![(w.t0, w.t1)];

        let verts = [
            (tri[k], Vec2::zeros()),
            (tri[(k + 1) % 3], Vec2::new(fr.len, 0.0)),
            (tri[(k + 2) % 3], fr.apex),
            (
                m.triangles[twin][(tk as usize + 2) % 3],
                Vec2::new(fr.len - tfr.apex.x, -tfr.apex.y),
            ),
        ];
        for (v, at) in verts {
            if keep.is_empty() {
                return keep;
            }
            if let Some(p) = self.vertex_profile(v, at) {
                let cut = dominated(&mine, &p, w.t0, w.t1, eps);
                subtract(&mut keep, &cut);
            }
        }
        let len = fr.len;
        for (slot, mirror) in [(3 * f + k, false), (3 * twin + tk as usize, true)] {
            for &o in &self.edge_windows[slot] {
                if keep.is_empty() {
                    return keep;
                }
                if o == skip {
                    continue;
                }
                let ow = &self.windows[o as usize];
                if ow.state == State::Dead {
                    continue;
                }
                let (img, lo, hi) = if mirror {
                    (ow.image.mirrored(len), len - ow.t1, len - ow.t0)
                } else {
                    (ow.image, ow.t0, ow.t1)
                };
                let lo = lo.max(w.t0);
                let hi = hi.min(w.t1);
                if hi <= lo {
                    continue;
                }
                let cut = dominated(&mine, &img.profile(ow.sigma), lo, hi, eps);
                subtract(&mut keep, &cut);
            }
        }
        keep
    }

    fn record_vertices(&mut self, w: &Window) {
        let m = self.mesh;
        let f = w.face as usize;
        let k = w.edge as usize;
        let fr = m.frames[f][k];
        let tri = m.triangles[f];
        let tol = 1e-12 * fr.len;
        if w.t0 <= tol {
            self.bound_vertex(tri[k], w.edge_dist(0.0));
        }
        if w.t1 >= fr.len - tol {
            self.bound_vertex(tri[(k + 1) % 3], w.edge_dist(fr.len));
        }
        let tc = w.image.hit_x(&fr.apex);
        if tc >= w.t0 - tol && tc <= w.t1 + tol {
            self.bound_vertex(tri[(k + 2) % 3], w.sigma + w.image.dist(&fr.apex));
        }
    }

    /// Trims a candidate window and queues whatever survives.
    pub fn offer(&mut self, w: Window) {
        if self.zero_face[w.face as usize].is_some() {
            return;
        }
        let min_len = 1e-13 * self.mesh.frames[w.face as usize][w.edge as usize].len;
        if !(w.t1 - w.t0 > min_len) {
            return;
        }
        let pieces = self.undominated(&w, NONE);
        for (a, b) in pieces {
            if b - a <= min_len {
                continue;
            }
            let mut piece = w.clone();
            piece.t0 = a;
            piece.t1 = b;
            self.record_vertices(&piece);
            let id = self.windows.len() as u32;
            let key = piece.min_dist();
            self.edge_windows[3 * piece.face as usize + piece.edge as usize].push(id);
            self.windows.push(piece);
            self.heap.push(Reverse(Key(key, id)));
        }
    }

    pub fn run<M: Monitor>(&mut self, monitor: &mut M) {
        while let Some(Reverse(Key(key, id))) = self.heap.pop() {
            if monitor.done(key) {
                break;
            }
            if self.windows[id as usize].state != State::Queued {
                continue;
            }
            let w = self.windows[id as usize].clone();
            let pieces = self.undominated(&w, id);
            let min_len = 1e-13 * self.mesh.frames[w.face as usize][w.edge as usize].len;
            let pieces: Intervals = pieces.into_iter().filter(|(a, b)| b - a > min_len).collect();
            if pieces.is_empty() {
                self.windows[id as usize].state = State::Dead;
                continue;
            }
            let mut ids: SmallVec<[u32; 4]> = SmallVec::new();
            for (i, &(a, b)) in pieces.iter().enumerate() {
                let pid = if i == 0 {
                    id
                } else {
                    let nid = self.windows.len() as u32;
                    self.windows.push(w.clone());
                    self.edge_windows[3 * w.face as usize + w.edge as usize].push(nid);
                    nid
                };
                let win = &mut self.windows[pid as usize];
                win.t0 = a;
                win.t1 = b;
                win.state = State::Popped;
                ids.push(pid);
            }
            for pid in ids {
                self.max_depth = self.max_depth.max(self.windows[pid as usize].depth);
                self.face_windows[w.face as usize].push(pid);
                monitor.on_enter(self, w.face as usize, pid);
                self.spawn_children(pid);
            }
        }
    }

    fn spawn_children(&mut self, id: u32) {
        let m = self.mesh;
        let w = self.windows[id as usize].clone();
        let f = w.face as usize;
        let k = w.edge as usize;
        let fr = m.frames[f][k];
        let a = Vec2::zeros();
        let b = Vec2::new(fr.len, 0.0);
        let c = fr.apex;
        let tc = w.image.hit_x(&c);

        // Left part of the interval exits through C->A, right part through B->C.
        let sides = [
            ((k + 2) % 3, a, c, w.t0, tc.min(w.t1), false),
            ((k + 1) % 3, c, b, tc.max(w.t0), w.t1, true),
        ];
        for (edge, origin, end, s0, s1, c_first) in sides {
            if s1 <= s0 {
                continue;
            }
            let (g, j) = m.neighbors[f][edge];
            let len = (end - origin).norm();
            let u = (end - origin) / len;
            let image = w.image.to_frame(origin, u);
            let w_axis = perp_left(u);
            let project = |x: f64| -> f64 {
                let p = Vec2::new(x, 0.0) - origin;
                let p = Vec2::new(p.dot(&u), p.dot(&w_axis));
                image.hit_x(&p)
            };
            let (mut n0, mut n1) = if c_first {
                let e0 = if s0 == tc { 0.0 } else { project(s0) };
                (e0, project(s1))
            } else {
                let e1 = if s1 == tc { len } else { project(s1) };
                (project(s0), e1)
            };
            if n0 > n1 {
                std::mem::swap(&mut n0, &mut n1);
            }
            let n0 = n0.clamp(0.0, len);
            let n1 = n1.clamp(0.0, len);
            self.offer(Window {
                face: g as u32,
                edge: j,
                t0: n0,
                t1: n1,
                image,
                sigma: w.sigma,
                comp: w.comp,
                parent: id,
                depth: w.depth + 1,
                state: State::Queued,
            });
        }
    }

    /// Distance through window `id` to the point with barycentrics `bary` in the window's face.
    pub fn eval_window(&self, id: u32, bary: &[f64; 3]) -> Option<f64> {
        let w = &self.windows[id as usize];
        let p = self.mesh.local_2d(w.face as usize, w.edge as usize, bary);
        let tol = 1e-10 * self.mesh.frames[w.face as usize][w.edge as usize].len;
        let x = w.image.hit_x(&p);
        (x >= w.t0 - tol && x <= w.t1 + tol).then(|| w.sigma + w.image.dist(&p))
    }

    /// Crossings of the route through window `id` to `bary` in its face, target first.
    ///
    /// Each crossing is given in the face of the path segment before it, i.e.
    /// the face the parent window entered. The final element is the point where
    /// the route leaves the source image (the root window's edge crossing for
    /// line sources, nothing for point images).
    pub fn trace(&self, id: u32, bary: &[f64; 3]) -> (Vec<SurfacePoint>, Vec<(usize, usize)>) {
        let m = self.mesh;
        let mut crossings = Vec::new();
        let mut edges = Vec::new();
        let mut cur = id;
        let mut face = self.windows[id as usize].face as usize;
        let mut b = *bary;
        loop {
            let w = &self.windows[cur as usize];
            let k = w.edge as usize;
            let p = m.local_2d(face, k, &b);
            let fr = m.frames[face][k];
            let x = w.image.hit_x(&p).clamp(w.t0, w.t1).clamp(0.0, fr.len);
            let (twin, tk) = m.neighbors[face][k];
            let tk = tk as usize;
            let s = x / fr.len;
            let mut tb = [0.0; 3];
            tb[tk] = s;
            tb[(tk + 1) % 3] = 1.0 - s;
            let tri = m.triangles[face];
            let (va, vb) = (tri[k], tri[(k + 1) % 3]);
            edges.push((va.min(vb), va.max(vb)));
            crossings.push(SurfacePoint::new(twin, tb));
            if w.parent == NONE {
                break;
            }
            cur = w.parent;
            face = twin;
            b = tb;
        }
        (crossings, edges)
    }
}
