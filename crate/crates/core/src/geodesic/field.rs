//! Distance fields from finite unions of points, mesh edges and faces.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::window::{Engine, Exhaust, Image, Monitor, State, Window, NONE};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint, BARY_SNAP};

/// One closed piece of a source set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceComponent {
    Point { point: SurfacePoint },
    /// Mesh edge given by its two vertex indices.
    Edge { a: usize, b: usize },
    /// Whole closed face.
    Triangle { face: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSet {
    pub components: Vec<SourceComponent>,
}

impl SourceSet {
    pub fn point(p: SurfacePoint) -> Self {
        SourceSet { components: vec![SourceComponent::Point { point: p }] }
    }

    pub fn points(ps: impl IntoIterator<Item = SurfacePoint>) -> Self {
        SourceSet {
            components: ps.into_iter().map(|point| SourceComponent::Point { point }).collect(),
        }
    }

    pub fn vertex(mesh: &ConvexSurfaceMesh, v: usize) -> Self {
        Self::point(mesh.vertex_point(v))
    }

    pub fn whole_mesh(mesh: &ConvexSurfaceMesh) -> Self {
        SourceSet {
            components: (0..mesh.num_faces()).map(|face| SourceComponent::Triangle { face }).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A place routes start from: a point, or a source edge seen as a line.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Emitter {
    pub comp: u32,
    pub point: Option<SurfacePoint>,
}

/// How a candidate distance at a query point was obtained.
#[derive(Debug, Clone, Copy)]
pub enum Route {
    /// The point lies in a source face.
    Zero { face: usize },
    /// Straight segment inside a face that contains a source point.
    Direct { face: usize, bary: [f64; 3] },
    /// Unfolded route ending with window `id` in `face`.
    Window { id: u32, face: usize, bary: [f64; 3] },
}

#[derive(Debug, Clone, Copy)]
pub struct Candidate {
    pub dist: f64,
    pub emitter: u32,
    pub depth: u32,
    pub route: Route,
}

/// A concrete route with its combinatorial signature.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub length: f64,
    /// Source component the route starts from.
    pub component: usize,
    /// Path from the source to the query point.
    pub path: Vec<SurfacePoint>,
    /// Undirected mesh edges crossed, source side first.
    pub edges: Vec<(usize, usize)>,
    /// Faces of the consecutive path segments.
    pub faces: Vec<usize>,
}

/// Relative size of the default tie window used when trimming windows.
pub const DEFAULT_TIE_REL: f64 = 1e-11;

/// Rounding-error budget of a route of the given unfolding depth and length.
pub fn route_error(mesh: &ConvexSurfaceMesh, depth: u32, length: f64) -> f64 {
    64.0 * f64::EPSILON * (depth as f64 + 2.0) * (length + mesh.scale)
}

/// Point emitters located in one face, with their barycentric coordinates.
type HomeList = SmallVec<[(u32, [f64; 3]); 1]>;

/// Intrinsic distance to a source set, evaluated exactly by window propagation.
pub struct DistanceField<'m> {
    pub(crate) engine: Engine<'m>,
    pub(crate) emitters: Vec<Emitter>,
    /// Point emitters located in each face.
    home: Vec<HomeList>,
    pub sources: SourceSet,
    /// Distance at every mesh vertex.
    pub vertex_values: Vec<f64>,
    /// Certified bound on the absolute error of any value.
    pub e_field: f64,
    pub max_value: f64,
}

struct TargetMonitor {
    locs: SmallVec<[(usize, [f64; 3]); 8]>,
    best: f64,
    tie: f64,
}

impl Monitor for TargetMonitor {
    fn on_enter(&mut self, engine: &Engine, face: usize, window: u32) {
        for (f, b) in &self.locs {
            if *f == face {
                if let Some(d) = engine.eval_window(window, b) {
                    self.best = self.best.min(d);
                }
            }
        }
    }

    fn done(&self, key: f64) -> bool {
        key > self.best + self.tie
    }
}

impl<'m> DistanceField<'m> {
    /// Full field over the mesh.
    pub fn build(mesh: &'m ConvexSurfaceMesh, sources: &SourceSet, tie_eps: Option<f64>) -> Result<Self> {
        let mut field = Self::seed(mesh, sources, tie_eps)?;
        field.engine.run(&mut Exhaust);
        field.finish();
        Ok(field)
    }

    /// Propagates only as far as needed to settle `target` (and its near ties).
    pub fn build_for_target(
        mesh: &'m ConvexSurfaceMesh,
        sources: &SourceSet,
        target: &SurfacePoint,
        tie_eps: Option<f64>,
    ) -> Result<Self> {
        let mut field = Self::seed(mesh, sources, tie_eps)?;
        let locs = mesh.locations(&mesh.check_point(target)?);
        let best = field
            .candidates(target)
            .iter()
            .map(|c| c.dist)
            .fold(f64::INFINITY, f64::min);
        let mut mon = TargetMonitor { locs, best, tie: field.engine.tie_eps };
        field.engine.run(&mut mon);
        field.finish();
        Ok(field)
    }

    fn seed(mesh: &'m ConvexSurfaceMesh, sources: &SourceSet, tie_eps: Option<f64>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::EmptySources);
        }
        let tie = tie_eps.unwrap_or(DEFAULT_TIE_REL * mesh.scale);
        let mut engine = Engine::new(mesh, tie);
        let mut emitters = Vec::new();
        let mut home: Vec<HomeList> = vec![SmallVec::new(); mesh.num_faces()];

        for (c, comp) in sources.components.iter().enumerate() {
            if let SourceComponent::Triangle { face } = comp {
                if *face >= mesh.num_faces() {
                    return Err(Error::InvalidPoint(format!("face {face} out of range")));
                }
                engine.zero_face[*face] = Some(c as u32);
                for &v in &mesh.triangles[*face] {
                    engine.bound_vertex(v, 0.0);
                }
            }
        }

        let mut line_seeds = Vec::new();
        let mut point_seeds = Vec::new();
        for (c, comp) in sources.components.iter().enumerate() {
            let c = c as u32;
            match comp {
                SourceComponent::Point { point } => point_seeds.push((c, mesh.check_point(point)?)),
                SourceComponent::Edge { a, b } => {
                    let (f, k) = find_edge(mesh, *a, *b)?;
                    point_seeds.push((c, mesh.vertex_point(*a)));
                    point_seeds.push((c, mesh.vertex_point(*b)));
                    let (g, j) = mesh.neighbors[f][k];
                    line_seeds.push((c, f, k));
                    line_seeds.push((c, g, j as usize));
                }
                SourceComponent::Triangle { face } => {
                    for &v in &mesh.triangles[*face] {
                        point_seeds.push((c, mesh.vertex_point(v)));
                    }
                    for k in 0..3 {
                        let (g, j) = mesh.neighbors[*face][k];
                        line_seeds.push((c, g, j as usize));
                    }
                }
            }
        }

        for (c, p) in point_seeds {
            let e = emitters.len() as u32;
            emitters.push(Emitter { comp: c, point: Some(p) });
            for (f, b) in mesh.locations(&p) {
                home[f].push((e, b));
                for (i, &v) in mesh.triangles[f].iter().enumerate() {
                    let mut vb = [0.0; 3];
                    vb[i] = 1.0;
                    engine.bound_vertex(v, mesh.in_face_distance(f, &b, &vb));
                }
                for k in 0..3 {
                    if b[(k + 2) % 3] <= BARY_SNAP {
                        continue;
                    }
                    let (g, j) = mesh.neighbors[f][k];
                    let len = mesh.frames[f][k].len;
                    let s = mesh.local_2d(f, k, &b);
                    engine.offer(Window {
                        face: g as u32,
                        edge: j,
                        t0: 0.0,
                        t1: mesh.frames[g][j as usize].len,
                        image: Image::Point(Vec2::new(len - s.x, -s.y)),
                        sigma: 0.0,
                        comp: e,
                        parent: NONE,
                        depth: 0,
                        state: State::Queued,
                    });
                }
            }
        }
        for (c, f, k) in line_seeds {
            let e = emitters.len() as u32;
            emitters.push(Emitter { comp: c, point: None });
            engine.offer(Window {
                face: f as u32,
                edge: k as u8,
                t0: 0.0,
                t1: mesh.frames[f][k].len,
                image: Image::Line { o: Vec2::zeros(), n: Vec2::new(0.0, 1.0) },
                sigma: 0.0,
                comp: e,
                parent: NONE,
                depth: 0,
                state: State::Queued,
            });
        }

        Ok(DistanceField {
            engine,
            emitters,
            home,
            sources: sources.clone(),
            vertex_values: Vec::new(),
            e_field: 0.0,
            max_value: 0.0,
        })
    }

    fn finish(&mut self) {
        self.vertex_values = self.engine.vertex_dist.clone();
        self.max_value = self
            .vertex_values
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        self.e_field = route_error(self.engine.mesh, self.engine.max_depth, self.max_value);
    }

    pub fn mesh(&self) -> &'m ConvexSurfaceMesh {
        self.engine.mesh
    }

    pub fn component_of(&self, c: &Candidate) -> usize {
        self.emitters[c.emitter as usize].comp as usize
    }

    /// Every route the propagation produced to `p`.
    pub fn candidates(&self, p: &SurfacePoint) -> Vec<Candidate> {
        let mesh = self.engine.mesh;
        let mut out = Vec::new();
        for (f, b) in mesh.locations(p) {
            if self.engine.zero_face[f].is_some() {
                out.push(Candidate { dist: 0.0, emitter: NONE, depth: 0, route: Route::Zero { face: f } });
            }
            for &(e, sb) in &self.home[f] {
                out.push(Candidate {
                    dist: mesh.in_face_distance(f, &sb, &b),
                    emitter: e,
                    depth: 0,
                    route: Route::Direct { face: f, bary: b },
                });
            }
            for &id in &self.engine.face_windows[f] {
                if let Some(d) = self.engine.eval_window(id, &b) {
                    let w = &self.engine.windows[id as usize];
                    out.push(Candidate {
                        dist: d,
                        emitter: w.comp,
                        depth: w.depth + 1,
                        route: Route::Window { id, face: f, bary: b },
                    });
                }
            }
        }
        out
    }

    /// Best route to `p`, if any reached it.
    pub fn best(&self, p: &SurfacePoint) -> Option<Candidate> {
        self.candidates(p)
            .into_iter()
            .min_by(|a, b| a.dist.total_cmp(&b.dist))
    }

    /// Distance from the source set to `p`.
    pub fn value(&self, p: &SurfacePoint) -> f64 {
        let mut d = self.best(p).map_or(f64::INFINITY, |c| c.dist);
        if let Some(v) = self.engine.mesh.as_vertex(p) {
            d = d.min(self.engine.vertex_dist[v]);
        }
        d
    }

    /// Value together with its certified absolute error.
    pub fn value_with_error(&self, p: &SurfacePoint) -> (f64, f64) {
        match self.best(p) {
            Some(c) => (c.dist, route_error(self.engine.mesh, c.depth, c.dist)),
            None => (self.value(p), self.e_field),
        }
    }

    /// Linear interpolation of the vertex values.
    pub fn interpolate(&self, p: &SurfacePoint) -> f64 {
        let t = self.engine.mesh.triangles[p.face];
        (0..3).map(|i| p.bary[i] * self.vertex_values[t[i]]).sum()
    }

    /// Materializes the path of a candidate.
    pub fn witness(&self, target: &SurfacePoint, c: &Candidate) -> Witness {
        let comp = if c.emitter == NONE {
            match c.route {
                Route::Zero { face } => self.engine.zero_face[face].unwrap_or(0) as usize,
                _ => 0,
            }
        } else {
            self.component_of(c)
        };
        match c.route {
            Route::Zero { face } => Witness {
                length: 0.0,
                component: comp,
                path: vec![*target],
                edges: Vec::new(),
                faces: vec![face],
            },
            Route::Direct { face, .. } => {
                let src = self.emitters[c.emitter as usize].point.expect("direct routes start at points");
                Witness {
                    length: c.dist,
                    component: comp,
                    path: vec![src, *target],
                    edges: Vec::new(),
                    faces: vec![face],
                }
            }
            Route::Window { id, face, bary } => {
                let mesh = self.engine.mesh;
                let (crossings, edges) = self.engine.trace(id, &bary);
                let src = self.emitters[c.emitter as usize].point;
                let mut cr: Vec<(SurfacePoint, (usize, usize))> =
                    crossings.into_iter().rev().zip(edges.into_iter().rev()).collect();
                // Crossings sitting on an endpoint are artefacts of rays grazing
                // a vertex; they do not change the route.
                let tol = 1e-9 * mesh.scale;
                let end = mesh.point(target);
                while cr.last().is_some_and(|(p, _)| (mesh.point(p) - end).norm() <= tol) {
                    cr.pop();
                }
                let mut path = Vec::with_capacity(cr.len() + 2);
                let mut faces = Vec::with_capacity(cr.len() + 1);
                match src {
                    Some(sp) => {
                        let start = mesh.point(&sp);
                        let lead = cr.iter().take_while(|(p, _)| (mesh.point(p) - start).norm() <= tol).count();
                        cr.drain(..lead);
                        path.push(sp);
                        faces.extend(cr.iter().map(|(p, _)| p.face));
                    }
                    None => {
                        // The first crossing is the foot on the source edge.
                        faces.extend(cr.iter().skip(1).map(|(p, _)| p.face));
                    }
                }
                path.extend(cr.iter().map(|(p, _)| *p));
                let edges: Vec<(usize, usize)> = cr.iter().map(|(_, e)| *e).collect();
                faces.push(face);
                path.push(SurfacePoint::new(face, bary));
                Witness { length: c.dist, component: comp, path, edges, faces }
            }
        }
    }

    /// Distinct routes within `eps` of the minimum, most direct first.
    ///
    /// Routes are distinct when their crossed-edge sequences or source
    /// components differ.
    pub fn near_minimal(&self, p: &SurfacePoint, eps: f64) -> Vec<Witness> {
        let cands = self.candidates(p);
        let best = cands.iter().map(|c| c.dist).fold(f64::INFINITY, f64::min);
        let mut out: Vec<Witness> = Vec::new();
        let mut near: Vec<&Candidate> = cands.iter().filter(|c| c.dist <= best + eps).collect();
        near.sort_by(|a, b| a.dist.total_cmp(&b.dist));
        for c in near {
            let w = self.witness(p, c);
            if !out.iter().any(|o| o.component == w.component && o.edges == w.edges) {
                out.push(w);
            }
        }
        out
    }

    /// Window count, for diagnostics.
    pub fn num_windows(&self) -> usize {
        self.engine.windows.len()
    }
}

fn find_edge(mesh: &ConvexSurfaceMesh, a: usize, b: usize) -> Result<(usize, usize)> {
    if a >= mesh.num_vertices() {
        return Err(Error::InvalidPoint(format!("vertex {a} out of range")));
    }
    for &f in &mesh.vertex_faces[a] {
        let t = mesh.triangles[f];
        for k in 0..3 {
            if t[k] == a && t[(k + 1) % 3] == b {
                return Ok((f, k));
            }
        }
    }
    Err(Error::InvalidPoint(format!("({a}, {b}) is not a mesh edge")))
}
