//! Distance spheres `{d_K = r}`, their topology, near-critical radii and
//! points reached by several minimal curves.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesic::{DistanceField, SourceSet, Witness};
use crate::geom::{segments_properly_intersect, Vec2};
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

/// Default number of subdivisions of each face edge for extraction.
pub const DEFAULT_SUBDIV: u32 = 8;

#[derive(Debug, Clone, Serialize)]
pub struct Polyline {
    pub points: Vec<SurfacePoint>,
    pub positions: Vec<[f64; 3]>,
    /// Face containing segment `i`, which joins point `i` to point `i + 1`
    /// (cyclically when closed).
    pub segment_faces: Vec<usize>,
    pub closed: bool,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub r: f64,
    pub polylines: Vec<Polyline>,
    pub total_length: f64,
    pub subdiv: u32,
    /// Largest `|d_K(p) - r|` over emitted points.
    pub max_residual: f64,
}

/// Sub-grid node identified independently of the face it is reached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum NodeKey {
    Vertex(usize),
    /// Edge `(a, b)` with `a < b`, at `i / s` of the way from `a`.
    Edge(usize, usize, u32),
    Face(usize, u32, u32),
}

fn node_key(mesh: &ConvexSurfaceMesh, face: usize, s: u32, i: u32, j: u32) -> NodeKey {
    let t = mesh.triangles[face];
    let counts = [s - i - j, i, j];
    let nz: Vec<usize> = (0..3).filter(|&k| counts[k] > 0).collect();
    match nz.len() {
        1 => NodeKey::Vertex(t[nz[0]]),
        2 => {
            let (p, q) = (nz[0], nz[1]);
            let (a, b) = (t[p], t[q]);
            // fraction of the way from `a` is the weight of `b`
            if a < b {
                NodeKey::Edge(a, b, counts[q])
            } else {
                NodeKey::Edge(b, a, counts[p])
            }
        }
        _ => NodeKey::Face(face, i, j),
    }
}

fn node_bary(s: u32, i: u32, j: u32) -> [f64; 3] {
    let s = s as f64;
    let (u, v) = (i as f64 / s, j as f64 / s);
    [1.0 - u - v, u, v]
}

fn lerp(a: &[f64; 3], b: &[f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|k| a[k] + t * (b[k] - a[k]))
}

/// Sub-triangles of a face as index triples into the node grid.
fn sub_triangles(s: u32) -> Vec<[(u32, u32); 3]> {
    let mut out = Vec::with_capacity((s * s) as usize);
    for i in 0..s {
        for j in 0..(s - i) {
            out.push([(i, j), (i + 1, j), (i, j + 1)]);
            if i + j + 1 < s {
                out.push([(i + 1, j), (i + 1, j + 1), (i, j + 1)]);
            }
        }
    }
    out
}

/// Marching-triangles extraction of `{d_K = r}` on a uniform subdivision of
/// every face, with crossings located by bisection on exact field values.
pub fn extract_level_set(field: &DistanceField, r: f64, subdiv: u32, exec: Exec) -> Result<LevelSet> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("level r must be positive, got {r}")));
    }
    if subdiv == 0 {
        return Err(Error::InvalidParameter("subdivision must be at least 1".into()));
    }
    let mesh = field.mesh();
    let s = subdiv;
    let empty = LevelSet { r, polylines: Vec::new(), total_length: 0.0, subdiv: s, max_residual: 0.0 };
    if r > field.max_value + field.e_field + mesh.max_circumradius() {
        return Ok(empty);
    }
    let subs = sub_triangles(s);

    // Unique nodes, each evaluated once.
    let mut reps: BTreeMap<NodeKey, SurfacePoint> = BTreeMap::new();
    for f in 0..mesh.num_faces() {
        for i in 0..=s {
            for j in 0..=(s - i) {
                reps.entry(node_key(mesh, f, s, i, j)).or_insert(SurfacePoint::new(f, node_bary(s, i, j)));
            }
        }
    }
    let keys: Vec<(NodeKey, SurfacePoint)> = reps.into_iter().collect();
    let vals = exec.map(&keys, |(_, p)| field.value(p));
    let value: HashMap<NodeKey, f64> = keys.iter().map(|(k, _)| *k).zip(vals).collect();
    let above = |k: &NodeKey| value[k] >= r;

    // Sub-edges crossed by the level set, and the segments joining them.
    type EdgeKey = (NodeKey, NodeKey);
    let ekey = |a: NodeKey, b: NodeKey| if a < b { (a, b) } else { (b, a) };
    let mut crossing_rep: BTreeMap<EdgeKey, (usize, [f64; 3], [f64; 3])> = BTreeMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey, usize)> = Vec::new();
    for f in 0..mesh.num_faces() {
        for st in &subs {
            let ks = st.map(|(i, j)| node_key(mesh, f, s, i, j));
            let up = ks.map(|k| above(&k));
            if up[0] == up[1] && up[1] == up[2] {
                continue;
            }
            let mut ends = Vec::with_capacity(2);
            for (p, q) in [(0, 1), (1, 2), (2, 0)] {
                if up[p] != up[q] {
                    let e = ekey(ks[p], ks[q]);
                    let (lo, hi) = if up[p] { (q, p) } else { (p, q) };
                    crossing_rep.entry(e).or_insert((
                        f,
                        node_bary(s, st[lo].0, st[lo].1),
                        node_bary(s, st[hi].0, st[hi].1),
                    ));
                    ends.push(e);
                }
            }
            segments.push((ends[0], ends[1], f));
        }
    }

    // Bisection between the below and above endpoint of each crossed sub-edge.
    let crossings: Vec<_> = crossing_rep.into_iter().collect();
    let tol = 1e-13 * mesh.scale;
    let located = exec.map(&crossings, |(_, (f, lo, hi))| {
        let len = mesh.in_face_distance(*f, lo, hi);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        while (b - a) * len > tol && b - a > 1e-15 {
            let m = 0.5 * (a + b);
            if field.value(&SurfacePoint::new(*f, lerp(lo, hi, m))) >= r {
                b = m;
            } else {
                a = m;
            }
        }
        let p = SurfacePoint::new(*f, lerp(lo, hi, 0.5 * (a + b)));
        (p, (field.value(&p) - r).abs())
    });
    let index: HashMap<EdgeKey, usize> = crossings.iter().enumerate().map(|(i, (k, _))| (*k, i)).collect();
    let points: Vec<SurfacePoint> = located.iter().map(|(p, _)| *p).collect();
    let max_residual = located.iter().map(|(_, d)| *d).fold(0.0, f64::max);

    // Stitch segments into chains.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); points.len()];
    for (si, (a, b, _)) in segments.iter().enumerate() {
        let (ia, ib) = (index[a], index[b]);
        adj[ia].push((ib, si));
        adj[ib].push((ia, si));
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, Vec<usize>, bool) {
        let mut nodes = vec![start];
        let mut faces = Vec::new();
        let mut cur = start;
        loop {
            let next = adj[cur].iter().find(|(_, si)| !used[*si]).copied();
            match next {
                Some((n, si)) => {
                    used[si] = true;
                    faces.push(segments[si].2);
                    if n == start {
                        return (nodes, faces, true);
                    }
                    nodes.push(n);
                    cur = n;
                }
                None => return (nodes, faces, false),
            }
        }
    };
    let starts: Vec<usize> = (0..points.len())
        .filter(|&i| adj[i].len() == 1)
        .chain(0..points.len())
        .collect();
    for st in starts {
        if adj[st].iter().all(|(_, si)| used[*si]) {
            continue;
        }
        let (nodes, faces, closed) = walk(st, &mut used);
        let positions: Vec<[f64; 3]> = nodes.iter().map(|&i| mesh.point(&points[i]).into()).collect();
        let pos = |i: usize| crate::geom::Vec3::from(positions[i]);
        let mut length: f64 = (1..nodes.len()).map(|i| (pos(i) - pos(i - 1)).norm()).sum();
        if closed {
            length += (pos(0) - pos(nodes.len() - 1)).norm();
        }
        polylines.push(Polyline {
            points: nodes.iter().map(|&i| points[i]).collect(),
            positions,
            segment_faces: faces,
            closed,
            length,
        });
    }
    let total_length = polylines.iter().map(|p| p.length).sum();
    Ok(LevelSet { r, polylines, total_length, subdiv: s, max_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSetTopology {
    pub n_components: usize,
    pub closed: Vec<bool>,
    pub lengths: Vec<f64>,
    pub self_intersections: usize,
    pub simple: bool,
}

/// Component count, closedness and a check for crossings between segments.
pub fn levelset_topology(mesh: &ConvexSurfaceMesh, ls: &LevelSet) -> LevelSetTopology {
    // Segments grouped by face, in that face's local frame.
    let mut by_face: BTreeMap<usize, Vec<(usize, usize, Vec2, Vec2)>> = BTreeMap::new();
    for (ci, pl) in ls.polylines.iter().enumerate() {
        let n = pl.points.len();
        for (si, &f) in pl.segment_faces.iter().enumerate() {
            let (a, b) = (&pl.points[si], &pl.points[(si + 1) % n]);
            let to_local = |p: &SurfacePoint| {
                let b = mesh
                    .locations(p)
                    .into_iter()
                    .find(|(g, _)| *g == f)
                    .map_or(p.bary, |(_, b)| b);
                mesh.local_2d(f, 0, &b)
            };
            by_face.entry(f).or_default().push((ci, si, to_local(a), to_local(b)));
        }
    }
    let eps = 1e-12 * mesh.scale * mesh.scale;
    let mut crossings = 0;
    for segs in by_face.values() {
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                let (s, t) = (&segs[i], &segs[j]);
                if segments_properly_intersect(&s.2, &s.3, &t.2, &t.3, eps) {
                    crossings += 1;
                }
            }
        }
    }
    LevelSetTopology {
        n_components: ls.polylines.len(),
        closed: ls.polylines.iter().map(|p| p.closed).collect(),
        lengths: ls.polylines.iter().map(|p| p.length).collect(),
        self_intersections: crossings,
        simple: crossings == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusFlag {
    Regular,
    NearCritical,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub r: f64,
    pub flag: RadiusFlag,
    pub reasons: Vec<String>,
    pub n_components: usize,
    pub all_closed: bool,
    pub total_length: f64,
}

/// Flags radii near a local maximum of `d_K`, near a change of the level
/// set's component count, or near a value taken at an exoskeleton sample.
pub fn scan_regular_values(
    field: &DistanceField,
    r_grid: &[f64],
    window: f64,
    exoskeleton: Option<&ExoskeletonEstimate>,
    subdiv: u32,
    exec: Exec,
) -> Result<Vec<ScanEntry>> {
    if r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("radius grid must be strictly increasing".into()));
    }
    let mesh = field.mesh();
    let mut maxima: BTreeSet<u64> = BTreeSet::new();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mesh.num_vertices()];
    for t in &mesh.triangles {
        for k in 0..3 {
            nbrs[t[k]].insert(t[(k + 1) % 3]);
            nbrs[t[k]].insert(t[(k + 2) % 3]);
        }
    }
    let vv = &field.vertex_values;
    for (v, n) in nbrs.iter().enumerate() {
        if vv[v] > 0.0 && n.iter().all(|&w| vv[w] <= vv[v]) {
            maxima.insert(vv[v].to_bits());
        }
    }
    maxima.insert(field.max_value.to_bits());
    let maxima: Vec<f64> = maxima.into_iter().map(f64::from_bits).collect();

    let mut entries = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let ls = extract_level_set(field, r, subdiv, exec)?;
        let mut reasons = Vec::new();
        if let Some(m) = maxima.iter().find(|m| (r - **m).abs() <= window) {
            reasons.push(format!("local maximum of distance at {m}"));
        }
        if let Some(ex) = exoskeleton {
            if let Some(s) = ex.samples.iter().find(|s| (r - s.distance).abs() <= window) {
                reasons.push(format!("value at exoskeleton sample {}", s.distance));
            }
        }
        entries.push(ScanEntry {
            r,
            flag: RadiusFlag::Regular,
            reasons,
            n_components: ls.polylines.len(),
            all_closed: ls.polylines.iter().all(|p| p.closed),
            total_length: ls.total_length,
        });
    }
    for i in 0..entries.len().saturating_sub(1) {
        if entries[i].n_components != entries[i + 1].n_components {
            let (lo, hi) = (entries[i].r, entries[i + 1].r);
            for e in entries.iter_mut() {
                let gap = if e.r < lo { lo - e.r } else if e.r > hi { e.r - hi } else { 0.0 };
                if gap <= window {
                    e.reasons.push(format!("component count changes in [{lo}, {hi}]"));
                }
            }
        }
    }
    for e in &mut entries {
        if !e.reasons.is_empty() {
            e.flag = RadiusFlag::NearCritical;
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusKind {
    /// Two minimal curves ending at the same point of `K`.
    Multijoined,
    /// Two minimal curves ending at distinct points of `K`.
    Ambiguous,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExoSample {
    pub point: SurfacePoint,
    pub position: [f64; 3],
    pub distance: f64,
    pub kind: LocusKind,
    /// The two most direct distinct near-minimal routes.
    pub witnesses: [Witness; 2],
    pub n_witnesses: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExoskeletonEstimate {
    pub samples: Vec<ExoSample>,
    pub eps_tie: f64,
    pub density: f64,
    pub n_sampled: usize,
    pub seed: u64,
}

/// Classifies `p` from its distinct routes within `eps` of the minimum;
/// `None` when fewer than two exist.
pub fn classify_point(field: &DistanceField, p: &SurfacePoint, eps: f64) -> Option<ExoSample> {
    let mesh = field.mesh();
    let ws = field.near_minimal(p, eps);
    if ws.len() < 2 || ws[0].length == 0.0 {
        return None;
    }
    let endpoint_tol = 1e-9 * mesh.scale;
    let start = |w: &Witness| mesh.point(&w.path[0]);
    let ambiguous = ws
        .iter()
        .skip(1)
        .any(|w| w.component != ws[0].component || (start(w) - start(&ws[0])).norm() > endpoint_tol);
    let n = ws.len();
    let mut it = ws.into_iter();
    let (a, b) = (it.next()?, it.next()?);
    Some(ExoSample {
        point: *p,
        position: mesh.point(p).into(),
        distance: a.length,
        kind: if ambiguous { LocusKind::Ambiguous } else { LocusKind::Multijoined },
        gap: b.length - a.length,
        witnesses: [a, b],
        n_witnesses: n,
    })
}

/// Samples the mesh (every vertex plus `density` random points per unit
/// area) and keeps points with at least two distinct near-minimal routes.
pub fn estimate_multijoined_locus(
    mesh: &ConvexSurfaceMesh,
    sources: &SourceSet,
    density: f64,
    eps_tie: Option<f64>,
    seed: u64,
    exec: Exec,
) -> Result<ExoskeletonEstimate> {
    if !(density > 0.0) {
        return Err(Error::InvalidParameter(format!("density must be positive, got {density}")));
    }
    let field = DistanceField::build(mesh, sources, None)?;
    let eps = eps_tie.unwrap_or(10.0 * field.e_field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_random = (density * mesh.total_area()).ceil() as usize;
    let pts: Vec<SurfacePoint> = (0..mesh.num_vertices())
        .map(|v| mesh.vertex_point(v))
        .chain((0..n_random).map(|_| mesh.random_point(&mut rng)))
        .collect();
    let found = exec.map(&pts, |p| classify_point(&field, p, eps));
    Ok(ExoskeletonEstimate {
        samples: found.into_iter().flatten().collect(),
        eps_tie: eps,
        density,
        n_sampled: pts.len(),
        seed,
    })
}
