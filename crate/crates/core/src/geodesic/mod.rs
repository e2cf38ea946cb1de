//! Intrinsic shortest paths, distance fields and the intrinsic diameter.

mod field;
mod graph;
mod window;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use field::{route_error, Candidate, DistanceField, Route, SourceComponent, SourceSet, Witness, DEFAULT_TIE_REL};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactUnfolding,
    RefinedGraph,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeodesicOptions {
    /// Target relative gap `(U - Lb) / U`.
    pub tau: f64,
    pub method: Method,
    /// Initial Steiner points per edge in graph mode.
    pub steiner_start: usize,
    /// Largest Steiner count tried before giving up.
    pub steiner_max: usize,
}

impl GeodesicOptions {
    pub fn exact(tau: f64) -> Self {
        GeodesicOptions { tau, method: Method::ExactUnfolding, steiner_start: 2, steiner_max: 64 }
    }

    pub fn graph(tau: f64) -> Self {
        GeodesicOptions { tau, method: Method::RefinedGraph, ..Self::exact(tau) }
    }
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self::exact(1e-9)
    }
}

/// A shortest path with two-sided bounds on its length.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicResult {
    pub source: SurfacePoint,
    pub target: SurfacePoint,
    /// Polyline from `source` to `target`; consecutive points share a face.
    pub path: Vec<SurfacePoint>,
    /// Length of `path`, an upper bound on the distance.
    pub length: f64,
    pub lower_bound: f64,
    pub method: Method,
}

impl GeodesicResult {
    pub fn relative_gap(&self) -> f64 {
        if self.length == 0.0 {
            0.0
        } else {
            (self.length - self.lower_bound) / self.length
        }
    }
}

/// Face containing both surface points, preferring `a`'s own face.
pub fn common_face(mesh: &ConvexSurfaceMesh, a: &SurfacePoint, b: &SurfacePoint) -> Option<(usize, [f64; 3], [f64; 3])> {
    let la = mesh.locations(a);
    let lb = mesh.locations(b);
    for (fa, ba) in &la {
        if let Some((_, bb)) = lb.iter().find(|(fb, _)| fb == fa) {
            return Some((*fa, *ba, *bb));
        }
    }
    None
}

/// Length of a surface polyline, measured inside the faces its segments share.
pub fn polyline_length(mesh: &ConvexSurfaceMesh, path: &[SurfacePoint]) -> f64 {
    path.windows(2)
        .map(|w| match common_face(mesh, &w[0], &w[1]) {
            Some((f, a, b)) => mesh.in_face_distance(f, &a, &b),
            None => (mesh.point(&w[0]) - mesh.point(&w[1])).norm(),
        })
        .sum()
}

/// Shortest path between two surface points with certified bounds.
pub fn shortest_path(
    mesh: &ConvexSurfaceMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    opts: &GeodesicOptions,
) -> Result<GeodesicResult> {
    if !(opts.tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {}", opts.tau)));
    }
    let a = mesh.check_point(a)?;
    let b = mesh.check_point(b)?;
    let extrinsic = (mesh.point(&a) - mesh.point(&b)).norm();
    if common_face(mesh, &a, &b).is_some() {
        // Within a face the straight segment is optimal.
        let len = polyline_length(mesh, &[a, b]);
        let path = if len == 0.0 { vec![a] } else { vec![a, b] };
        return Ok(GeodesicResult { source: a, target: b, path, length: len, lower_bound: len, method: opts.method });
    }
    match opts.method {
        Method::ExactUnfolding => {
            let field = DistanceField::build_for_target(mesh, &SourceSet::point(a), &b, None)?;
            let cands = field.candidates(&b);
            let best = cands.iter().map(|c| c.dist).fold(f64::INFINITY, f64::min);
            // Ties go to the lexicographically smallest face sequence.
            let tie = field.engine.tie_eps;
            let mut chosen: Option<(Witness, u32)> = None;
            for c in cands.iter().filter(|c| c.dist <= best + tie) {
                let w = field.witness(&b, c);
                let better = match &chosen {
                    None => true,
                    Some((cw, _)) => w.faces < cw.faces,
                };
                if better {
                    chosen = Some((w, c.depth));
                }
            }
            let (w, depth) = chosen.ok_or_else(|| Error::Degenerate("target unreachable".into()))?;
            let mut path = w.path;
            path[0] = a;
            *path.last_mut().unwrap() = b;
            let length = w.length;
            let err = route_error(mesh, depth, length);
            let lower_bound = extrinsic.max(length - err).min(length);
            Ok(GeodesicResult { source: a, target: b, path, length, lower_bound, method: Method::ExactUnfolding })
        }
        Method::RefinedGraph => {
            let mut m = opts.steiner_start.max(1);
            let mut reached = f64::INFINITY;
            loop {
                let g = graph::SteinerGraph::new(mesh, m).shortest(&a, &b);
                let lower_bound = extrinsic.max(g.length - g.slack).min(g.length);
                let gap = (g.length - lower_bound) / g.length;
                reached = reached.min(gap);
                if gap <= opts.tau {
                    return Ok(GeodesicResult {
                        source: a,
                        target: b,
                        path: g.path,
                        length: g.length,
                        lower_bound,
                        method: Method::RefinedGraph,
                    });
                }
                if m * 2 > opts.steiner_max {
                    return Err(Error::ToleranceUnreachable { tau: opts.tau, reached });
                }
                m *= 2;
            }
        }
    }
}

/// Point at half the length of the path.
///
/// A midpoint on a mesh edge is reported in the face of the earlier segment.
pub fn midpoint(mesh: &ConvexSurfaceMesh, result: &GeodesicResult) -> Result<SurfacePoint> {
    if result.length <= 0.0 || result.path.len() < 2 {
        return Err(Error::ZeroLengthPath);
    }
    let segs: Vec<(usize, [f64; 3], [f64; 3], f64)> = result
        .path
        .windows(2)
        .map(|w| {
            let (f, a, b) = common_face(mesh, &w[0], &w[1]).expect("consecutive path points share a face");
            (f, a, b, mesh.in_face_distance(f, &a, &b))
        })
        .collect();
    let total: f64 = segs.iter().map(|s| s.3).sum();
    let half = 0.5 * total;
    let mut acc = 0.0;
    for (i, (f, a, b, len)) in segs.iter().enumerate() {
        if acc + len >= half || i + 1 == segs.len() {
            let t = if *len > 0.0 { ((half - acc) / len).clamp(0.0, 1.0) } else { 0.0 };
            let bary = [0, 1, 2].map(|j| a[j] + t * (b[j] - a[j]));
            return Ok(SurfacePoint::new(*f, bary));
        }
        acc += len;
    }
    unreachable!()
}

/// Midpoint whose two half-distances are re-measured and checked against `tau`.
pub fn certified_midpoint(
    mesh: &ConvexSurfaceMesh,
    result: &GeodesicResult,
    opts: &GeodesicOptions,
) -> Result<(SurfacePoint, f64)> {
    let s = midpoint(mesh, result)?;
    let da = shortest_path(mesh, &result.source, &s, opts)?;
    let db = shortest_path(mesh, &s, &result.target, opts)?;
    let half = 0.5 * result.length;
    let slack = result.length * opts.tau + route_error(mesh, 8, result.length);
    let off = (da.length - half).abs().max((db.length - half).abs());
    if off > slack + (result.length - result.lower_bound) {
        return Err(Error::MidpointCertification(format!(
            "half distances {} and {} differ from {}",
            da.length, db.length, half
        )));
    }
    Ok((s, off))
}

/// Full distance field of a source set.
pub fn multi_source_field<'m>(mesh: &'m ConvexSurfaceMesh, sources: &SourceSet, tau: f64) -> Result<DistanceField<'m>> {
    let f = DistanceField::build(mesh, sources, None)?;
    if f.e_field > tau * f.max_value.max(mesh.scale) {
        return Err(Error::ToleranceUnreachable { tau, reached: f.e_field / f.max_value.max(mesh.scale) });
    }
    Ok(f)
}

/// Two-sided bracket on the intrinsic diameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiameterBounds {
    pub lower: f64,
    pub upper: f64,
    pub n_samples: usize,
    pub n_fields: usize,
    /// Largest face circumradius; every surface point is this close to a vertex.
    pub h_cover: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DiameterOptions {
    pub tau: f64,
    /// Stop once the eccentricity bounds are within this relative margin of `lower`.
    pub margin: f64,
    pub seed: u64,
    /// Fields evaluated together; fixed so results do not depend on thread count.
    pub batch: usize,
    pub exec: Exec,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        DiameterOptions { tau: 1e-9, margin: 1e-3, seed: 0, batch: 4, exec: Exec::default() }
    }
}

/// Brackets the intrinsic diameter from distance fields of a subset of samples.
///
/// Samples are all vertices plus random surface points. Eccentricity upper
/// bounds follow from the triangle inequality, `ecc(j) <= d(i,j) + ecc(i)`,
/// and are refined at the sample with the largest bound until they meet the
/// lower bound.
pub fn intrinsic_diameter(mesh: &ConvexSurfaceMesh, n_samples: usize, opts: &DiameterOptions) -> Result<DiameterBounds> {
    let nv = mesh.num_vertices();
    if n_samples < nv {
        return Err(Error::InvalidParameter(format!("n_samples {n_samples} is below the vertex count {nv}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples: Vec<SurfacePoint> = (0..nv).map(|v| mesh.vertex_point(v)).collect();
    while samples.len() < n_samples {
        samples.push(mesh.random_point(&mut rng));
    }
    let n = samples.len();
    let budget = if n <= 64 { n } else { 32.max(opts.batch) };
    let h_cover = mesh.max_circumradius();

    let mut ub = vec![f64::INFINITY; n];
    let mut used = vec![false; n];
    let mut lower: f64 = 0.0;
    let mut n_fields = 0;
    let mut max_err: f64 = 0.0;
    // Start from the sample farthest from the centre, as in a double sweep.
    let first = (0..n)
        .max_by(|&i, &j| {
            let di = (mesh.point(&samples[i]) - mesh.interior).norm();
            let dj = (mesh.point(&samples[j]) - mesh.interior).norm();
            di.total_cmp(&dj).then(j.cmp(&i))
        })
        .unwrap();
    let mut next = vec![first];
    while !next.is_empty() && n_fields < budget {
        let rows: Vec<Result<(Vec<f64>, f64)>> = opts.exec.map(&next, |&i| {
            let field = DistanceField::build(mesh, &SourceSet::point(samples[i]), None)?;
            let vals: Vec<f64> = samples.iter().map(|s| field.value(s)).collect();
            Ok((vals, field.e_field))
        });
        for (&i, row) in next.iter().zip(rows) {
            let (vals, err) = row?;
            used[i] = true;
            n_fields += 1;
            max_err = max_err.max(err);
            let ecc = vals.iter().copied().fold(0.0, f64::max);
            for (j, &d) in vals.iter().enumerate() {
                let ext = (mesh.point(&samples[i]) - mesh.point(&samples[j])).norm();
                lower = lower.max(ext.max(d - err));
                ub[j] = ub[j].min(d + ecc + 2.0 * err);
            }
            ub[i] = ub[i].min(ecc + err);
        }
        let top = ub.iter().copied().fold(0.0, f64::max);
        if top <= lower * (1.0 + opts.margin) {
            break;
        }
        let mut order: Vec<usize> = (0..n).filter(|&j| !used[j]).collect();
        order.sort_by(|&x, &y| ub[y].total_cmp(&ub[x]).then(x.cmp(&y)));
        next = order.into_iter().take(opts.batch.min(budget - n_fields)).collect();
    }
    let top = ub.iter().copied().fold(0.0, f64::max);
    Ok(DiameterBounds { lower, upper: top + 2.0 * h_cover + max_err, n_samples: n, n_fields, h_cover })
}
