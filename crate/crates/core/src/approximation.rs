//! Polyhedral approximation of convex bodies and convergence measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::StandardChart;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesic::{shortest_path, GeodesicOptions};
use crate::geom::{Vec2, Vec3};
use crate::hull::convex_hull;
use crate::mesh::ConvexSurfaceMesh;

/// Convex body to be approximated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Sphere,
    Ellipsoid { a: f64, b: f64, c: f64 },
    Hull { points: Vec<[f64; 3]> },
}

/// `k` quasi-uniform unit vectors; a nonzero seed applies a random rotation.
pub fn fibonacci_sphere(k: usize, seed: u64) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let rot = if seed == 0 {
        nalgebra::Rotation3::identity()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axis = loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break nalgebra::Unit::new_normalize(v);
            }
        };
        nalgebra::Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    (0..k)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / k as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            rot * Vec3::new(r * t.cos(), r * t.sin(), z)
        })
        .collect()
}

/// Convex hull of `k` points on the boundary of the body.
pub fn approximate_polyhedral(body: &BodySpec, k: usize, seed: u64) -> Result<ConvexSurfaceMesh> {
    if k < 4 {
        return Err(Error::InvalidParameter(format!("k must be at least 4, got {k}")));
    }
    let points = match body {
        BodySpec::Sphere => fibonacci_sphere(k, seed),
        BodySpec::Ellipsoid { a, b, c } => {
            let axes = [*a, *b, *c];
            let max = axes.iter().copied().fold(0.0, f64::max);
            if axes.iter().any(|x| !x.is_finite() || *x <= 1e-9 * max) || max <= 0.0 {
                return Err(Error::Degenerate(format!("ellipsoid semi-axes {axes:?} are degenerate")));
            }
            fibonacci_sphere(k, seed)
                .into_iter()
                .map(|p| Vec3::new(p.x * a, p.y * b, p.z * c))
                .collect()
        }
        BodySpec::Hull { points } => {
            let cloud: Vec<Vec3> = points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
            let base = convex_hull(&cloud, 1e-12)?;
            let base = ConvexSurfaceMesh::new(base.vertices, base.triangles)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = cloud;
            while pts.len() < k {
                let p = base.random_point(&mut rng);
                pts.push(base.point(&p));
            }
            pts
        }
    };
    let hull = convex_hull(&points, 1e-12)?;
    ConvexSurfaceMesh::new(hull.vertices, hull.triangles)
}

fn outside_distance(body: &ConvexSurfaceMesh, p: &Vec3) -> f64 {
    let inside = body
        .normals
        .iter()
        .zip(&body.offsets)
        .all(|(n, h)| n.dot(p) <= *h);
    if inside {
        0.0
    } else {
        body.distance_to_surface(p)
    }
}

/// Hausdorff distance between two convex bodies (equivalently their boundaries).
///
/// The distance to a convex set is a convex function, so each one-sided
/// excess is attained at a vertex.
pub fn hausdorff_distance(a: &ConvexSurfaceMesh, b: &ConvexSurfaceMesh) -> f64 {
    let one = |x: &ConvexSurfaceMesh, y: &ConvexSurfaceMesh| {
        x.vertices.iter().map(|v| outside_distance(y, v)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Largest support-function difference over both meshes' facet normals.
///
/// A lower bound for the Hausdorff distance, used as a cross-check.
pub fn support_gap(a: &ConvexSurfaceMesh, b: &ConvexSurfaceMesh) -> f64 {
    let support = |m: &ConvexSurfaceMesh, u: &Vec3| m.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max);
    a.normals
        .iter()
        .chain(&b.normals)
        .map(|u| (support(a, u) - support(b, u)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub epsilon: f64,
    pub hausdorff: f64,
    pub k: usize,
}

fn gauge(m: &ConvexSurfaceMesh, x: &Vec3) -> f64 {
    m.normals
        .iter()
        .zip(&m.offsets)
        .map(|(n, h)| n.dot(x) / h)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest `eps` with `(1 - eps) C` inside `Ck` inside `(1 + eps) C`.
pub fn sandwich_epsilon(c: &ConvexSurfaceMesh, ck: &ConvexSurfaceMesh) -> Result<SandwichReport> {
    let tol = 1e-12;
    if c.offsets.iter().any(|h| *h <= tol * c.scale) || ck.offsets.iter().any(|h| *h <= tol * ck.scale) {
        return Err(Error::OriginNotInterior);
    }
    let outer = ck.vertices.iter().map(|w| gauge(c, w) - 1.0).fold(0.0, f64::max);
    let inner = c.vertices.iter().map(|v| 1.0 - 1.0 / gauge(ck, v)).fold(0.0, f64::max);
    Ok(SandwichReport {
        epsilon: outer.max(inner),
        hausdorff: hausdorff_distance(c, ck),
        k: ck.num_vertices(),
    })
}

impl BodySpec {
    /// Support function `h(u) = max_{x in C} x . u`.
    pub fn support(&self, u: &Vec3) -> f64 {
        match self {
            BodySpec::Sphere => u.norm(),
            BodySpec::Ellipsoid { a, b, c } => Vec3::new(a * u.x, b * u.y, c * u.z).norm(),
            BodySpec::Hull { points } => points
                .iter()
                .map(|p| Vec3::from(*p).dot(u))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Minkowski gauge; requires the origin to be interior.
    pub fn gauge(&self, x: &Vec3) -> Result<f64> {
        match self {
            BodySpec::Sphere => Ok(x.norm()),
            BodySpec::Ellipsoid { a, b, c } => Ok(Vec3::new(x.x / a, x.y / b, x.z / c).norm()),
            BodySpec::Hull { .. } => {
                let m = approximate_polyhedral(self, 4, 0)?;
                if m.offsets.iter().any(|h| *h <= 1e-12 * m.scale) {
                    return Err(Error::OriginNotInterior);
                }
                Ok(gauge(&m, x))
            }
        }
    }
}

/// Sandwich `epsilon` of `ck` against the body itself, with the Hausdorff
/// distance estimated from facet normals of `ck` and `n_dirs` extra
/// directions.
pub fn sandwich_epsilon_body(body: &BodySpec, ck: &ConvexSurfaceMesh, n_dirs: usize) -> Result<SandwichReport> {
    if let BodySpec::Hull { .. } = body {
        let c = approximate_polyhedral(body, 4, 0)?;
        return sandwich_epsilon(&c, ck);
    }
    if ck.offsets.iter().any(|h| *h <= 1e-12 * ck.scale) {
        return Err(Error::OriginNotInterior);
    }
    let mut outer: f64 = 0.0;
    for w in &ck.vertices {
        outer = outer.max(body.gauge(w)? - 1.0);
    }
    let ratio = ck
        .normals
        .iter()
        .zip(&ck.offsets)
        .map(|(n, h)| body.support(n) / h)
        .fold(0.0, f64::max);
    let inner = (1.0 - 1.0 / ratio).max(0.0);
    let support_k = |u: &Vec3| ck.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max);
    let dirs = fibonacci_sphere(n_dirs, 0);
    let hausdorff = ck
        .normals
        .iter()
        .chain(&dirs)
        .map(|u| (body.support(u) - support_k(u)).abs())
        .fold(0.0, f64::max);
    Ok(SandwichReport { epsilon: outer.max(inner), hausdorff, k: ck.num_vertices() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartConvergenceReport {
    pub samples: Vec<[f64; 2]>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub lip_f: f64,
    pub lip_fk: f64,
    pub delta: f64,
    pub bound_rhs: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Uniform random points in a convex polygon.
pub fn sample_polygon(poly: &[Vec2], n: usize, seed: u64) -> Vec<Vec2> {
    let (lo, hi) = poly.iter().fold(
        (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let inside = |x: &Vec2| {
        (0..poly.len()).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            crate::geom::cross2(&(b - a), &(x - a)) >= 0.0
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if inside(&x) {
            out.push(x);
        }
    }
    out
}

/// Compares a chart of `x` with the chart of `xk` over a subdomain `w`.
pub fn chart_convergence_report(
    x: &ConvexSurfaceMesh,
    chart_x: &StandardChart,
    w: &[Vec2],
    xk: &ConvexSurfaceMesh,
    samples: usize,
    seed: u64,
) -> Result<ChartConvergenceReport> {
    if let Some(p) = w.iter().find(|p| !chart_x.contains(p)) {
        return Err(Error::InvalidParameter(format!("W vertex ({}, {}) is outside V", p.x, p.y)));
    }
    let chart_k = StandardChart::with_domain(xk, chart_x.e, w.to_vec())?;
    let delta = hausdorff_distance(x, xk);
    let pts = sample_polygon(&chart_k.polygon, samples, seed);
    let deviations: Vec<f64> = pts
        .iter()
        .map(|p| (chart_k.f_unchecked(p) - chart_x.f_unchecked(p)).abs())
        .collect();
    let bound_rhs = (1.0 + chart_x.lipschitz) * delta;
    // Rounding slack on both sides of the comparison.
    let slack = 1e-12 * x.scale;
    let violations = deviations.iter().filter(|d| **d > bound_rhs + slack).count();
    Ok(ChartConvergenceReport {
        samples: pts.iter().map(|p| [p.x, p.y]).collect(),
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        deviations,
        lip_f: chart_x.lipschitz,
        lip_fk: chart_k.lipschitz,
        delta,
        bound_rhs,
        violations,
        pass: violations == 0,
    })
}

/// The body against which a sequence is measured.
pub enum Reference<'a> {
    Mesh(&'a ConvexSurfaceMesh),
    /// Analytic unit sphere centred at the origin.
    UnitSphere,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairConvergence {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub reference: f64,
    pub distances: Vec<f64>,
    pub deviations: Vec<f64>,
    pub head_max: f64,
    pub tail_max: f64,
    pub trending: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceConvergenceReport {
    pub sizes: Vec<usize>,
    pub pairs: Vec<PairConvergence>,
    pub pass: bool,
}

/// Maxima of the first and last halves of a sequence.
fn halves(xs: &[f64]) -> (f64, f64) {
    let h = xs.len() / 2;
    let m = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    (m(&xs[..h]), m(&xs[xs.len() - h..]))
}

/// Distances between projected point pairs on each mesh of a sequence.
///
/// Each deviation series passes when the tail half stays strictly below the
/// head half (sequences of one element pass trivially).
pub fn distance_convergence_report(
    x: Reference,
    sequence: &[ConvexSurfaceMesh],
    pairs: &[(Vec3, Vec3)],
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<DistanceConvergenceReport> {
    let mut out = Vec::new();
    for (a, b) in pairs {
        let reference = match &x {
            Reference::UnitSphere => a.normalize().dot(&b.normalize()).clamp(-1.0, 1.0).acos(),
            Reference::Mesh(m) => {
                let pa = m.closest_point(a);
                let pb = m.closest_point(b);
                shortest_path(m, &pa, &pb, opts)?.length
            }
        };
        let distances: Vec<Result<f64>> = exec.map(sequence, |mk| {
            let pa = mk.closest_point(a);
            let pb = mk.closest_point(b);
            Ok(shortest_path(mk, &pa, &pb, opts)?.length)
        });
        let distances: Vec<f64> = distances.into_iter().collect::<Result<_>>()?;
        let deviations: Vec<f64> = distances.iter().map(|d| (d - reference).abs()).collect();
        let (head_max, tail_max) = halves(&deviations);
        let trending = deviations.len() < 2 || tail_max < head_max || deviations.iter().all(|d| *d == 0.0);
        out.push(PairConvergence {
            a: [a.x, a.y, a.z],
            b: [b.x, b.y, b.z],
            reference,
            distances,
            deviations,
            head_max,
            tail_max,
            trending,
        });
    }
    Ok(DistanceConvergenceReport {
        sizes: sequence.iter().map(|m| m.num_vertices()).collect(),
        pass: out.iter().all(|p| p.trending),
        pairs: out,
    })
}
