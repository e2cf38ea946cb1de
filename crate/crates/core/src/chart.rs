//! Standard charts: a convex surface seen as the graph of a convex function
//! over a polygon in a plane.
//!
//! Chart coordinates of a point `p` are `(p . u1, p . u2)` where `(u1, u2)` is
//! the deterministic orthonormal basis of `e^perp`. The surface point over `x`
//! is `F(x) = x + f(x) e`, with `f` the lower envelope of the face planes
//! that face away from `e`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{barycentric_2d, cross2, orthonormal_complement, Vec2, Vec3};
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

/// Number of sides of the polygon standing in for a disc.
pub const DISC_SIDES: usize = 64;

/// One affine piece of `f`: a lower face whose shadow meets the domain.
#[derive(Debug, Clone)]
pub struct Piece {
    pub face: usize,
    /// Projected triangle in chart coordinates.
    pub shadow: [Vec2; 3],
    pub grad: Vec2,
    /// `f(x) = c0 + grad . x` on this piece.
    pub c0: f64,
}

#[derive(Debug, Clone)]
pub struct StandardChart {
    pub e: Vec3,
    pub u1: Vec3,
    pub u2: Vec3,
    /// Convex domain `V`, counter-clockwise.
    pub polygon: Vec<Vec2>,
    pub pieces: Vec<Piece>,
    /// Exact Lipschitz constant of `f` on `V`.
    pub lipschitz: f64,
    pub seed_point: Option<SurfacePoint>,
    /// Length scale used for closure tolerances.
    scale: f64,
}

/// JSON form of a chart.
#[derive(Debug, Clone, Serialize)]
pub struct ChartExport {
    pub e: [f64; 3],
    #[serde(rename = "V")]
    pub v: Vec<[f64; 2]>,
    #[serde(rename = "L")]
    pub l: f64,
    pub seed_point: Option<SurfacePoint>,
    pub pieces: Vec<usize>,
}

/// Regular polygon with `DISC_SIDES` vertices inscribed in the given circle.
pub fn disc_polygon(center: Vec2, radius: f64) -> Vec<Vec2> {
    (0..DISC_SIDES)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / DISC_SIDES as f64;
            center + Vec2::new(t.cos(), t.sin()) * radius
        })
        .collect()
}

fn polygons_intersect(a: &[Vec2], b: &[Vec2], eps: f64) -> bool {
    // Separating axis test; both polygons are convex.
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let d = poly[(i + 1) % n] - poly[i];
            let axis = Vec2::new(-d.y, d.x);
            let (amin, amax) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let s = axis.dot(p);
                (lo.min(s), hi.max(s))
            });
            let (bmin, bmax) = b.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let s = axis.dot(p);
                (lo.min(s), hi.max(s))
            });
            let tol = eps * axis.norm();
            if amax < bmin - tol || bmax < amin - tol {
                return false;
            }
        }
    }
    true
}

fn ccw(mut poly: Vec<Vec2>) -> Vec<Vec2> {
    let area: f64 = (0..poly.len()).map(|i| cross2(&poly[i], &poly[(i + 1) % poly.len()])).sum();
    if area < 0.0 {
        poly.reverse();
    }
    poly
}

impl StandardChart {
    /// Chart around `z` following the ball construction: `a` is the vertex
    /// mean, `e` points from `z` to `a`, and `V` is the shadow of a ball of
    /// radius `radius_hint` about `a`.
    pub fn around(mesh: &ConvexSurfaceMesh, z: &SurfacePoint, radius_hint: f64) -> Result<Self> {
        let z = mesh.check_point(z)?;
        if !(radius_hint > 0.0) {
            return Err(Error::InvalidParameter(format!("radius_hint must be positive, got {radius_hint}")));
        }
        let a = mesh.interior;
        let zp = mesh.point(&z);
        let e = (a - zp).normalize();
        let depth = mesh.inner_radius();
        if radius_hint >= depth {
            return Err(Error::ChartTooLarge(format!(
                "radius {radius_hint} reaches the surface (inner radius about the centre is {depth})"
            )));
        }
        let (u1, u2) = orthonormal_complement(&e);
        let center = Vec2::new(a.dot(&u1), a.dot(&u2));
        let mut chart = Self::with_domain(mesh, e, disc_polygon(center, radius_hint))?;
        chart.seed_point = Some(z);
        Ok(chart)
    }

    /// `(e, V)` chart for an arbitrary direction and convex polygon.
    ///
    /// Fails when some point of `V` is not strictly inside the shadow of the
    /// body, which is exactly when the surface over `V` is not a graph with
    /// finite slope.
    pub fn with_domain(mesh: &ConvexSurfaceMesh, e: Vec3, polygon: Vec<Vec2>) -> Result<Self> {
        let e = e.normalize();
        let (u1, u2) = orthonormal_complement(&e);
        let polygon = ccw(polygon);
        if polygon.len() < 3 {
            return Err(Error::InvalidParameter("chart domain needs at least 3 vertices".into()));
        }
        let scale = mesh.scale;
        let eps = 1e-12 * scale;

        // Every domain vertex must sit strictly inside the shadow of the body.
        for w in &polygon {
            let x = u1 * w.x + u2 * w.y;
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (n, h) in mesh.normals.iter().zip(&mesh.offsets) {
                let ne = n.dot(&e);
                let slack = h - n.dot(&x);
                if ne.abs() <= 1e-14 {
                    if slack <= eps {
                        return Err(Error::ChartTooLarge("domain meets a face parallel to e".into()));
                    }
                } else if ne < 0.0 {
                    lo = lo.max(slack / ne);
                } else {
                    hi = hi.min(slack / ne);
                }
            }
            if !(hi - lo > eps) {
                return Err(Error::ChartTooLarge(format!(
                    "domain vertex ({}, {}) leaves the shadow of the body",
                    w.x, w.y
                )));
            }
        }

        let mut pieces = Vec::new();
        let mut lipschitz: f64 = 0.0;
        for (f, (n, h)) in mesh.normals.iter().zip(&mesh.offsets).enumerate() {
            let ne = n.dot(&e);
            if ne >= 0.0 {
                continue;
            }
            let shadow = mesh.triangles[f].map(|v| {
                let p = mesh.vertices[v];
                Vec2::new(p.dot(&u1), p.dot(&u2))
            });
            if !polygons_intersect(&shadow, &polygon, eps) {
                continue;
            }
            if ne > -1e-9 {
                return Err(Error::ChartTooLarge(format!("face {f} is nearly parallel to e")));
            }
            let grad = -Vec2::new(n.dot(&u1), n.dot(&u2)) / ne;
            lipschitz = lipschitz.max(grad.norm());
            pieces.push(Piece { face: f, shadow, grad, c0: h / ne });
        }
        if pieces.is_empty() {
            return Err(Error::ChartTooLarge("no face lies over the domain".into()));
        }
        Ok(StandardChart { e, u1, u2, polygon, pieces, lipschitz, seed_point: None, scale })
    }

    pub fn lift(&self, x: &Vec2) -> Vec3 {
        self.u1 * x.x + self.u2 * x.y
    }

    pub fn project_point(&self, p: &Vec3) -> Vec2 {
        Vec2::new(p.dot(&self.u1), p.dot(&self.u2))
    }

    /// Signed distance from `x` to the boundary of `V`, positive inside.
    pub fn inset(&self, x: &Vec2) -> f64 {
        let n = self.polygon.len();
        (0..n)
            .map(|i| {
                let a = self.polygon[i];
                let d = self.polygon[(i + 1) % n] - a;
                cross2(&d, &(x - a)) / d.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership in the closure of `V`.
    pub fn contains(&self, x: &Vec2) -> bool {
        self.inset(x) >= -1e-12 * self.scale
    }

    /// The convex function `f` (no domain check).
    pub fn f_unchecked(&self, x: &Vec2) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.c0 + p.grad.dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn f(&self, x: &Vec2) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutsideChart);
        }
        Ok(self.f_unchecked(x))
    }

    /// Index into `pieces` of the piece attaining the envelope at `x`.
    pub fn active_piece(&self, x: &Vec2) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, p) in self.pieces.iter().enumerate() {
            let v = p.c0 + p.grad.dot(x);
            if v > best.0 {
                best = (v, i);
            }
        }
        best.1
    }

    /// Pieces within `tol` of the envelope at `x`.
    pub fn active_pieces(&self, x: &Vec2, tol: f64) -> Vec<usize> {
        let f = self.f_unchecked(x);
        (0..self.pieces.len())
            .filter(|&i| f - (self.pieces[i].c0 + self.pieces[i].grad.dot(x)) <= tol)
            .collect()
    }

    /// `F(x)` as a point of space.
    pub fn lift_to_surface(&self, x: &Vec2) -> Vec3 {
        self.lift(x) + self.e * self.f_unchecked(x)
    }

    /// Surface point over `x`.
    pub fn eval(&self, mesh: &ConvexSurfaceMesh, x: &Vec2) -> Result<SurfacePoint> {
        if !self.contains(x) {
            return Err(Error::OutsideChart);
        }
        let p = self.lift_to_surface(x);
        let tol = 1e-9;
        let mut best: Option<(f64, SurfacePoint)> = None;
        for piece in &self.pieces {
            let [a, b, c] = piece.shadow;
            let bary = barycentric_2d(x, &a, &b, &c);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -tol {
                let clamped = bary.map(|v| v.max(0.0));
                let s: f64 = clamped.iter().sum();
                let sp = SurfacePoint::new(piece.face, clamped.map(|v| v / s));
                let gap = (mesh.point(&sp) - p).norm();
                if best.as_ref().is_none_or(|(g, _)| gap < *g) {
                    best = Some((gap, sp));
                }
                if gap <= 1e-14 * self.scale {
                    break;
                }
            }
        }
        best.map(|(_, sp)| sp)
            .ok_or_else(|| Error::NotInChartImage("no face lies over this point".into()))
    }

    /// Chart coordinates of a surface point in `F(V)`.
    pub fn project(&self, mesh: &ConvexSurfaceMesh, p: &SurfacePoint) -> Result<Vec2> {
        let q = mesh.point(&mesh.check_point(p)?);
        let x = self.project_point(&q);
        if !self.contains(&x) {
            return Err(Error::NotInChartImage("projection falls outside the domain".into()));
        }
        let gap = q.dot(&self.e) - self.f_unchecked(&x);
        if gap.abs() > 1e-9 * self.scale {
            return Err(Error::NotInChartImage(format!("point lies {gap} above the graph")));
        }
        Ok(x)
    }

    /// Seed point in chart coordinates.
    pub fn seed_coords(&self, mesh: &ConvexSurfaceMesh) -> Option<Vec2> {
        self.seed_point.map(|z| self.project_point(&mesh.point(&z)))
    }

    pub fn export(&self) -> ChartExport {
        ChartExport {
            e: [self.e.x, self.e.y, self.e.z],
            v: self.polygon.iter().map(|p| [p.x, p.y]).collect(),
            l: self.lipschitz,
            seed_point: self.seed_point,
            pieces: self.pieces.iter().map(|p| p.face).collect(),
        }
    }

    /// Vertex mean of the domain.
    pub fn center(&self) -> Vec2 {
        self.polygon.iter().sum::<Vec2>() / self.polygon.len() as f64
    }
}

/// Build the chart of `z` with the given radius.
pub fn build_standard_chart(mesh: &ConvexSurfaceMesh, z: &SurfacePoint, radius_hint: f64) -> Result<StandardChart> {
    StandardChart::around(mesh, z, radius_hint)
}

pub fn chart_eval(mesh: &ConvexSurfaceMesh, chart: &StandardChart, x: &Vec2) -> Result<SurfacePoint> {
    chart.eval(mesh, x)
}

pub fn chart_project(mesh: &ConvexSurfaceMesh, chart: &StandardChart, p: &SurfacePoint) -> Result<Vec2> {
    chart.project(mesh, p)
}

pub fn estimate_lipschitz(chart: &StandardChart) -> f64 {
    chart.lipschitz
}
