//! Falsification-style checks of concavity inequalities on finite samples.
//!
//! Every check returns a [`ConcavityReport`] whose tolerance is derived from
//! the certified errors of the geodesic quantities involved, multiplied by a
//! per-check factor, plus a floating-point floor for the arithmetic itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::approximation::sample_polygon;
use crate::chart::StandardChart;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesic::{certified_midpoint, route_error, shortest_path, DistanceField, GeodesicOptions, SourceSet};
use crate::geom::Vec2;
use crate::mesh::{ConvexSurfaceMesh, SurfacePoint};

/// Factor on the propagated error for midpoint-based checks.
pub const KAPPA_MIDPOINT: f64 = 4.0;
/// Factor on the propagated error for second differences on grids.
pub const KAPPA_GRID: f64 = 3.0;

/// `(fa + fb) / 2 - fmid`.
pub fn second_difference(fa: f64, fb: f64, fmid: f64) -> f64 {
    0.5 * (fa + fb) - fmid
}

/// A value with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub err: f64,
}

impl Certified {
    pub fn exact(value: f64) -> Self {
        Certified { value, err: 0.0 }
    }

    pub fn squared(self) -> Self {
        Certified {
            value: self.value * self.value,
            err: 2.0 * self.value.abs() * self.err + self.err * self.err,
        }
    }
}

/// Intrinsic distance with its certified gap.
pub fn certified_distance(
    mesh: &ConvexSurfaceMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    opts: &GeodesicOptions,
) -> Result<Certified> {
    let r = shortest_path(mesh, a, b, opts)?;
    Ok(Certified { value: r.length, err: r.length - r.lower_bound + route_error(mesh, 0, r.length) })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    pub check: String,
    pub params: Value,
    pub n_tested: usize,
    pub n_skipped: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub witness: Option<Value>,
    pub pass: bool,
}

/// Outcome of one tested configuration.
pub(crate) enum Outcome {
    Tested { violation: f64, err: f64, floor: f64, witness: Value },
    Skipped,
}

pub(crate) fn reduce(check: &str, params: Value, kappa: f64, outcomes: Vec<Outcome>) -> Result<ConcavityReport> {
    let mut n_tested = 0;
    let mut n_skipped = 0;
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    let mut max_err: f64 = 0.0;
    let mut max_floor: f64 = 0.0;
    for o in outcomes {
        match o {
            Outcome::Skipped => n_skipped += 1,
            Outcome::Tested { violation, err, floor, witness: w } => {
                n_tested += 1;
                max_err = max_err.max(err);
                max_floor = max_floor.max(floor);
                if violation > max_violation || witness.is_none() {
                    max_violation = violation;
                    witness = Some(w);
                }
            }
        }
    }
    if n_tested == 0 {
        return Err(if n_skipped > 0 {
            Error::NoAdmissiblePairs(format!("all {n_skipped} configurations failed the premise"))
        } else {
            Error::EmptyGrid
        });
    }
    let tolerance = kappa * max_err + max_floor;
    Ok(ConcavityReport {
        check: check.to_string(),
        params,
        n_tested,
        n_skipped,
        max_violation,
        tolerance,
        witness,
        pass: max_violation <= tolerance,
    })
}

/// Rounding floor for a combination of terms of the given total magnitude.
fn fp_floor(magnitude: f64) -> f64 {
    32.0 * f64::EPSILON * magnitude
}

/// Symmetric pair `(x + h, x - h)` around `x` in a chart.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SymPair {
    pub x: [f64; 2],
    pub h: [f64; 2],
}

impl SymPair {
    pub fn new(x: Vec2, h: Vec2) -> Self {
        SymPair { x: [x.x, x.y], h: [h.x, h.y] }
    }
    pub fn center(&self) -> Vec2 {
        Vec2::new(self.x[0], self.x[1])
    }
    pub fn offset(&self) -> Vec2 {
        Vec2::new(self.h[0], self.h[1])
    }
}

/// Symmetric pair in a product of two charts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SymPair2 {
    pub first: SymPair,
    pub second: SymPair,
}

/// Random centres, random directions and a geometric ladder of step sizes.
///
/// Steps are fractions of the centre's distance to the domain boundary, so
/// every segment stays in the domain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub n_centers: usize,
    pub n_dirs: usize,
    pub ladder: [f64; 3],
    pub seed: u64,
    /// Truncate to exactly this many pairs.
    pub limit: Option<usize>,
}

impl GridSpec {
    pub fn with_pairs(n: usize, seed: u64) -> Self {
        let per_center = 4 * 3;
        GridSpec {
            n_centers: n.div_ceil(per_center),
            n_dirs: 4,
            ladder: [0.9, 0.3, 0.1],
            seed,
            limit: Some(n),
        }
    }

    fn total(&self) -> usize {
        let n = self.n_centers * self.n_dirs * self.ladder.len();
        self.limit.map_or(n, |l| l.min(n))
    }

    pub fn chart_pairs(&self, chart: &StandardChart) -> Vec<SymPair> {
        let centers = sample_polygon(&chart.polygon, self.n_centers, self.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut out = Vec::with_capacity(self.total());
        for c in centers {
            let r = chart.inset(&c).max(0.0);
            for _ in 0..self.n_dirs {
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                let u = Vec2::new(t.cos(), t.sin());
                for f in self.ladder {
                    out.push(SymPair::new(c, u * (f * r)));
                }
            }
        }
        out.truncate(self.total());
        out
    }

    pub fn product_pairs(&self, c1: &StandardChart, c2: &StandardChart) -> Vec<SymPair2> {
        let p1 = sample_polygon(&c1.polygon, self.n_centers, self.seed);
        let p2 = sample_polygon(&c2.polygon, self.n_centers, self.seed.wrapping_add(1));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x2545_f491_4f6c_dd1d);
        let mut out = Vec::with_capacity(self.total());
        for (a, b) in p1.into_iter().zip(p2) {
            let (r1, r2) = (c1.inset(&a).max(0.0), c2.inset(&b).max(0.0));
            for _ in 0..self.n_dirs {
                let d: [f64; 4] = loop {
                    let d = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
                    let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n > 0.1 && n <= 1.0 {
                        break d.map(|x| x / n);
                    }
                };
                let h1 = Vec2::new(d[0], d[1]);
                let h2 = Vec2::new(d[2], d[3]);
                let reach = |r: f64, h: &Vec2| if h.norm() > 0.0 { r / h.norm() } else { f64::INFINITY };
                let t = reach(r1, &h1).min(reach(r2, &h2));
                for f in self.ladder {
                    out.push(SymPair2 {
                        first: SymPair::new(a, h1 * (f * t)),
                        second: SymPair::new(b, h2 * (f * t)),
                    });
                }
            }
        }
        out.truncate(self.total());
        out
    }
}

fn check_in_domain(chart: &StandardChart, p: &SymPair) -> Result<()> {
    let (x, h) = (p.center(), p.offset());
    if chart.contains(&(x + h)) && chart.contains(&(x - h)) {
        Ok(())
    } else {
        Err(Error::GridOutsideDomain)
    }
}

/// `sup Δ²g(x+h, x-h) - (c/2)|h|^2` over the pairs.
pub fn check_chart_c_concavity<G>(
    chart: &StandardChart,
    g: G,
    c: f64,
    pairs: &[SymPair],
    exec: Exec,
) -> Result<ConcavityReport>
where
    G: Fn(&Vec2) -> Result<Certified> + Sync + Send,
{
    for p in pairs {
        check_in_domain(chart, p)?;
    }
    let outcomes: Vec<Result<Outcome>> = exec.map(pairs, |p| {
        let (x, h) = (p.center(), p.offset());
        let (ga, gb, gm) = (g(&(x + h))?, g(&(x - h))?, g(&x)?);
        let quad = 0.5 * c * h.norm_squared();
        let violation = second_difference(ga.value, gb.value, gm.value) - quad;
        Ok(Outcome::Tested {
            violation,
            err: 0.5 * (ga.err + gb.err) + gm.err,
            floor: fp_floor(ga.value.abs() + gb.value.abs() + gm.value.abs() + quad.abs()),
            witness: json!({ "x": p.x, "h": p.h, "g_plus": ga.value, "g_minus": gb.value, "g_mid": gm.value }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce("chart-c", json!({ "c": c, "n_pairs": pairs.len() }), KAPPA_GRID, outcomes)
}

/// Point of `X x X`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x1: SurfacePoint,
    pub x2: SurfacePoint,
}

/// `n` seeded random points of `X x X`, area-uniform in each factor.
pub fn random_product_points(mesh: &ConvexSurfaceMesh, n: usize, seed: u64) -> Vec<ProductPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| ProductPoint { x1: mesh.random_point(&mut rng), x2: mesh.random_point(&mut rng) })
        .collect()
}

/// `n` seeded random pairs of points of `X x X`.
pub fn random_product_pairs(mesh: &ConvexSurfaceMesh, n: usize, seed: u64) -> Vec<(ProductPoint, ProductPoint)> {
    let pts = random_product_points(mesh, 2 * n, seed);
    pts.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Product-metric distance with propagated error.
pub fn product_distance(
    mesh: &ConvexSurfaceMesh,
    p: &ProductPoint,
    q: &ProductPoint,
    opts: &GeodesicOptions,
) -> Result<Certified> {
    let d1 = certified_distance(mesh, &p.x1, &q.x1, opts)?;
    let d2 = certified_distance(mesh, &p.x2, &q.x2, opts)?;
    Ok(Certified { value: d1.value.hypot(d2.value), err: d1.err.hypot(d2.err) })
}

/// Midpoint of a minimal curve with the deviation of its half distances.
fn midpoint_of(
    mesh: &ConvexSurfaceMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    opts: &GeodesicOptions,
) -> Result<(SurfacePoint, Certified, f64)> {
    let r = shortest_path(mesh, a, b, opts)?;
    let d = Certified { value: r.length, err: r.length - r.lower_bound + route_error(mesh, 0, r.length) };
    if r.length == 0.0 {
        return Ok((r.source, d, 0.0));
    }
    let (s, off) = certified_midpoint(mesh, &r, opts)?;
    Ok((s, d, off))
}

/// Midpoint `c`-concavity on `X` of a function given pointwise.
pub fn check_midpoint_c_concavity<G>(
    mesh: &ConvexSurfaceMesh,
    g: G,
    lip_g: f64,
    c: f64,
    pairs: &[(SurfacePoint, SurfacePoint)],
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<ConcavityReport>
where
    G: Fn(&SurfacePoint) -> Result<Certified> + Sync + Send,
{
    let outcomes: Vec<Result<Outcome>> = exec.map(pairs, |(x, y)| {
        let (s, d, off) = midpoint_of(mesh, x, y, opts)?;
        let (gx, gy, gs) = (g(x)?, g(y)?, g(&s)?);
        let half = 0.5 * d.value;
        let rhs = 0.5 * c * half * half;
        let lhs = second_difference(gx.value, gy.value, gs.value);
        Ok(Outcome::Tested {
            violation: lhs - rhs,
            err: 0.5 * (gx.err + gy.err) + gs.err + lip_g * off + 0.5 * c * half * d.err,
            floor: fp_floor(gx.value.abs() + gy.value.abs() + gs.value.abs() + rhs),
            witness: json!({ "x": x, "y": y, "s": s, "lhs": lhs, "rhs": rhs }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce("midpoint-c", json!({ "c": c, "n_pairs": pairs.len() }), KAPPA_MIDPOINT, outcomes)
}

/// `(g(x) + g(y)) / 2 - g(s) <= 2 d^2` for `g = dist^2` on `X x X`.
pub fn check_midpoint_4concavity(
    mesh: &ConvexSurfaceMesh,
    pairs: &[(ProductPoint, ProductPoint)],
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<ConcavityReport> {
    let outcomes: Vec<Result<Outcome>> = exec.map(pairs, |(x, y)| {
        let (s1, d1, off1) = midpoint_of(mesh, &x.x1, &y.x1, opts)?;
        let (s2, d2, off2) = midpoint_of(mesh, &x.x2, &y.x2, opts)?;
        let gx = certified_distance(mesh, &x.x1, &x.x2, opts)?;
        let gy = certified_distance(mesh, &y.x1, &y.x2, opts)?;
        let gs = certified_distance(mesh, &s1, &s2, opts)?;
        let (gx2, gy2, gs2) = (gx.squared(), gy.squared(), gs.squared());
        let d = Certified { value: 0.5 * d1.value.hypot(d2.value), err: 0.5 * d1.err.hypot(d2.err) };
        let rhs = 2.0 * d.value * d.value;
        let lhs = second_difference(gx2.value, gy2.value, gs2.value);
        // Moving s_i by `off_i` moves dist(s1, s2) by at most off1 + off2.
        let mid_err = 2.0 * (gs.value + off1 + off2) * (off1 + off2);
        Ok(Outcome::Tested {
            violation: lhs - rhs,
            err: 0.5 * (gx2.err + gy2.err) + gs2.err + mid_err + 4.0 * d.value * d.err,
            floor: fp_floor(gx2.value + gy2.value + gs2.value + rhs),
            witness: json!({ "x": x, "y": y, "s": { "x1": s1, "x2": s2 }, "lhs": lhs, "rhs": rhs }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce("midpoint-4c", json!({ "n_pairs": pairs.len(), "tau": opts.tau }), KAPPA_MIDPOINT, outcomes)
}

/// `dist^2(x1, x2) = 2 dist^2((x1, x2), D)` with `D` the diagonal of `X x X`.
///
/// The right side is minimized over `n_candidates` random surface points and
/// the midpoint of `x1 x2`. Every candidate must respect the lower side, and
/// the minimum must match the left side.
pub fn check_diagonal_identity(
    mesh: &ConvexSurfaceMesh,
    samples: &[ProductPoint],
    n_candidates: usize,
    seed: u64,
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<ConcavityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cands: Vec<SurfacePoint> = (0..n_candidates).map(|_| mesh.random_point(&mut rng)).collect();
    let outcomes: Vec<Result<Outcome>> = exec.map(samples, |p| {
        let g = certified_distance(mesh, &p.x1, &p.x2, opts)?.squared();
        let f1 = DistanceField::build(mesh, &SourceSet::point(p.x1), None)?;
        let f2 = DistanceField::build(mesh, &SourceSet::point(p.x2), None)?;
        let mut ys = cands.clone();
        if g.value > 0.0 {
            ys.push(midpoint_of(mesh, &p.x1, &p.x2, opts)?.0);
        } else {
            ys.push(p.x1);
        }
        let mut best = f64::INFINITY;
        let mut below: f64 = f64::NEG_INFINITY;
        let mut err: f64 = 0.0;
        for y in &ys {
            let (a, ea) = f1.value_with_error(y);
            let (b, eb) = f2.value_with_error(y);
            let v = 2.0 * (a * a + b * b);
            err = err.max(4.0 * (a * ea + b * eb) + 2.0 * (ea * ea + eb * eb));
            best = best.min(v);
            below = below.max(g.value - v);
        }
        let violation = (best - g.value).abs().max(below);
        Ok(Outcome::Tested {
            violation,
            err: err + g.err,
            floor: fp_floor(2.0 * g.value + best),
            witness: json!({ "x1": p.x1, "x2": p.x2, "g": g.value, "two_dist_sq_to_diagonal": best }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce(
        "diagonal",
        json!({ "n_samples": samples.len(), "n_candidates": n_candidates, "seed": seed }),
        KAPPA_MIDPOINT,
        outcomes,
    )
}

/// `dist(S, T) <= 2 Δ²f(x, y)` for symmetric pairs around `t` on which `f` is
/// affine along `[x, t]` and `[t, y]`.
#[allow(clippy::too_many_arguments)]
pub fn check_midpoint_displacement(
    mesh: &ConvexSurfaceMesh,
    chart: &StandardChart,
    t: Vec2,
    delta: f64,
    n_dirs: usize,
    seed: u64,
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<ConcavityReport> {
    if !chart.contains(&t) {
        return Err(Error::OutsideChart);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hs: Vec<Vec2> = (0..n_dirs)
        .map(|i| {
            let ang = std::f64::consts::PI * (i as f64 + rng.gen::<f64>()) / n_dirs as f64;
            Vec2::new(ang.cos(), ang.sin()) * (delta * rng.gen_range(0.1..1.0))
        })
        .collect();
    let tol_active = 1e-12 * mesh.scale;
    let at = chart.active_pieces(&t, tol_active);
    let tp = chart.eval(mesh, &t)?;
    let outcomes: Vec<Result<Outcome>> = exec.map(&hs, |h| {
        let (x, y) = (t + h, t - h);
        if !chart.contains(&x) || !chart.contains(&y) {
            return Ok(Outcome::Skipped);
        }
        let ax = chart.active_pieces(&x, tol_active);
        let ay = chart.active_pieces(&y, tol_active);
        let affine_x = ax.iter().any(|i| at.contains(i));
        let affine_y = ay.iter().any(|i| at.contains(i));
        if !(affine_x && affine_y) {
            return Ok(Outcome::Skipped);
        }
        let (fx, fy, ft) = (chart.f_unchecked(&x), chart.f_unchecked(&y), chart.f_unchecked(&t));
        let d2f = second_difference(fx, fy, ft);
        let px = chart.eval(mesh, &x)?;
        let py = chart.eval(mesh, &y)?;
        let (s, dxy, off) = midpoint_of(mesh, &px, &py, opts)?;
        let st = certified_distance(mesh, &s, &tp, opts)?;
        Ok(Outcome::Tested {
            violation: st.value - 2.0 * d2f,
            err: st.err + off + dxy.err,
            floor: fp_floor(4.0 * (fx.abs() + fy.abs() + ft.abs()) + mesh.scale),
            witness: json!({ "t": [t.x, t.y], "h": [h.x, h.y], "dist_s_t": st.value, "second_difference": d2f }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce(
        "displacement",
        json!({ "t": [t.x, t.y], "delta": delta, "n_dirs": n_dirs, "seed": seed }),
        KAPPA_MIDPOINT,
        outcomes,
    )
}

/// Concavity of `dist^2(F1(x1), F2(x2)) - c(x1, x2) - d(x1, x2)` on `V1 x V2`
/// with `c = 4(1+L^2)(|x1|^2 + |x2|^2)` and `d = 4M(f1(x1) + f2(x2))`.
pub fn check_modifier_concavity(
    mesh: &ConvexSurfaceMesh,
    chart1: &StandardChart,
    chart2: &StandardChart,
    m_upper: f64,
    pairs: &[SymPair2],
    opts: &GeodesicOptions,
    exec: Exec,
) -> Result<ConcavityReport> {
    for p in pairs {
        check_in_domain(chart1, &p.first)?;
        check_in_domain(chart2, &p.second)?;
    }
    let l = chart1.lipschitz.max(chart2.lipschitz);
    let big_g = |x1: &Vec2, x2: &Vec2| -> Result<(Certified, f64)> {
        let d = certified_distance(mesh, &chart1.eval(mesh, x1)?, &chart2.eval(mesh, x2)?, opts)?.squared();
        let c = 4.0 * (1.0 + l * l) * (x1.norm_squared() + x2.norm_squared());
        let dd = 4.0 * m_upper * (chart1.f_unchecked(x1) + chart2.f_unchecked(x2));
        Ok((Certified { value: d.value - c - dd, err: d.err }, d.value.abs() + c.abs() + dd.abs()))
    };
    let outcomes: Vec<Result<Outcome>> = exec.map(pairs, |p| {
        let (x1, h1) = (p.first.center(), p.first.offset());
        let (x2, h2) = (p.second.center(), p.second.offset());
        let (ga, ma) = big_g(&(x1 + h1), &(x2 + h2))?;
        let (gb, mb) = big_g(&(x1 - h1), &(x2 - h2))?;
        let (gm, mm) = big_g(&x1, &x2)?;
        let v = second_difference(ga.value, gb.value, gm.value);
        Ok(Outcome::Tested {
            violation: v,
            err: 0.5 * (ga.err + gb.err) + gm.err,
            floor: fp_floor(ma + mb + mm),
            witness: json!({ "pair": p, "g_plus": ga.value, "g_minus": gb.value, "g_mid": gm.value }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce(
        "modifier",
        json!({ "L": l, "M_upper": m_upper, "n_pairs": pairs.len() }),
        KAPPA_GRID,
        outcomes,
    )
}

/// Concavity of `psi = d_K^2 o F - 4(1+L^2)|x|^2 - 4 M f` on `V`.
pub fn check_dc_distance_field(
    mesh: &ConvexSurfaceMesh,
    chart: &StandardChart,
    field: &DistanceField,
    m_upper: f64,
    pairs: &[SymPair],
    exec: Exec,
) -> Result<ConcavityReport> {
    for p in pairs {
        check_in_domain(chart, p)?;
    }
    let l = chart.lipschitz;
    let psi = |x: &Vec2| -> Result<(Certified, f64)> {
        let sp = chart.eval(mesh, x)?;
        let (d, e) = field.value_with_error(&sp);
        let d2 = Certified { value: d, err: e }.squared();
        let w = 4.0 * (1.0 + l * l) * x.norm_squared() + 4.0 * m_upper * chart.f_unchecked(x);
        Ok((Certified { value: d2.value - w, err: d2.err }, d2.value.abs() + w.abs()))
    };
    let outcomes: Vec<Result<Outcome>> = exec.map(pairs, |p| {
        let (x, h) = (p.center(), p.offset());
        let (a, ma) = psi(&(x + h))?;
        let (b, mb) = psi(&(x - h))?;
        let (m, mm) = psi(&x)?;
        Ok(Outcome::Tested {
            violation: second_difference(a.value, b.value, m.value),
            err: 0.5 * (a.err + b.err) + m.err,
            floor: fp_floor(ma + mb + mm),
            witness: json!({ "x": p.x, "h": p.h, "psi_plus": a.value, "psi_minus": b.value, "psi_mid": m.value }),
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    reduce(
        "field-dc",
        json!({ "L": l, "M_upper": m_upper, "n_pairs": pairs.len(), "sources": field.sources }),
        KAPPA_GRID,
        outcomes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn second_difference_examples() {
        let f = |x: f64| 2.0 * x + 1.0;
        assert_eq!(second_difference(f(0.3), f(1.7), f(1.0)), 0.0);
        assert_eq!(second_difference(1.0, 3.0, 2.5), -0.5);
        let (x, h) = (Vec2::new(0.2, -0.4), Vec2::new(0.3, 0.1));
        let sq = |v: Vec2| v.norm_squared();
        assert!((second_difference(sq(x + h), sq(x - h), sq(x)) - h.norm_squared()).abs() < 1e-15);
    }

    fn flat_chart() -> (ConvexSurfaceMesh, StandardChart) {
        let m = fixtures::unit_cube();
        let z = m.closest_point(&crate::Vec3::new(0.5, 0.5, 0.0));
        let c = StandardChart::around(&m, &z, 0.3).unwrap();
        (m, c)
    }

    #[test]
    fn squared_norm_is_exactly_two_concave() {
        let (_, chart) = flat_chart();
        let pairs = GridSpec::with_pairs(60, 1).chart_pairs(&chart);
        assert_eq!(pairs.len(), 60);
        let g = |x: &Vec2| Ok(Certified::exact(x.norm_squared()));
        let r = check_chart_c_concavity(&chart, g, 2.0, &pairs, Exec::Sequential).unwrap();
        assert!(r.pass && r.max_violation.abs() <= r.tolerance);
        let r = check_chart_c_concavity(&chart, g, 1.0, &pairs, Exec::Sequential).unwrap();
        assert!(!r.pass && r.witness.is_some());
        let r = check_chart_c_concavity(&chart, |_| Ok(Certified::exact(3.0)), 0.0, &pairs, Exec::Sequential).unwrap();
        assert!(r.pass && r.max_violation <= 0.0);
    }

    #[test]
    fn out_of_domain_pairs_are_rejected() {
        let (_, chart) = flat_chart();
        let p = SymPair::new(chart.center(), Vec2::new(0.5, 0.0));
        let r = check_chart_c_concavity(&chart, |_| Ok(Certified::exact(0.0)), 0.0, &[p], Exec::Sequential);
        assert!(matches!(r, Err(Error::GridOutsideDomain)));
        let r = check_chart_c_concavity(&chart, |_| Ok(Certified::exact(0.0)), 0.0, &[], Exec::Sequential);
        assert!(matches!(r, Err(Error::EmptyGrid)));
    }

    #[test]
    fn product_distance_of_opposite_corners() {
        let m = fixtures::unit_cube();
        let o = GeodesicOptions::default();
        let p = ProductPoint { x1: m.vertex_point(0), x2: m.vertex_point(0) };
        let q = ProductPoint { x1: m.vertex_point(6), x2: m.vertex_point(6) };
        let d = product_distance(&m, &p, &q, &o).unwrap();
        assert!((d.value - 10f64.sqrt()).abs() < 1e-9);
        assert_eq!(product_distance(&m, &p, &p, &o).unwrap().value, 0.0);
        let r = ProductPoint { x1: m.vertex_point(6), x2: m.vertex_point(0) };
        assert!((product_distance(&m, &p, &r, &o).unwrap().value - 5f64.sqrt()).abs() < 1e-9);
    }
}
