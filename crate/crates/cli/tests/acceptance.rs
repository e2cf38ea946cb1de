//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use convexgeo::approximation::{
    approximate_polyhedral, chart_convergence_report, distance_convergence_report, BodySpec, Reference,
};
use convexgeo::chart::StandardChart;
use convexgeo::dc::{self, certified_distance, GridSpec};
use convexgeo::fixtures;
use convexgeo::geodesic::{intrinsic_diameter, shortest_path, DiameterOptions, DistanceField, GeodesicOptions, SourceSet};
use convexgeo::levelset::{
    estimate_multijoined_locus, extract_level_set, levelset_topology, scan_regular_values, RadiusFlag, DEFAULT_SUBDIV,
};
use convexgeo::{ConvexSurfaceMesh, Exec, Result, SurfacePoint, Vec2, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/common/unfold.rs"]
mod unfold;

const EXEC: Exec = Exec::Parallel;

// Pinned tolerances and budgets.
const EXACT_TOL: f64 = 1e-6;
const EXACT_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_MAX_FACES: usize = 4;
const SPHERE_KS: [usize; 4] = [50, 200, 800, 3200];
const SPHERE_FINAL_REL: f64 = 0.02;
const SPHERE_BUDGET: Duration = Duration::from_secs(60);
const CHART_SAMPLES: usize = 500;
const CHART_BUDGET: Duration = Duration::from_secs(30);
const PAIRS_4C: usize = 1000;
const BUDGET_4C: Duration = Duration::from_secs(120);
const GRID_PAIRS: usize = 200;
const DISPLACEMENT_DIRS: usize = 100;
const LEVEL_R: f64 = 0.5;
const LEVEL_REL: f64 = 0.01;
const EXO_DENSITY: f64 = 100.0;
const SPHERE_EXO_K: usize = 2000;
const CAP_RADIUS: f64 = 0.15;
const WIDE_EPS_TIE: f64 = 1e-5;
const METRIC_SAMPLES: usize = 1000;
// Rounding floor added to certified errors when comparing sums of distances.
const FP_FLOOR: f64 = 1e-12;

type Outcome = (bool, String);
type Criterion = fn() -> Result<Outcome>;

fn opts() -> GeodesicOptions {
    GeodesicOptions::default()
}

fn test_meshes() -> Vec<(String, ConvexSurfaceMesh)> {
    let mut out = vec![
        ("cube".to_string(), fixtures::unit_cube()),
        ("tetrahedron".to_string(), fixtures::regular_tetrahedron(1.0)),
    ];
    for s in 0..5 {
        out.push((format!("hull20/{s}"), fixtures::random_hull(20, s)));
    }
    out
}

fn at(m: &ConvexSurfaceMesh, x: f64, y: f64, z: f64) -> SurfacePoint {
    m.closest_point(&Vec3::new(x, y, z))
}

fn m_upper(m: &ConvexSurfaceMesh) -> Result<f64> {
    Ok(intrinsic_diameter(m, m.num_vertices() + 64, &DiameterOptions::default())?.upper)
}

fn shrink(poly: &[Vec2], s: f64) -> Vec<Vec2> {
    let c = poly.iter().sum::<Vec2>() / poly.len() as f64;
    poly.iter().map(|p| c + (p - c) * s).collect()
}

fn c1_geodesic_exactness() -> Result<Outcome> {
    let m = fixtures::unit_cube();
    let oracle = unfold::Polyhedron::unit_cube();
    let cases = [
        ("opposite vertices", [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], 5f64.sqrt()),
        ("face centres", [0.5, 0.5, 0.0], [0.5, 0.5, 1.0], 2.0),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, a, b, expect) in cases {
        let t = Instant::now();
        let r = shortest_path(&m, &at(&m, a[0], a[1], a[2]), &at(&m, b[0], b[1], b[2]), &opts())?;
        let dt = t.elapsed();
        let o = oracle.distance(a, b, ORACLE_MAX_FACES);
        let good = (r.length - expect).abs() <= EXACT_TOL && (r.length - o).abs() <= EXACT_TOL && dt < EXACT_BUDGET;
        ok &= good;
        detail.push(format!("{name}: {:.12} (oracle {:.12}, {:.0?})", r.length, o, dt));
    }
    Ok((ok, detail.join("; ")))
}

fn c2_distance_convergence() -> Result<Outcome> {
    let t = Instant::now();
    let seq: Vec<ConvexSurfaceMesh> =
        SPHERE_KS.iter().map(|&k| approximate_polyhedral(&BodySpec::Sphere, k, 0)).collect::<Result<_>>()?;
    let pairs = [(Vec3::z(), -Vec3::z())];
    let rep = distance_convergence_report(Reference::UnitSphere, &seq, &pairs, &opts(), EXEC)?;
    let p = &rep.pairs[0];
    let last = *p.deviations.last().unwrap() / PI;
    let dt = t.elapsed();
    let ok = p.trending && last < SPHERE_FINAL_REL && dt < SPHERE_BUDGET;
    let devs: Vec<String> = p.deviations.iter().map(|d| format!("{d:.4}")).collect();
    Ok((ok, format!("deviations [{}], head {:.4} > tail {:.4}, final {:.3}% ({dt:.1?})", devs.join(", "), p.head_max, p.tail_max, 100.0 * last)))
}

fn c3_chart_convergence() -> Result<Outcome> {
    let t = Instant::now();
    let cube = fixtures::centered_cube(0.5);
    let cube_k = fixtures::centered_cube(0.505);
    let sphere = approximate_polyhedral(&BodySpec::Sphere, 2000, 0)?;
    let sphere_200 = approximate_polyhedral(&BodySpec::Sphere, 200, 1)?;
    let sphere_800 = approximate_polyhedral(&BodySpec::Sphere, 800, 2)?;
    let cases: Vec<(&str, &ConvexSurfaceMesh, &ConvexSurfaceMesh, Vec3)> = vec![
        ("cube/vertex", &cube, &cube_k, Vec3::new(0.5, 0.5, 0.5)),
        ("cube/edge", &cube, &cube_k, Vec3::new(0.5, 0.0, 0.5)),
        ("cube/face", &cube, &cube_k, Vec3::new(0.2, 0.1, 0.5)),
        ("sphere/200", &sphere, &sphere_200, Vec3::new(0.3, -0.2, 0.9)),
        ("sphere/800", &sphere, &sphere_800, Vec3::new(-0.6, 0.5, 0.4)),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (name, x, xk, p)) in cases.into_iter().enumerate() {
        let z = x.closest_point(&p);
        let chart = StandardChart::around(x, &z, 0.5 * x.inner_radius())?;
        let w = shrink(&chart.polygon, 0.5);
        let rep = chart_convergence_report(x, &chart, &w, xk, CHART_SAMPLES, i as u64)?;
        ok &= rep.pass;
        detail.push(format!("{name} {} viol (max {:.2e} vs {:.2e})", rep.violations, rep.max_deviation, rep.bound_rhs));
    }
    let dt = t.elapsed();
    ok &= dt < CHART_BUDGET;
    Ok((ok, format!("{} ({dt:.1?})", detail.join("; "))))
}

fn c4_four_concavity() -> Result<Outcome> {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (name, m)) in test_meshes().into_iter().enumerate() {
        let pairs = dc::random_product_pairs(&m, PAIRS_4C, 100 + i as u64);
        let rep = dc::check_midpoint_4concavity(&m, &pairs, &opts(), EXEC)?;
        ok &= rep.pass && rep.n_tested == PAIRS_4C;
        detail.push(format!("{name} {}/{} max {:.2e}", rep.n_tested, PAIRS_4C, rep.max_violation));
    }
    let dt = t.elapsed();
    ok &= dt < BUDGET_4C;
    Ok((ok, format!("{} ({dt:.1?})", detail.join("; "))))
}

/// Vertex `i` paired with its Euclidean-nearest other vertex.
fn chart_pair(m: &ConvexSurfaceMesh, i: usize) -> (SurfacePoint, SurfacePoint) {
    let p = m.vertices[i];
    let j = (0..m.num_vertices())
        .filter(|&j| j != i)
        .min_by(|&a, &b| (m.vertices[a] - p).norm().total_cmp(&(m.vertices[b] - p).norm()))
        .unwrap();
    (m.vertex_point(i), m.vertex_point(j))
}

fn c5_modifier() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut tested = 0;
    let mut runs = 0;
    for (name, m) in test_meshes() {
        let mu = m_upper(&m)?;
        let radius = 0.5 * m.inner_radius();
        for i in 0..3 {
            let (a, b) = chart_pair(&m, i);
            let c1 = StandardChart::around(&m, &a, radius)?;
            let c2 = StandardChart::around(&m, &b, radius)?;
            let pairs = GridSpec::with_pairs(GRID_PAIRS, i as u64).product_pairs(&c1, &c2);
            let rep = dc::check_modifier_concavity(&m, &c1, &c2, mu, &pairs, &opts(), EXEC)?;
            if !rep.pass {
                println!("  modifier violation on {name}, chart pair {i}: {:.3e} > {:.3e}", rep.max_violation, rep.tolerance);
            }
            ok &= rep.pass && rep.n_tested == GRID_PAIRS;
            worst = worst.max(rep.max_violation - rep.tolerance);
            tested += rep.n_tested;
            runs += 1;
        }
    }
    Ok((ok, format!("{runs} grids, {tested} pairs tested, max(violation - tol) {worst:.3e}")))
}

fn c6_displacement() -> Result<Outcome> {
    let m = fixtures::unit_cube();
    let radius = 0.5 * m.inner_radius();
    let run = |p: SurfacePoint| -> Result<dc::ConcavityReport> {
        let chart = StandardChart::around(&m, &p, radius)?;
        let t = chart.seed_coords(&m).expect("chart has a seed point");
        dc::check_midpoint_displacement(&m, &chart, t, 0.6 * radius, DISPLACEMENT_DIRS, 0, &opts(), EXEC)
    };
    let edge = run(at(&m, 0.5, 0.0, 0.0))?;
    let edge2 = run(at(&m, 1.0, 0.3, 1.0))?;
    let flat = run(at(&m, 0.4, 0.6, 0.0))?;
    let ok = edge.pass
        && edge.n_tested == DISPLACEMENT_DIRS
        && edge2.pass
        && edge2.n_tested == DISPLACEMENT_DIRS
        && flat.pass
        && flat.max_violation <= flat.tolerance;
    Ok((
        ok,
        format!(
            "edge {} pairs max {:.2e} (tol {:.1e}); edge2 {} pairs max {:.2e}; flat dist(S,T) max {:.2e} <= tol {:.1e}",
            edge.n_tested, edge.max_violation, edge.tolerance, edge2.n_tested, edge2.max_violation, flat.max_violation, flat.tolerance
        ),
    ))
}

fn c7_field_dc() -> Result<Outcome> {
    let m = fixtures::unit_cube();
    let field = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None)?;
    let chart = StandardChart::around(&m, &m.vertex_point(6), 0.5 * m.inner_radius())?;
    let pairs = GridSpec::with_pairs(GRID_PAIRS, 0).chart_pairs(&chart);
    let rep = dc::check_dc_distance_field(&m, &chart, &field, m_upper(&m)?, &pairs, EXEC)?;
    let ok = rep.pass && rep.n_tested == GRID_PAIRS;
    Ok((ok, format!("{} pairs, max {:.3e} (tol {:.1e})", rep.n_tested, rep.max_violation, rep.tolerance)))
}

fn c8_level_set() -> Result<Outcome> {
    let m = fixtures::unit_cube();
    let field = DistanceField::build(&m, &SourceSet::vertex(&m, 0), None)?;
    let ls = extract_level_set(&field, LEVEL_R, DEFAULT_SUBDIV, EXEC)?;
    let topo = levelset_topology(&m, &ls);
    let expect = 1.5 * PI * LEVEL_R;
    let rel = (ls.total_length - expect).abs() / expect;
    let shape = topo.n_components == 1 && topo.closed.iter().all(|c| *c) && topo.simple && rel <= LEVEL_REL;

    let top = field.max_value;
    let grid = [0.5, 1.0, top - 1e-10];
    let scan = scan_regular_values(&field, &grid, 1e-6, None, DEFAULT_SUBDIV, EXEC)?;
    let flagged = scan[2].flag == RadiusFlag::NearCritical && scan[0].flag == RadiusFlag::Regular;
    Ok((
        shape && flagged,
        format!(
            "{} component(s), closed {:?}, simple {}, length {:.6} vs {:.6} ({:.3}%); r = max - 1e-10 flagged {:?}",
            topo.n_components, topo.closed, topo.simple, ls.total_length, expect, 100.0 * rel, scan[2].flag
        ),
    ))
}

fn c9_multijoined_locus() -> Result<Outcome> {
    let m = fixtures::unit_cube();
    let est = estimate_multijoined_locus(&m, &SourceSet::vertex(&m, 0), EXO_DENSITY, None, 0, EXEC)?;
    let opposite = est.samples.iter().find(|s| (Vec3::from(s.position) - Vec3::repeat(1.0)).norm() < 1e-9);
    let cube_ok = opposite.is_some_and(|s| {
        s.n_witnesses >= 2
            && s.witnesses[0].edges != s.witnesses[1].edges
            && s.witnesses.iter().all(|w| (w.length - 5f64.sqrt()).abs() <= est.eps_tie)
    });
    let cube_detail = match opposite {
        Some(s) => format!("opposite vertex found with {} witnesses", s.n_witnesses),
        None => "opposite vertex missing".to_string(),
    };

    let sphere = approximate_polyhedral(&BodySpec::Sphere, SPHERE_EXO_K, 0)?;
    let src = sphere.closest_point(&Vec3::z());
    let anti = -sphere.point(&src).normalize();
    let est = estimate_multijoined_locus(&sphere, &SourceSet::point(src), EXO_DENSITY, None, 0, EXEC)?;
    let angles: Vec<f64> =
        est.samples.iter().map(|s| Vec3::from(s.position).normalize().dot(&anti).clamp(-1.0, 1.0).acos()).collect();
    let inside = angles.iter().filter(|a| **a <= CAP_RADIUS).count();
    let max_angle = angles.iter().copied().fold(0.0, f64::max);
    // An empty estimate says nothing about concentration near the antipode.
    let sphere_ok = !angles.is_empty() && inside == angles.len();
    // Diagnostic only: a looser tie window shows where near-ties actually lie.
    let wide = estimate_multijoined_locus(&sphere, &SourceSet::point(src), EXO_DENSITY, Some(WIDE_EPS_TIE), 0, EXEC)?;
    let wide_angles: Vec<f64> =
        wide.samples.iter().map(|s| Vec3::from(s.position).normalize().dot(&anti).clamp(-1.0, 1.0).acos()).collect();
    let wide_inside = wide_angles.iter().filter(|a| **a <= CAP_RADIUS).count();
    let wide_max = wide_angles.iter().copied().fold(0.0, f64::max);
    Ok((
        cube_ok && sphere_ok,
        format!(
            "cube: {cube_detail}; sphere k={SPHERE_EXO_K}: {} samples at eps_tie {:.1e}, {inside} within cap {CAP_RADIUS}, max angle {max_angle:.3}; \
             at eps_tie {WIDE_EPS_TIE:.0e}: {} samples, {wide_inside} within cap, max angle {wide_max:.3}",
            angles.len(),
            est.eps_tie,
            wide_angles.len()
        ),
    ))
}

fn c10_negative_control() -> Result<Outcome> {
    let cube: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", "cube.off"].iter().collect();
    let out = Command::new(env!("CARGO_BIN_EXE_convexgeo"))
        .args(["dc-check", "--mesh", cube.to_str().unwrap(), "--check", "chart-c", "--function", "sqnorm", "--c", "1"])
        .env_remove("CONVEXGEO_THREADS")
        .output()
        .expect("binary runs");
    let code = out.status.code();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let r = &doc["result"];
    let ok = code == Some(1) && doc["pass"] == false && !r["witness"].is_null();
    Ok((ok, format!("exit {code:?}, max_violation {}, tolerance {}, witness present {}", r["max_violation"], r["tolerance"], !r["witness"].is_null())))
}

fn c11_metric_axioms() -> Result<Outcome> {
    let meshes = [
        ("cube", fixtures::unit_cube()),
        ("tetrahedron", fixtures::regular_tetrahedron(1.0)),
        ("hull20/0", fixtures::random_hull(20, 0)),
    ];
    let o = opts();
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (name, m)) in meshes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7 + i as u64);
        let triples: Vec<[SurfacePoint; 3]> =
            (0..METRIC_SAMPLES).map(|_| [m.random_point(&mut rng), m.random_point(&mut rng), m.random_point(&mut rng)]).collect();
        let floor = FP_FLOOR * m.scale;
        let res: Vec<Result<(f64, f64)>> = EXEC.map(&triples, |[a, b, c]| {
            let ab = certified_distance(m, a, b, &o)?;
            let ba = certified_distance(m, b, a, &o)?;
            let bc = certified_distance(m, b, c, &o)?;
            let ac = certified_distance(m, a, c, &o)?;
            let sym = (ab.value - ba.value).abs() - (ab.err + ba.err + floor);
            let tri = ac.value - ab.value - bc.value - (ab.err + bc.err + ac.err + floor);
            Ok((sym, tri))
        });
        let res: Vec<(f64, f64)> = res.into_iter().collect::<Result<_>>()?;
        let sym = res.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
        let tri = res.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);

        let sources: Vec<SurfacePoint> = (0..3).map(|_| m.random_point(&mut rng)).collect();
        let field = DistanceField::build(m, &SourceSet::points(sources), None)?;
        let lip: Vec<Result<f64>> = EXEC.map(&triples, |[a, b, _]| {
            let (fa, ea) = field.value_with_error(a);
            let (fb, eb) = field.value_with_error(b);
            let d = certified_distance(m, a, b, &o)?;
            Ok((fa - fb).abs() - d.value - (ea + eb + d.err + floor))
        });
        let lip = lip.into_iter().collect::<Result<Vec<f64>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        ok &= sym <= 0.0 && tri <= 0.0 && lip <= 0.0;
        detail.push(format!("{name} slack sym {sym:.1e} tri {tri:.1e} lip {lip:.1e}"));
    }
    Ok((ok, detail.join("; ")))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("geodesic exactness", c1_geodesic_exactness),
        ("distance convergence", c2_distance_convergence),
        ("chart convergence bound", c3_chart_convergence),
        ("4-concavity", c4_four_concavity),
        ("explicit modifier", c5_modifier),
        ("midpoint displacement", c6_displacement),
        ("dc distance field", c7_field_dc),
        ("r-boundary", c8_level_set),
        ("multijoined locus", c9_multijoined_locus),
        ("negative control", c10_negative_control),
        ("metric axioms", c11_metric_axioms),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match f() {
            Ok(o) => o,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} [{:.1?}]: {detail}", i + 1, t.elapsed());
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
