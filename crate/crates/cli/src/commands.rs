use std::path::Path;

use serde_json::{json, Value};

use convexgeo::approximation::{
    approximate_polyhedral, distance_convergence_report, fibonacci_sphere, sandwich_epsilon_body, BodySpec, Reference,
};
use convexgeo::chart::StandardChart;
use convexgeo::dc::{self, Certified, ConcavityReport, GridSpec};
use convexgeo::geodesic::{intrinsic_diameter, shortest_path, DiameterOptions, DistanceField, GeodesicOptions, SourceSet};
use convexgeo::levelset::{
    estimate_multijoined_locus, extract_level_set, levelset_topology, scan_regular_values, ExoskeletonEstimate,
};
use convexgeo::mesh::default_tol_convex;
use convexgeo::off::to_off;
use convexgeo::svg::{Figure, Projection};
use convexgeo::{load_mesh, validate_convex, ConvexSurfaceMesh, Exec, SurfacePoint, Vec2, Vec3};

use crate::args::*;
use crate::points::{parse_point, parse_source, resolve, resolve_sources, PointSpec};
use crate::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

const EXEC: Exec = Exec::Parallel;

pub fn run(cmd: &Command) -> Run {
    match cmd {
        Command::CheckConvex(a) => check_convex(a),
        Command::Chart(a) => chart(a),
        Command::Distance(a) => distance(a),
        Command::Diameter(a) => diameter(a),
        Command::Approx(a) => approx(a),
        Command::Converge(a) => converge(a),
        Command::DcCheck(a) => dc_check(a),
        Command::Field(a) => field(a),
        Command::Levelset(a) => levelset(a),
        Command::Scan(a) => scan(a),
        Command::Exoskeleton(a) => exoskeleton(a),
    }
}

fn to_json<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn ok(result: Value) -> Run {
    Ok(Outcome { result, pass: true, svg: None })
}

/// Loads a mesh and rejects non-convex input.
fn convex_mesh(path: &Path) -> Result<ConvexSurfaceMesh, Failure> {
    let mesh = load_mesh(path)?;
    let rep = validate_convex(&mesh, default_tol_convex(&mesh))?;
    if !rep.pass {
        return Err(Failure::input(format!(
            "{} is not convex (deviation {} exceeds {})",
            path.display(),
            rep.deviation,
            rep.tolerance
        )));
    }
    Ok(mesh)
}

fn point(mesh: &ConvexSurfaceMesh, s: &str) -> Result<SurfacePoint, Failure> {
    resolve(mesh, &parse_point(s).map_err(Failure::usage)?)
}

fn sources(mesh: &ConvexSurfaceMesh, raw: &[String]) -> Result<SourceSet, Failure> {
    let specs = raw.iter().map(|s| parse_source(s)).collect::<Result<Vec<_>, _>>().map_err(Failure::usage)?;
    resolve_sources(mesh, &specs)
}

fn located(mesh: &ConvexSurfaceMesh, p: &SurfacePoint) -> Value {
    let x = mesh.point(p);
    json!({ "face": p.face, "bary": p.bary, "xyz": [x.x, x.y, x.z] })
}

fn body(raw: &str) -> Result<BodySpec, Failure> {
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).map_err(|e| Failure::input(format!("reading {raw}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("body spec: {e}")))
}

fn geo_options(g: &Geo) -> GeodesicOptions {
    match g.method {
        MethodArg::Exact => GeodesicOptions::exact(g.tau),
        MethodArg::Graph => GeodesicOptions::graph(g.tau),
    }
}

fn default_radius(mesh: &ConvexSurfaceMesh) -> f64 {
    0.5 * mesh.inner_radius()
}

fn with_svg(mut o: Outcome, path: &Option<std::path::PathBuf>, fig: impl FnOnce() -> String) -> Outcome {
    if let Some(p) = path {
        o.svg = Some((p.clone(), fig()));
    }
    o
}

fn check_convex(a: &CheckConvexArgs) -> Run {
    let mesh = load_mesh(&a.mesh)?;
    let rep = validate_convex(&mesh, a.tol.unwrap_or_else(|| default_tol_convex(&mesh)))?;
    Ok(Outcome {
        result: json!({
            "n_vertices": mesh.num_vertices(),
            "n_faces": mesh.num_faces(),
            "euler_characteristic": mesh.euler_characteristic(),
            "report": to_json(&rep),
        }),
        pass: rep.pass,
        svg: None,
    })
}

fn chart(a: &ChartArgs) -> Run {
    let mesh = convex_mesh(&a.mesh)?;
    let z = point(&mesh, &a.at)?;
    let c = StandardChart::around(&mesh, &z, a.radius.unwrap_or_else(|| default_radius(&mesh)))?;
    let t = c.seed_coords(&mesh);
    let o = ok(json!({
        "chart": to_json(&c.export()),
        "n_pieces": c.pieces.len(),
        "seed_coords": t.map(|t| [t.x, t.y]),
    }))?;
    Ok(with_svg(o, &a.svg, || {
        let mut fig = Figure::new(Projection::chart(&c)).title("chart");
        fig.mesh(&mesh).polygon2d(&c.polygon, "#1f77b4").points(&[mesh.point(&z)], "#d62728");
        fig.render()
    }))
}

fn distance(a: &DistanceArgs) -> Run {
    let mesh = convex_mesh(&a.mesh)?;
    let (p, q) = (point(&mesh, &a.from)?, point(&mesh, &a.to)?);
    let r = shortest_path(&mesh, &p, &q, &geo_options(&a.geo))?;
    let path: Vec<Value> = r.path.iter().map(|s| located(&mesh, s)).collect();
    let o = ok(json!({
        "length": r.length,
        "lower_bound": r.lower_bound,
        "relative_gap": r.relative_gap(),
        "method": r.method,
        "source": located(&mesh, &r.source),
        "target": located(&mesh, &r.target),
        "path": path,
    }))?;
    Ok(with_svg(o, &a.svg, || {
        let pts: Vec<Vec3> = r.path.iter().map(|s| mesh.point(s)).collect();
        let mut fig = Figure::new(Projection::axonometric()).title("shortest path");
        fig.mesh(&mesh).polyline(&pts, false, "#d62728").points(&[pts[0], pts[pts.len() - 1]], "#d62728");
        fig.render()
    }))
}

fn diameter(a: &DiameterArgs) -> Run {
    let mesh = convex_mesh(&a.mesh)?;
    let opts = DiameterOptions { tau: a.tau, seed: a.seed, exec: EXEC, ..DiameterOptions::default() };
    let d = intrinsic_diameter(&mesh, mesh.num_vertices() + a.extra_samples, &opts)?;
    ok(to_json(&d))
}

fn approx(a: &ApproxArgs) -> Run {
    let spec = body(&a.body)?;
    let mesh = approximate_polyhedral(&spec, a.k, a.seed)?;
    let sandwich = sandwich_epsilon_body(&spec, &mesh, 2000)?;
    let convexity = validate_convex(&mesh, default_tol_convex(&mesh))?;
    if let Some(p) = &a.off {
        std::fs::write(p, to_off(&mesh)).map_err(|e| Failure::input(format!("writing {}: {e}", p.display())))?;
    }
    let o = ok(json!({
        "body": to_json(&spec),
        "n_vertices": mesh.num_vertices(),
        "n_faces": mesh.num_faces(),
        "euler_characteristic": mesh.euler_characteristic(),
        "sandwich": to_json(&sandwich),
        "convexity": to_json(&convexity),
    }))?;
    Ok(with_svg(o, &a.svg, || {
        let mut fig = Figure::new(Projection::axonometric()).title("approximation");
        fig.mesh(&mesh);
        fig.render()
    }))
}

/// Boundary point of the body in direction `u`.
fn boundary_point(spec: &BodySpec, u: &Vec3) -> Result<Vec3, Failure> {
    Ok(u / spec.gauge(u)?)
}

fn converge(a: &ConvergeArgs) -> Run {
    let spec = body(&a.body)?;
    let seq: Vec<Result<ConvexSurfaceMesh, convexgeo::Error>> =
        EXEC.map(&a.ks, |k| approximate_polyhedral(&spec, *k, a.seed));
    let seq = seq.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut pairs = vec![(boundary_point(&spec, &Vec3::z())?, boundary_point(&spec, &-Vec3::z())?)];
    let dirs = fibonacci_sphere(2 * a.pairs, a.seed.wrapping_add(1));
    for c in dirs.chunks_exact(2) {
        pairs.push((boundary_point(&spec, &c[0])?, boundary_point(&spec, &c[1])?));
    }
    let opts = GeodesicOptions::exact(a.tau);
    let finest;
    let reference = match spec {
        BodySpec::Sphere => Reference::UnitSphere,
        _ => {
            let k = 4 * a.ks.iter().copied().max().unwrap_or(1);
            finest = approximate_polyhedral(&spec, k, a.seed)?;
            Reference::Mesh(&finest)
        }
    };
    let rep = distance_convergence_report(reference, &seq, &pairs, &opts, EXEC)?;
    Ok(Outcome { result: to_json(&rep), pass: rep.pass, svg: None })
}

fn finish(rep: ConcavityReport, extra: Value) -> Run {
    let pass = rep.pass;
    let mut result = to_json(&rep);
    if let (Some(obj), Value::Object(more)) = (result.get_mut("params").and_then(Value::as_object_mut), extra) {
        obj.extend(more);
    }
    Ok(Outcome { result, pass, svg: None })
}

fn first_neighbor(mesh: &ConvexSurfaceMesh, v: usize) -> usize {
    mesh.vertex_faces[v]
        .iter()
        .flat_map(|&f| mesh.triangles[f])
        .filter(|&w| w != v)
        .min()
        .unwrap_or(v)
}

fn dc_check(a: &DcCheckArgs) -> Run {
    if a.check == Check::SecondDiff {
        let (Some(fa), Some(fb), Some(fm)) = (a.fa, a.fb, a.fmid) else {
            return Err(Failure::usage("second-diff needs --fa, --fb and --fmid"));
        };
        let v = dc::second_difference(fa, fb, fm);
        let floor = 4.0 * f64::EPSILON * (fa.abs() + fb.abs() + fm.abs() + a.bound.abs());
        let rep = ConcavityReport {
            check: "second-diff".into(),
            params: json!({ "fa": fa, "fb": fb, "fmid": fm, "bound": a.bound }),
            n_tested: 1,
            n_skipped: 0,
            max_violation: v - a.bound,
            tolerance: floor,
            witness: Some(json!({ "second_difference": v })),
            pass: v - a.bound <= floor,
        };
        return finish(rep, json!({}));
    }
    let path = a.mesh.as_ref().ok_or_else(|| Failure::usage("--mesh is required for this check"))?;
    let mesh = convex_mesh(path)?;
    let opts = GeodesicOptions::exact(a.tau);
    let at_raw = a.at.clone().unwrap_or_else(|| "v:0".into());
    let at_spec = parse_point(&at_raw).map_err(Failure::usage)?;
    let at = resolve(&mesh, &at_spec)?;
    let radius = a.radius.unwrap_or_else(|| default_radius(&mesh));
    let src_raw = if a.source.is_empty() { vec!["v:0".to_string()] } else { a.source.clone() };
    let m_upper = |mesh: &ConvexSurfaceMesh| -> Result<f64, Failure> {
        match a.m_upper {
            Some(m) => Ok(m),
            None => {
                let o = DiameterOptions { tau: a.tau, seed: a.seed, exec: EXEC, ..DiameterOptions::default() };
                Ok(intrinsic_diameter(mesh, mesh.num_vertices() + 64, &o)?.upper)
            }
        }
    };
    match a.check {
        Check::SecondDiff => unreachable!(),
        Check::ChartC => {
            let chart = StandardChart::around(&mesh, &at, radius)?;
            let pairs = GridSpec::with_pairs(a.grid, a.seed).chart_pairs(&chart);
            let rep = match a.function {
                Function::Sqnorm => dc::check_chart_c_concavity(&chart, |x: &Vec2| Ok(Certified::exact(x.norm_squared())), a.c, &pairs, EXEC)?,
                Function::ChartF => dc::check_chart_c_concavity(&chart, |x: &Vec2| Ok(Certified::exact(chart.f_unchecked(x))), a.c, &pairs, EXEC)?,
                Function::DistSq => {
                    let field = DistanceField::build(&mesh, &sources(&mesh, &src_raw)?, None)?;
                    let g = |x: &Vec2| {
                        let (v, e) = field.value_with_error(&chart.eval(&mesh, x)?);
                        Ok(Certified { value: v, err: e }.squared())
                    };
                    dc::check_chart_c_concavity(&chart, g, a.c, &pairs, EXEC)?
                }
            };
            finish(rep, json!({ "function": a.function, "at": at_raw, "radius": radius, "seed": a.seed }))
        }
        Check::Midpoint4c => {
            let pairs = dc::random_product_pairs(&mesh, a.pairs, a.seed);
            let rep = dc::check_midpoint_4concavity(&mesh, &pairs, &opts, EXEC)?;
            finish(rep, json!({ "seed": a.seed }))
        }
        Check::Diagonal => {
            let samples = dc::random_product_points(&mesh, a.pairs, a.seed);
            let rep = dc::check_diagonal_identity(&mesh, &samples, a.candidates, a.seed, &opts, EXEC)?;
            finish(rep, json!({}))
        }
        Check::Displacement => {
            let chart = StandardChart::around(&mesh, &at, radius)?;
            let t = chart.seed_coords(&mesh).ok_or_else(|| Failure::usage("chart centre has no chart coordinates"))?;
            let delta = a.delta.unwrap_or(0.6 * radius);
            let rep = dc::check_midpoint_displacement(&mesh, &chart, t, delta, a.dirs, a.seed, &opts, EXEC)?;
            finish(rep, json!({ "at": at_raw, "radius": radius }))
        }
        Check::Modifier => {
            let at2 = match (&a.at2, &at_spec) {
                (Some(s), _) => point(&mesh, s)?,
                (None, PointSpec::Vertex(v)) => mesh.vertex_point(first_neighbor(&mesh, *v)),
                (None, _) => return Err(Failure::usage("modifier needs --at2 when --at is not a vertex")),
            };
            let c1 = StandardChart::around(&mesh, &at, radius)?;
            let c2 = StandardChart::around(&mesh, &at2, radius)?;
            let m = m_upper(&mesh)?;
            let pairs = GridSpec::with_pairs(a.grid, a.seed).product_pairs(&c1, &c2);
            let rep = dc::check_modifier_concavity(&mesh, &c1, &c2, m, &pairs, &opts, EXEC)?;
            finish(rep, json!({ "at": at_raw, "at2": located(&mesh, &at2), "radius": radius, "seed": a.seed }))
        }
        Check::FieldDc => {
            let set = sources(&mesh, &src_raw)?;
            let field = DistanceField::build(&mesh, &set, None)?;
            let at = if a.at.is_some() {
                at
            } else {
                let far = (0..mesh.num_vertices())
                    .max_by(|&i, &j| field.vertex_values[i].total_cmp(&field.vertex_values[j]).then(j.cmp(&i)))
                    .unwrap_or(0);
                mesh.vertex_point(far)
            };
            let chart = StandardChart::around(&mesh, &at, radius)?;
            let m = m_upper(&mesh)?;
            let pairs = GridSpec::with_pairs(a.grid, a.seed).chart_pairs(&chart);
            let rep = dc::check_dc_distance_field(&mesh, &chart, &field, m, &pairs, EXEC)?;
            finish(rep, json!({ "at": located(&mesh, &at), "radius": radius, "seed": a.seed }))
        }
    }
}

fn source_figure(mesh: &ConvexSurfaceMesh, set: &SourceSet, proj: Projection, title: &str) -> Figure {
    use convexgeo::geodesic::SourceComponent;
    let pts: Vec<Vec3> = set
        .components
        .iter()
        .filter_map(|c| match c {
            SourceComponent::Point { point } => Some(mesh.point(point)),
            _ => None,
        })
        .collect();
    let mut fig = Figure::new(proj).title(title);
    fig.mesh(mesh).points(&pts, "#2ca02c");
    fig
}

fn field(a: &FieldArgs) -> Run {
    let mesh = convex_mesh(&a.src.mesh)?;
    let set = sources(&mesh, &a.src.source)?;
    let f = DistanceField::build(&mesh, &set, None)?;
    let o = ok(json!({
        "sources": to_json(&set),
        "e_field": f.e_field,
        "max_value": f.max_value,
        "vertex_values": f.vertex_values,
        "n_windows": f.num_windows(),
    }))?;
    Ok(with_svg(o, &a.svg, || source_figure(&mesh, &set, Projection::axonometric(), "distance field").render()))
}

fn levelset(a: &LevelsetArgs) -> Run {
    let mesh = convex_mesh(&a.src.mesh)?;
    let set = sources(&mesh, &a.src.source)?;
    let f = DistanceField::build(&mesh, &set, None)?;
    let ls = extract_level_set(&f, a.r, a.subdiv, EXEC)?;
    let topo = levelset_topology(&mesh, &ls);
    let proj = match &a.chart {
        Some(s) => Projection::chart(&StandardChart::around(&mesh, &point(&mesh, s)?, default_radius(&mesh))?),
        None => Projection::axonometric(),
    };
    let o = ok(json!({ "level_set": to_json(&ls), "topology": to_json(&topo), "e_field": f.e_field }))?;
    Ok(with_svg(o, &a.svg, || {
        let mut fig = source_figure(&mesh, &set, proj, "level set");
        for pl in &ls.polylines {
            let pts: Vec<Vec3> = pl.positions.iter().map(|p| Vec3::from(*p)).collect();
            fig.polyline(&pts, pl.closed, "#d62728");
        }
        fig.render()
    }))
}

fn scan(a: &ScanArgs) -> Run {
    let mesh = convex_mesh(&a.src.mesh)?;
    let set = sources(&mesh, &a.src.source)?;
    let f = DistanceField::build(&mesh, &set, None)?;
    let grid: Vec<f64> = match &a.r_grid {
        Some(g) => g.clone(),
        None => (1..=a.steps).map(|i| f.max_value * i as f64 / a.steps as f64).collect(),
    };
    let spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let window = a.window.unwrap_or(if spacing.is_finite() { 0.5 * spacing } else { 1e-3 * mesh.scale });
    let exo: Option<ExoskeletonEstimate> = match a.exoskeleton_density {
        Some(d) => Some(estimate_multijoined_locus(&mesh, &set, d, None, a.seed, EXEC)?),
        None => None,
    };
    let entries = scan_regular_values(&f, &grid, window, exo.as_ref(), a.subdiv, EXEC)?;
    ok(json!({ "window": window, "max_value": f.max_value, "entries": to_json(&entries) }))
}

fn exoskeleton(a: &ExoskeletonArgs) -> Run {
    let mesh = convex_mesh(&a.src.mesh)?;
    let set = sources(&mesh, &a.src.source)?;
    let e = estimate_multijoined_locus(&mesh, &set, a.density, a.eps_tie, a.seed, EXEC)?;
    let o = ok(to_json(&e))?;
    Ok(with_svg(o, &a.svg, || {
        let pts: Vec<Vec3> = e.samples.iter().map(|s| Vec3::from(s.position)).collect();
        let mut fig = source_figure(&mesh, &set, Projection::axonometric(), "exoskeleton");
        fig.points(&pts, "#d62728");
        fig.render()
    }))
}
