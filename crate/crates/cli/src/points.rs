//! Point and source addressing: `v:<i>`, `f:<i>:<b1>,<b2>,<b3>`, `xyz:<x>,<y>,<z>`.

use convexgeo::geodesic::{SourceComponent, SourceSet};
use convexgeo::{ConvexSurfaceMesh, SurfacePoint, Vec3};

use crate::Failure;

/// Syntactic form of a point, resolved against a mesh later.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Vertex(usize),
    Face(usize, [f64; 3]),
    Xyz([f64; 3]),
}

fn floats<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("{what}: expected {N} comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| format!("{what}: '{p}' is not a number"))?;
        if !o.is_finite() {
            return Err(format!("{what}: '{p}' is not finite"));
        }
    }
    Ok(out)
}

pub fn parse_point(s: &str) -> Result<PointSpec, String> {
    if let Some(rest) = s.strip_prefix("v:") {
        return rest.parse().map(PointSpec::Vertex).map_err(|_| format!("bad vertex index in '{s}'"));
    }
    if let Some(rest) = s.strip_prefix("f:") {
        let (idx, bary) = rest.split_once(':').ok_or_else(|| format!("expected f:<face>:<b1>,<b2>,<b3>, got '{s}'"))?;
        let face = idx.parse().map_err(|_| format!("bad face index in '{s}'"))?;
        return Ok(PointSpec::Face(face, floats::<3>(bary, "barycentric coordinates")?));
    }
    if let Some(rest) = s.strip_prefix("xyz:") {
        return Ok(PointSpec::Xyz(floats::<3>(rest, "coordinates")?));
    }
    Err(format!("unrecognized point '{s}' (use v:<i>, f:<i>:<b1>,<b2>,<b3> or xyz:<x>,<y>,<z>)"))
}

pub fn resolve(mesh: &ConvexSurfaceMesh, p: &PointSpec) -> Result<SurfacePoint, Failure> {
    match p {
        PointSpec::Vertex(v) => {
            if *v >= mesh.num_vertices() {
                return Err(Failure::input(format!("vertex {v} out of range (mesh has {})", mesh.num_vertices())));
            }
            Ok(mesh.vertex_point(*v))
        }
        PointSpec::Face(f, b) => Ok(mesh.check_point(&SurfacePoint::new(*f, *b))?),
        PointSpec::Xyz(x) => Ok(mesh.closest_point(&Vec3::from(*x))),
    }
}

/// A source component: a point, `edge:<a>,<b>`, `face:<i>` or `all`.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Point(PointSpec),
    Edge(usize, usize),
    Face(usize),
    All,
}

pub fn parse_source(s: &str) -> Result<SourceSpec, String> {
    if s == "all" {
        return Ok(SourceSpec::All);
    }
    if let Some(rest) = s.strip_prefix("edge:") {
        let (a, b) = rest.split_once(',').ok_or_else(|| format!("expected edge:<a>,<b>, got '{s}'"))?;
        let a = a.parse().map_err(|_| format!("bad vertex index in '{s}'"))?;
        let b = b.parse().map_err(|_| format!("bad vertex index in '{s}'"))?;
        return Ok(SourceSpec::Edge(a, b));
    }
    if let Some(rest) = s.strip_prefix("face:") {
        return rest.parse().map(SourceSpec::Face).map_err(|_| format!("bad face index in '{s}'"));
    }
    parse_point(s).map(SourceSpec::Point)
}

pub fn resolve_sources(mesh: &ConvexSurfaceMesh, specs: &[SourceSpec]) -> Result<SourceSet, Failure> {
    let mut set = SourceSet::default();
    for s in specs {
        match s {
            SourceSpec::All => set.components.extend(SourceSet::whole_mesh(mesh).components),
            SourceSpec::Point(p) => set.components.push(SourceComponent::Point { point: resolve(mesh, p)? }),
            SourceSpec::Edge(a, b) => set.components.push(SourceComponent::Edge { a: *a, b: *b }),
            SourceSpec::Face(f) => {
                if *f >= mesh.num_faces() {
                    return Err(Failure::input(format!("face {f} out of range")));
                }
                set.components.push(SourceComponent::Triangle { face: *f })
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_point("v:6").unwrap(), PointSpec::Vertex(6));
        assert_eq!(parse_point("f:2:0.2,0.3,0.5").unwrap(), PointSpec::Face(2, [0.2, 0.3, 0.5]));
        assert_eq!(parse_point("xyz:1,0,0.5").unwrap(), PointSpec::Xyz([1.0, 0.0, 0.5]));
        assert!(parse_point("v:x").is_err());
        assert!(parse_point("f:1:0.5,0.5").is_err());
        assert!(parse_point("q:1").is_err());
        assert_eq!(parse_source("edge:0,1").unwrap(), SourceSpec::Edge(0, 1));
        assert_eq!(parse_source("all").unwrap(), SourceSpec::All);
    }
}
