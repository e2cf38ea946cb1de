//! ASCII OFF reading and writing.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::ConvexSurfaceMesh;

/// Vertices and fan-triangulated faces of an OFF document.
pub fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or(Error::Parse { line, msg: "missing OFF header".into() })?
        .trim();
    let (line, counts) = if rest.is_empty() {
        lines.next().ok_or(Error::Parse { line, msg: "missing counts line".into() })?
    } else {
        (line, rest)
    };
    let counts = parse_numbers::<usize>(counts, line)?;
    if counts.len() < 2 {
        return Err(Error::Parse { line, msg: "expected vertex and face counts".into() });
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines.next().ok_or(Error::Parse { line, msg: "truncated vertex list".into() })?;
        let xs = parse_numbers::<f64>(l, line)?;
        if xs.len() < 3 {
            return Err(Error::Parse { line, msg: "vertex needs three coordinates".into() });
        }
        vertices.push(Vec3::new(xs[0], xs[1], xs[2]));
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines.next().ok_or(Error::Parse { line, msg: "truncated face list".into() })?;
        let mut it = l.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::Parse { line, msg: "bad face size".into() })?;
        let idx: Vec<usize> = it
            .take(n)
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        if n < 3 || idx.len() != n {
            return Err(Error::Parse { line, msg: format!("face lists {} of {} indices", idx.len(), n) });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= nv) {
            return Err(Error::Parse { line, msg: format!("vertex index {bad} out of range") });
        }
        for i in 1..n - 1 {
            triangles.push([idx[0], idx[i], idx[i + 1]]);
        }
    }
    Ok((vertices, triangles))
}

fn parse_numbers<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split_whitespace()
        .map(|w| w.parse::<T>().map_err(|e| Error::Parse { line, msg: format!("{w:?}: {e}") }))
        .collect()
}

/// Parses OFF text into a validated mesh.
pub fn mesh_from_off(text: &str) -> Result<ConvexSurfaceMesh> {
    let (v, t) = parse_off(text)?;
    ConvexSurfaceMesh::new(v, t)
}

/// Reads an OFF file into a validated, outward-oriented mesh.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<ConvexSurfaceMesh> {
    mesh_from_off(&std::fs::read_to_string(path)?)
}

pub fn to_off(mesh: &ConvexSurfaceMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} {}", mesh.num_vertices(), mesh.num_faces(), mesh.num_edges());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE_QUADS: &str = "OFF
# unit cube
8 6 12
0 0 0
1 0 0
1 1 0
0 1 0
0 0 1
1 0 1
1 1 1
0 1 1
4 0 3 2 1
4 4 5 6 7
4 0 1 5 4
4 1 2 6 5
4 2 3 7 6
4 3 0 4 7
";

    #[test]
    fn quads_are_fanned() {
        let m = mesh_from_off(CUBE_QUADS).unwrap();
        assert_eq!(m.num_faces(), 12);
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn header_on_counts_line_and_round_trip() {
        let m = mesh_from_off("OFF 4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n").unwrap();
        let again = mesh_from_off(&to_off(&m)).unwrap();
        assert_eq!(again.triangles, m.triangles);
    }

    #[test]
    fn bad_input_reports_line() {
        match parse_off("OFF\n1 0 0\n0 0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_off("PLY\n"), Err(Error::Parse { line: 1, .. })));
    }
}
