//! Static SVG figures: axonometric views of the surface or a chart plane.

use std::fmt::Write;

use crate::chart::StandardChart;
use crate::geom::{orthonormal_complement, Vec2, Vec3};
use crate::mesh::ConvexSurfaceMesh;

pub enum Projection {
    /// Orthographic view along `-view`, hidden edges dimmed.
    Axonometric { view: Vec3, u: Vec3, v: Vec3 },
    /// Orthogonal projection onto a chart's plane.
    Chart { e: Vec3, u: Vec3, v: Vec3 },
}

impl Projection {
    pub fn axonometric() -> Self {
        Self::looking_from(Vec3::new(1.0, 0.7, 0.5))
    }

    pub fn looking_from(dir: Vec3) -> Self {
        let view = dir.normalize();
        // Keep world z pointing up on the page when possible.
        let up = Vec3::z() - view * view.z;
        let v = if up.norm() > 1e-6 { up.normalize() } else { orthonormal_complement(&view).1 };
        let u = v.cross(&view);
        Projection::Axonometric { view, u, v }
    }

    pub fn chart(chart: &StandardChart) -> Self {
        let (u, v) = orthonormal_complement(&chart.e);
        Projection::Chart { e: chart.e, u, v }
    }

    pub fn project(&self, p: &Vec3) -> Vec2 {
        match self {
            Projection::Axonometric { u, v, .. } | Projection::Chart { u, v, .. } => Vec2::new(p.dot(u), p.dot(v)),
        }
    }

    /// Whether a face with outward normal `n` faces the viewer.
    fn front(&self, n: &Vec3) -> bool {
        match self {
            Projection::Axonometric { view, .. } => n.dot(view) >= 0.0,
            // Chart graphs are seen from below, along -e.
            Projection::Chart { e, .. } => n.dot(e) < 0.0,
        }
    }
}

enum Item {
    Path { pts: Vec<Vec2>, closed: bool, style: String },
    Dot { p: Vec2, r: f64, fill: String },
}

pub struct Figure {
    proj: Projection,
    items: Vec<Item>,
    title: Option<String>,
}

impl Figure {
    pub fn new(proj: Projection) -> Self {
        Figure { proj, items: Vec::new(), title: None }
    }

    pub fn title(mut self, t: impl Into<String>) -> Self {
        self.title = Some(t.into());
        self
    }

    /// Mesh edges; an edge whose two faces both face away is dimmed.
    pub fn mesh(&mut self, mesh: &ConvexSurfaceMesh) -> &mut Self {
        let mut back = Vec::new();
        let mut front = Vec::new();
        for (f, t) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if a > b {
                    continue;
                }
                let g = mesh.neighbors[f][k].0;
                let seen = self.proj.front(&mesh.normals[f]) || self.proj.front(&mesh.normals[g]);
                let seg = vec![self.proj.project(&mesh.vertices[a]), self.proj.project(&mesh.vertices[b])];
                if seen { front.push(seg) } else { back.push(seg) }
            }
        }
        for seg in back {
            self.items.push(Item::Path { pts: seg, closed: false, style: "stroke:#999;stroke-opacity:0.3;stroke-dasharray:2,2".into() });
        }
        for seg in front {
            self.items.push(Item::Path { pts: seg, closed: false, style: "stroke:#555".into() });
        }
        self
    }

    pub fn polygon2d(&mut self, pts: &[Vec2], color: &str) -> &mut Self {
        self.items.push(Item::Path { pts: pts.to_vec(), closed: true, style: format!("stroke:{color};stroke-dasharray:4,2") });
        self
    }

    pub fn polyline(&mut self, pts: &[Vec3], closed: bool, color: &str) -> &mut Self {
        let pts = pts.iter().map(|p| self.proj.project(p)).collect();
        self.items.push(Item::Path { pts, closed, style: format!("stroke:{color};stroke-width:2") });
        self
    }

    pub fn points(&mut self, pts: &[Vec3], color: &str) -> &mut Self {
        for p in pts {
            let p = self.proj.project(p);
            self.items.push(Item::Dot { p, r: 0.0, fill: color.to_string() });
        }
        self
    }

    pub fn render(&self) -> String {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        let mut grow = |p: &Vec2| {
            lo = lo.inf(p);
            hi = hi.sup(p);
        };
        for it in &self.items {
            match it {
                Item::Path { pts, .. } => pts.iter().for_each(&mut grow),
                Item::Dot { p, .. } => grow(p),
            }
        }
        if !lo.x.is_finite() {
            lo = Vec2::zeros();
            hi = Vec2::new(1.0, 1.0);
        }
        let span = (hi - lo).max().max(1e-9);
        let pad = 0.05 * span;
        let px = 600.0 / (span + 2.0 * pad);
        let (w, h) = ((hi.x - lo.x + 2.0 * pad) * px, (hi.y - lo.y + 2.0 * pad) * px);
        let tr = |p: &Vec2| ((p.x - lo.x + pad) * px, (hi.y - p.y + pad) * px);
        let dot_r = 3.0;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#);
        if let Some(t) = &self.title {
            let _ = writeln!(s, "<title>{}</title>", escape(t));
        }
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for it in &self.items {
            match it {
                Item::Path { pts, closed, style } => {
                    let mut d = String::new();
                    for (i, p) in pts.iter().enumerate() {
                        let (x, y) = tr(p);
                        let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
                    }
                    if *closed {
                        d.push_str(" Z");
                    }
                    let _ = writeln!(s, r#"<path d="{d}" style="fill:none;{style}"/>"#);
                }
                Item::Dot { p, r, fill } => {
                    let (x, y) = tr(p);
                    let r = if *r > 0.0 { r * px } else { dot_r };
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#);
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
