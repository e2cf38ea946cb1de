//! Small planar and spatial helpers shared by the mesh, chart and propagation code.

use nalgebra::{Vector2, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// Closest point on triangle `abc` to `p`, returned with its barycentric coordinates.
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> (Vec3, [f64; 3]) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, [1.0, 0.0, 0.0]);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, [0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, [1.0 - v, v, 0.0]);
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, [0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, [1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, [0.0, 1.0 - w, w]);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, [1.0 - v - w, v, w])
}

/// Barycentric coordinates of `p` with respect to the planar triangle `abc`.
pub fn barycentric_2d(p: &Vec2, a: &Vec2, b: &Vec2, c: &Vec2) -> [f64; 3] {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let den = v0.x * v1.y - v1.x * v0.y;
    let v = (v2.x * v1.y - v1.x * v2.y) / den;
    let w = (v0.x * v2.y - v2.x * v0.y) / den;
    [1.0 - v - w, v, w]
}

pub fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Circumradius of a triangle given its three side lengths.
pub fn circumradius(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    let area2 = s * (s - a) * (s - b) * (s - c);
    if area2 <= 0.0 {
        return 0.5 * a.max(b).max(c);
    }
    a * b * c / (4.0 * area2.sqrt())
}

/// Distance from `p` to segment `ab` in the plane.
pub fn point_segment_distance_2d(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to segment `ab` in space.
pub fn point_segment_distance_3d(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// True when the segments `p1p2` and `q1q2` cross at a point interior to both.
pub fn segments_properly_intersect(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2, eps: f64) -> bool {
    let d1 = cross2(&(q2 - q1), &(p1 - q1));
    let d2 = cross2(&(q2 - q1), &(p2 - q1));
    let d3 = cross2(&(p2 - p1), &(q1 - p1));
    let d4 = cross2(&(p2 - p1), &(q2 - p1));
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

/// Orthonormal basis `(u1, u2)` of the plane orthogonal to the unit vector `e`.
///
/// Deterministic in `e`, so two charts sharing a direction share coordinates.
pub fn orthonormal_complement(e: &Vec3) -> (Vec3, Vec3) {
    let helper = if e.x.abs() <= e.y.abs() && e.x.abs() <= e.z.abs() {
        Vec3::x()
    } else if e.y.abs() <= e.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u1 = (helper - e * e.dot(&helper)).normalize();
    let u2 = e.cross(&u1);
    (u1, u2)
}

/// Real roots of `a x^2 + b x + c`, degrading to the linear case when `a` vanishes.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> smallvec::SmallVec<[f64; 2]> {
    let mut out = smallvec::SmallVec::new();
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return out;
    }
    if a.abs() <= 1e-14 * scale {
        if b.abs() > 1e-300 {
            out.push(-c / b);
        }
        return out;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-12 * b * b {
            out.push(-b / (2.0 * a));
        }
        return out;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q != 0.0 {
        out.push(q / a);
        out.push(c / q);
    } else {
        out.push(0.0);
    }
    out
}
