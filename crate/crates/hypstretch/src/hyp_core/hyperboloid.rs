//! Minkowski-space helpers: points of the hyperboloid, geodesics as spacelike
//! normals, and projective meets that stay valid for ideal or hyperideal points.

use super::{Geodesic, GeomError, GeomResult, UhpPoint};

pub type Vec3 = [f64; 3];

pub fn lorentz_dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// Vector Lorentz-orthogonal to both arguments.
pub fn lorentz_cross(a: Vec3, b: Vec3) -> Vec3 {
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    [c[0], -c[1], -c[2]]
}

pub fn to_hyperboloid(p: UhpPoint) -> Vec3 {
    let r2 = p.x * p.x + p.y * p.y;
    [(r2 + 1.0) / (2.0 * p.y), (r2 - 1.0) / (2.0 * p.y), p.x / p.y]
}

/// Back to the upper half-plane; fails for vectors that are not timelike.
pub fn from_hyperboloid(v: Vec3) -> GeomResult<UhpPoint> {
    let n = lorentz_dot(v, v);
    if !(n > 0.0) {
        return Err(GeomError::NoIntersection);
    }
    let s = if v[0] < 0.0 { -1.0 } else { 1.0 } / n.sqrt();
    let (x0, x1, x2) = (v[0] * s, v[1] * s, v[2] * s);
    let den = x0 - x1;
    Ok(UhpPoint::raw(x2 / den, 1.0 / den))
}

/// Spacelike normal of the plane cutting out `g`.
pub fn normal(g: &Geodesic) -> Vec3 {
    let f = g.frame();
    lorentz_cross(to_hyperboloid(f.apply(UhpPoint::i())), to_hyperboloid(f.apply(UhpPoint::raw(0.0, std::f64::consts::E))))
}

/// Normal of the perpendicular bisector of `p` and `q`.
pub fn bisector_normal(p: UhpPoint, q: UhpPoint) -> Vec3 {
    let (a, b) = (to_hyperboloid(p), to_hyperboloid(q));
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Projective intersection of two lines given by normals.
pub fn meet(n1: Vec3, n2: Vec3) -> Vec3 {
    lorentz_cross(n1, n2)
}

/// Orthogonal projection of the projective point `h` onto the line with
/// normal `m`. For a hyperideal `h` this is the foot of the common perpendicular
/// of the line and the polar of `h`.
pub fn project(h: Vec3, m: Vec3) -> GeomResult<UhpPoint> {
    let k = lorentz_dot(h, m) / lorentz_dot(m, m);
    from_hyperboloid([h[0] - k * m[0], h[1] - k * m[1], h[2] - k * m[2]])
}
