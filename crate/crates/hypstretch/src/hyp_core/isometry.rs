use super::{Cx, GeomError, GeomResult, IdealPoint, UhpPoint};

/// An isometry of the upper half-plane: a normalized real 2x2 matrix
/// `[[a, b], [c, d]]` with unit determinant and a reflection flag.
///
/// With `reflect = true` the map is `z -> M(-conj z)`: the reflection across
/// the imaginary axis is applied first, then the Möbius map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub reflect: bool,
}

impl Isometry {
    /// Normalize `[[a, b], [c, d]]` to unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64, reflect: bool) -> GeomResult<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(GeomError::DegenerateMatrix(det));
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s, reflect })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0, reflect: false }
    }

    /// Hyperbolic translation of length `len` along the imaginary axis, towards ∞.
    pub fn axis_translation(len: f64) -> Self {
        let h = (len / 2.0).exp();
        Self { a: h, b: 0.0, c: 0.0, d: 1.0 / h, reflect: false }
    }

    /// Parabolic `z -> z + t`.
    pub fn shift(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0, reflect: false }
    }

    /// Elliptic rotation about `i` by angle `theta` (counterclockwise).
    pub fn rotation_about_i(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self { a: c, b: s, c: -s, d: c, reflect: false }
    }

    /// `z -> -1/z`, the half-turn about `i`.
    pub fn half_turn() -> Self {
        Self { a: 0.0, b: -1.0, c: 1.0, d: 0.0, reflect: false }
    }

    /// Reflection across the vertical geodesic `Re z = x0`.
    pub fn reflection_vertical(x0: f64) -> Self {
        Self { a: 1.0, b: 2.0 * x0, c: 0.0, d: 1.0, reflect: true }
    }

    /// Reflection (inversion) across the semicircle of centre `center` and radius `radius`.
    pub fn reflection_circle(center: f64, radius: f64) -> GeomResult<Self> {
        if !(radius > 0.0) {
            return Err(GeomError::DegenerateGeodesic);
        }
        let r = radius;
        Ok(Self { a: center / r, b: (center * center - r * r) / r, c: 1.0 / r, d: center / r, reflect: true })
    }

    /// The isometry sending `0, 1, ∞` to `a, b, c`; orientation-reversing when the
    /// target triple is clockwise.
    pub fn from_ideal_triple(a: IdealPoint, b: IdealPoint, c: IdealPoint) -> GeomResult<Self> {
        use IdealPoint::{Finite, Infinity};
        let (m, det) = match (a, b, c) {
            (Finite(a), Finite(b), Finite(c)) => {
                let k = (b - a) / (c - b);
                ([c * k, a, k, 1.0], k * (c - a))
            }
            (Infinity, Finite(b), Finite(c)) => ([c, b - c, 1.0, 0.0], c - b),
            (Finite(a), Infinity, Finite(c)) => ([c, -a, 1.0, -1.0], a - c),
            (Finite(a), Finite(b), Infinity) => ([b - a, a, 0.0, 1.0], b - a),
            _ => return Err(GeomError::DegenerateGeodesic),
        };
        if !det.is_finite() || det == 0.0 {
            return Err(GeomError::DegenerateMatrix(det));
        }
        if det > 0.0 {
            Isometry::new(m[0], m[1], m[2], m[3], false)
        } else {
            Isometry::new(-m[0], m[1], -m[2], m[3], true)
        }
    }

    /// `J M J` where `J(z) = -conj z`.
    fn conj_by_reflection(&self) -> Self {
        Self { a: self.a, b: -self.b, c: -self.c, d: self.d, reflect: self.reflect }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let m2 = if self.reflect { other.conj_by_reflection() } else { *other };
        let a = self.a * m2.a + self.b * m2.c;
        let b = self.a * m2.b + self.b * m2.d;
        let c = self.c * m2.a + self.d * m2.c;
        let d = self.c * m2.b + self.d * m2.d;
        Isometry { a, b, c, d, reflect: self.reflect ^ other.reflect }
    }

    pub fn inverse(&self) -> Isometry {
        let inv = Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a, reflect: self.reflect };
        if self.reflect {
            inv.conj_by_reflection()
        } else {
            inv
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn apply_cx(&self, z: Cx) -> Cx {
        let w = if self.reflect { Cx::new(-z.re, z.im) } else { z };
        (w * self.a + self.b) / (w * self.c + self.d)
    }

    pub fn apply(&self, p: UhpPoint) -> UhpPoint {
        let w = self.apply_cx(p.to_cx());
        UhpPoint::raw(w.re, w.im.max(f64::MIN_POSITIVE))
    }

    pub fn apply_ideal(&self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::Infinity => {
                if self.c == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
            IdealPoint::Finite(x) => {
                let x = if self.reflect { -x } else { x };
                let den = self.c * x + self.d;
                if den == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Equality as maps (the matrix is defined up to sign).
    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        if self.reflect != other.reflect {
            return false;
        }
        let close = |s: f64| {
            (self.a - s * other.a).abs() <= tol
                && (self.b - s * other.b).abs() <= tol
                && (self.c - s * other.c).abs() <= tol
                && (self.d - s * other.d).abs() <= tol
        };
        close(1.0) || close(-1.0)
    }
}

/// Translation length `2 arccosh(|tr|/2)` of an orientation-preserving isometry;
/// zero for elliptic and parabolic elements. For a glide reflection the value is
/// half the translation length of its square.
pub fn translation_length(m: &Isometry) -> f64 {
    if m.reflect {
        return translation_length(&m.compose(m)) / 2.0;
    }
    let t = m.trace().abs() / 2.0;
    if t <= 1.0 {
        0.0
    } else {
        2.0 * t.acosh()
    }
}
