//! Planar primitives: points doubling as complex numbers, equilateral
//! points, Fermat points and hexagonal coordinates.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;
pub const TWO_THIRDS_PI: f64 = 2.0 * PI / 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction. Zero stays zero.
    pub fn unit(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self / n
        }
    }

    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Quarter turn counter-clockwise.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn conj(self) -> Point {
        Point::new(self.x, -self.y)
    }

    /// Complex product.
    pub fn cmul(self, o: Point) -> Point {
        Point::new(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, k: f64) -> Point {
        Point::new(self.x / k, self.y / k)
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::new(z.re, z.im)
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.x, p.y)
    }
}

/// Counter-clockwise rotation by 60 degrees with exact constants.
pub fn rot60(p: Point) -> Point {
    Point::new(0.5 * p.x - HALF_SQRT3 * p.y, HALF_SQRT3 * p.x + 0.5 * p.y)
}

pub fn rot_neg60(p: Point) -> Point {
    Point::new(0.5 * p.x + HALF_SQRT3 * p.y, -HALF_SQRT3 * p.x + 0.5 * p.y)
}

pub fn rot120(p: Point) -> Point {
    Point::new(-0.5 * p.x - HALF_SQRT3 * p.y, HALF_SQRT3 * p.x - 0.5 * p.y)
}

pub fn rot240(p: Point) -> Point {
    Point::new(-0.5 * p.x + HALF_SQRT3 * p.y, -HALF_SQRT3 * p.x - 0.5 * p.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Counter-clockwise of the directed segment.
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Side of `p` relative to the directed line `a -> b`, `None` when on it.
    pub fn of(a: Point, b: Point, p: Point) -> Option<Side> {
        let c = (b - a).cross(p - a);
        if c > 0.0 {
            Some(Side::Left)
        } else if c < 0.0 {
            Some(Side::Right)
        } else {
            None
        }
    }
}

/// Third vertex of the equilateral triangle on `p1 p2`.
pub fn equilateral_third(p1: Point, p2: Point, side: Side) -> Point {
    let d = p2 - p1;
    match side {
        Side::Left => p1 + rot60(d),
        Side::Right => p1 + rot_neg60(d),
    }
}

/// Angle at `q` between `q -> p` and `q -> r`, in `[0, pi]`.
pub fn angle_at(p: Point, q: Point, r: Point) -> f64 {
    let (u, v) = (p - q, r - q);
    u.cross(v).abs().atan2(u.dot(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FermatKind {
    Interior,
    /// The vertex with index 0, 1 or 2 has an angle of at least 120 degrees.
    Vertex(usize),
}

/// Point minimising the summed distance to the three vertices.
pub fn fermat_point(a: Point, b: Point, c: Point) -> Result<(Point, FermatKind)> {
    let pts = [a, b, c];
    let scale = a.dist(b).max(b.dist(c)).max(c.dist(a));
    if !(scale > 0.0) || !pts.iter().all(|p| p.is_finite()) {
        return Err(Error::Degenerate("triangle has coincident vertices".into()));
    }
    for i in 0..3 {
        let (p, q, r) = (pts[(i + 1) % 3], pts[i], pts[(i + 2) % 3]);
        if p.dist(q) <= 1e-15 * scale || r.dist(q) <= 1e-15 * scale {
            return Err(Error::Degenerate("triangle has coincident vertices".into()));
        }
        if angle_at(p, q, r) >= TWO_THIRDS_PI {
            return Ok((q, FermatKind::Vertex(i)));
        }
    }
    // all angles below 120 degrees, so the triangle is non-degenerate
    let side = match Side::of(b, c, a) {
        Some(s) => s.flip(),
        None => return Err(Error::Degenerate("collinear triangle".into())),
    };
    let e = equilateral_third(b, c, side);
    Ok((melzak_pivot(b, c, e, a), FermatKind::Interior))
}

/// Second intersection of the line `e -> toward` with the circle through the
/// equilateral triangle `p1 p2 e`, as a distance `tau` along the line from `e`.
pub(crate) fn melzak_tau(p1: Point, p2: Point, e: Point, toward: Point) -> (f64, Point) {
    let centre = (p1 + p2 + e) / 3.0;
    let dir = (toward - e).unit();
    let tau = 2.0 * (centre - e).dot(dir);
    (tau, dir)
}

fn melzak_pivot(p1: Point, p2: Point, e: Point, toward: Point) -> Point {
    let (tau, dir) = melzak_tau(p1, p2, e, toward);
    e + dir * tau
}

/// Three unit directions at 120 degrees, counter-clockwise from `e[0]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexFrame {
    pub origin: Point,
    pub e: [Point; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexCoord {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl HexCoord {
    pub fn new(u: f64, v: f64, w: f64) -> Self {
        HexCoord { u, v, w }
    }

    /// Representative with `v + w = 0`; `(1, 1, 1)` is the null direction.
    pub fn canonical(self) -> HexCoord {
        let t = 0.5 * (self.v + self.w);
        HexCoord::new(self.u - t, self.v - t, self.w - t)
    }
}

impl HexFrame {
    /// Frame whose first axis points along `theta`.
    pub fn new(origin: Point, theta: f64) -> Self {
        HexFrame::from_e1(origin, Point::polar(1.0, theta))
    }

    pub fn from_e1(origin: Point, e1: Point) -> Self {
        let e1 = e1.unit();
        HexFrame {
            origin,
            e: [e1, rot120(e1), rot240(e1)],
        }
    }

    pub fn to_hex(&self, p: Point) -> HexCoord {
        let d = p - self.origin;
        let v = d.dot(self.e[1] - self.e[2]) / 3.0;
        HexCoord::new(d.dot(self.e[0]), v, -v)
    }

    pub fn from_hex(&self, h: HexCoord) -> Point {
        self.origin + self.e[0] * h.u + self.e[1] * h.v + self.e[2] * h.w
    }

    /// Second canonical coordinate; lines parallel to `e[0]` are its level sets.
    pub fn level(&self, p: Point) -> f64 {
        self.to_hex(p).v
    }
}

/// Convex hull, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Signed distance outside a counter-clockwise convex polygon (<= 0 inside).
pub fn hull_excess(hull: &[Point], p: Point) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => p.dist(hull[0]),
        2 => point_segment_dist(p, hull[0], hull[1]),
        n => {
            let mut worst = f64::NEG_INFINITY;
            for i in 0..n {
                let (a, b) = (hull[i], hull[(i + 1) % n]);
                let out = -(b - a).cross(p - a) / a.dist(b);
                worst = worst.max(out);
            }
            worst
        }
    }
}

pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// Mirror image of `p` in the line through `a` with direction `dir`.
pub fn reflect(p: Point, a: Point, dir: Point) -> Point {
    let d = dir.unit();
    let q = p - a;
    a + d * (2.0 * q.dot(d)) - q
}

pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn equilateral_examples() {
        let p = equilateral_third(Point::ORIGIN, Point::new(1.0, 0.0), Side::Left);
        assert!(close(p, Point::new(0.5, SQRT3 / 2.0), 1e-15));
        let p = equilateral_third(Point::ORIGIN, Point::new(0.0, 2.0), Side::Left);
        assert!(close(p, Point::new(-SQRT3, 1.0), 1e-15));
        let p = equilateral_third(Point::ORIGIN, Point::new(1.0, 0.0), Side::Right);
        assert!(close(p, Point::new(0.5, -SQRT3 / 2.0), 1e-15));
    }

    #[test]
    fn fermat_of_equilateral_is_centroid() {
        let a = Point::ORIGIN;
        let b = Point::new(1.0, 0.0);
        let c = Point::new(0.5, SQRT3 / 2.0);
        let (f, kind) = fermat_point(a, b, c).unwrap();
        assert_eq!(kind, FermatKind::Interior);
        assert!(close(f, (a + b + c) / 3.0, 1e-14));
    }

    #[test]
    fn fermat_obtuse_returns_vertex() {
        let (f, kind) = fermat_point(Point::new(-1.0, 0.0), Point::new(0.0, 0.1), Point::new(1.0, 0.0)).unwrap();
        assert_eq!(kind, FermatKind::Vertex(1));
        assert_eq!(f, Point::new(0.0, 0.1));
    }

    #[test]
    fn fermat_rejects_coincident() {
        assert!(fermat_point(Point::ORIGIN, Point::ORIGIN, Point::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn hex_basis_vectors() {
        let f = HexFrame::new(Point::ORIGIN, 0.0);
        let s = f.e[0] + f.e[1] + f.e[2];
        assert!(s.norm() < 1e-15);
        let h = f.to_hex(f.e[1]);
        assert!((h.u + 0.5).abs() < 1e-15 && (h.v - 0.5).abs() < 1e-15);
        assert!(close(f.from_hex(h), f.e[1], 1e-15));
    }

    #[test]
    fn hex_canonical_matches_null_direction() {
        let f = HexFrame::new(Point::new(0.3, -1.0), 0.7);
        let h = HexCoord::new(0.4, 1.2, -0.1);
        let c = h.canonical();
        assert!((c.v + c.w).abs() < 1e-15);
        assert!(close(f.from_hex(h), f.from_hex(c), 1e-14));
    }

    #[test]
    fn angle_range() {
        let a = angle_at(Point::new(1.0, 0.0), Point::ORIGIN, Point::new(-1.0, 0.0));
        assert!((a - PI).abs() < 1e-15);
        let a = angle_at(Point::new(1.0, 0.0), Point::ORIGIN, Point::new(0.0, -3.0));
        assert!((a - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hull_of_square_with_interior() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.5),
            Point::new(0.5, 0.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(hull_excess(&h, Point::new(0.5, 0.5)) < 0.0);
        assert!((hull_excess(&h, Point::new(2.0, 0.5)) - 1.0).abs() < 1e-15);
    }
}
