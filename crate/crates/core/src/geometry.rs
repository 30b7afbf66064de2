//! Planar geometry primitives shared by the graph, encoder and metrics.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| Point::new(self.x / n, self.y / n))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Parameter `t ∈ [0, 1]` of the point on segment `a-b` closest to `p`.
pub fn project_onto_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return 0.0;
    }
    ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let t = project_onto_segment(p, a, b);
    p.dist(a.lerp(b, t))
}

/// Intersection of segments `a0-a1` and `b0-b1`, including touching
/// endpoints. Parallel segments are reported as non-intersecting.
///
/// Returns `(point, t, u)` where `point = a0 + t (a1 - a0) = b0 + u (b1 - b0)`.
pub fn segment_intersection(a0: Point, a1: Point, b0: Point, b1: Point) -> Option<(Point, f64, f64)> {
    let r = a1 - a0;
    let s = b1 - b0;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = b0 - a0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((a0.lerp(a1, t), t, u))
    } else {
        None
    }
}

/// Closest pair of points between two segments, as `(distance, on_a, on_b)`.
pub fn segment_segment_closest(a0: Point, a1: Point, b0: Point, b1: Point) -> (f64, Point, Point) {
    if let Some((p, _, _)) = segment_intersection(a0, a1, b0, b1) {
        return (0.0, p, p);
    }
    let candidates = [
        (a0, b0.lerp(b1, project_onto_segment(a0, b0, b1))),
        (a1, b0.lerp(b1, project_onto_segment(a1, b0, b1))),
        (a0.lerp(a1, project_onto_segment(b0, a0, a1)), b0),
        (a0.lerp(a1, project_onto_segment(b1, a0, a1)), b1),
    ];
    let mut best = (f64::INFINITY, a0, b0);
    for (pa, pb) in candidates {
        let d = pa.dist(pb);
        if d < best.0 {
            best = (d, pa, pb);
        }
    }
    best
}

/// Turn angle in degrees when travelling `a -> v -> b`; 0 means straight.
pub fn turn_angle_deg(a: Point, v: Point, b: Point) -> f64 {
    let u = v - a;
    let w = b - v;
    let nu = u.norm();
    let nw = w.norm();
    if nu == 0.0 || nw == 0.0 {
        return 180.0;
    }
    let c = (u.dot(w) / (nu * nw)).clamp(-1.0, 1.0);
    c.acos().to_degrees()
}
