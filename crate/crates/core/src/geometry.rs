//! Planar primitives, vehicle footprint computation and all collision queries.
//!
//! Collision checks use the closed-region convention: shared boundary points
//! count as overlap. Obstacle polygons handed to the SAT kernel must be
//! convex; concave inputs are decomposed at scenario load time.

use crate::error::Error;
use crate::kinematics::{sample_arc, MotionPrimitive, VehicleParams};
use crate::scalar::{wrap_angle, Real};
use crate::scenario::Scenario;

/// A point in the plane, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point");
        Point2 { x, y }
    }

    /// Unit vector at the given angle.
    pub fn unit(angle: S) -> Self {
        Point2 { x: angle.cos(), y: angle.sin() }
    }

    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    /// Rotation by 90 degrees counter-clockwise (the left normal).
    pub fn perp(self) -> Self {
        Point2 { x: -self.y, y: self.x }
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, o: Self) -> S {
        (self - o).norm()
    }

    pub fn scale(self, k: S) -> Self {
        Point2 { x: self.x * k, y: self.y * k }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<T: Real>(self) -> Point2<T> {
        Point2 { x: T::of(self.x.as_f64()), y: T::of(self.y.as_f64()) }
    }
}

impl<S: Real> std::ops::Add for Point2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl<S: Real> std::ops::Sub for Point2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl<S: Real> std::ops::Neg for Point2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2 { x: -self.x, y: -self.y }
    }
}

/// A planar configuration: rear-axle midpoint position plus heading.
///
/// The heading is kept normalized to `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Pose<S> {
    pub position: Point2<S>,
    pub heading: S,
}

impl<S: Real> Pose<S> {
    pub fn new(x: S, y: S, heading: S) -> Self {
        debug_assert!(heading.is_finite(), "non-finite heading");
        Pose { position: Point2::new(x, y), heading: wrap_angle(heading) }
    }

    pub fn from_parts(position: Point2<S>, heading: S) -> Self {
        Pose::new(position.x, position.y, heading)
    }

    /// Unit vector along the heading.
    pub fn forward(self) -> Point2<S> {
        Point2::unit(self.heading)
    }

    pub fn cast<T: Real>(self) -> Pose<T> {
        Pose { position: self.position.cast(), heading: T::of(self.heading.as_f64()) }
    }
}

/// A rectangle with arbitrary orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedBox<S> {
    pub center: Point2<S>,
    pub half_length: S,
    pub half_width: S,
    pub heading: S,
}

impl<S: Real> OrientedBox<S> {
    pub fn new(center: Point2<S>, half_length: S, half_width: S, heading: S) -> Self {
        debug_assert!(half_length > S::zero() && half_width > S::zero(), "degenerate box");
        OrientedBox { center, half_length, half_width, heading }
    }

    /// Long-axis and short-axis unit vectors.
    pub fn axes(&self) -> [Point2<S>; 2] {
        let u = Point2::unit(self.heading);
        [u, u.perp()]
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2<S>; 4] {
        let [u, v] = self.axes();
        let l = u.scale(self.half_length);
        let w = v.scale(self.half_width);
        [
            self.center + l + w,
            self.center - l + w,
            self.center - l - w,
            self.center + l - w,
        ]
    }

    pub fn to_polygon(&self) -> Polygon<S> {
        Polygon::new(self.corners().to_vec()).expect("box corners form a valid polygon")
    }
}

/// A simple polygon with counter-clockwise winding.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<S> {
    vertices: Vec<Point2<S>>,
}

impl<S: Real> Polygon<S> {
    /// Validates vertex count, finiteness, winding and simplicity.
    pub fn new(vertices: Vec<Point2<S>>) -> Result<Self, Error> {
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polygon has non-finite vertex"));
        }
        let poly = Polygon { vertices };
        if poly.signed_area() <= S::zero() {
            return Err(Error::invalid("polygon must wind counter-clockwise"));
        }
        if !poly.is_simple() {
            return Err(Error::invalid("polygon is self-intersecting"));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2<S>] {
        &self.vertices
    }

    pub fn signed_area(&self) -> S {
        let mut acc = S::zero();
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc = acc + a.cross(b);
        }
        acc / S::of(2.0)
    }

    /// True when every turn is counter-clockwise or straight.
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let eps = -S::of(1e-12);
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= eps
        })
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a1, a2) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // Skip edges sharing a vertex.
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_properly_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }

    /// Closed-region containment test. Only valid for convex polygons.
    pub fn contains_point(&self, p: Point2<S>) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= S::zero()
        })
    }

    /// Strict-interior containment test. Only valid for convex polygons.
    pub fn contains_point_strict(&self, p: Point2<S>) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) > S::zero()
        })
    }

    /// Distance travelled from `p` along unit direction `dir` until the ray
    /// leaves the (convex) polygon. Zero when `p` is outside.
    pub fn ray_exit_distance(&self, p: Point2<S>, dir: Point2<S>) -> S {
        if !self.contains_point(p) {
            return S::zero();
        }
        let mut t_exit = S::infinity();
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let edge = b - a;
            let normal = edge.perp(); // inward for CCW winding
            let denom = normal.dot(dir);
            if denom < S::zero() {
                // Moving toward this edge.
                let t = normal.dot(a - p) / denom;
                if t >= S::zero() && t < t_exit {
                    t_exit = t;
                }
            }
        }
        if t_exit.is_finite() {
            t_exit
        } else {
            S::zero()
        }
    }

    pub fn cast<T: Real>(&self) -> Polygon<T> {
        Polygon { vertices: self.vertices.iter().map(|v| v.cast()).collect() }
    }

    /// Splits a simple polygon into convex parts by ear clipping. Convex
    /// inputs are returned unchanged.
    pub fn decompose_convex(&self) -> Result<Vec<Polygon<S>>, Error> {
        if self.is_convex() {
            return Ok(vec![self.clone()]);
        }
        let mut remaining: Vec<Point2<S>> = self.vertices.clone();
        let mut parts = Vec::new();
        while remaining.len() > 3 {
            let n = remaining.len();
            let mut clipped = false;
            for i in 0..n {
                let prev = remaining[(i + n - 1) % n];
                let cur = remaining[i];
                let next = remaining[(i + 1) % n];
                if (cur - prev).cross(next - cur) <= S::zero() {
                    continue; // reflex or collinear corner
                }
                let ear_contains_other = remaining.iter().enumerate().any(|(j, &p)| {
                    if j == i || j == (i + n - 1) % n || j == (i + 1) % n {
                        return false;
                    }
                    point_in_triangle_strict(p, prev, cur, next)
                });
                if ear_contains_other {
                    continue;
                }
                parts.push(Polygon::new(vec![prev, cur, next])?);
                remaining.remove(i);
                clipped = true;
                break;
            }
            if !clipped {
                return Err(Error::invalid("polygon could not be decomposed (degenerate geometry)"));
            }
        }
        parts.push(Polygon::new(remaining)?);
        Ok(parts)
    }
}

fn point_in_triangle_strict<S: Real>(p: Point2<S>, a: Point2<S>, b: Point2<S>, c: Point2<S>) -> bool {
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    d1 > S::zero() && d2 > S::zero() && d3 > S::zero()
}

fn segments_properly_intersect<S: Real>(
    a1: Point2<S>,
    a2: Point2<S>,
    b1: Point2<S>,
    b2: Point2<S>,
) -> bool {
    let d1 = (a2 - a1).cross(b1 - a1);
    let d2 = (a2 - a1).cross(b2 - a1);
    let d3 = (b2 - b1).cross(a1 - b1);
    let d4 = (b2 - b1).cross(a2 - b1);
    ((d1 > S::zero() && d2 < S::zero()) || (d1 < S::zero() && d2 > S::zero()))
        && ((d3 > S::zero() && d4 < S::zero()) || (d3 < S::zero() && d4 > S::zero()))
}

/// Axis-aligned sampling and driving bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Workspace<S> {
    pub min: Point2<S>,
    pub max: Point2<S>,
}

impl<S: Real> Workspace<S> {
    pub fn new(min: Point2<S>, max: Point2<S>) -> Result<Self, Error> {
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::invalid("degenerate workspace"));
        }
        Ok(Workspace { min, max })
    }

    pub fn contains_point(&self, p: Point2<S>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_box(&self, b: &OrientedBox<S>) -> bool {
        b.corners().iter().all(|&c| self.contains_point(c))
    }

    pub fn cast<T: Real>(&self) -> Workspace<T> {
        Workspace { min: self.min.cast(), max: self.max.cast() }
    }
}

/// Body box of the vehicle at a given pose. The pose is the rear-axle
/// midpoint; the box center sits ahead of it by half the body length minus
/// the rear overhang.
pub fn footprint<S: Real>(pose: Pose<S>, vehicle: &VehicleParams<S>) -> OrientedBox<S> {
    let half = S::of(0.5);
    let offset = vehicle.body_length * half - vehicle.rear_overhang;
    let center = pose.position + pose.forward().scale(offset);
    OrientedBox::new(center, vehicle.body_length * half, vehicle.body_width * half, pose.heading)
}

fn project_interval<S: Real>(points: &[Point2<S>], axis: Point2<S>) -> (S, S) {
    let mut lo = points[0].dot(axis);
    let mut hi = lo;
    for p in &points[1..] {
        let v = p.dot(axis);
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

fn separated_on_axes<S: Real>(axes: &[Point2<S>], a: &[Point2<S>], b: &[Point2<S>]) -> bool {
    axes.iter().any(|&axis| {
        let (a_lo, a_hi) = project_interval(a, axis);
        let (b_lo, b_hi) = project_interval(b, axis);
        a_hi < b_lo || b_hi < a_lo
    })
}

/// Separating-axis test between an oriented box and a convex polygon.
/// Closed regions: edge or corner contact counts as intersection.
pub fn box_polygon_intersects<S: Real>(box_: &OrientedBox<S>, poly: &Polygon<S>) -> bool {
    let corners = box_.corners();
    let verts = poly.vertices();
    let mut axes: Vec<Point2<S>> = Vec::with_capacity(2 + verts.len());
    axes.extend_from_slice(&box_.axes());
    let n = verts.len();
    for i in 0..n {
        axes.push((verts[(i + 1) % n] - verts[i]).perp());
    }
    !separated_on_axes(&axes, &corners, verts)
}

/// Separating-axis test between two convex polygons (closed regions).
pub fn convex_polygons_intersect<S: Real>(a: &Polygon<S>, b: &Polygon<S>) -> bool {
    let va = a.vertices();
    let vb = b.vertices();
    let mut axes: Vec<Point2<S>> = Vec::with_capacity(va.len() + vb.len());
    for verts in [va, vb] {
        let n = verts.len();
        for i in 0..n {
            axes.push((verts[(i + 1) % n] - verts[i]).perp());
        }
    }
    !separated_on_axes(&axes, va, vb)
}

/// True when the footprint at `pose` stays inside the workspace and touches
/// no obstacle part.
pub fn pose_collision_free<S: Real>(pose: Pose<S>, scenario: &Scenario<S>) -> bool {
    let fp = footprint(pose, &scenario.vehicle);
    if !scenario.workspace.contains_box(&fp) {
        return false;
    }
    scenario.obstacles.iter().all(|obs| !box_polygon_intersects(&fp, obs))
}

/// True when every sampled pose along the primitive's arc is collision-free.
/// The start pose is assumed free already.
pub fn arc_collision_free<S: Real>(
    start: Pose<S>,
    prim: MotionPrimitive<S>,
    scenario: &Scenario<S>,
    samples: usize,
) -> bool {
    sample_arc(start, prim, &scenario.vehicle, samples)
        .into_iter()
        .all(|p| pose_collision_free(p, scenario))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(cx: f64, cy: f64, half: f64) -> Polygon<f64> {
        Polygon::new(vec![
            Point2::new(cx - half, cy - half),
            Point2::new(cx + half, cy - half),
            Point2::new(cx + half, cy + half),
            Point2::new(cx - half, cy + half),
        ])
        .unwrap()
    }

    #[test]
    fn footprint_examples() {
        let vehicle = VehicleParams::default();
        // 4.5/2 - 0.9 = 1.35 ahead of the rear axle.
        let fp = footprint(Pose::new(0.0, 0.0, std::f64::consts::FRAC_PI_2), &vehicle);
        assert!((fp.center.x - 0.0).abs() < 1e-12);
        assert!((fp.center.y - 1.35).abs() < 1e-12);
        assert!((fp.half_length - 2.25).abs() < 1e-12);
        assert!((fp.half_width - 0.9).abs() < 1e-12);
        assert!((fp.heading - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let fp = footprint(Pose::new(0.0, 0.0, 0.0), &vehicle);
        assert!((fp.center.x - 1.35).abs() < 1e-12);
        assert!((fp.center.y - 0.0).abs() < 1e-12);

        let q = std::f64::consts::FRAC_PI_4;
        let fp = footprint(Pose::new(2.0, 3.0, q), &vehicle);
        assert!((fp.center.x - (2.0 + 1.35 * q.cos())).abs() < 1e-12);
        assert!((fp.center.y - (3.0 + 1.35 * q.sin())).abs() < 1e-12);
    }

    #[test]
    fn sat_examples() {
        let unit_box = OrientedBox::new(Point2::new(0.0, 0.0), 0.5, 0.5, 0.0);
        assert!(!box_polygon_intersects(&unit_box, &square(10.0, 10.0, 0.5)));
        assert!(box_polygon_intersects(&unit_box, &square(0.0, 0.0, 0.5)));
        // Edge contact at x = 0.5: closed regions overlap.
        let touching = OrientedBox::new(Point2::new(1.0, 0.0), 0.5, 0.5, 0.0);
        assert!(box_polygon_intersects(&touching, &square(0.0, 0.0, 0.5)));
    }

    #[test]
    fn sat_symmetry_with_polygon_kernel() {
        // Exchanging the box (as a polygon) and the polygon gives the same answer.
        let cases = [
            (OrientedBox::new(Point2::new(0.3, -0.2), 1.0, 0.4, 0.7), square(1.0, 0.5, 0.6)),
            (OrientedBox::new(Point2::new(5.0, 5.0), 0.5, 0.5, 1.2), square(0.0, 0.0, 1.0)),
            (OrientedBox::new(Point2::new(1.4, 0.0), 1.0, 0.4, 0.0), square(0.0, 0.0, 0.4)),
        ];
        for (b, p) in cases {
            assert_eq!(
                box_polygon_intersects(&b, &p),
                convex_polygons_intersect(&b.to_polygon(), &p)
            );
        }
    }

    #[test]
    fn polygon_validation() {
        assert!(Polygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).is_err());
        // Clockwise winding rejected.
        assert!(Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .is_err());
        // Bow-tie rejected.
        assert!(Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ])
        .is_err());
    }

    #[test]
    fn concave_decomposition_covers_input() {
        // L-shaped polygon -> convex parts.
        let l_shape = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 2.0),
            Point2::new(0.0, 2.0),
        ])
        .unwrap();
        assert!(!l_shape.is_convex());
        let parts = l_shape.decompose_convex().unwrap();
        assert!(parts.len() >= 2);
        let total: f64 = parts.iter().map(|p| p.signed_area()).sum();
        assert!((total - l_shape.signed_area()).abs() < 1e-9);
        for part in &parts {
            assert!(part.is_convex());
        }
        // Interior sample points of the input are inside some part.
        for (x, y) in [(0.5, 0.5), (1.5, 0.5), (0.5, 1.5), (0.9, 0.9)] {
            let p = Point2::new(x, y);
            assert!(parts.iter().any(|part| part.contains_point(p)), "({x},{y}) uncovered");
        }
        // And a point in the notch is in no part.
        assert!(!parts.iter().any(|part| part.contains_point_strict(Point2::new(1.5, 1.5))));
    }

    #[test]
    fn ray_exit_distance_in_square() {
        let sq = square(0.0, 0.0, 1.0);
        let d = sq.ray_exit_distance(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-12);
        let d = sq.ray_exit_distance(Point2::new(0.5, 0.0), Point2::new(-1.0, 0.0));
        assert!((d - 1.5).abs() < 1e-12);
        assert_eq!(sq.ray_exit_distance(Point2::new(5.0, 0.0), Point2::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn workspace_bounds() {
        let ws = Workspace::new(Point2::new(0.0, 0.0), Point2::new(10.0, 5.0)).unwrap();
        assert!(ws.contains_point(Point2::new(0.0, 0.0)));
        assert!(ws.contains_point(Point2::new(10.0, 5.0)));
        assert!(!ws.contains_point(Point2::new(10.1, 5.0)));
        assert!(Workspace::new(Point2::new(1.0, 0.0), Point2::new(1.0, 5.0)).is_err());
    }
}
