//! The Ackermann arc-motion model.
//!
//! Every motion is a fixed-length (0.1 m) constant-steering circular arc,
//! driven forward or backward. With steering angle `phi` the turning radius
//! is `R = L / tan(phi)`; `phi = 0` degenerates to a straight segment.
//!
//! Sign convention: positive steer turns toward increasing heading when
//! moving forward. Backward motion traverses the same arc geometry in the
//! opposite direction, so the heading change per primitive is
//! `dir * s * tan(phi) / L` with `dir = +1` forward, `-1` backward.

use crate::geometry::{Point2, Pose};
use crate::scalar::{wrap_angle, Real};

/// Fixed arc length of every motion primitive, in meters.
pub const STEP_LENGTH_M: f64 = 0.1;

/// Vehicle geometry and steering limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleParams<S> {
    /// Distance between the axles (`L`).
    pub wheelbase: S,
    pub body_length: S,
    pub body_width: S,
    /// Distance from the rear axle back to the rear bumper.
    pub rear_overhang: S,
    /// Steering-angle limit (`phi_max`), radians.
    pub max_steer: S,
    /// Distance between the wheel contact lines; only `equivalent_steer`
    /// cares about it.
    pub track_width: S,
}

impl<S: Real> Default for VehicleParams<S> {
    fn default() -> Self {
        VehicleParams {
            wheelbase: S::of(2.7),
            body_length: S::of(4.5),
            body_width: S::of(1.8),
            rear_overhang: S::of(0.9),
            max_steer: S::of(30.0).to_radians(),
            track_width: S::of(1.6),
        }
    }
}

impl<S: Real> VehicleParams<S> {
    pub fn validate(&self) -> Result<(), crate::error::Error> {
        let ok = S::zero() < self.wheelbase
            && self.wheelbase < self.body_length
            && S::zero() < self.max_steer
            && self.max_steer < S::FRAC_PI_2()
            && self.rear_overhang >= S::zero()
            && self.rear_overhang + self.wheelbase <= self.body_length
            && self.body_width > S::zero()
            && self.track_width > S::zero();
        if ok {
            Ok(())
        } else {
            Err(crate::error::Error::invalid("vehicle parameters violate invariants"))
        }
    }

    pub fn cast<T: Real>(&self) -> VehicleParams<T> {
        VehicleParams {
            wheelbase: T::of(self.wheelbase.as_f64()),
            body_length: T::of(self.body_length.as_f64()),
            body_width: T::of(self.body_width.as_f64()),
            rear_overhang: T::of(self.rear_overhang.as_f64()),
            max_steer: T::of(self.max_steer.as_f64()),
            track_width: T::of(self.track_width.as_f64()),
        }
    }
}

/// Traversal direction of a primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn signum<S: Real>(self) -> S {
        match self {
            Direction::Forward => S::one(),
            Direction::Backward => -S::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// One fixed-length arc step: the planner's only action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionPrimitive<S> {
    pub direction: Direction,
    /// Steering angle `phi`, radians.
    pub steer: S,
}

impl<S: Real> MotionPrimitive<S> {
    pub fn new(direction: Direction, steer: S) -> Self {
        debug_assert!(steer.is_finite());
        MotionPrimitive { direction, steer }
    }

    pub fn forward(steer: S) -> Self {
        MotionPrimitive::new(Direction::Forward, steer)
    }

    pub fn backward(steer: S) -> Self {
        MotionPrimitive::new(Direction::Backward, steer)
    }

    /// The fixed 0.1 m arc length.
    pub fn arc_length() -> S {
        S::of(STEP_LENGTH_M)
    }

    /// Same arc, opposite traversal direction.
    pub fn flipped(self) -> Self {
        MotionPrimitive { direction: self.direction.flipped(), steer: self.steer }
    }

    pub fn cast<T: Real>(self) -> MotionPrimitive<T> {
        MotionPrimitive { direction: self.direction, steer: T::of(self.steer.as_f64()) }
    }
}

/// Integrates an arc of the given length (not necessarily the fixed step).
/// Shared by `integrate`, `sample_arc` and the target-tree builders.
pub(crate) fn integrate_arc<S: Real>(
    pose: Pose<S>,
    direction: Direction,
    steer: S,
    arc_len: S,
    vehicle: &VehicleParams<S>,
) -> Pose<S> {
    let s = arc_len * direction.signum::<S>();
    let tan_phi = steer.tan();
    if tan_phi == S::zero() {
        let p = pose.position + pose.forward().scale(s);
        return Pose::from_parts(p, pose.heading);
    }
    let dth = s * tan_phi / vehicle.wheelbase;
    let radius = vehicle.wheelbase / tan_phi;
    // Chord form of the arc displacement; free of cancellation for small dth.
    let half = S::of(0.5);
    let chord = (radius + radius) * (dth * half).sin();
    let mid = pose.heading + dth * half;
    let p = pose.position + Point2::unit(mid).scale(chord);
    Pose::from_parts(p, wrap_angle(pose.heading + dth))
}

/// Pose after traversing one fixed-length primitive.
///
/// Panics when the steering angle exceeds the vehicle limit.
pub fn integrate<S: Real>(pose: Pose<S>, prim: MotionPrimitive<S>, vehicle: &VehicleParams<S>) -> Pose<S> {
    assert!(
        prim.steer.abs() <= vehicle.max_steer + S::of(1e-12),
        "steer {:?} exceeds vehicle limit {:?}",
        prim.steer,
        vehicle.max_steer
    );
    integrate_arc(pose, prim.direction, prim.steer, MotionPrimitive::arc_length(), vehicle)
}

/// Squared configuration distance:
/// `(ax-bx)^2 + (ay-by)^2 + w * wrap(atheta - btheta)^2`.
pub fn config_distance<S: Real>(a: Pose<S>, b: Pose<S>, angle_weight: S) -> S {
    debug_assert!(angle_weight >= S::zero());
    let d = a.position - b.position;
    let dth = wrap_angle(a.heading - b.heading);
    d.x * d.x + d.y * d.y + angle_weight * dth * dth
}

/// `n` poses at arc-length fractions `k/n` (k = 1..n) along the primitive.
/// The last element equals `integrate(pose, prim)` exactly.
pub fn sample_arc<S: Real>(
    pose: Pose<S>,
    prim: MotionPrimitive<S>,
    vehicle: &VehicleParams<S>,
    n: usize,
) -> Vec<Pose<S>> {
    assert!(n >= 1, "sample_arc needs n >= 1");
    let total = MotionPrimitive::arc_length();
    (1..=n)
        .map(|k| {
            let frac = S::of_usize(k) / S::of_usize(n);
            integrate_arc(pose, prim.direction, prim.steer, total * frac, vehicle)
        })
        .collect()
}

/// Equivalent steering angle from the inner and outer wheel angles, using
/// the Ackermann cotangent mean: `cot(phi) = (cot(inner) + cot(outer)) / 2`.
///
/// Panics unless both angles are nonzero, share a sign and have magnitude
/// below pi/2.
pub fn equivalent_steer<S: Real>(inner: S, outer: S, _vehicle: &VehicleParams<S>) -> S {
    assert!(
        inner != S::zero() && outer != S::zero() && (inner > S::zero()) == (outer > S::zero()),
        "wheel angles must be nonzero with matching signs"
    );
    assert!(
        inner.abs() < S::FRAC_PI_2() && outer.abs() < S::FRAC_PI_2(),
        "wheel angles must lie in (0, pi/2)"
    );
    let sign = if inner > S::zero() { S::one() } else { -S::one() };
    let ti = inner.abs().tan();
    let to = outer.abs().tan();
    let tan_phi = (S::of(2.0) * ti * to) / (ti + to);
    sign * tan_phi.atan()
}
