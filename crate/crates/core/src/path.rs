//! Executable paths: primitive chains replayed from anchor poses.
//!
//! A path is a list of segments. Within a segment the poses are implied by
//! integrating the primitives from the segment's start pose. Consecutive
//! segments may be separated by a small, explicitly represented pose jump:
//! that is how the planner records the junction between the search tree and
//! the target tree, and how the smoother records re-planned stretches that
//! end within tolerance of (not exactly at) their original waypoint.

use crate::geometry::Pose;
use crate::kinematics::{integrate, Direction, MotionPrimitive, VehicleParams};
use crate::scalar::Real;
use crate::scenario::Scenario;

/// A contiguous primitive chain anchored at a start pose.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSegment<S> {
    pub start: Pose<S>,
    pub primitives: Vec<MotionPrimitive<S>>,
}

impl<S: Real> PathSegment<S> {
    pub fn new(start: Pose<S>, primitives: Vec<MotionPrimitive<S>>) -> Self {
        PathSegment { start, primitives }
    }

    /// Poses visited, starting pose included (`len == primitives.len() + 1`).
    pub fn poses(&self, vehicle: &VehicleParams<S>) -> Vec<Pose<S>> {
        let mut out = Vec::with_capacity(self.primitives.len() + 1);
        out.push(self.start);
        let mut cur = self.start;
        for &prim in &self.primitives {
            cur = integrate(cur, prim, vehicle);
            out.push(cur);
        }
        out
    }

    pub fn end_pose(&self, vehicle: &VehicleParams<S>) -> Pose<S> {
        let mut cur = self.start;
        for &prim in &self.primitives {
            cur = integrate(cur, prim, vehicle);
        }
        cur
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }
}

/// A full path: one or more segments executed in order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Path<S> {
    pub segments: Vec<PathSegment<S>>,
}

impl<S: Real> Path<S> {
    pub fn empty() -> Self {
        Path { segments: Vec::new() }
    }

    pub fn single(start: Pose<S>, primitives: Vec<MotionPrimitive<S>>) -> Self {
        Path { segments: vec![PathSegment::new(start, primitives)] }
    }

    pub fn primitive_count(&self) -> usize {
        self.segments.iter().map(|s| s.primitives.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.primitive_count() == 0
    }

    /// Total length in meters: every primitive is a fixed-length arc.
    pub fn length(&self) -> S {
        S::of_usize(self.primitive_count()) * MotionPrimitive::arc_length()
    }

    pub fn start(&self) -> Option<Pose<S>> {
        self.segments.first().map(|s| s.start)
    }

    pub fn end_pose(&self, vehicle: &VehicleParams<S>) -> Option<Pose<S>> {
        self.segments.last().map(|s| s.end_pose(vehicle))
    }

    /// All primitives in execution order, ignoring segment boundaries.
    pub fn primitives(&self) -> impl Iterator<Item = MotionPrimitive<S>> + '_ {
        self.segments.iter().flat_map(|s| s.primitives.iter().copied())
    }

    pub fn steer_sequence(&self) -> Vec<S> {
        self.primitives().map(|p| p.steer).collect()
    }

    /// Number of forward/backward switches along the whole path.
    pub fn direction_changes(&self) -> usize {
        let dirs: Vec<Direction> = self.primitives().map(|p| p.direction).collect();
        dirs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Checks every primitive arc of every segment against the scenario.
    /// Returns the index (in execution order) of the first colliding
    /// primitive, or `None` when the whole path is collision-free.
    pub fn first_collision(&self, scenario: &Scenario<S>, samples: usize) -> Option<usize> {
        let mut index = 0;
        for seg in &self.segments {
            let mut cur = seg.start;
            if !crate::geometry::pose_collision_free(cur, scenario) {
                return Some(index);
            }
            for &prim in &seg.primitives {
                if !crate::geometry::arc_collision_free(cur, prim, scenario, samples) {
                    return Some(index);
                }
                cur = integrate(cur, prim, &scenario.vehicle);
                index += 1;
            }
        }
        None
    }

    /// Appends segments, merging at exact-contact joints so that splits whose
    /// halves came back unchanged do not introduce spurious boundaries.
    pub fn push_segments(&mut self, vehicle: &VehicleParams<S>, segments: Vec<PathSegment<S>>) {
        for seg in segments {
            if seg.primitives.is_empty() {
                continue;
            }
            if let Some(last) = self.segments.last_mut() {
                if last.end_pose(vehicle) == seg.start {
                    last.primitives.extend(seg.primitives);
                    continue;
                }
            }
            self.segments.push(seg);
        }
    }
}
