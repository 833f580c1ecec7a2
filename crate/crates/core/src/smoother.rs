//! Divide-and-conquer path smoothing via point pursuit.
//!
//! A segment is re-planned by pursuing its end pose directly from its start;
//! the re-plan counts as a success only when it reaches the end within the
//! planner tolerances using strictly fewer primitives than the original. On
//! failure the segment splits at its middle primitive boundary and both
//! halves recurse. Because replacements come from point pursuit, every
//! output primitive respects the steering limit and replays collision-free.
//!
//! A successful re-plan ends within tolerance of, not exactly at, its
//! original waypoint, so its stretch becomes its own path segment; the next
//! stretch still starts at the exact original waypoint. Splits whose halves
//! come back unchanged merge seamlessly.

use crate::error::Error;
use crate::geometry::Pose;
use crate::kinematics::{integrate, MotionPrimitive};
use crate::path::{Path, PathSegment};
use crate::planner::PlanConfig;
use crate::pursuit::point_pursuit;
use crate::scalar::{wrap_angle, Real};
use crate::scenario::Scenario;

/// Total path length in meters (primitive count times the fixed step).
pub fn path_length<S: Real>(path: &Path<S>) -> S {
    path.length()
}

fn reached<S: Real>(pose: Pose<S>, target: Pose<S>, config: &PlanConfig<S>) -> bool {
    pose.position.distance(target.position) <= config.tolerance_pos
        && wrap_angle(pose.heading - target.heading).abs() <= config.tolerance_heading
}

/// Attempts the direct re-plan of one segment. Success requires reaching the
/// segment's end pose in strictly fewer primitives than the original.
fn replan_segment<S: Real>(
    start: Pose<S>,
    end: Pose<S>,
    budget: usize,
    scenario: &Scenario<S>,
    config: &PlanConfig<S>,
) -> Option<Vec<MotionPrimitive<S>>> {
    let mut prims = Vec::new();
    let mut cur = start;
    while prims.len() + 1 < budget {
        let step = point_pursuit(cur, end, scenario, config.angle_weight).ok()?;
        prims.push(step.primitive);
        cur = step.destination;
        if reached(cur, end, config) {
            return Some(prims);
        }
    }
    None
}

fn smooth_segment<S: Real>(
    start: Pose<S>,
    prims: &[MotionPrimitive<S>],
    scenario: &Scenario<S>,
    config: &PlanConfig<S>,
    out: &mut Vec<PathSegment<S>>,
) {
    if prims.len() <= 1 {
        out.push(PathSegment::new(start, prims.to_vec()));
        return;
    }
    let mut end = start;
    for &p in prims {
        end = integrate(end, p, &scenario.vehicle);
    }
    if let Some(replanned) = replan_segment(start, end, prims.len(), scenario, config) {
        debug_assert!(replanned.len() < prims.len());
        out.push(PathSegment::new(start, replanned));
        return;
    }
    let mid = prims.len() / 2;
    let mut mid_pose = start;
    for &p in &prims[..mid] {
        mid_pose = integrate(mid_pose, p, &scenario.vehicle);
    }
    smooth_segment(start, &prims[..mid], scenario, config, out);
    smooth_segment(mid_pose, &prims[mid..], scenario, config, out);
}

/// Smooths a path under the vehicle's kinematic constraints.
///
/// The input must replay collision-free; anything else is a contract
/// violation and returns [`Error::PathInCollision`]. The output never has
/// more primitives than the input, starts at the same pose, ends within the
/// planner tolerances of the original end pose, and replays collision-free.
pub fn smooth<S: Real>(
    path: &Path<S>,
    scenario: &Scenario<S>,
    config: &PlanConfig<S>,
) -> Result<Path<S>, Error> {
    if let Some(index) = path.first_collision(scenario, scenario.arc_samples) {
        return Err(Error::PathInCollision { index });
    }
    let mut result = Path::empty();
    for seg in &path.segments {
        let mut pieces = Vec::new();
        smooth_segment(seg.start, &seg.primitives, scenario, config, &mut pieces);
        result.push_segments(&scenario.vehicle, pieces);
    }
    if result.segments.is_empty() {
        // Preserve the anchor of an all-empty input.
        if let Some(start) = path.start() {
            result.segments.push(PathSegment::new(start, Vec::new()));
        }
    }
    debug_assert!(result.primitive_count() <= path.primitive_count());
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Polygon, Workspace};
    use crate::kinematics::VehicleParams;
    use crate::scenario::{ParkingType, Slot};
    use std::f64::consts::FRAC_PI_2;

    fn open_scenario(extra: Vec<Polygon<f64>>) -> Scenario<f64> {
        Scenario {
            workspace: Workspace::new(Point2::new(-60.0, -60.0), Point2::new(60.0, 60.0)).unwrap(),
            obstacles: extra,
            slot: Slot { corner: Pose::new(-40.0, -34.7, -FRAC_PI_2), depth: 5.3, width: 2.5 },
            goal: Pose::new(-38.75, -38.9, FRAC_PI_2),
            start: Pose::new(0.0, 0.0, FRAC_PI_2),
            parking_type: ParkingType::Perpendicular,
            vehicle: VehicleParams::default(),
            arc_samples: 5,
        }
    }

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon<f64> {
        Polygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
        .unwrap()
    }

    fn zigzag(n: usize) -> Path<f64> {
        let amp = 10f64.to_radians();
        let prims: Vec<MotionPrimitive<f64>> = (0..n)
            .map(|i| MotionPrimitive::forward(if i % 2 == 0 { amp } else { -amp }))
            .collect();
        Path::single(Pose::new(0.0, 0.0, FRAC_PI_2), prims)
    }

    fn stddev(values: &[f64]) -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
    }

    #[test]
    fn single_primitive_unchanged() {
        let scenario = open_scenario(vec![]);
        let config = PlanConfig::default();
        let path = Path::single(
            Pose::new(0.0, 0.0, FRAC_PI_2),
            vec![MotionPrimitive::forward(0.2)],
        );
        let out = smooth(&path, &scenario, &config).unwrap();
        assert_eq!(out, path);
    }

    #[test]
    fn zigzag_in_open_space_shrinks_and_steadies() {
        let scenario = open_scenario(vec![]);
        let config = PlanConfig::default();
        let path = zigzag(20); // about 2 m ahead
        let out = smooth(&path, &scenario, &config).unwrap();
        assert!(out.primitive_count() < path.primitive_count());
        let before = stddev(&path.steer_sequence());
        let after = stddev(&out.steer_sequence());
        assert!(after < before, "steering stddev {after} !< {before}");
        assert!(after < 1e-3, "re-planned open-space pursuit is nearly straight");
        // Endpoint preserved within the planner tolerances.
        let orig_end = path.end_pose(&scenario.vehicle).unwrap();
        let new_end = out.end_pose(&scenario.vehicle).unwrap();
        assert!(new_end.position.distance(orig_end.position) <= config.tolerance_pos + 1e-12);
        assert_eq!(out.segments[0].start, path.segments[0].start);
        assert!(out.first_collision(&scenario, 5).is_none());
    }

    #[test]
    fn wall_hugging_path_stays_collision_free() {
        // A wall between the path's start and end: the straight chord
        // collides, the smoothed path must not.
        let wall = rect(-4.0, 2.0, 4.0, 3.0);
        let scenario = open_scenario(vec![wall]);
        let config = PlanConfig::default();

        // Hand-built detour around the right side of the wall.
        let mut prims = Vec::new();
        prims.extend(vec![MotionPrimitive::forward(-(30f64).to_radians()); 16]);
        prims.extend(vec![MotionPrimitive::forward(0.0); 50]);
        prims.extend(vec![MotionPrimitive::forward(30f64.to_radians()); 16]);
        prims.extend(vec![MotionPrimitive::forward(0.0); 30]);
        let path = Path::single(Pose::new(0.0, -2.0, FRAC_PI_2), prims);
        assert!(path.first_collision(&scenario, 5).is_none(), "detour must be feasible");

        // The chord from start to end crosses the wall.
        let start = path.start().unwrap();
        let end = path.end_pose(&scenario.vehicle).unwrap();
        let chord_dir = end.position - start.position;
        let chord_heading = chord_dir.y.atan2(chord_dir.x);
        let chord_len = chord_dir.norm();
        let chord_collides = (0..=100).any(|k| {
            let t = k as f64 / 100.0;
            let p = start.position + chord_dir.scale(t);
            !crate::geometry::pose_collision_free(
                Pose::new(p.x, p.y, chord_heading),
                &scenario,
            ) && t * chord_len > 0.0
        });
        assert!(chord_collides, "test scenario must make the chord collide");

        let out = smooth(&path, &scenario, &config).unwrap();
        assert!(out.first_collision(&scenario, 5).is_none());
        assert!(out.primitive_count() <= path.primitive_count());
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let wall = rect(-4.0, 2.0, 4.0, 3.0);
        let scenario = open_scenario(vec![wall]);
        let config = PlanConfig::default();
        let path = Path::single(
            Pose::new(0.0, 0.0, FRAC_PI_2),
            vec![MotionPrimitive::forward(0.0); 40],
        );
        match smooth(&path, &scenario, &config) {
            Err(Error::PathInCollision { .. }) => {}
            other => panic!("expected PathInCollision, got {other:?}"),
        }
    }

    #[test]
    fn recursion_joints_reuse_original_poses() {
        // Force splits with a wall so the direct re-plan fails at the top
        // level; every emitted segment must start at an original waypoint.
        let wall = rect(-4.0, 2.0, 4.0, 3.0);
        let scenario = open_scenario(vec![wall]);
        let config = PlanConfig::default();
        let mut prims = Vec::new();
        prims.extend(vec![MotionPrimitive::forward(-(30f64).to_radians()); 16]);
        prims.extend(vec![MotionPrimitive::forward(0.0); 50]);
        prims.extend(vec![MotionPrimitive::forward(30f64.to_radians()); 16]);
        prims.extend(vec![MotionPrimitive::forward(0.0); 30]);
        let path = Path::single(Pose::new(0.0, -2.0, FRAC_PI_2), prims);
        let waypoints = path.segments[0].poses(&scenario.vehicle);
        let out = smooth(&path, &scenario, &config).unwrap();
        for seg in &out.segments {
            assert!(
                waypoints.iter().any(|w| *w == seg.start),
                "segment anchor {:?} is not an original waypoint",
                seg.start
            );
        }
    }

    #[test]
    fn empty_and_trivial_paths_pass_through() {
        let scenario = open_scenario(vec![]);
        let config = PlanConfig::default();
        let empty = Path::single(Pose::new(0.0, 0.0, 0.0), vec![]);
        let out = smooth(&empty, &scenario, &config).unwrap();
        assert_eq!(out.primitive_count(), 0);
        assert_eq!(out.start(), empty.start());
    }
}
