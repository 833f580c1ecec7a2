//! Model-based target trees: drive-out maneuvers simulated from the parked
//! goal pose, recorded as station nodes and reversed into exact parking-in
//! chains.
//!
//! Per scenario type the model produces a fixed line set:
//! - perpendicular: straight exit then a constant steer, one line per angle
//!   from -30 to 30 degrees in 2-degree steps (31 lines, 620 nodes);
//! - parallel: reverse to the rear clearance, pull out at full lock until
//!   the body is clear of the open edge, then fan over the same 31 angles,
//!   doubled for the two in-slot facing directions (62 lines, 1240 nodes);
//! - echelon: like perpendicular but fully backward with non-negative
//!   angles only (16 lines, 320 nodes).
//!
//! Each line is `total_length` long, built from fixed 0.1 m primitives, and
//! carries `stations_per_line` evenly spaced nodes. Every primitive arc is
//! collision-checked during construction, so reversing a chain yields a
//! collision-free parking-in path ending exactly at its root pose.

use crate::error::Error;
use crate::geometry::{pose_collision_free, Pose};
use crate::kinematics::{
    integrate, integrate_arc, Direction, MotionPrimitive, STEP_LENGTH_M,
};
use crate::path::Path;
use crate::scalar::Real;
use crate::scenario::{ParkingType, Scenario};

/// Tuning knobs of the tree builders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams<S> {
    /// Drive-out length of every line, meters. Must split into whole
    /// primitives per station.
    pub total_length: S,
    pub stations_per_line: usize,
    /// Angular spacing of the fixed-steer line set, degrees.
    pub steer_step_deg: f64,
    /// Gap kept between the rear bumper and the slot boundary while
    /// reversing in the parallel model, meters.
    pub rear_clearance: S,
}

impl<S: Real> Default for TreeParams<S> {
    fn default() -> Self {
        TreeParams {
            total_length: S::of(6.0),
            stations_per_line: 20,
            steer_step_deg: 2.0,
            rear_clearance: S::of(0.1),
        }
    }
}

impl<S: Real> TreeParams<S> {
    /// Primitives per line and per station gap.
    fn line_layout(&self) -> Result<(usize, usize), Error> {
        let step = S::of(STEP_LENGTH_M);
        let n = (self.total_length / step).round().as_f64() as usize;
        if n == 0 || (S::of_usize(n) * step - self.total_length).abs() > S::of(1e-9) {
            return Err(Error::invalid("tree line length must be a multiple of the 0.1 m step"));
        }
        if self.stations_per_line == 0 || n % self.stations_per_line != 0 {
            return Err(Error::invalid(
                "tree line length must split into whole primitives per station",
            ));
        }
        Ok((n, n / self.stations_per_line))
    }

    /// Fixed steer angles from `-limit` to `limit` in `steer_step_deg` steps.
    fn fan_angles(&self, limit: S, non_negative: bool) -> Vec<S> {
        let step = S::of(self.steer_step_deg).to_radians();
        let halves = (limit / step + S::of(1e-9)).floor().as_f64() as i64;
        let lo = if non_negative { 0 } else { -halves };
        (lo..=halves).map(|k| step * S::of(k as f64)).collect()
    }
}

/// One station of the target tree. Root entries have no parent and no
/// primitives; every other node stores the primitive run (in drive-out
/// order) leading from its parent to itself.
#[derive(Clone, Debug)]
pub struct TargetNode<S> {
    pub pose: Pose<S>,
    pub parent: Option<usize>,
    pub primitives: Vec<MotionPrimitive<S>>,
}

/// The model-based target tree.
#[derive(Clone, Debug)]
pub struct TargetTree<S> {
    pub nodes: Vec<TargetNode<S>>,
    /// Indices of root entries. One root in general; the parallel model adds
    /// a second root at the opposite-facing goal pose.
    pub roots: Vec<usize>,
    pub line_count: usize,
    pub nodes_per_line: usize,
}

impl<S: Real> TargetTree<S> {
    fn new() -> Self {
        TargetTree { nodes: Vec::new(), roots: Vec::new(), line_count: 0, nodes_per_line: 0 }
    }

    fn push_root(&mut self, pose: Pose<S>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(TargetNode { pose, parent: None, primitives: Vec::new() });
        self.roots.push(idx);
        idx
    }

    pub fn is_root(&self, idx: usize) -> bool {
        self.nodes[idx].parent.is_none()
    }

    /// Station count, roots excluded: the paper's 620 / 1240 / 320.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - self.roots.len()
    }

    /// Station poses with their node indices, in construction order. This is
    /// the node list handed to the planner's random choice and connection
    /// test.
    pub fn station_poses(&self) -> Vec<(usize, Pose<S>)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parent.is_some())
            .map(|(i, n)| (i, n.pose))
            .collect()
    }

    /// The parking-in path from a node to its root: the drive-out primitives
    /// in reverse order with directions flipped. The root itself yields an
    /// empty path.
    pub fn backtrack(&self, node: usize) -> Path<S> {
        let mut prims = Vec::new();
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            prims.extend(self.nodes[cur].primitives.iter().rev().map(|p| p.flipped()));
            cur = parent;
        }
        Path::single(self.nodes[node].pose, prims)
    }

    /// Root pose a node's parking-in path ends at.
    pub fn root_pose_of(&self, node: usize) -> Pose<S> {
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            cur = parent;
        }
        self.nodes[cur].pose
    }

    /// Replays each line outward from its root at primitive resolution;
    /// used by the renderer.
    pub fn line_polylines(&self, scenario: &Scenario<S>) -> Vec<Vec<Pose<S>>> {
        let mut lines = Vec::new();
        for (idx, node) in self.nodes.iter().enumerate() {
            let is_leaf = !self.nodes.iter().any(|n| n.parent == Some(idx));
            if node.parent.is_none() || !is_leaf {
                continue;
            }
            // Walk up to the root collecting the drive-out primitive run.
            let mut chain = Vec::new();
            let mut cur = idx;
            while let Some(parent) = self.nodes[cur].parent {
                chain.push(cur);
                cur = parent;
            }
            chain.reverse();
            let mut poses = vec![self.nodes[cur].pose];
            let mut pose = self.nodes[cur].pose;
            for &n in &chain {
                for prim in &self.nodes[n].primitives {
                    pose = integrate(pose, *prim, &scenario.vehicle);
                    poses.push(pose);
                }
            }
            lines.push(poses);
        }
        lines
    }
}

/// See [`TargetTree::backtrack`]; free-function form.
pub fn backtrack_target<S: Real>(tree: &TargetTree<S>, node: usize) -> Path<S> {
    tree.backtrack(node)
}

/// Builds the target tree for the scenario's parking type.
pub fn build_target_tree<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
) -> Result<TargetTree<S>, Error> {
    if !pose_collision_free(scenario.goal, scenario) {
        return Err(Error::invalid("goal in collision"));
    }
    match scenario.parking_type {
        ParkingType::Perpendicular => build_perpendicular(scenario, params),
        ParkingType::Parallel => build_parallel(scenario, params),
        ParkingType::Echelon => build_echelon(scenario, params),
    }
}

/// Straight exit of minimal length, then a constant steer; forward all the
/// way. One line per angle in `[-phi_max, phi_max]`.
pub fn build_perpendicular<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
) -> Result<TargetTree<S>, Error> {
    build_straight_then_arc(scenario, params, Direction::Forward, false)
}

/// Like perpendicular, but every primitive is backward and only the
/// non-negative angles are used.
pub fn build_echelon<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
) -> Result<TargetTree<S>, Error> {
    build_straight_then_arc(scenario, params, Direction::Backward, true)
}

fn build_straight_then_arc<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
    direction: Direction,
    non_negative: bool,
) -> Result<TargetTree<S>, Error> {
    let (n_prims, per_station) = params.line_layout()?;
    let angles = params.fan_angles(scenario.vehicle.max_steer, non_negative);
    let mut tree = TargetTree::new();
    let root = tree.push_root(scenario.goal);

    // Straight-phase search bound: the slot depth, in whole primitives.
    let max_straight =
        ((scenario.slot.depth / S::of(STEP_LENGTH_M)).floor().as_f64() as usize).min(n_prims);

    for &phi in &angles {
        let mut found = false;
        for k0 in 0..=max_straight {
            let mut prims = vec![MotionPrimitive::new(direction, S::zero()); k0];
            prims.resize(n_prims, MotionPrimitive::new(direction, phi));
            if line_is_free(scenario.goal, &prims, scenario) {
                add_line(&mut tree, root, scenario, &prims, per_station);
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::ModelInfeasible { steer_deg: phi.as_f64().to_degrees() });
        }
    }
    tree.line_count = angles.len();
    tree.nodes_per_line = params.stations_per_line;
    debug_assert_eq!(tree.node_count(), tree.line_count * tree.nodes_per_line);
    Ok(tree)
}

/// The parallel model. For each of the two in-slot facing directions:
/// reverse straight to the rear clearance, pull out at full lock until the
/// footprint center has crossed the open edge by half the body length, then
/// fan over the fixed angles out to the full line length. The second facing
/// is the mirrored maneuver from the opposite-facing goal pose.
pub fn build_parallel<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
) -> Result<TargetTree<S>, Error> {
    let (n_prims, per_station) = params.line_layout()?;
    let angles = params.fan_angles(scenario.vehicle.max_steer, false);
    let vehicle = &scenario.vehicle;
    let mut tree = TargetTree::new();

    let half = S::of(0.5);
    let axle_to_center = vehicle.body_length * half - vehicle.rear_overhang;
    let flipped_goal = Pose::from_parts(
        scenario.goal.position + scenario.goal.forward().scale(axle_to_center + axle_to_center),
        scenario.goal.heading + S::PI(),
    );

    for root_pose in [scenario.goal, flipped_goal] {
        let root = tree.push_root(root_pose);
        let trunk = parallel_trunk(scenario, params, root_pose, n_prims)?;
        for &phi in &angles {
            let mut prims = trunk.clone();
            prims.resize(n_prims, MotionPrimitive::forward(phi));
            if !line_is_free(root_pose, &prims, scenario) {
                return Err(Error::ModelInfeasible { steer_deg: phi.as_f64().to_degrees() });
            }
            add_line(&mut tree, root, scenario, &prims, per_station);
        }
    }
    tree.line_count = 2 * angles.len();
    tree.nodes_per_line = params.stations_per_line;
    debug_assert_eq!(tree.node_count(), tree.line_count * tree.nodes_per_line);
    Ok(tree)
}

/// Phases 1 and 2 of a parallel drive-out line, shared by that facing's fan.
fn parallel_trunk<S: Real>(
    scenario: &Scenario<S>,
    params: &TreeParams<S>,
    root: Pose<S>,
    n_prims: usize,
) -> Result<Vec<MotionPrimitive<S>>, Error> {
    let vehicle = &scenario.vehicle;
    let slot = &scenario.slot;
    let slot_poly = slot.polygon();
    let phi_max = vehicle.max_steer;
    let half = S::of(0.5);

    // Full-lock steer sign that swings the exit toward the open edge.
    let out = slot.outward_normal();
    let side = out.dot(root.forward().perp());
    let steer = if side >= S::zero() { phi_max } else { -phi_max };

    let mut prims: Vec<MotionPrimitive<S>> = Vec::new();
    let mut pose = root;

    // Phase 1: reverse straight while the rear bumper keeps the clearance
    // to the slot boundary.
    let back = MotionPrimitive::backward(S::zero());
    loop {
        if prims.len() >= n_prims {
            return Err(Error::ModelInfeasible { steer_deg: 0.0 });
        }
        let next = integrate(pose, back, vehicle);
        let rear_bumper = next.position - next.forward().scale(vehicle.rear_overhang);
        let gap = slot_poly.ray_exit_distance(rear_bumper, -next.forward());
        if gap < params.rear_clearance
            || !crate::geometry::arc_collision_free(pose, back, scenario, scenario.arc_samples)
        {
            break;
        }
        prims.push(back);
        pose = next;
    }

    // Phase 2: pull out forward at full lock until the footprint center has
    // crossed the open edge by half the body length.
    let pull = MotionPrimitive::forward(steer);
    loop {
        let center = crate::geometry::footprint(pose, vehicle).center;
        if slot.outside_offset(center) >= vehicle.body_length * half {
            break;
        }
        if prims.len() >= n_prims
            || !crate::geometry::arc_collision_free(pose, pull, scenario, scenario.arc_samples)
        {
            return Err(Error::ModelInfeasible { steer_deg: steer.as_f64().to_degrees() });
        }
        prims.push(pull);
        pose = integrate(pose, pull, vehicle);
    }
    if prims.len() >= n_prims {
        // No room left for the fan phase.
        return Err(Error::ModelInfeasible { steer_deg: steer.as_f64().to_degrees() });
    }
    Ok(prims)
}

fn line_is_free<S: Real>(
    root: Pose<S>,
    prims: &[MotionPrimitive<S>],
    scenario: &Scenario<S>,
) -> bool {
    let mut pose = root;
    for &prim in prims {
        if !crate::geometry::arc_collision_free(pose, prim, scenario, scenario.arc_samples) {
            return false;
        }
        pose = integrate(pose, prim, &scenario.vehicle);
    }
    true
}

fn add_line<S: Real>(
    tree: &mut TargetTree<S>,
    root: usize,
    scenario: &Scenario<S>,
    prims: &[MotionPrimitive<S>],
    per_station: usize,
) {
    let mut pose = tree.nodes[root].pose;
    let mut parent = root;
    for chunk in prims.chunks(per_station) {
        for &prim in chunk {
            pose = integrate(pose, prim, &scenario.vehicle);
        }
        let idx = tree.nodes.len();
        tree.nodes.push(TargetNode { pose, parent: Some(parent), primitives: chunk.to_vec() });
        parent = idx;
    }
}

/// Smallest straight-segment length, in 0.05 m increments from zero, such
/// that the subsequent constant-angle arc out to the full drive-out length
/// is collision-free. Checked on the continuous line at 0.02 m resolution.
///
/// Only meaningful for the straight-then-arc models (perpendicular drives
/// out forward, echelon backward).
pub fn min_straight_extension<S: Real>(scenario: &Scenario<S>, fixed_angle: S) -> Result<S, Error> {
    let direction = match scenario.parking_type {
        ParkingType::Perpendicular => Direction::Forward,
        ParkingType::Echelon => Direction::Backward,
        ParkingType::Parallel => {
            return Err(Error::invalid("straight extension applies to straight-then-arc models"))
        }
    };
    if fixed_angle.abs() > scenario.vehicle.max_steer + S::of(1e-12) {
        return Err(Error::invalid("fixed angle exceeds the steering limit"));
    }
    let params: TreeParams<S> = TreeParams::default();
    let total = params.total_length;
    let increment = S::of(0.05);
    let mut k = 0usize;
    loop {
        let s0 = increment * S::of_usize(k);
        if s0 > scenario.slot.depth {
            return Err(Error::ModelInfeasible { steer_deg: fixed_angle.as_f64().to_degrees() });
        }
        if continuous_line_is_free(scenario, direction, fixed_angle, s0, total) {
            return Ok(s0);
        }
        k += 1;
    }
}

/// Collision test of the continuous straight-then-arc line at 0.02 m
/// resolution (the same spacing the primitive arc sampling uses).
fn continuous_line_is_free<S: Real>(
    scenario: &Scenario<S>,
    direction: Direction,
    steer: S,
    straight_len: S,
    total: S,
) -> bool {
    let resolution = S::of(0.02);
    let n = (total / resolution).ceil().as_f64() as usize;
    let switch = integrate_arc(scenario.goal, direction, S::zero(), straight_len, &scenario.vehicle);
    for k in 1..=n {
        let t = (total * S::of_usize(k) / S::of_usize(n)).min(total);
        let pose = if t <= straight_len {
            integrate_arc(scenario.goal, direction, S::zero(), t, &scenario.vehicle)
        } else {
            integrate_arc(switch, direction, steer, t - straight_len, &scenario.vehicle)
        };
        if !pose_collision_free(pose, scenario) {
            return false;
        }
    }
    true
}
