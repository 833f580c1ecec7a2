//! RRT planning with the random-choice target schedule.
//!
//! Growth runs in batches of a fixed step count; only after a full batch
//! does the planner test whether the search tree has reached its target (a
//! target-tree node in model mode, the goal pose in point mode), so runs
//! always use a positive multiple of the batch size and never fewer steps
//! than one batch. Failed growth attempts still consume a step.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::geometry::{pose_collision_free, Pose};
use crate::kinematics::{config_distance, MotionPrimitive};
use crate::path::{Path, PathSegment};
use crate::pursuit::point_pursuit;
use crate::scalar::{wrap_angle, Real};
use crate::scenario::Scenario;
use crate::smoother::smooth;
use crate::target_tree::{build_target_tree, TargetTree, TreeParams};

/// What the tree grows toward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetMode {
    /// Baseline: pursue the goal pose alone.
    Point,
    /// Pursue the model-based target tree.
    ModelTree,
}

/// Planner configuration. Defaults follow the reference behavior: batches
/// of 1000 steps, a 0.5 target bias, and connection tolerances of 0.2 m and
/// 0.1 rad.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanConfig<S> {
    pub seed: u64,
    pub batch_size: usize,
    pub max_batches: usize,
    pub tolerance_pos: S,
    pub tolerance_heading: S,
    pub angle_weight: S,
    pub target_mode: TargetMode,
    /// Probability that a growth step pursues the next target node instead
    /// of a random free-space sample.
    pub target_tree_bias: f64,
    /// Drive-out length of the target-tree lines, meters.
    pub tree_length: S,
}

impl<S: Real> Default for PlanConfig<S> {
    fn default() -> Self {
        PlanConfig {
            seed: 0,
            batch_size: 1000,
            max_batches: 50,
            tolerance_pos: S::of(0.2),
            tolerance_heading: S::of(0.1),
            angle_weight: S::one(),
            target_mode: TargetMode::ModelTree,
            target_tree_bias: 0.5,
            tree_length: S::of(6.0),
        }
    }
}

impl<S: Real> PlanConfig<S> {
    pub fn validate(&self) -> Result<(), Error> {
        let ok = self.batch_size > 0
            && self.max_batches > 0
            && self.tolerance_pos > S::zero()
            && self.tolerance_heading > S::zero()
            && self.angle_weight >= S::zero()
            && (0.0..=1.0).contains(&self.target_tree_bias)
            && self.tree_length > S::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("plan configuration violates invariants"))
        }
    }

    pub fn tree_params(&self) -> TreeParams<S> {
        TreeParams { total_length: self.tree_length, ..TreeParams::default() }
    }
}

/// One node of the search tree.
#[derive(Clone, Copy, Debug)]
pub struct SearchNode<S> {
    pub pose: Pose<S>,
    pub parent: Option<usize>,
    pub primitive: Option<MotionPrimitive<S>>,
}

/// Append-only parent-linked tree rooted at the start pose. Every stored
/// edge has passed the arc collision check.
#[derive(Clone, Debug)]
pub struct SearchTree<S> {
    nodes: Vec<SearchNode<S>>,
}

impl<S: Real> SearchTree<S> {
    pub fn new(root: Pose<S>) -> Self {
        SearchTree { nodes: vec![SearchNode { pose: root, parent: None, primitive: None }] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the root
    }

    pub fn node(&self, idx: usize) -> &SearchNode<S> {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[SearchNode<S>] {
        &self.nodes
    }

    pub fn push(&mut self, parent: usize, primitive: MotionPrimitive<S>, pose: Pose<S>) -> usize {
        debug_assert!(parent < self.nodes.len());
        self.nodes.push(SearchNode { pose, parent: Some(parent), primitive: Some(primitive) });
        self.nodes.len() - 1
    }

    /// Primitives from the root to `node` in execution order.
    pub fn backtrack(&self, node: usize) -> Path<S> {
        let mut prims = Vec::new();
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            prims.push(self.nodes[cur].primitive.expect("non-root node has a primitive"));
            cur = parent;
        }
        prims.reverse();
        Path::single(self.nodes[cur].pose, prims)
    }
}

/// Index of the tree node closest to `p` under the configuration distance.
/// Ties break toward the lowest index.
pub fn nearest<S: Real>(tree: &SearchTree<S>, p: Pose<S>, angle_weight: S) -> usize {
    let mut best = 0usize;
    let mut best_d = config_distance(tree.nodes[0].pose, p, angle_weight);
    for (i, node) in tree.nodes.iter().enumerate().skip(1) {
        let d = config_distance(node.pose, p, angle_weight);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Round-robin cursor over the target node list.
#[derive(Clone, Copy, Debug, Default)]
pub struct TargetCursor {
    next: usize,
}

const MAX_SAMPLE_REJECTIONS: usize = 1000;

/// With probability `target_tree_bias`, the next target node in round-robin
/// order; otherwise a uniform free-space sample (position rejected while it
/// falls inside an obstacle, heading uniform over `[-pi, pi)`).
pub fn random_choice<S: Real, R: Rng>(
    rng: &mut R,
    node_list: &[Pose<S>],
    scenario: &Scenario<S>,
    bias: f64,
    cursor: &mut TargetCursor,
) -> Result<Pose<S>, Error> {
    debug_assert!(!node_list.is_empty(), "target node list must be nonempty");
    let r: f64 = rng.random();
    if r < bias {
        let pose = node_list[cursor.next % node_list.len()];
        cursor.next = (cursor.next + 1) % node_list.len();
        return Ok(pose);
    }
    let ws = &scenario.workspace;
    let (x0, x1) = (ws.min.x.as_f64(), ws.max.x.as_f64());
    let (y0, y1) = (ws.min.y.as_f64(), ws.max.y.as_f64());
    for _ in 0..MAX_SAMPLE_REJECTIONS {
        let x = S::of(rng.random_range(x0..x1));
        let y = S::of(rng.random_range(y0..y1));
        let p = crate::geometry::Point2::new(x, y);
        if scenario.obstacles.iter().any(|obs| obs.contains_point(p)) {
            continue;
        }
        let heading = S::of(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
        return Ok(Pose::from_parts(p, heading));
    }
    Err(Error::WorkspaceFull { rejections: MAX_SAMPLE_REJECTIONS })
}

/// One growth attempt: sample, find the nearest node, pursue. Returns the
/// new node's index, or `None` when the pursuit was blocked (the step still
/// counts).
pub fn grow_once<S: Real, R: Rng>(
    tree: &mut SearchTree<S>,
    scenario: &Scenario<S>,
    rng: &mut R,
    node_list: &[Pose<S>],
    cursor: &mut TargetCursor,
    config: &PlanConfig<S>,
) -> Result<Option<usize>, Error> {
    let sample = random_choice(rng, node_list, scenario, config.target_tree_bias, cursor)?;
    let near = nearest(tree, sample, config.angle_weight);
    match point_pursuit(tree.node(near).pose, sample, scenario, config.angle_weight) {
        Ok(result) => Ok(Some(tree.push(near, result.primitive, result.destination))),
        Err(_blocked) => Ok(None),
    }
}

/// Outcome of a successful plan.
#[derive(Clone, Debug)]
pub struct PlanResult<S> {
    pub path: Path<S>,
    pub steps_used: usize,
    pub batches: usize,
    /// Planning wall time in seconds (tree construction included).
    pub wall_time: f64,
    /// Target-tree node the search connected to (model mode only).
    pub connected_target_node: Option<usize>,
    pub rrt_tree_size: usize,
    /// Pose mismatch (position, |heading|) between the smoothed search path
    /// end and the start of the target tail (model mode) or the goal (point
    /// mode). Never hidden: the assembled path snaps by this much.
    pub junction_error: (S, S),
}

fn within_tolerance<S: Real>(a: Pose<S>, b: Pose<S>, config: &PlanConfig<S>) -> bool {
    a.position.distance(b.position) <= config.tolerance_pos
        && wrap_angle(a.heading - b.heading).abs() <= config.tolerance_heading
}

fn find_connection<S: Real>(
    tree: &SearchTree<S>,
    targets: &[(usize, Pose<S>)],
    config: &PlanConfig<S>,
) -> Option<(usize, usize)> {
    let tol = config.tolerance_pos;
    for (ri, node) in tree.nodes().iter().enumerate() {
        for &(ti, pose) in targets {
            let dx = (node.pose.position.x - pose.position.x).abs();
            if dx > tol {
                continue;
            }
            let dy = (node.pose.position.y - pose.position.y).abs();
            if dy > tol {
                continue;
            }
            if within_tolerance(node.pose, pose, config) {
                return Some((ri, ti));
            }
        }
    }
    None
}

/// Runs the full parking planner and also returns the grown search tree and
/// the target tree it steered toward; `plan` is the plain entry point.
pub fn plan_with_trees<S: Real>(
    scenario: &Scenario<S>,
    config: &PlanConfig<S>,
) -> Result<(PlanResult<S>, SearchTree<S>, Option<TargetTree<S>>), Error> {
    config.validate()?;
    let clock = Instant::now();
    if !pose_collision_free(scenario.start, scenario) {
        return Err(Error::invalid("start in collision"));
    }

    let target_tree = match config.target_mode {
        TargetMode::ModelTree => Some(build_target_tree(scenario, &config.tree_params())?),
        TargetMode::Point => None,
    };
    // (target-tree node index, pose) pairs; point mode pursues the goal.
    let targets: Vec<(usize, Pose<S>)> = match &target_tree {
        Some(tree) => tree.station_poses(),
        None => vec![(0, scenario.goal)],
    };
    let node_list: Vec<Pose<S>> = targets.iter().map(|&(_, p)| p).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cursor = TargetCursor::default();
    let mut tree = SearchTree::new(scenario.start);

    for batch in 1..=config.max_batches {
        for _ in 0..config.batch_size {
            grow_once(&mut tree, scenario, &mut rng, &node_list, &mut cursor, config)?;
        }
        if let Some((ri, ti)) = find_connection(&tree, &targets, config) {
            let steps_used = batch * config.batch_size;
            let rrt_path = tree.backtrack(ri);
            let smoothed = smooth(&rrt_path, scenario, config)?;

            let mut path = Path::empty();
            path.push_segments(&scenario.vehicle, smoothed.segments.clone());
            let (connected, junction_ref) = match &target_tree {
                Some(model) => {
                    let tail = model.backtrack(ti);
                    let tail_start = tail.start().expect("tail has a segment");
                    let mut tail_segments = Vec::new();
                    for seg in tail.segments {
                        if !seg.primitives.is_empty() {
                            tail_segments.push(seg);
                        }
                    }
                    path.push_segments(&scenario.vehicle, tail_segments);
                    (Some(ti), tail_start)
                }
                None => (None, scenario.goal),
            };
            if path.segments.is_empty() {
                // Degenerate but legal: start already at the target.
                path.segments.push(PathSegment::new(scenario.start, Vec::new()));
            }
            let smoothed_end = smoothed.end_pose(&scenario.vehicle).unwrap_or(scenario.start);
            let junction_error = (
                smoothed_end.position.distance(junction_ref.position),
                wrap_angle(smoothed_end.heading - junction_ref.heading).abs(),
            );

            let result = PlanResult {
                path,
                steps_used,
                batches: batch,
                wall_time: clock.elapsed().as_secs_f64(),
                connected_target_node: connected,
                rrt_tree_size: tree.len(),
                junction_error,
            };
            return Ok((result, tree, target_tree));
        }
    }

    let best = tree
        .nodes()
        .iter()
        .flat_map(|n| {
            targets.iter().map(move |&(_, p)| config_distance(n.pose, p, config.angle_weight))
        })
        .fold(S::infinity(), S::min);
    Err(Error::NoPathFound {
        steps: config.max_batches * config.batch_size,
        best_distance: best.as_f64(),
    })
}

/// Plans a parking path. In model mode the trajectory is the smoothed
/// search-tree path plus the exact target-tree tail; in point mode it is
/// the smoothed search-tree path alone.
pub fn plan<S: Real>(scenario: &Scenario<S>, config: &PlanConfig<S>) -> Result<PlanResult<S>, Error> {
    plan_with_trees(scenario, config).map(|(result, _, _)| result)
}
