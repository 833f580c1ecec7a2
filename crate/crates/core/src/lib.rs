//! Nonholonomic parking-path planner.
//!
//! The planner grows a rapidly-exploring random tree of fixed-length
//! Ackermann arc primitives from the start pose. Instead of steering toward
//! a single goal point, it steers toward a model-generated *target tree*:
//! drive-out maneuvers simulated from the parked goal pose and reversed into
//! exact parking-in entry chains. Once the search tree touches any target
//! node, the trajectory is assembled and the searched part is smoothed by a
//! divide-and-conquer re-planner that only ever emits kinematically legal,
//! collision-checked primitives.
//!
//! The core is generic over the floating-point scalar (`f32` or `f64`, see
//! [`scalar::Real`]); the file formats and the CLI use the `f64` aliases
//! exported below.

pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod path;
pub mod path_io;
pub mod planner;
pub mod pursuit;
pub mod render;
pub mod scalar;
pub mod scenario;
pub mod smoother;
pub mod target_tree;

pub use error::{Blocked, Error};
pub use scalar::Real;

/// `f64` instantiations of the generic core types, as used by the scenario
/// and path file formats and the CLI.
pub type Point2D = geometry::Point2<f64>;
pub type PoseD = geometry::Pose<f64>;
pub type OrientedBoxD = geometry::OrientedBox<f64>;
pub type PolygonD = geometry::Polygon<f64>;
pub type WorkspaceD = geometry::Workspace<f64>;
pub type VehicleParamsD = kinematics::VehicleParams<f64>;
pub type MotionPrimitiveD = kinematics::MotionPrimitive<f64>;
pub type PathD = path::Path<f64>;
pub type PathSegmentD = path::PathSegment<f64>;
pub type ScenarioD = scenario::Scenario<f64>;
pub type SlotD = scenario::Slot<f64>;
pub type TargetTreeD = target_tree::TargetTree<f64>;
pub type SearchTreeD = planner::SearchTree<f64>;
pub type PlanConfigD = planner::PlanConfig<f64>;
pub type PlanResultD = planner::PlanResult<f64>;
pub type PathRecordD = path_io::PathRecord<f64>;
