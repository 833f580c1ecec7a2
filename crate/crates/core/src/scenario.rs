//! Scenario definition, validation and the scenario file format.
//!
//! The file format is line-oriented with named `[sections]` and `key = value`
//! entries; see `docs/formats.md` for the grammar. Angles are radians, except
//! that steering-limit fields also accept a `deg` suffix.

use crate::error::Error;
use crate::geometry::{footprint, pose_collision_free, Point2, Polygon, Pose, Workspace};
use crate::kinematics::VehicleParams;
use crate::scalar::{wrap_angle, Real};

/// The three parking geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParkingType {
    Perpendicular,
    Parallel,
    Echelon,
}

impl ParkingType {
    pub fn as_str(self) -> &'static str {
        match self {
            ParkingType::Perpendicular => "perpendicular",
            ParkingType::Parallel => "parallel",
            ParkingType::Echelon => "echelon",
        }
    }
}

impl std::str::FromStr for ParkingType {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "perpendicular" => Ok(ParkingType::Perpendicular),
            "parallel" => Ok(ParkingType::Parallel),
            "echelon" => Ok(ParkingType::Echelon),
            _ => Err(()),
        }
    }
}

/// A rectangular parking slot.
///
/// `corner` sits on the open edge with its heading pointing into the slot
/// along the depth axis; the width extends to the left of that heading. The
/// open edge is therefore the width edge through `corner`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slot<S> {
    pub corner: Pose<S>,
    pub depth: S,
    pub width: S,
}

impl<S: Real> Slot<S> {
    /// Unit vector from the open edge into the slot.
    pub fn depth_axis(&self) -> Point2<S> {
        self.corner.forward()
    }

    /// Unit vector along the open edge.
    pub fn width_axis(&self) -> Point2<S> {
        self.depth_axis().perp()
    }

    /// Unit normal of the open edge pointing out of the slot.
    pub fn outward_normal(&self) -> Point2<S> {
        -self.depth_axis()
    }

    pub fn polygon(&self) -> Polygon<S> {
        let c = self.corner.position;
        let u = self.depth_axis().scale(self.depth);
        let w = self.width_axis().scale(self.width);
        Polygon::new(vec![c, c + u, c + u + w, c + w]).expect("slot rectangle is a valid polygon")
    }

    /// Signed distance of a point past the open edge (positive outside).
    pub fn outside_offset(&self, p: Point2<S>) -> S {
        (p - self.corner.position).dot(self.outward_normal())
    }

    pub fn cast<T: Real>(&self) -> Slot<T> {
        Slot { corner: self.corner.cast(), depth: T::of(self.depth.as_f64()), width: T::of(self.width.as_f64()) }
    }
}

/// A full planning problem: bounds, obstacles, slot, endpoints and vehicle.
///
/// Obstacles are stored as convex parts; concave input polygons are
/// decomposed at load time.
#[derive(Clone, Debug)]
pub struct Scenario<S> {
    pub workspace: Workspace<S>,
    pub obstacles: Vec<Polygon<S>>,
    pub slot: Slot<S>,
    pub goal: Pose<S>,
    pub start: Pose<S>,
    pub parking_type: ParkingType,
    pub vehicle: VehicleParams<S>,
    /// Poses checked along each 0.1 m primitive arc (default 5, one per
    /// 0.02 m). Settable from the scenario file.
    pub arc_samples: usize,
}

/// Default arc collision-sampling count per primitive.
pub const DEFAULT_ARC_SAMPLES: usize = 5;

impl<S: Real> Scenario<S> {
    /// Builds a scenario from raw (possibly concave) obstacle polygons and
    /// runs all validation checks.
    pub fn new(
        workspace: Workspace<S>,
        raw_obstacles: Vec<Polygon<S>>,
        slot: Slot<S>,
        goal: Pose<S>,
        start: Pose<S>,
        parking_type: ParkingType,
        vehicle: VehicleParams<S>,
    ) -> Result<Self, Error> {
        let mut obstacles = Vec::new();
        for poly in raw_obstacles {
            obstacles.extend(poly.decompose_convex()?);
        }
        let scenario = Scenario {
            workspace,
            obstacles,
            slot,
            goal,
            start,
            parking_type,
            vehicle,
            arc_samples: DEFAULT_ARC_SAMPLES,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.workspace.min.x < self.workspace.max.x && self.workspace.min.y < self.workspace.max.y) {
            return Err(Error::invalid("degenerate workspace"));
        }
        self.vehicle.validate()?;
        if !(self.slot.depth > S::zero() && self.slot.width > S::zero()) {
            return Err(Error::invalid("degenerate slot"));
        }
        if !pose_collision_free(self.start, self) {
            return Err(Error::invalid("start in collision"));
        }
        if !pose_collision_free(self.goal, self) {
            return Err(Error::invalid("goal in collision"));
        }
        let slot_poly = self.slot.polygon();
        let goal_fp = footprint(self.goal, &self.vehicle);
        if !goal_fp.corners().iter().all(|&c| slot_poly.contains_point(c)) {
            return Err(Error::invalid("goal footprint outside slot"));
        }
        self.check_type_consistency()?;
        Ok(())
    }

    /// Goal heading must be perpendicular / parallel / oblique to the slot's
    /// open edge, within one degree, matching the declared parking type.
    fn check_type_consistency(&self) -> Result<(), Error> {
        let edge = self.slot.width_axis();
        let edge_angle = edge.y.atan2(edge.x);
        let rel = wrap_angle(self.goal.heading - edge_angle).abs();
        // Fold into [0, pi/2]: angle between undirected lines.
        let folded = if rel > S::FRAC_PI_2() { S::PI() - rel } else { rel };
        let one_deg = S::of(1.0).to_radians();
        let ok = match self.parking_type {
            ParkingType::Parallel => folded <= one_deg,
            ParkingType::Perpendicular => (folded - S::FRAC_PI_2()).abs() <= one_deg,
            ParkingType::Echelon => folded > one_deg && (folded - S::FRAC_PI_2()).abs() > one_deg,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "goal heading inconsistent with {} slot geometry",
                self.parking_type.as_str()
            )))
        }
    }

    pub fn cast<T: Real>(&self) -> Scenario<T> {
        Scenario {
            workspace: self.workspace.cast(),
            obstacles: self.obstacles.iter().map(|p| p.cast()).collect(),
            slot: self.slot.cast(),
            goal: self.goal.cast(),
            start: self.start.cast(),
            parking_type: self.parking_type,
            vehicle: self.vehicle.cast(),
            arc_samples: self.arc_samples,
        }
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Default)]
struct RawScenario {
    parking_type: Option<ParkingType>,
    arc_samples: Option<usize>,
    ws_min: Option<Point2<f64>>,
    ws_max: Option<Point2<f64>>,
    vehicle: VehicleParams<f64>,
    slot_corner: Option<Pose<f64>>,
    slot_depth: Option<f64>,
    slot_width: Option<f64>,
    start: Option<Pose<f64>>,
    goal: Option<Pose<f64>>,
    obstacles: Vec<Polygon<f64>>,
}

fn parse_floats(line: usize, value: &str, expect: usize) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if expect > 0 && parts.len() != expect {
        return Err(Error::parse(line, format!("expected {expect} numbers, found {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| Error::parse(line, format!("bad number `{p}`"))))
        .collect()
}

/// Plain radians, or degrees with a `deg` suffix.
fn parse_angle(line: usize, value: &str) -> Result<f64, Error> {
    let v = value.trim();
    if let Some(stripped) = v.strip_suffix("deg") {
        let d: f64 = stripped
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad angle `{v}`")))?;
        Ok(d.to_radians())
    } else {
        v.parse().map_err(|_| Error::parse(line, format!("bad angle `{v}`")))
    }
}

fn parse_pose(line: usize, value: &str) -> Result<Pose<f64>, Error> {
    let v = parse_floats(line, value, 3)?;
    if !(v[0].is_finite() && v[1].is_finite() && v[2].is_finite()) {
        return Err(Error::parse(line, "pose fields must be finite"));
    }
    Ok(Pose::new(v[0], v[1], v[2]))
}

/// Parses and validates a scenario file.
pub fn load_scenario(text: &str) -> Result<Scenario<f64>, Error> {
    let mut raw = RawScenario::default();
    raw.vehicle = VehicleParams::default();
    let mut section = String::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line_no, "unterminated section header"))?
                .trim();
            match name {
                "scenario" | "workspace" | "vehicle" | "slot" | "start" | "goal" | "obstacles" => {
                    section = name.to_string();
                }
                other => return Err(Error::parse(line_no, format!("unknown section `[{other}]`"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::parse(line_no, "expected `key = value`"))?;

        match (section.as_str(), key) {
            ("scenario", "type") => {
                raw.parking_type = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("unknown parking type `{value}`")))?,
                );
            }
            ("scenario", "arc_samples") => {
                let n: usize = value
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad sample count `{value}`")))?;
                if n == 0 {
                    return Err(Error::parse(line_no, "arc_samples must be at least 1"));
                }
                raw.arc_samples = Some(n);
            }
            ("workspace", "min") => {
                let v = parse_floats(line_no, value, 2)?;
                raw.ws_min = Some(Point2::new(v[0], v[1]));
            }
            ("workspace", "max") => {
                let v = parse_floats(line_no, value, 2)?;
                raw.ws_max = Some(Point2::new(v[0], v[1]));
            }
            ("vehicle", "wheelbase") => raw.vehicle.wheelbase = parse_floats(line_no, value, 1)?[0],
            ("vehicle", "body_length") => raw.vehicle.body_length = parse_floats(line_no, value, 1)?[0],
            ("vehicle", "body_width") => raw.vehicle.body_width = parse_floats(line_no, value, 1)?[0],
            ("vehicle", "rear_overhang") => raw.vehicle.rear_overhang = parse_floats(line_no, value, 1)?[0],
            ("vehicle", "track_width") => raw.vehicle.track_width = parse_floats(line_no, value, 1)?[0],
            ("vehicle", "max_steer") => raw.vehicle.max_steer = parse_angle(line_no, value)?,
            ("slot", "corner") => raw.slot_corner = Some(parse_pose(line_no, value)?),
            ("slot", "depth") => raw.slot_depth = Some(parse_floats(line_no, value, 1)?[0]),
            ("slot", "width") => raw.slot_width = Some(parse_floats(line_no, value, 1)?[0]),
            ("start", "pose") => raw.start = Some(parse_pose(line_no, value)?),
            ("goal", "pose") => raw.goal = Some(parse_pose(line_no, value)?),
            ("obstacles", "poly") => {
                let v = parse_floats(line_no, value, 0)?;
                if v.len() < 6 || v.len() % 2 != 0 {
                    return Err(Error::parse(line_no, "polygon needs at least 3 x-y pairs"));
                }
                let pts: Vec<Point2<f64>> =
                    v.chunks(2).map(|c| Point2::new(c[0], c[1])).collect();
                let poly = Polygon::new(pts)
                    .map_err(|e| Error::parse(line_no, format!("invalid obstacle polygon: {e}")))?;
                raw.obstacles.push(poly);
            }
            ("", _) => return Err(Error::parse(line_no, "entry before any [section] header")),
            (sec, k) => {
                return Err(Error::parse(line_no, format!("unknown key `{k}` in section `[{sec}]`")))
            }
        }
    }

    let parking_type =
        raw.parking_type.ok_or_else(|| Error::invalid("missing [scenario] type"))?;
    let ws_min = raw.ws_min.ok_or_else(|| Error::invalid("missing workspace min"))?;
    let ws_max = raw.ws_max.ok_or_else(|| Error::invalid("missing workspace max"))?;
    let workspace = Workspace::new(ws_min, ws_max)?;
    let slot = Slot {
        corner: raw.slot_corner.ok_or_else(|| Error::invalid("missing slot corner"))?,
        depth: raw.slot_depth.ok_or_else(|| Error::invalid("missing slot depth"))?,
        width: raw.slot_width.ok_or_else(|| Error::invalid("missing slot width"))?,
    };
    let start = raw.start.ok_or_else(|| Error::invalid("missing start pose"))?;
    let goal = raw.goal.ok_or_else(|| Error::invalid("missing goal pose"))?;

    let mut scenario =
        Scenario::new(workspace, raw.obstacles, slot, goal, start, parking_type, raw.vehicle)?;
    if let Some(n) = raw.arc_samples {
        scenario.arc_samples = n;
    }
    Ok(scenario)
}

/// Serializes a scenario in the same format `load_scenario` reads.
/// Numbers use the shortest exact decimal form, so a round trip preserves
/// geometry bit-for-bit.
pub fn write_scenario(s: &Scenario<f64>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "[scenario]").unwrap();
    writeln!(out, "type = {}", s.parking_type.as_str()).unwrap();
    if s.arc_samples != DEFAULT_ARC_SAMPLES {
        writeln!(out, "arc_samples = {}", s.arc_samples).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[workspace]").unwrap();
    writeln!(out, "min = {} {}", s.workspace.min.x, s.workspace.min.y).unwrap();
    writeln!(out, "max = {} {}", s.workspace.max.x, s.workspace.max.y).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[vehicle]").unwrap();
    writeln!(out, "wheelbase = {}", s.vehicle.wheelbase).unwrap();
    writeln!(out, "body_length = {}", s.vehicle.body_length).unwrap();
    writeln!(out, "body_width = {}", s.vehicle.body_width).unwrap();
    writeln!(out, "rear_overhang = {}", s.vehicle.rear_overhang).unwrap();
    writeln!(out, "max_steer = {}", s.vehicle.max_steer).unwrap();
    writeln!(out, "track_width = {}", s.vehicle.track_width).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[slot]").unwrap();
    writeln!(
        out,
        "corner = {} {} {}",
        s.slot.corner.position.x, s.slot.corner.position.y, s.slot.corner.heading
    )
    .unwrap();
    writeln!(out, "depth = {}", s.slot.depth).unwrap();
    writeln!(out, "width = {}", s.slot.width).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[start]").unwrap();
    writeln!(out, "pose = {} {} {}", s.start.position.x, s.start.position.y, s.start.heading).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[goal]").unwrap();
    writeln!(out, "pose = {} {} {}", s.goal.position.x, s.goal.position.y, s.goal.heading).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[obstacles]").unwrap();
    for poly in &s.obstacles {
        let coords: Vec<String> =
            poly.vertices().iter().flat_map(|v| [v.x.to_string(), v.y.to_string()]).collect();
        writeln!(out, "poly = {}", coords.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_perpendicular() -> String {
        // Slot open toward +y, goal parked nose-out (heading +y).
        "
[scenario]
type = perpendicular

[workspace]
min = -2 -2
max = 16 12

[slot]
corner = 6 5.3 -1.5707963267948966
depth = 5.3
width = 2.5

[start]
pose = 2 7.5 0

[goal]
pose = 7.25 1.1 1.5707963267948966

[obstacles]
poly = -1 -1 15 -1 15 0 -1 0
"
        .to_string()
    }

    #[test]
    fn loads_minimal_scenario() {
        let s = load_scenario(&minimal_perpendicular()).unwrap();
        assert_eq!(s.parking_type, ParkingType::Perpendicular);
        assert_eq!(s.obstacles.len(), 1);
        assert!((s.vehicle.wheelbase - 2.7).abs() < 1e-12);
    }

    #[test]
    fn goal_in_collision_is_named() {
        let text = minimal_perpendicular()
            .replace("pose = 7.25 1.1 1.5707963267948966", "pose = 7.25 -0.5 1.5707963267948966");
        match load_scenario(&text) {
            Err(Error::InvalidScenario(msg)) => assert!(msg.contains("goal in collision"), "{msg}"),
            other => panic!("expected InvalidScenario, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_workspace_is_named() {
        let text = minimal_perpendicular().replace("max = 16 12", "max = -2 12");
        match load_scenario(&text) {
            Err(Error::InvalidScenario(msg)) => {
                assert!(msg.contains("degenerate workspace"), "{msg}")
            }
            other => panic!("expected InvalidScenario, got {other:?}"),
        }
    }

    #[test]
    fn goal_outside_slot_is_named() {
        let text = minimal_perpendicular()
            .replace("pose = 7.25 1.1 1.5707963267948966", "pose = 7.25 4.0 1.5707963267948966");
        match load_scenario(&text) {
            Err(Error::InvalidScenario(msg)) => {
                assert!(msg.contains("goal footprint outside slot"), "{msg}")
            }
            other => panic!("expected InvalidScenario, got {other:?}"),
        }
    }

    #[test]
    fn type_mismatch_is_named() {
        let text = minimal_perpendicular().replace("type = perpendicular", "type = parallel");
        match load_scenario(&text) {
            Err(Error::InvalidScenario(msg)) => assert!(msg.contains("inconsistent"), "{msg}"),
            other => panic!("expected InvalidScenario, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "[scenario]\ntype = perpendicular\nnot a key value line\n";
        match load_scenario(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected Parse error, got {other:?}"),
        }
        match load_scenario("[workspace]\nmin = 0 zero\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_preserves_geometry() {
        let s = load_scenario(&minimal_perpendicular()).unwrap();
        let s2 = load_scenario(&write_scenario(&s)).unwrap();
        assert_eq!(s.workspace, s2.workspace);
        assert_eq!(s.slot, s2.slot);
        assert_eq!(s.start, s2.start);
        assert_eq!(s.goal, s2.goal);
        assert_eq!(s.vehicle, s2.vehicle);
        assert_eq!(s.obstacles.len(), s2.obstacles.len());
        for (a, b) in s.obstacles.iter().zip(&s2.obstacles) {
            assert_eq!(a.vertices(), b.vertices());
        }
    }

    #[test]
    fn deg_suffix_on_steering_limit() {
        let text = minimal_perpendicular().replace(
            "[start]",
            "[vehicle]\nmax_steer = 25deg\n\n[start]",
        );
        let s = load_scenario(&text).unwrap();
        assert!((s.vehicle.max_steer - 25f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn slot_geometry_helpers() {
        let s = load_scenario(&minimal_perpendicular()).unwrap();
        // Depth axis points into the slot (downward here).
        assert!((s.slot.depth_axis().y - (-1.0)).abs() < 1e-9);
        let poly = s.slot.polygon();
        assert!(poly.signed_area() > 0.0);
        assert!((poly.signed_area() - 5.3 * 2.5).abs() < 1e-9);
        assert!(poly.contains_point(Point2::new(7.0, 3.0)));
        // Outside offset is positive above the open edge.
        assert!(s.slot.outside_offset(Point2::new(7.0, 6.0)) > 0.0);
        assert!(s.slot.outside_offset(Point2::new(7.0, 4.0)) < 0.0);
    }
}
