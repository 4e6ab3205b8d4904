//! Points, closed polygonal curves, multi-component links, and the
//! primitive distance and rigid-motion operations everything else builds on.
//!
//! All geometry lives in and around the unit cube. Points may drift
//! slightly outside it (jittered probe curves, transformed inputs) but are
//! capped to [`POINT_MIN`, `POINT_MAX`] per coordinate so downstream grid
//! lookups stay well defined.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lowest coordinate value a point may take.
pub const POINT_MIN: f64 = -0.1;
/// Highest coordinate value a point may take.
pub const POINT_MAX: f64 = 1.1;

/// Distance tolerance for coincidence and self-intersection tests.
pub const DIST_TOL: f64 = 1e-9;

/// Segments shorter than this are rejected as degenerate.
pub const MIN_SEGMENT_LEN: f64 = 1e-9;

/// Segment count required of generated circles; fewer makes the polygon a
/// poor stand-in for the round curve.
pub const MIN_CIRCLE_SEGMENTS: usize = 12;

/// Segment count used by the canonical configurations.
pub const CANONICAL_SEGMENTS: usize = 48;

/// Radius cap for [`canonical_hopf`]; a pair of radius-0.3 circles is the
/// largest that still sits comfortably inside the unit cube.
pub const CANONICAL_MAX_RADIUS: f64 = 0.3;

const CUBE_CENTER: [f64; 3] = [0.5, 0.5, 0.5];

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point coordinate {coord} outside [-0.1, 1.1]")]
    PointOutOfRange { coord: f64 },
    #[error("point has a non-finite coordinate")]
    PointNotFinite,
    #[error("curve {label:?} needs at least 3 vertices, got {got}")]
    TooFewVertices { label: String, got: usize },
    #[error("curve {label:?} repeats consecutive vertices at index {index}")]
    CoincidentVertices { label: String, index: usize },
    #[error("curve {label:?} self-intersects between segments {i} and {j}")]
    SelfIntersection { label: String, i: usize, j: usize },
    #[error("segment of length {len:.3e} is degenerate")]
    DegenerateSegment { len: f64 },
    #[error("duplicate component label {label:?}")]
    DuplicateLabel { label: String },
    #[error("no component labeled {label:?}")]
    UnknownLabel { label: String },
    #[error("constraint endpoints must differ, got {label:?} twice")]
    SelfConstraint { label: String },
    #[error("constraint min_dist must be positive and finite, got {got}")]
    BadMinDist { got: f64 },
    #[error("matrix is not a rotation (orthonormal, determinant +1)")]
    NotARotation,
    #[error("rotation axis has near-zero length")]
    ZeroAxis,
    #[error("transformed link exits the unit cube")]
    OutOfCube,
    #[error("circle pair of radius {rho} centered at ({cx}, {cy}, {cz}) exits the unit cube")]
    PairOutOfCube { rho: f64, cx: f64, cy: f64, cz: f64 },
    #[error("need at least {min} segments per circle, got {got}")]
    TooFewSegments { min: usize, got: usize },
    #[error("circle radius must be positive and finite, got {got}")]
    BadRadius { got: f64 },
    #[error("epsilon {epsilon} leaves no room for a separated pair in the cube")]
    InfeasibleEpsilon { epsilon: f64 },
    #[error("bad link JSON: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, GeometryError>;

/// A point in or near the unit cube. Coordinates are finite and lie in
/// [`POINT_MIN`, `POINT_MAX`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        for coord in [x, y, z] {
            if !coord.is_finite() {
                return Err(GeometryError::PointNotFinite);
            }
            if !(POINT_MIN..=POINT_MAX).contains(&coord) {
                return Err(GeometryError::PointOutOfRange { coord });
            }
        }
        Ok(Point3 { x, y, z })
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dist(&self, other: &Point3) -> f64 {
        vnorm(vsub(other.coords(), self.coords()))
    }

    fn in_unit_cube(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y) && (0.0..=1.0).contains(&self.z)
    }
}

pub(crate) fn vsub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn vadd(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn vscale(s: f64, a: [f64; 3]) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

pub(crate) fn vdot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn vcross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn vnorm(a: [f64; 3]) -> f64 {
    vdot(a, a).sqrt()
}

/// Minimum distance between two closed segments p1..p2 and q1..q2.
///
/// Uses the clamped closest-point parameterization. Either segment being
/// shorter than [`MIN_SEGMENT_LEN`] is an error.
pub fn segment_distance(p1: Point3, p2: Point3, q1: Point3, q2: Point3) -> Result<f64> {
    let d1 = vsub(p2.coords(), p1.coords());
    let d2 = vsub(q2.coords(), q1.coords());
    let r = vsub(p1.coords(), q1.coords());
    let a = vdot(d1, d1);
    let e = vdot(d2, d2);
    let min2 = MIN_SEGMENT_LEN * MIN_SEGMENT_LEN;
    if a < min2 {
        return Err(GeometryError::DegenerateSegment { len: a.sqrt() });
    }
    if e < min2 {
        return Err(GeometryError::DegenerateSegment { len: e.sqrt() });
    }
    let f = vdot(d2, r);
    let c = vdot(d1, r);
    let b = vdot(d1, d2);
    let denom = a * e - b * b;
    // Parallel segments leave s free; pick s = 0 and let the t pass and the
    // final clamp recover the true minimum.
    let mut s = if denom.abs() > f64::EPSILON * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    let cp = vadd(p1.coords(), vscale(s, d1));
    let cq = vadd(q1.coords(), vscale(t, d2));
    Ok(vnorm(vsub(cp, cq)))
}

/// A closed polygonal curve: vertices joined in order, last back to first.
///
/// Invariants established at construction: at least 3 vertices, consecutive
/// vertices (including the closing edge) distinct beyond [`DIST_TOL`], and
/// no two non-adjacent segments within [`DIST_TOL`] of each other.
#[derive(Clone, Debug, PartialEq)]
pub struct PLCurve {
    label: String,
    vertices: Vec<Point3>,
}

impl PLCurve {
    pub fn new(label: impl Into<String>, vertices: Vec<Point3>) -> Result<Self> {
        let label = label.into();
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices { label, got: n });
        }
        for i in 0..n {
            if vertices[i].dist(&vertices[(i + 1) % n]) <= DIST_TOL {
                return Err(GeometryError::CoincidentVertices { label, index: i });
            }
        }
        let curve = PLCurve { label, vertices };
        for i in 0..n {
            for j in (i + 1)..n {
                // Adjacent segments share a vertex, so distance 0 is expected.
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (p1, p2) = curve.segment(i);
                let (q1, q2) = curve.segment(j);
                if segment_distance(p1, p2, q1, q2)? <= DIST_TOL {
                    return Err(GeometryError::SelfIntersection {
                        label: curve.label,
                        i,
                        j,
                    });
                }
            }
        }
        Ok(curve)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len()
    }

    /// Endpoints of segment `i`, where segment `n - 1` closes the loop.
    pub fn segment(&self, i: usize) -> (Point3, Point3) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        (0..self.vertices.len()).map(move |i| self.segment(i))
    }
}

/// Minimum distance between two closed polygonal curves, the exact minimum
/// over all segment pairs.
pub fn curve_min_distance(a: &PLCurve, b: &PLCurve) -> f64 {
    let mut best = f64::INFINITY;
    for (p1, p2) in a.segments() {
        for (q1, q2) in b.segments() {
            // Curve invariants rule out degenerate segments.
            let d = segment_distance(p1, p2, q1, q2).expect("curves have non-degenerate segments");
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// A required minimum distance between two labeled components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub a: String,
    pub b: String,
    pub min_dist: f64,
}

/// A named link: labeled closed curves plus pairwise separation constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct PLLink {
    name: String,
    components: Vec<PLCurve>,
    constraints: Vec<Constraint>,
}

impl PLLink {
    pub fn new(
        name: impl Into<String>,
        components: Vec<PLCurve>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let name = name.into();
        for (i, c) in components.iter().enumerate() {
            if components[..i].iter().any(|d| d.label() == c.label()) {
                return Err(GeometryError::DuplicateLabel {
                    label: c.label().to_string(),
                });
            }
        }
        let link = PLLink {
            name,
            components,
            constraints: Vec::new(),
        };
        constraints
            .into_iter()
            .try_fold(link, |l, c| l.with_constraint(&c.a, &c.b, c.min_dist))
    }

    /// Adds a separation constraint after validating both labels exist and
    /// differ and the distance is positive.
    pub fn with_constraint(mut self, a: &str, b: &str, min_dist: f64) -> Result<Self> {
        if a == b {
            return Err(GeometryError::SelfConstraint {
                label: a.to_string(),
            });
        }
        for label in [a, b] {
            if self.component(label).is_none() {
                return Err(GeometryError::UnknownLabel {
                    label: label.to_string(),
                });
            }
        }
        if min_dist <= 0.0 || !min_dist.is_finite() {
            return Err(GeometryError::BadMinDist { got: min_dist });
        }
        self.constraints.push(Constraint {
            a: a.to_string(),
            b: b.to_string(),
            min_dist,
        });
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[PLCurve] {
        &self.components
    }

    pub fn component(&self, label: &str) -> Option<&PLCurve> {
        self.components.iter().find(|c| c.label() == label)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawLink {
            name: self.name.clone(),
            components: self
                .components
                .iter()
                .map(|c| RawComponent {
                    label: c.label().to_string(),
                    points: c.vertices().iter().map(Point3::coords).collect(),
                })
                .collect(),
            constraints: self.constraints.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("link serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawLink = serde_json::from_str(text)?;
        let mut components = Vec::with_capacity(raw.components.len());
        for rc in raw.components {
            let vertices = rc
                .points
                .into_iter()
                .map(|[x, y, z]| Point3::new(x, y, z))
                .collect::<Result<Vec<_>>>()?;
            components.push(PLCurve::new(rc.label, vertices)?);
        }
        PLLink::new(raw.name, components, raw.constraints)
    }
}

#[derive(Serialize, Deserialize)]
struct RawLink {
    name: String,
    components: Vec<RawComponent>,
    #[serde(default)]
    constraints: Vec<Constraint>,
}

#[derive(Serialize, Deserialize)]
struct RawComponent {
    label: String,
    points: Vec<[f64; 3]>,
}

/// Actual minimum distance for every declared constraint, in declaration
/// order, as `(a, b, distance)`.
pub fn link_min_distances(link: &PLLink) -> Vec<(String, String, f64)> {
    link.constraints()
        .iter()
        .map(|c| {
            let ca = link.component(&c.a).expect("constraint labels validated");
            let cb = link.component(&c.b).expect("constraint labels validated");
            (c.a.clone(), c.b.clone(), curve_min_distance(ca, cb))
        })
        .collect()
}

/// Whether every declared constraint holds, with [`DIST_TOL`] slack.
pub fn constraints_satisfied(link: &PLLink) -> bool {
    link.constraints()
        .iter()
        .zip(link_min_distances(link))
        .all(|(c, (_, _, d))| d >= c.min_dist - DIST_TOL)
}

/// A rotation about the cube center followed by a translation.
#[derive(Clone, Copy, Debug)]
pub struct RigidTransform {
    rot: [[f64; 3]; 3],
    trans: [f64; 3],
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rot: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            trans: [0.0, 0.0, 0.0],
        }
    }

    /// Builds the rotation by `angle` radians about `axis` (through the cube
    /// center), then translation by `trans`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64, trans: [f64; 3]) -> Result<Self> {
        let n = vnorm(axis);
        if n <= DIST_TOL {
            return Err(GeometryError::ZeroAxis);
        }
        let [ux, uy, uz] = vscale(1.0 / n, axis);
        let (s, c) = angle.sin_cos();
        let ic = 1.0 - c;
        let rot = [
            [c + ux * ux * ic, ux * uy * ic - uz * s, ux * uz * ic + uy * s],
            [uy * ux * ic + uz * s, c + uy * uy * ic, uy * uz * ic - ux * s],
            [uz * ux * ic - uy * s, uz * uy * ic + ux * s, c + uz * uz * ic],
        ];
        Ok(RigidTransform { rot, trans })
    }

    /// Wraps an explicit matrix, validating orthonormality and positive
    /// orientation to within 1e-9.
    pub fn from_matrix(rot: [[f64; 3]; 3], trans: [f64; 3]) -> Result<Self> {
        let t = RigidTransform { rot, trans };
        let cols = [t.col(0), t.col(1), t.col(2)];
        for i in 0..3 {
            for j in i..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (vdot(cols[i], cols[j]) - want).abs() > 1e-9 {
                    return Err(GeometryError::NotARotation);
                }
            }
        }
        if vdot(vcross(cols[0], cols[1]), cols[2]) < 0.0 {
            return Err(GeometryError::NotARotation);
        }
        Ok(t)
    }

    fn col(&self, j: usize) -> [f64; 3] {
        [self.rot[0][j], self.rot[1][j], self.rot[2][j]]
    }

    fn mat_apply(&self, v: [f64; 3]) -> [f64; 3] {
        [
            vdot(self.rot[0], v),
            vdot(self.rot[1], v),
            vdot(self.rot[2], v),
        ]
    }

    pub fn apply(&self, p: Point3) -> Result<Point3> {
        let centered = vsub(p.coords(), CUBE_CENTER);
        let [x, y, z] = vadd(vadd(self.mat_apply(centered), CUBE_CENTER), self.trans);
        Point3::new(x, y, z)
    }
}

/// Applies a rigid motion to every component of a link, keeping labels and
/// constraints. Errors if any transformed vertex leaves the unit cube.
pub fn rigid_transform(link: &PLLink, t: &RigidTransform) -> Result<PLLink> {
    let mut components = Vec::with_capacity(link.components().len());
    for c in link.components() {
        let mut vertices = Vec::with_capacity(c.vertices().len());
        for &p in c.vertices() {
            let q = t.apply(p).map_err(|_| GeometryError::OutOfCube)?;
            if !q.in_unit_cube() {
                return Err(GeometryError::OutOfCube);
            }
            vertices.push(q);
        }
        components.push(PLCurve::new(c.label(), vertices)?);
    }
    PLLink::new(link.name(), components, link.constraints().to_vec())
}

/// A regular polygon approximating the circle of the given radius around
/// `center` in the plane spanned by the unit vectors `u` and `v`.
pub fn circle(
    label: &str,
    center: [f64; 3],
    radius: f64,
    u: [f64; 3],
    v: [f64; 3],
    segments: usize,
) -> Result<PLCurve> {
    let mut vertices = Vec::with_capacity(segments);
    for i in 0..segments {
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (segments as f64);
        let p = vadd(
            center,
            vadd(
                vscale(radius * theta.cos(), u),
                vscale(radius * theta.sin(), v),
            ),
        );
        vertices.push(Point3::new(p[0], p[1], p[2])?);
    }
    PLCurve::new(label, vertices)
}

/// A Hopf-linked pair of circles of radius `rho` around `center`: component
/// "r" in an xy-parallel plane centered at `center - (rho/2, 0, 0)` and
/// component "b" in an xz-parallel plane centered at `center + (rho/2, 0, 0)`.
/// Each circle passes through the other's center, so the round curves sit at
/// distance exactly `rho` from each other.
pub fn hopf_pair(center: Point3, rho: f64, segments: usize) -> Result<PLLink> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(GeometryError::BadRadius { got: rho });
    }
    if segments < MIN_CIRCLE_SEGMENTS {
        return Err(GeometryError::TooFewSegments {
            min: MIN_CIRCLE_SEGMENTS,
            got: segments,
        });
    }
    let c = center.coords();
    // Bounding box of the pair: 3*rho across x, 2*rho across y and z.
    let half = [1.5 * rho, rho, rho];
    for axis in 0..3 {
        if c[axis] - half[axis] < 0.0 || c[axis] + half[axis] > 1.0 {
            return Err(GeometryError::PairOutOfCube {
                rho,
                cx: c[0],
                cy: c[1],
                cz: c[2],
            });
        }
    }
    let red = circle(
        "r",
        vsub(c, [rho / 2.0, 0.0, 0.0]),
        rho,
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        segments,
    )?;
    let blue = circle(
        "b",
        vadd(c, [rho / 2.0, 0.0, 0.0]),
        rho,
        [1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        segments,
    )?;
    PLLink::new("hopf", vec![red, blue], Vec::new())
}

/// The centered Hopf pair used throughout: radius `min(2 * epsilon, 0.3)`,
/// 48 segments per circle, constrained to separation `epsilon`. The radius
/// cap keeps the pair inside the cube for large epsilon; construction fails
/// if the built pair cannot honor the constraint.
pub fn canonical_hopf(epsilon: f64) -> Result<PLLink> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(GeometryError::InfeasibleEpsilon { epsilon });
    }
    let rho = (2.0 * epsilon).min(CANONICAL_MAX_RADIUS);
    let center = Point3::new(0.5, 0.5, 0.5).expect("cube center is in range");
    let link = hopf_pair(center, rho, CANONICAL_SEGMENTS)?.with_constraint("r", "b", epsilon)?;
    if !constraints_satisfied(&link) {
        return Err(GeometryError::InfeasibleEpsilon { epsilon });
    }
    Ok(link)
}

/// An unlinked pair with the same labels and constraint as
/// [`canonical_hopf`]: two far-apart circles in opposite corners of the
/// cube. Useful as the negative control next to the Hopf pair.
pub fn split_pair(epsilon: f64) -> Result<PLLink> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(GeometryError::InfeasibleEpsilon { epsilon });
    }
    let rho = (2.0 * epsilon).min(0.15);
    let red = circle(
        "r",
        [0.25, 0.25, 0.25],
        rho,
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        CANONICAL_SEGMENTS,
    )?;
    let blue = circle(
        "b",
        [0.75, 0.75, 0.75],
        rho,
        [1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        CANONICAL_SEGMENTS,
    )?;
    let link = PLLink::new("split", vec![red, blue], Vec::new())?
        .with_constraint("r", "b", epsilon)?;
    if !constraints_satisfied(&link) {
        return Err(GeometryError::InfeasibleEpsilon { epsilon });
    }
    Ok(link)
}
