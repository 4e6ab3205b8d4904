//! Linking numbers of polygonal curves, linking matrices of homology
//! bases, and separation certificates for two-colored links.
//!
//! A certificate ties together the whole pipeline: tessellate the cube at
//! ε/4, color cells touched by the red and blue components, build homology
//! bases of both colored regions, snap each curve to a cycle and read off
//! its coordinates, and fill the mod-2 linking matrix between the two
//! bases. The scalar x L y over GF(2) is the certified invariant; for a
//! Hopf pair it is 1, and it matches the mod-2 linking number of the
//! original curves whenever the constraint holds.
//!
//! Linking numbers come from signed crossings in a generic projection. The
//! projection direction is drawn from a fixed pseudorandom sequence, so
//! results are deterministic; degenerate projections are detected and
//! retried with the next direction.

use num_bigint::BigUint;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{curve_min_distance, PLCurve, PLLink};
use crate::grid::{color_cells, region_of, tessellate, Grid, GridError, Region};
use crate::homology::{
    build_complex, coordinates, h1_basis, snap_to_cycle, CubicalComplex, H1Basis, HomologyError,
};
use crate::z2::{BitVec, Z2Matrix};

/// Curve pairs closer than this cannot be linked reliably by projection.
pub const MIN_CURVE_GAP: f64 = 1e-6;

/// Projection directions tried before giving up on a curve pair.
pub const MAX_PROJECTION_ATTEMPTS: usize = 10;

/// Decimal-digit ceiling above which exact certificate-count bounds are
/// omitted and only the log value is reported.
pub const MAX_EXACT_DIGITS: usize = 10_000;

const MIDPOINT_JITTER: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("curves are {dist:.3e} apart, below the minimum gap {min:.3e}")]
    TooClose { dist: f64, min: f64 },
    #[error("no generic projection found after {attempts} attempts")]
    DegenerateProjection { attempts: usize },
    #[error("red and blue labels must differ, both are {label:?}")]
    SameLabel { label: String },
    #[error("component {label:?} not found in link")]
    UnknownLabel { label: String },
    #[error("components {red:?} and {blue:?} are {dist:.6} apart, violating separation {epsilon}")]
    ConstraintViolation {
        red: String,
        blue: String,
        dist: f64,
        epsilon: f64,
    },
    #[error("certificate stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("certificates were built on different grids")]
    GridMismatch,
    #[error("certificates have different coloring fingerprints")]
    FingerprintMismatch,
    #[error("certificate dimensions disagree: {what}")]
    DimensionMismatch { what: String },
}

type Result<T> = std::result::Result<T, CertifyError>;

fn stage<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> CertifyError {
    move |e| CertifyError::Stage {
        stage: name,
        message: e.to_string(),
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit_interval(word: u64) -> f64 {
    // Map to [-1, 1) with 53 bits of precision.
    ((word >> 11) as f64) / ((1u64 << 52) as f64) - 1.0
}

/// The projection direction for a retry attempt, from a fixed sequence.
fn projection_direction(attempt: usize) -> [f64; 3] {
    let mut state = 0x6c69_6e6b_7061_636bu64 ^ ((attempt as u64) << 32);
    loop {
        let v = [
            unit_interval(splitmix64(&mut state)),
            unit_interval(splitmix64(&mut state)),
            unit_interval(splitmix64(&mut state)),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-3 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Right-handed orthonormal frame (u, v, w) with w the given direction.
fn frame(w: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let abs = [w[0].abs(), w[1].abs(), w[2].abs()];
    let e = if abs[0] <= abs[1] && abs[0] <= abs[2] {
        [1.0, 0.0, 0.0]
    } else if abs[1] <= abs[2] {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let mut u = cross(e, w);
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u = [u[0] / un, u[1] / un, u[2] / un];
    let v = cross(w, u);
    (u, v, w)
}

/// A closed polyline as raw points; consecutive points and the wrap-around
/// pair are its segments.
pub type Loop = Vec<[f64; 3]>;

fn project(p: [f64; 3], u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> [f64; 3] {
    [
        p[0] * u[0] + p[1] * u[1] + p[2] * u[2],
        p[0] * v[0] + p[1] * v[1] + p[2] * v[2],
        p[0] * w[0] + p[1] * w[1] + p[2] * w[2],
    ]
}

struct DegenerateProjection;

/// Sum of crossing signs where loops of `a` pass over loops of `b`, in the
/// plane normal to `dir`. This equals the linking number when the
/// projection is generic; near-degenerate incidences abort the attempt.
fn crossing_sum(a: &[Loop], b: &[Loop], dir: [f64; 3]) -> std::result::Result<i64, DegenerateProjection> {
    let (u, v, w) = frame(dir);
    let proj = |lp: &[Loop]| -> Vec<Vec<[f64; 3]>> {
        lp.iter()
            .map(|pts| pts.iter().map(|&p| project(p, u, v, w)).collect())
            .collect()
    };
    let pa = proj(a);
    let pb = proj(b);
    let margin = 1e-9;
    let mut sum = 0i64;
    for la in &pa {
        for ia in 0..la.len() {
            let p1 = la[ia];
            let p2 = la[(ia + 1) % la.len()];
            let r = [p2[0] - p1[0], p2[1] - p1[1]];
            for lb in &pb {
                for ib in 0..lb.len() {
                    let q1 = lb[ib];
                    let q2 = lb[(ib + 1) % lb.len()];
                    let s = [q2[0] - q1[0], q2[1] - q1[1]];
                    let denom = r[0] * s[1] - r[1] * s[0];
                    let scale = (r[0].hypot(r[1])) * (s[0].hypot(s[1]));
                    if denom.abs() <= 1e-13 * scale.max(1e-300) {
                        // Parallel in projection: only a hazard if the
                        // segments nearly overlap.
                        if parallel_segments_close(p1, p2, q1, q2, margin) {
                            return Err(DegenerateProjection);
                        }
                        continue;
                    }
                    let d = [q1[0] - p1[0], q1[1] - p1[1]];
                    let t = (d[0] * s[1] - d[1] * s[0]) / denom;
                    let x = (d[0] * r[1] - d[1] * r[0]) / denom;
                    if !(-margin..=1.0 + margin).contains(&t) || !(-margin..=1.0 + margin).contains(&x) {
                        continue;
                    }
                    if t < margin || t > 1.0 - margin || x < margin || x > 1.0 - margin {
                        return Err(DegenerateProjection);
                    }
                    let wa = p1[2] + t * (p2[2] - p1[2]);
                    let wb = q1[2] + x * (q2[2] - q1[2]);
                    if (wa - wb).abs() < margin {
                        return Err(DegenerateProjection);
                    }
                    if wa > wb {
                        sum += if denom > 0.0 { 1 } else { -1 };
                    }
                }
            }
        }
    }
    Ok(sum)
}

fn parallel_segments_close(p1: [f64; 3], p2: [f64; 3], q1: [f64; 3], q2: [f64; 3], tol: f64) -> bool {
    let d2 = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| -> f64 {
        // Squared distance from c to segment ab, in the plane.
        let ab = [b[0] - a[0], b[1] - a[1]];
        let ac = [c[0] - a[0], c[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            ((ac[0] * ab[0] + ac[1] * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dx = ac[0] - t * ab[0];
        let dy = ac[1] - t * ab[1];
        dx * dx + dy * dy
    };
    let min2 = d2(p1, p2, q1)
        .min(d2(p1, p2, q2))
        .min(d2(q1, q2, p1))
        .min(d2(q1, q2, p2));
    min2 < tol * tol
}

/// Linking number of loop collections by signed crossings, retrying with
/// fresh projection directions when a degenerate incidence shows up.
pub fn linking_integer_loops(a: &[Loop], b: &[Loop]) -> Result<i64> {
    for attempt in 0..MAX_PROJECTION_ATTEMPTS {
        let dir = projection_direction(attempt);
        match crossing_sum(a, b, dir) {
            Ok(sum) => return Ok(sum),
            Err(DegenerateProjection) => continue,
        }
    }
    Err(CertifyError::DegenerateProjection {
        attempts: MAX_PROJECTION_ATTEMPTS,
    })
}

/// Linking number of two closed curves. The curves must be separated by
/// more than [`MIN_CURVE_GAP`].
pub fn linking_integer(a: &PLCurve, b: &PLCurve) -> Result<i64> {
    let dist = curve_min_distance(a, b);
    if dist <= MIN_CURVE_GAP {
        return Err(CertifyError::TooClose {
            dist,
            min: MIN_CURVE_GAP,
        });
    }
    let la: Loop = a.vertices().iter().map(|p| p.coords()).collect();
    let lb: Loop = b.vertices().iter().map(|p| p.coords()).collect();
    linking_integer_loops(&[la], &[lb])
}

/// Linking number reduced mod 2.
pub fn linking_mod2(a: &PLCurve, b: &PLCurve) -> Result<bool> {
    Ok(linking_integer(a, b)? % 2 != 0)
}

/// Realizes an edge cycle as closed polylines in space. Each loop follows
/// lattice edges, with each edge subdivided at a deterministically
/// jittered midpoint so that projections of two realized chains are
/// generic in practice.
pub fn realize_chain_loops(chain: &BitVec, complex: &CubicalComplex) -> Vec<Loop> {
    use std::collections::BTreeMap;
    let mut incident: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for eid in chain.iter_ones() {
        let (a, b) = complex.edge_endpoints(eid);
        incident.entry(a).or_default().push((eid, b));
        incident.entry(b).or_default().push((eid, a));
    }
    let starts: Vec<usize> = incident.keys().copied().collect();
    let mut used: std::collections::HashSet<usize> = std::collections::HashSet::new();
    let mut loops = Vec::new();
    for &start in &starts {
        loop {
            // Walk from `start` along unused edges, smallest edge id first.
            // Every vertex of a cycle chain has even degree, so the walk
            // can only terminate back at `start`.
            let first = incident[&start].iter().find(|(eid, _)| !used.contains(eid)).copied();
            let Some((eid0, mut at)) = first else { break };
            used.insert(eid0);
            let mut walk = vec![(start, eid0)];
            while at != start {
                let (eid, next) = incident[&at]
                    .iter()
                    .find(|(eid, _)| !used.contains(eid))
                    .copied()
                    .expect("even-degree walk cannot get stuck away from its start");
                used.insert(eid);
                walk.push((at, eid));
                at = next;
            }
            let mut pts: Loop = Vec::with_capacity(walk.len() * 2);
            for &(v, eid) in &walk {
                let (a, b) = complex.edge_endpoints(eid);
                let other = if a == v { b } else { a };
                let pv = complex.vertex_position(v);
                let pw = complex.vertex_position(other);
                pts.push(pv);
                pts.push(jittered_midpoint(pv, pw, eid));
            }
            loops.push(pts);
        }
    }
    loops
}

fn jittered_midpoint(a: [f64; 3], b: [f64; 3], eid: usize) -> [f64; 3] {
    let mut state = 0x6d69_6470_6f69_6e74u64 ^ (eid as u64);
    [
        (a[0] + b[0]) / 2.0 + MIDPOINT_JITTER * unit_interval(splitmix64(&mut state)),
        (a[1] + b[1]) / 2.0 + MIDPOINT_JITTER * unit_interval(splitmix64(&mut state)),
        (a[2] + b[2]) / 2.0 + MIDPOINT_JITTER * unit_interval(splitmix64(&mut state)),
    ]
}

/// Mod-2 linking matrix between realized basis cycles of two disjoint
/// regions: entry (p, q) is the linking parity of red basis cycle p with
/// blue basis cycle q.
pub fn linking_matrix(
    red_basis: &H1Basis,
    red_complex: &CubicalComplex,
    blue_basis: &H1Basis,
    blue_complex: &CubicalComplex,
) -> Result<Z2Matrix> {
    let red_loops: Vec<Vec<Loop>> = red_basis
        .cycles()
        .iter()
        .map(|c| realize_chain_loops(c, red_complex))
        .collect();
    let blue_loops: Vec<Vec<Loop>> = blue_basis
        .cycles()
        .iter()
        .map(|c| realize_chain_loops(c, blue_complex))
        .collect();
    let mut l = Z2Matrix::zeros(red_basis.dim(), blue_basis.dim());
    for (p, rl) in red_loops.iter().enumerate() {
        for (q, bl) in blue_loops.iter().enumerate() {
            let lk = linking_integer_loops(rl, bl)?;
            l.set(p, q, lk % 2 != 0);
        }
    }
    Ok(l)
}

/// A decorated-coloring separation certificate for one red/blue pair.
///
/// `x` and `y` are the homology coordinates of the red and blue curves in
/// their region bases, `l` the mod-2 linking matrix between the bases, and
/// `eq1` the invariant x l y over GF(2).
#[derive(Clone, Debug)]
pub struct Certificate {
    grid: Grid,
    fingerprint: String,
    x: BitVec,
    y: BitVec,
    l: Z2Matrix,
    eq1: bool,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    fingerprint: &'a str,
    d: usize,
    e: usize,
    x: String,
    y: String,
    #[serde(rename = "L")]
    l: Vec<String>,
    eq1: u8,
}

impl Certificate {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Hash of the grid parameters and both colored cell sets.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Red homology dimension d.
    pub fn dim_red(&self) -> usize {
        self.l.rows()
    }

    /// Blue homology dimension e.
    pub fn dim_blue(&self) -> usize {
        self.l.cols()
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn y(&self) -> &BitVec {
        &self.y
    }

    pub fn linking(&self) -> &Z2Matrix {
        &self.l
    }

    /// The certified invariant x L y over GF(2).
    pub fn eq1(&self) -> bool {
        self.eq1
    }

    pub fn to_json_string(&self) -> String {
        let doc = CertificateJson {
            fingerprint: &self.fingerprint,
            d: self.dim_red(),
            e: self.dim_blue(),
            x: self.x.to_bitstring(),
            y: self.y.to_bitstring(),
            l: (0..self.l.rows()).map(|r| self.l.row(r).to_bitstring()).collect(),
            eq1: u8::from(self.eq1),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("certificate serializes");
        out.push('\n');
        out
    }
}

fn coloring_fingerprint(grid: &Grid, red: &Region, blue: &Region) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"decorated-coloring-v1");
    hasher.update(grid.n_side().to_le_bytes());
    hasher.update(grid.h().to_le_bytes());
    hasher.update(grid.epsilon().to_le_bytes());
    for (tag, region) in [(b"red-", red), (b"blue", blue)] {
        hasher.update(tag);
        hasher.update((region.cells().len() as u64).to_le_bytes());
        for c in region.cells() {
            hasher.update(c.i.to_le_bytes());
            hasher.update(c.j.to_le_bytes());
            hasher.update(c.k.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Builds the separation certificate for the `red`/`blue` pair of `link`
/// at separation `epsilon`.
///
/// The pair must actually be separated by at least `epsilon`; the
/// tessellation then guarantees the colored regions are disjoint and the
/// certificate invariant is well defined.
pub fn certificate(link: &PLLink, red: &str, blue: &str, epsilon: f64) -> Result<Certificate> {
    if red == blue {
        return Err(CertifyError::SameLabel {
            label: red.to_string(),
        });
    }
    let red_curve = link.component(red).ok_or_else(|| CertifyError::UnknownLabel {
        label: red.to_string(),
    })?;
    let blue_curve = link.component(blue).ok_or_else(|| CertifyError::UnknownLabel {
        label: blue.to_string(),
    })?;
    let dist = curve_min_distance(red_curve, blue_curve);
    if dist < epsilon {
        return Err(CertifyError::ConstraintViolation {
            red: red.to_string(),
            blue: blue.to_string(),
            dist,
            epsilon,
        });
    }

    let grid = tessellate(epsilon).map_err(stage("tessellate"))?;
    let mut constrained = link.clone();
    if !constrained
        .constraints()
        .iter()
        .any(|c| (c.a == red && c.b == blue) || (c.a == blue && c.b == red))
    {
        constrained = constrained
            .with_constraint(red, blue, epsilon)
            .map_err(stage("color"))?;
    }
    let coloring =
        color_cells(&grid, &constrained, &[red, blue]).map_err(stage("color"))?;
    let red_region = region_of(&coloring, red).map_err(stage("regions"))?;
    let blue_region = region_of(&coloring, blue).map_err(stage("regions"))?;

    let red_complex = build_complex(&red_region).map_err(stage("homology"))?;
    let blue_complex = build_complex(&blue_region).map_err(stage("homology"))?;
    let red_basis = h1_basis(&red_complex);
    let blue_basis = h1_basis(&blue_complex);

    let red_chain = snap_to_cycle(red_curve, &red_region, &red_complex).map_err(stage("snap"))?;
    let blue_chain =
        snap_to_cycle(blue_curve, &blue_region, &blue_complex).map_err(stage("snap"))?;
    let x = coordinates(&red_chain, &red_basis, &red_complex).map_err(stage("snap"))?;
    let y = coordinates(&blue_chain, &blue_basis, &blue_complex).map_err(stage("snap"))?;

    let l = linking_matrix(&red_basis, &red_complex, &blue_basis, &blue_complex)?;

    let eq1 = pairing(&x, &l, &y);
    let fingerprint = coloring_fingerprint(&grid, &red_region, &blue_region);
    Ok(Certificate {
        grid,
        fingerprint,
        x,
        y,
        l,
        eq1,
    })
}

/// The GF(2) pairing x L y.
fn pairing(x: &BitVec, l: &Z2Matrix, y: &BitVec) -> bool {
    let mut acc = false;
    for p in x.iter_ones() {
        acc ^= l.row(p).dot(y);
    }
    acc
}

/// Compares two certificates built on the same grid: equal when their
/// colorings and both coordinate vectors agree.
pub fn certificates_equal(a: &Certificate, b: &Certificate) -> Result<bool> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.n_side() != gb.n_side() || ga.h() != gb.h() || ga.epsilon() != gb.epsilon() {
        return Err(CertifyError::GridMismatch);
    }
    Ok(a.fingerprint == b.fingerprint
        && a.x.to_bitstring() == b.x.to_bitstring()
        && a.y.to_bitstring() == b.y.to_bitstring())
}

/// Cross-pairing x_a L_a y_b between certificates sharing a coloring:
/// detects a blue curve that sits in the same regions but represents a
/// different homology class.
pub fn off_diagonal_check(a: &Certificate, b: &Certificate) -> Result<bool> {
    if a.fingerprint != b.fingerprint {
        return Err(CertifyError::FingerprintMismatch);
    }
    if a.dim_blue() != b.y.len() {
        return Err(CertifyError::DimensionMismatch {
            what: format!(
                "linking matrix has {} columns, blue coordinates have {}",
                a.dim_blue(),
                b.y.len()
            ),
        });
    }
    Ok(pairing(&a.x, &a.l, &b.y))
}

/// An upper bound on the number of distinct decorated colorings, kept
/// exact while it fits in [`MAX_EXACT_DIGITS`] decimal digits; the natural
/// log of the bound is always available.
#[derive(Debug, Clone, Serialize)]
pub struct CountBound {
    pub cells: u64,
    pub dim_cap: u64,
    /// Decimal digits of the exact value, when computed.
    pub exact: Option<String>,
    pub ln: f64,
}

impl CountBound {
    pub fn exact_value(&self) -> Option<BigUint> {
        self.exact
            .as_ref()
            .map(|s| s.parse().expect("stored bound digits parse"))
    }
}

/// Counts decorated colorings: 3 colors per cell and a homology-class
/// choice from at most 2^dim_cap per side, giving 3^cells * 4^dim_cap.
pub fn dc_count_bound(cells: u64, dim_cap: u64) -> CountBound {
    let ln = cells as f64 * 3f64.ln() + 2.0 * dim_cap as f64 * 2f64.ln();
    let digits = ln / 10f64.ln();
    let exact = if digits <= MAX_EXACT_DIGITS as f64 {
        let three = BigUint::from(3u32).pow(u32::try_from(cells).expect("cell count fits u32"));
        let four = BigUint::from(4u32).pow(u32::try_from(dim_cap).expect("dim cap fits u32"));
        Some((three * four).to_string())
    } else {
        None
    };
    CountBound {
        cells,
        dim_cap,
        exact,
        ln,
    }
}

/// The coloring-count bound at scale ε: cells from the ε/4 tessellation and
/// the homology dimension capped by the number of grid edges.
pub fn dc_count_bound_for_epsilon(epsilon: f64) -> Result<CountBound> {
    let grid = tessellate(epsilon).map_err(stage("tessellate"))?;
    let n = grid.n_side() as u64;
    let cells = n * n * n;
    // Edges of the full grid: 3 axes of n * (n+1)^2 each.
    let dim_cap = 3 * n * (n + 1) * (n + 1);
    Ok(dc_count_bound(cells, dim_cap))
}

/// Natural log of a positive big integer, accurate to double precision.
pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits <= 60 {
        return (x.to_u64().expect("small value fits u64") as f64).ln();
    }
    let shift = bits - 60;
    let top = (x >> shift).to_u64().expect("60-bit top fits u64") as f64;
    top.ln() + shift as f64 * 2f64.ln()
}

/// Convenience handle for errors raised while looking up grid data.
impl From<GridError> for CertifyError {
    fn from(e: GridError) -> Self {
        CertifyError::Stage {
            stage: "grid",
            message: e.to_string(),
        }
    }
}

impl From<HomologyError> for CertifyError {
    fn from(e: HomologyError) -> Self {
        CertifyError::Stage {
            stage: "homology",
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{canonical_hopf, circle, split_pair, Point3};

    #[test]
    fn hopf_circles_link_once() {
        let link = canonical_hopf(0.2).unwrap();
        let lk = linking_integer(link.component("r").unwrap(), link.component("b").unwrap())
            .unwrap();
        assert_eq!(lk.abs(), 1);
        assert!(linking_mod2(link.component("r").unwrap(), link.component("b").unwrap()).unwrap());
    }

    #[test]
    fn split_circles_do_not_link() {
        let link = split_pair(0.1).unwrap();
        let lk = linking_integer(link.component("r").unwrap(), link.component("b").unwrap())
            .unwrap();
        assert_eq!(lk, 0);
    }

    const XY: ([f64; 3], [f64; 3]) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    const YZ: ([f64; 3], [f64; 3]) = ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);

    #[test]
    fn coplanar_far_circles_do_not_link() {
        let a = circle("a", [0.3, 0.3, 0.5], 0.1, XY.0, XY.1, 24).unwrap();
        let b = circle("b", [0.7, 0.7, 0.5], 0.1, XY.0, XY.1, 24).unwrap();
        assert_eq!(linking_integer(&a, &b).unwrap(), 0);
    }

    #[test]
    fn touching_curves_are_rejected() {
        let a = circle("a", [0.5, 0.5, 0.5], 0.2, XY.0, XY.1, 24).unwrap();
        let b = circle("b", [0.5, 0.5, 0.5], 0.2, YZ.0, YZ.1, 24).unwrap();
        assert!(matches!(
            linking_integer(&a, &b),
            Err(CertifyError::TooClose { .. })
        ));
    }

    #[test]
    fn linking_is_symmetric_up_to_hopf_pair_orientation() {
        let link = canonical_hopf(0.15).unwrap();
        let r = link.component("r").unwrap();
        let b = link.component("b").unwrap();
        assert_eq!(
            linking_integer(r, b).unwrap(),
            linking_integer(b, r).unwrap()
        );
    }

    #[test]
    fn hopf_certificate_invariant_is_one() {
        let link = canonical_hopf(0.2).unwrap();
        let cert = certificate(&link, "r", "b", 0.2).unwrap();
        assert!(cert.eq1());
        assert_eq!(cert.dim_red(), 1);
        assert_eq!(cert.dim_blue(), 1);
        assert_eq!(cert.x().count_ones(), 1);
        assert_eq!(cert.y().count_ones(), 1);
    }

    #[test]
    fn split_certificate_invariant_is_zero() {
        let link = split_pair(0.2).unwrap();
        let cert = certificate(&link, "r", "b", 0.2).unwrap();
        assert!(!cert.eq1());
    }

    #[test]
    fn certificate_rejects_violated_separation() {
        let link = canonical_hopf(0.1).unwrap();
        // The true gap is 0.2; demand more.
        let err = certificate(&link, "r", "b", 0.3).unwrap_err();
        assert!(matches!(err, CertifyError::ConstraintViolation { .. }));
    }

    #[test]
    fn certificate_rejects_unknown_and_equal_labels() {
        let link = canonical_hopf(0.2).unwrap();
        assert!(matches!(
            certificate(&link, "r", "nope", 0.2),
            Err(CertifyError::UnknownLabel { .. })
        ));
        assert!(matches!(
            certificate(&link, "r", "r", 0.2),
            Err(CertifyError::SameLabel { .. })
        ));
    }

    #[test]
    fn certificate_json_shape_and_determinism() {
        let link = canonical_hopf(0.2).unwrap();
        let a = certificate(&link, "r", "b", 0.2).unwrap();
        let b = certificate(&link, "r", "b", 0.2).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let parsed: serde_json::Value = serde_json::from_str(&a.to_json_string()).unwrap();
        assert_eq!(parsed["eq1"], 1);
        assert_eq!(parsed["d"], 1);
        assert_eq!(parsed["fingerprint"].as_str().unwrap().len(), 64);
        assert!(parsed["L"].as_array().unwrap().len() == 1);
    }

    #[test]
    fn equal_and_translated_certificates_compare_correctly() {
        use crate::geometry::hopf_pair;
        let link = canonical_hopf(0.2).unwrap();
        let a = certificate(&link, "r", "b", 0.2).unwrap();
        let b = certificate(&link, "r", "b", 0.2).unwrap();
        assert!(certificates_equal(&a, &b).unwrap());
        // A shifted copy occupies different cells.
        let moved = hopf_pair(Point3::new(0.55, 0.5, 0.5).unwrap(), 0.3, 48)
            .unwrap()
            .with_constraint("r", "b", 0.2)
            .unwrap();
        let c = certificate(&moved, "r", "b", 0.2).unwrap();
        assert!(!certificates_equal(&a, &c).unwrap());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = certificate(&canonical_hopf(0.2).unwrap(), "r", "b", 0.2).unwrap();
        let b = certificate(&canonical_hopf(0.1).unwrap(), "r", "b", 0.1).unwrap();
        assert!(matches!(
            certificates_equal(&a, &b),
            Err(CertifyError::GridMismatch)
        ));
    }

    #[test]
    fn off_diagonal_requires_shared_fingerprint() {
        let a = certificate(&canonical_hopf(0.2).unwrap(), "r", "b", 0.2).unwrap();
        let b = certificate(&canonical_hopf(0.1).unwrap(), "r", "b", 0.1).unwrap();
        assert!(matches!(
            off_diagonal_check(&a, &b),
            Err(CertifyError::FingerprintMismatch)
        ));
        // Against itself the cross pairing is the certified invariant.
        assert_eq!(off_diagonal_check(&a, &a).unwrap(), a.eq1());
    }

    #[test]
    fn equality_distinguishes_coordinates_with_shared_fingerprint() {
        let base = certificate(&canonical_hopf(0.2).unwrap(), "r", "b", 0.2).unwrap();
        let mut variant = Certificate {
            grid: base.grid,
            fingerprint: base.fingerprint.clone(),
            x: base.x.clone(),
            y: base.y.clone(),
            l: base.l.clone(),
            eq1: base.eq1,
        };
        variant.x.flip(0);
        assert!(!certificates_equal(&base, &variant).unwrap());
        // The cross pairing also changes: 0 L y vs x L y.
        assert_ne!(
            off_diagonal_check(&variant, &base).unwrap(),
            off_diagonal_check(&base, &base).unwrap()
        );
    }

    #[test]
    fn count_bound_small_cases() {
        let b = dc_count_bound(1, 0);
        assert_eq!(b.exact.as_deref(), Some("3"));
        assert!((b.ln - 3f64.ln()).abs() < 1e-12);
        let b = dc_count_bound(2, 3);
        // 3^2 * 4^3 = 576.
        assert_eq!(b.exact.as_deref(), Some("576"));
        assert!((b.ln - 576f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn count_bound_ln_matches_exact_when_present() {
        let b = dc_count_bound_for_epsilon(0.4).unwrap();
        assert_eq!(b.cells, 1000);
        assert_eq!(b.dim_cap, 3 * 10 * 11 * 11);
        let exact = b.exact_value().expect("bound at 0.4 fits the digit cap");
        assert!((ln_biguint(&exact) - b.ln).abs() / b.ln < 1e-12);
    }

    #[test]
    fn count_bound_large_cases_drop_exact() {
        let b = dc_count_bound_for_epsilon(0.2).unwrap();
        assert_eq!(b.cells, 8000);
        assert!(b.exact.is_none());
        assert!(b.ln > 0.0);
    }

    #[test]
    fn realized_loops_follow_lattice_edges() {
        use crate::grid::{tessellate, CellIx, Region};
        let grid = tessellate(0.5).unwrap();
        let cells: Vec<CellIx> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == 1 && j == 1))
            .map(|(i, j)| CellIx { i, j, k: 0 })
            .collect();
        let region = Region::from_cells("ring", &grid, cells);
        let complex = build_complex(&region).unwrap();
        let basis = h1_basis(&complex);
        assert_eq!(basis.dim(), 1);
        let loops = realize_chain_loops(&basis.cycles()[0], &complex);
        assert_eq!(loops.len(), 1);
        let total_edges = basis.cycles()[0].count_ones();
        assert_eq!(loops[0].len(), 2 * total_edges);
        // Jitter stays tiny: every midpoint is within 2e-5 of the segment
        // midpoint of its neighbors.
        let pts = &loops[0];
        for i in (1..pts.len()).step_by(2) {
            let prev = pts[i - 1];
            let next = pts[(i + 1) % pts.len()];
            for c in 0..3 {
                let mid = (prev[c] + next[c]) / 2.0;
                assert!((pts[i][c] - mid).abs() <= 2.0 * MIDPOINT_JITTER);
            }
        }
    }

    #[test]
    fn projection_directions_are_unit_and_distinct() {
        let mut dirs = Vec::new();
        for attempt in 0..MAX_PROJECTION_ATTEMPTS {
            let d = projection_direction(attempt);
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            dirs.push(d);
        }
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                let dot: f64 = (0..3).map(|c| dirs[i][c] * dirs[j][c]).sum();
                assert!(dot.abs() < 1.0 - 1e-6, "directions {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn linking_loops_handles_axis_parallel_squares() {
        // Two interlocked rectangular loops on lattice-like coordinates,
        // the kind realized chains produce.
        let a: Loop = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
        ];
        let b: Loop = vec![
            [0.5, 0.5, -0.5],
            [0.5, 0.5, 0.5],
            [1.5, 0.5, 0.5],
            [1.5, 0.5, -0.5],
        ];
        let lk = linking_integer_loops(&[a], &[b]).unwrap();
        assert_eq!(lk.abs(), 1);
    }

    #[test]
    fn gap_check_uses_curve_distance() {
        let a = circle("a", [0.4, 0.5, 0.5], 0.05, XY.0, XY.1, 16).unwrap();
        let mut pts = Vec::new();
        for p in a.vertices() {
            pts.push(Point3::new(p.x + 0.2, p.y, p.z).unwrap());
        }
        let b = PLCurve::new("b", pts).unwrap();
        assert_eq!(linking_integer(&a, &b).unwrap(), 0);
    }
}
