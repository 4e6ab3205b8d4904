//! Lattice packings of rigid Hopf pairs in the unit cube: single-generation
//! placement, the multi-generation radius schedule, constraint verification
//! with a spatial index, and density-exponent fits.
//!
//! Pairs in generation `i` use ring scale `r_i` (circle radius `2 * r_i`)
//! and sit at the centers of a cubic lattice of pitch `10 * r_i`. A pair's
//! bounding box spans `6 r` along x and `4 r` along y and z, so lattice
//! neighbors clear each other by `4 r` and boxes within one generation are
//! pairwise disjoint by construction. The radius schedule doubles and adds
//! the base separation each step, so per-generation counts decay by roughly
//! a factor of eight and the total stays within a constant of the first
//! generation's count.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    curve_min_distance, hopf_pair, GeometryError, PLLink, Point3, CANONICAL_SEGMENTS, DIST_TOL,
};

/// Lattice pitch as a multiple of the generation's ring scale. A pair needs
/// 6r across its widest axis, so pitch 10r leaves a 4r margin between
/// neighboring bounding boxes.
pub const PITCH_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum PackingError {
    #[error("epsilon must be positive and finite, got {epsilon}")]
    BadEpsilon { epsilon: f64 },
    #[error("epsilon {epsilon} too large: no separated pair fits the unit cube lattice")]
    EpsilonTooLarge { epsilon: f64 },
    #[error("generation count must be at least 1")]
    ZeroGenerations,
    #[error("constructed pair {index} in generation {generation} violates its separation constraint")]
    PairTooClose { generation: u32, index: usize },
    #[error("density fit needs at least 3 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("density fit epsilons must be strictly decreasing")]
    NotDecreasing,
    #[error("density fit samples need positive finite epsilon and count")]
    BadSample,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("bad packing JSON: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, PackingError>;

/// One lattice generation of Hopf pairs, all sharing a ring scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Generation {
    pub index: u32,
    /// Ring scale r: the pair's circles have radius 2r.
    pub radius: f64,
    pub pitch: f64,
    pub cells_per_axis: u32,
    pub links: Vec<PLLink>,
}

impl Generation {
    pub fn count(&self) -> usize {
        self.links.len()
    }
}

/// A full packing: every generation's pairs plus the base separation they
/// were all built to honor.
#[derive(Clone, Debug, PartialEq)]
pub struct Packing {
    pub epsilon: f64,
    pub generations: Vec<Generation>,
}

impl Packing {
    pub fn total_count(&self) -> usize {
        self.generations.iter().map(Generation::count).sum()
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawPacking {
            epsilon: self.epsilon,
            total_count: self.total_count(),
            generations: self
                .generations
                .iter()
                .map(|g| RawGeneration {
                    index: g.index,
                    radius: g.radius,
                    pitch: g.pitch,
                    cells_per_axis: g.cells_per_axis,
                    count: g.count(),
                    links: g
                        .links
                        .iter()
                        .map(|l| {
                            serde_json::from_str(&l.to_json_string())
                                .expect("link JSON round-trips")
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("packing serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Packing> {
        let raw: RawPacking = serde_json::from_str(text)?;
        let mut generations = Vec::with_capacity(raw.generations.len());
        for rg in raw.generations {
            let mut links = Vec::with_capacity(rg.links.len());
            for value in rg.links {
                links.push(PLLink::from_json_str(&value.to_string())?);
            }
            generations.push(Generation {
                index: rg.index,
                radius: rg.radius,
                pitch: rg.pitch,
                cells_per_axis: rg.cells_per_axis,
                links,
            });
        }
        Ok(Packing {
            epsilon: raw.epsilon,
            generations,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawPacking {
    epsilon: f64,
    total_count: usize,
    generations: Vec<RawGeneration>,
}

#[derive(Serialize, Deserialize)]
struct RawGeneration {
    index: u32,
    radius: f64,
    pitch: f64,
    cells_per_axis: u32,
    count: usize,
    links: Vec<serde_json::Value>,
}

fn build_generation(index: u32, radius: f64, epsilon: f64) -> Result<Option<Generation>> {
    let pitch = PITCH_FACTOR * radius;
    let m = ((1.0 / pitch) + 1e-9).floor() as u32;
    if m == 0 {
        return Ok(None);
    }
    let rho = 2.0 * radius;
    let mut links = Vec::with_capacity((m as usize).pow(3));
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let center = Point3::new(
                    (i as f64 + 0.5) * pitch,
                    (j as f64 + 0.5) * pitch,
                    (k as f64 + 0.5) * pitch,
                )?;
                let pair = hopf_pair(center, rho, CANONICAL_SEGMENTS)?
                    .with_constraint("r", "b", epsilon)?;
                let pair = PLLink::new(
                    format!("pair-{index}-{}", links.len()),
                    pair.components().to_vec(),
                    pair.constraints().to_vec(),
                )?;
                links.push(pair);
            }
        }
    }
    for (i, link) in links.iter().enumerate() {
        if !crate::geometry::constraints_satisfied(link) {
            return Err(PackingError::PairTooClose {
                generation: index,
                index: i,
            });
        }
    }
    Ok(Some(Generation {
        index,
        radius,
        pitch,
        cells_per_axis: m,
        links,
    }))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(PackingError::BadEpsilon { epsilon });
    }
    Ok(())
}

/// The base generation: canonical Hopf pairs of circle radius `2 * epsilon`
/// at lattice pitch `10 * epsilon`, every pair carrying and satisfying the
/// separation constraint `epsilon`.
pub fn generation0(epsilon: f64) -> Result<Generation> {
    check_epsilon(epsilon)?;
    build_generation(0, epsilon, epsilon)?.ok_or(PackingError::EpsilonTooLarge { epsilon })
}

/// Packs up to `max_generations` generations with ring scales
/// r_0 = epsilon and r_{i+1} = 2 r_i + epsilon (epsilon, 3 epsilon,
/// 7 epsilon, ...), stopping early once a scale no longer fits the cube.
pub fn multigeneration(epsilon: f64, max_generations: u32) -> Result<Packing> {
    check_epsilon(epsilon)?;
    if max_generations == 0 {
        return Err(PackingError::ZeroGenerations);
    }
    let mut generations = Vec::new();
    let mut radius = epsilon;
    for index in 0..max_generations {
        match build_generation(index, radius, epsilon)? {
            Some(generation) => generations.push(generation),
            None if index == 0 => return Err(PackingError::EpsilonTooLarge { epsilon }),
            None => break,
        }
        radius = 2.0 * radius + epsilon;
    }
    Ok(Packing {
        epsilon,
        generations,
    })
}

/// Distance check result for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub generation: u32,
    pub index: usize,
    pub min_dist: f64,
    pub ok: bool,
}

/// Outcome of [`verify_packing`]: every per-pair distance, the worst one,
/// within-generation bounding-box overlaps, and structural defects such as
/// missing component labels. Failures are reported here, never thrown.
#[derive(Clone, Debug, Serialize)]
pub struct PackingReport {
    pub epsilon: f64,
    pub pair_count: usize,
    pub min_pair_distance: f64,
    pub checks: Vec<PairCheck>,
    pub violations: Vec<PairCheck>,
    /// Overlapping bounding boxes within one generation, as
    /// (generation, pair, pair).
    pub box_overlaps: Vec<(u32, usize, usize)>,
    pub malformed: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Copy)]
struct Aabb {
    min: [f64; 3],
    max: [f64; 3],
}

impl Aabb {
    fn of_link(link: &PLLink) -> Aabb {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for component in link.components() {
            for p in component.vertices() {
                let c = p.coords();
                for axis in 0..3 {
                    min[axis] = min[axis].min(c[axis]);
                    max[axis] = max[axis].max(c[axis]);
                }
            }
        }
        Aabb { min, max }
    }

    fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|axis| self.min[axis] < other.max[axis] && other.min[axis] < self.max[axis])
    }
}

/// Within one generation, finds every pair of overlapping boxes. Each box is
/// inserted into the hash cells its extent touches; only boxes sharing a
/// cell are compared exactly, which keeps the scan near-linear when boxes
/// are lattice-spread.
fn overlapping_boxes(boxes: &[Aabb]) -> Vec<(usize, usize)> {
    let mut cell_size = 0.0f64;
    for b in boxes {
        for axis in 0..3 {
            cell_size = cell_size.max(b.max[axis] - b.min[axis]);
        }
    }
    if cell_size <= 0.0 {
        cell_size = 1.0;
    }
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let range = |lo: f64, hi: f64| {
        let a = (lo / cell_size).floor() as i64;
        let b = (hi / cell_size).floor() as i64;
        a..=b
    };
    let mut found = BTreeSet::new();
    for (i, b) in boxes.iter().enumerate() {
        for x in range(b.min[0], b.max[0]) {
            for y in range(b.min[1], b.max[1]) {
                for z in range(b.min[2], b.max[2]) {
                    for &j in buckets.entry((x, y, z)).or_default().iter() {
                        if boxes[j].overlaps(b) {
                            found.insert((j, i));
                        }
                    }
                    buckets.get_mut(&(x, y, z)).unwrap().push(i);
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Measures every pair against the separation `epsilon` and checks that
/// bounding boxes within each generation stay disjoint.
pub fn verify_packing(packing: &Packing, epsilon: f64) -> PackingReport {
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    let mut malformed = Vec::new();
    let mut box_overlaps = Vec::new();
    let mut min_pair_distance = f64::INFINITY;
    for generation in &packing.generations {
        let mut boxes = Vec::with_capacity(generation.links.len());
        for (index, link) in generation.links.iter().enumerate() {
            boxes.push(Aabb::of_link(link));
            let (red, blue) = match (link.component("r"), link.component("b")) {
                (Some(r), Some(b)) => (r, b),
                _ => {
                    malformed.push(format!(
                        "pair {index} in generation {} lacks components \"r\" and \"b\"",
                        generation.index
                    ));
                    continue;
                }
            };
            let min_dist = curve_min_distance(red, blue);
            min_pair_distance = min_pair_distance.min(min_dist);
            let check = PairCheck {
                generation: generation.index,
                index,
                min_dist,
                ok: min_dist >= epsilon - DIST_TOL,
            };
            if !check.ok {
                violations.push(check.clone());
            }
            checks.push(check);
        }
        for (i, j) in overlapping_boxes(&boxes) {
            box_overlaps.push((generation.index, i, j));
        }
    }
    let pass = violations.is_empty() && box_overlaps.is_empty() && malformed.is_empty();
    PackingReport {
        epsilon,
        pair_count: checks.len() + malformed.len(),
        min_pair_distance,
        checks,
        violations,
        box_overlaps,
        malformed,
        pass,
    }
}

/// Power-law fit of pair counts against the separation scale.
#[derive(Clone, Debug, Serialize)]
pub struct DensityFit {
    /// The measured (epsilon, count) samples.
    pub samples: Vec<(f64, f64)>,
    /// Slope of log(count) against log(1/epsilon).
    pub exponent: f64,
    pub r2: f64,
}

/// Least-squares slope of log(count) against log(1/epsilon) over raw
/// (epsilon, count) samples.
pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<DensityFit> {
    if samples.len() < 3 {
        return Err(PackingError::TooFewSamples { got: samples.len() });
    }
    for &(epsilon, count) in samples {
        if epsilon <= 0.0 || !epsilon.is_finite() || count <= 0.0 || !count.is_finite() {
            return Err(PackingError::BadSample);
        }
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(e, _)| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, c)| c.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let predicted = y_mean + slope * (x - x_mean);
            (y - predicted).powi(2)
        })
        .sum();
    // A flat sample set is fit perfectly by the constant line.
    let r2 = if ss_tot < 1e-30 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(DensityFit {
        samples: samples.to_vec(),
        exponent: slope,
        r2,
    })
}

/// True when every consecutive pair strictly decreases; NaN entries never
/// count as decreasing.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values
        .windows(2)
        .all(|w| matches!(w[1].partial_cmp(&w[0]), Some(std::cmp::Ordering::Less)))
}

/// Builds the base generation at each epsilon and fits the count growth.
/// Epsilons must be strictly decreasing, at least three of them.
pub fn density_fit(epsilons: &[f64]) -> Result<DensityFit> {
    if epsilons.len() < 3 {
        return Err(PackingError::TooFewSamples {
            got: epsilons.len(),
        });
    }
    if !strictly_decreasing(epsilons) {
        return Err(PackingError::NotDecreasing);
    }
    let mut samples = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        let generation = generation0(epsilon)?;
        samples.push((epsilon, generation.count() as f64));
    }
    fit_exponent(&samples)
}
