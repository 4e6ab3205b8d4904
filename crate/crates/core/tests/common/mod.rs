//! Independent oracles for the acceptance suite. These recompute results
//! with methods unrelated to the library's own algorithms: numerical
//! quadrature for linking numbers and dense elimination for homology
//! ranks.

use linkpack::geometry::PLCurve;
use linkpack::homology::CubicalComplex;

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The Gauss linking integral of two closed polygonal curves, evaluated
/// by per-segment-pair quadrature. Converges to the linking number for
/// disjoint curves.
pub fn gauss_linking(a: &PLCurve, b: &PLCurve) -> f64 {
    let mut sum = 0.0;
    for (p0, p1) in a.segments() {
        let (p0, p1) = (p0.coords(), p1.coords());
        let u = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
        for (q0, q1) in b.segments() {
            let (q0, q1) = (q0.coords(), q1.coords());
            let w = [q1[0] - q0[0], q1[1] - q0[1], q1[2] - q0[2]];
            let uw = cross(u, w);
            for (si, &s) in GL_NODES.iter().enumerate() {
                let sf = 0.5 * (s + 1.0);
                let p = [p0[0] + sf * u[0], p0[1] + sf * u[1], p0[2] + sf * u[2]];
                for (ti, &t) in GL_NODES.iter().enumerate() {
                    let tf = 0.5 * (t + 1.0);
                    let q = [q0[0] + tf * w[0], q0[1] + tf * w[1], q0[2] + tf * w[2]];
                    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
                    let r = dot(d, d).sqrt();
                    sum += 0.25 * GL_WEIGHTS[si] * GL_WEIGHTS[ti] * dot(d, uw) / (r * r * r);
                }
            }
        }
    }
    sum / (4.0 * std::f64::consts::PI)
}

/// Rows of bits packed into words, with plain Gaussian elimination.
struct BitRows {
    width: usize,
    rows: Vec<Vec<u64>>,
}

impl BitRows {
    fn new(width: usize) -> BitRows {
        BitRows {
            width,
            rows: Vec::new(),
        }
    }

    fn push_row(&mut self, ones: &[usize]) {
        let mut row = vec![0u64; self.width.div_ceil(64)];
        for &i in ones {
            row[i / 64] ^= 1u64 << (i % 64);
        }
        self.rows.push(row);
    }

    fn rank(mut self) -> usize {
        let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
        for mut row in self.rows.drain(..) {
            while let Some(lead) = first_one(&row) {
                match pivots.iter().find(|(p, _)| *p == lead) {
                    Some((_, basis)) => {
                        for (a, b) in row.iter_mut().zip(basis) {
                            *a ^= b;
                        }
                    }
                    None => {
                        pivots.push((lead, row));
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

fn first_one(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// First homology dimension over GF(2) by dense elimination on the raw
/// boundary maps: dim ker d1 minus rank d2.
pub fn dense_h1_dim(complex: &CubicalComplex) -> usize {
    let mut d1 = BitRows::new(complex.vertex_count());
    for e in 0..complex.edge_count() {
        let (a, b) = complex.edge_endpoints(e);
        d1.push_row(&[a, b]);
    }
    let mut d2 = BitRows::new(complex.edge_count());
    for f in 0..complex.face_count() {
        let edges = complex.face_boundary(f);
        d2.push_row(&edges);
    }
    let rank1 = d1.rank();
    let rank2 = d2.rank();
    complex.edge_count() - rank1 - rank2
}

/// Checks d1 d2 = 0 directly: the endpoint sets of each face's four edges
/// cancel in pairs.
pub fn boundary_square_is_zero(complex: &CubicalComplex) -> bool {
    for f in 0..complex.face_count() {
        let mut ones = std::collections::BTreeMap::new();
        for e in complex.face_boundary(f) {
            let (a, b) = complex.edge_endpoints(e);
            for v in [a, b] {
                *ones.entry(v).or_insert(0u32) += 1;
            }
        }
        if ones.values().any(|c| c % 2 != 0) {
            return false;
        }
    }
    true
}
