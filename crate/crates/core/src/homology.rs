//! Chain complexes of cubical regions over GF(2), first homology bases,
//! and snapping of curves to edge cycles.
//!
//! A region's complex carries the vertices, edges, and square faces of its
//! cells, each family sorted lexicographically by lattice coordinates and
//! axis. That fixed ordering drives every reduction below, so the homology
//! basis of a region is a pure function of its cell set: two equal regions
//! produce bit-identical bases, which is what makes certificates
//! comparable.
//!
//! The basis is built from a breadth-first spanning forest: fundamental
//! cycles of non-tree edges generate the cycle space, face boundaries span
//! the trivial part, and the fundamental cycles that survive reduction
//! against the face-boundary echelon become the basis. An echelon with
//! coefficient tracking is kept so later cycles can be expressed in the
//! basis without re-eliminating.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::geometry::PLCurve;
use crate::grid::{Grid, Region};
use crate::z2::{BitVec, Z2Matrix};

/// Edge-count ceiling for built complexes. Reduction keeps an echelon of up
/// to one row per face, so memory grows roughly as edges x faces / 8 bytes;
/// this cap keeps that in the hundreds of megabytes even for solid blocks.
pub const MAX_COMPLEX_EDGES: usize = 100_000;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("region has no cells")]
    EmptyRegion,
    #[error("complex would have {edges} edges, above the cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("curve vertex {index} lies in a cell outside the region")]
    CurveLeavesRegion { index: usize },
    #[error("no edge path between snapped vertices {from} and {to}; region is disconnected across the curve")]
    NoPathInRegion { from: usize, to: usize },
    #[error("chain is not a cycle (boundary is nonzero)")]
    NotACycle,
    #[error("chain length {got} does not match the complex edge count {want}")]
    WrongChainLength { got: usize, want: usize },
    #[error("cycle does not reduce to zero against the cycle space; it is not a cycle of this complex")]
    NotInCycleSpace,
}

type Result<T> = std::result::Result<T, HomologyError>;

/// Lattice corner coordinates, in grid units (0..=n per axis).
pub type Vertex = (u32, u32, u32);

/// An edge from its base vertex one step along `axis` (0 = x, 1 = y, 2 = z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub base: Vertex,
    pub axis: u8,
}

/// A unit square face normal to `normal`, spanned from its base vertex
/// along the other two axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Face {
    pub base: Vertex,
    pub normal: u8,
}

fn step(v: Vertex, axis: u8) -> Vertex {
    match axis {
        0 => (v.0 + 1, v.1, v.2),
        1 => (v.0, v.1 + 1, v.2),
        _ => (v.0, v.1, v.2 + 1),
    }
}

/// The cubical 2-complex of a region: cells contribute their corners,
/// edges, and square faces. Boundary operators are stored sparsely; the
/// first homology of the region only depends on this 2-skeleton.
pub struct CubicalComplex {
    grid: Grid,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    // edge id -> endpoint vertex ids (tail, head)
    edge_ends: Vec<(usize, usize)>,
    // face id -> four boundary edge ids
    face_edges: Vec<[usize; 4]>,
    // vertex id -> (edge id, neighbor vertex id), in edge order
    adjacency: Vec<Vec<(usize, usize)>>,
    vertex_ids: HashMap<Vertex, usize>,
}

pub fn build_complex(region: &Region) -> Result<CubicalComplex> {
    if region.cells().is_empty() {
        return Err(HomologyError::EmptyRegion);
    }
    let grid = *region.grid();
    let mut vertex_set: BTreeSet<Vertex> = BTreeSet::new();
    let mut edge_set: BTreeSet<Edge> = BTreeSet::new();
    let mut face_set: BTreeSet<Face> = BTreeSet::new();
    for cell in region.cells() {
        let (i, j, k) = (cell.i, cell.j, cell.k);
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    vertex_set.insert((i + di, j + dj, k + dk));
                }
            }
        }
        for (axis, spans) in [
            (0u8, [(0, 0), (0, 1), (1, 0), (1, 1)]),
            (1u8, [(0, 0), (0, 1), (1, 0), (1, 1)]),
            (2u8, [(0, 0), (0, 1), (1, 0), (1, 1)]),
        ] {
            for (da, db) in spans {
                let base = match axis {
                    0 => (i, j + da, k + db),
                    1 => (i + da, j, k + db),
                    _ => (i + da, j + db, k),
                };
                edge_set.insert(Edge { base, axis });
            }
        }
        for normal in 0..3u8 {
            for d in 0..2u32 {
                let base = match normal {
                    0 => (i + d, j, k),
                    1 => (i, j + d, k),
                    _ => (i, j, k + d),
                };
                face_set.insert(Face { base, normal });
            }
        }
    }
    if edge_set.len() > MAX_COMPLEX_EDGES {
        return Err(HomologyError::TooLarge {
            edges: edge_set.len(),
            cap: MAX_COMPLEX_EDGES,
        });
    }
    let vertices: Vec<Vertex> = vertex_set.into_iter().collect();
    let vertex_ids: HashMap<Vertex, usize> =
        vertices.iter().enumerate().map(|(n, &v)| (v, n)).collect();
    let edges: Vec<Edge> = edge_set.into_iter().collect();
    let edge_ids: HashMap<Edge, usize> = edges.iter().enumerate().map(|(n, &e)| (e, n)).collect();
    let faces: Vec<Face> = face_set.into_iter().collect();

    let mut edge_ends = Vec::with_capacity(edges.len());
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (eid, e) in edges.iter().enumerate() {
        let tail = vertex_ids[&e.base];
        let head = vertex_ids[&step(e.base, e.axis)];
        edge_ends.push((tail, head));
        adjacency[tail].push((eid, head));
        adjacency[head].push((eid, tail));
    }

    let mut face_edges = Vec::with_capacity(faces.len());
    for f in &faces {
        // The two in-plane axes, in increasing order.
        let (a, b) = match f.normal {
            0 => (1u8, 2u8),
            1 => (0, 2),
            _ => (0, 1),
        };
        let quad = [
            Edge { base: f.base, axis: a },
            Edge { base: f.base, axis: b },
            Edge { base: step(f.base, b), axis: a },
            Edge { base: step(f.base, a), axis: b },
        ];
        let ids = quad.map(|e| edge_ids[&e]);
        face_edges.push(ids);
    }

    let complex = CubicalComplex {
        grid,
        vertices,
        edges,
        faces,
        edge_ends,
        face_edges,
        adjacency,
        vertex_ids,
    };
    complex.check_boundary_composition()?;
    Ok(complex)
}

impl CubicalComplex {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        self.vertices[id]
    }

    /// Spatial position of a lattice vertex.
    pub fn vertex_position(&self, id: usize) -> [f64; 3] {
        let (i, j, k) = self.vertices[id];
        let h = self.grid.h();
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn edge_endpoints(&self, id: usize) -> (usize, usize) {
        self.edge_ends[id]
    }

    /// Edges incident to a vertex as `(edge id, other endpoint)`, ordered
    /// by edge id.
    pub fn edges_at(&self, vertex: usize) -> &[(usize, usize)] {
        &self.adjacency[vertex]
    }

    /// The vertex-by-edge boundary matrix, materialized densely. Meant for
    /// oracles and small complexes.
    pub fn boundary1_dense(&self) -> Z2Matrix {
        let mut m = Z2Matrix::zeros(self.vertices.len(), self.edges.len());
        for (eid, &(a, b)) in self.edge_ends.iter().enumerate() {
            m.set(a, eid, true);
            m.set(b, eid, true);
        }
        m
    }

    /// The edge-by-face boundary matrix, materialized densely.
    pub fn boundary2_dense(&self) -> Z2Matrix {
        let mut m = Z2Matrix::zeros(self.edges.len(), self.faces.len());
        for (fid, quad) in self.face_edges.iter().enumerate() {
            for &eid in quad {
                m.set(eid, fid, true);
            }
        }
        m
    }

    /// Boundary of a face as a sparse edge list.
    pub fn face_boundary(&self, face: usize) -> [usize; 4] {
        self.face_edges[face]
    }

    /// Verifies del1 of del2 = 0 without materializing matrices: each
    /// face's four edges must close up (every corner hit twice).
    fn check_boundary_composition(&self) -> Result<()> {
        for quad in &self.face_edges {
            let mut parity: HashMap<usize, u32> = HashMap::new();
            for &eid in quad {
                let (a, b) = self.edge_ends[eid];
                *parity.entry(a).or_insert(0) += 1;
                *parity.entry(b).or_insert(0) += 1;
            }
            if parity.values().any(|&c| c % 2 != 0) {
                // Unreachable for squares assembled above; kept as a hard
                // invariant so a future regression cannot slip through.
                return Err(HomologyError::NotACycle);
            }
        }
        Ok(())
    }

    /// Boundary of an edge chain: the set of odd-degree endpoints.
    fn chain_boundary_is_zero(&self, chain: &BitVec) -> bool {
        let mut odd: BTreeSet<usize> = BTreeSet::new();
        for eid in chain.iter_ones() {
            let (a, b) = self.edge_ends[eid];
            for v in [a, b] {
                if !odd.insert(v) {
                    odd.remove(&v);
                }
            }
        }
        odd.is_empty()
    }
}

/// Echelon rows with optional coordinate tracking: `None` rows come from
/// face boundaries (homologically trivial), `Some` rows from basis cycles.
struct TrackedEchelon {
    by_pivot: HashMap<usize, usize>,
    rows: Vec<(BitVec, Option<BitVec>)>,
}

impl TrackedEchelon {
    fn new() -> Self {
        TrackedEchelon {
            by_pivot: HashMap::new(),
            rows: Vec::new(),
        }
    }

    /// Reduces `row`, XORing tracked coordinates into `coeff`.
    fn reduce(&self, row: &mut BitVec, coeff: &mut BitVec) {
        while let Some(p) = row.first_one() {
            match self.by_pivot.get(&p) {
                Some(&idx) => {
                    row.xor_assign(&self.rows[idx].0);
                    if let Some(c) = &self.rows[idx].1 {
                        coeff.xor_assign(c);
                    }
                }
                None => break,
            }
        }
    }

    /// Inserts a reduced nonzero row. Panics if the pivot is taken, which
    /// cannot happen for rows that were just reduced.
    fn insert(&mut self, row: BitVec, coeff: Option<BitVec>) {
        let p = row.first_one().expect("inserted row must be nonzero");
        let prev = self.by_pivot.insert(p, self.rows.len());
        assert!(prev.is_none(), "duplicate pivot {p}");
        self.rows.push((row, coeff));
    }
}

/// A canonical basis of first homology classes of a complex, with the
/// reduction state needed to express any cycle in the basis.
pub struct H1Basis {
    cycles: Vec<BitVec>,
    echelon: TrackedEchelon,
    edge_count: usize,
}

impl H1Basis {
    pub fn dim(&self) -> usize {
        self.cycles.len()
    }

    /// Basis representative cycles as edge chains, in selection order.
    pub fn cycles(&self) -> &[BitVec] {
        &self.cycles
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

/// Computes the canonical H1 basis of a complex.
///
/// Deterministic: the spanning forest grows from the lowest vertex with
/// edges visited in index order, fundamental cycles are processed in
/// non-tree edge order, and face boundaries are inserted in face order.
pub fn h1_basis(complex: &CubicalComplex) -> H1Basis {
    let nv = complex.vertex_count();
    let ne = complex.edge_count();

    // Breadth-first spanning forest.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv]; // (edge, parent vertex)
    let mut visited = vec![false; nv];
    let mut tree_edge = BitVec::zeros(ne);
    for root in 0..nv {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(eid, w) in complex.edges_at(v) {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some((eid, v));
                    tree_edge.set(eid, true);
                    queue.push_back(w);
                }
            }
        }
    }

    // Face boundaries span the trivial cycles.
    let fundamental_count = ne - tree_edge.count_ones();
    let mut echelon = TrackedEchelon::new();
    for fid in 0..complex.face_count() {
        let mut chain = BitVec::zeros(ne);
        for &eid in &complex.face_boundary(fid) {
            chain.flip(eid);
        }
        let mut discard = BitVec::zeros(fundamental_count);
        echelon.reduce(&mut chain, &mut discard);
        if !chain.is_zero() {
            echelon.insert(chain, None);
        }
    }

    // Fundamental cycles that survive the face echelon form the basis.
    let mut cycles: Vec<BitVec> = Vec::new();
    let tree_path_to_root = |mut v: usize, chain: &mut BitVec| {
        while let Some((eid, up)) = parent[v] {
            chain.flip(eid);
            v = up;
        }
    };
    for eid in 0..ne {
        if tree_edge.get(eid) {
            continue;
        }
        let (a, b) = complex.edge_endpoints(eid);
        let mut chain = BitVec::zeros(ne);
        chain.set(eid, true);
        // Shared path segments above the meeting point cancel, leaving the
        // cycle through the tree.
        tree_path_to_root(a, &mut chain);
        tree_path_to_root(b, &mut chain);
        let mut coeff = BitVec::zeros(fundamental_count);
        echelon.reduce(&mut chain, &mut coeff);
        if !chain.is_zero() {
            let mut unit = BitVec::zeros(fundamental_count);
            unit.set(cycles.len(), true);
            cycles.push(chain.clone());
            echelon.insert(chain, Some(unit));
        }
    }

    // Shrink tracked coordinates to the final dimension; only the first
    // dim(H1) coordinate slots were ever used.
    let dim = cycles.len();
    let mut shrunk = TrackedEchelon::new();
    shrunk.by_pivot = echelon.by_pivot;
    shrunk.rows = echelon
        .rows
        .into_iter()
        .map(|(chain, coeff)| {
            let coeff = coeff.map(|c| {
                let mut small = BitVec::zeros(dim);
                for i in c.iter_ones() {
                    small.set(i, true);
                }
                small
            });
            (chain, coeff)
        })
        .collect();

    H1Basis {
        cycles,
        echelon: shrunk,
        edge_count: ne,
    }
}

/// Expresses a cycle in the basis: returns the coordinate vector `x` with
/// `cycle = sum x_p f_p` modulo face boundaries.
pub fn coordinates(cycle: &BitVec, basis: &H1Basis, complex: &CubicalComplex) -> Result<BitVec> {
    if cycle.len() != complex.edge_count() {
        return Err(HomologyError::WrongChainLength {
            got: cycle.len(),
            want: complex.edge_count(),
        });
    }
    if !complex.chain_boundary_is_zero(cycle) {
        return Err(HomologyError::NotACycle);
    }
    let mut residue = cycle.clone();
    let mut coeff = BitVec::zeros(basis.dim());
    basis.echelon.reduce(&mut residue, &mut coeff);
    if !residue.is_zero() {
        return Err(HomologyError::NotInCycleSpace);
    }
    Ok(coeff)
}

/// Snaps a closed curve to an edge cycle of the region's complex.
///
/// Each curve vertex maps to the nearest corner of its containing cell
/// (ties broken toward the lexicographically smallest corner); consecutive
/// corners are joined by breadth-first shortest edge paths inside the
/// complex. The resulting chain is a cycle homologous to the curve's class
/// in the region.
pub fn snap_to_cycle(
    curve: &PLCurve,
    region: &Region,
    complex: &CubicalComplex,
) -> Result<BitVec> {
    let grid = complex.grid();
    let mut corner_ids = Vec::with_capacity(curve.vertices().len());
    for (index, p) in curve.vertices().iter().enumerate() {
        let cell = grid.cell_of_point(p);
        if !region.contains(cell) {
            return Err(HomologyError::CurveLeavesRegion { index });
        }
        let mut best: Option<(f64, Vertex)> = None;
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    let corner = (cell.i + di, cell.j + dj, cell.k + dk);
                    let pos = [
                        corner.0 as f64 * grid.h(),
                        corner.1 as f64 * grid.h(),
                        corner.2 as f64 * grid.h(),
                    ];
                    let d2 = (pos[0] - p.x).powi(2)
                        + (pos[1] - p.y).powi(2)
                        + (pos[2] - p.z).powi(2);
                    let better = match &best {
                        None => true,
                        Some((bd, bc)) => d2 < *bd || (d2 == *bd && corner < *bc),
                    };
                    if better {
                        best = Some((d2, corner));
                    }
                }
            }
        }
        let (_, corner) = best.expect("a cell has corners");
        corner_ids.push(complex.vertex_ids[&corner]);
    }

    let mut chain = BitVec::zeros(complex.edge_count());
    let n = corner_ids.len();
    for i in 0..n {
        let from = corner_ids[i];
        let to = corner_ids[(i + 1) % n];
        if from == to {
            continue;
        }
        for eid in bfs_path(complex, from, to)? {
            chain.flip(eid);
        }
    }
    if !complex.chain_boundary_is_zero(&chain) {
        // Paths between consecutive snaps always telescope to a cycle.
        return Err(HomologyError::NotACycle);
    }
    Ok(chain)
}

/// Shortest edge path between two vertices, by breadth-first search with
/// neighbors visited in edge order.
fn bfs_path(complex: &CubicalComplex, from: usize, to: usize) -> Result<Vec<usize>> {
    let mut come_from: Vec<Option<(usize, usize)>> = vec![None; complex.vertex_count()];
    let mut visited = vec![false; complex.vertex_count()];
    visited[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut at = to;
            while at != from {
                let (eid, prev) = come_from[at].expect("walked vertices have parents");
                path.push(eid);
                at = prev;
            }
            path.reverse();
            return Ok(path);
        }
        for &(eid, w) in complex.edges_at(v) {
            if !visited[w] {
                visited[w] = true;
                come_from[w] = Some((eid, v));
                queue.push_back(w);
            }
        }
    }
    Err(HomologyError::NoPathInRegion { from, to })
}
