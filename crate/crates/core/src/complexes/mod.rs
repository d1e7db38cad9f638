//! Oriented simplicial complexes of dimension ≤ 3 with geometric charts.
//!
//! Simplices are stored as ascending vertex tuples; a simplex is positively
//! oriented per its sorted tuple and boundary signs come from position
//! parity. Every constructed complex is face-closed and connected.

pub mod builders;
pub mod chart;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ComplexError;
pub use chart::{ChartKind, ModelPoint, VertexGeom};

/// Reference to one cell of a complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexRef {
    Vertex(usize),
    Edge(usize),
    Triangle(usize),
    Tet(usize),
}

/// A point of the geometric realization: a cell plus barycentric weights.
#[derive(Debug, Clone)]
pub struct Point {
    pub simplex: SimplexRef,
    pub bary: Vec<f64>,
}

impl Point {
    pub fn vertex(v: usize) -> Point {
        Point { simplex: SimplexRef::Vertex(v), bary: vec![1.0] }
    }

    pub fn on_edge(e: usize, s: f64) -> Point {
        Point { simplex: SimplexRef::Edge(e), bary: vec![1.0 - s, s] }
    }
}

/// Oriented simplicial complex with a chart.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    geoms: Vec<VertexGeom>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tets: Vec<[usize; 4]>,
    edge_index: BTreeMap<[usize; 2], usize>,
    triangle_index: BTreeMap<[usize; 3], usize>,
    basepoint: usize,
    chart: ChartKind,
    chart_id: String,
}

impl SimplicialComplex {
    /// Builds a complex from top-dimensional cells (plus any explicitly
    /// listed lower cells), closing under faces and validating.
    pub fn from_cells(
        geoms: Vec<VertexGeom>,
        cells: &CellLists,
        basepoint: usize,
        chart: ChartKind,
        chart_id: String,
    ) -> Result<SimplicialComplex, ComplexError> {
        let nv = geoms.len();
        if nv == 0 {
            return Err(ComplexError::Invalid("no vertices".into()));
        }
        if basepoint >= nv {
            return Err(ComplexError::Invalid("basepoint out of range".into()));
        }
        let mut edges: BTreeSet<[usize; 2]> = BTreeSet::new();
        let mut triangles: BTreeSet<[usize; 3]> = BTreeSet::new();
        let mut tets: BTreeSet<[usize; 4]> = BTreeSet::new();

        let check = |vs: &[usize]| -> Result<(), ComplexError> {
            let mut sorted = vs.to_vec();
            sorted.dedup();
            if sorted.len() != vs.len() {
                return Err(ComplexError::Invalid(format!("degenerate simplex {vs:?}")));
            }
            if vs.iter().any(|&v| v >= nv) {
                return Err(ComplexError::Invalid(format!("vertex out of range in {vs:?}")));
            }
            Ok(())
        };

        for t in &cells.tets {
            let mut t = *t;
            t.sort_unstable();
            check(&t)?;
            tets.insert(t);
        }
        for f in &cells.triangles {
            let mut f = *f;
            f.sort_unstable();
            check(&f)?;
            triangles.insert(f);
        }
        for e in &cells.edges {
            let mut e = *e;
            e.sort_unstable();
            check(&e)?;
            edges.insert(e);
        }
        for t in &tets {
            for k in 0..4 {
                let mut f = [0; 3];
                let mut idx = 0;
                for (j, &v) in t.iter().enumerate() {
                    if j != k {
                        f[idx] = v;
                        idx += 1;
                    }
                }
                triangles.insert(f);
            }
        }
        for f in &triangles {
            edges.insert([f[0], f[1]]);
            edges.insert([f[0], f[2]]);
            edges.insert([f[1], f[2]]);
        }

        let edges: Vec<[usize; 2]> = edges.into_iter().collect();
        let triangles: Vec<[usize; 3]> = triangles.into_iter().collect();
        let tets: Vec<[usize; 4]> = tets.into_iter().collect();

        // Connectivity over the 1-skeleton.
        let mut adjacency = vec![Vec::new(); nv];
        for e in &edges {
            adjacency[e[0]].push(e[1]);
            adjacency[e[1]].push(e[0]);
        }
        let mut seen = vec![false; nv];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != nv {
            return Err(ComplexError::Disconnected);
        }

        let edge_index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let triangle_index = triangles.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        Ok(SimplicialComplex {
            geoms,
            edges,
            triangles,
            tets,
            edge_index,
            triangle_index,
            basepoint,
            chart,
            chart_id,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.geoms.len()
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }
    pub fn basepoint(&self) -> usize {
        self.basepoint
    }
    pub fn chart_kind(&self) -> ChartKind {
        self.chart
    }
    pub fn chart_id(&self) -> &str {
        &self.chart_id
    }
    pub fn vertex_geom(&self, v: usize) -> &VertexGeom {
        &self.geoms[v]
    }
    pub fn edge_index(&self, e: [usize; 2]) -> Option<usize> {
        self.edge_index.get(&e).copied()
    }
    pub fn triangle_index(&self, f: [usize; 3]) -> Option<usize> {
        self.triangle_index.get(&f).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
            - self.tets.len() as i64
    }

    fn simplex_vertices(&self, s: SimplexRef) -> Vec<usize> {
        match s {
            SimplexRef::Vertex(v) => vec![v],
            SimplexRef::Edge(e) => self.edges[e].to_vec(),
            SimplexRef::Triangle(f) => self.triangles[f].to_vec(),
            SimplexRef::Tet(t) => self.tets[t].to_vec(),
        }
    }

    /// Chart evaluation: model coordinates of a barycentric point.
    pub fn model_point(&self, p: &Point) -> ModelPoint {
        let vs = self.simplex_vertices(p.simplex);
        assert_eq!(vs.len(), p.bary.len(), "barycentric length mismatch");
        let sum: f64 = p.bary.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "barycentric sum {sum} ≠ 1");
        let geoms: Vec<&VertexGeom> = vs.iter().map(|&v| &self.geoms[v]).collect();
        chart::interpolate(self.chart, &geoms, &p.bary)
    }

    /// Integer boundary matrices and oriented 2-cell boundary loops.
    pub fn boundary_data(&self) -> BoundaryData {
        let nv = self.vertex_count();
        let ne = self.edges.len();
        let nf = self.triangles.len();
        let nt = self.tets.len();

        let mut d1 = IntMatrixSmall::zeros(nv, ne);
        for (j, e) in self.edges.iter().enumerate() {
            // ∂(uv) = v − u for u < v.
            d1.add(e[1], j, 1);
            d1.add(e[0], j, -1);
        }
        let mut d2 = IntMatrixSmall::zeros(ne, nf);
        for (j, f) in self.triangles.iter().enumerate() {
            let faces = [[f[1], f[2]], [f[0], f[2]], [f[0], f[1]]];
            for (k, face) in faces.iter().enumerate() {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let ei = self.edge_index[face];
                d2.add(ei, j, sign);
            }
        }
        let mut d3 = IntMatrixSmall::zeros(nf, nt);
        for (j, t) in self.tets.iter().enumerate() {
            for k in 0..4 {
                let mut f = [0; 3];
                let mut idx = 0;
                for (m, &v) in t.iter().enumerate() {
                    if m != k {
                        f[idx] = v;
                        idx += 1;
                    }
                }
                let sign = if k % 2 == 0 { 1 } else { -1 };
                d3.add(self.triangle_index[&f], j, sign);
            }
        }

        // Boundary loop of triangle (a, b, c): a → b → c → a, anchored at the
        // minimal vertex a.
        let loops = self
            .triangles
            .iter()
            .map(|f| {
                let (a, b, c) = (f[0], f[1], f[2]);
                BoundaryLoop {
                    base: a,
                    steps: vec![
                        LoopStep { edge: self.edge_index[&[a, b]], forward: true },
                        LoopStep { edge: self.edge_index[&[b, c]], forward: true },
                        LoopStep { edge: self.edge_index[&[a, c]], forward: false },
                    ],
                }
            })
            .collect();

        BoundaryData { d1, d2, d3, loops }
    }

    /// Breadth-first spanning tree rooted at the basepoint, visiting
    /// neighbors in ascending vertex order.
    pub fn spanning_tree(&self) -> SpanningTree {
        let nv = self.vertex_count();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for (i, e) in self.edges.iter().enumerate() {
            adjacency[e[0]].push((e[1], i));
            adjacency[e[1]].push((e[0], i));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let root = self.basepoint;
        let mut parent = vec![None; nv];
        let mut parent_edge = vec![None; nv];
        let mut order = vec![root];
        let mut seen = vec![false; nv];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, ei) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    parent_edge[w] = Some(ei);
                    order.push(w);
                }
            }
        }
        debug_assert_eq!(order.len(), nv, "complex is connected by construction");
        let tree_edges: BTreeSet<usize> = parent_edge.iter().flatten().copied().collect();
        let non_tree_edges = (0..self.edges.len())
            .filter(|i| !tree_edges.contains(i))
            .collect();
        SpanningTree { root, parent, parent_edge, order, tree_edges, non_tree_edges }
    }

    /// One round of edge-midpoint subdivision: edges bisect at chart
    /// midpoints, triangles split 1→4, tetrahedra 1→8.
    pub fn subdivide(&self) -> SimplicialComplex {
        let nv = self.vertex_count();
        let mut geoms = self.geoms.clone();
        for e in &self.edges {
            geoms.push(chart::edge_midpoint(
                self.chart,
                &self.geoms[e[0]],
                &self.geoms[e[1]],
            ));
        }
        let mid = |a: usize, b: usize| -> usize {
            let key = if a < b { [a, b] } else { [b, a] };
            nv + self.edge_index[&key]
        };

        let mut cells = CellLists::default();
        if self.tets.is_empty() && self.triangles.is_empty() {
            for e in &self.edges {
                let m = mid(e[0], e[1]);
                cells.edges.push([e[0], m]);
                cells.edges.push([m, e[1]]);
            }
        }
        for f in &self.triangles {
            let (a, b, c) = (f[0], f[1], f[2]);
            let (mab, mac, mbc) = (mid(a, b), mid(a, c), mid(b, c));
            cells.triangles.push([a, mab, mac]);
            cells.triangles.push([b, mab, mbc]);
            cells.triangles.push([c, mac, mbc]);
            cells.triangles.push([mab, mac, mbc]);
        }
        for t in &self.tets {
            let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
            let (mab, mac, mad) = (mid(a, b), mid(a, c), mid(a, d));
            let (mbc, mbd, mcd) = (mid(b, c), mid(b, d), mid(c, d));
            cells.tets.push([a, mab, mac, mad]);
            cells.tets.push([b, mab, mbc, mbd]);
            cells.tets.push([c, mac, mbc, mcd]);
            cells.tets.push([d, mad, mbd, mcd]);
            // Central octahedron {mab, mac, mad, mbc, mbd, mcd}: split along
            // the diagonal from its smallest vertex, which is mab since edges
            // are indexed lexicographically. The four faces opposite the
            // diagonal (mab, mcd) each span a tetrahedron with it.
            cells.tets.push([mab, mac, mad, mcd]);
            cells.tets.push([mab, mac, mbc, mcd]);
            cells.tets.push([mab, mad, mbd, mcd]);
            cells.tets.push([mab, mbc, mbd, mcd]);
        }

        let chart_id = bump_subdiv(&self.chart_id);
        SimplicialComplex::from_cells(geoms, &cells, self.basepoint, self.chart, chart_id)
            .expect("subdivision of a valid complex is valid")
    }

    /// Serializes to the complex file format.
    pub fn to_json(&self) -> serde_json::Value {
        let simplices = serde_json::json!({
            "1": self.edges,
            "2": self.triangles,
            "3": self.tets,
        });
        serde_json::json!({
            "vertices": self.vertex_count(),
            "simplices": simplices,
            "basepoint": self.basepoint,
            "chart": self.chart_id,
        })
    }

    /// Loads a complex from the file format, rebuilding the chart geometry
    /// from the chart identifier and validating that the stored simplices
    /// match the rebuilt complex exactly.
    pub fn from_json(value: &serde_json::Value) -> Result<SimplicialComplex, ComplexError> {
        let file: ComplexFile = serde_json::from_value(value.clone())
            .map_err(|e| ComplexError::Format(e.to_string()))?;
        let rebuilt = builders::from_chart_id(&file.chart)?;
        if rebuilt.vertex_count() != file.vertices {
            return Err(ComplexError::Format(format!(
                "vertex count {} does not match chart `{}` ({})",
                file.vertices,
                file.chart,
                rebuilt.vertex_count()
            )));
        }
        if rebuilt.basepoint != file.basepoint {
            return Err(ComplexError::Format("basepoint mismatch".into()));
        }
        let sort2 = |mut v: Vec<[usize; 2]>| {
            v.iter_mut().for_each(|e| e.sort_unstable());
            v.sort_unstable();
            v
        };
        let sort3 = |mut v: Vec<[usize; 3]>| {
            v.iter_mut().for_each(|e| e.sort_unstable());
            v.sort_unstable();
            v
        };
        let sort4 = |mut v: Vec<[usize; 4]>| {
            v.iter_mut().for_each(|e| e.sort_unstable());
            v.sort_unstable();
            v
        };
        if sort2(file.simplices.edges) != rebuilt.edges
            || sort3(file.simplices.triangles) != rebuilt.triangles
            || sort4(file.simplices.tets) != rebuilt.tets
        {
            return Err(ComplexError::Format(
                "stored simplices do not match the chart's complex".into(),
            ));
        }
        Ok(rebuilt)
    }
}

fn bump_subdiv(chart_id: &str) -> String {
    if let Some((head, tail)) = chart_id.rsplit_once(":subdiv=") {
        let n: u32 = tail.parse().unwrap_or(0);
        format!("{head}:subdiv={}", n + 1)
    } else {
        format!("{chart_id}:subdiv=1")
    }
}

#[derive(Debug, Default, Clone)]
pub struct CellLists {
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub tets: Vec<[usize; 4]>,
}

#[derive(Deserialize)]
struct ComplexFile {
    vertices: usize,
    simplices: SimplicesFile,
    basepoint: usize,
    chart: String,
}

#[derive(Deserialize, Serialize)]
struct SimplicesFile {
    #[serde(rename = "1", default)]
    edges: Vec<[usize; 2]>,
    #[serde(rename = "2", default)]
    triangles: Vec<[usize; 3]>,
    #[serde(rename = "3", default)]
    tets: Vec<[usize; 4]>,
}

/// Small dense integer matrix for boundary operators.
#[derive(Debug, Clone, PartialEq)]
pub struct IntMatrixSmall {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrixSmall {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrixSmall { rows, cols, data: vec![0; rows * cols] }
    }
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }
    pub fn add(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] += v;
    }
    pub fn mul(&self, other: &IntMatrixSmall) -> IntMatrixSmall {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrixSmall::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Rank over the rationals by fraction-free elimination.
    pub fn rational_rank(&self) -> usize {
        let mut m: Vec<Vec<i128>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as i128).collect())
            .collect();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            let piv = (row..self.rows).find(|&r| m[r][col] != 0);
            let Some(p) = piv else { continue };
            m.swap(row, p);
            for r in 0..self.rows {
                if r != row && m[r][col] != 0 {
                    let (a, b) = (m[row][col], m[r][col]);
                    for c in 0..self.cols {
                        m[r][c] = m[r][c] * a - m[row][c] * b;
                    }
                    // Reduce growth: divide the row by its gcd.
                    let mut g: i128 = 0;
                    for c in 0..self.cols {
                        g = gcd_i128(g, m[r][c]);
                    }
                    if g > 1 {
                        for c in 0..self.cols {
                            m[r][c] /= g;
                        }
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One step of a 2-cell boundary loop: an edge traversed with or against its
/// canonical (ascending) orientation.
#[derive(Debug, Clone, Copy)]
pub struct LoopStep {
    pub edge: usize,
    pub forward: bool,
}

/// Oriented boundary loop of a 2-cell, anchored at its minimal vertex.
#[derive(Debug, Clone)]
pub struct BoundaryLoop {
    pub base: usize,
    pub steps: Vec<LoopStep>,
}

/// Boundary operators plus the per-2-cell oriented loops.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub d1: IntMatrixSmall,
    pub d2: IntMatrixSmall,
    pub d3: IntMatrixSmall,
    pub loops: Vec<BoundaryLoop>,
}

/// Breadth-first spanning tree of the 1-skeleton.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub parent_edge: Vec<Option<usize>>,
    /// Vertices in BFS discovery order (root first).
    pub order: Vec<usize>,
    pub tree_edges: BTreeSet<usize>,
    pub non_tree_edges: Vec<usize>,
}
