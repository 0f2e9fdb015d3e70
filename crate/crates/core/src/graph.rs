//! Undirected simple graphs on players, the graphical-model combinatorics that
//! sit on top of them and the cluster-graph approximations used for emptiness.
//!
//! Vertices are 0-based internally and 1-based in JSON and labels. Vertex sets
//! are `u64` bitmasks, which caps graphs at 64 vertices.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{state_label, GameFormat, StateIter};

pub const MAX_VERTICES: usize = 64;
pub const MAX_CLIQUE_VERTICES: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

fn mask(vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | (1u64 << v))
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let all = g.all();
        for v in 0..n {
            g.adj[v] = all & !(1 << v);
        }
        Ok(g)
    }

    /// Builds a graph from 0-based edges.
    pub fn with_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds a graph from 1-based edges.
    pub fn from_edges_1based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let shifted = edges
            .iter()
            .map(|&(a, b)| {
                if a == 0 || b == 0 {
                    Err(Error::InvalidGraph("vertices are numbered from 1".into()))
                } else {
                    Ok((a - 1, b - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_edges(n, &shifted)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidGraph(format!("edge {}-{} out of range", a + 1, b + 1)));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {}", a + 1)));
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits(self.adj[v]).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.adj[v] == 0
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|a| bits(self.adj[a] & !((2u64 << a) - 1)).map(move |b| (a, b))).collect()
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        let m = mask(vs);
        vs.iter().all(|&v| (self.adj[v] | 1 << v) & m == m)
    }

    pub fn is_complete(&self) -> bool {
        self.is_clique(&(0..self.n).collect::<Vec<_>>())
    }

    /// Connected components sorted by their smallest vertex; each is sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for v in 0..self.n {
            if seen >> v & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << v;
            let mut frontier = comp;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |m, u| m | self.adj[u]) & !comp;
                comp |= next;
                frontier = next;
            }
            seen |= comp;
            out.push(bits(comp).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// The subgraph induced on `vs` (relabelled `0..vs.len()` in the given order).
    pub fn induced(&self, vs: &[usize]) -> Result<Graph> {
        let mut g = Graph::empty(vs.len())?;
        for (i, &a) in vs.iter().enumerate() {
            for (j, &b) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j)?;
                }
            }
        }
        Ok(g)
    }

    /// Maximal cliques, sorted by smallest vertex, then size, then lexicographically.
    pub fn maximal_cliques(&self) -> Result<Vec<Vec<usize>>> {
        if self.n > MAX_CLIQUE_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "clique enumeration is limited to {MAX_CLIQUE_VERTICES} vertices, graph has {}",
                self.n
            )));
        }
        Ok(self.maximal_cliques_within(self.all()))
    }

    fn maximal_cliques_within(&self, within: u64) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.bron_kerbosch(0, within, 0, within, &mut out);
        let mut cliques: Vec<Vec<usize>> = out.into_iter().map(|c| bits(c).collect()).collect();
        cliques.sort_by(|a: &Vec<usize>, b| (a[0], a.len(), a).cmp(&(b[0], b.len(), b)));
        cliques
    }

    fn bron_kerbosch(&self, r: u64, mut p: u64, mut x: u64, within: u64, out: &mut Vec<u64>) {
        if p == 0 {
            if x == 0 {
                out.push(r);
            }
            return;
        }
        let pivot = bits(p | x).max_by_key(|&u| (self.adj[u] & p).count_ones()).unwrap();
        for v in bits(p & !self.adj[pivot]) {
            let nv = self.adj[v] & within;
            self.bron_kerbosch(r | 1 << v, p & nv, x & nv, within, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }

    /// Whether every path from `a` to `b` passes through `c`.
    pub fn separates(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
        let (ma, mb, mc) = (mask(a), mask(b), mask(c));
        if ma & mb != 0 || ma & mc != 0 || mb & mc != 0 {
            return Err(Error::OverlappingSets(format!("{} | {} | {}", label_set(a), label_set(b), label_set(c))));
        }
        if let Some(&v) = a.iter().chain(b).chain(c).find(|&&v| v >= self.n) {
            return Err(Error::InvalidGraph(format!("vertex {} out of range", v + 1)));
        }
        let open = self.all() & !mc;
        let mut reach = ma;
        let mut frontier = ma;
        while frontier != 0 {
            let next = bits(frontier).fold(0, |m, u| m | self.adj[u]) & open & !reach;
            reach |= next;
            frontier = next;
        }
        Ok(reach & mb == 0)
    }

    /// One statement `i ⊥ j | rest` for every non-adjacent pair `i < j`.
    pub fn pairwise_markov_statements(&self) -> Vec<CiStatement> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    let rest = (0..self.n).filter(|&v| v != i && v != j).collect();
                    out.push(CiStatement { i, j, rest });
                }
            }
        }
        out
    }

    pub fn cluster_structure(&self, format: &GameFormat) -> Result<ClusterStructure> {
        self.check_format(format)?;
        let mut components = Vec::new();
        for comp in self.components() {
            if !self.is_clique(&comp) {
                return Err(Error::NotCluster { component: comp.iter().map(|v| v + 1).collect() });
            }
            let d_product = comp.iter().map(|&v| format.d(v) as u64).product();
            let d_sum = comp.iter().map(|&v| format.d(v) as u64).sum();
            components.push(ClusterComponent { vertices: comp, d_product, d_sum });
        }
        Ok(ClusterStructure { components })
    }

    pub fn is_cluster(&self) -> bool {
        self.components().iter().all(|c| self.is_clique(c))
    }

    pub(crate) fn check_format(&self, format: &GameFormat) -> Result<()> {
        if format.players() != self.n {
            return Err(Error::FormatMismatch(format!(
                "graph has {} vertices, format has {} players",
                self.n,
                format.players()
            )));
        }
        Ok(())
    }

    /// The 0/1 matrix of the monomial parametrization: one row per (maximal clique,
    /// clique state), one column per global state, both in lexicographic order.
    pub fn parametrization_matrix(&self, format: &GameFormat) -> Result<ParamMatrix> {
        self.check_format(format)?;
        let cliques = self.maximal_cliques()?;
        let mut rows = Vec::new();
        for (c, clique) in cliques.iter().enumerate() {
            for state in StateIter::new(format.sub(clique)) {
                rows.push((c, state));
            }
        }
        let cols: Vec<Vec<usize>> = format.states().collect();
        let entries = rows
            .iter()
            .map(|(c, state)| {
                cols.iter().map(|col| cliques[*c].iter().zip(state).all(|(&v, &s)| col[v] == s) as u8).collect()
            })
            .collect();
        Ok(ParamMatrix { dims: format.dims().to_vec(), cliques, rows, cols, entries })
    }

    /// Vertices adjacent to every other vertex.
    pub fn universal_vertices(&self) -> Vec<usize> {
        let all = self.all();
        (0..self.n).filter(|&v| self.adj[v] | 1 << v == all).collect()
    }

    /// Splits off the universal vertices. Returns `None` when there are none; the
    /// remainder is empty when the graph is complete.
    pub fn universal_clique_peel(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let peel = self.universal_vertices();
        if peel.is_empty() {
            return None;
        }
        let rest = (0..self.n).filter(|v| !peel.contains(v)).collect();
        Some((peel, rest))
    }

    /// Smallest cluster graph containing this one: every component completed.
    pub fn cluster_supergraph(&self) -> Graph {
        let mut g = Graph { n: self.n, adj: vec![0; self.n] };
        for comp in self.components() {
            let m = mask(&comp);
            for &v in &comp {
                g.adj[v] = m & !(1 << v);
            }
        }
        g
    }

    /// A cluster subgraph found greedily: repeatedly take the uncovered vertex with the
    /// most strategies (lowest index on ties) and cover it with the largest clique of
    /// uncovered vertices containing it (lexicographically first on ties).
    pub fn cluster_subgraph(&self, format: &GameFormat) -> Result<Graph> {
        self.check_format(format)?;
        let mut uncovered = self.all();
        let mut g = Graph { n: self.n, adj: vec![0; self.n] };
        while uncovered != 0 {
            let v = bits(uncovered).max_by_key(|&v| (format.d(v), std::cmp::Reverse(v))).unwrap();
            let within = uncovered & (self.adj[v] | 1 << v);
            let best = self
                .maximal_cliques_within(within)
                .into_iter()
                .filter(|c| c.contains(&v))
                .min_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)))
                .unwrap_or_else(|| vec![v]);
            let m = mask(&best);
            for &u in &best {
                g.adj[u] = m & !(1 << u);
            }
            uncovered &= !m;
        }
        Ok(g)
    }

    /// Chordality via repeated elimination of simplicial vertices.
    pub(crate) fn is_chordal(&self) -> bool {
        let mut alive = self.all();
        while alive != 0 {
            let simplicial = bits(alive).find(|&v| {
                let nb: Vec<usize> = bits(self.adj[v] & alive).collect();
                nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| self.has_edge(a, b)))
            });
            match simplicial {
                Some(v) => alive &= !(1 << v),
                None => return false,
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.n,
            "edges": self.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("vertices")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing \"vertices\" count".into()))? as usize;
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"edges\" array".into()))?
            .iter()
            .map(|e| match e.as_array().map(|a| a.iter().map(Value::as_u64).collect::<Vec<_>>()) {
                Some(pair) if pair.len() == 2 && pair.iter().all(Option::is_some) => {
                    Ok((pair[0].unwrap() as usize, pair[1].unwrap() as usize))
                }
                _ => Err(Error::Parse(format!("bad edge {e}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges_1based(n, &edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    /// Inline syntax: `edges:2-3,3-4`, `edges:` (no edges), `complete` or `empty`.
    pub fn parse_inline(spec: &str, n: usize) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "complete" => Self::complete(n),
            "empty" | "none" => Self::empty(n),
            _ => {
                let list =
                    spec.strip_prefix("edges:").ok_or_else(|| Error::Parse(format!("unrecognised graph {spec:?}")))?;
                let mut pos = "edges:".len();
                let mut edges = Vec::new();
                for t in list.split(',') {
                    let bad = || Error::Parse(format!("bad edge {t:?} at column {}", pos + 1));
                    if !t.trim().is_empty() {
                        let (a, b) = t.split_once('-').ok_or_else(bad)?;
                        edges.push((
                            a.trim().parse::<usize>().map_err(|_| bad())?,
                            b.trim().parse::<usize>().map_err(|_| bad())?,
                        ));
                    }
                    pos += t.len() + 1;
                }
                Self::from_edges_1based(n, &edges)
            }
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
        write!(f, "Graph({}; {})", self.n, edges.join(","))
    }
}

pub(crate) fn label_set(vs: &[usize]) -> String {
    let inner: Vec<String> = vs.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// `i ⊥ j | rest` with 0-based vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiStatement {
    pub i: usize,
    pub j: usize,
    pub rest: Vec<usize>,
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {} | {}", self.i + 1, self.j + 1, label_set(&self.rest))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterComponent {
    pub vertices: Vec<usize>,
    /// Product of the strategy counts.
    pub d_product: u64,
    /// Sum of the strategy counts.
    pub d_sum: u64,
}

impl ClusterComponent {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_isolated_vertex(&self) -> bool {
        self.vertices.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterStructure {
    /// Components sorted by smallest vertex.
    pub components: Vec<ClusterComponent>,
}

impl ClusterStructure {
    pub fn isolated(&self) -> Vec<usize> {
        self.components.iter().filter(|c| c.is_isolated_vertex()).map(|c| c.vertices[0]).collect()
    }

    /// Index of the component holding vertex `v`.
    pub fn component_of(&self, v: usize) -> usize {
        self.components.iter().position(|c| c.vertices.contains(&v)).expect("vertex belongs to a component")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamMatrix {
    pub dims: Vec<usize>,
    pub cliques: Vec<Vec<usize>>,
    /// (clique index, clique state) per row.
    pub rows: Vec<(usize, Vec<usize>)>,
    pub cols: Vec<Vec<usize>>,
    pub entries: Vec<Vec<u8>>,
}

impl ParamMatrix {
    pub fn row_label(&self, r: usize) -> String {
        let (c, state) = &self.rows[r];
        let clique = &self.cliques[*c];
        let dims: Vec<usize> = clique.iter().map(|&v| self.dims[v]).collect();
        format!("{}:{}", label_set(clique), state_label(&dims, state))
    }

    pub fn col_label(&self, c: usize) -> String {
        state_label(&self.dims, &self.cols[c])
    }

    /// Header line with labels, then one line of space-separated 0/1 entries per row.
    pub fn to_text(&self) -> String {
        let rows: Vec<String> = (0..self.rows.len()).map(|r| self.row_label(r)).collect();
        let cols: Vec<String> = (0..self.cols.len()).map(|c| self.col_label(c)).collect();
        let mut out = format!("# rows: {} | cols: {}\n", rows.join(" "), cols.join(" "));
        for row in &self.entries {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}
