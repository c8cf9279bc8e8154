//! Undirected, unweighted graphs and the classical DkS machinery.
//!
//! Adjacency is stored as one bitset row per vertex so degree and neighbour
//! queries stay cheap for the dense random graphs used in experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest graph accepted by the sampling pipeline (click patterns are `u64` masks).
pub const MAX_SAMPLING_VERTICES: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("graph needs at least one vertex".into()));
        }
        let words = n.div_ceil(64);
        Ok(Self {
            n,
            words,
            rows: vec![0; n * words],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Builds a graph from an edge list, rejecting self-loops and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Validation(format!(
                    "edge [{i}, {j}] out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::Validation(format!("self-loop at vertex {i}")));
            }
            g.set_edge(i, j);
        }
        Ok(g)
    }

    /// Builds a graph from a dense 0/1 matrix, validating symmetry and the zero diagonal.
    pub fn from_adjacency(adj: &[Vec<u8>]) -> Result<Self> {
        let n = adj.len();
        let mut g = Self::empty(n)?;
        for (i, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!("row {i} has length {}", row.len())));
            }
            for (j, &a) in row.iter().enumerate() {
                match a {
                    0 => {}
                    1 if i == j => return Err(Error::Validation(format!("self-loop at vertex {i}"))),
                    1 => {
                        if adj[j][i] != 1 {
                            return Err(Error::Validation(format!("asymmetric entry ({i}, {j})")));
                        }
                        g.set_edge(i, j);
                    }
                    _ => return Err(Error::Validation(format!("non-binary entry at ({i}, {j})"))),
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    fn set_edge(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Neighbour mask of `v`; only meaningful for graphs with at most 64 vertices.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.rows[v * self.words]
    }

    /// Dense symmetric adjacency matrix.
    pub fn adjacency_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| {
            if self.has_edge(i, j) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Number of edges with both endpoints in `vertices`.
    pub fn edges_within(&self, vertices: &[usize]) -> usize {
        let mut count = 0;
        for (a, &i) in vertices.iter().enumerate() {
            for &j in &vertices[a + 1..] {
                if self.has_edge(i, j) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Density of the subgraph induced by `vertices` (0 for fewer than two vertices).
    pub fn density_of(&self, vertices: &[usize]) -> f64 {
        let k = vertices.len();
        if k < 2 {
            return 0.0;
        }
        2.0 * self.edges_within(vertices) as f64 / (k * (k - 1)) as f64
    }

    /// Density of the subgraph induced by a vertex mask (graphs with at most 64 vertices).
    pub fn density_of_mask(&self, mask: u64) -> f64 {
        let k = mask.count_ones() as usize;
        if k < 2 {
            return 0.0;
        }
        let mut twice_edges = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice_edges += (self.neighbor_mask(v) & mask).count_ones() as usize;
        }
        twice_edges as f64 / (k * (k - 1)) as f64
    }
}

/// An ordered set of distinct vertices of a parent graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphSelection {
    vertices: Vec<usize>,
    parent_n: usize,
}

impl SubgraphSelection {
    pub fn new(vertices: Vec<usize>, parent_n: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Selection("selection is empty".into()));
        }
        let mut seen = vec![false; parent_n];
        for &v in &vertices {
            if v >= parent_n {
                return Err(Error::Selection(format!(
                    "vertex {v} out of range for a graph with {parent_n} vertices"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Selection(format!("vertex {v} selected twice")));
            }
        }
        Ok(Self { vertices, parent_n })
    }

    pub fn from_mask(mask: u64, parent_n: usize) -> Result<Self> {
        Self::new(mask_to_vertices(mask), parent_n)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn parent_n(&self) -> usize {
        self.parent_n
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn to_mask(&self) -> u64 {
        self.vertices.iter().fold(0, |m, &v| m | (1 << v))
    }

    fn check_parent(&self, g: &Graph) -> Result<()> {
        if self.parent_n != g.n() {
            return Err(Error::Selection(format!(
                "selection is over {} vertices but graph has {}",
                self.parent_n,
                g.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn mask_to_vertices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Erdős–Rényi-style generator visiting every ordered pair `(i, j != i)`.
///
/// Each visit draws `r` uniform on `[0, 1)` and adds the (undirected) edge when
/// `r < rho / 2`. Because every unordered pair is visited twice, the effective
/// edge probability is `rho - rho^2 / 4` (0.36 for a nominal `rho = 0.4`).
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Result<Graph> {
    if !(rho >= 0.0) {
        return Err(Error::Parameter(format!("rho must be non-negative, got {rho}")));
    }
    let mut g = Graph::empty(n)?;
    let threshold = rho / 2.0;
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let r: f64 = rng.random();
            if r < threshold {
                g.set_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Seeded convenience wrapper around [`erdos_renyi`].
pub fn erdos_renyi_seeded(n: usize, rho: f64, seed: u64) -> Result<Graph> {
    erdos_renyi(n, rho, &mut crate::rng::seeded(seed))
}

/// Edge density `2|E| / (n (n - 1))`.
pub fn density(g: &Graph) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::DegenerateGraph(format!(
            "density needs at least two vertices, graph has {}",
            g.n()
        )));
    }
    Ok(2.0 * g.edge_count() as f64 / (g.n() * (g.n() - 1)) as f64)
}

/// Subgraph induced by `sel`, relabelled `0..k` in selection order.
pub fn induced_subgraph(g: &Graph, sel: &SubgraphSelection) -> Result<Graph> {
    sel.check_parent(g)?;
    let vs = sel.vertices();
    let mut out = Graph::empty(vs.len())?;
    for (a, &i) in vs.iter().enumerate() {
        for (b, &j) in vs.iter().enumerate().skip(a + 1) {
            if g.has_edge(i, j) {
                out.set_edge(a, b);
            }
        }
    }
    Ok(out)
}

/// Connects every pair of `members`, leaving all other pairs untouched.
pub fn plant_clique(g: &Graph, members: &SubgraphSelection) -> Result<Graph> {
    members.check_parent(g)?;
    let mut out = g.clone();
    let vs = members.vertices();
    for (a, &i) in vs.iter().enumerate() {
        for &j in &vs[a + 1..] {
            out.set_edge(i, j);
        }
    }
    Ok(out)
}

/// Plants a clique on `size` vertices drawn uniformly at random.
pub fn plant_random_clique<R: Rng + ?Sized>(
    g: &Graph,
    size: usize,
    rng: &mut R,
) -> Result<(Graph, SubgraphSelection)> {
    if size == 0 || size > g.n() {
        return Err(Error::Parameter(format!(
            "clique size {size} out of range for n = {}",
            g.n()
        )));
    }
    let mut vs = rand::seq::index::sample(rng, g.n(), size).into_vec();
    vs.sort_unstable();
    let members = SubgraphSelection::new(vs, g.n())?;
    Ok((plant_clique(g, &members)?, members))
}

/// Peels minimum-degree vertices (ties: smallest index) from `alive` until `k` remain.
fn peel(g: &Graph, alive: &mut Vec<usize>, k: usize) {
    let mut degree: Vec<usize> = alive
        .iter()
        .map(|&v| alive.iter().filter(|&&u| g.has_edge(u, v)).count())
        .collect();
    while alive.len() > k {
        let mut pos = 0;
        for p in 1..alive.len() {
            if degree[p] < degree[pos] || (degree[p] == degree[pos] && alive[p] < alive[pos]) {
                pos = p;
            }
        }
        let removed = alive.swap_remove(pos);
        degree.swap_remove(pos);
        for (p, &u) in alive.iter().enumerate() {
            if g.has_edge(u, removed) {
                degree[p] -= 1;
            }
        }
    }
    alive.sort_unstable();
}

/// Deterministic greedy baseline: repeatedly delete a minimum-degree vertex.
pub fn greedy_peel(g: &Graph, k: usize) -> Result<SubgraphSelection> {
    if k == 0 || k > g.n() {
        return Err(Error::Parameter(format!("k = {k} out of range 1..={}", g.n())));
    }
    let mut alive: Vec<usize> = (0..g.n()).collect();
    peel(g, &mut alive, k);
    SubgraphSelection::new(alive, g.n())
}

/// Shrinks `sel` to `k` vertices by peeling within the induced subgraph.
pub fn shrink_to_k(g: &Graph, sel: &SubgraphSelection, k: usize) -> Result<SubgraphSelection> {
    sel.check_parent(g)?;
    if k == 0 || sel.len() < k {
        return Err(Error::Parameter(format!(
            "cannot shrink a selection of {} vertices to {k}",
            sel.len()
        )));
    }
    let mut alive = sel.vertices().to_vec();
    peel(g, &mut alive, k);
    SubgraphSelection::new(alive, g.n())
}

/// Grows `sel` to `k` vertices, each time adding the outside vertex with the
/// most neighbours inside the current selection (ties: smallest index).
pub fn grow_to_k(g: &Graph, sel: &SubgraphSelection, k: usize) -> Result<SubgraphSelection> {
    sel.check_parent(g)?;
    if sel.len() > k || k > g.n() {
        return Err(Error::Parameter(format!(
            "cannot grow a selection of {} vertices to {k} in a graph of {}",
            sel.len(),
            g.n()
        )));
    }
    let mut inside = vec![false; g.n()];
    for &v in sel.vertices() {
        inside[v] = true;
    }
    let mut vs = sel.vertices().to_vec();
    let mut links: Vec<usize> = (0..g.n())
        .map(|u| vs.iter().filter(|&&v| g.has_edge(u, v)).count())
        .collect();
    while vs.len() < k {
        let best = (0..g.n())
            .filter(|&u| !inside[u])
            .max_by(|&a, &b| links[a].cmp(&links[b]).then(b.cmp(&a)))
            .expect("k <= n leaves an outside vertex");
        inside[best] = true;
        vs.push(best);
        for (u, l) in links.iter_mut().enumerate() {
            if g.has_edge(u, best) {
                *l += 1;
            }
        }
    }
    SubgraphSelection::new(vs, g.n())
}

/// Brute-force densest `k`-subgraph density. Exponential; for tests and small oracles.
pub fn densest_k_brute_force(g: &Graph, k: usize) -> Result<f64> {
    if g.n() > MAX_SAMPLING_VERTICES || k == 0 || k > g.n() {
        return Err(Error::Parameter(format!(
            "brute force needs 1 <= k <= n <= 64, got k = {k}, n = {}",
            g.n()
        )));
    }
    let mut best = 0.0f64;
    for_each_k_subset(g.n(), k, |mask| {
        best = best.max(g.density_of_mask(mask));
    });
    Ok(best)
}

/// Visits every `k`-subset of `0..n` as a bitmask, in lexicographic order of the
/// sorted vertex tuples.
pub fn for_each_k_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    assert!(n <= 64 && k <= n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(idx.iter().fold(0u64, |m, &v| m | (1 << v)));
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
