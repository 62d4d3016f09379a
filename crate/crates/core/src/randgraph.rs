//! Coupled weighted Erdős–Rényi graphs and Karp–Sipser leaf removal.
//!
//! Edge `{i, j}` is present at density `p` iff `q(i, j) < p`, where `q` is a
//! seeded uniform. Raising `p` or `n` with the same seed therefore only adds
//! edges. Present edges carry the template weight `J(i, j)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::field::{nonzero_from_hash, FieldElement, FieldSpec};
use crate::seed::{hash_words, rng_from, unit_interval};

/// The uniforms `q(i, j)`, `i ≠ j`, as a pure function of a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingSource {
    pub seed: u64,
}

impl CouplingSource {
    pub fn new(seed: u64) -> Self {
        CouplingSource { seed }
    }

    /// `q(i, j) = q(j, i)` in `[0, 1)`.
    pub fn q(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        unit_interval(hash_words(self.seed, &[a as u64, b as u64]))
    }
}

/// The symmetric template `J` of nonzero edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightTemplate {
    AllOnes,
    SeededRandomNonzero(u64),
}

impl WeightTemplate {
    /// `J(i, j)` for `i ≠ j`; symmetric and never zero.
    pub fn entry(&self, field: FieldSpec, i: usize, j: usize) -> FieldElement {
        match *self {
            WeightTemplate::AllOnes => field.one(),
            WeightTemplate::SeededRandomNonzero(seed) => {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                nonzero_from_hash(field, hash_words(seed, &[a as u64, b as u64]))
            }
        }
    }
}

/// Simple undirected graph with nonzero edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    field: FieldSpec,
    edges: Vec<(usize, usize, FieldElement)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize, field: FieldSpec) -> Self {
        Graph {
            n,
            field,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize, weight: FieldElement) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::usage(format!("edge {i}-{j} outside 0..{}", self.n)));
        }
        if i == j {
            return Err(Error::usage(format!("self-loop at {i}")));
        }
        if weight.is_zero() || weight.spec() != self.field {
            return Err(Error::usage(format!("bad weight {weight} on edge {i}-{j}")));
        }
        if self.adjacency[i].contains(&j) {
            return Err(Error::usage(format!("duplicate edge {i}-{j}")));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.push((a, b, weight));
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Edges as `(i, j, weight)` with `i < j`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize, FieldElement)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// The weighted adjacency matrix.
    pub fn adjacency_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n, self.field);
        for (i, j, w) in &self.edges {
            m.set(*i, *j, w).expect("validated edge");
            m.set(*j, *i, w).expect("validated edge");
        }
        m.assume_symmetric()
    }

    /// The subgraph induced on `vertices`, relabelled `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut label = vec![usize::MAX; self.n];
        for (k, &v) in vertices.iter().enumerate() {
            label[v] = k;
        }
        let mut g = Graph::empty(vertices.len(), self.field);
        for (i, j, w) in &self.edges {
            if label[*i] != usize::MAX && label[*j] != usize::MAX {
                g.add_edge(label[*i], label[*j], w.clone())
                    .expect("valid subgraph");
            }
        }
        g
    }

    /// Header `n m field`, then one `i j weight` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n, self.edges.len(), self.field);
        for (i, j, w) in &self.edges {
            let _ = writeln!(s, "{i} {j} {w}");
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::usage("empty graph file"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [n, m, field] = parts[..] else {
            return Err(Error::usage(format!("bad graph header `{header}`")));
        };
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::usage(format!("bad integer `{s}`")))
        };
        let (n, m) = (num(n)?, num(m)?);
        let field: FieldSpec = field.parse()?;
        let mut g = Graph::empty(n, field);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [i, j, w] = parts[..] else {
                return Err(Error::usage(format!("bad edge line `{line}`")));
            };
            g.add_edge(num(i)?, num(j)?, field.parse_element(w)?)?;
        }
        if g.edge_count() != m {
            return Err(Error::usage(format!(
                "header promises {m} edges, found {}",
                g.edge_count()
            )));
        }
        Ok(g)
    }
}

/// The graph behind `A_{n,p}`: edge `{i, j}` iff `q(i, j) < p`, weighted by
/// the template.
pub fn sample_graph(
    n: usize,
    p: f64,
    template: &WeightTemplate,
    coupling: &CouplingSource,
    field: FieldSpec,
) -> Graph {
    sample_relabelled(n, p, template, coupling, field, |i| i)
}

fn sample_relabelled(
    n: usize,
    p: f64,
    template: &WeightTemplate,
    coupling: &CouplingSource,
    field: FieldSpec,
    label: impl Fn(usize) -> usize,
) -> Graph {
    let mut g = Graph::empty(n, field);
    if p <= 0.0 {
        return g;
    }
    for i in 0..n {
        let li = label(i);
        for j in i + 1..n {
            let lj = label(j);
            if coupling.q(li, lj) < p {
                g.add_edge(i, j, template.entry(field, li, lj))
                    .expect("simple graph by construction");
            }
        }
    }
    g
}

/// `A_{n,p}`: symmetric, zero diagonal.
pub fn sample_a(
    n: usize,
    p: f64,
    template: &WeightTemplate,
    coupling: &CouplingSource,
    field: FieldSpec,
) -> Matrix {
    sample_graph(n, p, template, coupling, field).adjacency_matrix()
}

/// A permutation of `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    /// Uniform permutation from a seeded shuffle.
    pub fn uniform(len: usize, seed: u64) -> Self {
        let mut v: Vec<usize> = (0..len).collect();
        v.shuffle(&mut rng_from(seed));
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }
}

/// The graph behind `T^{(N)}_{n,p}`: vertex `i` plays the role of vertex
/// `ũ(i)` of the graph of `A_{N,p}`.
pub fn sample_t_graph(
    n: usize,
    p: f64,
    template: &WeightTemplate,
    coupling: &CouplingSource,
    field: FieldSpec,
    perm: &Permutation,
) -> Result<Graph> {
    if n > perm.len() {
        return Err(Error::usage(format!(
            "T needs n <= N, got n = {n}, N = {}",
            perm.len()
        )));
    }
    Ok(sample_relabelled(n, p, template, coupling, field, |i| {
        perm.apply(i)
    }))
}

/// `T^{(N)}_{n,p}(i, j) = A_{N,p}(ũ(i), ũ(j))` with `N = perm.len()`.
pub fn sample_t(
    n: usize,
    p: f64,
    template: &WeightTemplate,
    coupling: &CouplingSource,
    field: FieldSpec,
    perm: &Permutation,
) -> Result<Matrix> {
    Ok(sample_t_graph(n, p, template, coupling, field, perm)?.adjacency_matrix())
}

/// Which degree-one vertex is removed next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafOrder {
    SmallestIndex,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSResult {
    /// Vertices of degree zero once no leaves remain, increasing.
    pub isolated: Vec<usize>,
    /// Vertices of degree at least two once no leaves remain, increasing.
    pub core_vertices: Vec<usize>,
    /// The core, relabelled in the order of `core_vertices`.
    pub core: Graph,
    /// `(leaf, neighbor)` in removal order.
    pub removed_pairs: Vec<(usize, usize)>,
}

impl KSResult {
    pub fn isolated_count(&self) -> usize {
        self.isolated.len()
    }
}

/// Pending leaves, drawn in the requested order. Entries may be stale.
enum LeafQueue {
    Smallest(BinaryHeap<Reverse<usize>>),
    Random(Vec<usize>, Box<rand_chacha::ChaCha8Rng>),
}

impl LeafQueue {
    fn push(&mut self, v: usize) {
        match self {
            LeafQueue::Smallest(h) => h.push(Reverse(v)),
            LeafQueue::Random(pool, _) => pool.push(v),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            LeafQueue::Smallest(h) => h.pop().map(|Reverse(v)| v),
            LeafQueue::Random(pool, rng) => {
                if pool.is_empty() {
                    return None;
                }
                let k = rng.random_range(0..pool.len());
                Some(pool.swap_remove(k))
            }
        }
    }
}

/// Removes degree-one vertices together with their neighbors until none
/// remain. A leaf whose neighbor disappears first ends up isolated.
pub fn karp_sipser(g: &Graph, order: LeafOrder) -> KSResult {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue = match order {
        LeafOrder::SmallestIndex => LeafQueue::Smallest(BinaryHeap::new()),
        LeafOrder::Random(seed) => LeafQueue::Random(Vec::new(), Box::new(rng_from(seed))),
    };
    for v in (0..n).filter(|&v| degree[v] == 1) {
        queue.push(v);
    }
    let mut removed_pairs = Vec::new();
    while let Some(leaf) = queue.pop() {
        if !alive[leaf] || degree[leaf] != 1 {
            continue;
        }
        let nb = *g
            .neighbors(leaf)
            .iter()
            .find(|&&w| alive[w])
            .expect("a leaf has a live neighbor");
        alive[leaf] = false;
        alive[nb] = false;
        degree[leaf] = 0;
        for &w in g.neighbors(nb) {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    queue.push(w);
                }
            }
        }
        degree[nb] = 0;
        removed_pairs.push((leaf, nb));
    }
    let isolated: Vec<usize> = (0..n).filter(|&v| alive[v] && degree[v] == 0).collect();
    let core_vertices: Vec<usize> = (0..n).filter(|&v| alive[v] && degree[v] >= 2).collect();
    debug_assert_eq!(
        isolated.len() + core_vertices.len() + 2 * removed_pairs.len(),
        n
    );
    KSResult {
        isolated,
        core: g.induced(&core_vertices),
        core_vertices,
        removed_pairs,
    }
}

/// Default vertex cap for [`nullity_invariance_check`].
pub const NULLITY_CHECK_CAP: usize = 2000;

/// `nul(A(G)) = isolated + nul(A(core))`, by exact elimination.
pub fn nullity_invariance_check(g: &Graph, cap: usize) -> Result<bool> {
    if g.vertex_count() > cap {
        return Err(Error::Resource {
            what: "graph size for exact nullity",
            cap,
            got: g.vertex_count(),
        });
    }
    let ks = karp_sipser(g, LeafOrder::SmallestIndex);
    let full = g.adjacency_matrix().nullity();
    let core = ks.core.adjacency_matrix().nullity();
    Ok(full == ks.isolated_count() + core)
}
