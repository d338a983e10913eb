//! Directed graphs on `{1, …, n}` with optional exact weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    weights: BTreeMap<(usize, usize), BigRational>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            ..Default::default()
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    fn check(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        self.edges.insert((u, v));
        Ok(())
    }

    pub fn add_weighted_edge(&mut self, u: usize, v: usize, w: BigRational) -> Result<()> {
        if !w.is_positive() {
            return Err(Error::Precondition(format!("edge ({u},{v}) has weight {w}")));
        }
        self.add_edge(u, v)?;
        self.weights.insert((u, v), w);
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&BigRational> {
        self.weights.get(&(u, v))
    }

    pub fn is_weighted(&self) -> bool {
        !self.weights.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((u, 0)..(u + 1, 0)).map(|&(_, v)| v)
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.successors(u).count()
    }

    /// Edge-set union; weights of `other` win on shared edges.
    pub fn union(&self, other: &Digraph) -> Result<Digraph> {
        if self.n != other.n {
            return Err(Error::Precondition(format!(
                "cannot join digraphs on {} and {} vertices",
                self.n, other.n
            )));
        }
        let mut out = self.clone();
        out.edges.extend(other.edges.iter().copied());
        out.weights
            .extend(other.weights.iter().map(|(k, w)| (*k, w.clone())));
        Ok(out)
    }

    /// Edge `(u, v)` iff some walk of length exactly `b` leads from `u` to `v`.
    pub fn strong_power(&self, b: usize) -> Digraph {
        assert!(b >= 1, "strong power needs b >= 1");
        let base = BitMatrix::from_digraph(self);
        let mut acc: Option<BitMatrix> = None;
        let mut sq = base;
        let mut e = b;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc.expect("b >= 1").to_digraph()
    }

    /// All simple directed cycles, found with Johnson's algorithm.
    pub fn enumerate_simple_cycles(&self, budget: CycleBudget) -> Result<Vec<SimpleCycle>> {
        if self.n > budget.max_vertices {
            return Err(Error::BudgetExceeded {
                what: "vertices for cycle enumeration",
                value: self.n,
                limit: budget.max_vertices,
            });
        }
        let mut johnson = Johnson::new(self, budget.max_cycles);
        for s in 1..=self.n {
            johnson.search_from(s)?;
        }
        Ok(johnson
            .found
            .into_iter()
            .map(|vertices| {
                let weight = self.is_weighted().then(|| {
                    let k = vertices.len();
                    (0..k).fold(BigRational::one(), |acc, i| {
                        let e = (vertices[i], vertices[(i + 1) % k]);
                        acc * self.weights.get(&e).cloned().unwrap_or_else(BigRational::one)
                    })
                });
                SimpleCycle { vertices, weight }
            })
            .collect())
    }
}

/// `u -> v [p/q]` per edge, one per line.
impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(u, v) in &self.edges {
            match self.weights.get(&(u, v)) {
                Some(w) => writeln!(f, "{u} -> {v} [{w}]")?,
                None => writeln!(f, "{u} -> {v}")?,
            }
        }
        Ok(())
    }
}

fn check_distinct(n: usize, v: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &x in v {
        if x == 0 || x > n {
            return Err(Error::VertexOutOfRange { vertex: x, n });
        }
        if !seen.insert(x) {
            return Err(Error::DuplicateVertex(x));
        }
    }
    Ok(())
}

/// The cycle `v_1 → v_2 → … → v_k → v_1` on `n` vertices.
pub fn cycle(n: usize, v: &[usize]) -> Result<Digraph> {
    check_distinct(n, v)?;
    let mut g = Digraph::new(n);
    for i in 0..v.len() {
        g.add_edge(v[i], v[(i + 1) % v.len()])?;
    }
    Ok(g)
}

/// The path `v_1 → … → v_k` on `n` vertices.
pub fn path(n: usize, v: &[usize]) -> Result<Digraph> {
    check_distinct(n, v)?;
    let mut g = Digraph::new(n);
    for w in v.windows(2) {
        g.add_edge(w[0], w[1])?;
    }
    Ok(g)
}

/// `a(n) = (1, 2, …, n)`.
pub fn standard_vertices(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub k: usize,
    pub cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn to_digraph(&self) -> Result<Digraph> {
        self.cycles.iter().try_fold(Digraph::new(self.k), |g, c| {
            g.union(&cycle(self.k, c)?)
        })
    }
}

/// `C(a(k))^{(c)}` as `h = gcd(c, k)` disjoint cycles of length `k / h`; the
/// `i`-th one visits `⟨i + ℓc⟩_k` for `ℓ = 0, …, k/h - 1`.
pub fn cycle_power_decomposition(k: usize, c: usize) -> CycleDecomposition {
    assert!(k >= 1 && c >= 1, "cycle power needs k, c >= 1");
    let h = k.gcd(&c);
    let k1 = k / h;
    let cycles = (1..=h)
        .map(|i| (0..k1).map(|l| 1 + (i - 1 + l * c) % k).collect())
        .collect();
    CycleDecomposition { k, cycles }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleBudget {
    pub max_vertices: usize,
    pub max_cycles: usize,
}

impl Default for CycleBudget {
    fn default() -> Self {
        CycleBudget {
            max_vertices: 64,
            max_cycles: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimpleCycle {
    /// Starts at the smallest vertex of the cycle.
    pub vertices: Vec<usize>,
    #[serde(skip)]
    pub weight: Option<BigRational>,
}

impl SimpleCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }
}

struct Johnson<'a> {
    g: &'a Digraph,
    limit: usize,
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    allowed: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl<'a> Johnson<'a> {
    fn new(g: &'a Digraph, limit: usize) -> Self {
        let n = g.n;
        Johnson {
            g,
            limit,
            blocked: vec![false; n + 1],
            blocked_by: vec![BTreeSet::new(); n + 1],
            stack: Vec::new(),
            allowed: vec![false; n + 1],
            found: Vec::new(),
        }
    }

    /// Vertices `≥ s` that reach and are reached from `s` inside `G[{s..n}]`.
    fn component_of(&mut self, s: usize) {
        let n = self.g.n;
        let mut fwd = vec![false; n + 1];
        let mut todo = vec![s];
        fwd[s] = true;
        while let Some(u) = todo.pop() {
            for v in self.g.successors(u) {
                if v >= s && !fwd[v] {
                    fwd[v] = true;
                    todo.push(v);
                }
            }
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (u, v) in self.g.edges() {
            if u >= s && v >= s {
                preds[v].push(u);
            }
        }
        let mut bwd = vec![false; n + 1];
        todo.push(s);
        bwd[s] = true;
        while let Some(v) = todo.pop() {
            for &u in &preds[v] {
                if !bwd[u] {
                    bwd[u] = true;
                    todo.push(u);
                }
            }
        }
        for v in 0..=n {
            self.allowed[v] = fwd[v] && bwd[v];
        }
    }

    fn search_from(&mut self, s: usize) -> Result<()> {
        self.component_of(s);
        for v in 0..=self.g.n {
            self.blocked[v] = false;
            self.blocked_by[v].clear();
        }
        self.circuit(s, s)?;
        Ok(())
    }

    fn unblock(&mut self, u: usize) {
        let mut todo = vec![u];
        while let Some(x) = todo.pop() {
            if self.blocked[x] {
                self.blocked[x] = false;
                todo.extend(std::mem::take(&mut self.blocked_by[x]));
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> Result<bool> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let succ: Vec<usize> = self.g.successors(v).filter(|&w| self.allowed[w]).collect();
        for &w in &succ {
            if w == s {
                if self.found.len() >= self.limit {
                    return Err(Error::BudgetExceeded {
                        what: "simple cycles",
                        value: self.found.len() + 1,
                        limit: self.limit,
                    });
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, s)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &succ {
                self.blocked_by[w].insert(v);
            }
        }
        self.stack.pop();
        Ok(closed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            rows: vec![0; (n + 1) * words],
        }
    }

    fn set(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
    }

    fn get(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    fn from_digraph(g: &Digraph) -> Self {
        let mut m = BitMatrix::zeros(g.n);
        for (u, v) in g.edges() {
            m.set(u - 1, v - 1);
        }
        m
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.n);
        for u in 0..self.n {
            let mut acc = vec![0u64; self.words];
            for k in 0..self.n {
                if self.get(u, k) {
                    for (a, b) in acc.iter_mut().zip(other.row(k)) {
                        *a |= *b;
                    }
                }
            }
            out.rows[u * self.words..(u + 1) * self.words].copy_from_slice(&acc);
        }
        out
    }

    fn to_digraph(&self) -> Digraph {
        let mut g = Digraph::new(self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                if self.get(u, v) {
                    g.edges.insert((u + 1, v + 1));
                }
            }
        }
        g
    }
}
