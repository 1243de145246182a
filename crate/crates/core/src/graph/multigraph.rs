use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;

use super::{Stub, StubLayout, UnionFind};
use crate::error::{Error, Result};

/// Largest stub count accepted by [`pair_all`], whose dense arrays use `u32`
/// indices.
pub const MAX_EAGER_STUBS: u64 = u32::MAX as u64;

/// A fully paired configuration-model instance. Self-loops and multi-edges
/// are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    stub_pairs: Vec<(Stub, Stub)>,
    edges: Vec<(usize, usize)>,
    adj_offsets: Vec<usize>,
    adj: Vec<usize>,
}

/// Uniform perfect matching of all stubs of `layout`: stubs are visited in
/// index order and each unmatched one is paired with a uniform draw among the
/// remaining unmatched stubs.
pub fn pair_all<L: StubLayout + ?Sized, R: Rng + ?Sized>(layout: &L, rng: &mut R) -> Result<MultiGraph> {
    let total = layout.stub_count();
    if total > MAX_EAGER_STUBS {
        return Err(Error::Overflow(format!("{total} stubs exceed the eager pairing limit")));
    }
    if total % 2 == 1 {
        return Err(Error::domain(format!("odd stub count {total}")));
    }
    let len = total as usize;
    // slots[0..live] are the unmatched stubs; pos is the inverse permutation.
    let mut slots: Vec<u32> = (0..len as u32).collect();
    let mut pos: Vec<u32> = (0..len as u32).collect();
    let mut live = len;
    let remove = |s: u32, slots: &mut Vec<u32>, pos: &mut Vec<u32>, live: &mut usize| {
        let p = pos[s as usize] as usize;
        *live -= 1;
        let moved = slots[*live];
        slots[p] = moved;
        pos[moved as usize] = p as u32;
        pos[s as usize] = u32::MAX;
    };
    let mut pairs = Vec::with_capacity(len / 2);
    for s in 0..len as u32 {
        if pos[s as usize] == u32::MAX {
            continue;
        }
        remove(s, &mut slots, &mut pos, &mut live);
        let t = slots[rng.random_range(0..live)];
        remove(t, &mut slots, &mut pos, &mut live);
        pairs.push((s as Stub, t as Stub));
    }
    Ok(MultiGraph::from_stub_pairs(layout, pairs))
}

impl MultiGraph {
    pub(crate) fn from_stub_pairs<L: StubLayout + ?Sized>(layout: &L, pairs: Vec<(Stub, Stub)>) -> Self {
        let edges = pairs.iter().map(|&(s, t)| (layout.owner(s), layout.owner(t))).collect();
        let mut g = Self::from_edges(layout.node_count(), edges);
        g.stub_pairs = pairs;
        g
    }

    /// Build from an explicit edge list on nodes `0..n`.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for d in &deg[..n] {
            adj_offsets.push(acc);
            acc += d;
        }
        adj_offsets.push(acc);
        let mut fill = adj_offsets.clone();
        let mut adj = vec![0usize; acc];
        for &(u, v) in &edges {
            adj[fill[u]] = v;
            fill[u] += 1;
            adj[fill[v]] = u;
            fill[v] += 1;
        }
        MultiGraph { n, stub_pairs: Vec::new(), edges, adj_offsets, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Paired stubs; empty for graphs built from an edge list.
    pub fn stub_pairs(&self) -> &[(Stub, Stub)] {
        &self.stub_pairs
    }

    /// Multigraph degree, a self-loop counting twice.
    pub fn degree(&self, node: usize) -> usize {
        self.adj_offsets[node + 1] - self.adj_offsets[node]
    }

    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.adj[self.adj_offsets[node]..self.adj_offsets[node + 1]]
    }

    /// Distances from `src` to every node; `None` when unreachable.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued nodes have a distance");
            for &y in self.neighbours(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn bfs_hopcount(&self, u: usize, v: usize) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.n];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbours(x) {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    if y == v {
                        return Some(dist[y]);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Connected component sizes in descending order.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        let mut sizes = Vec::new();
        for x in 0..self.n {
            if uf.find(x) == x {
                sizes.push(uf.set_size(x));
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// One `u v` line per edge, 0-based.
    pub fn write_edge_list(&self, mut w: impl Write) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Read an edge list; the node count is one more than the largest id
    /// unless `n` is given.
    pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut edges = Vec::new();
        let parse_err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let mut it = t.split_whitespace();
            let mut next = || -> Result<usize> {
                let tok = it.next().ok_or_else(|| parse_err(i + 1, "expected two node ids".into()))?;
                tok.parse().map_err(|e| parse_err(i + 1, format!("bad node id {tok:?}: {e}")))
            };
            let (u, v) = (next()?, next()?);
            if it.next().is_some() {
                return Err(parse_err(i + 1, "trailing fields".into()));
            }
            edges.push((u, v));
        }
        let max_id = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = match n {
            Some(n) if n < max_id => return Err(Error::domain(format!("node id {} out of range for {n} nodes", max_id - 1))),
            Some(n) => n,
            None => max_id,
        };
        Ok(Self::from_edges(n, edges))
    }
}
