//! Configuration-model instances: i.i.d. degree sequences with the parity
//! fix, the stub (half-edge) pool, and eager or lazy uniform pairing.

mod grouped;
mod multigraph;
mod pool;
mod union_find;

use std::io::{BufRead, Write};
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degree::{DegreeDistribution, Law};
use crate::error::{Error, Result};

pub use grouped::GroupedDegrees;
pub use multigraph::{pair_all, MultiGraph, MAX_EAGER_STUBS};
pub use pool::{Attachment, Side, StubLabel, StubPool};
pub use union_find::UnionFind;

/// Stub (half-edge) index. Node `i` owns the contiguous range
/// `first_stub(i) .. first_stub(i) + degree(i)`.
pub type Stub = u64;

/// Where the stubs of each node live.
pub trait StubLayout {
    fn node_count(&self) -> usize;
    fn stub_count(&self) -> u64;
    fn degree(&self, node: usize) -> u64;
    fn first_stub(&self, node: usize) -> Stub;
    fn owner(&self, stub: Stub) -> usize;

    fn stubs(&self, node: usize) -> Range<Stub> {
        let first = self.first_stub(node);
        first..first + self.degree(node)
    }
}

/// `N` node degrees with an even total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u64>,
    offsets: Vec<u64>,
    parity_fixed: bool,
}

impl DegreeSequence {
    /// `n` i.i.d. draws from `dist`; when the total is odd the last degree is
    /// incremented by one.
    pub fn draw<R: Rng + ?Sized>(n: usize, dist: &DegreeDistribution, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 nodes, got {n}")));
        }
        let degrees: Vec<u64> = (0..n).map(|_| dist.sample(rng)).collect();
        Self::with_parity_fix(degrees)
    }

    /// Apply the parity rule to an arbitrary sequence.
    pub fn with_parity_fix(mut degrees: Vec<u64>) -> Result<Self> {
        let total = checked_total(&degrees)?;
        let parity_fixed = total % 2 == 1;
        if parity_fixed {
            let last = degrees.last_mut().ok_or_else(|| Error::domain("empty degree sequence"))?;
            *last = last.checked_add(1).ok_or_else(|| Error::Overflow("degree".into()))?;
        }
        Self::build(degrees, parity_fixed)
    }

    /// A fixed sequence; the total must already be even.
    pub fn from_degrees(degrees: Vec<u64>) -> Result<Self> {
        let total = checked_total(&degrees)?;
        if total % 2 == 1 {
            return Err(Error::domain(format!("total degree {total} is odd")));
        }
        Self::build(degrees, false)
    }

    /// Fixed degree multiset assigned to nodes in uniformly random order.
    pub fn exchangeable<R: Rng + ?Sized>(mut multiset: Vec<u64>, rng: &mut R) -> Result<Self> {
        multiset.shuffle(rng);
        Self::from_degrees(multiset)
    }

    fn build(degrees: Vec<u64>, parity_fixed: bool) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::domain("empty degree sequence"));
        }
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::domain(format!("node {i} has degree 0")));
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut acc = 0u64;
        offsets.push(0);
        for &d in &degrees {
            acc += d;
            offsets.push(acc);
        }
        Ok(DegreeSequence { degrees, offsets, parity_fixed })
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// `L_N`.
    pub fn total_stubs(&self) -> u64 {
        *self.offsets.last().expect("offsets nonempty")
    }

    pub fn parity_fixed(&self) -> bool {
        self.parity_fixed
    }

    /// Newline-delimited integers.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        for d in &self.degrees {
            writeln!(w, "{d}")?;
        }
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut degrees = Vec::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let d = t.parse::<u64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("bad degree {t:?}: {e}"),
            })?;
            degrees.push(d);
        }
        Self::from_degrees(degrees)
    }
}

fn checked_total(degrees: &[u64]) -> Result<u64> {
    degrees
        .iter()
        .try_fold(0u64, |acc, &d| acc.checked_add(d))
        .and_then(|t| t.checked_add(1)) // room for the parity increment
        .map(|t| t - 1)
        .ok_or_else(|| Error::Overflow("total stub count exceeds the stub index type".into()))
}

impl StubLayout for DegreeSequence {
    fn node_count(&self) -> usize {
        self.degrees.len()
    }

    fn stub_count(&self) -> u64 {
        self.total_stubs()
    }

    fn degree(&self, node: usize) -> u64 {
        self.degrees[node]
    }

    fn first_stub(&self, node: usize) -> Stub {
        self.offsets[node]
    }

    fn owner(&self, stub: Stub) -> usize {
        debug_assert!(stub < self.total_stubs());
        self.offsets.partition_point(|&o| o <= stub) - 1
    }
}
