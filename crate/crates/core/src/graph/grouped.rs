use rand::Rng;

use super::{checked_total, Stub, StubLayout};
use crate::degree::{DegreeDistribution, Law};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Group {
    first_node: usize,
    first_stub: Stub,
    degree: u64,
    count: u64,
}

/// Degree sequence stored as runs of equal degree.
///
/// [`GroupedDegrees::sample_rooted`] draws an i.i.d. sequence in which nodes
/// `0` and `1` (the roots of a hopcount query) and the last node (which takes
/// the parity fix) are drawn individually, while the remaining `N - 3` nodes
/// are drawn only as a multiset and laid out in increasing degree. Node
/// labels of an i.i.d. sequence are exchangeable, so every statistic of the
/// roots' neighbourhoods has the same law as with a fully materialised
/// sequence, at a cost that grows with the number of distinct degrees
/// instead of `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedDegrees {
    n: usize,
    groups: Vec<Group>,
    total: u64,
    parity_fixed: bool,
}

impl GroupedDegrees {
    pub fn sample_rooted<R: Rng + ?Sized>(n: usize, dist: &DegreeDistribution, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 nodes, got {n}")));
        }
        if n < 4 {
            let degrees: Vec<u64> = (0..n).map(|_| dist.sample(rng)).collect();
            return Self::from_runs(degrees.into_iter().map(|d| (d, 1)).collect());
        }
        let d0 = dist.sample(rng);
        let d1 = dist.sample(rng);
        let bulk = dist.law().sample_counts(n as u64 - 3, rng);
        let last = dist.sample(rng);
        let mut runs = Vec::with_capacity(bulk.len() + 3);
        runs.push((d0, 1));
        runs.push((d1, 1));
        runs.extend(bulk);
        runs.push((last, 1));
        Self::from_runs(runs)
    }

    /// One node per entry, in order, with the parity rule applied.
    pub fn from_degrees(degrees: &[u64]) -> Result<Self> {
        Self::from_runs(degrees.iter().map(|&d| (d, 1)).collect())
    }

    fn from_runs(mut runs: Vec<(u64, u64)>) -> Result<Self> {
        if runs.iter().any(|&(d, c)| d == 0 && c > 0) {
            return Err(Error::domain("degree 0 in sequence"));
        }
        let expanded_total = runs
            .iter()
            .try_fold(0u64, |acc, &(d, c)| d.checked_mul(c).and_then(|x| acc.checked_add(x)))
            .ok_or_else(|| Error::Overflow("total stub count exceeds the stub index type".into()))?;
        checked_total(&[expanded_total])?;
        let parity_fixed = expanded_total % 2 == 1;
        if parity_fixed {
            // The last node is always a run of length one.
            let last = runs.last_mut().ok_or_else(|| Error::domain("empty degree sequence"))?;
            debug_assert_eq!(last.1, 1);
            last.0 += 1;
        }
        let mut groups = Vec::with_capacity(runs.len());
        let (mut node, mut stub) = (0usize, 0u64);
        for (degree, count) in runs.into_iter().filter(|r| r.1 > 0) {
            groups.push(Group { first_node: node, first_stub: stub, degree, count });
            node += count as usize;
            stub += degree * count;
        }
        Ok(GroupedDegrees { n: node, groups, total: stub, parity_fixed })
    }

    pub fn parity_fixed(&self) -> bool {
        self.parity_fixed
    }

    /// Materialise the per-node degrees.
    pub fn to_degrees(&self) -> Vec<u64> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.degree, g.count as usize))
            .collect()
    }

    fn group_of_node(&self, node: usize) -> &Group {
        let i = self.groups.partition_point(|g| g.first_node <= node) - 1;
        &self.groups[i]
    }
}

impl StubLayout for GroupedDegrees {
    fn node_count(&self) -> usize {
        self.n
    }

    fn stub_count(&self) -> u64 {
        self.total
    }

    fn degree(&self, node: usize) -> u64 {
        self.group_of_node(node).degree
    }

    fn first_stub(&self, node: usize) -> Stub {
        let g = self.group_of_node(node);
        g.first_stub + (node - g.first_node) as u64 * g.degree
    }

    fn owner(&self, stub: Stub) -> usize {
        debug_assert!(stub < self.total);
        let i = self.groups.partition_point(|g| g.first_stub <= stub) - 1;
        let g = &self.groups[i];
        g.first_node + ((stub - g.first_stub) / g.degree) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DegreeSequence;
    use crate::rng;

    #[test]
    fn layout_agrees_with_explicit_sequence() {
        let degrees = vec![3, 1, 1, 1, 2, 2, 5, 1];
        let grouped = GroupedDegrees::from_degrees(&degrees).unwrap();
        let explicit = DegreeSequence::from_degrees(degrees.clone()).unwrap();
        assert_eq!(grouped.stub_count(), explicit.stub_count());
        for node in 0..degrees.len() {
            assert_eq!(grouped.degree(node), explicit.degree(node));
            assert_eq!(grouped.first_stub(node), explicit.first_stub(node));
        }
        for s in 0..explicit.stub_count() {
            assert_eq!(grouped.owner(s), explicit.owner(s));
        }
    }

    #[test]
    fn rooted_sample_shape() {
        let dist = DegreeDistribution::build_family(2.8).unwrap();
        let mut r = rng::stream(9, 0);
        for _ in 0..50 {
            let g = GroupedDegrees::sample_rooted(1000, &dist, &mut r).unwrap();
            assert_eq!(g.node_count(), 1000);
            assert_eq!(g.stub_count() % 2, 0);
            assert_eq!(g.to_degrees().iter().sum::<u64>(), g.stub_count());
        }
    }

    #[test]
    fn root_degrees_follow_the_degree_law() {
        let dist = DegreeDistribution::build_family(2.8).unwrap();
        let mut r = rng::stream(10, 0);
        let trials = 20_000;
        let twos = (0..trials)
            .filter(|_| GroupedDegrees::sample_rooted(50, &dist, &mut r).unwrap().degree(1) == 2)
            .count();
        let freq = twos as f64 / trials as f64;
        assert!((freq - 0.9).abs() < 0.01, "{freq}");
    }

    #[test]
    fn small_n() {
        let dist = DegreeDistribution::point_mass(1).unwrap();
        let g = GroupedDegrees::sample_rooted(3, &dist, &mut rng::stream(1, 0)).unwrap();
        assert_eq!(g.to_degrees(), vec![1, 1, 2]);
        assert!(g.parity_fixed());
        assert!(GroupedDegrees::sample_rooted(1, &dist, &mut rng::stream(1, 0)).is_err());
    }
}
