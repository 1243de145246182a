use rand::Rng;
use rustc_hash::FxHashMap;

use super::{MultiGraph, Stub, StubLayout};

/// Which exploration a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

/// A node attached to a shortest-path graph. Its free stubs sit at `level`,
/// i.e. the node is at distance `level - 1` from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub side: Side,
    pub level: u32,
}

/// Exploration label of a stub.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StubLabel {
    /// Owner not yet attached.
    Unattached = 1,
    /// Owner attached, stub not yet paired.
    Free = 2,
    Paired = 3,
}

/// The half-edge universe of one graph instance, paired lazily.
///
/// Unpaired stubs live in a virtual dense array (position `p` holds stub `p`
/// unless overridden) with swap-remove, so a uniform draw and a removal are
/// O(1) and only touched stubs cost memory.
#[derive(Debug)]
pub struct StubPool<'a, L: StubLayout + ?Sized> {
    layout: &'a L,
    unpaired: u64,
    slot_of: FxHashMap<Stub, u64>,
    at_slot: FxHashMap<u64, Stub>,
    partner: FxHashMap<Stub, Stub>,
    attached: FxHashMap<usize, Attachment>,
}

impl<'a, L: StubLayout + ?Sized> StubPool<'a, L> {
    pub fn new(layout: &'a L) -> Self {
        StubPool {
            layout,
            unpaired: layout.stub_count(),
            slot_of: FxHashMap::default(),
            at_slot: FxHashMap::default(),
            partner: FxHashMap::default(),
            attached: FxHashMap::default(),
        }
    }

    pub fn layout(&self) -> &'a L {
        self.layout
    }

    pub fn unpaired_count(&self) -> u64 {
        self.unpaired
    }

    pub fn is_paired(&self, s: Stub) -> bool {
        self.partner.contains_key(&s)
    }

    pub fn partner(&self, s: Stub) -> Option<Stub> {
        self.partner.get(&s).copied()
    }

    pub fn attachment(&self, node: usize) -> Option<Attachment> {
        self.attached.get(&node).copied()
    }

    /// All attached nodes, in arbitrary order.
    pub fn attachments(&self) -> impl Iterator<Item = (usize, Attachment)> + '_ {
        self.attached.iter().map(|(&n, &a)| (n, a))
    }

    pub fn attach(&mut self, node: usize, at: Attachment) {
        let prev = self.attached.insert(node, at);
        assert!(prev.is_none(), "node {node} attached twice");
    }

    pub fn label(&self, s: Stub) -> StubLabel {
        if self.is_paired(s) {
            StubLabel::Paired
        } else if self.attached.contains_key(&self.layout.owner(s)) {
            StubLabel::Free
        } else {
            StubLabel::Unattached
        }
    }

    fn slot(&self, s: Stub) -> u64 {
        self.slot_of.get(&s).copied().unwrap_or(s)
    }

    fn stub_at(&self, p: u64) -> Stub {
        self.at_slot.get(&p).copied().unwrap_or(p)
    }

    fn remove(&mut self, s: Stub) {
        let p = self.slot(s);
        let last = self.unpaired - 1;
        debug_assert_eq!(self.stub_at(p), s);
        if p != last {
            let moved = self.stub_at(last);
            self.at_slot.insert(p, moved);
            self.slot_of.insert(moved, p);
        } else {
            self.at_slot.remove(&p);
        }
        self.at_slot.remove(&last);
        self.slot_of.remove(&s);
        self.unpaired = last;
    }

    /// Pair the unpaired stub `s` with a uniformly chosen other unpaired
    /// stub; returns the partner.
    ///
    /// # Panics
    /// If `s` is already paired or is the only unpaired stub.
    pub fn lazy_pair<R: Rng + ?Sized>(&mut self, s: Stub, rng: &mut R) -> Stub {
        assert!(!self.is_paired(s), "stub {s} is already paired");
        self.remove(s);
        assert!(self.unpaired > 0, "no partner left for stub {s}");
        let t = self.stub_at(rng.random_range(0..self.unpaired));
        self.remove(t);
        self.partner.insert(s, t);
        self.partner.insert(t, s);
        t
    }

    /// Pair every remaining stub in index order and return the resulting
    /// multigraph, including all edges revealed so far.
    pub fn exhaust<R: Rng + ?Sized>(mut self, rng: &mut R) -> MultiGraph {
        for s in 0..self.layout.stub_count() {
            if !self.is_paired(s) {
                self.lazy_pair(s, rng);
            }
        }
        let layout = self.layout;
        let mut pairs: Vec<(Stub, Stub)> = self.partner.into_iter().filter(|&(s, t)| s < t).collect();
        pairs.sort_unstable();
        MultiGraph::from_stub_pairs(layout, pairs)
    }

    /// Edges revealed so far, as stub pairs `(s, t)` with `s < t`.
    pub fn revealed_pairs(&self) -> Vec<(Stub, Stub)> {
        let mut pairs: Vec<(Stub, Stub)> = self.partner.iter().map(|(&s, &t)| (s, t)).filter(|&(s, t)| s < t).collect();
        pairs.sort_unstable();
        pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DegreeSequence;
    use crate::rng;

    #[test]
    fn forced_partner() {
        let seq = DegreeSequence::from_degrees(vec![1, 1]).unwrap();
        let mut pool = StubPool::new(&seq);
        assert_eq!(pool.lazy_pair(0, &mut rng::stream(0, 0)), 1);
        assert_eq!(pool.unpaired_count(), 0);
        assert_eq!(pool.label(0), StubLabel::Paired);
    }

    #[test]
    #[should_panic(expected = "already paired")]
    fn pairing_twice_panics() {
        let seq = DegreeSequence::from_degrees(vec![1, 1, 2]).unwrap();
        let mut pool = StubPool::new(&seq);
        let mut r = rng::stream(0, 0);
        let t = pool.lazy_pair(0, &mut r);
        pool.lazy_pair(t, &mut r);
    }

    #[test]
    fn uniform_over_three_candidates() {
        let seq = DegreeSequence::from_degrees(vec![4]).unwrap();
        let mut counts = [0u32; 4];
        let mut r = rng::stream(4, 0);
        let trials = 100_000;
        for _ in 0..trials {
            let mut pool = StubPool::new(&seq);
            counts[pool.lazy_pair(0, &mut r) as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        for &c in &counts[1..] {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn labels_follow_attachment() {
        let seq = DegreeSequence::from_degrees(vec![2, 2]).unwrap();
        let mut pool = StubPool::new(&seq);
        assert_eq!(pool.label(0), StubLabel::Unattached);
        pool.attach(0, Attachment { side: Side::First, level: 1 });
        assert_eq!(pool.label(1), StubLabel::Free);
        assert_eq!(pool.label(2), StubLabel::Unattached);
    }

    #[test]
    fn partner_is_an_involution_and_index_is_consistent() {
        let seq = DegreeSequence::from_degrees(vec![3, 1, 2, 4, 2]).unwrap();
        let mut r = rng::stream(12, 0);
        for _ in 0..200 {
            let mut pool = StubPool::new(&seq);
            let mut paired = 0;
            for s in 0..seq.total_stubs() {
                if !pool.is_paired(s) {
                    pool.lazy_pair(s, &mut r);
                    paired += 2;
                }
                assert_eq!(pool.unpaired_count(), seq.total_stubs() - paired);
                for x in 0..seq.total_stubs() {
                    if let Some(y) = pool.partner(x) {
                        assert_eq!(pool.partner(y), Some(x));
                        assert_ne!(x, y);
                    }
                }
                // The virtual dense prefix holds exactly the unpaired stubs.
                let mut live: Vec<Stub> = (0..pool.unpaired).map(|p| pool.stub_at(p)).collect();
                live.sort_unstable();
                let expect: Vec<Stub> = (0..seq.total_stubs()).filter(|&x| !pool.is_paired(x)).collect();
                assert_eq!(live, expect);
            }
        }
    }
}
