//! Shortest-path-graph (SPG) exploration over a lazily paired stub pool.
//!
//! A node attached while pairing stubs of level `k` contributes its other
//! stubs as free stubs of level `k + 1`; level-`k` stubs belong to nodes at
//! graph distance `k - 1` from the root. The root's own stubs form level 1.

mod coupling;
mod matching;

use std::io::Write;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Attachment, MultiGraph, Side, Stub, StubLayout, StubPool};

pub use coupling::{coupling_report, explore_for_coupling, CouplingReport, TmSet};
pub use matching::no_connection_probability;

/// Per-root exploration record. Index `k` of `z`, `y` and `m` refers to
/// level `k`; index 0 is the root itself (`z[0] = 1`, `m[0] = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpgTrace {
    pub root: usize,
    pub alpha: f64,
    z: Vec<u64>,
    y: Vec<f64>,
    m: Vec<u64>,
    alive: bool,
}

impl SpgTrace {
    fn new(root: usize, alpha: f64) -> Self {
        SpgTrace { root, alpha, z: vec![1], y: vec![0.0], m: vec![0], alive: true }
    }

    fn push(&mut self, z: u64) {
        let k = self.z.len() as i32;
        self.z.push(z);
        self.y.push(self.alpha.powi(k) * (z.max(1) as f64).ln());
        self.m.push(self.m.last().copied().unwrap_or(0).saturating_add(z));
        if z == 0 {
            self.alive = false;
        }
    }

    /// Free stubs at each level.
    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// `alpha^k log(Z_k v 1)` with `alpha = tau - 2`.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Cumulative free-stub counts `M_k = Z_1 + ... + Z_k`.
    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn alive(&self) -> bool {
        self.alive
    }

    /// Deepest completed level.
    pub fn depth(&self) -> u32 {
        (self.z.len() - 1) as u32
    }

    /// CSV with columns `k,Z_k,Y_k,M_k`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "k,Z_k,Y_k,M_k")?;
        for k in 1..self.z.len() {
            writeln!(w, "{},{},{},{}", k, self.z[k], self.y[k], self.m[k])?;
        }
        Ok(())
    }
}

/// First pairing that joins the two explorations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cross {
    pub own_level: u32,
    pub other_level: u32,
}

impl Cross {
    pub fn distance(&self) -> u32 {
        self.own_level + self.other_level - 1
    }
}

/// One growing SPG: its trace and the free stubs of its deepest level.
#[derive(Clone, Debug)]
pub struct SpgExplorer {
    side: Side,
    level: u32,
    frontier: Vec<Range<Stub>>,
    free: u64,
    trace: SpgTrace,
}

impl SpgExplorer {
    /// Attach `root` at level 1.
    pub fn start<L: StubLayout + ?Sized>(pool: &mut StubPool<'_, L>, root: usize, side: Side, alpha: f64) -> Self {
        pool.attach(root, Attachment { side, level: 1 });
        let stubs = pool.layout().stubs(root);
        let mut trace = SpgTrace::new(root, alpha);
        let free = stubs.end - stubs.start;
        trace.push(free);
        SpgExplorer { side, level: 1, frontier: vec![stubs], free, trace }
    }

    pub fn trace(&self) -> &SpgTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SpgTrace {
        self.trace
    }

    /// Level of the current free stubs.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Unpaired free stubs at the current level.
    pub fn free(&self) -> u64 {
        self.free
    }

    pub fn alive(&self) -> bool {
        self.trace.alive
    }

    /// Pair every free stub of the current level in order. Partners owned by
    /// unattached nodes attach them at the next level; partners that are free
    /// stubs of this exploration are consumed. Returns early at the first
    /// partner owned by the other exploration.
    ///
    /// # Panics
    /// If the exploration is dead.
    pub fn grow_level<L: StubLayout + ?Sized, R: Rng + ?Sized>(
        &mut self,
        pool: &mut StubPool<'_, L>,
        rng: &mut R,
        pairs_examined: &mut u64,
    ) -> Option<Cross> {
        assert!(self.alive(), "growing a dead exploration");
        let layout = pool.layout();
        let a = self.level;
        let mut next: Vec<Range<Stub>> = Vec::new();
        let mut next_free = 0u64;
        for ri in 0..self.frontier.len() {
            let range = self.frontier[ri].clone();
            for s in range {
                if pool.is_paired(s) {
                    continue;
                }
                let t = pool.lazy_pair(s, rng);
                *pairs_examined += 1;
                self.free -= 1;
                let w = layout.owner(t);
                match pool.attachment(w) {
                    None => {
                        pool.attach(w, Attachment { side: self.side, level: a + 1 });
                        let st = layout.stubs(w);
                        if st.start < t {
                            next.push(st.start..t);
                        }
                        if t + 1 < st.end {
                            next.push(t + 1..st.end);
                        }
                        next_free += st.end - st.start - 1;
                    }
                    Some(at) if at.side == self.side => {
                        if at.level == a {
                            self.free -= 1;
                        } else {
                            debug_assert_eq!(at.level, a + 1);
                            next_free -= 1;
                        }
                    }
                    Some(at) => return Some(Cross { own_level: a, other_level: at.level }),
                }
            }
        }
        debug_assert_eq!(self.free, 0);
        self.frontier = next;
        self.free = next_free;
        self.level = a + 1;
        self.trace.push(next_free);
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HopcountStatus {
    Connected,
    Disconnected,
    Undetermined,
}

impl HopcountStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            HopcountStatus::Connected => "connected",
            HopcountStatus::Disconnected => "disconnected",
            HopcountStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HopcountResult {
    pub distance: Option<u32>,
    pub status: HopcountStatus,
    pub trace1: SpgTrace,
    pub trace2: SpgTrace,
    pub pairs_examined: u64,
}

/// `2 ceil(log log N / |log(tau - 2)|) + 40`.
pub fn default_max_level(n: usize, tau: f64) -> u32 {
    let r = ((n as f64).ln().ln() / (tau - 2.0).ln().abs()).max(0.0);
    2 * r.ceil() as u32 + 40
}

/// Bidirectional SPG hopcount between `u` and `v`.
///
/// The exploration with fewer free stubs grows next (ties go to `u`). The
/// first pairing between the two explorations, of a level-`a` stub with a
/// level-`b` stub, certifies distance `a + b - 1`, and no shorter path can
/// exist at that point, so the search stops. If one exploration dies first
/// the roots are disconnected. If the smallest distance the next growth step
/// could certify exceeds `max_level`, the result is undetermined.
pub fn hopcount<L: StubLayout + ?Sized, R: Rng + ?Sized>(
    pool: &mut StubPool<'_, L>,
    u: usize,
    v: usize,
    max_level: u32,
    alpha: f64,
    rng: &mut R,
) -> HopcountResult {
    if u == v {
        let t = SpgExplorer::start(pool, u, Side::First, alpha).into_trace();
        return HopcountResult {
            distance: Some(0),
            status: HopcountStatus::Connected,
            trace1: t.clone(),
            trace2: t,
            pairs_examined: 0,
        };
    }
    let mut first = SpgExplorer::start(pool, u, Side::First, alpha);
    let mut second = SpgExplorer::start(pool, v, Side::Second, alpha);
    let mut pairs = 0u64;
    let finish = |first: SpgExplorer, second: SpgExplorer, distance, status, pairs| HopcountResult {
        distance,
        status,
        trace1: first.into_trace(),
        trace2: second.into_trace(),
        pairs_examined: pairs,
    };
    loop {
        if !first.alive() || !second.alive() {
            return finish(first, second, None, HopcountStatus::Disconnected, pairs);
        }
        if first.level() + second.level() - 1 > max_level {
            return finish(first, second, None, HopcountStatus::Undetermined, pairs);
        }
        let (grow, other) = if first.free() <= second.free() {
            (&mut first, &mut second)
        } else {
            (&mut second, &mut first)
        };
        if let Some(cross) = grow.grow_level(pool, rng, &mut pairs) {
            debug_assert_eq!(cross.other_level, other.level());
            let d = cross.distance();
            return finish(first, second, Some(d), HopcountStatus::Connected, pairs);
        }
    }
}

/// Grow a single SPG from `root` until it dies or has `max_levels` levels.
pub fn explore_single<L: StubLayout + ?Sized, R: Rng + ?Sized>(
    pool: &mut StubPool<'_, L>,
    root: usize,
    alpha: f64,
    max_levels: u32,
    rng: &mut R,
) -> SpgTrace {
    let mut ex = SpgExplorer::start(pool, root, Side::First, alpha);
    let mut pairs = 0;
    while ex.alive() && ex.level() < max_levels {
        let cross = ex.grow_level(pool, rng, &mut pairs);
        debug_assert!(cross.is_none());
    }
    ex.into_trace()
}

/// Breadth-first distance on a fully paired graph.
pub fn bfs_hopcount(g: &MultiGraph, u: usize, v: usize) -> Option<u32> {
    g.bfs_hopcount(u, v)
}

/// One line of a hopcount batch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopcountRecord {
    pub seed: u64,
    pub u: usize,
    pub v: usize,
    pub distance: Option<u32>,
    pub status: HopcountStatus,
}

/// CSV with columns `seed,u,v,distance,status`; `distance` is empty when
/// absent.
pub fn write_batch_csv(records: &[HopcountRecord], mut w: impl Write) -> Result<()> {
    writeln!(w, "seed,u,v,distance,status")?;
    for r in records {
        let d = r.distance.map(|d| d.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.seed, r.u, r.v, d, r.status.as_str())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeDistribution;
    use crate::graph::{DegreeSequence, GroupedDegrees};
    use crate::rng;

    #[test]
    fn star_dies_after_one_level() {
        let seq = DegreeSequence::from_degrees(vec![3, 1, 1, 1]).unwrap();
        let mut pool = StubPool::new(&seq);
        let t = explore_single(&mut pool, 0, 0.8, 10, &mut rng::stream(0, 0));
        assert_eq!(t.z(), &[1, 3, 0]);
        assert!(!t.alive());
        assert_eq!(t.m(), &[0, 3, 3]);
    }

    #[test]
    fn cycle_soup_levels_stay_small() {
        let seq = DegreeSequence::from_degrees(vec![2; 30]).unwrap();
        let mut r = rng::stream(1, 0);
        for _ in 0..500 {
            let mut pool = StubPool::new(&seq);
            let t = explore_single(&mut pool, 0, 0.8, 100, &mut r);
            assert!(t.z().iter().all(|&z| z <= 2));
            assert!(!t.alive());
        }
    }

    #[test]
    fn trivial_distances() {
        let seq = DegreeSequence::from_degrees(vec![1, 1]).unwrap();
        let mut pool = StubPool::new(&seq);
        let r = hopcount(&mut pool, 0, 1, 40, 0.8, &mut rng::stream(0, 0));
        assert_eq!(r.distance, Some(1));
        assert_eq!(r.status, HopcountStatus::Connected);
        let mut pool = StubPool::new(&seq);
        assert_eq!(hopcount(&mut pool, 1, 1, 40, 0.8, &mut rng::stream(0, 0)).distance, Some(0));
    }

    #[test]
    fn disconnected_pair() {
        // Two degree-2 nodes: either a double edge or two self-loops.
        let seq = DegreeSequence::from_degrees(vec![2, 2]).unwrap();
        let mut r = rng::stream(2, 0);
        let mut seen = [false; 2];
        for _ in 0..100 {
            let mut pool = StubPool::new(&seq);
            let res = hopcount(&mut pool, 0, 1, 40, 0.8, &mut r);
            let g = pool.exhaust(&mut r);
            assert_eq!(res.distance, g.bfs_hopcount(0, 1));
            match res.status {
                HopcountStatus::Connected => seen[0] = true,
                HopcountStatus::Disconnected => seen[1] = true,
                HopcountStatus::Undetermined => panic!(),
            }
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn undetermined_when_max_level_is_tiny() {
        let seq = DegreeSequence::from_degrees(vec![1, 2, 2, 2, 1]).unwrap();
        let mut r = rng::stream(3, 0);
        let mut undetermined = 0;
        for _ in 0..200 {
            let mut pool = StubPool::new(&seq);
            let res = hopcount(&mut pool, 0, 4, 1, 0.8, &mut r);
            if res.status == HopcountStatus::Undetermined {
                undetermined += 1;
                assert_eq!(res.distance, None);
            } else if let Some(d) = res.distance {
                assert!(d <= 1);
            }
        }
        assert!(undetermined > 0);
    }

    #[test]
    fn matches_bfs_on_small_random_instances() {
        let dist = DegreeDistribution::build_family(2.8).unwrap();
        let mut r = rng::stream(4, 0);
        for _ in 0..300 {
            let g = GroupedDegrees::sample_rooted(60, &dist, &mut r).unwrap();
            let mut pool = StubPool::new(&g);
            let res = hopcount(&mut pool, 0, 1, default_max_level(60, 2.8), 0.8, &mut r);
            let full = pool.exhaust(&mut r);
            assert_eq!(res.distance, full.bfs_hopcount(0, 1));
        }
    }

    #[test]
    fn attachment_levels_are_bfs_spheres() {
        let dist = DegreeDistribution::build_family(2.5).unwrap();
        let mut r = rng::stream(5, 0);
        for _ in 0..100 {
            let seq = DegreeSequence::draw(150, &dist, &mut r).unwrap();
            let mut pool = StubPool::new(&seq);
            let trace = explore_single(&mut pool, 0, 0.5, 1000, &mut r);
            assert!(!trace.alive());
            let attached: Vec<(usize, Attachment)> = pool.attachments().collect();
            let g = pool.exhaust(&mut r);
            let d = g.bfs_distances(0);
            for (node, at) in &attached {
                assert_eq!(d[*node], Some(at.level - 1));
            }
            assert_eq!(attached.len(), d.iter().filter(|x| x.is_some()).count());
        }
    }

    #[test]
    fn trace_csv() {
        let seq = DegreeSequence::from_degrees(vec![3, 1, 1, 1]).unwrap();
        let mut pool = StubPool::new(&seq);
        let t = explore_single(&mut pool, 0, 0.5, 10, &mut rng::stream(0, 0));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,Z_k,Y_k,M_k");
        assert_eq!(lines[1], format!("1,3,{},3", 0.5 * 3f64.ln()));
        assert_eq!(lines[2], "2,0,0,3");
    }

    #[test]
    fn batch_csv_format() {
        let recs = vec![
            HopcountRecord { seed: 1, u: 0, v: 1, distance: Some(4), status: HopcountStatus::Connected },
            HopcountRecord { seed: 2, u: 0, v: 1, distance: None, status: HopcountStatus::Undetermined },
        ];
        let mut buf = Vec::new();
        write_batch_csv(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "seed,u,v,distance,status\n1,0,1,4,connected\n2,0,1,,undetermined\n");
    }
}
