use crate::graph::{DegreeSequence, StubPool};
use crate::rng;
use crate::stats::Proportion;

/// Monte Carlo probability that, in a pool of `l` unpaired stubs, none of a
/// fixed set of `n1` stubs is paired to a disjoint fixed set of `n2` stubs.
/// Each trial pairs the `n1` stubs one by one with uniform partners.
pub fn no_connection_probability(n1: u64, n2: u64, l: u64, trials: u64, seed: u64) -> Proportion {
    assert!(n1 + n2 <= l && l.is_multiple_of(2), "need n1 + n2 <= L with L even");
    let layout = DegreeSequence::from_degrees(vec![1; l as usize]).expect("even stub count");
    let mut rng = rng::stream(seed, 0);
    let mut hits = 0;
    for _ in 0..trials {
        let mut pool = StubPool::new(&layout);
        let mut connected = false;
        for s in 0..n1 {
            if pool.is_paired(s) {
                continue;
            }
            let t = pool.lazy_pair(s, &mut rng);
            if (n1..n1 + n2).contains(&t) {
                connected = true;
                break;
            }
        }
        if !connected {
            hits += 1;
        }
    }
    Proportion::new(hits, trials)
}
