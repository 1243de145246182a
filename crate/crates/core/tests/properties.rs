use std::collections::VecDeque;

use hoplab::branching::simulate_delayed_bp;
use hoplab::degree::{compensated_sum, Law};
use hoplab::experiments::subsequence;
use hoplab::graph::{pair_all, Attachment};
use hoplab::limit_law::{c_l, half_ceil, integer_min_form, psi, survival_at_threshold, term_ratio, threshold};
use hoplab::spg::{default_max_level, explore_single, hopcount, HopcountStatus};
use hoplab::{rng, DegreeDistribution, DegreeSequence, LawConstants, OffspringDistribution, StubLayout, StubPool};
use proptest::prelude::*;
use rand::Rng;

/// Unit-weight shortest paths over an edge list, written independently of the
/// crate's adjacency structure.
fn oracle_distance(n: usize, edges: &[(usize, usize)], u: usize, v: usize) -> Option<u32> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![u32::MAX; n];
    dist[u] = 0;
    let mut q = VecDeque::from([u]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    (dist[v] != u32::MAX).then_some(dist[v])
}

fn brute_min(y1: f64, y2: f64, c: i64, kappa: f64, span: i64) -> (i64, f64) {
    let mut best = (0, f64::INFINITY);
    for t in -span..=span {
        let v = psi(t, y1, y2, c, kappa);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn size_bias_identity(tau in 2.05f64..2.95, j in 0u64..10_000) {
        let f = DegreeDistribution::build_family(tau).unwrap();
        let g = f.size_bias();
        let lhs = g.pmf(j);
        let rhs = (j + 1) as f64 * f.pmf(j + 1) / f.mean();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn tails_are_monotone_and_consistent(tau in 2.05f64..2.95, x in 1u64..5000) {
        let f = DegreeDistribution::build_family(tau).unwrap();
        let g = f.size_bias();
        prop_assert!(f.tail(x + 1) <= f.tail(x));
        prop_assert!(g.tail(x + 1) <= g.tail(x));
        prop_assert!((f.tail(x - 1) - f.tail(x) - f.pmf(x)).abs() <= 1e-12);
        prop_assert!(f.pmf(0) == 0.0 && g.pmf(0) >= 0.0);
    }

    #[test]
    fn pmf_sums_to_one_with_tail(tau in 2.05f64..2.95, h in 10u64..3000) {
        let f = DegreeDistribution::build_family(tau).unwrap();
        let s = compensated_sum((0..=h).map(|j| f.pmf(j))) + f.tail(h);
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimizer_matches_brute_force(
        y1 in 1e-3f64..1e3, y2 in 1e-3f64..1e3, c in 0i64..=1, kappa in 1.01f64..10.0,
    ) {
        let (t, v) = integer_min_form(y1, y2, c, kappa).unwrap();
        let (bt, bv) = brute_min(y1, y2, c, kappa, 200);
        prop_assert_eq!(t, bt);
        prop_assert_eq!(v, bv);
        prop_assert!(term_ratio(t, y1, y2, c, kappa) <= kappa * (1.0 + 1e-12));
    }

    #[test]
    fn parallel_shift_identity(l in -30i64..30, a in -0.999f64..=0.0, tau in 2.05f64..2.95, seed in 0u64..1000) {
        let mut r = rng::stream(seed, 0);
        let pairs: Vec<(f64, f64)> = (0..200).map(|_| (r.random_range(0.0..3.0), r.random_range(0.0..3.0))).collect();
        let kappa = 1.0 / (tau - 2.0);
        prop_assert_eq!(c_l(l + 2), c_l(l));
        prop_assert_eq!(half_ceil(l + 2), half_ceil(l) + 1);
        let shifted = survival_at_threshold(&pairs, c_l(l), threshold(l, a, tau) * (tau - 2.0), kappa);
        let direct = survival_at_threshold(&pairs, c_l(l + 2), threshold(l + 2, a, tau), kappa);
        prop_assume!(direct.is_ok());
        prop_assert_eq!(shifted.unwrap().successes, direct.unwrap().successes);
    }

    #[test]
    fn conditioning_drops_only_extinct_pairs(seed in 0u64..1000, l in -10i64..10) {
        let mut r = rng::stream(seed, 1);
        let pairs: Vec<(f64, f64)> = (0..300)
            .map(|_| {
                let y = |r: &mut rng::SimRng| if r.random_bool(0.2) { 0.0 } else { r.random_range(0.01..3.0) };
                (y(&mut r), y(&mut r))
            })
            .collect();
        let kept: Vec<(f64, f64)> = pairs.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
        prop_assume!(!kept.is_empty());
        let a = hoplab::limit_law::r_a_survival(-0.3, l, &pairs, 2.8).unwrap();
        let b = hoplab::limit_law::r_a_survival(-0.3, l, &kept, 2.8).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn defect_in_range(n in 16u64..1_000_000_000_000, tau in 2.05f64..2.95) {
        let c = LawConstants::new(n, tau).unwrap();
        prop_assert!(c.a_n > -1.0 && c.a_n <= 0.0);
        prop_assert!(c.kappa > 1.0);
        prop_assert_eq!(c.k_tau_n, 2 * c.ratio.floor() as i64);
    }

    #[test]
    fn pairing_preserves_degrees(seed in 0u64..10_000, n in 2usize..200) {
        let f = DegreeDistribution::build_family(2.6).unwrap();
        let mut r = rng::stream(seed, 2);
        let seq = DegreeSequence::draw(n, &f, &mut r).unwrap();
        let eager = pair_all(&seq, &mut r).unwrap();
        let lazy = StubPool::new(&seq).exhaust(&mut r);
        for g in [&eager, &lazy] {
            prop_assert_eq!(g.stub_pairs().len() as u64 * 2, seq.total_stubs());
            for v in 0..n {
                prop_assert_eq!(g.degree(v) as u64, seq.degree(v));
            }
        }
    }

    #[test]
    fn lazy_hopcount_equals_oracle(seed in 0u64..100_000, n in 2usize..=200, tau in 2.1f64..2.9) {
        let f = DegreeDistribution::build_family(tau).unwrap();
        let mut r = rng::stream(seed, 3);
        let seq = DegreeSequence::draw(n, &f, &mut r).unwrap();
        let u = r.random_range(0..n);
        let v = r.random_range(0..n);
        let mut pool = StubPool::new(&seq);
        let res = hopcount(&mut pool, u, v, default_max_level(n, tau), tau - 2.0, &mut r);
        prop_assert_ne!(res.status, HopcountStatus::Undetermined);
        let g = pool.exhaust(&mut r);
        prop_assert_eq!(res.distance, oracle_distance(n, g.edges(), u, v));
    }

    #[test]
    fn levels_are_bfs_spheres(seed in 0u64..100_000, n in 2usize..=200) {
        let f = DegreeDistribution::build_family(2.5).unwrap();
        let mut r = rng::stream(seed, 4);
        let seq = DegreeSequence::draw(n, &f, &mut r).unwrap();
        let mut pool = StubPool::new(&seq);
        let trace = explore_single(&mut pool, 0, 0.5, 10_000, &mut r);
        prop_assert!(!trace.alive());
        let attached: Vec<(usize, Attachment)> = pool.attachments().collect();
        let g = pool.exhaust(&mut r);
        for (node, at) in &attached {
            prop_assert_eq!(oracle_distance(n, g.edges(), 0, *node), Some(at.level - 1));
        }
        let reachable = (0..n).filter(|&x| oracle_distance(n, g.edges(), 0, x).is_some()).count();
        prop_assert_eq!(attached.len(), reachable);
    }

    #[test]
    fn doubling_recursion(z1 in 1u64..50, gens in 1u32..20, seed in 0u64..100) {
        let f = DegreeDistribution::point_mass(z1).unwrap();
        let g = OffspringDistribution::point_mass(2).unwrap();
        let run = simulate_delayed_bp(&f, &g, 2.8, u64::MAX / 4, gens, &mut rng::stream(seed, 5)).unwrap();
        for (k, &z) in run.z.iter().enumerate().skip(1) {
            prop_assert_eq!(z, z1 << (k - 1));
        }
    }

    #[test]
    fn extinction_is_absorbing(seed in 0u64..10_000) {
        let mut pmf = vec![0.0; 4];
        pmf[0] = 0.5;
        pmf[3] = 0.5;
        let f = DegreeDistribution::build_family(2.8).unwrap();
        let g = OffspringDistribution::from_table(pmf).unwrap();
        let run = simulate_delayed_bp(&f, &g, 2.8, 1000, 40, &mut rng::stream(seed, 6)).unwrap();
        if let Some(k) = run.z.iter().position(|&z| z == 0) {
            prop_assert!(run.z[k..].iter().all(|&z| z == 0));
            prop_assert_eq!(run.y_n, 0.0);
        }
        prop_assert_eq!(run.z[0], 1);
    }

    #[test]
    fn subsequence_keeps_the_defect(n1 in 100u64..5000, tau in 2.6f64..2.9) {
        let ns = subsequence(n1, tau, 3).unwrap();
        let a0 = LawConstants::new(n1, tau).unwrap().a_n;
        for &n in &ns[1..] {
            let a = LawConstants::new(n, tau).unwrap().a_n;
            // Flooring moves ln N by at most 1/N, hence the ratio by at most
            // 1 / (N ln N |ln(tau - 2)|).
            let slack = 1.0 / (n as f64 * (n as f64).ln() * (tau - 2.0).ln().abs()) + 1e-9;
            let d = (a - a0).abs();
            prop_assert!(d <= slack || 1.0 - d <= slack, "n={n} a={a} a0={a0}");
        }
    }
}
