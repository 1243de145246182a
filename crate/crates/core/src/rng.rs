//! Seeding contract: every replica draws from its own ChaCha stream derived
//! from a master seed and a replica index, so results do not depend on
//! scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent stream `stream` of the generator keyed by `master`.
pub fn stream(master: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Stream keyed by a tuple of indices (e.g. graph size index and pair index).
pub fn keyed(master: u64, keys: &[u64]) -> SimRng {
    stream(master, derive_key(keys))
}

/// Stream index used by [`keyed`]; `stream(master, derive_key(keys))`
/// reproduces `keyed(master, keys)`.
pub fn derive_key(keys: &[u64]) -> u64 {
    keys.iter().fold(0x9e37_79b9_7f4a_7c15_u64, |acc, &k| splitmix64(acc ^ k))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Number of worker threads: `HOPLAB_THREADS` if set and positive, otherwise
/// rayon's default.
pub fn thread_count() -> usize {
    std::env::var("HOPLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Run `f` inside a rayon pool sized by [`thread_count`].
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
