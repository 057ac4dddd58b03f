use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for one independent stream of a seeded experiment.
///
/// Every consumer that needs reproducible randomness (permutation rounds,
/// per-class fold shuffles, per-gene simulation) derives its own stream so the
/// draws do not depend on scheduling or on how many other streams exist.
pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
