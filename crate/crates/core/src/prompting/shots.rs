use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PromptError, ShotExample};
use crate::api::Direction;
use crate::util::stable_hash;

/// Samples `n` examples for `direction` from `pool` without replacement,
/// never using `exclude_benchmark`. The draw depends only on the seed, the
/// excluded benchmark and the candidate set (sorted by benchmark id).
pub fn select_shots(
    pool: &[ShotExample],
    direction: Direction,
    n: usize,
    seed: u64,
    exclude_benchmark: &str,
) -> Result<Vec<ShotExample>, PromptError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut candidates: Vec<&ShotExample> = pool
        .iter()
        .filter(|s| s.direction() == direction && s.benchmark_id != exclude_benchmark)
        .collect();
    candidates.sort_by(|a, b| a.benchmark_id.cmp(&b.benchmark_id));
    candidates.dedup_by(|a, b| a.benchmark_id == b.benchmark_id);
    if candidates.len() < n {
        return Err(PromptError::InsufficientShots { direction, needed: n, available: candidates.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(exclude_benchmark));
    Ok(rand::seq::index::sample(&mut rng, candidates.len(), n)
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect())
}
