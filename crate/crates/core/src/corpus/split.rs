use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, KernelTuple};
use crate::api::Direction;
use crate::util::stable_hash;

/// Train:test proportion, kept as exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRatio {
    pub train: u64,
    pub test: u64,
}

impl SplitRatio {
    pub const NINE_TO_ONE: SplitRatio = SplitRatio { train: 9, test: 1 };

    pub fn train_fraction(&self) -> f64 {
        self.train as f64 / (self.train + self.test) as f64
    }

    /// Number of training items for `n` items, rounded half up, leaving at
    /// least one item on each side when `n >= 2`.
    pub fn train_count(&self, n: usize) -> usize {
        let total = self.train + self.test;
        let n64 = n as u64;
        let rounded = ((2 * n64 * self.train + total) / (2 * total)) as usize;
        if n < 2 {
            n
        } else {
            rounded.clamp(1, n - 1)
        }
    }
}

impl Default for SplitRatio {
    fn default() -> Self {
        SplitRatio::NINE_TO_ONE
    }
}

impl fmt::Display for SplitRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.train, self.test)
    }
}

impl FromStr for SplitRatio {
    type Err = CorpusError;

    /// Accepts `9:1` or a decimal train fraction such as `0.9`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::InvalidRatio(s.to_string());
        let (train, test) = if let Some((a, b)) = s.split_once(':') {
            (a.trim().parse::<u64>().map_err(|_| bad())?, b.trim().parse::<u64>().map_err(|_| bad())?)
        } else {
            let s = s.trim();
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if int != "0" || frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let num: u64 = frac.parse().map_err(|_| bad())?;
            (num, den - num)
        };
        if train == 0 || test == 0 {
            return Err(bad());
        }
        let g = gcd(train, test);
        Ok(SplitRatio { train: train / g, test: test / g })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SplitTask {
    pub direction: Direction,
    pub benchmark_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub train: Vec<SplitTask>,
    pub test: Vec<SplitTask>,
    pub seed: u64,
    pub ratio: SplitRatio,
}

impl SplitManifest {
    pub fn train_ids(&self, direction: Direction) -> Vec<&str> {
        ids(&self.train, direction)
    }

    pub fn test_ids(&self, direction: Direction) -> Vec<&str> {
        ids(&self.test, direction)
    }

    pub fn directions(&self) -> BTreeSet<Direction> {
        self.train.iter().chain(&self.test).map(|t| t.direction).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

fn ids(tasks: &[SplitTask], direction: Direction) -> Vec<&str> {
    tasks
        .iter()
        .filter(|t| t.direction == direction)
        .map(|t| t.benchmark_id.as_str())
        .collect()
}

/// Benchmarks that have both a source and a target member for `direction`, sorted.
pub fn tasks_for(tuples: &[KernelTuple], direction: Direction) -> Vec<String> {
    let mut ids: Vec<String> = tuples
        .iter()
        .filter(|t| t.members.contains_key(&direction.from) && t.members.contains_key(&direction.to))
        .map(|t| t.benchmark_id.clone())
        .collect();
    ids.sort();
    ids.dedup();
    ids
}

/// The standard directions that have at least one task.
pub fn directions_of(tuples: &[KernelTuple]) -> Vec<Direction> {
    Direction::STANDARD
        .into_iter()
        .filter(|d| !tasks_for(tuples, *d).is_empty())
        .collect()
}

/// Seeded per-direction split. Each direction's task list is sorted, shuffled
/// with a ChaCha8 stream seeded from `seed` and the direction name, and cut at
/// the ratio. Directions with fewer than two tasks go wholly to train.
pub fn split_corpus(
    tuples: &[KernelTuple],
    directions: &[Direction],
    ratio: SplitRatio,
    seed: u64,
) -> (SplitManifest, Vec<String>) {
    let mut warnings = Vec::new();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for &direction in directions {
        let mut ids = tasks_for(tuples, direction);
        if ids.len() < 2 {
            let msg = format!("{direction}: only {} task(s); placed wholly in train", ids.len());
            tracing::warn!("{msg}");
            warnings.push(msg);
            train.extend(ids.into_iter().map(|benchmark_id| SplitTask { direction, benchmark_id }));
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(&direction.to_string()));
        ids.shuffle(&mut rng);
        let n_train = ratio.train_count(ids.len());
        let test_ids = ids.split_off(n_train);
        train.extend(ids.into_iter().map(|benchmark_id| SplitTask { direction, benchmark_id }));
        test.extend(test_ids.into_iter().map(|benchmark_id| SplitTask { direction, benchmark_id }));
    }
    train.sort();
    test.sort();
    (SplitManifest { train, test, seed, ratio }, warnings)
}
