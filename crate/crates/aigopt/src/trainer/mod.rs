//! Reward normalization, experience collection, policy training, and
//! online fine-tuning.

mod train;

pub use train::{
    collect_experience, fine_tune_online, train, EpochLog, FineTuneResult, TrainConfig,
    TrainError, TrainOutput,
};

use thiserror::Error;

use crate::mcts::SearchState;
use crate::transforms::{Action, NUM_ACTIONS};

#[derive(Debug, Error)]
pub enum RewardError {
    #[error("non-positive cost value {0}")]
    NonPositive(f64),
}

/// Normalized reward of a recipe against the design's resyn2 baseline:
/// `1 - ratio` while the recipe's cost stays below twice the baseline,
/// `-1` beyond that, clipped to `[-1, 1]`.
pub fn normalize_reward(adp_recipe: f64, adp_resyn2: f64) -> Result<f64, RewardError> {
    if adp_recipe <= 0.0 || !adp_recipe.is_finite() {
        return Err(RewardError::NonPositive(adp_recipe));
    }
    if adp_resyn2 <= 0.0 || !adp_resyn2.is_finite() {
        return Err(RewardError::NonPositive(adp_resyn2));
    }
    let ratio = adp_recipe / adp_resyn2;
    let r = if ratio < 2.0 { 1.0 - ratio } else { -1.0 };
    Ok(r.clamp(-1.0, 1.0))
}

/// One decision made during search: state, committed action, successor
/// state, and the full search policy at the state.
#[derive(Clone, Debug)]
pub struct Experience {
    pub state: SearchState,
    pub action: Action,
    pub next_state: SearchState,
    pub pi_mcts: [f64; NUM_ACTIONS],
}

/// Bounded FIFO buffer of experiences. Capacity convention:
/// `2 * L * N_tr` for `N_tr` training designs.
#[derive(Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    entries: std::collections::VecDeque<Experience>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> ReplayBuffer {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        ReplayBuffer { capacity, entries: std::collections::VecDeque::new() }
    }

    /// Conventional capacity for the given problem size.
    pub fn standard_capacity(recipe_len: usize, num_designs: usize) -> usize {
        2 * recipe_len * num_designs
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends one experience, evicting the oldest when full.
    pub fn push(&mut self, e: Experience) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(e);
    }

    pub fn get(&self, i: usize) -> &Experience {
        &self.entries[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.entries.iter()
    }

    /// Uniform sample of `count` indices without replacement within
    /// one draw (repeats across draws are expected).
    pub fn sample_indices(
        &self,
        count: usize,
        rng: &mut impl rand::Rng,
    ) -> Vec<usize> {
        use rand::seq::SliceRandom;
        let mut idx: Vec<usize> = (0..self.entries.len()).collect();
        idx.shuffle(rng);
        idx.truncate(count.min(self.entries.len()));
        idx
    }
}
