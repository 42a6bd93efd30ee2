//! The seven functionality-preserving synthesis actions and the
//! synthesis function dispatching them.
//!
//! Every pass maps `Aig -> Aig`, preserves the Boolean function of
//! each output, and is deterministic for a fixed configuration. The
//! non-zero-cost passes never increase the relevant cost metric
//! (AND count for rw/rf/rs, depth for b).

mod balance;
pub mod cuts;
pub mod library;
mod mffc;
pub mod npn;
mod refactor;
mod resub;
mod rewrite;
mod tt;

pub use balance::balance;
pub use library::{build_rewrite_library, RewriteLibrary};
pub use refactor::refactor;
pub use resub::resub;
pub use rewrite::rewrite;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::aig::Aig;

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("unknown action mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("recipe length {0} exceeds the maximum of {MAX_RECIPE_LEN}")]
    TooLong(usize),
}

/// Maximum recipe length L.
pub const MAX_RECIPE_LEN: usize = 10;

/// Number of distinct actions M.
pub const NUM_ACTIONS: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionKind {
    Balance,
    Rewrite,
    Refactor,
    Resub,
}

/// One synthesis action; `zero_cost` selects the `-z` variant and is
/// never set for balance.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Action {
    id: u8,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = {
        let mut all = [Action { id: 0 }; NUM_ACTIONS];
        let mut i = 0;
        while i < NUM_ACTIONS {
            all[i] = Action { id: i as u8 };
            i += 1;
        }
        all
    };

    pub fn from_id(id: usize) -> Option<Action> {
        (id < NUM_ACTIONS).then_some(Action { id: id as u8 })
    }

    /// Stable integer id, 0..7 in mnemonic-table order.
    pub fn id(self) -> usize {
        self.id as usize
    }

    pub fn kind(self) -> ActionKind {
        match self.id {
            0 => ActionKind::Balance,
            1 | 2 => ActionKind::Rewrite,
            3 | 4 => ActionKind::Refactor,
            _ => ActionKind::Resub,
        }
    }

    pub fn zero_cost(self) -> bool {
        matches!(self.id, 2 | 4 | 6)
    }

    pub fn mnemonic(self) -> &'static str {
        ["b", "rw", "rw-z", "rf", "rf-z", "rs", "rs-z"][self.id()]
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for Action {
    type Err = RecipeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Action::ALL
            .into_iter()
            .find(|a| a.mnemonic() == s)
            .ok_or_else(|| RecipeError::UnknownMnemonic(s.to_string()))
    }
}

/// An ordered action sequence of length at most [`MAX_RECIPE_LEN`].
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Recipe {
    actions: Vec<Action>,
}

impl Recipe {
    pub fn new() -> Recipe {
        Recipe::default()
    }

    pub fn from_actions(actions: Vec<Action>) -> Result<Recipe, RecipeError> {
        if actions.len() > MAX_RECIPE_LEN {
            return Err(RecipeError::TooLong(actions.len()));
        }
        Ok(Recipe { actions })
    }

    /// ABC's standard expert recipe, used as the reward baseline.
    pub fn resyn2() -> Recipe {
        "b; rw; rf; b; rw; rw-z; b; rf-z; rw-z; b".parse().expect("fixed recipe")
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn push(&mut self, a: Action) -> Result<(), RecipeError> {
        if self.actions.len() >= MAX_RECIPE_LEN {
            return Err(RecipeError::TooLong(self.actions.len() + 1));
        }
        self.actions.push(a);
        Ok(())
    }

    pub fn extended(&self, a: Action) -> Result<Recipe, RecipeError> {
        let mut r = self.clone();
        r.push(a)?;
        Ok(r)
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.actions.iter().map(|a| a.mnemonic()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl FromStr for Recipe {
    type Err = RecipeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Recipe::new());
        }
        let actions = s
            .split(';')
            .map(|part| part.parse::<Action>())
            .collect::<Result<Vec<_>, _>>()?;
        Recipe::from_actions(actions)
    }
}

/// Tunables shared by the passes.
#[derive(Clone, Debug)]
pub struct TransformConfig {
    /// Cuts kept per node during rewrite enumeration.
    pub max_cuts: usize,
    /// Node bound of the rewrite structure library.
    pub library_bound: u8,
    /// Refactor skips cones with more leaves than this.
    pub refactor_leaf_bound: usize,
    /// Resubstitution window: TFI depth collected around each node.
    pub resub_window_depth: u32,
    /// Simulation signature width in 64-bit words (16 = 1024 patterns).
    pub resub_sig_words: usize,
    /// Seed for signature patterns; fixed so passes are deterministic.
    pub sig_seed: u64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            max_cuts: 16,
            library_bound: 7,
            refactor_leaf_bound: 10,
            resub_window_depth: 4,
            resub_sig_words: 16,
            sig_seed: 0x5eed_cafe,
        }
    }
}

/// Shared immutable context: configuration plus the rewrite library.
#[derive(Clone)]
pub struct TransformCtx {
    pub config: TransformConfig,
    pub library: Arc<RewriteLibrary>,
}

impl TransformCtx {
    pub fn new(config: TransformConfig, library: Arc<RewriteLibrary>) -> TransformCtx {
        TransformCtx { config, library }
    }

    /// Context with default configuration; builds the library once per
    /// process and shares it.
    pub fn with_default_library() -> TransformCtx {
        use std::sync::OnceLock;
        static LIB: OnceLock<Arc<RewriteLibrary>> = OnceLock::new();
        let lib = LIB.get_or_init(|| Arc::new(build_rewrite_library(7))).clone();
        TransformCtx { config: TransformConfig::default(), library: lib }
    }
}

/// The synthesis function: applies one action to a graph.
pub fn apply_action(g: &Aig, action: Action, ctx: &TransformCtx) -> Aig {
    let z = action.zero_cost();
    match action.kind() {
        ActionKind::Balance => balance(g),
        ActionKind::Rewrite => rewrite(g, z, ctx),
        ActionKind::Refactor => refactor(g, z, ctx),
        ActionKind::Resub => resub(g, z, ctx),
    }
}

/// Folds a recipe over a starting graph. The trace holds the stats of
/// every intermediate graph including the input: `|recipe| + 1` rows.
pub fn apply_recipe(
    g0: &Aig,
    recipe: &Recipe,
    ctx: &TransformCtx,
) -> (Aig, Vec<crate::aig::AigStats>) {
    let mut trace = Vec::with_capacity(recipe.len() + 1);
    trace.push(g0.stats());
    let mut g = g0.clone();
    for &a in recipe.actions() {
        g = apply_action(&g, a, ctx);
        trace.push(g.stats());
    }
    (g, trace)
}
