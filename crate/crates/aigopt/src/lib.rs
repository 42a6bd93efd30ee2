//! Budgeted synthesis-recipe optimization for and-inverter graphs.
//!
//! The pipeline: [`aig`] holds the graph substrate and AIGER I/O,
//! [`transforms`] the seven functionality-preserving rewrite passes,
//! [`mcts`] the budgeted tree search over recipe space, [`policy`] the
//! learned action prior, [`retrieval`] the nearest-neighbor similarity
//! scoring that tunes the prior's influence, [`trainer`] experience
//! collection and policy training, and [`harness`] the CLI front end.

pub mod aig;
pub mod harness;
pub mod mcts;
pub mod policy;
pub mod retrieval;
pub mod trainer;
pub mod transforms;
