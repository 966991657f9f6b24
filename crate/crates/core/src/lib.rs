//! Associative memory on a Hebbian interconnection matrix with
//! proximity-ordered B-matrix retrieval and Widrow-Hoff learning.
//!
//! The pipeline:
//!
//! 1. [`memory`] validates bipolar memories and builds the weight matrix `T`
//!    as the zero-diagonal sum of their outer products.
//! 2. [`proximity`] orders neurons by distance from each trigger neuron.
//! 3. [`retrieval`] permutes `T` into that order, takes its strict lower
//!    triangle `B`, and grows a single clamped neuron into a full vector by
//!    feeding the fragment back through `B`.
//! 4. [`learning`] teaches inactive neurons to retrieve missing memories,
//!    keeping a change only when the retrieval rate strictly rises.
//! 5. [`experiment`] wraps the above in a seeded, reproducible harness.
//!
//! [`oracle`] holds brute-force reference implementations for tests.

pub mod error;
pub mod experiment;
pub mod learning;
pub mod matrix;
pub mod memory;
pub mod oracle;
pub mod par;
pub mod proximity;
pub mod retrieval;

pub use error::{Error, Result};
pub use learning::{
    fallback_node, fold_back, inactive_nodes, learning_loop, learning_loop_with, rank_targets,
    teach_node, widrow_hoff_row, LearningConfig, LearningLog, LearningStep, Outcome, StepPolicy,
    Termination,
};
pub use memory::{
    build_t_matrix, edge_count, validate_memories, InterconnectionMatrix, MemorySet, MemoryVector,
};
pub use par::Execution;
pub use proximity::{
    linear_proximity, ordering_for, permute_matrix, NeuronOrdering, ProximityMatrix,
};
pub use retrieval::{
    evaluate_network, extract_b, generate, match_memory, sgn, BMatrixView, Match, Polarity,
    RetrievalReport, RetrievalTrace,
};
