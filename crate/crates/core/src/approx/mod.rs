//! Constructive band-sparse approximations, each returned with a certificate.

pub mod bipartite;
pub mod edge_addition;
pub mod expander;
pub mod permutation;
pub mod regular;
pub mod tree;

pub use bipartite::{bipartite_block, bipartite_lower_bound, bipartite_stack_approx};
pub use edge_addition::{
    approximate_edge_addition, block_orthogonality_check, edge_addition_split, edge_blocks,
    EdgeAdditionSplit, EdgeBlock,
};
pub use expander::{
    complete_family_projection, constant_projection, expander_projection, lazy_walk,
    projection_block, Expander, ExpanderSpec, FamilyProjection, ProjectionBlock,
    ProjectionSchedule,
};
pub use permutation::{hopcroft_karp, permutation_decomposition, permutation_matrix};
pub use regular::{regular_complement_decomposition, regular_identity, RegularIdentityReport};
pub use tree::{
    column_norm_sq, column_norms, kept_levels, tree_triangular_split, tree_truncation_approx,
    TreeTruncation,
};
