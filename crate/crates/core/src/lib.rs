//! Normalized graph Laplacians and their band-sparse approximation.
//!
//! An operator on `l^2(V)` lies in `B^(d)` when every row and every column of
//! its matrix has at most `d` nonzero entries. A graph whose degrees are
//! bounded by `d` has its normalized Laplacian in `B^(d+1)`; this crate deals
//! with graphs of unbounded degree and asks how well their Laplacian can be
//! approximated in operator norm by members of `B^(d)`.
//!
//! * [`graph`]: graphs, generators (complete, bipartite, random regular,
//!   rooted trees, unions, complements) and staged edge addition.
//! * [`operator`]: sparse matrices, the normalized Laplacian/adjacency and
//!   band profiles.
//! * [`spectral`]: certified-interval operator-norm estimates.
//! * [`approx`]: constructive approximants, each with an
//!   [`ApproximationCertificate`] carrying a proven error bound.
//! * [`diagnostics`]: lower-bound (obstruction) certificates and a truncation
//!   oracle.
//! * [`io`]: text formats for graphs and matrices.
//!
//! Everything is computed on finite graphs. Statements about infinite
//! families become sweeps over finite family members.

pub mod approx;
pub mod certificate;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod io;
pub mod operator;
pub mod spectral;

pub use certificate::{ApproximationCertificate, CertificateRecord, Method};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, TreeSpec, VertexLabel};
pub use operator::{band_profile, BandProfile, SparseOperator};
pub use spectral::{exact_norm_small, operator_norm, NormEstimate};
