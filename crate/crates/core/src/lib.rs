//! Chung–Lu random digraphs and the mixing behaviour of the simple random
//! walk on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] — weight profiles, connection probabilities and the
//!   standing assumptions on the weights.
//! * [`graphgen`] — exact `O(n log n + |E|)` sampling of digraph
//!   realizations, degree statistics, strong connectivity and a binary
//!   on-disk format.
//! * [`walk`] — transition kernels, stationary measures, total variation
//!   curves and mixing times.
//! * [`entropy`] — exact Poisson-binomial degree laws, entropy `H`,
//!   variance `σ²`, entropic time and the i.i.d. path-mass law `q_t`.
//! * [`quenched`] — path-mass statistics on a fixed graph and the
//!   classification of walk trajectories into nice/non-nice paths.
//! * [`structures`] — directed balls, tree excess, h-roots and the greedy
//!   mass tree.
//! * [`annealed`] — walks that generate their environment lazily.
//! * [`experiments`] — end-to-end finite-n experiments built on the above.
//!
//! All randomness flows from a `u64` seed through counter-based ChaCha
//! streams (see [`rng`]), so results do not depend on the number of worker
//! threads.

pub mod annealed;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod format;
pub mod graphgen;
pub mod model;
pub mod par;
pub mod quenched;
pub mod rng;
pub mod stats;
pub mod structures;
pub mod walk;

pub use error::{Error, Result};
pub use graphgen::{Digraph, DegreeSummary};
pub use model::{AssumptionConstants, ValidationReport, WeightProfile};
pub use walk::ProbVector;
