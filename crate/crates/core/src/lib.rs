//! Search for n-node graphs without 3- and 4-cycles that have as many edges
//! as possible.
//!
//! The objective is the score `s(G) = e(G) - triangles - squares`, whose
//! maximum over n-node graphs equals the extremal number f(n). Searches move
//! through the space of n-node graphs by flipping one node pair at a time.

pub mod canon;
pub mod codec;
pub mod env;
pub mod error;
pub mod graph;
pub mod incremental;
pub mod oracle;
pub mod report;
pub mod scoring;
pub mod tabu;

pub use canon::{canonical_certificate, Certificate};
pub use codec::{decode_sparse6, encode_sparse6, DecodeError, GraphRecord, Provenance};
pub use error::{Error, Result};
pub use graph::{FlipAction, Graph, ScoreDelta, MAX_NODES};
pub use incremental::{BestGraphStore, CampaignConfig, SubmitOutcome};
pub use scoring::{is_feasible, repair_to_feasible, score, upper_bound, ScoreBreakdown};
