//! Constraint-based morphological disambiguation for agglutinative text.
//!
//! Tokens of an analyzed corpus carry several candidate morphological parses;
//! this crate prunes them toward one parse per token by combining:
//!
//! - hand-crafted contextual choose/delete rules ([`rules`]),
//! - rules learned without supervision from unambiguous contexts ([`learner`]),
//! - contextual and root-frequency statistics ([`stats`]),
//! - a preprocessor that packages collocations, guesses unknown words, and
//!   converts analyzer output into nested feature structures ([`preprocess`]),
//! - recall/precision/ambiguity evaluation against a gold standard ([`eval`]).
//!
//! [`pipeline`] binds the stages into the standard disambiguation order used
//! by the command-line front end.

pub mod eval;
pub mod format;
pub mod learner;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod rules;
pub mod stats;
