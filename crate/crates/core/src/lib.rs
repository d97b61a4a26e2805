//! Interdisciplinarity analytics for scholarly publication corpora.
//!
//! The pipeline reads citing papers with their reference lists, maps every
//! journal onto a closed set of 27 disciplines, keeps the papers whose
//! references are sufficiently identifiable, and then measures
//!
//! - per-paper Variety, Balance (1 - Gini), and True Diversity against a
//!   cosine-based disparity matrix, with per-period means and 95% intervals;
//! - per-period discipline co-occurrence networks, their modularity
//!   communities, and the split/merge streams linking communities across
//!   adjacent periods.
//!
//! Every stage is a pure function over immutable inputs. Recoverable data
//! problems (a malformed line, an unknown discipline code) are reported as
//! [`Warning`]s next to the result instead of aborting the run.

pub mod catalog;
pub mod cooccurrence;
pub mod corpus;
pub mod diag;
pub mod discipline;
pub mod error;
pub mod export;
pub mod louvain;
pub mod metrics;
pub mod normalize;
pub mod qualifier;
pub mod similarity;
pub mod streams;
pub mod synth;
mod tables;

pub use catalog::{assign, discipline_vector, DisciplineAssignment, DisciplineCatalog, DisciplineVector};
pub use corpus::{DocType, Granularity, Period, PublicationRecord, ReferenceRecord};
pub use diag::Warning;
pub use discipline::{Discipline, DisciplineSet, SubjectArea};
pub use error::{Error, Result};
pub use normalize::{normalize_title, AbbrevMap, CanonicalTitle};
