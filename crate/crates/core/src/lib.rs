//! comdb: an in-memory concept-oriented database engine.
//!
//! The engine implements a two-level data model: a schema of concepts
//! ordered by labelled dimensions, each concept holding data items that
//! are labelled combinations of super-items. On top of that sit the
//! canonical flattening into primitive columns, projection/de-projection
//! navigation, possibility-based constraint propagation and inference,
//! the COQL query language, and a command-line shell with text formats
//! for persistence and CSV snowflake ingest.

pub mod coql;
pub mod fixtures;
pub mod io;
pub mod flatten;
pub mod model;
pub mod navigate;
pub mod oset;
pub mod propagate;
pub mod shell;
pub mod value;

pub use coql::{CoqlError, DerivedRegistry, ResultTable};
pub use flatten::{flatten, flatten_default, signature, PrimitiveTable};
pub use navigate::{Collection, NavError, PathStep};
pub use propagate::{ConstraintKind, ConstraintSet, Possibility, PropagateError};
pub use model::{Concept, ConceptId, ConceptKind, ItemRef, ModelError, Schema};
pub use oset::{BinaryTable, Combination, DimPath, Direction, ElementId, OrderedSet, OsetError};
pub use value::{Literal, ValueKind};
