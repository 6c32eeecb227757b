//! Intermediate alphabet reduction for cascades of finite-state transducers.
//!
//! A cascade applies transducers one after another, each reading the output
//! tape of the previous one. Symbols on an intermediate tape that the next
//! transducer treats identically can be merged into one representative on
//! both sides of the tape. The transducers get smaller while the relation of
//! the whole cascade stays the same; see [`reduce`].
//!
//! - [`fst`]: the transducer model
//! - [`textio`]: `.fst`, manifest and report formats
//! - [`engine`]: application, bounded relation enumeration, comparison
//! - [`reduce`]: partition construction, relabeling, cascade sweep
//! - [`gen`]: seeded random cascades
//! - [`cli`]: the `fstcascade` command

pub mod cli;
pub mod engine;
pub mod fst;
pub mod gen;
pub mod reduce;
pub mod symbol;
pub mod textio;

pub use fst::{Arc, Cascade, Fst, FstError, FstStats, StateId};
pub use symbol::Symbol;

/// A legal symbol that no generated or hand-written transducer is expected
/// to know; used to exercise `<unk>` arcs during verification.
pub const PROBE_TOKEN: &str = "__probe__";
