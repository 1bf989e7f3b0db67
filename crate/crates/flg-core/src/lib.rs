//! Syntax and semantic domain objects shared by every stage of the flg
//! pipeline: types, declarations, the normalized clause/expression AST,
//! ground values, substitutions, and the tuple world.

pub mod diag;
pub mod hash;
pub mod print;
pub mod term;
pub mod types;
pub mod value;
pub mod world;

use std::sync::Arc;

/// Interned-ish identifier. `Arc<str>` keeps value trees cheap to clone.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}
