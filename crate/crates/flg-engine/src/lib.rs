//! Program evaluation: two-level unification, big-step expression semantics,
//! and the stratified fixpoint engines.
