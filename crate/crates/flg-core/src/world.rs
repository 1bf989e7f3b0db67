//! The world W: per-predicate sets of derived tuples. Insertion is
//! concurrent (per-relation locks, set semantics) and tags each tuple with
//! the fixpoint round that first derived it, which is what semi-naive
//! delta filtering keys on.

use crate::value::Value;
use crate::Name;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

pub type Tuple = Arc<[Value]>;

#[derive(Debug, Default)]
pub struct World {
    rels: BTreeMap<Name, Mutex<BTreeMap<Tuple, u64>>>,
}

impl World {
    /// Creates a world with one empty relation per declared predicate.
    /// Relations must be registered up front; insertion into an unknown
    /// predicate panics (the validated program fixes the predicate set).
    pub fn new(preds: impl IntoIterator<Item = Name>) -> World {
        World {
            rels: preds.into_iter().map(|p| (p, Mutex::new(BTreeMap::new()))).collect(),
        }
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Name> {
        self.rels.keys()
    }

    pub fn has_relation(&self, pred: &str) -> bool {
        self.rels.contains_key(pred)
    }

    /// Inserts a tuple, recording `round` if it is new. Returns true iff the
    /// tuple was not already present; re-insertion keeps the original round.
    pub fn insert(&self, pred: &str, tuple: Tuple, round: u64) -> bool {
        let rel = self.rels.get(pred).unwrap_or_else(|| panic!("unknown relation {pred}"));
        let mut guard = rel.lock().unwrap();
        match guard.entry(tuple) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(round);
                true
            }
            std::collections::btree_map::Entry::Occupied(_) => false,
        }
    }

    pub fn contains(&self, pred: &str, tuple: &[Value]) -> bool {
        match self.rels.get(pred) {
            Some(rel) => rel.lock().unwrap().contains_key(tuple),
            None => false,
        }
    }

    pub fn len(&self, pred: &str) -> usize {
        self.rels.get(pred).map_or(0, |r| r.lock().unwrap().len())
    }

    pub fn is_empty(&self, pred: &str) -> bool {
        self.len(pred) == 0
    }

    /// Snapshot of a relation in canonical order, with first-derivation rounds.
    pub fn snapshot(&self, pred: &str) -> Vec<(Tuple, u64)> {
        match self.rels.get(pred) {
            Some(rel) => rel.lock().unwrap().iter().map(|(t, r)| (t.clone(), *r)).collect(),
            None => vec![],
        }
    }

    /// Snapshot without round tags.
    pub fn tuples(&self, pred: &str) -> Vec<Tuple> {
        self.snapshot(pred).into_iter().map(|(t, _)| t).collect()
    }

    /// Relation contents as plain sets, for equality assertions in tests.
    pub fn as_sets(&self) -> BTreeMap<Name, Vec<Tuple>> {
        self.rels
            .iter()
            .map(|(p, rel)| (p.clone(), rel.lock().unwrap().keys().cloned().collect()))
            .collect()
    }
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.as_sets() == other.as_sets()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> World {
        World::new([crate::name("p")])
    }

    #[test]
    fn insertion_is_idempotent() {
        let world = w();
        let t: Tuple = vec![Value::bv32(1), Value::bv32(2)].into();
        assert!(world.insert("p", t.clone(), 0));
        assert!(!world.insert("p", t.clone(), 3));
        assert_eq!(world.len("p"), 1);
        // Round of first derivation is kept.
        assert_eq!(world.snapshot("p")[0].1, 0);
    }

    #[test]
    fn snapshot_in_canonical_order() {
        let world = w();
        world.insert("p", vec![Value::bv32(2)].into(), 0);
        world.insert("p", vec![Value::bv32(1)].into(), 0);
        let tuples = world.tuples("p");
        assert_eq!(tuples[0][0], Value::bv32(1));
        assert_eq!(tuples[1][0], Value::bv32(2));
    }

    #[test]
    fn concurrent_insert() {
        let world = w();
        std::thread::scope(|s| {
            for k in 0..4 {
                let world = &world;
                s.spawn(move || {
                    for i in 0..100 {
                        world.insert("p", vec![Value::bv32(i % 10), Value::bv32(k & 1)].into(), 1);
                    }
                });
            }
        });
        assert_eq!(world.len("p"), 20);
    }
}
