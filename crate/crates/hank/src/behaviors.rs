//! Built-in table of behaviour callbacks.
//!
//! The table ships as an Erlang term file (read with our own term parser)
//! so the data stays in the notation of the thing it describes. Behaviours
//! *not* listed here and not defined inside the project are unknown: the
//! argument analysis skips such modules entirely rather than guess which
//! functions are callbacks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::term::{read_terms, TermValue};

/// The callbacks one behaviour expects of its modules: exact name/arity
/// pairs, plus "any name" arities for convention-driven behaviours like
/// common_test suites.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallbackSet {
    named: BTreeSet<(String, u32)>,
    any_name: BTreeSet<u32>,
}

impl CallbackSet {
    pub fn insert(&mut self, name: impl Into<String>, arity: u32) {
        self.named.insert((name.into(), arity));
    }

    pub fn insert_any_name(&mut self, arity: u32) {
        self.any_name.insert(arity);
    }

    pub fn contains(&self, name: &str, arity: u32) -> bool {
        self.any_name.contains(&arity)
            || self.named.contains(&(name.to_string(), arity))
    }

    pub fn merge(&mut self, other: &CallbackSet) {
        self.named.extend(other.named.iter().cloned());
        self.any_name.extend(other.any_name.iter().copied());
    }

    pub fn is_empty(&self) -> bool {
        self.named.is_empty() && self.any_name.is_empty()
    }
}

const TABLE_SRC: &str = include_str!("data/known_behaviors.config");

/// The built-in behaviour table, parsed once.
pub fn builtin() -> &'static BTreeMap<String, CallbackSet> {
    static TABLE: OnceLock<BTreeMap<String, CallbackSet>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let terms = read_terms(TABLE_SRC).expect("built-in behaviour table parses");
        let entries = terms
            .first()
            .and_then(TermValue::as_list)
            .expect("behaviour table is a list");
        let mut table = BTreeMap::new();
        for entry in entries {
            let parts = entry.as_tuple().expect("behaviour entry is a tuple");
            let name = parts[0].as_atom().expect("behaviour name is an atom");
            let mut set = CallbackSet::default();
            for cb in parts[1].as_list().expect("callback list") {
                let cb = cb.as_tuple().expect("callback is {Name, Arity}");
                let cb_name = cb[0].as_atom().expect("callback name");
                let arity = match cb[1] {
                    TermValue::Integer(n) => n as u32,
                    _ => panic!("callback arity is an integer"),
                };
                if cb_name == "_" {
                    set.insert_any_name(arity);
                } else {
                    set.insert(cb_name, arity);
                }
            }
            table.insert(name.to_string(), set);
        }
        table
    })
}
