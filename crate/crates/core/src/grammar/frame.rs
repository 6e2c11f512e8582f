use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A slot filler: a single symbol or an ordered list of symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Atom(String),
    List(Vec<String>),
}

impl Value {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(s) => Some(s),
            Value::List(_) => None,
        }
    }

    pub fn items(&self) -> Vec<String> {
        match self {
            Value::Atom(s) => vec![s.clone()],
            Value::List(v) => v.clone(),
        }
    }
}

/// Slot/filler map built up by grammar rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frame(pub BTreeMap<String, Value>);

impl Frame {
    pub fn new() -> Self {
        Frame::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, slot: &str) -> Option<&Value> {
        self.0.get(slot)
    }

    pub fn atom(&self, slot: &str) -> Option<&str> {
        self.0.get(slot).and_then(Value::as_atom)
    }

    pub fn list(&self, slot: &str) -> Vec<String> {
        self.0.get(slot).map(Value::items).unwrap_or_default()
    }

    pub fn has(&self, slot: &str) -> bool {
        self.0.contains_key(slot)
    }

    pub fn set(&mut self, slot: &str, value: Value) {
        self.0.insert(slot.to_string(), value);
    }

    /// Sets an atom; fails if the slot already holds a different value.
    pub fn unify_atom(&mut self, slot: &str, value: &str) -> bool {
        match self.0.get(slot) {
            Some(Value::Atom(old)) => old == value,
            Some(Value::List(_)) => false,
            None => {
                self.0.insert(slot.to_string(), Value::Atom(value.to_string()));
                true
            }
        }
    }

    pub fn append(&mut self, slot: &str, items: &[String]) -> bool {
        match self.0.entry(slot.to_string()).or_insert_with(|| Value::List(Vec::new())) {
            Value::List(v) => {
                v.extend(items.iter().cloned());
                true
            }
            Value::Atom(_) => false,
        }
    }

    /// Merges `other` in: atoms must agree, lists concatenate.
    pub fn merge(&mut self, other: &Frame) -> bool {
        for (slot, value) in &other.0 {
            let ok = match value {
                Value::Atom(a) => self.unify_atom(slot, a),
                Value::List(items) => self.append(slot, items),
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match v {
                Value::Atom(a) => write!(f, "{k}={a}")?,
                Value::List(items) => write!(f, "{k}=({})", items.join(" "))?,
            }
        }
        write!(f, "]")
    }
}
