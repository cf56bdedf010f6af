use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a named parameter inside a [`ParamSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamId(pub u32);

impl ParamId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Interning table for parameter names. Indices are assigned in insertion
/// order and never change.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamSpace {
    names: Vec<String>,
    lookup: HashMap<String, ParamId>,
}

impl ParamSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut space = Self::new();
        for name in names {
            space.intern(name);
        }
        space
    }

    /// Returns the id of `name`, adding it if it is not yet known.
    pub fn intern(&mut self, name: impl Into<String>) -> ParamId {
        let name = name.into();
        if let Some(id) = self.lookup.get(&name) {
            return *id;
        }
        let id = ParamId(self.names.len() as u32);
        self.lookup.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (ParamId(i as u32), n.as_str()))
    }
}
