//! Variable identifiers and the per-session name table.

use std::collections::HashMap;
use std::fmt;

/// Index of a propositional variable `p_i`, identified with the indeterminate `x_i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Interning table mapping variable names to [`VarId`]s.
///
/// Ids are handed out densely in first-seen order; a name always maps to the
/// same id for the lifetime of the table.
#[derive(Clone, Debug, Default)]
pub struct Vars {
    names: Vec<String>,
    index: HashMap<String, VarId>,
}

impl Vars {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table with the given names interned in order.
    pub fn with_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vars = Self::new();
        for n in names {
            vars.intern(n.as_ref());
        }
        vars
    }

    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    /// Name of `id`, or `None` when the id was not issued by this table.
    pub fn name(&self, id: VarId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    /// Like [`Vars::name`] but falls back to `v<index>` for foreign ids.
    pub fn display_name(&self, id: VarId) -> String {
        match self.name(id) {
            Some(n) => n.to_owned(),
            None => id.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (VarId(i as u32), n.as_str()))
    }
}
