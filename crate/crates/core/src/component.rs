//! Property components: one static and one dynamic value per group pair.
//!
//! Canonical order is every static pair (canonical pair order) followed by
//! every dynamic pair. Textual names look like `static:D:R`.

use std::fmt;

use crate::error::{Error, Result};
use crate::netcore::LabelSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Static,
    Dynamic,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Static => "static",
            ComponentKind::Dynamic => "dynamic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub kind: ComponentKind,
    pub pair: usize,
}

impl Component {
    pub fn new(kind: ComponentKind, pair: usize) -> Self {
        Component { kind, pair }
    }

    /// All components in canonical order.
    pub fn all(labels: &LabelSet, with_dynamic: bool) -> Vec<Component> {
        let kinds: &[ComponentKind] = if with_dynamic {
            &[ComponentKind::Static, ComponentKind::Dynamic]
        } else {
            &[ComponentKind::Static]
        };
        kinds
            .iter()
            .flat_map(|&kind| (0..labels.pair_count()).map(move |pair| Component { kind, pair }))
            .collect()
    }

    /// Position in a flattened property vector.
    pub fn index(&self, labels: &LabelSet) -> usize {
        match self.kind {
            ComponentKind::Static => self.pair,
            ComponentKind::Dynamic => labels.pair_count() + self.pair,
        }
    }

    pub fn from_index(index: usize, labels: &LabelSet) -> Component {
        let pairs = labels.pair_count();
        if index < pairs {
            Component::new(ComponentKind::Static, index)
        } else {
            Component::new(ComponentKind::Dynamic, index - pairs)
        }
    }

    pub fn name(&self, labels: &LabelSet) -> String {
        format!("{}:{}", self.kind.as_str(), labels.pair_name(labels.pair(self.pair)))
    }

    pub fn display<'a>(&'a self, labels: &'a LabelSet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Component, &'a LabelSet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.name(self.1))
            }
        }
        D(self, labels)
    }

    /// Parses `static:A:B` / `dynamic:A:B`; the pair may be given in either order.
    pub fn parse(name: &str, labels: &LabelSet) -> Result<Component> {
        let mut parts = name.trim().split(':');
        let (kind, a, b) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(a), Some(b), None) => (k, a, b),
            _ => return Err(Error::invalid(format!("malformed component `{name}`"))),
        };
        let kind = match kind {
            "static" => ComponentKind::Static,
            "dynamic" => ComponentKind::Dynamic,
            _ => return Err(Error::invalid(format!("unknown component kind in `{name}`"))),
        };
        let (a, b) = match (labels.index_of(a), labels.index_of(b)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::invalid(format!("unknown component `{name}`"))),
        };
        Ok(Component::new(kind, labels.pair_index(a, b)))
    }
}
