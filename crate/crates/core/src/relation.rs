//! Complex relationships: each maximal clique becomes a transaction over
//! base types `t`, positive types `t+` (two or more members of type `t`) and
//! negative types `-t` (no member of type `t`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::clique::MaximalClique;
use crate::error::{Error, Result};
use crate::model::{Dataset, ObjectType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Present,
    Plus,
    Minus,
}

/// Field order gives the rendering order: present/plus items by type, then
/// negatives by type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    negative: bool,
    base: ObjectType,
    polarity: Polarity,
}

impl Item {
    pub fn new(base: ObjectType, polarity: Polarity) -> Self {
        Item {
            negative: polarity == Polarity::Minus,
            base,
            polarity,
        }
    }

    pub fn present(base: ObjectType) -> Self {
        Item::new(base, Polarity::Present)
    }

    pub fn plus(base: ObjectType) -> Self {
        Item::new(base, Polarity::Plus)
    }

    pub fn minus(base: ObjectType) -> Self {
        Item::new(base, Polarity::Minus)
    }

    pub fn base(&self) -> &ObjectType {
        &self.base
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Present => write!(f, "{}", self.base),
            Polarity::Plus => write!(f, "{}+", self.base),
            Polarity::Minus => write!(f, "-{}", self.base),
        }
    }
}

impl FromStr for Item {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix('-') {
            Ok(Item::minus(ObjectType::new(rest)?))
        } else if let Some(rest) = s.strip_suffix('+') {
            Ok(Item::plus(ObjectType::new(rest)?))
        } else {
            Ok(Item::present(ObjectType::new(s)?))
        }
    }
}

/// A clique's item set plus the position of the clique it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexRelationship {
    pub items: BTreeSet<Item>,
    pub source: usize,
}

impl ComplexRelationship {
    /// Space-separated items in canonical order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&item.to_string());
        }
        out
    }

    pub fn without_negatives(&self) -> ComplexRelationship {
        ComplexRelationship {
            items: self.items.iter().filter(|i| !i.is_negative()).cloned().collect(),
            source: self.source,
        }
    }
}

/// Replaces member ids by their types.
pub fn strip_identifiers<S: AsRef<str>>(
    members: &[S],
    types: &BTreeMap<String, ObjectType>,
) -> Result<Vec<ObjectType>> {
    members
        .iter()
        .map(|id| {
            types
                .get(id.as_ref())
                .cloned()
                .ok_or_else(|| Error::input(format!("no type known for object id {}", id.as_ref())))
        })
        .collect()
}

/// Member types of a clique mined from `dataset`.
pub fn clique_types(clique: &MaximalClique, dataset: &Dataset) -> Vec<ObjectType> {
    clique.members().iter().map(|&i| dataset.get(i).kind.clone()).collect()
}

/// Applies the presence / multiplicity / absence rules for every type of
/// `universe`.
pub fn extract_relationship(raw: &[ObjectType], universe: &[ObjectType]) -> Result<ComplexRelationship> {
    let mut counts: BTreeMap<&ObjectType, usize> = universe.iter().map(|t| (t, 0)).collect();
    for t in raw {
        match counts.get_mut(t) {
            Some(n) => *n += 1,
            None => return Err(Error::input(format!("type {t} is not in the type universe"))),
        }
    }
    let mut items = BTreeSet::new();
    for (t, n) in counts {
        match n {
            0 => {
                items.insert(Item::minus(t.clone()));
            }
            1 => {
                items.insert(Item::present(t.clone()));
            }
            _ => {
                items.insert(Item::present(t.clone()));
                items.insert(Item::plus(t.clone()));
            }
        }
    }
    Ok(ComplexRelationship { items, source: 0 })
}
