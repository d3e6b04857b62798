//! Demographic axes and combination axes.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Separator used to name groups of a combination axis.
pub const COMBINATION_SEPARATOR: char = '+';

/// A protected attribute discretized into an ordered, finite set of groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemographicAxis {
    id: String,
    groups: Vec<String>,
    components: Vec<String>,
}

impl DemographicAxis {
    pub fn new<I, S>(id: impl Into<String>, groups: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = id.into();
        let groups: Vec<String> = groups.into_iter().map(Into::into).collect();
        if groups.is_empty() {
            return Err(Error::EmptyAxis { axis: id });
        }
        for (i, g) in groups.iter().enumerate() {
            if groups[..i].contains(g) {
                return Err(Error::DuplicateGroup { axis: id, group: g.clone() });
            }
        }
        Ok(Self { id, groups, components: Vec::new() })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn index_of(&self, group: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == group)
    }

    /// Like [`index_of`](Self::index_of) but reports an `UnknownGroup` error.
    pub fn require(&self, group: &str) -> Result<usize> {
        self.index_of(group).ok_or_else(|| Error::UnknownGroup { axis: self.id.clone(), group: group.to_string() })
    }

    /// Ids of the constituent axes when this is a combination axis, empty otherwise.
    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn is_combination(&self) -> bool {
        !self.components.is_empty()
    }

    /// Same axis under a different id.
    pub fn renamed(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Builds the cartesian-product axis of `axes`.
///
/// Groups are the constituent group ids joined with `+`, enumerated with the
/// last axis varying fastest. The axis id is the constituent ids joined the
/// same way.
pub fn combination_axis(axes: &[DemographicAxis]) -> Result<DemographicAxis> {
    if axes.len() < 2 {
        return Err(Error::InvalidArity { got: axes.len() });
    }
    let mut groups: Vec<String> = vec![String::new()];
    for (depth, axis) in axes.iter().enumerate() {
        if axis.is_empty() {
            return Err(Error::EmptyAxis { axis: axis.id.clone() });
        }
        let mut next = Vec::with_capacity(groups.len() * axis.len());
        for prefix in &groups {
            for g in &axis.groups {
                let mut name = prefix.clone();
                if depth > 0 {
                    name.push(COMBINATION_SEPARATOR);
                }
                name.push_str(g);
                next.push(name);
            }
        }
        groups = next;
    }
    let components: Vec<String> = axes.iter().map(|a| a.id.clone()).collect();
    let mut id = String::new();
    for (i, c) in components.iter().enumerate() {
        if i > 0 {
            id.push(COMBINATION_SEPARATOR);
        }
        id.push_str(c);
    }
    let mut axis = DemographicAxis::new(id, groups)?;
    axis.components = components;
    Ok(axis)
}
