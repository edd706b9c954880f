use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::props::PropertyProfile;
use crate::store::{bin_profile, PropertyVector};

/// Identical binned queries collapsed into one, weighted by their count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryGroup {
    pub vector: PropertyVector,
    pub weight: usize,
    /// Ids of the member queries, sorted.
    pub members: Vec<String>,
}

impl QueryGroup {
    pub fn is_stationary(&self) -> bool {
        self.vector.is_stationary()
    }
}

/// Groups in ascending key order.
pub fn group_queries<'a, I>(profiles: I) -> Vec<QueryGroup>
where
    I: IntoIterator<Item = (&'a str, &'a PropertyProfile)>,
{
    let mut groups: BTreeMap<PropertyVector, Vec<String>> = BTreeMap::new();
    for (id, p) in profiles {
        groups
            .entry(bin_profile(p))
            .or_default()
            .push(id.to_string());
    }
    groups
        .into_iter()
        .map(|(vector, mut members)| {
            members.sort();
            QueryGroup {
                vector,
                weight: members.len(),
                members,
            }
        })
        .collect()
}
