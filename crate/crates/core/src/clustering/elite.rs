use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::som::{CellIndex, Dims, Grid};
use crate::{math, Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EliteDistribution {
    /// Smallest value admitted to the elite.
    pub threshold: f64,
    pub elite_size: usize,
    pub elite: BTreeMap<String, f64>,
    pub sample: BTreeMap<String, f64>,
}

fn shares<'a>(groups: impl Iterator<Item = &'a str>) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0;
    for g in groups {
        *counts.entry(String::from(g)).or_default() += 1;
        total += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

/// Category mix of the top `percentile` of entities by `values`, against
/// the mix of the whole sample. Entities tied with the cut-off value are
/// all admitted.
pub fn elite_distribution<S: AsRef<str>>(
    values: &[f64],
    groups: &[S],
    percentile: f64,
) -> Result<EliteDistribution> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.len() != groups.len() {
        return Err(Error::DimensionMismatch { expected: values.len(), got: groups.len() });
    }
    if !(percentile > 0.0 && percentile < 1.0) {
        return Err(Error::InvalidConfig(alloc::format!("percentile {percentile} outside (0, 1)")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let take = (math::ceil(percentile * values.len() as f64) as usize).clamp(1, values.len());
    let threshold = sorted[take - 1];
    let elite: Vec<&str> =
        values.iter().zip(groups).filter(|(v, _)| **v >= threshold).map(|(_, g)| g.as_ref()).collect();
    Ok(EliteDistribution {
        threshold,
        elite_size: elite.len(),
        elite: shares(elite.into_iter()),
        sample: shares(groups.iter().map(|g| g.as_ref())),
    })
}

/// Most frequent category among the entities of each cell; ties go to the
/// lexicographically smallest category, unoccupied cells are `None`.
pub fn dominant_category_plane<S: AsRef<str>>(
    assignments: &[CellIndex],
    categories: &[S],
    dims: Dims,
) -> Result<Grid<Option<String>>> {
    if assignments.len() != categories.len() {
        return Err(Error::DimensionMismatch { expected: assignments.len(), got: categories.len() });
    }
    let mut tallies: Vec<BTreeMap<&str, usize>> = alloc::vec![BTreeMap::new(); dims.cells()];
    for (cell, cat) in assignments.iter().zip(categories) {
        dims.check(*cell)?;
        *tallies[cell.linear(dims.cols)].entry(cat.as_ref()).or_default() += 1;
    }
    let cells = tallies
        .into_iter()
        .map(|t| {
            let mut best: Option<(&str, usize)> = None;
            for (cat, n) in t {
                // ascending key order: strict > keeps the smallest on ties
                if best.is_none_or(|(_, b)| n > b) {
                    best = Some((cat, n));
                }
            }
            best.map(|(c, _)| String::from(c))
        })
        .collect();
    Ok(Grid { dims, cells })
}
