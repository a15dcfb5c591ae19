//! Length-bucketed batching: variable-length sequences are grouped so every
//! batch holds trajectories of one exact frame count, avoiding pad tokens.

use crate::types::{Dataset, LengthBatch};
use std::collections::BTreeMap;

/// Partitions the dataset into per-length batches, keyed ascending.
pub fn batch_by_length(ds: &Dataset) -> Vec<LengthBatch> {
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, t) in ds.iter().enumerate() {
        buckets.entry(t.len()).or_default().push(idx);
    }
    buckets
        .into_iter()
        .map(|(length, members)| LengthBatch { length, members })
        .collect()
}
