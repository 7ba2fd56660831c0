//! Sparse vectors keyed by 64-bit coordinate ids.

/// A finite map from coordinate id to a nonzero real value.
///
/// Entries are kept sorted by id with no duplicates and no explicit zeros,
/// so two vectors with the same support and values compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u64, f64)>,
}

impl SparseVector {
    /// The zero vector (empty support).
    pub fn zero() -> Self {
        SparseVector {
            entries: Vec::new(),
        }
    }

    /// Build from arbitrary (id, value) pairs; duplicate ids are summed and
    /// zero values dropped.
    pub fn from_entries(pairs: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut entries: Vec<(u64, f64)> = pairs.into_iter().collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(entries.len());
        for (id, v) in entries {
            match merged.last_mut() {
                Some((last_id, last_v)) if *last_id == id => *last_v += v,
                _ => merged.push((id, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        SparseVector { entries: merged }
    }

    /// Indicator vector: value 1 at each of the given ids.
    ///
    /// Ids must be distinct; they need not be sorted.
    pub fn indicator(ids: impl IntoIterator<Item = u64>) -> Self {
        let mut entries: Vec<(u64, f64)> = ids.into_iter().map(|id| (id, 1.0)).collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVector { entries }
    }

    /// The standard basis vector at `id`.
    pub fn basis(id: u64) -> Self {
        SparseVector {
            entries: vec![(id, 1.0)],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v.abs()).sum()
    }

    pub fn get(&self, id: u64) -> f64 {
        match self.entries.binary_search_by_key(&id, |&(i, _)| i) {
            Ok(ix) => self.entries[ix].1,
            Err(_) => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_duplicates_and_drops_zeros() {
        let v = SparseVector::from_entries([(3, 1.0), (1, 2.0), (3, -1.0), (2, 0.0)]);
        assert_eq!(v.len(), 1);
        assert_eq!(v.get(1), 2.0);
        assert_eq!(v.get(3), 0.0);
    }

    #[test]
    fn l1_norm_sums_absolute_values() {
        let v = SparseVector::from_entries([(0, -1.5), (9, 2.0)]);
        assert_eq!(v.l1_norm(), 3.5);
        assert_eq!(SparseVector::zero().l1_norm(), 0.0);
    }

    #[test]
    fn indicator_support() {
        let v = SparseVector::indicator([5, 1, 3]);
        assert_eq!(v.len(), 3);
        assert_eq!(v.l1_norm(), 3.0);
        assert_eq!(v.get(3), 1.0);
    }
}
