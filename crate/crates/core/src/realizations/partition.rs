use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The rotation class `𝒯(v)` of a nonnegative integer vector.
///
/// Stored as its lexicographically smallest rotation, so two classes are
/// equal exactly when their vectors are rotations of each other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionClass {
    parts: Vec<i64>,
}

fn rotate(v: &[i64], k: usize) -> Vec<i64> {
    v[k..].iter().chain(&v[..k]).copied().collect()
}

impl PartitionClass {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("a partition needs at least one part".into()));
        }
        if let Some(p) = parts.iter().find(|&&p| p < 0) {
            return Err(Error::InvalidPartition(format!("negative part {p}")));
        }
        let parts = (0..parts.len())
            .map(|k| rotate(&parts, k))
            .min()
            .expect("nonempty");
        Ok(PartitionClass { parts })
    }

    /// The canonical (lexicographically smallest) representative.
    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn rotations(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.parts.len()).map(|k| rotate(&self.parts, k))
    }

    /// The lexicographically largest rotation, e.g. `6,5,2,0` rather than `0,6,5,2`.
    pub fn max_rotation(&self) -> Vec<i64> {
        self.rotations().max().expect("nonempty")
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.parts.len() && PartitionClass::new(v.to_vec()).is_ok_and(|c| &c == self)
    }
}

pub fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({})", join(&self.parts))
    }
}

impl Serialize for PartitionClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// All compositions of `total` into `len` nonnegative parts, each at most `cap`.
pub fn compositions(total: i64, len: usize, cap: i64) -> Vec<Vec<i64>> {
    fn go(left: i64, slots: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left > cap * slots as i64 {
            return;
        }
        for p in 0..=left.min(cap) {
            cur.push(p);
            go(left - p, slots - 1, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, len, cap, &mut Vec::with_capacity(len), &mut out);
    out
}

/// One representative per rotation class of the compositions above.
pub fn partition_classes(total: i64, len: usize, cap: i64) -> Vec<PartitionClass> {
    let mut out: Vec<PartitionClass> = compositions(total, len, cap)
        .into_iter()
        .map(|v| PartitionClass::new(v).expect("nonnegative parts"))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rotation() {
        let a = PartitionClass::new(vec![6, 5, 2, 0]).unwrap();
        assert_eq!(a.parts(), &[0, 6, 5, 2]);
        assert_eq!(a.max_rotation(), vec![6, 5, 2, 0]);
        assert_eq!(a, PartitionClass::new(vec![2, 0, 6, 5]).unwrap());
        assert_ne!(a, PartitionClass::new(vec![6, 2, 5, 0]).unwrap());
        assert!(a.contains(&[5, 2, 0, 6]));
        assert!(!a.contains(&[5, 2, 0]));
        assert!(PartitionClass::new(vec![1, -1]).is_err());
        assert_eq!(a.sum(), 13);
    }

    #[test]
    fn composition_counts() {
        // stars and bars: C(5 + 2, 2) = 21
        assert_eq!(compositions(5, 3, 5).len(), 21);
        assert_eq!(compositions(5, 3, 1).len(), 0);
        // necklaces of (1,0,0,0) style: classes of 2 into 4 parts
        let classes = partition_classes(2, 4, 2);
        let got: Vec<Vec<i64>> = classes.iter().map(|c| c.parts().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0, 0, 2], vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
    }
}
