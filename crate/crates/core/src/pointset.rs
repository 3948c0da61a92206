//! Finite point sets over ground sets of at most [`MAX_POINTS`] points.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest ground set a [`PointSet`] can address.
pub const MAX_POINTS: usize = 128;

/// A subset of `{0, .., n-1}` stored as a 128-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PointSet(u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn empty() -> Self {
        PointSet(0)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS, "ground set of {n} points exceeds {MAX_POINTS}");
        if n == MAX_POINTS {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        assert!(x < MAX_POINTS, "point {x} out of range");
        PointSet(1u128 << x)
    }

    pub fn from_bits(bits: u128) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_POINTS && self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < MAX_POINTS, "point {x} out of range");
        self.0 |= 1u128 << x;
    }

    pub fn remove(&mut self, x: usize) {
        if x < MAX_POINTS {
            self.0 &= !(1u128 << x);
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    /// Complement inside `{0, .., n-1}`.
    pub fn complement(self, n: usize) -> PointSet {
        PointSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn meets(self, other: PointSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Largest member, if any.
    pub fn last(self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Ordering key used by every deterministic search: size first, then members
    /// lexicographically.
    pub fn search_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.to_vec())
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::empty();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl<'a> FromIterator<&'a usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = members.iter().find(|&&x| x >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!(
                "point {bad} exceeds the {MAX_POINTS}-point limit"
            )));
        }
        Ok(members.into_iter().collect())
    }
}

/// Ascending iterator over the members of a [`PointSet`].
pub struct Iter(u128);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}
