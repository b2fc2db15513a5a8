//! Finitely supported vectors with exact rational coordinates.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_traits::{Signed, Zero};

use crate::ratio::Q;

/// Coordinates indexed from 0. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseVector {
    entries: BTreeMap<u64, Q>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_i`.
    pub fn basis(i: u64) -> Self {
        let mut v = Self::zero();
        v.set(i, Q::from_integer(1.into()));
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, Q)>) -> Self {
        let mut v = Self::zero();
        for (i, x) in pairs {
            v.add_at(i, &x);
        }
        v
    }

    pub fn get(&self, i: u64) -> Q {
        self.entries.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: u64, x: Q) {
        if x.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    pub fn add_at(&mut self, i: u64, x: &Q) {
        let updated = self.get(i) + x;
        self.set(i, updated);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_support(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Q)> + '_ {
        self.entries.iter().map(|(&i, x)| (i, x))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|(&i, x)| (i, x * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Q, other: &SparseVector) {
        for (i, x) in other.iter() {
            self.add_at(i, &(c * x));
        }
    }

    pub fn l1_norm(&self) -> Q {
        self.entries.values().map(|x| x.abs()).fold(Q::zero(), |acc, x| acc + x)
    }

    /// `‖self‖₂²`, exact.
    pub fn l2_norm_squared(&self) -> Q {
        self.entries.values().map(|x| x * x).fold(Q::zero(), |acc, x| acc + x)
    }
}

impl Add for &SparseVector {
    type Output = SparseVector;

    fn add(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(&Q::from_integer(1.into()), rhs);
        out
    }
}

impl Sub for &SparseVector {
    type Output = SparseVector;

    fn sub(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(&Q::from_integer((-1).into()), rhs);
        out
    }
}

impl Mul<&SparseVector> for &Q {
    type Output = SparseVector;

    fn mul(self, rhs: &SparseVector) -> SparseVector {
        rhs.scale(self)
    }
}
