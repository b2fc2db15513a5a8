use std::fmt;

use serde::{Deserialize, Serialize};

use super::NatError;

/// A finite, strictly increasing set of nonnegative integers observed inside
/// the window `[0, horizon]`.
///
/// Every membership statement made about a `NatWindow` (gaps, runs,
/// densities) is relative to that window; nothing is claimed about integers
/// beyond the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct NatWindow {
    horizon: u64,
    elements: Vec<u64>,
}

#[derive(Deserialize)]
struct RawWindow {
    horizon: u64,
    elements: Vec<u64>,
}

impl TryFrom<RawWindow> for NatWindow {
    type Error = NatError;

    fn try_from(raw: RawWindow) -> Result<Self, NatError> {
        NatWindow::from_sorted(raw.horizon, raw.elements)
    }
}

impl NatWindow {
    /// Builds a window from any collection of integers; duplicates are
    /// merged and the order is normalised.
    pub fn new(horizon: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self, NatError> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self::from_sorted(horizon, elements)
    }

    /// Builds a window from a strictly increasing list, rejecting anything
    /// else.
    pub fn from_sorted(horizon: u64, elements: Vec<u64>) -> Result<Self, NatError> {
        if let Some(pair) = elements.windows(2).find(|p| p[0] >= p[1]) {
            return Err(NatError::NotIncreasing {
                previous: pair[0],
                next: pair[1],
            });
        }
        if let Some(&last) = elements.last() {
            if last > horizon {
                return Err(NatError::BeyondHorizon {
                    element: last,
                    horizon,
                });
            }
        }
        Ok(Self { horizon, elements })
    }

    /// Window whose horizon is its own maximum (0 when empty).
    pub fn tight(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        let horizon = elements.last().copied().unwrap_or(0);
        Self { horizon, elements }
    }

    pub fn empty(horizon: u64) -> Self {
        Self {
            horizon,
            elements: Vec::new(),
        }
    }

    /// The integer interval `[lo, hi]` inside `[0, horizon]`.
    pub fn interval(lo: u64, hi: u64, horizon: u64) -> Result<Self, NatError> {
        Self::from_sorted(horizon, (lo..=hi).collect())
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<u64> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + ExactSizeIterator + '_ {
        self.elements.iter().copied()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    /// Same elements observed on a different horizon.
    pub fn with_horizon(&self, horizon: u64) -> Result<Self, NatError> {
        Self::from_sorted(horizon, self.elements.clone())
    }

    /// `self ∪ {0}`.
    pub fn with_zero(&self) -> Self {
        if self.elements.first() == Some(&0) {
            return self.clone();
        }
        let mut elements = Vec::with_capacity(self.elements.len() + 1);
        elements.push(0);
        elements.extend_from_slice(&self.elements);
        Self {
            horizon: self.horizon,
            elements,
        }
    }

    /// Sorted-merge intersection; the horizon is the smaller of the two.
    pub fn intersect(&self, other: &NatWindow) -> NatWindow {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.elements.len() && j < other.elements.len() {
            match self.elements[i].cmp(&other.elements[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.elements[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        NatWindow {
            horizon: self.horizon.min(other.horizon),
            elements: out,
        }
    }

    pub fn is_subset_of(&self, other: &NatWindow) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// Export with a fixed `element` header and one element per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("element\n");
        for e in &self.elements {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("window serialization is infallible")
    }
}

impl fmt::Display for NatWindow {
    /// Comma separated elements, e.g. `3,4,9,11`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.elements {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_and_validates() {
        let w = NatWindow::new(10, [4, 2, 4, 9]).unwrap();
        assert_eq!(w.elements(), &[2, 4, 9]);
        assert!(NatWindow::new(5, [6]).is_err());
        assert!(NatWindow::from_sorted(10, vec![3, 3]).is_err());
        assert!(NatWindow::empty(0).is_empty());
    }

    #[test]
    fn json_shape_and_validation() {
        let w = NatWindow::new(12, [0, 3, 4]).unwrap();
        assert_eq!(w.to_json(), r#"{"horizon":12,"elements":[0,3,4]}"#);
        let back: NatWindow = serde_json::from_str(&w.to_json()).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<NatWindow>(r#"{"horizon":2,"elements":[3]}"#).is_err());
        assert!(serde_json::from_str::<NatWindow>(r#"{"horizon":9,"elements":[3,1]}"#).is_err());
    }

    #[test]
    fn csv_has_header_and_one_element_per_line() {
        let w = NatWindow::new(9, [1, 5]).unwrap();
        assert_eq!(w.to_csv(), "element\n1\n5\n");
    }

    #[test]
    fn intersection_and_zero() {
        let a = NatWindow::new(20, [0, 2, 4, 6]).unwrap();
        let b = NatWindow::new(30, [3, 6, 9]).unwrap();
        assert_eq!(a.intersect(&b).elements(), &[6]);
        assert_eq!(a.intersect(&b).horizon(), 20);
        assert_eq!(b.with_zero().elements(), &[0, 3, 6, 9]);
        assert_eq!(a.with_zero(), a);
    }
}
