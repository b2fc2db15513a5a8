use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{NatError, NatWindow};

/// True iff all sums `a + a'` with `a <= a'` taken from `w` are distinct.
pub fn is_sidon(w: &NatWindow) -> bool {
    let elems = w.elements();
    let mut sums = HashSet::with_capacity(elems.len() * (elems.len() + 1) / 2);
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i..] {
            if !sums.insert(a as u128 + b as u128) {
                return false;
            }
        }
    }
    true
}

/// A non-trivial additive coincidence `j1 + j4 = j2 + j3` with
/// `j1 <= j2 <= j3 <= j4` and `(j1, j4) != (j2, j3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Quadruple {
    pub j1: u64,
    pub j2: u64,
    pub j3: u64,
    pub j4: u64,
}

impl Quadruple {
    pub fn as_array(&self) -> [u64; 4] {
        [self.j1, self.j2, self.j3, self.j4]
    }

    /// Checks the ordering and the additive identity.
    pub fn is_valid(&self) -> bool {
        self.j1 <= self.j2
            && self.j2 <= self.j3
            && self.j3 <= self.j4
            && self.j1 as u128 + self.j4 as u128 == self.j2 as u128 + self.j3 as u128
            && (self.j1, self.j4) != (self.j2, self.j3)
    }
}

impl std::fmt::Display for Quadruple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.j1, self.j2, self.j3, self.j4)
    }
}

/// Lexicographically smallest violating quadruple, or `None` iff `w` is
/// Sidon.
pub fn sidon_violation(w: &NatWindow) -> Option<Quadruple> {
    if is_sidon(w) {
        return None;
    }
    // A violation forces j1 < j2 <= j3 < j4, and j4 is determined by the
    // first three, so scanning (j1, j2, j3) in order finds the minimum.
    let elems = w.elements();
    for (i1, &j1) in elems.iter().enumerate() {
        for (i2, &j2) in elems.iter().enumerate().skip(i1 + 1) {
            for &j3 in &elems[i2..] {
                let j4 = j2 as u128 + j3 as u128 - j1 as u128;
                if j4 <= u64::MAX as u128 && w.contains(j4 as u64) {
                    return Some(Quadruple {
                        j1,
                        j2,
                        j3,
                        j4: j4 as u64,
                    });
                }
            }
        }
    }
    unreachable!("is_sidon reported a repeated sum that the scan did not find")
}

/// The offsets `k_1 = n + 1`, `k_{j+1} = 2 (k_j + j) + 1` for `j < n`.
pub fn jn_offsets(n: u64) -> Result<Vec<u64>, NatError> {
    if n == 0 {
        return Err(NatError::InvalidParameter("family index n must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(n as usize);
    let mut k = BigUint::from(n) + 1u32;
    for j in 1..=n {
        // k_j + j must also fit, since it is an element of the family.
        let top = (&k + j).to_u64().ok_or(NatError::Overflow { n })?;
        out.push(top - j);
        if j < n {
            k = (k + j) * 2u32 + 1u32;
        }
    }
    Ok(out)
}

/// `J_n = {k_1, k_1 + 1, k_2, k_2 + 2, ..., k_n, k_n + n}`, whose union
/// with `{0}` is Sidon. The window horizon is `k_n + n`.
///
/// Elements grow like `2^n`; indices past the width of `u64` are reported
/// as [`NatError::Overflow`].
pub fn sidon_family_jn(n: u64) -> Result<NatWindow, NatError> {
    let offsets = jn_offsets(n)?;
    let elements = offsets
        .iter()
        .zip(1u64..)
        .flat_map(|(&k, l)| [k, k + l])
        .collect::<Vec<_>>();
    let horizon = *elements.last().expect("n >= 1");
    NatWindow::from_sorted(horizon, elements)
}

/// Streams every nonempty `w ⊆ [1, bound]` such that `w ∪ {0}` is Sidon,
/// ordered by size and then lexicographically.
pub fn enumerate_sidon_supersets(bound: u64) -> SidonSupersets {
    SidonSupersets::new(bound)
}

/// Backtracking enumerator behind [`enumerate_sidon_supersets`].
///
/// The state keeps the current partial choice together with the set of
/// positive differences it realises (0 included as an implicit element),
/// so each extension is checked incrementally.
#[derive(Debug, Clone)]
pub struct SidonSupersets {
    bound: u64,
    size: u64,
    chosen: Vec<u64>,
    used: Vec<bool>,
    cursor: u64,
}

impl SidonSupersets {
    fn new(bound: u64) -> Self {
        Self {
            bound,
            size: 1,
            chosen: Vec::new(),
            used: vec![false; bound as usize + 1],
            cursor: 1,
        }
    }

    fn try_push(&mut self, v: u64) -> bool {
        let diffs: Vec<u64> = std::iter::once(v)
            .chain(self.chosen.iter().map(|&c| v - c))
            .collect();
        if diffs.iter().any(|&d| self.used[d as usize]) {
            return false;
        }
        for d in diffs {
            self.used[d as usize] = true;
        }
        self.chosen.push(v);
        true
    }

    fn pop(&mut self) -> u64 {
        let v = self.chosen.pop().expect("pop on empty choice");
        self.used[v as usize] = false;
        for &c in &self.chosen {
            self.used[(v - c) as usize] = false;
        }
        v
    }
}

impl Iterator for SidonSupersets {
    type Item = NatWindow;

    fn next(&mut self) -> Option<NatWindow> {
        loop {
            if self.size > self.bound {
                return None;
            }
            let remaining_after = self.size - self.chosen.len() as u64 - 1;
            let mut pushed = false;
            let mut v = self.cursor;
            while v + remaining_after <= self.bound {
                if self.try_push(v) {
                    pushed = true;
                    break;
                }
                v += 1;
            }
            if pushed {
                if self.chosen.len() as u64 == self.size {
                    let out = NatWindow::from_sorted(self.bound, self.chosen.clone())
                        .expect("choices are increasing and bounded");
                    self.cursor = self.pop() + 1;
                    return Some(out);
                }
                self.cursor = v + 1;
            } else if self.chosen.is_empty() {
                self.size += 1;
                self.cursor = 1;
            } else {
                self.cursor = self.pop() + 1;
            }
        }
    }
}
