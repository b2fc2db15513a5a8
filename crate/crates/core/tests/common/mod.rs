//! Brute-force oracles shared by the integration tests. None of them call
//! the library routine they are compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: u64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Sidon via sums: every `a + b` with `a <= b` is distinct.
pub fn sidon_by_sums(set: &[u64]) -> bool {
    let mut sums = Vec::with_capacity(set.len() * (set.len() + 1) / 2);
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i..] {
            sums.push(a as u128 + b as u128);
        }
    }
    sums.sort_unstable();
    sums.windows(2).all(|p| p[0] != p[1])
}

/// Sidon via differences: every `a - b` with `a > b` is distinct.
pub fn sidon_by_differences(set: &[u64]) -> bool {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut diffs = Vec::new();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[..i] {
            diffs.push(a - b);
        }
    }
    diffs.sort_unstable();
    diffs.windows(2).all(|p| p[0] != p[1])
}

/// Difference form on a bitmask over `[0, 15]`.
pub fn sidon_mask(mask: u32) -> bool {
    let mut seen: u32 = 0;
    for a in 0..16 {
        if mask & (1 << a) == 0 {
            continue;
        }
        for b in 0..a {
            if mask & (1 << b) != 0 {
                let bit = 1u32 << (a - b);
                if seen & bit != 0 {
                    return false;
                }
                seen |= bit;
            }
        }
    }
    true
}

/// `J_n` from `k_1 = n + 1`, `k_{j+1} = 2 (k_j + j) + 1`.
pub fn jn_oracle(n: u64) -> Vec<u64> {
    let mut ks = vec![n + 1];
    for j in 1..n {
        let last = *ks.last().unwrap();
        ks.push(2 * (last + j) + 1);
    }
    let mut set: Vec<u64> = ks.iter().zip(1..).flat_map(|(&k, j)| [k, k + j]).collect();
    set.sort_unstable();
    set
}

/// Minimal multipliers over `sets` (`sets[n-1] = F_n`) for `levels` levels,
/// in `(l, n)` order.
pub fn multipliers_oracle(sets: &[Vec<u64>], levels: u32) -> Vec<((u32, u32), BigInt)> {
    let mut out: Vec<((u32, u32), BigInt)> = Vec::new();
    for l in 1..=levels {
        for n in 1..=l {
            let m = out
                .iter()
                .map(|((_, n_prev), m_prev)| {
                    let top = *sets[*n_prev as usize - 1].last().unwrap();
                    let bound = Rat::from_integer(m_prev * BigInt::from(2 * top)) + Rat::new(m_prev.clone(), 2.into());
                    bound.floor().to_integer() + 1
                })
                .max()
                .unwrap_or_else(BigInt::one);
            out.push(((l, n), m));
        }
    }
    out
}

/// Tuple `(l, n, k)` owning an interval.
pub type Owner = (u32, u32, u32);

/// All intervals of the Δ-Sidon system in doubled coordinates (so `m/2`
/// becomes `m`), tagged with their owner `(l, n, k)`.
pub fn doubled_intervals(
    sets: &[Vec<u64>],
    multipliers: &[((u32, u32), BigInt)],
) -> Vec<(Owner, BigInt, BigInt)> {
    let mut tuples: Vec<(Owner, BigInt, BigInt)> = Vec::new();
    for ((l, n), m) in multipliers {
        for (k, &j) in (1u32..).zip(&sets[*n as usize - 1]) {
            tuples.push(((*l, *n, k), m * BigInt::from(j), m.clone()));
        }
    }
    let mut out = Vec::new();
    for (i, (owner, b, m)) in tuples.iter().enumerate() {
        let lo: BigInt = b * 2;
        out.push((*owner, lo.clone(), &lo + m));
        for (_, b_prev, _) in &tuples[..=i] {
            let lo: BigInt = (b + b_prev) * 2;
            out.push((*owner, lo.clone(), &lo + m));
        }
    }
    out
}

/// First pair of intervals with different owners that meet, scanning every
/// later interval that starts before the current one ends.
pub fn first_overlap(
    mut intervals: Vec<(Owner, BigInt, BigInt)>,
) -> Option<(Owner, Owner)> {
    intervals.sort_by(|a, b| a.1.cmp(&b.1));
    for (i, (owner, _, hi)) in intervals.iter().enumerate() {
        for (other, lo, _) in &intervals[i + 1..] {
            if lo > hi {
                break;
            }
            if other != owner {
                return Some((*owner, *other));
            }
        }
    }
    None
}

/// Sparse vector over exact rationals.
pub type Sparse = BTreeMap<u64, Rat>;

pub fn basis(i: u64) -> Sparse {
    BTreeMap::from([(i, Rat::one())])
}

pub fn add_scaled(acc: &mut Sparse, scale: &Rat, x: &Sparse) {
    for (i, v) in x {
        let entry = acc.entry(*i).or_insert_with(Rat::zero);
        *entry += scale * v;
        if entry.is_zero() {
            acc.remove(i);
        }
    }
}

/// Matrix-vector product with the columns given by `column(i)`.
pub fn mat_vec(column: impl Fn(u64) -> Option<Sparse>, x: &Sparse) -> Option<Sparse> {
    let mut out = Sparse::new();
    for (i, v) in x {
        add_scaled(&mut out, v, &column(*i)?);
    }
    Some(out)
}

/// Quadratic sequence `n_k = c k^2` for integer `c`, continued until the
/// gap between consecutive terms exceeds `horizon`.
pub fn squares_times(c: u64, horizon: u64) -> Vec<u64> {
    let mut out = vec![c];
    for k in 2u64.. {
        let next = c * k * k;
        let gap = next - out.last().unwrap();
        out.push(next);
        if gap > horizon {
            break;
        }
    }
    out
}

/// `#{d ∈ [1, horizon] : d = a - b for a >= b in seq}` by marking.
pub fn difference_count(seq: &[u64], horizon: u64) -> u64 {
    let mut marked = vec![false; horizon as usize + 1];
    for (i, &a) in seq.iter().enumerate() {
        for &b in seq[..i].iter().rev() {
            let d = a - b;
            if d > horizon {
                break;
            }
            marked[d as usize] = true;
        }
    }
    marked[1..].iter().filter(|&&m| m).count() as u64
}

/// All `m - n` with `m ∈ later`, `n ∈ earlier`, `m >= n`.
pub fn brute_differences(later: &[u64], earlier: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = later
        .iter()
        .flat_map(|&m| earlier.iter().filter(move |&&n| n <= m).map(move |&n| m - n))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
