//! Multi-indexed Δ-Sidon block sequences.
//!
//! Given Sidon sets `F_1, F_2, ...` (each `F_n ∪ {0}` Sidon), the builder
//! picks multipliers `m_{l,n}` for `1 <= n <= l <= L`, in lexicographic
//! order of `(l, n)`, and sets `b_{l,n,k} = m_{l,n} j_{n,k}` where
//! `j_{n,1} < j_{n,2} < ...` enumerates `F_n`. Each tuple `t = (l, n, k)` owns
//! the union of closed intervals
//!
//! ```text
//! J_t = [b_t, b_t + m_{l,n}/2]  ∪  ⋃_{t' <= t} [b_t + b_{t'}, b_t + b_{t'} + m_{l,n}/2]
//! ```
//!
//! and the family is valid when the `J_t` are pairwise disjoint. Each new
//! multiplier is the least integer with
//! `m_{l,n} > 2 m_{l',n'} max(F_{n'}) + m_{l',n'}/2` for every earlier pair,
//! which pushes the new intervals past everything built so far; the Sidon
//! property of `F_n ∪ {0}` then separates the intervals inside the level.
//!
//! When `|F_n| = n` this is exactly the `1 <= k <= n <= l` indexing; larger
//! sets are allowed and `k` then ranges over `1..=|F_n|`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::natset::{is_sidon, sidon_violation, NatWindow, Quadruple};
use crate::ratio::{self, Q};

/// `(l, n, k)`; the derived ordering is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexTuple {
    pub l: u32,
    pub n: u32,
    pub k: u32,
}

impl IndexTuple {
    pub fn new(l: u32, n: u32, k: u32) -> Self {
        Self { l, n, k }
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.l, self.n, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeltaSidonError {
    #[error("F_{n} ∪ {{0}} is not Sidon: {quadruple}")]
    NotSidon { n: u32, quadruple: Quadruple },
    #[error("F_{n} is empty")]
    EmptySet { n: u32 },
    #[error("F_{n} contains 0; only positive elements are allowed")]
    ZeroElement { n: u32 },
    #[error("need {needed} sets but only {given} were supplied")]
    MissingLevel { needed: u32, given: u32 },
    #[error("levels must be at least 1")]
    NoLevels,
    #[error("tuple {0} is outside the built range")]
    UnbuiltTuple(IndexTuple),
    #[error("post-check failed: {0}")]
    PostCheck(String),
    #[error("b and delta have different lengths ({b} vs {delta})")]
    LengthMismatch { b: usize, delta: usize },
    #[error("b must be strictly increasing (index {index})")]
    NotIncreasing { index: usize },
    #[error("malformed family: {0}")]
    Malformed(String),
}

/// A closed interval with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedInterval {
    #[serde(with = "crate::ratio::serde_ratio")]
    pub lo: Q,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub hi: Q,
}

impl ClosedInterval {
    pub fn new(lo: Q, hi: Q) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, t: &Q) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

impl fmt::Display for ClosedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", ratio::RatioDisplay(&self.lo), ratio::RatioDisplay(&self.hi))
    }
}

/// The intervals making up `J_t`: the base interval first, then one shifted
/// copy per tuple `t' <= t` in tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalSystem {
    pub tuple: IndexTuple,
    pub intervals: Vec<ClosedInterval>,
}

/// Two intervals owned by different indices that meet, and a common point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision<T> {
    pub first: T,
    pub first_interval: ClosedInterval,
    pub second: T,
    pub second_interval: ClosedInterval,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub point: Q,
}

/// Result of a disjointness certification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointnessReport<T> {
    pub disjoint: bool,
    pub intervals_checked: usize,
    pub collision: Option<Collision<T>>,
}

/// Level data `(l, n) ↦ m_{l,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub l: u32,
    pub n: u32,
    #[serde(with = "crate::ratio::serde_biguint")]
    pub m: BigUint,
}

/// The output of [`build_m_sequence`]: the Sidon sets and the multipliers
/// for every pair `(l, n)` with `n <= l <= levels`, in build order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct DeltaSidonFamily {
    levels: u32,
    sets: Vec<NatWindow>,
    multipliers: Vec<Multiplier>,
}

#[derive(Deserialize)]
struct RawFamily {
    levels: u32,
    sets: Vec<NatWindow>,
    multipliers: Vec<Multiplier>,
}

impl TryFrom<RawFamily> for DeltaSidonFamily {
    type Error = DeltaSidonError;

    fn try_from(raw: RawFamily) -> Result<Self, DeltaSidonError> {
        DeltaSidonFamily::from_parts(raw.levels, raw.sets, raw.multipliers)
    }
}

/// `(l, n)` pairs with `1 <= n <= l <= levels`, lexicographically.
pub fn level_pairs(levels: u32) -> impl Iterator<Item = (u32, u32)> {
    (1..=levels).flat_map(|l| (1..=l).map(move |n| (l, n)))
}

impl DeltaSidonFamily {
    /// Reassembles a family from stored parts, checking only its shape
    /// (one positive multiplier per pair, in build order). Disjointness is
    /// left to [`check_pairwise_disjoint`].
    pub fn from_parts(
        levels: u32,
        sets: Vec<NatWindow>,
        multipliers: Vec<Multiplier>,
    ) -> Result<Self, DeltaSidonError> {
        if levels == 0 {
            return Err(DeltaSidonError::NoLevels);
        }
        validate_sets(&sets, levels, false)?;
        let expected: Vec<(u32, u32)> = level_pairs(levels).collect();
        if multipliers.len() != expected.len() {
            return Err(DeltaSidonError::Malformed(format!(
                "expected {} multipliers, found {}",
                expected.len(),
                multipliers.len()
            )));
        }
        for (m, (l, n)) in multipliers.iter().zip(expected) {
            if (m.l, m.n) != (l, n) {
                return Err(DeltaSidonError::Malformed(format!(
                    "multiplier for ({}, {}) found where ({l}, {n}) was expected",
                    m.l, m.n
                )));
            }
            if m.m.is_zero() {
                return Err(DeltaSidonError::Malformed(format!("m_({l},{n}) is zero")));
            }
        }
        Ok(Self {
            levels,
            sets: sets.into_iter().take(levels as usize).collect(),
            multipliers,
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `F_n` (without the implicit 0).
    pub fn set(&self, n: u32) -> Option<&NatWindow> {
        self.sets.get((n as usize).checked_sub(1)?)
    }

    pub fn sets(&self) -> &[NatWindow] {
        &self.sets
    }

    pub fn multipliers(&self) -> &[Multiplier] {
        &self.multipliers
    }

    /// `j_{n,k}`, with `j_{n,0} = 0`.
    pub fn j(&self, n: u32, k: u32) -> Option<u64> {
        if k == 0 {
            return self.set(n).map(|_| 0);
        }
        self.set(n)?.elements().get(k as usize - 1).copied()
    }

    pub fn m(&self, l: u32, n: u32) -> Option<&BigUint> {
        if n == 0 || n > l || l > self.levels {
            return None;
        }
        let idx = (l * (l - 1) / 2 + (n - 1)) as usize;
        Some(&self.multipliers[idx].m)
    }

    /// `b_{l,n,k} = m_{l,n} j_{n,k}`, defined for `k >= 1` only.
    pub fn b(&self, t: IndexTuple) -> Option<BigUint> {
        if t.k == 0 {
            return None;
        }
        Some(self.m(t.l, t.n)? * self.j(t.n, t.k)?)
    }

    /// `Δ_{l,n} = m_{l,n} / 2`.
    pub fn delta(&self, l: u32, n: u32) -> Option<Q> {
        self.m(l, n)
            .map(|m| ratio::from_biguint(m) / ratio::from_u64(2))
    }

    /// Every tuple `(l, n, k)` in lexicographic order.
    pub fn tuples(&self) -> Vec<IndexTuple> {
        level_pairs(self.levels)
            .flat_map(|(l, n)| {
                let size = self.sets[n as usize - 1].len() as u32;
                (1..=size).map(move |k| IndexTuple::new(l, n, k))
            })
            .collect()
    }

    /// `(t, b_t)` in tuple order; this is the block sequence fed to the
    /// operator builder.
    pub fn flattened(&self) -> Vec<(IndexTuple, BigUint)> {
        self.tuples()
            .into_iter()
            .map(|t| {
                let b = self.b(t).expect("tuple from own range");
                (t, b)
            })
            .collect()
    }

    /// The family restricted to its first `pairs` pairs `(l, n)` in build
    /// order. Prefixes that stop inside a level keep the full level count
    /// but only the multipliers built so far, so this returns the tuples
    /// and intervals of the prefix rather than a `DeltaSidonFamily`.
    pub fn prefix_tuples(&self, pairs: usize) -> Vec<IndexTuple> {
        let allowed: Vec<(u32, u32)> = level_pairs(self.levels).take(pairs).collect();
        self.tuples()
            .into_iter()
            .filter(|t| allowed.contains(&(t.l, t.n)))
            .collect()
    }

    /// Bit lengths of the multipliers in build order (growth diagnostics).
    pub fn multiplier_bits(&self) -> Vec<u64> {
        self.multipliers.iter().map(|m| m.m.bits()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serialization is infallible")
    }
}

fn validate_sets(sets: &[NatWindow], levels: u32, check_sidon: bool) -> Result<(), DeltaSidonError> {
    if (sets.len() as u32) < levels {
        return Err(DeltaSidonError::MissingLevel {
            needed: levels,
            given: sets.len() as u32,
        });
    }
    for (n, set) in (1u32..).zip(sets.iter().take(levels as usize)) {
        if set.is_empty() {
            return Err(DeltaSidonError::EmptySet { n });
        }
        if set.min() == Some(0) {
            return Err(DeltaSidonError::ZeroElement { n });
        }
        if check_sidon {
            let with_zero = set.with_zero();
            if !is_sidon(&with_zero) {
                let quadruple = sidon_violation(&with_zero).expect("non-Sidon window has a violation");
                return Err(DeltaSidonError::NotSidon { n, quadruple });
            }
        }
    }
    Ok(())
}

fn minimal_multipliers(sets: &[NatWindow], levels: u32) -> Vec<Multiplier> {
    let mut out: Vec<Multiplier> = Vec::new();
    // Running maximum of 2 m' max(F_n') + m'/2 over built pairs.
    let mut bound: Option<Q> = None;
    for (l, n) in level_pairs(levels) {
        let m = match &bound {
            None => BigUint::one(),
            Some(b) => ratio::next_integer_above(b)
                .to_biguint()
                .expect("bound is positive"),
        };
        let top = sets[n as usize - 1].max().expect("validated nonempty");
        let mq = ratio::from_biguint(&m);
        let candidate = &mq * ratio::from_u64(2 * top) + &mq / ratio::from_u64(2);
        if bound.as_ref().is_none_or(|b| &candidate > b) {
            bound = Some(candidate);
        }
        out.push(Multiplier { l, n, m });
    }
    out
}

/// Builds the minimal multiplier sequence for `levels` levels and certifies
/// the result.
///
/// `sets[n - 1]` is `F_n`; every `F_n ∪ {0}` must be Sidon. After the build
/// the function asserts, for every pair, that the smallest point of each new
/// `J` lies strictly above the largest point of every earlier `J`, and that
/// all `J_t` are pairwise disjoint.
pub fn build_m_sequence(sets: &[NatWindow], levels: u32) -> Result<DeltaSidonFamily, DeltaSidonError> {
    if levels == 0 {
        return Err(DeltaSidonError::NoLevels);
    }
    validate_sets(sets, levels, true)?;
    let family = build_unchecked(sets, levels)?;
    check_level_separation(&family)?;
    let report = check_pairwise_disjoint(&family);
    if let Some(c) = report.collision {
        return Err(DeltaSidonError::PostCheck(format!(
            "J{} and J{} meet at {}",
            c.first,
            c.second,
            ratio::RatioDisplay(&c.point)
        )));
    }
    Ok(family)
}

/// Same multiplier rule without the Sidon precondition or post-checks, for
/// experiments with non-Sidon inputs.
pub fn build_unchecked(sets: &[NatWindow], levels: u32) -> Result<DeltaSidonFamily, DeltaSidonError> {
    if levels == 0 {
        return Err(DeltaSidonError::NoLevels);
    }
    validate_sets(sets, levels, false)?;
    Ok(DeltaSidonFamily {
        levels,
        sets: sets[..levels as usize].to_vec(),
        multipliers: minimal_multipliers(sets, levels),
    })
}

/// `min J_t > max J_{t'}` for every `t` in a later pair than `t'`.
fn check_level_separation(family: &DeltaSidonFamily) -> Result<(), DeltaSidonError> {
    let mut earlier_max: Option<Q> = None;
    let mut current_pair = None;
    let mut pair_max: Option<Q> = None;
    for t in family.tuples() {
        if current_pair != Some((t.l, t.n)) {
            if let Some(pm) = pair_max.take() {
                earlier_max = Some(earlier_max.map_or(pm.clone(), |e: Q| e.max(pm)));
            }
            current_pair = Some((t.l, t.n));
        }
        let system = interval_system(family, t)?;
        let lo = system.intervals.iter().map(|i| &i.lo).min().expect("nonempty").clone();
        let hi = system.intervals.iter().map(|i| &i.hi).max().expect("nonempty").clone();
        if let Some(e) = &earlier_max {
            if lo <= *e {
                return Err(DeltaSidonError::PostCheck(format!(
                    "min J{t} = {} does not exceed the earlier maximum {}",
                    ratio::RatioDisplay(&lo),
                    ratio::RatioDisplay(e)
                )));
            }
        }
        pair_max = Some(pair_max.map_or(hi.clone(), |p: Q| p.max(hi)));
    }
    Ok(())
}

/// The intervals of `J_t`.
pub fn interval_system(family: &DeltaSidonFamily, t: IndexTuple) -> Result<IntervalSystem, DeltaSidonError> {
    let b = family.b(t).ok_or(DeltaSidonError::UnbuiltTuple(t))?;
    let delta = family.delta(t.l, t.n).expect("pair of a built tuple");
    let b = ratio::from_biguint(&b);
    let mut intervals = vec![ClosedInterval::new(b.clone(), &b + &delta)];
    for earlier in family.tuples().into_iter().take_while(|e| *e <= t) {
        let shift = &b + ratio::from_biguint(&family.b(earlier).expect("built"));
        intervals.push(ClosedInterval::new(shift.clone(), shift + &delta));
    }
    Ok(IntervalSystem { tuple: t, intervals })
}

/// Sweep over intervals sorted by left endpoint. The first interval that
/// meets an earlier interval with a different owner must meet the earlier
/// interval reaching furthest right, so tracking that one suffices.
fn sweep<T: Copy>(mut intervals: Vec<(T, usize, ClosedInterval)>) -> DisjointnessReport<T> {
    let total = intervals.len();
    intervals.sort_by(|a, b| a.2.lo.cmp(&b.2.lo).then(a.1.cmp(&b.1)));
    let mut reach: Option<(T, usize, ClosedInterval)> = None;
    for (owner, key, iv) in intervals {
        if let Some((r_owner, r_key, r_iv)) = &reach {
            if iv.lo <= r_iv.hi && key != *r_key {
                return DisjointnessReport {
                    disjoint: false,
                    intervals_checked: total,
                    collision: Some(Collision {
                        first: *r_owner,
                        first_interval: r_iv.clone(),
                        second: owner,
                        second_interval: iv.clone(),
                        point: iv.lo.clone(),
                    }),
                };
            }
            if iv.hi <= r_iv.hi {
                continue;
            }
        }
        reach = Some((owner, key, iv));
    }
    DisjointnessReport {
        disjoint: true,
        intervals_checked: total,
        collision: None,
    }
}

/// Certifies that all `J_t` of the family are pairwise disjoint; on failure
/// reports the colliding tuples and a common point.
pub fn check_pairwise_disjoint(family: &DeltaSidonFamily) -> DisjointnessReport<IndexTuple> {
    check_tuples_disjoint(family, &family.tuples())
}

/// Disjointness restricted to a subset of tuples, e.g. a build prefix.
pub fn check_tuples_disjoint(
    family: &DeltaSidonFamily,
    tuples: &[IndexTuple],
) -> DisjointnessReport<IndexTuple> {
    let mut all = Vec::new();
    for (key, &t) in tuples.iter().enumerate() {
        let system = interval_system(family, t).expect("tuples come from the family");
        all.extend(system.intervals.into_iter().map(|iv| (t, key, iv)));
    }
    sweep(all)
}

/// Single-index Δ-Sidon test: `J_l = [b_l, b_l + Δ_l] ∪ ⋃_{k <= l} [b_l + b_k, b_l + b_k + Δ_l]`
/// must be pairwise disjoint. Owners in the report are 1-based indices.
pub fn is_delta_sidon(b: &[BigUint], delta: &[Q]) -> Result<DisjointnessReport<usize>, DeltaSidonError> {
    if b.len() != delta.len() {
        return Err(DeltaSidonError::LengthMismatch {
            b: b.len(),
            delta: delta.len(),
        });
    }
    if let Some(i) = (1..b.len()).find(|&i| b[i - 1] >= b[i]) {
        return Err(DeltaSidonError::NotIncreasing { index: i + 1 });
    }
    let b: Vec<Q> = b.iter().map(ratio::from_biguint).collect();
    let mut all = Vec::new();
    for (i, (bl, dl)) in b.iter().zip(delta).enumerate() {
        all.push((i + 1, i, ClosedInterval::new(bl.clone(), bl + dl)));
        for bk in &b[..=i] {
            let lo = bl + bk;
            all.push((i + 1, i, ClosedInterval::new(lo.clone(), lo + dl)));
        }
    }
    Ok(sweep(all))
}

/// Integer part of `t / m`, used to read off the additive relation a
/// collision encodes.
pub fn level_quotient(t: &Q, m: &BigUint) -> BigInt {
    (t / ratio::from_biguint(m)).floor().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::sidon_family_jn;
    use crate::ratio::parse_ratio;
    use proptest::prelude::*;

    fn q(s: &str) -> Q {
        parse_ratio(s).unwrap()
    }

    fn win(e: &[u64]) -> NatWindow {
        NatWindow::tight(e.iter().copied())
    }

    fn jn_sets(levels: u32) -> Vec<NatWindow> {
        (1..=levels as u64).map(|n| sidon_family_jn(n).unwrap()).collect()
    }

    /// Quadratic oracle: every pair of intervals with different owners.
    fn brute_disjoint(family: &DeltaSidonFamily) -> bool {
        let systems: Vec<IntervalSystem> = family
            .tuples()
            .into_iter()
            .map(|t| interval_system(family, t).unwrap())
            .collect();
        for (i, a) in systems.iter().enumerate() {
            for b in &systems[i + 1..] {
                for x in &a.intervals {
                    for y in &b.intervals {
                        if x.lo <= y.hi && y.lo <= x.hi {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn first_multiplier_is_one() {
        let fam = build_m_sequence(&[win(&[1])], 1).unwrap();
        assert_eq!(fam.m(1, 1), Some(&BigUint::one()));
        assert!(check_pairwise_disjoint(&fam).disjoint);
    }

    #[test]
    fn second_multiplier_from_first_pair() {
        // m_{2,1} > 2*1*1 + 1/2, so m_{2,1} = 3.
        let fam = build_m_sequence(&[win(&[1]), win(&[1, 3])], 2).unwrap();
        assert_eq!(fam.m(2, 1), Some(&BigUint::from(3u32)));
        // m_{2,2} > max(5/2, 2*3*1 + 3/2) = 15/2.
        assert_eq!(fam.m(2, 2), Some(&BigUint::from(8u32)));
        assert!(check_pairwise_disjoint(&fam).disjoint);
        assert!(brute_disjoint(&fam));
    }

    #[test]
    fn non_sidon_level_is_rejected_up_front() {
        let err = build_m_sequence(&[win(&[1]), win(&[1, 2])], 2).unwrap_err();
        assert!(matches!(err, DeltaSidonError::NotSidon { n: 2, .. }));
        // The multiplier rule itself does not look at F_2 for m_{2,1}.
        let fam = build_unchecked(&[win(&[1]), win(&[1, 2])], 2).unwrap();
        assert_eq!(fam.m(2, 1), Some(&BigUint::from(3u32)));
        assert!(!check_pairwise_disjoint(&fam).disjoint);
    }

    #[test]
    fn interval_system_of_first_tuple() {
        let fam = build_m_sequence(&[win(&[1])], 1).unwrap();
        let sys = interval_system(&fam, IndexTuple::new(1, 1, 1)).unwrap();
        assert_eq!(
            sys.intervals,
            vec![
                ClosedInterval::new(q("1"), q("3/2")),
                ClosedInterval::new(q("2"), q("5/2")),
            ]
        );
        assert!(interval_system(&fam, IndexTuple::new(2, 1, 1)).is_err());
    }

    #[test]
    fn interval_counts_and_lengths() {
        let fam = build_m_sequence(&jn_sets(3), 3).unwrap();
        for (rank, t) in (1..).zip(fam.tuples()) {
            let sys = interval_system(&fam, t).unwrap();
            assert_eq!(sys.intervals.len(), 1 + rank);
            let delta = fam.delta(t.l, t.n).unwrap();
            assert!(sys.intervals.iter().all(|iv| iv.len() == delta));
        }
    }

    #[test]
    fn jn_build_levels_one_to_four_match_brute_force() {
        for levels in 1..=4 {
            let fam = build_m_sequence(&jn_sets(levels), levels).unwrap();
            assert!(check_pairwise_disjoint(&fam).disjoint);
            assert!(brute_disjoint(&fam), "levels {levels}");
        }
    }

    #[test]
    fn forced_small_multiplier_collides() {
        let good = build_m_sequence(&[win(&[1]), win(&[1, 3])], 2).unwrap();
        let mut multipliers = good.multipliers().to_vec();
        multipliers[1].m = BigUint::one();
        let bad = DeltaSidonFamily::from_parts(2, good.sets().to_vec(), multipliers).unwrap();
        let report = check_pairwise_disjoint(&bad);
        assert!(!report.disjoint);
        assert!(!brute_disjoint(&bad));
        let c = report.collision.unwrap();
        assert!(c.first_interval.contains(&c.point) && c.second_interval.contains(&c.point));
        assert_ne!(c.first, c.second);
    }

    #[test]
    fn delta_sidon_examples() {
        let one = BigUint::one();
        let b = vec![one.clone(), BigUint::from(2u32)];
        let report = is_delta_sidon(&b, &[q("1"), q("1")]).unwrap();
        assert!(!report.disjoint);
        assert_eq!(report.collision.unwrap().point, q("2"));

        let b = vec![BigUint::from(10u32), BigUint::from(100u32)];
        assert!(is_delta_sidon(&b, &[q("1"), q("1")]).unwrap().disjoint);

        assert!(matches!(
            is_delta_sidon(&b, &[q("1")]),
            Err(DeltaSidonError::LengthMismatch { .. })
        ));
        let b = vec![BigUint::from(3u32), BigUint::from(3u32)];
        assert!(is_delta_sidon(&b, &[q("1"), q("1")]).is_err());
    }

    #[test]
    fn flattened_family_is_delta_sidon() {
        let fam = build_m_sequence(&jn_sets(4), 4).unwrap();
        let (tuples, b): (Vec<IndexTuple>, Vec<BigUint>) = fam.flattened().into_iter().unzip();
        let delta: Vec<Q> = tuples.iter().map(|t| fam.delta(t.l, t.n).unwrap()).collect();
        assert!(is_delta_sidon(&b, &delta).unwrap().disjoint);
    }

    #[test]
    fn multipliers_increase_along_build_order() {
        let fam = build_m_sequence(&jn_sets(5), 5).unwrap();
        let m: Vec<&BigUint> = fam.multipliers().iter().map(|m| &m.m).collect();
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_round_trip_and_shape_validation() {
        let fam = build_m_sequence(&jn_sets(2), 2).unwrap();
        let back: DeltaSidonFamily = serde_json::from_str(&fam.to_json()).unwrap();
        assert_eq!(back, fam);
        let mut value: serde_json::Value = serde_json::from_str(&fam.to_json()).unwrap();
        value["multipliers"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<DeltaSidonFamily>(value).is_err());
    }

    #[test]
    fn every_prefix_is_disjoint() {
        let fam = build_m_sequence(&jn_sets(4), 4).unwrap();
        for pairs in 1..=level_pairs(4).count() {
            assert!(check_tuples_disjoint(&fam, &fam.prefix_tuples(pairs)).disjoint);
        }
    }

    fn small_sets() -> impl Strategy<Value = Vec<NatWindow>> {
        proptest::collection::vec(
            proptest::collection::btree_set(1u64..12, 1..4).prop_map(NatWindow::tight),
            3,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn scaling_the_sets_preserves_disjointness(c in 1u64..6) {
            let scaled: Vec<NatWindow> = jn_sets(3)
                .iter()
                .map(|w| NatWindow::tight(w.iter().map(|x| x * c)))
                .collect();
            let fam = build_m_sequence(&scaled, 3).unwrap();
            prop_assert!(check_pairwise_disjoint(&fam).disjoint);
        }

        /// Non-Sidon inputs collide inside the offending level, and the
        /// collision point encodes a repeated sum of F_n ∪ {0}.
        #[test]
        fn collisions_come_from_sidon_violations(sets in small_sets()) {
            let fam = build_unchecked(&sets, 3).unwrap();
            let report = check_pairwise_disjoint(&fam);
            let all_sidon = sets.iter().all(|s| is_sidon(&s.with_zero()));
            prop_assert_eq!(report.disjoint, all_sidon);
            prop_assert_eq!(build_m_sequence(&sets, 3).is_ok(), all_sidon);
            if let Some(c) = report.collision {
                prop_assert_eq!((c.first.l, c.first.n), (c.second.l, c.second.n));
                let set = sets[c.first.n as usize - 1].with_zero();
                prop_assert!(!is_sidon(&set));
                let s = level_quotient(&c.point, fam.m(c.first.l, c.first.n).unwrap());
                let s: u64 = s.try_into().unwrap();
                let reps = set
                    .iter()
                    .flat_map(|a| set.iter().filter(move |&b| b >= a && a + b == s))
                    .count();
                prop_assert!(reps >= 2, "sum {} has {} representations", s, reps);
            }
        }
    }
}
