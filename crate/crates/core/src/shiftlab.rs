//! Weighted backward shifts built from a set of forbidden return times.
//!
//! Coordinates are indexed from 0 and the shift acts by
//! `(B x)_i = w_{i+1} x_{i+1}`, so `B e_0 = 0` and
//! `(B^n x)_0 = (w_1 ⋯ w_n) x_n`. Two weight rules are provided:
//!
//! * **syndetic gap**: for blocks `n_1 < n_2 < ...` with
//!   `n_{k+1} > n_k + k`, weights equal 2 on `[n_k + 1, n_k + k]`, drop to
//!   `2^{-k}` at `n_k + k + 1` and are 1 elsewhere. The prefix product then
//!   reaches `2^k` at `n_k + k` and is exactly 1 outside the blocks.
//! * **piecewise**: weights equal 2 on a set `C`, drop to `2^{-l}` right
//!   after each maximal run of `C` of length `l`, and are 1 elsewhere, so
//!   the prefix product is 1 off `C`.
//!
//! Return times of the ball `W = B(e_0, ε)` are classified from the prefix
//! product alone: `Π_n > 1/ε` gives the explicit witness
//! `x = e_0 + Π_n^{-1} e_n` (with `B^n x = e_0`), while `Π_n <= (1-ε)/ε` rules
//! `n` out. Anything in between is reported as a boundary case.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::natset::{runs, NatWindow};
use crate::ratio::{self, Q};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShiftError {
    #[error("block n_{k} = {start} must exceed n_{prev} + {prev} = {previous_end}", prev = k - 1)]
    OverlappingBlocks { k: u64, start: u64, previous_end: u64 },
    #[error("blocks must start at n_1 >= 1")]
    ZeroBlock,
    #[error("complement element {element} outside [1, {horizon}]")]
    ComplementOutOfRange { element: u64, horizon: u64 },
    #[error("weight w_{n} must lie in (0, 2]")]
    InvalidWeight { n: u64 },
    #[error("eps must satisfy 0 < eps < 1/2")]
    InvalidEpsilon,
    #[error("index {needed} exceeds the weight horizon {horizon}")]
    HorizonExceeded { needed: u64, horizon: u64 },
    #[error("weight w_{n} is not a power of two")]
    NotPowerOfTwo { n: u64 },
}

/// How a weight sequence was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum WeightRule {
    SyndeticGap { blocks: Vec<u64> },
    Piecewise { complement: Vec<u64> },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Values {
    /// `log2 w_n`, index `n - 1`.
    Exponents(Vec<i64>),
    Rationals(Vec<Q>),
}

/// Weights `w_1, ..., w_horizon`, each in `(0, 2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSequence {
    rule: WeightRule,
    values: Values,
}

impl WeightSequence {
    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    pub fn horizon(&self) -> u64 {
        match &self.values {
            Values::Exponents(e) => e.len() as u64,
            Values::Rationals(r) => r.len() as u64,
        }
    }

    /// `w_n` for `1 <= n <= horizon`.
    pub fn weight(&self, n: u64) -> Option<Q> {
        let idx = (n as usize).checked_sub(1)?;
        match &self.values {
            Values::Exponents(e) => e.get(idx).map(|&z| ratio::pow2(z)),
            Values::Rationals(r) => r.get(idx).cloned(),
        }
    }

    /// `log2 w_n`, if `w_n` is a power of two.
    pub fn log2_weight(&self, n: u64) -> Option<i64> {
        let idx = (n as usize).checked_sub(1)?;
        match &self.values {
            Values::Exponents(e) => e.get(idx).copied(),
            Values::Rationals(r) => r.get(idx).and_then(ratio::exact_log2),
        }
    }

    pub fn profile(&self) -> ProductProfile {
        let prefix = match &self.values {
            Values::Exponents(e) => {
                let mut acc = vec![0i64];
                for z in e {
                    acc.push(acc.last().expect("seeded") + z);
                }
                Prefix::Exponents(acc)
            }
            Values::Rationals(r) => {
                let mut acc = vec![Q::one()];
                for w in r {
                    let next = acc.last().expect("seeded") * w;
                    acc.push(next);
                }
                Prefix::Rationals(acc)
            }
        };
        ProductProfile { prefix }
    }

    /// CSV with header `n,log2_w,log2_prefix_product`, one row per index.
    pub fn to_csv(&self) -> Result<String, ShiftError> {
        let profile = self.profile();
        let mut out = String::from("n,log2_w,log2_prefix_product\n");
        for n in 1..=self.horizon() {
            let w = self.log2_weight(n).ok_or(ShiftError::NotPowerOfTwo { n })?;
            let p = profile.log2_product(n).ok_or(ShiftError::NotPowerOfTwo { n })?;
            out.push_str(&format!("{n},{w},{p}\n"));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weights serialize")
    }
}

impl Serialize for WeightSequence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            #[serde(flatten)]
            rule: &'a WeightRule,
            horizon: u64,
            weights: Vec<String>,
        }
        let weights = (1..=self.horizon())
            .map(|n| ratio::format_ratio(&self.weight(n).expect("in range")))
            .collect();
        Repr {
            rule: &self.rule,
            horizon: self.horizon(),
            weights,
        }
        .serialize(s)
    }
}

/// Blocks `n_k = k^2 + 2`, `k >= 1`, with `n_k <= horizon`.
pub fn square_blocks(horizon: u64) -> Vec<u64> {
    (1u64..)
        .map(|k| k * k + 2)
        .take_while(|&n| n <= horizon)
        .collect()
}

/// Syndetic-gap weights for the blocks `[n_k, n_k + k]`, truncated at
/// `horizon`.
pub fn build_weights_syndetic_gap(blocks: &[u64], horizon: u64) -> Result<WeightSequence, ShiftError> {
    if blocks.first() == Some(&0) {
        return Err(ShiftError::ZeroBlock);
    }
    for (k, pair) in (2u64..).zip(blocks.windows(2)) {
        let previous_end = pair[0].saturating_add(k - 1);
        if pair[1] <= previous_end {
            return Err(ShiftError::OverlappingBlocks {
                k,
                start: pair[1],
                previous_end,
            });
        }
    }
    let mut exps = vec![0i64; horizon as usize];
    for (k, &start) in (1u64..).zip(blocks) {
        if start >= horizon {
            break;
        }
        let top = start.saturating_add(k).min(horizon);
        for n in start + 1..=top {
            exps[n as usize - 1] = 1;
        }
        let drop_at = start.saturating_add(k + 1);
        if drop_at <= horizon {
            exps[drop_at as usize - 1] = -(k as i64);
        }
    }
    Ok(WeightSequence {
        rule: WeightRule::SyndeticGap {
            blocks: blocks.to_vec(),
        },
        values: Values::Exponents(exps),
    })
}

/// Piecewise weights for a set `complement ⊆ [1, horizon]`.
pub fn build_weights_piecewise(complement: &NatWindow, horizon: u64) -> Result<WeightSequence, ShiftError> {
    if let Some(bad) = complement.iter().find(|&n| n == 0 || n > horizon) {
        return Err(ShiftError::ComplementOutOfRange { element: bad, horizon });
    }
    let mut exps = vec![0i64; horizon as usize];
    for (start, end) in runs(complement) {
        for n in start..=end {
            exps[n as usize - 1] = 1;
        }
        if end < horizon {
            exps[end as usize] = -((end - start + 1) as i64);
        }
    }
    Ok(WeightSequence {
        rule: WeightRule::Piecewise {
            complement: complement.elements().to_vec(),
        },
        values: Values::Exponents(exps),
    })
}

/// Arbitrary weights `w_1, ..., w_len`, each in `(0, 2]`.
pub fn build_weights_explicit(weights: Vec<Q>) -> Result<WeightSequence, ShiftError> {
    let two = ratio::from_u64(2);
    if let Some(n) = (1u64..)
        .zip(&weights)
        .find(|(_, w)| !(Q::zero() < **w && **w <= two))
        .map(|(n, _)| n)
    {
        return Err(ShiftError::InvalidWeight { n });
    }
    Ok(WeightSequence {
        rule: WeightRule::Explicit,
        values: Values::Rationals(weights),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Prefix {
    Exponents(Vec<i64>),
    Rationals(Vec<Q>),
}

/// Prefix products `Π_n = w_1 ⋯ w_n` for `0 <= n <= horizon` (`Π_0 = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductProfile {
    prefix: Prefix,
}

impl ProductProfile {
    pub fn horizon(&self) -> u64 {
        match &self.prefix {
            Prefix::Exponents(e) => e.len() as u64 - 1,
            Prefix::Rationals(r) => r.len() as u64 - 1,
        }
    }

    pub fn product(&self, n: u64) -> Option<Q> {
        match &self.prefix {
            Prefix::Exponents(e) => e.get(n as usize).map(|&z| ratio::pow2(z)),
            Prefix::Rationals(r) => r.get(n as usize).cloned(),
        }
    }

    pub fn log2_product(&self, n: u64) -> Option<i64> {
        match &self.prefix {
            Prefix::Exponents(e) => e.get(n as usize).copied(),
            Prefix::Rationals(r) => r.get(n as usize).and_then(ratio::exact_log2),
        }
    }

    /// `w_{from+1} ⋯ w_to`, for `from <= to <= horizon`.
    pub fn range_product(&self, from: u64, to: u64) -> Option<Q> {
        if from > to {
            return None;
        }
        match &self.prefix {
            Prefix::Exponents(e) => {
                let (a, b) = (e.get(from as usize)?, e.get(to as usize)?);
                Some(ratio::pow2(b - a))
            }
            Prefix::Rationals(r) => Some(r.get(to as usize)? / r.get(from as usize)?),
        }
    }

    /// `{n ∈ [1, horizon] : Π_n > threshold}`.
    pub fn exceeding(&self, threshold: &Q) -> NatWindow {
        let elems = (1..=self.horizon())
            .filter(|&n| &self.product(n).expect("in range") > threshold)
            .collect();
        NatWindow::from_sorted(self.horizon(), elems).expect("increasing and bounded")
    }
}

/// Classification of a single `n` as a return time of the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Member,
    Nonmember,
    Boundary,
}

/// Norm used to measure distance to `e_0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BallNorm {
    L1,
    #[default]
    L2,
}

/// The vector `e_0 + coefficient · e_n`, with `coefficient = Π_n^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnWitness {
    pub n: u64,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub coefficient: Q,
}

impl ReturnWitness {
    pub fn vector(&self) -> SparseVector {
        let mut x = SparseVector::basis(0);
        x.add_at(self.n, &self.coefficient);
        x
    }

    /// Recomputes `B^n x` through the weights and checks `B^n x = e_0`
    /// together with `‖x - e_0‖ < eps`.
    pub fn verify(&self, weights: &WeightSequence, eps: &Q, norm: BallNorm) -> Result<bool, ShiftError> {
        let x = self.vector();
        let image = apply_power(weights, &x, self.n)?;
        let offset = &x - &SparseVector::basis(0);
        let close = match norm {
            BallNorm::L1 => &offset.l1_norm() < eps,
            BallNorm::L2 => offset.l2_norm_squared() < eps * eps,
        };
        Ok(close && image == SparseVector::basis(0))
    }
}

/// Per-`n` verdicts for `n ∈ [1, horizon]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnTimeVerdict {
    eps: Q,
    verdicts: Vec<Membership>,
    witnesses: BTreeMap<u64, ReturnWitness>,
}

impl ReturnTimeVerdict {
    pub fn eps(&self) -> &Q {
        &self.eps
    }

    pub fn horizon(&self) -> u64 {
        self.verdicts.len() as u64
    }

    pub fn verdict(&self, n: u64) -> Option<Membership> {
        self.verdicts.get((n as usize).checked_sub(1)?).copied()
    }

    fn with(&self, kind: Membership) -> Vec<u64> {
        (1u64..)
            .zip(&self.verdicts)
            .filter(|(_, v)| **v == kind)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn members(&self) -> Vec<u64> {
        self.with(Membership::Member)
    }

    pub fn nonmembers(&self) -> Vec<u64> {
        self.with(Membership::Nonmember)
    }

    pub fn boundary(&self) -> Vec<u64> {
        self.with(Membership::Boundary)
    }

    pub fn witness(&self, n: u64) -> Option<&ReturnWitness> {
        self.witnesses.get(&n)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &ReturnWitness> {
        self.witnesses.values()
    }

    /// `{"eps": "p/q", "members": [...], "boundary": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

impl Serialize for ReturnTimeVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            eps: String,
            members: Vec<u64>,
            boundary: Vec<u64>,
        }
        Repr {
            eps: ratio::format_ratio(&self.eps),
            members: self.members(),
            boundary: self.boundary(),
        }
        .serialize(s)
    }
}

/// Classifies each `n ∈ [1, horizon]` as a return time of `B(e_0, eps)`.
pub fn return_times_ball(weights: &WeightSequence, eps: &Q, horizon: u64) -> Result<ReturnTimeVerdict, ShiftError> {
    if !(Q::zero() < *eps && *eps < Q::new(1.into(), 2.into())) {
        return Err(ShiftError::InvalidEpsilon);
    }
    if horizon > weights.horizon() {
        return Err(ShiftError::HorizonExceeded {
            needed: horizon,
            horizon: weights.horizon(),
        });
    }
    let profile = weights.profile();
    let sufficient = eps.recip();
    let necessary = (Q::one() - eps) / eps;
    let mut verdicts = Vec::with_capacity(horizon as usize);
    let mut witnesses = BTreeMap::new();
    for n in 1..=horizon {
        let product = profile.product(n).expect("in range");
        let verdict = if product > sufficient {
            witnesses.insert(
                n,
                ReturnWitness {
                    n,
                    coefficient: product.recip(),
                },
            );
            Membership::Member
        } else if product <= necessary {
            Membership::Nonmember
        } else {
            Membership::Boundary
        };
        verdicts.push(verdict);
    }
    Ok(ReturnTimeVerdict {
        eps: eps.clone(),
        verdicts,
        witnesses,
    })
}

fn check_support(weights: &WeightSequence, x: &SparseVector) -> Result<(), ShiftError> {
    match x.max_support() {
        Some(top) if top > weights.horizon() => Err(ShiftError::HorizonExceeded {
            needed: top,
            horizon: weights.horizon(),
        }),
        _ => Ok(()),
    }
}

/// One application of the shift.
pub fn shift_once(weights: &WeightSequence, x: &SparseVector) -> Result<SparseVector, ShiftError> {
    check_support(weights, x)?;
    Ok(SparseVector::from_pairs(x.iter().filter(|(i, _)| *i > 0).map(|(i, v)| {
        (i - 1, weights.weight(i).expect("support checked") * v)
    })))
}

/// The orbit `x, Bx, ..., B^steps x`, computed one step at a time.
pub fn simulate_backward_shift(
    weights: &WeightSequence,
    x: &SparseVector,
    steps: u64,
) -> Result<Vec<SparseVector>, ShiftError> {
    check_support(weights, x)?;
    let mut orbit = vec![x.clone()];
    for _ in 0..steps {
        let next = shift_once(weights, orbit.last().expect("seeded"))?;
        orbit.push(next);
    }
    Ok(orbit)
}

/// `B^n x` in closed form: `(B^n x)_i = (w_{i+1} ⋯ w_{i+n}) x_{i+n}`.
pub fn apply_power(weights: &WeightSequence, x: &SparseVector, n: u64) -> Result<SparseVector, ShiftError> {
    check_support(weights, x)?;
    let profile = weights.profile();
    Ok(SparseVector::from_pairs(x.iter().filter(|(i, _)| *i >= n).map(|(i, v)| {
        (i - n, profile.range_product(i - n, i).expect("support checked") * v)
    })))
}
