use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::{NatError, NatWindow};
use crate::ratio::{self, Q};

/// `{m - n : m ∈ a, n ∈ b, m >= n}` observed on the horizon of `a`.
pub fn difference_set(a: &NatWindow, b: &NatWindow) -> NatWindow {
    difference_set_within(a, b, a.horizon())
}

/// Like [`difference_set`] but only differences `<= limit` are kept, and the
/// result is observed on `[0, limit]`. Runs in time proportional to the
/// number of qualifying pairs, which keeps long sparse sequences cheap.
pub fn difference_set_within(a: &NatWindow, b: &NatWindow, limit: u64) -> NatWindow {
    let a_elems = a.elements();
    let mut diffs = Vec::new();
    for n in b.iter() {
        let start = a_elems.partition_point(|&m| m < n);
        for &m in &a_elems[start..] {
            let d = m - n;
            if d > limit {
                break;
            }
            diffs.push(d);
        }
    }
    diffs.sort_unstable();
    diffs.dedup();
    NatWindow::from_sorted(limit, diffs).expect("differences are bounded by the limit")
}

/// Exact counting quotient `#{j ∈ [1, at] : j ∈ A} / at`.
///
/// Membership of 0 never contributes to the numerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityEstimate {
    #[serde(with = "crate::ratio::serde_ratio")]
    pub value: Q,
    pub horizon: u64,
}

impl DensityEstimate {
    fn at(w: &NatWindow, at: u64) -> Self {
        let elems = w.elements();
        let count = elems.partition_point(|&e| e <= at) - elems.partition_point(|&e| e < 1);
        Self {
            value: Q::new(BigInt::from(count), BigInt::from(at)),
            horizon: at,
        }
    }
}

/// Counting quotient of `w` at index `at`, with `1 <= at <= horizon`.
pub fn lower_density(w: &NatWindow, at: u64) -> Result<DensityEstimate, NatError> {
    if at == 0 || at > w.horizon() {
        return Err(NatError::IndexOutOfRange {
            at,
            horizon: w.horizon(),
        });
    }
    Ok(DensityEstimate::at(w, at))
}

/// Minimum counting quotient over the tail `[from, horizon]`: the window's
/// stand-in for a `liminf`. The returned `horizon` is the minimising index
/// (the smallest one on ties).
pub fn lower_density_tail(w: &NatWindow, from: u64) -> Result<DensityEstimate, NatError> {
    if from == 0 || from > w.horizon() {
        return Err(NatError::IndexOutOfRange {
            at: from,
            horizon: w.horizon(),
        });
    }
    let elems = w.elements();
    let mut count = (elems.partition_point(|&e| e < from) - elems.partition_point(|&e| e < 1)) as u64;
    let mut idx = elems.partition_point(|&e| e < from);
    // Compare count/n by cross multiplication to stay in integers.
    let mut best: Option<(u64, u64)> = None;
    for n in from..=w.horizon() {
        if idx < elems.len() && elems[idx] == n {
            count += 1;
            idx += 1;
        }
        let better = match best {
            None => true,
            Some((bc, bn)) => (count as u128) * (bn as u128) < (bc as u128) * (n as u128),
        };
        if better {
            best = Some((count, n));
        }
    }
    let (count, n) = best.expect("tail is nonempty");
    Ok(DensityEstimate {
        value: Q::new(BigInt::from(count), BigInt::from(n)),
        horizon: n,
    })
}

/// Outcome of checking the positive-density lower bound `1/(16c)` for the
/// difference set of a sequence with `n_k <= c k^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceDensityReport {
    pub estimate: DensityEstimate,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub bound: Q,
    pub pass: bool,
}

/// Computes `{n_k - n_j : k >= j}` up to `horizon`, its counting quotient at
/// `horizon`, and compares it with `1/(16c)`.
///
/// `seq` lists `n_1 < n_2 < ...`; it must satisfy `n_k <= c k^2` for every
/// listed `k`. To get an honest quotient the caller should list every term
/// that can produce a difference `<= horizon`, i.e. continue the sequence
/// until consecutive gaps exceed `horizon`.
pub fn verify_difference_density(
    seq: &NatWindow,
    c: &Q,
    horizon: u64,
) -> Result<DifferenceDensityReport, NatError> {
    if !c.is_positive() {
        return Err(NatError::InvalidParameter("growth constant c must be positive".into()));
    }
    if horizon == 0 {
        return Err(NatError::IndexOutOfRange { at: 0, horizon });
    }
    for (k, n_k) in (1u64..).zip(seq.iter()) {
        let k = BigInt::from(k);
        if Q::from_integer(BigInt::from(n_k)) > c * Q::from_integer(&k * &k) {
            return Err(NatError::GrowthBoundViolated {
                k: k.try_into().expect("k fits in u64"),
                element: n_k,
            });
        }
    }
    let diffs = difference_set_within(seq, seq, horizon);
    let estimate = DensityEstimate::at(&diffs, horizon);
    let bound = (c * ratio::from_u64(16)).recip();
    let pass = estimate.value >= bound;
    Ok(DifferenceDensityReport {
        estimate,
        bound,
        pass,
    })
}

/// `n_k = ⌈c k^2⌉` for `k = 1, 2, ...`, continued until the gap between
/// consecutive terms exceeds `horizon` (later terms cannot contribute a
/// difference `<= horizon`).
pub fn quadratic_sequence(c: &Q, horizon: u64) -> Result<NatWindow, NatError> {
    if !c.is_positive() {
        return Err(NatError::InvalidParameter("growth constant c must be positive".into()));
    }
    let term = |k: u64| -> Result<u64, NatError> {
        let k = BigInt::from(k);
        (c * Q::from_integer(&k * &k))
            .ceil()
            .to_integer()
            .try_into()
            .map_err(|_| NatError::InvalidParameter("sequence term exceeds u64".into()))
    };
    let mut out = vec![term(1)?];
    for k in 2u64.. {
        let next = term(k)?;
        let gap = next - out.last().expect("nonempty");
        out.push(next);
        if gap > horizon {
            break;
        }
    }
    let top = *out.last().expect("nonempty");
    NatWindow::from_sorted(top, out)
}
