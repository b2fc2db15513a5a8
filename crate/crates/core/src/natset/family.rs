use serde::{Deserialize, Serialize};

use super::{NatError, NatWindow};

/// Parameters turning the asymptotic Furstenberg families into decidable
/// window-relative tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    /// Syndetic gap bound `g`, also used for the thickening test.
    pub gap: u64,
    /// Thick / piecewise-syndetic length `L`.
    pub block_len: u64,
    /// Thickening `k` in `{n : [n, n+k] ⊆ w}`.
    pub thickening: u64,
    /// Gap bound `b` inside a piecewise-syndetic chain.
    pub piece_gap: u64,
}

impl FamilyParams {
    /// Uses `g` for both the syndetic and the piecewise gap bound.
    pub fn new(gap: u64, block_len: u64, thickening: u64) -> Self {
        Self {
            gap,
            block_len,
            thickening,
            piece_gap: gap,
        }
    }
}

/// Window-relative family membership, with the measured statistics that
/// decided each flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyClass {
    pub params: FamilyParams,
    pub thick: bool,
    pub syndetic: bool,
    pub piecewise_syndetic: bool,
    pub thickly_syndetic: bool,
    /// Largest gap in `w ∪ {0, horizon}`.
    pub max_gap: u64,
    /// Longest run of consecutive integers in `w`.
    pub longest_run: u64,
    /// Largest diameter of a chain of elements with gaps `<= piece_gap`.
    pub widest_chain: u64,
    /// Largest gap of the thickened set on `[0, horizon - k]`, if nonempty.
    pub thickened_max_gap: Option<u64>,
}

/// Maximal runs `[start, end]` of consecutive integers.
pub fn runs(w: &NatWindow) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for e in w.iter() {
        match out.last_mut() {
            Some((_, end)) if *end + 1 == e => *end = e,
            _ => out.push((e, e)),
        }
    }
    out
}

/// Largest gap between consecutive points of `elems ∪ {0, horizon}`.
pub fn max_gap_with_ends(elems: impl IntoIterator<Item = u64>, horizon: u64) -> u64 {
    let mut prev = 0;
    let mut worst = 0;
    for e in elems.into_iter().chain(std::iter::once(horizon)) {
        worst = worst.max(e - prev);
        prev = e;
    }
    worst
}

/// `{n : [n, n + k] ⊆ w}`, observed on `[0, horizon - k]`.
pub fn thickened(w: &NatWindow, k: u64) -> Option<NatWindow> {
    let horizon = w.horizon().checked_sub(k)?;
    let elems = runs(w)
        .into_iter()
        .filter(|(s, e)| e - s >= k)
        .flat_map(|(s, e)| s..=e - k)
        .collect();
    Some(NatWindow::from_sorted(horizon, elems).expect("runs are disjoint and increasing"))
}

fn widest_chain(w: &NatWindow, max_step: u64) -> u64 {
    let elems = w.elements();
    let mut best = 0;
    let mut start = elems[0];
    for pair in elems.windows(2) {
        if pair[1] - pair[0] > max_step {
            start = pair[1];
        }
        best = best.max(pair[1] - start);
    }
    best
}

/// Classifies a nonempty window:
///
/// * syndetic(g): every gap of `w ∪ {0, horizon}` is at most `g`;
/// * thick(L): `w` contains `L` consecutive integers;
/// * piecewise syndetic(L, b): some chain of elements with gaps at most `b`
///   has diameter at least `L`;
/// * thickly syndetic(k, g): `{n : [n, n+k] ⊆ w}` is nonempty and
///   syndetic(g) on `[0, horizon - k]`.
pub fn classify_family(w: &NatWindow, params: FamilyParams) -> Result<FamilyClass, NatError> {
    if w.is_empty() {
        return Err(NatError::EmptyWindow);
    }
    let max_gap = max_gap_with_ends(w.iter(), w.horizon());
    let longest_run = runs(w).iter().map(|(s, e)| e - s + 1).max().unwrap_or(0);
    let widest = widest_chain(w, params.piece_gap);
    let thickened_max_gap = thickened(w, params.thickening)
        .filter(|s| !s.is_empty())
        .map(|s| max_gap_with_ends(s.iter(), s.horizon()));
    Ok(FamilyClass {
        params,
        thick: longest_run >= params.block_len,
        syndetic: max_gap <= params.gap,
        piecewise_syndetic: widest >= params.block_len,
        thickly_syndetic: thickened_max_gap.is_some_and(|g| g <= params.gap),
        max_gap,
        longest_run,
        widest_chain: widest,
        thickened_max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_interval_is_in_every_family() {
        let w = NatWindow::interval(0, 50, 50).unwrap();
        for (g, l, k) in [(1, 1, 0), (1, 50, 50), (3, 20, 7)] {
            let c = classify_family(&w, FamilyParams::new(g, l, k)).unwrap();
            assert!(c.thick && c.syndetic && c.piecewise_syndetic && c.thickly_syndetic, "{c:?}");
        }
    }

    #[test]
    fn multiples_of_seven() {
        let w = NatWindow::new(700, (0..=100).map(|k| 7 * k)).unwrap();
        let c = classify_family(&w, FamilyParams::new(7, 2, 0)).unwrap();
        assert!(c.syndetic);
        assert!(!c.thick);
        assert!(!classify_family(&w, FamilyParams::new(6, 2, 0)).unwrap().syndetic);
    }

    #[test]
    fn growing_blocks_are_thick_but_not_syndetic() {
        let horizon = 10_000;
        let w = NatWindow::new(
            horizon,
            (0..=100u64).flat_map(|k| k * k..=k * k + k).filter(|&x| x <= horizon),
        )
        .unwrap();
        // Brute force: largest gap of w ∪ {0, horizon} and longest run.
        let mut pts: Vec<u64> = w.elements().to_vec();
        pts.insert(0, 0);
        pts.push(horizon);
        let brute_gap = pts.windows(2).map(|p| p[1] - p[0]).max().unwrap();
        assert_eq!(brute_gap, 100);
        let c = classify_family(&w, FamilyParams::new(99, 100, 1)).unwrap();
        assert!(c.thick);
        assert!(!c.syndetic);
        assert_eq!(c.longest_run, 100);
        assert!(!classify_family(&w, FamilyParams::new(99, 101, 1)).unwrap().thick);
        assert!(classify_family(&w, FamilyParams::new(100, 100, 1)).unwrap().syndetic);
    }

    #[test]
    fn thickened_set_from_runs() {
        let w = NatWindow::new(20, [1, 2, 3, 4, 8, 9, 15, 16, 17]).unwrap();
        assert_eq!(thickened(&w, 2).unwrap().elements(), &[1, 2, 15]);
        assert_eq!(thickened(&w, 2).unwrap().horizon(), 18);
        assert!(thickened(&w, 21).is_none());
    }

    #[test]
    fn empty_window_is_rejected() {
        assert_eq!(
            classify_family(&NatWindow::empty(5), FamilyParams::new(1, 1, 1)),
            Err(NatError::EmptyWindow)
        );
    }

    fn window_strategy() -> impl Strategy<Value = NatWindow> {
        (1u64..120).prop_flat_map(|h| {
            proptest::collection::vec(0..=h, 1..40)
                .prop_map(move |s| NatWindow::new(h, s).unwrap())
        })
    }

    proptest! {
        #[test]
        fn thick_is_monotone_under_supersets(
            w in window_strategy(),
            extra in proptest::collection::vec(0u64..120, 0..30),
            l in 1u64..10,
        ) {
            let bigger = NatWindow::new(
                w.horizon(),
                w.iter().chain(extra.into_iter().filter(|&x| x <= w.horizon())),
            ).unwrap();
            let p = FamilyParams::new(3, l, 1);
            let before = classify_family(&w, p).unwrap();
            let after = classify_family(&bigger, p).unwrap();
            prop_assert!(!before.thick || after.thick);
        }

        #[test]
        fn syndetic_implies_piecewise_with_same_gap(w in window_strategy(), g in 1u64..20) {
            let diameter = w.max().unwrap() - w.min().unwrap();
            let c = classify_family(&w, FamilyParams::new(g, diameter, 0)).unwrap();
            prop_assert!(!c.syndetic || c.piecewise_syndetic);
        }
    }
}
