use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::BmError;
use crate::deltasidon::IndexTuple;
use crate::ratio::{self, Q};

/// Polynomial with rational coefficients; `coeffs[j]` multiplies `x^j`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    #[serde(with = "crate::ratio::serde_ratio_vec")]
    coeffs: Vec<Q>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Sum of the absolute values of the coefficients.
    pub fn l1_norm(&self) -> Q {
        self.coeffs.iter().map(|c| c.abs()).fold(Q::zero(), |a, c| a + c)
    }

    /// `deg P < control` and `|P|_1 < control`. The zero polynomial counts as
    /// degree 0.
    pub fn is_controlled_by(&self, control: &Q) -> bool {
        let degree = self.degree().unwrap_or(0) as u64;
        ratio::from_u64(degree) < *control && self.l1_norm() < *control
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", ratio::RatioDisplay(c))?,
                1 => write!(f, "{} x", ratio::RatioDisplay(c))?,
                _ => write!(f, "{} x^{j}", ratio::RatioDisplay(c))?,
            }
        }
        Ok(())
    }
}

/// `u_k = k + 2` for the block with 1-based position `k`.
pub fn default_block_control(position: usize) -> Q {
    ratio::from_u64(position as u64 + 2)
}

/// Per-level controls `v_{l,k}`; row `l - 1` lists `v_{l,1}, v_{l,2}, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlTable {
    rows: Vec<Vec<Q>>,
}

impl ControlTable {
    /// Controls must be positive and nondecreasing in `l` for each `k`.
    pub fn new(rows: Vec<Vec<Q>>) -> Result<Self, BmError> {
        for (l, row) in (1u32..).zip(&rows) {
            if let Some(k) = row.iter().position(|v| !v.is_positive()) {
                return Err(BmError::NonPositiveControl { l, k: k as u32 + 1 });
            }
        }
        for (l, pair) in (2u32..).zip(rows.windows(2)) {
            if let Some(k) = pair[0].iter().zip(&pair[1]).position(|(a, b)| b < a) {
                return Err(BmError::ControlsNotMonotone { l, k: k as u32 + 1 });
            }
        }
        Ok(Self { rows })
    }

    /// `v_{l,k} = min u_{l,n,k}` over the `n <= l` whose set has at least `k`
    /// elements. `set_sizes[n - 1]` is `|F_n|`; `block_control` receives the
    /// tuple and its 1-based position in tuple order.
    pub fn from_block_controls(
        set_sizes: &[usize],
        levels: u32,
        block_control: impl Fn(IndexTuple, usize) -> Q,
    ) -> Result<Self, BmError> {
        let mut rows: Vec<Vec<Q>> = Vec::with_capacity(levels as usize);
        let mut position = 0usize;
        for l in 1..=levels {
            let width = set_sizes.iter().take(l as usize).copied().max().unwrap_or(0);
            let mut row: Vec<Option<Q>> = vec![None; width];
            for n in 1..=l {
                let size = *set_sizes.get(n as usize - 1).ok_or_else(|| {
                    BmError::InvalidGrid(format!("no set size given for n = {n}"))
                })?;
                for k in 1..=size as u32 {
                    position += 1;
                    let u = block_control(IndexTuple::new(l, n, k), position);
                    let slot = &mut row[k as usize - 1];
                    if slot.as_ref().is_none_or(|v| &u < v) {
                        *slot = Some(u);
                    }
                }
            }
            rows.push(row.into_iter().map(|v| v.expect("every k is covered by the widest set")).collect());
        }
        Self::new(rows)
    }

    pub fn levels(&self) -> u32 {
        self.rows.len() as u32
    }

    /// Number of components controlled at level `l`.
    pub fn width(&self, l: u32) -> usize {
        (l as usize)
            .checked_sub(1)
            .and_then(|i| self.rows.get(i))
            .map_or(0, Vec::len)
    }

    pub fn control(&self, l: u32, k: u32) -> Option<&Q> {
        self.rows.get((l as usize).checked_sub(1)?)?.get((k as usize).checked_sub(1)?)
    }
}

/// Shape of the coefficient grid: each of `components` polynomials of
/// degree at most `max_degree` with coefficients in `δZ ∩ [-radius, radius]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(with = "crate::ratio::serde_ratio")]
    pub delta: Q,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub radius: Q,
    pub max_degree: usize,
    pub components: usize,
}

const MAX_GRID_TUPLES: usize = 1 << 20;

/// The emitted sequence `Q_1, Q_2, ...`, with `P_{l,k} = [Q_l]_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolynomialGrid {
    pub spec: GridSpec,
    levels: Vec<Vec<Polynomial>>,
}

impl PolynomialGrid {
    pub fn levels(&self) -> u32 {
        self.levels.len() as u32
    }

    /// `P_{l,k}`; zero outside the emitted range.
    pub fn polynomial(&self, l: u32, k: u32) -> Polynomial {
        let row = (l as usize).checked_sub(1).and_then(|i| self.levels.get(i));
        row.and_then(|r| r.get((k as usize).checked_sub(1)?))
            .cloned()
            .unwrap_or_default()
    }

    pub fn level(&self, l: u32) -> &[Polynomial] {
        &self.levels[l as usize - 1]
    }

    /// `(l, k, P_{l,k})` for every emitted component.
    pub fn emitted(&self) -> impl Iterator<Item = (u32, u32, &Polynomial)> {
        (1u32..).zip(&self.levels).flat_map(|(l, row)| (1u32..).zip(row).map(move |(k, p)| (l, k, p)))
    }
}

/// Grid coefficients in emission order: `0, δ, -δ, 2δ, -2δ, ...`.
fn grid_values(delta: &Q, radius: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero()];
    let mut step = delta.clone();
    while &step <= radius {
        out.push(step.clone());
        out.push(-step.clone());
        step += delta;
    }
    out
}

/// Index vectors over `slots` positions, ordered by largest index and then
/// lexicographically.
fn grid_tuples(values: usize, slots: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; slots];
    loop {
        out.push(current.clone());
        let Some(pos) = (0..slots).rev().find(|&i| current[i] + 1 < values) else {
            break;
        };
        current[pos] += 1;
        for slot in &mut current[pos + 1..] {
            *slot = 0;
        }
    }
    out.sort_by(|a, b| a.iter().max().cmp(&b.iter().max()).then(a.cmp(b)));
    out
}

/// Assigns grid tuples to levels: level `l` receives the first remaining
/// tuple whose components are all controlled by `v_{l,k}`, or the zero tuple
/// when none qualifies. Every grid tuple must be placed within the levels of
/// `controls`; otherwise the grid is reported unreachable.
pub fn polynomial_grid(spec: &GridSpec, controls: &ControlTable) -> Result<PolynomialGrid, BmError> {
    if !spec.delta.is_positive() || spec.radius.is_negative() {
        return Err(BmError::InvalidGrid("delta must be positive and radius nonnegative".into()));
    }
    let values = grid_values(&spec.delta, &spec.radius);
    let slots = (spec.max_degree + 1) * spec.components;
    let count = (values.len() as f64).powi(slots as i32);
    if count > MAX_GRID_TUPLES as f64 {
        return Err(BmError::InvalidGrid(format!("grid has about {count:.0} tuples")));
    }
    let tuples: Vec<Vec<Polynomial>> = grid_tuples(values.len(), slots)
        .into_iter()
        .map(|idx| {
            idx.chunks(spec.max_degree + 1)
                .map(|c| Polynomial::new(c.iter().map(|&i| values[i].clone()).collect()))
                .collect()
        })
        .collect();
    let mut placed = vec![false; tuples.len()];
    let mut levels = Vec::with_capacity(controls.levels() as usize);
    for l in 1..=controls.levels() {
        let width = controls.width(l);
        let mut row = vec![Polynomial::zero(); width];
        if width >= spec.components {
            let eligible = |t: &Vec<Polynomial>| {
                (1u32..)
                    .zip(t)
                    .all(|(k, p)| p.is_controlled_by(controls.control(l, k).expect("within width")))
            };
            if let Some(i) = (0..tuples.len()).find(|&i| !placed[i] && eligible(&tuples[i])) {
                placed[i] = true;
                row[..spec.components].clone_from_slice(&tuples[i]);
            }
        }
        levels.push(row);
    }
    let unplaced: Vec<usize> = (0..tuples.len()).filter(|&i| !placed[i]).collect();
    if let Some(&first) = unplaced.first() {
        return Err(BmError::Unreachable {
            unplaced: unplaced.len(),
            levels: controls.levels(),
            example: tuples[first].iter().map(ToString::to_string).collect::<Vec<_>>().join(" ⊕ "),
        });
    }
    Ok(PolynomialGrid {
        spec: spec.clone(),
        levels,
    })
}
