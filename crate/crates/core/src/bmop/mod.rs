//! Truncated upper-triangular perturbations of a weighted forward shift.
//!
//! Basis vectors are indexed from 0 and `e_0` is the cyclic vector. Given
//! blocks `2 <= b_1 < b_2 < ...`, the operator acts as a weighted forward
//! shift `T e_i = w_i e_{i+1}` on `b_{k-1} <= i < b_k - 1` (with `b_0 = 0`),
//! and the remaining column `T e_{b_k - 1}` is solved so that
//!
//! ```text
//! T^{b_k} e_0 = P_k(T) e_0 + e_{b_k} / a_k
//! ```
//!
//! holds exactly. With `v = T^{b_k - 1} e_0` and `c = v[b_k - 1]` the column is
//! `(P_k(T) e_0 + e_{b_k}/a_k - T(v - c e_{b_k - 1})) / c`; this only touches
//! columns already built because `deg P_k < b_k`.
//!
//! A truncation to dimension `N` keeps the blocks with `b_k < N` and defines
//! columns `0..N-1`; applying `T` to anything supported at `N - 1` is a
//! truncation overflow.

mod poly;

pub use poly::{default_block_control, polynomial_grid, ControlTable, GridSpec, Polynomial, PolynomialGrid};

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::deltasidon::{DeltaSidonFamily, IndexTuple};
use crate::ratio::{self, Q};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BmError {
    #[error("block sequence must be strictly increasing (block {k})")]
    NonIncreasingBlocks { k: usize },
    #[error("first block must satisfy b_1 >= 2")]
    FirstBlockTooSmall,
    #[error("weight at index {index} must be positive")]
    NonPositiveWeight { index: u64 },
    #[error("no weight supplied for index {index}")]
    MissingWeight { index: u64 },
    #[error("a_{k} must be positive and strictly increasing")]
    InvalidScale { k: usize },
    #[error("P_{k} is not controlled by u_{k} (deg {degree}, |P|_1 = {norm}, u = {control})")]
    ControlViolated { k: usize, degree: usize, norm: String, control: String },
    #[error("controls must be strictly increasing (block {k})")]
    ControlsNotIncreasing { k: usize },
    #[error("deg P_{k} = {degree} must be below b_{k} = {block}")]
    DegreeTooLarge { k: usize, degree: usize, block: u64 },
    #[error("orbit coordinate at the forcing index of block {k} vanishes")]
    DegenerateOrbit { k: usize },
    #[error("orbit leaves the truncation: index {index} has no column in dimension {dimension}")]
    TruncationOverflow { index: u64, dimension: u64 },
    #[error("dimension must be at least 2")]
    DimensionTooSmall,
    #[error("tuple {0} has no block within the truncation")]
    UnbuiltTuple(IndexTuple),
    #[error("control v_({l},{k}) must be positive")]
    NonPositiveControl { l: u32, k: u32 },
    #[error("controls must be nondecreasing in l (v_({l},{k}) drops)")]
    ControlsNotMonotone { l: u32, k: u32 },
    #[error("{unplaced} grid tuples could not be placed within {levels} levels (first: {example})")]
    Unreachable { unplaced: usize, levels: u32, example: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Forward-shift weights `w_i`, indexed like the basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftWeights {
    Constant(#[serde(with = "crate::ratio::serde_ratio")] Q),
    PerIndex(#[serde(with = "crate::ratio::serde_ratio_vec")] Vec<Q>),
}

impl Default for ShiftWeights {
    fn default() -> Self {
        ShiftWeights::Constant(Q::one())
    }
}

impl ShiftWeights {
    fn get(&self, index: u64) -> Result<Q, BmError> {
        match self {
            ShiftWeights::Constant(w) => Ok(w.clone()),
            ShiftWeights::PerIndex(ws) => ws
                .get(index as usize)
                .cloned()
                .ok_or(BmError::MissingWeight { index }),
        }
    }
}

/// One block: `b_k`, the scale `a_k`, the polynomial `P_k`, the control `u_k`
/// and, when it comes from a Δ-Sidon family, its tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmBlock {
    pub b: u64,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub a: Q,
    pub poly: Polynomial,
    #[serde(with = "crate::ratio::serde_ratio")]
    pub control: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<IndexTuple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BmParameters {
    #[serde(default)]
    pub weights: ShiftWeights,
    pub blocks: Vec<BmBlock>,
}

impl BmParameters {
    /// Blocks `b_k` with defaults `a_k = 2^k`, `u_k = k + 2` and `P_k = 0`.
    pub fn with_defaults(blocks: &[u64]) -> Self {
        Self {
            weights: ShiftWeights::default(),
            blocks: (1..)
                .zip(blocks)
                .map(|(k, &b)| BmBlock {
                    b,
                    a: ratio::pow2(k),
                    poly: Polynomial::zero(),
                    control: default_block_control(k as usize),
                    tag: None,
                })
                .collect(),
        }
    }

    /// Blocks from the flattened family, keeping those with `b < limit`.
    /// Block `k` (in tuple order) gets `a_k = 2^k`, `u_k = k + 2` and the
    /// polynomial `P_{l,k'}` chosen by `polys` for its tuple `(l, n, k')`.
    pub fn from_family(
        family: &DeltaSidonFamily,
        limit: u64,
        polys: impl Fn(IndexTuple) -> Polynomial,
    ) -> Self {
        let limit = BigUint::from(limit);
        let blocks = (1..)
            .zip(family.flattened())
            .take_while(|(_, (_, b))| *b < limit)
            .map(|(k, (tag, b))| BmBlock {
                b: b.to_u64().expect("below a u64 limit"),
                a: ratio::pow2(k),
                poly: polys(tag),
                control: default_block_control(k as usize),
                tag: Some(tag),
            })
            .collect();
        Self {
            weights: ShiftWeights::default(),
            blocks,
        }
    }

    /// Checks every parameter invariant except the ones that need the orbit.
    pub fn validate(&self) -> Result<(), BmError> {
        if let Some(first) = self.blocks.first() {
            if first.b < 2 {
                return Err(BmError::FirstBlockTooSmall);
            }
        }
        match &self.weights {
            ShiftWeights::Constant(w) if !w.is_positive() => {
                return Err(BmError::NonPositiveWeight { index: 0 });
            }
            ShiftWeights::PerIndex(ws) => {
                if let Some(i) = ws.iter().position(|w| !w.is_positive()) {
                    return Err(BmError::NonPositiveWeight { index: i as u64 });
                }
            }
            _ => {}
        }
        for (idx, block) in self.blocks.iter().enumerate() {
            let k = idx + 1;
            if !block.a.is_positive() {
                return Err(BmError::InvalidScale { k });
            }
            if idx > 0 {
                let prev = &self.blocks[idx - 1];
                if block.b <= prev.b {
                    return Err(BmError::NonIncreasingBlocks { k });
                }
                if block.a <= prev.a {
                    return Err(BmError::InvalidScale { k });
                }
                if block.control <= prev.control {
                    return Err(BmError::ControlsNotIncreasing { k });
                }
            }
            let degree = block.poly.degree().unwrap_or(0);
            if !block.poly.is_controlled_by(&block.control) {
                return Err(BmError::ControlViolated {
                    k,
                    degree,
                    norm: ratio::format_ratio(&block.poly.l1_norm()),
                    control: ratio::format_ratio(&block.control),
                });
            }
            if degree as u64 >= block.b {
                return Err(BmError::DegreeTooLarge {
                    k,
                    degree,
                    block: block.b,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameters serialize")
    }
}

/// A block as realised in a truncated operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltBlock {
    /// 1-based position in the block sequence.
    pub position: usize,
    pub block: BmBlock,
}

/// The operator restricted to `span{e_0, ..., e_{N-1}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmOperator {
    dimension: u64,
    /// `columns[i] = T e_i` for `i < N - 1`.
    columns: Vec<SparseVector>,
    blocks: Vec<BuiltBlock>,
}

impl BmOperator {
    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn blocks(&self) -> &[BuiltBlock] {
        &self.blocks
    }

    pub fn column(&self, i: u64) -> Option<&SparseVector> {
        self.columns.get(i as usize)
    }

    /// Overwrites a column; used to build corrupted operators for negative
    /// checks.
    pub fn set_column(&mut self, i: u64, column: SparseVector) {
        self.columns[i as usize] = column;
    }

    pub fn block_for(&self, tag: IndexTuple) -> Option<&BuiltBlock> {
        self.blocks.iter().find(|b| b.block.tag == Some(tag))
    }

    pub fn is_forcing_index(&self, i: u64) -> bool {
        self.blocks.iter().any(|b| b.block.b - 1 == i)
    }

    pub fn apply(&self, x: &SparseVector) -> Result<SparseVector, BmError> {
        let mut out = SparseVector::zero();
        for (i, coeff) in x.iter() {
            let column = self.columns.get(i as usize).ok_or(BmError::TruncationOverflow {
                index: i,
                dimension: self.dimension,
            })?;
            out.axpy(coeff, column);
        }
        Ok(out)
    }

    pub fn apply_power(&self, x: &SparseVector, power: u64) -> Result<SparseVector, BmError> {
        let mut current = x.clone();
        for _ in 0..power {
            current = self.apply(&current)?;
        }
        Ok(current)
    }

    /// `P(T) x`.
    pub fn apply_polynomial(&self, poly: &Polynomial, x: &SparseVector) -> Result<SparseVector, BmError> {
        let mut out = SparseVector::zero();
        let mut power = x.clone();
        for (j, c) in poly.coeffs().iter().enumerate() {
            if j > 0 {
                power = self.apply(&power)?;
            }
            out.axpy(c, &power);
        }
        Ok(out)
    }

    /// Nonzero entries as `row,col,num,den`, sorted by column then row.
    pub fn to_triplet_csv(&self) -> String {
        let mut out = String::from("row,col,num,den\n");
        for (col, column) in self.columns.iter().enumerate() {
            for (row, value) in column.iter() {
                out.push_str(&format!("{row},{col},{},{}\n", value.numer(), value.denom()));
            }
        }
        out
    }
}

/// Builds the truncation of dimension `dimension` (columns `0..dimension-1`).
pub fn build_bm(params: &BmParameters, dimension: u64) -> Result<BmOperator, BmError> {
    params.validate()?;
    if dimension < 2 {
        return Err(BmError::DimensionTooSmall);
    }
    let blocks: Vec<BuiltBlock> = (1..)
        .zip(&params.blocks)
        .take_while(|(_, b)| b.b < dimension)
        .map(|(position, block)| BuiltBlock {
            position,
            block: block.clone(),
        })
        .collect();
    let mut op = BmOperator {
        dimension,
        columns: Vec::with_capacity(dimension as usize - 1),
        blocks,
    };
    // orbit[j] = T^j e_0, extended one step per defined column.
    let mut orbit = vec![SparseVector::basis(0)];
    let mut next_block = op.blocks.iter().peekable();
    for i in 0..dimension - 1 {
        let column = match next_block.peek() {
            Some(built) if built.block.b - 1 == i => {
                let built = next_block.next().expect("peeked");
                forcing_column(&op, &orbit, built)?
            }
            _ => {
                let mut col = SparseVector::zero();
                col.set(i + 1, params.weights.get(i)?);
                col
            }
        };
        op.columns.push(column);
        let next = op.apply(orbit.last().expect("seeded"))?;
        orbit.push(next);
    }
    Ok(op)
}

fn forcing_column(op: &BmOperator, orbit: &[SparseVector], built: &BuiltBlock) -> Result<SparseVector, BmError> {
    let top = built.block.b - 1;
    let v = &orbit[top as usize];
    let c = v.get(top);
    if c.is_zero() {
        return Err(BmError::DegenerateOrbit { k: built.position });
    }
    let mut target = SparseVector::zero();
    for (j, coeff) in built.block.poly.coeffs().iter().enumerate() {
        target.axpy(coeff, &orbit[j]);
    }
    target.add_at(built.block.b, &built.block.a.recip());
    let mut lower = v.clone();
    lower.set(top, Q::zero());
    let correction = op.apply(&lower)?;
    Ok((&target - &correction).scale(&c.recip()))
}

/// One orbit step `T^n e_0`, with its distance to `P_k(T) e_0` when `n = b_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitStep {
    pub n: u64,
    pub vector: SparseVector,
    /// `(position k, ‖T^{b_k} e_0 - P_k(T) e_0‖_1)` at block indices.
    pub target_distance: Option<(usize, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTrace {
    pub steps: Vec<OrbitStep>,
}

impl OrbitTrace {
    pub fn vector(&self, n: u64) -> Option<&SparseVector> {
        self.steps.get(n as usize).map(|s| &s.vector)
    }

    /// One JSON object per step:
    /// `{"n":..,"vector":[[i,"p/q"],..],"block":k,"target_distance":"p/q"}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let vector: Vec<(u64, String)> = step
                .vector
                .iter()
                .map(|(i, v)| (i, ratio::format_ratio(v)))
                .collect();
            let mut obj = serde_json::json!({ "n": step.n, "vector": vector });
            if let Some((k, d)) = &step.target_distance {
                obj["block"] = serde_json::json!(k);
                obj["target_distance"] = serde_json::json!(ratio::format_ratio(d));
            }
            out.push_str(&obj.to_string());
            out.push('\n');
        }
        out
    }
}

/// The orbit `e_0, T e_0, ..., T^steps e_0`.
pub fn orbit(op: &BmOperator, steps: u64) -> Result<OrbitTrace, BmError> {
    let mut vectors = vec![SparseVector::basis(0)];
    for _ in 0..steps {
        let next = op.apply(vectors.last().expect("seeded"))?;
        vectors.push(next);
    }
    let mut out = Vec::with_capacity(vectors.len());
    for (n, vector) in (0u64..).zip(&vectors) {
        let target_distance = match op.blocks.iter().find(|b| b.block.b == n) {
            Some(built) => {
                let mut poly_image = SparseVector::zero();
                for (j, coeff) in built.block.poly.coeffs().iter().enumerate() {
                    poly_image.axpy(coeff, &vectors[j]);
                }
                Some((built.position, (vector - &poly_image).l1_norm()))
            }
            None => None,
        };
        out.push(OrbitStep {
            n,
            vector: vector.clone(),
            target_distance,
        });
    }
    Ok(OrbitTrace { steps: out })
}

/// Outcome of checking one block identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCheck {
    pub position: usize,
    pub b: u64,
    pub exact: bool,
    /// `‖T^{b_k} e_0 - P_k(T) e_0‖_1`, which equals `1/a_k` when exact.
    #[serde(with = "crate::ratio::serde_ratio")]
    pub distance: Q,
}

/// Re-simulates the orbit and checks `T^{b_k} e_0 = P_k(T) e_0 + e_{b_k}/a_k`
/// for every built block.
pub fn verify_block_identities(op: &BmOperator) -> Result<Vec<BlockCheck>, BmError> {
    let Some(last) = op.blocks.last() else {
        return Ok(Vec::new());
    };
    let trace = orbit(op, last.block.b)?;
    op.blocks
        .iter()
        .map(|built| {
            let image = trace.vector(built.block.b).expect("within trace");
            let poly_image = op.apply_polynomial(&built.block.poly, &SparseVector::basis(0))?;
            let mut expected = poly_image.clone();
            expected.add_at(built.block.b, &built.block.a.recip());
            Ok(BlockCheck {
                position: built.position,
                b: built.block.b,
                exact: *image == expected,
                distance: (image - &poly_image).l1_norm(),
            })
        })
        .collect()
}

/// Checks, for every `k <= |F_n|`, that `(T^{j_{n,k}})^{m_{l,n}} e_0` equals
/// `P(T) e_0 + e_b / a` for the block tagged `(l, n, k)`.
pub fn verify_disjoint_orbit_identity(
    op: &BmOperator,
    family: &DeltaSidonFamily,
    l: u32,
    n: u32,
) -> Result<bool, BmError> {
    let m = family
        .m(l, n)
        .ok_or(BmError::UnbuiltTuple(IndexTuple::new(l, n, 1)))?
        .to_u64()
        .ok_or(BmError::UnbuiltTuple(IndexTuple::new(l, n, 1)))?;
    let size = family.set(n).map_or(0, |s| s.len() as u32);
    let mut all = true;
    for k in 1..=size {
        let tag = IndexTuple::new(l, n, k);
        let built = op.block_for(tag).ok_or(BmError::UnbuiltTuple(tag))?;
        let j = family.j(n, k).expect("k within F_n");
        if built.block.b != m * j {
            return Err(BmError::UnbuiltTuple(tag));
        }
        let mut x = SparseVector::basis(0);
        for _ in 0..m {
            x = op.apply_power(&x, j)?;
        }
        let mut expected = op.apply_polynomial(&built.block.poly, &SparseVector::basis(0))?;
        expected.add_at(built.block.b, &built.block.a.recip());
        all &= x == expected;
    }
    Ok(all)
}
