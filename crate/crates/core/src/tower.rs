//! Flag Bott towers, generalized Bott towers, and the passage from the latter
//! to the former.
//!
//! Stages are numbered `1..=m` and keys `(j, l)` always satisfy `l < j`, in
//! the same order the matrices are written by hand. Conversion to zero-based
//! offsets happens at the point of use.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{factorial, IntMatrix, IntVector, Permutation};

/// Refuse to enumerate more fixed points / cones than this unless asked.
pub const DEFAULT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("a tower needs at least one stage")]
    NoStages,
    #[error("stage {stage} has dimension 0; every n_j must be positive")]
    ZeroDimension { stage: usize },
    #[error("matrix ({j},{l}) has shape {found_rows}x{found_cols}, expected {rows}x{cols}")]
    Shape {
        j: usize,
        l: usize,
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("vector ({j},{l}) has length {found}, expected {expected}")]
    VectorLength {
        j: usize,
        l: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing entry for ({j},{l})")]
    MissingKey { j: usize, l: usize },
    #[error("unexpected entry ({j},{l}); keys must satisfy 1 <= l < j <= m")]
    UnexpectedKey { j: usize, l: usize },
    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, count: u128, cap: u128 },
    #[error("fixed point has {found} blocks, expected {expected}")]
    FixedPointBlocks { expected: usize, found: usize },
    #[error("block {stage} of the fixed point permutes {found} letters, expected {expected}")]
    FixedPointSize {
        stage: usize,
        expected: usize,
        found: usize,
    },
}

fn check_dims(dims: &[usize]) -> Result<(), TowerError> {
    if dims.is_empty() {
        return Err(TowerError::NoStages);
    }
    if let Some(i) = dims.iter().position(|&n| n == 0) {
        return Err(TowerError::ZeroDimension { stage: i + 1 });
    }
    Ok(())
}

fn check_keys<V>(m: usize, map: &BTreeMap<(usize, usize), V>) -> Result<(), TowerError> {
    if let Some(&(j, l)) = map.keys().find(|&&(j, l)| !(1 <= l && l < j && j <= m)) {
        return Err(TowerError::UnexpectedKey { j, l });
    }
    for j in 1..=m {
        for l in 1..j {
            if !map.contains_key(&(j, l)) {
                return Err(TowerError::MissingKey { j, l });
            }
        }
    }
    Ok(())
}

/// Checks that `mats` has exactly the keys `1 <= l < j <= m` and that the
/// `(j, l)` matrix is `(n_j + 1) x (n_l + 1)`.
pub fn validate_flag_tower(dims: &[usize], mats: &BTreeMap<(usize, usize), IntMatrix>) -> Result<(), TowerError> {
    check_dims(dims)?;
    check_keys(dims.len(), mats)?;
    for (&(j, l), a) in mats {
        let (rows, cols) = (dims[j - 1] + 1, dims[l - 1] + 1);
        if a.rows() != rows || a.cols() != cols {
            return Err(TowerError::Shape {
                j,
                l,
                rows,
                cols,
                found_rows: a.rows(),
                found_cols: a.cols(),
            });
        }
    }
    Ok(())
}

/// The integer data of an `m`-stage flag Bott manifold: stage dimensions
/// `n_1..n_m` and a matrix `A(j,l)` of shape `(n_j+1) x (n_l+1)` for each
/// `l < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagBottTower {
    dims: Vec<usize>,
    mats: BTreeMap<(usize, usize), IntMatrix>,
}

impl FlagBottTower {
    pub fn new(dims: Vec<usize>, mats: BTreeMap<(usize, usize), IntMatrix>) -> Result<Self, TowerError> {
        validate_flag_tower(&dims, &mats)?;
        Ok(FlagBottTower { dims, mats })
    }

    /// The tower with every matrix zero: a product of full flag manifolds.
    pub fn trivial(dims: Vec<usize>) -> Result<Self, TowerError> {
        check_dims(&dims)?;
        let mut mats = BTreeMap::new();
        for j in 1..=dims.len() {
            for l in 1..j {
                mats.insert((j, l), IntMatrix::zeros(dims[j - 1] + 1, dims[l - 1] + 1));
            }
        }
        Self::new(dims, mats)
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        validate_flag_tower(&self.dims, &self.mats)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn stages(&self) -> usize {
        self.dims.len()
    }

    /// `n_j`, 1-based.
    pub fn n(&self, j: usize) -> usize {
        self.dims[j - 1]
    }

    /// `A(j, l)` for `1 <= l < j <= m`.
    pub fn matrix(&self, j: usize, l: usize) -> &IntMatrix {
        &self.mats[&(j, l)]
    }

    pub fn matrices(&self) -> &BTreeMap<(usize, usize), IntMatrix> {
        &self.mats
    }

    /// Complex dimension, `sum n_j (n_j + 1) / 2`.
    pub fn complex_dim(&self) -> usize {
        self.dims.iter().map(|n| n * (n + 1) / 2).sum()
    }
}

/// The integer data of an `m`-stage generalized Bott manifold: stage
/// dimensions and, for each `l < j`, the vector `a(j,l) = (a^j_{1,l}, ...,
/// a^j_{n_j,l})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedBottTower {
    dims: Vec<usize>,
    vecs: BTreeMap<(usize, usize), IntVector>,
}

impl GeneralizedBottTower {
    pub fn new(dims: Vec<usize>, vecs: BTreeMap<(usize, usize), IntVector>) -> Result<Self, TowerError> {
        check_dims(&dims)?;
        check_keys(dims.len(), &vecs)?;
        for (&(j, l), v) in &vecs {
            if v.dim() != dims[j - 1] {
                return Err(TowerError::VectorLength {
                    j,
                    l,
                    expected: dims[j - 1],
                    found: v.dim(),
                });
            }
        }
        Ok(GeneralizedBottTower { dims, vecs })
    }

    /// Convenience constructor from `((j, l), entries)` pairs.
    pub fn from_i64s(dims: Vec<usize>, vecs: &[((usize, usize), &[i64])]) -> Result<Self, TowerError> {
        let vecs = vecs
            .iter()
            .map(|&(key, entries)| (key, IntVector::from_i64s(entries)))
            .collect();
        Self::new(dims, vecs)
    }

    /// Every `a^j_{k,l}` equal to `value`.
    pub fn constant(dims: Vec<usize>, value: i64) -> Result<Self, TowerError> {
        check_dims(&dims)?;
        let mut vecs = BTreeMap::new();
        for j in 1..=dims.len() {
            for l in 1..j {
                vecs.insert((j, l), IntVector::from_i64s(&vec![value; dims[j - 1]]));
            }
        }
        Self::new(dims, vecs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn stages(&self) -> usize {
        self.dims.len()
    }

    pub fn n(&self, j: usize) -> usize {
        self.dims[j - 1]
    }

    /// Total dimension `n = n_1 + ... + n_m`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Zero-based coordinate of `e_{j,k}` in `R^n` (1-based `j`, `k <= n_j`).
    pub fn coord(&self, j: usize, k: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.dims[j - 1]);
        self.dims[..j - 1].iter().sum::<usize>() + k - 1
    }

    pub fn vector(&self, j: usize, l: usize) -> &IntVector {
        &self.vecs[&(j, l)]
    }

    pub fn vectors(&self) -> &BTreeMap<(usize, usize), IntVector> {
        &self.vecs
    }

    /// `a^j_{k,l}`.
    pub fn a(&self, j: usize, k: usize, l: usize) -> &BigInt {
        &self.vecs[&(j, l)].entries()[k - 1]
    }
}

/// The `n x m` block matrix with `-1` down block `j` of column `j`, the
/// vectors `a(j,l)` below the diagonal, and zeros above.
pub fn lambda_matrix(t: &GeneralizedBottTower) -> IntMatrix {
    let m = t.stages();
    let mut lambda = IntMatrix::zeros(t.total_dim(), m);
    for j in 1..=m {
        for k in 1..=t.n(j) {
            let row = t.coord(j, k);
            lambda.set(row, j - 1, BigInt::from(-1));
            for l in 1..j {
                lambda.set(row, l - 1, t.a(j, k, l).clone());
            }
        }
    }
    lambda
}

/// The flag Bott tower associated to a generalized Bott tower: `A(j,l)` holds
/// `a(j,l)` in the top of its first column and zeros everywhere else.
pub fn associate(t: &GeneralizedBottTower) -> FlagBottTower {
    let mut mats = BTreeMap::new();
    for (&(j, l), v) in t.vectors() {
        let mut a = IntMatrix::zeros(t.n(j) + 1, t.n(l) + 1);
        for (k, x) in v.entries().iter().enumerate() {
            a.set(k, 0, x.clone());
        }
        mats.insert((j, l), a);
    }
    FlagBottTower::new(t.dims().to_vec(), mats).expect("associated tower is well-formed by construction")
}

/// A torus-fixed point: one permutation of `[n_j + 1]` per stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedPoint {
    pub perms: Vec<Permutation>,
}

impl FixedPoint {
    pub fn new(perms: Vec<Permutation>) -> Self {
        FixedPoint { perms }
    }

    pub fn identity(dims: &[usize]) -> Self {
        FixedPoint {
            perms: dims.iter().map(|&n| Permutation::identity(n + 1)).collect(),
        }
    }

    /// From 1-based one-line words, one per stage.
    pub fn from_one_line(words: &[&[usize]]) -> Result<Self, crate::lattice::LatticeError> {
        Ok(FixedPoint {
            perms: words
                .iter()
                .map(|w| Permutation::from_one_line(w))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Permutation of stage `j` (1-based).
    pub fn block(&self, j: usize) -> &Permutation {
        &self.perms[j - 1]
    }

    pub fn check_dims(&self, dims: &[usize]) -> Result<(), TowerError> {
        if self.perms.len() != dims.len() {
            return Err(TowerError::FixedPointBlocks {
                expected: dims.len(),
                found: self.perms.len(),
            });
        }
        for (j, (p, &n)) in self.perms.iter().zip(dims).enumerate() {
            if p.len() != n + 1 {
                return Err(TowerError::FixedPointSize {
                    stage: j + 1,
                    expected: n + 1,
                    found: p.len(),
                });
            }
        }
        Ok(())
    }

    /// Same point with block `j` replaced by `w_j * (r, s)`.
    pub fn swap_in_block(&self, j: usize, r: usize, s: usize) -> FixedPoint {
        let mut perms = self.perms.clone();
        perms[j - 1] = perms[j - 1].times_transposition(r, s);
        FixedPoint { perms }
    }

    /// Stage words joined with `|`, e.g. `231|21`.
    pub fn label(&self) -> String {
        self.perms.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
    }
}

/// `prod_j (n_j + 1)!`, saturating.
pub fn fixed_point_count(dims: &[usize]) -> u128 {
    dims.iter()
        .map(|&n| factorial(n + 1))
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// All fixed points, lexicographic in the tuple of one-line words.
pub fn enumerate_fixed_points(dims: &[usize], cap: u128) -> Result<Vec<FixedPoint>, TowerError> {
    check_dims(dims)?;
    let count = fixed_point_count(dims);
    if count > cap {
        return Err(TowerError::CapExceeded {
            what: "fixed points",
            count,
            cap,
        });
    }
    let blocks: Vec<Vec<Permutation>> = dims.iter().map(|&n| Permutation::all(n + 1).collect()).collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; blocks.len()];
    loop {
        out.push(FixedPoint {
            perms: idx.iter().zip(&blocks).map(|(&i, b)| b[i].clone()).collect(),
        });
        // odometer, last block fastest
        let mut pos = blocks.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < blocks[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}
