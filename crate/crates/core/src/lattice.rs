//! Exact integer and rational linear algebra, plus permutations in one-line
//! notation.
//!
//! Everything here is arbitrary precision. Entries of the tower matrices grow
//! multiplicatively along chains of stages, so fixed-width integers are not an
//! option.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("the zero vector has no primitive representative")]
    ZeroVector,
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
}

/// A vector in `Z^dim`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The `index`-th standard basis vector.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [BigInt] {
        &mut self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, factor: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * factor).collect())
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|x| x.to_i64()).collect()
    }

    /// Keeps only the coordinates whose index satisfies `keep`.
    pub fn select(&self, mut keep: impl FnMut(usize) -> bool) -> IntVector {
        IntVector(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, x)| x.clone())
                .collect(),
        )
    }

    /// Divides by the gcd of the entries; the direction is preserved.
    pub fn primitive(&self) -> Result<IntVector, LatticeError> {
        primitive(self)
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

pub fn primitive(v: &IntVector) -> Result<IntVector, LatticeError> {
    let g = v.0.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(IntVector(v.0.iter().map(|x| x / &g).collect()))
}

pub fn is_primitive(v: &IntVector) -> bool {
    v.0.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).is_one()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LatticeError> {
        if data.len() != rows * cols {
            return Err(LatticeError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small literal rows. Panics on ragged input.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect(),
        }
    }

    pub fn from_rows(rows: &[IntVector]) -> Result<Self, LatticeError> {
        let cols = rows.first().map_or(0, |r| r.dim());
        if rows.iter().any(|r| r.dim() != cols) {
            return Err(LatticeError::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.0.iter().cloned()).collect(),
        })
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector]) -> Result<Self, LatticeError> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> IntVector {
        IntVector(self.data[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn row_slice(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> IntVector {
        IntVector((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn to_rows(&self) -> Vec<IntVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        mat_mul(self, other)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LatticeError::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn det(&self) -> Result<BigInt, LatticeError> {
        det(self)
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|r| self.row_slice(r).to_vec()).collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in rank + 1..rows {
                for k in c + 1..cols {
                    let v = (&a[r][k] * &a[rank][c] - &a[r][c] * &a[rank][k]) / &prev;
                    a[r][k] = v;
                }
                a[r][c] = BigInt::zero();
            }
            prev = a[rank][c].clone();
            rank += 1;
        }
        rank
    }

    /// Entries as `i64` rows, if they fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.to_rows().iter().map(IntVector::to_i64s).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.row(r))?;
        }
        write!(f, "]")
    }
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    if a.cols != b.rows {
        return Err(LatticeError::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if !y.is_zero() {
                    out.data[i * b.cols + j] += x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Determinant by Bareiss fraction-free elimination. Every intermediate is an
/// exact integer (a minor of the input).
pub fn det(m: &IntMatrix) -> Result<BigInt, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|r| m.row_slice(r).to_vec()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Whether every leading-column Plücker coordinate of `g` is nonzero: for each
/// `k` and each increasing row sequence `i_1 < ... < i_k`, the minor on those
/// rows and the first `k` columns.
///
/// Enumerates all `2^(n+1) - 1` row subsets, so it is only meant for small
/// matrices.
pub fn is_generic(g: &IntMatrix) -> Result<bool, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    let n = g.rows;
    assert!(n < 64, "is_generic is a diagnostic for small matrices");
    for mask in 1u64..(1u64 << n) {
        let rows: Vec<usize> = (0..n).filter(|r| mask >> r & 1 == 1).collect();
        let k = rows.len();
        let data = rows
            .iter()
            .flat_map(|&r| (0..k).map(move |c| (r, c)))
            .map(|(r, c)| g.get(r, c).clone())
            .collect();
        let minor = IntMatrix::new(k, k, data)?;
        if det(&minor)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves `m x = b` over the rationals. Returns `None` when `m` is singular.
pub fn solve_rational(m: &IntMatrix, b: &IntVector) -> Result<Option<Vec<BigRational>>, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if b.dim() != m.rows {
        return Err(LatticeError::DimensionMismatch(format!(
            "right-hand side has dimension {}, expected {}",
            b.dim(),
            m.rows
        )));
    }
    let inv = match inverse_rational(m)? {
        Some(inv) => inv,
        None => return Ok(None),
    };
    let n = m.rows;
    Ok(Some(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &inv[i][j] * BigRational::from_integer(b.0[j].clone()))
                    .sum()
            })
            .collect(),
    ))
}

/// Inverse over the rationals by Gauss-Jordan elimination, as rows.
pub fn inverse_rational(m: &IntMatrix) -> Result<Option<Vec<Vec<BigRational>>>, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let to_q = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> = m.row_slice(r).iter().map(to_q).collect();
            row.extend((0..n).map(|c| {
                if c == r {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Ok(None);
        };
        a.swap(c, p);
        let pivot = a[c][c].clone();
        if !pivot.is_one() {
            for x in a[c].iter_mut() {
                *x /= &pivot;
            }
        }
        let pivot_row = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
    }
    Ok(Some(a.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Converts a rational vector to an integer one if every entry is integral.
pub fn integral(v: &[BigRational]) -> Option<IntVector> {
    v.iter()
        .map(|q| q.is_integer().then(|| q.to_integer()))
        .collect::<Option<Vec<_>>>()
        .map(IntVector)
}

/// Whether two vectors are linearly independent over the rationals, decided
/// by looking for a nonzero 2x2 minor.
pub fn pairwise_independent(u: &IntVector, v: &IntVector) -> bool {
    let n = u.dim().min(v.dim());
    for i in 0..n {
        for j in i + 1..n {
            let minor = &u.0[i] * &v.0[j] - &u.0[j] * &v.0[i];
            if !minor.is_zero() {
                return true;
            }
        }
    }
    false
}

/// If `diff == c * base` for some integer `c`, returns `c`.
pub fn integer_multiple(diff: &IntVector, base: &IntVector) -> Option<BigInt> {
    let pivot = base.0.iter().position(|x| !x.is_zero())?;
    let (c, rem) = diff.0[pivot].div_rem(&base.0[pivot]);
    if !rem.is_zero() {
        return None;
    }
    diff.0.iter().zip(&base.0).all(|(d, b)| *d == &c * b).then_some(c)
}

/// A permutation of `[n]` in one-line notation. Stored zero-based; the
/// constructors and accessors that say "one-line" use the 1-based values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { word: (0..n).collect() }
    }

    /// From a 1-based one-line word `[w(1), ..., w(n)]`.
    pub fn from_one_line(word: &[usize]) -> Result<Self, LatticeError> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &x in word {
            if x == 0 || x > n || seen[x - 1] {
                return Err(LatticeError::NotAPermutation(word.to_vec()));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation {
            word: word.iter().map(|x| x - 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `w(k)` for 1-based `k`, as a 1-based value.
    pub fn image(&self, k: usize) -> usize {
        self.word[k - 1] + 1
    }

    /// Zero-based view of the word.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.word.iter().map(|x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self * t`, where `t` transposes the 1-based positions `r` and `s`:
    /// swaps the entries at those positions of the word.
    pub fn times_transposition(&self, r: usize, s: usize) -> Permutation {
        let mut word = self.word.clone();
        word.swap(r - 1, s - 1);
        Permutation { word }
    }

    /// Composition `(self * other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            word: other.word.iter().map(|&k| self.word[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.word.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { word: inv }
    }

    pub fn inversions(&self) -> usize {
        let w = &self.word;
        (0..w.len())
            .map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count())
            .sum()
    }

    pub fn sign(&self) -> i32 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// The matrix with a 1 in entry `(w(k), k)` for every `k`.
    pub fn to_column_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (k, &x) in self.word.iter().enumerate() {
            m.set(x, k, BigInt::one());
        }
        m
    }

    /// Transpose of the column matrix; it sends `(t_1, ..., t_n)` to
    /// `(t_{w(1)}, ..., t_{w(n)})`.
    pub fn to_row_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (k, &x) in self.word.iter().enumerate() {
            m.set(k, x, BigInt::one());
        }
        m
    }

    /// All permutations of `[n]` in lexicographic order of their words.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((0..n).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut w = cur.clone();
            if next_permutation(&mut w) {
                next = Some(w);
            }
            Some(Permutation { word: cur })
        })
    }
}

fn next_permutation(w: &mut [usize]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| w[i] < w[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| w[j] > w[i]).unwrap();
    w.swap(i, j);
    w[i + 1..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Concatenated digits are ambiguous past 9.
        let sep = if self.len() > 9 { "," } else { "" };
        for (i, x) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{}", x + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

pub fn perm_to_row_matrix(w: &Permutation) -> IntMatrix {
    w.to_row_matrix()
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub(crate) fn abs_is_one(x: &BigInt) -> bool {
    x.abs().is_one()
}
