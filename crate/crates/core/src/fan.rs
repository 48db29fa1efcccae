//! Simplicial fans stored as primitive rays plus maximal cones.
//!
//! A cone is a sorted list of indices into the ray table. Faces of maximal
//! cones are implicit.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{abs_is_one, is_primitive, primitive, IntMatrix, IntVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("ray {index} has dimension {found}, expected {expected}")]
    RayDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("ray {index} = {ray} is not primitive")]
    NotPrimitive { index: usize, ray: IntVector },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("cone {cone} refers to ray {index}, but there are only {count} rays")]
    RayIndex { cone: usize, index: usize, count: usize },
    #[error("cone {cone} repeats a ray index")]
    RepeatedIndex { cone: usize },
    #[error("cone {cone} is not simplicial: its rays are linearly dependent")]
    NotSimplicial { cone: usize },
    #[error("cone {small} is contained in cone {large}")]
    NotMaximal { small: usize, large: usize },
    #[error("{0:?} is not a cone of the fan")]
    NotACone(Vec<usize>),
    #[error("cannot subdivide along the zero cone")]
    EmptyCone,
    #[error("the new ray {0} is already a ray of the fan")]
    RayExists(IntVector),
    #[error("fans live in dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("ray {0} occurs in both fans")]
    SharedRay(IntVector),
    #[error("cones {0:?} and {1:?} have dependent rays together")]
    DependentUnion(Vec<usize>, Vec<usize>),
    #[error("cone {cone} has {size} rays in dimension {dim}")]
    NotFullDimensional { cone: usize, size: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVector>,
    cones: Vec<Vec<usize>>,
}

/// A cone of a fan, named by its rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConeRef {
    pub ray_indices: Vec<usize>,
}

impl ConeRef {
    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        ConeRef { ray_indices }
    }
}

fn canonical(mut cones: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut cones {
        c.sort_unstable();
    }
    cones.sort();
    cones.dedup();
    cones
}

fn independent(rays: &[IntVector], cone: &[usize]) -> bool {
    if cone.is_empty() {
        return true;
    }
    let m = IntMatrix::from_rows(&cone.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>())
        .expect("rays share a dimension");
    m.rank() == cone.len()
}

fn is_subset(small: &[usize], large: &[usize]) -> bool {
    // both sorted
    let mut it = large.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

impl Fan {
    /// Builds and validates a fan. Cones are sorted internally; the ray order
    /// is kept as given.
    pub fn new(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let mut seen = HashMap::new();
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != dim {
                return Err(FanError::RayDimension {
                    index: i,
                    expected: dim,
                    found: r.dim(),
                });
            }
            if !is_primitive(r) {
                return Err(FanError::NotPrimitive {
                    index: i,
                    ray: r.clone(),
                });
            }
            if let Some(&first) = seen.get(r) {
                return Err(FanError::DuplicateRay { first, second: i });
            }
            seen.insert(r, i);
        }
        for (ci, c) in cones.iter().enumerate() {
            if let Some(&index) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::RayIndex {
                    cone: ci,
                    index,
                    count: rays.len(),
                });
            }
            let set: HashSet<_> = c.iter().collect();
            if set.len() != c.len() {
                return Err(FanError::RepeatedIndex { cone: ci });
            }
        }
        let cones = canonical(cones);
        if let Some(ci) = (0..cones.len()).find(|&ci| !independent(&rays, &cones[ci])) {
            return Err(FanError::NotSimplicial { cone: ci });
        }
        let sizes: BTreeSet<usize> = cones.iter().map(Vec::len).collect();
        if sizes.len() > 1 {
            for (a, small) in cones.iter().enumerate() {
                for (b, large) in cones.iter().enumerate() {
                    if small.len() < large.len() && is_subset(small, large) {
                        return Err(FanError::NotMaximal { small: a, large: b });
                    }
                }
            }
        }
        Ok(Fan { dim, rays, cones })
    }

    /// For fans whose validity follows from how they were built.
    pub(crate) fn from_trusted(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Fan {
        debug_assert!(rays.iter().all(|r| r.dim() == dim));
        Fan {
            dim,
            rays,
            cones: canonical(cones),
        }
    }

    /// The fan in `R^dim` with no rays and a single cone, the origin.
    pub fn zero(dim: usize) -> Fan {
        Fan {
            dim,
            rays: Vec::new(),
            cones: vec![Vec::new()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Maximal cones, each sorted, in lexicographic order.
    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ray_index(&self, ray: &IntVector) -> Option<usize> {
        self.rays.iter().position(|r| r == ray)
    }

    /// The cone spanned by the given rays, if it is a face of some maximal
    /// cone.
    pub fn cone(&self, indices: &[usize]) -> Result<ConeRef, FanError> {
        let c = ConeRef::new(indices.to_vec());
        if self.contains_cone(&c) {
            Ok(c)
        } else {
            Err(FanError::NotACone(c.ray_indices))
        }
    }

    pub fn contains_cone(&self, c: &ConeRef) -> bool {
        c.ray_indices.iter().all(|&i| i < self.rays.len()) && self.cones.iter().any(|s| is_subset(&c.ray_indices, s))
    }

    /// Ray generators of a maximal cone, as matrix rows.
    pub fn cone_matrix(&self, cone: usize) -> IntMatrix {
        let rows: Vec<IntVector> = self.cones[cone].iter().map(|&i| self.rays[i].clone()).collect();
        if rows.is_empty() {
            return IntMatrix::zeros(0, self.dim);
        }
        IntMatrix::from_rows(&rows).expect("rays share a dimension")
    }

    /// Each maximal cone as the sorted list of its generators.
    pub fn cone_vectors(&self) -> Vec<Vec<IntVector>> {
        self.cones
            .iter()
            .map(|c| {
                let mut v: Vec<IntVector> = c.iter().map(|&i| self.rays[i].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }
}

/// Replaces every maximal cone containing `tau` by the cones obtained from
/// it by swapping one ray of `tau` for `u_tau`, the primitive vector along
/// the sum of `tau`'s rays. Subdividing along a ray changes nothing.
pub fn star_subdivide(f: &Fan, tau: &ConeRef) -> Result<Fan, FanError> {
    if tau.ray_indices.is_empty() {
        return Err(FanError::EmptyCone);
    }
    if !f.contains_cone(tau) {
        return Err(FanError::NotACone(tau.ray_indices.clone()));
    }
    if tau.ray_indices.len() == 1 {
        return Ok(f.clone());
    }
    let mut sum = IntVector::zeros(f.dim);
    for &i in &tau.ray_indices {
        sum = &sum + &f.rays[i];
    }
    let u = primitive(&sum).map_err(|_| FanError::EmptyCone)?;
    if f.rays.contains(&u) {
        return Err(FanError::RayExists(u));
    }
    let new = f.rays.len();
    let mut rays = f.rays.clone();
    rays.push(u);
    let mut cones = Vec::with_capacity(f.cones.len() + tau.ray_indices.len());
    for c in &f.cones {
        if is_subset(&tau.ray_indices, c) {
            for &drop in &tau.ray_indices {
                let mut next: Vec<usize> = c.iter().copied().filter(|&i| i != drop).collect();
                next.push(new);
                cones.push(next);
            }
        } else {
            cones.push(c.clone());
        }
    }
    Ok(Fan::from_trusted(f.dim, rays, cones))
}

/// The fan whose maximal cones are `s1 + s2` for every pair of maximal cones.
pub fn join(f1: &Fan, f2: &Fan) -> Result<Fan, FanError> {
    if f1.dim != f2.dim {
        return Err(FanError::DimensionMismatch(f1.dim, f2.dim));
    }
    let own: HashSet<&IntVector> = f1.rays.iter().collect();
    if let Some(r) = f2.rays.iter().find(|r| own.contains(r)) {
        return Err(FanError::SharedRay(r.clone()));
    }
    let offset = f1.rays.len();
    let mut rays = f1.rays.clone();
    rays.extend(f2.rays.iter().cloned());
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> = f1
        .cones
        .iter()
        .flat_map(|a| f2.cones.iter().map(move |b| (a, b)))
        .collect();
    let cones: Vec<Vec<usize>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut c = a.clone();
            c.extend(b.iter().map(|i| i + offset));
            if independent(&rays, &c) {
                Ok(c)
            } else {
                Err(FanError::DependentUnion(a.clone(), b.clone()))
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(Fan::from_trusted(f1.dim, rays, cones))
}

/// Whether the two fans have the same maximal cones, comparing cones as sets
/// of generators (ray order and indices are irrelevant).
pub fn fans_equal(f1: &Fan, f2: &Fan) -> bool {
    if f1.dim != f2.dim || f1.cones.len() != f2.cones.len() {
        return false;
    }
    let a: HashSet<Vec<IntVector>> = f1.cone_vectors().into_iter().collect();
    let b: HashSet<Vec<IntVector>> = f2.cone_vectors().into_iter().collect();
    a == b
}

/// Whether every maximal cone is generated by a lattice basis. Errors on the
/// first cone that is not full-dimensional.
pub fn check_unimodular(f: &Fan) -> Result<bool, FanError> {
    if let Some(ci) = f.cones.iter().position(|c| c.len() != f.dim) {
        return Err(FanError::NotFullDimensional {
            cone: ci,
            size: f.cones[ci].len(),
            dim: f.dim,
        });
    }
    Ok((0..f.cones.len())
        .into_par_iter()
        .all(|ci| abs_is_one(&f.cone_matrix(ci).det().expect("square"))))
}

/// Result of [`check_fan`]: every violation found, in a stable order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<String>,
    pub pairs_checked: usize,
    pub facets_checked: usize,
}

impl FanReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural checks: primitive distinct rays, simplicial cones, proper
/// pairwise intersections (decided by exact linear programming), and the
/// facet condition. With `complete`, every facet of every cone must be
/// shared by exactly two maximal cones.
///
/// Quadratic in the number of maximal cones.
pub fn check_fan(f: &Fan, complete: bool) -> FanReport {
    let mut report = FanReport::default();
    let v = &mut report.violations;
    let mut seen = HashMap::new();
    for (i, r) in f.rays.iter().enumerate() {
        if r.dim() != f.dim {
            v.push(format!("ray {i} has dimension {}", r.dim()));
            continue;
        }
        if !is_primitive(r) {
            v.push(format!("ray {i} = {r} is not primitive"));
        }
        if let Some(j) = seen.insert(r.clone(), i) {
            v.push(format!("rays {j} and {i} coincide"));
        }
    }
    for (ci, c) in f.cones.iter().enumerate() {
        if c.iter().any(|&i| i >= f.rays.len()) {
            v.push(format!("cone {ci} has an index out of range"));
            return report;
        }
        if !independent(&f.rays, c) {
            v.push(format!("cone {ci} {c:?} is not simplicial"));
        }
    }
    if !v.is_empty() {
        return report;
    }

    let n = f.cones.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    report.pairs_checked = pairs.len();
    let mut bad: Vec<String> = pairs
        .par_iter()
        .filter(|&&(a, b)| !meets_properly(f, &f.cones[a], &f.cones[b]))
        .map(|&(a, b)| {
            format!(
                "cones {a} {:?} and {b} {:?} overlap beyond their common face",
                f.cones[a], f.cones[b]
            )
        })
        .collect();
    v.append(&mut bad);

    let mut facets: HashMap<Vec<usize>, usize> = HashMap::new();
    for (ci, c) in f.cones.iter().enumerate() {
        if c.len() != f.dim {
            if complete {
                v.push(format!("cone {ci} is not full-dimensional"));
            }
            continue;
        }
        for skip in 0..c.len() {
            let facet: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &x)| x)
                .collect();
            *facets.entry(facet).or_default() += 1;
        }
    }
    report.facets_checked = facets.len();
    let mut facet_list: Vec<_> = facets.into_iter().collect();
    facet_list.sort();
    for (facet, count) in facet_list {
        if count > 2 {
            v.push(format!("facet {facet:?} lies in {count} maximal cones"));
        } else if complete && count != 2 {
            v.push(format!("facet {facet:?} lies in only {count} maximal cone"));
        }
    }
    report
}

/// Whether two simplicial cones meet exactly in the face spanned by their
/// common rays. Searches for `x = U l = V m` with `l, m >= 0` putting total
/// weight 1 on the rays that are not shared; such a point exists exactly
/// when the intersection is too large.
fn meets_properly(f: &Fan, a: &[usize], b: &[usize]) -> bool {
    let common: HashSet<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
    if common.len() == a.len() || common.len() == b.len() {
        // one is a face of the other; only possible for equal cones here
        return common.len() == a.len() && common.len() == b.len();
    }
    let vars = a.len() + b.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(f.dim + 1);
    for d in 0..f.dim {
        let mut row = Vec::with_capacity(vars);
        for &i in a {
            row.push(BigRational::from_integer(f.rays[i].entries()[d].clone()));
        }
        for &i in b {
            row.push(BigRational::from_integer(-f.rays[i].entries()[d].clone()));
        }
        rows.push(row);
    }
    let mut last = Vec::with_capacity(vars);
    for i in a.iter().chain(b) {
        last.push(if common.contains(i) {
            BigRational::zero()
        } else {
            BigRational::one()
        });
    }
    rows.push(last);
    let mut rhs = vec![BigRational::zero(); f.dim];
    rhs.push(BigRational::one());
    !lp_feasible(rows, rhs)
}

/// Whether `A x = b, x >= 0` has a solution, by phase one of the simplex
/// method in exact arithmetic with Bland's rule.
pub(crate) fn lp_feasible(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> bool {
    let rows = a.len();
    let vars = a.first().map_or(0, Vec::len);
    for i in 0..rows {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for x in &mut a[i] {
                *x = -x.clone();
            }
        }
    }
    // tableau columns: original vars, one artificial per row, rhs
    let width = vars + rows + 1;
    let mut t: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..rows).map(|k| {
                if k == i {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (vars..vars + rows).collect();
    // objective: minimise the sum of artificials; reduced costs row
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for c in 0..vars {
            cost[c] -= &row[c];
        }
        cost[width - 1] -= &row[width - 1];
    }
    while let Some(enter) = (0..vars + rows).find(|&c| cost[c].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // unbounded cannot happen for a bounded-below objective
            break;
        };
        let pivot = t[pr][enter].clone();
        for x in &mut t[pr] {
            *x /= &pivot;
        }
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &factor * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let factor = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&prow) {
                *x -= &factor * p;
            }
        }
        basis[pr] = enter;
    }
    cost[width - 1].is_zero()
}

/// Fan of `CP^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, every `n` of them
/// spanning a maximal cone.
pub fn projective_space_fan(n: usize) -> Fan {
    let mut rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
    rays.push(IntVector::new(vec![BigInt::from(-1); n]));
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    Fan::from_trusted(n, rays, cones)
}

/// Every cone (not only maximal ones) of `f`, as sorted index lists.
pub fn all_cones(f: &Fan) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for c in &f.cones {
        for mask in 0u64..(1 << c.len()) {
            out.insert(
                c.iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs)
    }

    fn fan(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(
            dim,
            rays.iter().map(|r| v(r)).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
        .unwrap()
    }

    fn sigma2() -> Fan {
        fan(
            2,
            &[&[1, 0], &[1, 1], &[0, 1], &[-1, 0], &[-1, -1], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 0]],
        )
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Fan::new(2, vec![v(&[2, 0])], vec![vec![0]]),
            Err(FanError::NotPrimitive { .. })
        ));
        assert!(matches!(
            Fan::new(2, vec![v(&[1, 0]), v(&[1, 0])], vec![]),
            Err(FanError::DuplicateRay { first: 0, second: 1 })
        ));
        assert!(matches!(
            Fan::new(2, vec![v(&[1, 0]), v(&[-1, 0])], vec![vec![0, 1]]),
            Err(FanError::NotSimplicial { .. })
        ));
        assert!(matches!(
            Fan::new(2, vec![v(&[1, 0]), v(&[0, 1])], vec![vec![0, 1], vec![0]]),
            Err(FanError::NotMaximal { .. })
        ));
        assert!(matches!(
            Fan::new(2, vec![v(&[1, 0])], vec![vec![3]]),
            Err(FanError::RayIndex { index: 3, .. })
        ));
    }

    #[test]
    fn cp2_subdivides_to_hexagon() {
        let mut f = projective_space_fan(2);
        for c in [[0, 1], [1, 2], [0, 2]] {
            let tau = f.cone(&c).unwrap();
            f = star_subdivide(&f, &tau).unwrap();
        }
        assert_eq!(f.rays().len(), 6);
        assert_eq!(f.max_cones().len(), 6);
        assert!(fans_equal(&f, &sigma2()));
    }

    #[test]
    fn subdivide_along_ray_is_identity() {
        let f = sigma2();
        assert_eq!(star_subdivide(&f, &f.cone(&[3]).unwrap()).unwrap(), f);
    }

    #[test]
    fn subdivide_single_cone() {
        let f = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let g = star_subdivide(&f, &f.cone(&[0, 1]).unwrap()).unwrap();
        let expected = fan(2, &[&[1, 0], &[1, 1], &[0, 1]], &[&[0, 1], &[1, 2]]);
        assert!(fans_equal(&g, &expected));
    }

    #[test]
    fn subdivide_rejects_non_cones() {
        let f = sigma2();
        assert!(matches!(
            star_subdivide(&f, &ConeRef::new(vec![0, 3])),
            Err(FanError::NotACone(_))
        ));
        assert!(matches!(
            star_subdivide(&f, &ConeRef::new(vec![])),
            Err(FanError::EmptyCone)
        ));
    }

    #[test]
    fn join_examples() {
        let f = sigma2();
        assert!(fans_equal(&join(&f, &Fan::zero(2)).unwrap(), &f));
        let a = fan(2, &[&[1, 0], &[-1, 0]], &[&[0], &[1]]);
        let b = fan(2, &[&[0, 1], &[0, -1]], &[&[0], &[1]]);
        let q = join(&a, &b).unwrap();
        let quadrants = fan(
            2,
            &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
        );
        assert!(fans_equal(&q, &quadrants));
        assert!(matches!(join(&a, &a), Err(FanError::SharedRay(_))));
        let c = fan(2, &[&[2, 1]], &[&[0]]);
        assert!(join(&fan(2, &[&[2, 1], &[1, 0]], &[&[1]]), &fan(2, &[&[-2, -1]], &[&[0]])).is_ok());
        let d = fan(2, &[&[1, 1], &[1, 0]], &[&[0, 1]]);
        assert!(matches!(join(&d, &c), Err(FanError::DependentUnion(..))));
    }

    #[test]
    fn equality() {
        let f = sigma2();
        let mut rays = f.rays().to_vec();
        rays.reverse();
        let k = rays.len() - 1;
        let cones: Vec<Vec<usize>> = f
            .max_cones()
            .iter()
            .map(|c| c.iter().map(|i| k - i).collect())
            .collect();
        let g = Fan::new(2, rays, cones).unwrap();
        assert!(fans_equal(&f, &g));
        assert!(!fans_equal(&f, &projective_space_fan(2)));
    }

    #[test]
    fn unimodularity() {
        assert_eq!(check_unimodular(&sigma2()), Ok(true));
        let bad = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        assert_eq!(check_unimodular(&bad), Ok(false));
        let thin = fan(2, &[&[1, 0]], &[&[0]]);
        assert!(matches!(
            check_unimodular(&thin),
            Err(FanError::NotFullDimensional { .. })
        ));
    }

    #[test]
    fn check_fan_clean_and_broken() {
        let r = check_fan(&sigma2(), true);
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(r.facets_checked, 6);

        let broken = fan(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]], &[&[0, 1], &[2, 3]]);
        let r = check_fan(&broken, false);
        assert!(r.violations.iter().any(|s| s.contains("overlap")), "{:?}", r.violations);

        // a half-plane is fine but not complete
        let half = fan(2, &[&[1, 0], &[0, 1], &[-1, 0]], &[&[0, 1], &[1, 2]]);
        assert!(check_fan(&half, false).is_clean());
        assert!(!check_fan(&half, true).is_clean());
    }

    #[test]
    fn lp_small_cases() {
        let q = |x: i64| BigRational::from_integer(x.into());
        // x + y = 1, x - y = 3 -> x = 2, y = -1: infeasible with y >= 0
        assert!(!lp_feasible(
            vec![vec![q(1), q(1)], vec![q(1), q(-1)]],
            vec![q(1), q(3)]
        ));
        assert!(lp_feasible(vec![vec![q(1), q(1)], vec![q(1), q(-1)]], vec![q(3), q(1)]));
        assert!(lp_feasible(vec![vec![q(1), q(-1)]], vec![q(-2)]));
    }

    /// Complete smooth fans in the plane: the quadrants with a few random
    /// cones subdivided.
    fn arb_complete_2d() -> impl Strategy<Value = Fan> {
        // start from the quadrants and subdivide some cones
        proptest::collection::vec(0usize..64, 0..6).prop_map(|picks| {
            let mut f = fan(
                2,
                &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]],
                &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            );
            for p in picks {
                let c = f.max_cones()[p % f.max_cones().len()].clone();
                f = star_subdivide(&f, &ConeRef::new(c)).unwrap();
            }
            f
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn subdivision_keeps_completeness(f in arb_complete_2d(), pick in any::<usize>(), ray in any::<bool>()) {
            prop_assert!(check_fan(&f, true).is_clean());
            let c = &f.max_cones()[pick % f.max_cones().len()];
            let tau = if ray { ConeRef::new(vec![c[0]]) } else { ConeRef::new(c.clone()) };
            let g = star_subdivide(&f, &tau).unwrap();
            prop_assert!(check_fan(&g, true).is_clean());
            prop_assert_eq!(check_unimodular(&g), Ok(true));
            if tau.ray_indices.len() >= 2 {
                prop_assert_eq!(g.rays().len(), f.rays().len() + 1);
                let new = g.rays().len() - 1;
                for cone in g.max_cones() {
                    prop_assert!(cone.contains(&new) || !is_subset(&tau.ray_indices, cone));
                }
            } else {
                prop_assert_eq!(&g, &f);
            }
        }

        #[test]
        fn equality_is_an_equivalence(a in arb_complete_2d(), b in arb_complete_2d(), c in arb_complete_2d()) {
            prop_assert!(fans_equal(&a, &a));
            prop_assert_eq!(fans_equal(&a, &b), fans_equal(&b, &a));
            if fans_equal(&a, &b) && fans_equal(&b, &c) {
                prop_assert!(fans_equal(&a, &c));
            }
        }
    }

    #[test]
    fn cp3_subdivision_checks() {
        let f = projective_space_fan(3);
        assert!(check_fan(&f, true).is_clean());
        let g = star_subdivide(&f, &f.cone(&[0, 1, 2]).unwrap()).unwrap();
        let r = check_fan(&g, true);
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(check_unimodular(&g), Ok(true));
        assert_eq!(all_cones(&f).len(), 15);
    }
}
