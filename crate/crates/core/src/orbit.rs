//! The three concrete fans: the generalized Bott fan, the permutohedral fan,
//! and the fan of a generic torus orbit closure in a flag Bott manifold over
//! a generalized Bott manifold. Also the blow-up pipeline relating them, and
//! the recovery of rays from GKM weights.
//!
//! Subsets of `[k]` are bitmasks with bit `x - 1` standing for `x`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::fan::{fans_equal, join, projective_space_fan, star_subdivide, ConeRef, Fan, FanError};
use crate::gkm::{tangential_weights, Basis, GkmError};
use crate::lattice::{integral, inverse_rational, IntMatrix, IntVector, Permutation};
use crate::tower::{associate, fixed_point_count, FixedPoint, FlagBottTower, GeneralizedBottTower, TowerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Gkm(#[from] GkmError),
    #[error("stage {stage} out of range 1..={m}")]
    StageOutOfRange { stage: usize, m: usize },
    #[error("{subset} is not a nonempty proper subset of [{size}]")]
    BadSubset { subset: String, size: usize },
    #[error("the cone of vertex {vertex} does not contain the ray u^{stage}_{subset}")]
    NotInCone {
        vertex: String,
        stage: usize,
        subset: String,
    },
    #[error("the weight system at vertex {0} is singular")]
    Singular(String),
    #[error("the solution at vertex {0} is not integral")]
    NonIntegral(String),
    #[error("block sizes up to 62 are supported, got {0}")]
    TooLarge(usize),
}

impl OrbitError {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, OrbitError::Tower(TowerError::CapExceeded { .. }))
    }
}

/// Elements of a bitmask subset, ascending, 1-based.
pub fn subset_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn subset_from_elements(elems: &[usize]) -> u64 {
    elems.iter().fold(0, |m, &x| m | 1 << (x - 1))
}

/// `{1,3}` style rendering.
pub fn subset_label(mask: u64) -> String {
    let parts: Vec<String> = subset_elements(mask).iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn full_mask(size: usize) -> u64 {
    (1u64 << size) - 1
}

fn check_subset(mask: u64, size: usize) -> Result<(), OrbitError> {
    if size > 63 {
        return Err(OrbitError::TooLarge(size - 1));
    }
    if mask == 0 || mask & !full_mask(size) != 0 || mask == full_mask(size) {
        return Err(OrbitError::BadSubset {
            subset: subset_label(mask),
            size,
        });
    }
    Ok(())
}

fn check_cap(what: &'static str, count: u128, cap: u128) -> Result<(), OrbitError> {
    if count > cap {
        return Err(TowerError::CapExceeded { what, count, cap }.into());
    }
    Ok(())
}

/// A maximal chain `A_1 < A_2 < ... < A_n` of nonempty proper subsets of
/// `[n + 1]`, with `|A_p| = p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetChain {
    n: usize,
    chain: Vec<u64>,
}

impl SubsetChain {
    /// Checks that the masks form a maximal chain in `[n + 1]`.
    pub fn new(n: usize, chain: Vec<u64>) -> Option<Self> {
        if chain.len() != n || n > 62 {
            return None;
        }
        let mut prev = 0u64;
        for (p, &a) in chain.iter().enumerate() {
            if a.count_ones() as usize != p + 1 || a & prev != prev || a & !full_mask(n + 1) != 0 {
                return None;
            }
            prev = a;
        }
        Some(SubsetChain { n, chain })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[u64] {
        &self.chain
    }
}

/// One maximal chain per stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiChain {
    pub chains: Vec<SubsetChain>,
}

/// `A_k` = the last `k` values of `w`, for `k = 1..n`.
pub fn chain_of_permutation(w: &Permutation) -> SubsetChain {
    let line = w.one_line();
    let n = line.len() - 1;
    let mut chain = Vec::with_capacity(n);
    let mut acc = 0u64;
    for k in 1..=n {
        acc |= 1 << (line[n + 1 - k] - 1);
        chain.push(acc);
    }
    SubsetChain { n, chain }
}

pub fn multichain_of_point(w: &FixedPoint) -> MultiChain {
    MultiChain {
        chains: w.perms.iter().map(chain_of_permutation).collect(),
    }
}

/// Ray of the permutohedral fan for a subset of `[n + 1]`.
pub fn permutohedral_ray(n: usize, mask: u64) -> Result<IntVector, OrbitError> {
    check_subset(mask, n + 1)?;
    let top = mask >> n & 1 == 1;
    let mut v = vec![BigInt::from(0); n];
    for (x, e) in v.iter_mut().enumerate() {
        let inside = mask >> x & 1 == 1;
        if !top && inside {
            *e = BigInt::from(1);
        } else if top && !inside {
            *e = BigInt::from(-1);
        }
    }
    Ok(IntVector::new(v))
}

/// The normal fan of the permutohedron in `R^n`: one ray per nonempty proper
/// subset of `[n + 1]` (ordered by bitmask) and one maximal cone per
/// permutation.
pub fn permutohedral_fan(n: usize, cap: u128) -> Result<Fan, OrbitError> {
    if n == 0 || n > 62 {
        return Err(OrbitError::TooLarge(n));
    }
    check_cap("rays", (1u128 << (n + 1)) - 2, cap)?;
    check_cap("maximal cones", fixed_point_count(&[n]), cap)?;
    let rays = (1..full_mask(n + 1))
        .map(|mask| permutohedral_ray(n, mask))
        .collect::<Result<Vec<_>, _>>()?;
    let cones = Permutation::all(n + 1)
        .map(|w| chain_of_permutation(&w).chain.iter().map(|&a| a as usize - 1).collect())
        .collect();
    Ok(Fan::from_trusted(n, rays, cones))
}

pub fn permutohedral_labels(n: usize) -> Vec<String> {
    (1..full_mask(n + 1))
        .map(|mask| format!("u_{}", subset_label(mask)))
        .collect()
}

/// Rays `u^j_k` of the generalized Bott fan: `e_{j,k}` for `k <= n_j`, and
/// column `j` of the Lambda matrix for `k = n_j + 1`.
pub fn gbt_ray(t: &GeneralizedBottTower, j: usize, k: usize) -> IntVector {
    let n = t.total_dim();
    if k <= t.n(j) {
        return IntVector::unit(n, t.coord(j, k));
    }
    let mut v = vec![BigInt::from(0); n];
    for kk in 1..=t.n(j) {
        v[t.coord(j, kk)] = BigInt::from(-1);
    }
    for jj in j + 1..=t.stages() {
        for kk in 1..=t.n(jj) {
            v[t.coord(jj, kk)] = t.a(jj, kk, j).clone();
        }
    }
    IntVector::new(v)
}

/// The fan of the generalized Bott manifold: all rays except one per stage
/// span a maximal cone.
pub fn gbt_fan(t: &GeneralizedBottTower, cap: u128) -> Result<Fan, OrbitError> {
    let count = t.dims().iter().map(|&n| n as u128 + 1).product();
    check_cap("maximal cones", count, cap)?;
    let mut rays = Vec::new();
    let mut offsets = Vec::new();
    for j in 1..=t.stages() {
        offsets.push(rays.len());
        for k in 1..=t.n(j) + 1 {
            rays.push(gbt_ray(t, j, k));
        }
    }
    let total = rays.len();
    let mut cones = Vec::with_capacity(count as usize);
    let mut skip = vec![0usize; t.stages()];
    loop {
        let dropped: Vec<usize> = skip.iter().zip(&offsets).map(|(s, o)| s + o).collect();
        cones.push((0..total).filter(|i| !dropped.contains(i)).collect());
        let mut pos = t.stages();
        loop {
            if pos == 0 {
                return Ok(Fan::from_trusted(t.total_dim(), rays, cones));
            }
            pos -= 1;
            skip[pos] += 1;
            if skip[pos] <= t.n(pos + 1) {
                break;
            }
            skip[pos] = 0;
        }
    }
}

pub fn gbt_labels(t: &GeneralizedBottTower) -> Vec<String> {
    let mut out = Vec::new();
    for j in 1..=t.stages() {
        for k in 1..=t.n(j) + 1 {
            out.push(format!("u^{j}_{{{k}}}"));
        }
    }
    out
}

/// `u^l_A`: the indicator of `A` in stage `l` when `n_l + 1` is not in `A`;
/// otherwise minus the indicator of the complement, plus `a^j_{k,l}` in
/// every later stage coordinate `(j, k)`.
pub fn orbit_ray(t: &GeneralizedBottTower, l: usize, mask: u64) -> Result<IntVector, OrbitError> {
    if l == 0 || l > t.stages() {
        return Err(OrbitError::StageOutOfRange {
            stage: l,
            m: t.stages(),
        });
    }
    let nl = t.n(l);
    check_subset(mask, nl + 1)?;
    let mut v = vec![BigInt::from(0); t.total_dim()];
    if mask >> nl & 1 == 0 {
        for x in 1..=nl {
            if mask >> (x - 1) & 1 == 1 {
                v[t.coord(l, x)] = BigInt::from(1);
            }
        }
    } else {
        for x in 1..=nl {
            if mask >> (x - 1) & 1 == 0 {
                v[t.coord(l, x)] = BigInt::from(-1);
            }
        }
        for j in l + 1..=t.stages() {
            for k in 1..=t.n(j) {
                v[t.coord(j, k)] = t.a(j, k, l).clone();
            }
        }
    }
    Ok(IntVector::new(v))
}

/// Index of ray `(l, mask)` in [`orbit_fan`]'s ray table.
pub fn orbit_ray_index(dims: &[usize], l: usize, mask: u64) -> usize {
    let offset: usize = dims[..l - 1].iter().map(|&n| (1usize << (n + 1)) - 2).sum();
    offset + mask as usize - 1
}

/// `(l, mask)` for every ray, in table order.
/// `(stage, subset bitmask)`.
pub type RayKey = (usize, u64);

pub fn orbit_ray_keys(dims: &[usize]) -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for (i, &n) in dims.iter().enumerate() {
        for mask in 1..full_mask(n + 1) {
            out.push((i + 1, mask));
        }
    }
    out
}

pub fn orbit_labels(dims: &[usize]) -> Vec<String> {
    orbit_ray_keys(dims)
        .into_iter()
        .map(|(l, mask)| format!("u^{l}_{}", subset_label(mask)))
        .collect()
}

fn check_dims_small(dims: &[usize]) -> Result<(), OrbitError> {
    match dims.iter().find(|&&n| n > 62) {
        Some(&n) => Err(OrbitError::TooLarge(n)),
        None => Ok(()),
    }
}

/// The fan of the generic orbit closure: rays `u^l_A` for every stage and
/// nonempty proper subset, and a maximal cone for every tuple of maximal
/// chains (equivalently, every fixed point).
pub fn orbit_fan(t: &GeneralizedBottTower, cap: u128) -> Result<Fan, OrbitError> {
    check_dims_small(t.dims())?;
    let count = fixed_point_count(t.dims());
    check_cap("maximal cones", count, cap)?;
    let rays = orbit_ray_keys(t.dims())
        .into_iter()
        .map(|(l, mask)| orbit_ray(t, l, mask))
        .collect::<Result<Vec<_>, _>>()?;
    let points = crate::tower::enumerate_fixed_points(t.dims(), cap)?;
    let cones = points.iter().map(|w| cone_of_point(t.dims(), w)).collect();
    Ok(Fan::from_trusted(t.total_dim(), rays, cones))
}

/// Ray indices of the maximal cone of the orbit fan indexed by `w`.
pub fn cone_of_point(dims: &[usize], w: &FixedPoint) -> Vec<usize> {
    let mut cone = Vec::with_capacity(dims.iter().sum());
    for (i, p) in w.perms.iter().enumerate() {
        for &a in chain_of_permutation(p).subsets() {
            cone.push(orbit_ray_index(dims, i + 1, a));
        }
    }
    cone
}

/// The stage-`l` piece of the orbit fan: its rays `u^l_A` in `R^n` with the
/// chain cones of `[n_l + 1]`. Joining these over all stages gives the orbit
/// fan.
pub fn lifted_block_fan(t: &GeneralizedBottTower, l: usize) -> Result<Fan, OrbitError> {
    let nl = t.n(l);
    let rays = (1..full_mask(nl + 1))
        .map(|mask| orbit_ray(t, l, mask))
        .collect::<Result<Vec<_>, _>>()?;
    let cones = Permutation::all(nl + 1)
        .map(|w| chain_of_permutation(&w).chain.iter().map(|&a| a as usize - 1).collect())
        .collect();
    Ok(Fan::from_trusted(t.total_dim(), rays, cones))
}

/// The orbit fan assembled as an iterated join of the lifted block fans.
pub fn orbit_fan_by_joins(t: &GeneralizedBottTower, cap: u128) -> Result<Fan, OrbitError> {
    check_dims_small(t.dims())?;
    check_cap("maximal cones", fixed_point_count(t.dims()), cap)?;
    let mut f = Fan::zero(t.total_dim());
    for l in 1..=t.stages() {
        f = join(&f, &lifted_block_fan(t, l)?)?;
    }
    Ok(f)
}

/// Blow-up centres in the order they are applied: stages ascending, then
/// `|A|` descending, then bitmask ascending. Subsets of size one are listed
/// even though they change nothing.
pub fn blowup_centers(dims: &[usize]) -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for (i, &n) in dims.iter().enumerate() {
        for size in (1..=n).rev() {
            for mask in 1..full_mask(n + 1) {
                if mask.count_ones() as usize == size {
                    out.push((i + 1, mask));
                }
            }
        }
    }
    out
}

/// Star-subdivides the generalized Bott fan along `Cone(u^l_x : x in A)` for
/// each centre in turn.
pub fn blowup_along(t: &GeneralizedBottTower, centers: &[(usize, u64)], cap: u128) -> Result<Fan, OrbitError> {
    check_dims_small(t.dims())?;
    check_cap("maximal cones", fixed_point_count(t.dims()), cap)?;
    let mut f = gbt_fan(t, cap)?;
    let mut index: HashMap<IntVector, usize> = f.rays().iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    for &(l, mask) in centers {
        check_subset(mask, t.n(l) + 1)?;
        let ids: Vec<usize> = subset_elements(mask)
            .into_iter()
            .map(|x| index[&gbt_ray(t, l, x)])
            .collect();
        let tau = ConeRef::new(ids);
        f = star_subdivide(&f, &tau)?;
        if tau.ray_indices.len() > 1 {
            let last = f.rays().len() - 1;
            index.insert(f.rays()[last].clone(), last);
        }
    }
    Ok(f)
}

/// Runs the blow-up pipeline and compares with [`orbit_fan`].
pub fn verify_blowup(t: &GeneralizedBottTower, cap: u128) -> Result<bool, OrbitError> {
    let blown = blowup_along(t, &blowup_centers(t.dims()), cap)?;
    Ok(fans_equal(&blown, &orbit_fan(t, cap)?))
}

/// Star-subdivides the fan of `CP^n` along every cone of its original
/// rays of dimension at least 2, largest first.
pub fn permutohedral_by_subdivision(n: usize) -> Result<Fan, OrbitError> {
    let mut f = projective_space_fan(n);
    for size in (2..=n).rev() {
        for mask in 1..full_mask(n + 1) {
            if mask.count_ones() as usize == size {
                let ids: Vec<usize> = subset_elements(mask).into_iter().map(|x| x - 1).collect();
                f = star_subdivide(&f, &ConeRef::new(ids))?;
            }
        }
    }
    Ok(f)
}

/// The vertex whose stage-`l` word lists the complement of `A` ascending and
/// then `A` ascending; every other stage is the identity. Its cone contains
/// the ray `u^l_A`.
pub fn canonical_vertex(dims: &[usize], l: usize, mask: u64) -> FixedPoint {
    let size = dims[l - 1] + 1;
    let mut word: Vec<usize> = (1..=size).filter(|x| mask >> (x - 1) & 1 == 0).collect();
    word.extend((1..=size).filter(|x| mask >> (x - 1) & 1 == 1));
    let mut w = FixedPoint::identity(dims);
    w.perms[l - 1] = Permutation::from_one_line(&word).expect("a rearrangement of 1..=size");
    w
}

/// Effective weights of the edges `v -> v * (i+1, i)`, stage-major: the rows
/// of the system whose inverse holds the rays of `v`'s cone.
fn adjacent_weight_matrix(f: &FlagBottTower, v: &FixedPoint) -> Result<IntMatrix, OrbitError> {
    let weights = tangential_weights(f, v, Basis::Effective)?;
    let mut rows = Vec::new();
    let mut idx = 0;
    for &n in f.dims() {
        // pairs (s, r) with s < r, s-major; (i, i+1) sits at a known offset
        for s in 1..=n + 1 {
            for r in s + 1..=n + 1 {
                if r == s + 1 {
                    rows.push(weights[idx].coords.clone());
                }
                idx += 1;
            }
        }
    }
    Ok(IntMatrix::from_rows(&rows).expect("weights share a dimension"))
}

/// Every ray of the cone at `v`, recovered from the weights at `v` of the
/// associated flag Bott tower: the ray `u^l_A` with `A` the last `k` values
/// of `v_l` is the column of the inverse weight matrix belonging to the edge
/// that swaps positions `n_l + 1 - k` and `n_l + 2 - k` of `v_l`.
pub fn rays_at_vertex(
    t: &GeneralizedBottTower,
    f: &FlagBottTower,
    v: &FixedPoint,
) -> Result<Vec<(RayKey, IntVector)>, OrbitError> {
    v.check_dims(t.dims())?;
    let m = adjacent_weight_matrix(f, v)?;
    let inv = inverse_rational(&m)
        .expect("square")
        .ok_or_else(|| OrbitError::Singular(v.label()))?;
    let mut out = Vec::with_capacity(t.total_dim());
    for l in 1..=t.stages() {
        let chain = chain_of_permutation(v.block(l));
        let nl = t.n(l);
        for k in 1..=nl {
            let d = nl + 1 - k;
            let col: Vec<_> = inv.iter().map(|row| row[t.coord(l, d)].clone()).collect();
            let u = integral(&col).ok_or_else(|| OrbitError::NonIntegral(v.label()))?;
            out.push(((l, chain.subsets()[k - 1]), u));
        }
    }
    Ok(out)
}

/// Solves `<alpha(e), u> = 1` for the edge `e` leaving the cone across the
/// facet opposite `u^l_A`, and `0` for the other edges swapping adjacent
/// positions, at vertex `v`. The weights are those of the associated flag
/// Bott tower in the effective basis.
pub fn solve_ray_from_axials(
    t: &GeneralizedBottTower,
    l: usize,
    mask: u64,
    v: &FixedPoint,
) -> Result<IntVector, OrbitError> {
    if l == 0 || l > t.stages() {
        return Err(OrbitError::StageOutOfRange {
            stage: l,
            m: t.stages(),
        });
    }
    check_subset(mask, t.n(l) + 1)?;
    v.check_dims(t.dims())?;
    let k = mask.count_ones() as usize;
    if chain_of_permutation(v.block(l)).subsets()[k - 1] != mask {
        return Err(OrbitError::NotInCone {
            vertex: v.label(),
            stage: l,
            subset: subset_label(mask),
        });
    }
    let f = associate(t);
    let m = adjacent_weight_matrix(&f, v)?;
    let rhs = IntVector::unit(t.total_dim(), t.coord(l, t.n(l) + 1 - k));
    let sol = crate::lattice::solve_rational(&m, &rhs)
        .expect("square")
        .ok_or_else(|| OrbitError::Singular(v.label()))?;
    integral(&sol).ok_or_else(|| OrbitError::NonIntegral(v.label()))
}

/// Outcome of checking every ray of every maximal cone against its closed
/// form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RayCheck {
    pub vertices: usize,
    pub pairs: usize,
    pub mismatches: Vec<String>,
}

/// For every fixed point, recovers the rays of its cone from the weights and
/// compares them with [`orbit_ray`].
pub fn check_rays_from_axials(t: &GeneralizedBottTower, cap: u128) -> Result<RayCheck, OrbitError> {
    check_dims_small(t.dims())?;
    let points = crate::tower::enumerate_fixed_points(t.dims(), cap)?;
    let f = associate(t);
    let expected: HashMap<(usize, u64), IntVector> = orbit_ray_keys(t.dims())
        .into_iter()
        .map(|(l, mask)| orbit_ray(t, l, mask).map(|u| ((l, mask), u)))
        .collect::<Result<_, _>>()?;
    let per_point: Vec<Result<Vec<String>, OrbitError>> = points
        .par_iter()
        .map(|v| {
            let found = rays_at_vertex(t, &f, v)?;
            Ok(found
                .into_iter()
                .filter(|(key, u)| expected[key] != *u)
                .map(|((l, mask), u)| {
                    format!(
                        "vertex {}: u^{l}_{} recovered as {u}, expected {}",
                        v.label(),
                        subset_label(mask),
                        expected[&(l, mask)]
                    )
                })
                .collect())
        })
        .collect();
    let mut check = RayCheck {
        vertices: points.len(),
        pairs: points.len() * t.total_dim(),
        mismatches: Vec::new(),
    };
    for r in per_point {
        check.mismatches.extend(r?);
    }
    Ok(check)
}
