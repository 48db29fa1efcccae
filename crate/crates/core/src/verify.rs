//! Seeded random towers and fans, and the join/star commutation check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::fan::{fans_equal, join, projective_space_fan, star_subdivide, ConeRef, Fan, FanError};
use crate::lattice::{IntMatrix, IntVector};
use crate::tower::{FlagBottTower, GeneralizedBottTower};

fn random_dims(rng: &mut impl Rng, max_m: usize, max_n: usize) -> Vec<usize> {
    let m = rng.gen_range(1..=max_m);
    (0..m).map(|_| rng.gen_range(1..=max_n)).collect()
}

/// A flag Bott tower with `m <= max_m` stages, `n_j <= max_n`, and entries in
/// `[-bound, bound]`.
pub fn random_flag_tower(rng: &mut impl Rng, max_m: usize, max_n: usize, bound: i64) -> FlagBottTower {
    let dims = random_dims(rng, max_m, max_n);
    let mut mats = BTreeMap::new();
    for j in 1..=dims.len() {
        for l in 1..j {
            let (rows, cols) = (dims[j - 1] + 1, dims[l - 1] + 1);
            let data = (0..rows * cols)
                .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
                .collect();
            mats.insert((j, l), IntMatrix::new(rows, cols, data).unwrap());
        }
    }
    FlagBottTower::new(dims, mats).unwrap()
}

/// A generalized Bott tower with `m <= max_m` stages, `n_j <= max_n`, and
/// entries in `[-bound, bound]`.
pub fn random_generalized_tower(rng: &mut impl Rng, max_m: usize, max_n: usize, bound: i64) -> GeneralizedBottTower {
    let dims = random_dims(rng, max_m, max_n);
    let mut vecs = BTreeMap::new();
    for j in 1..=dims.len() {
        for l in 1..j {
            let v: Vec<i64> = (0..dims[j - 1]).map(|_| rng.gen_range(-bound..=bound)).collect();
            vecs.insert((j, l), IntVector::from_i64s(&v));
        }
    }
    GeneralizedBottTower::new(dims, vecs).unwrap()
}

/// `u -> (u, L u)`, putting a fan in `R^d1` into `R^(d1 + d2)`. The image is
/// a lifting: projecting away the last `d2` coordinates gives back the fan.
pub fn lift(f: &Fan, shear: &IntMatrix) -> Fan {
    assert_eq!(shear.cols(), f.dim());
    let rays = f
        .rays()
        .iter()
        .map(|u| {
            let mut e = u.entries().to_vec();
            for r in 0..shear.rows() {
                e.push(shear.row(r).dot(u));
            }
            IntVector::new(e)
        })
        .collect();
    Fan::new(f.dim() + shear.rows(), rays, f.max_cones().to_vec())
        .expect("a lifting keeps rays primitive and independent")
}

/// `v -> (0, v)`.
pub fn pad_front(f: &Fan, zeros: usize) -> Fan {
    let rays = f
        .rays()
        .iter()
        .map(|v| {
            let mut e = vec![BigInt::from(0); zeros];
            e.extend(v.entries().iter().cloned());
            IntVector::new(e)
        })
        .collect();
    Fan::new(f.dim() + zeros, rays, f.max_cones().to_vec()).expect("padding keeps rays primitive and independent")
}

/// Product of two fans, living in the direct sum.
pub fn product(a: &Fan, b: &Fan) -> Fan {
    let lifted = lift(a, &IntMatrix::zeros(b.dim(), a.dim()));
    join(&lifted, &pad_front(b, a.dim())).expect("product cones are independent")
}

/// A random complete smooth fan in `R^dim`: a product of projective-space
/// fans, star-subdivided a few times along random cones.
pub fn random_complete_fan(rng: &mut impl Rng, dim: usize, subdivisions: usize) -> Fan {
    if dim == 0 {
        return Fan::zero(0);
    }
    let mut left = dim;
    let mut f: Option<Fan> = None;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        let p = projective_space_fan(k);
        f = Some(match f {
            None => p,
            Some(g) => product(&g, &p),
        });
        left -= k;
    }
    let mut f = f.unwrap();
    for _ in 0..subdivisions {
        let tau = random_face(rng, &f, 2);
        f = star_subdivide(&f, &tau).expect("faces of maximal cones are cones");
    }
    f
}

/// A random face with at least `min` rays (when the cone allows) of a random
/// maximal cone.
pub fn random_face(rng: &mut impl Rng, f: &Fan, min: usize) -> ConeRef {
    let cone = f.max_cones().choose(rng).expect("a fan has a maximal cone").clone();
    let lo = min.min(cone.len()).max(1);
    let size = rng.gen_range(lo..=cone.len());
    let mut picked: Vec<usize> = cone.choose_multiple(rng, size).copied().collect();
    picked.sort_unstable();
    ConeRef::new(picked)
}

/// Inputs for the join/star commutation: `f1` a lifting of a complete fan,
/// `f2` a fan in the remaining coordinates, `tau` a cone of `f1`.
#[derive(Debug, Clone)]
pub struct JoinStarCase {
    pub f1: Fan,
    pub f2: Fan,
    pub tau: ConeRef,
}

/// Total dimension at most `max_dim` (and at least 1).
pub fn random_join_star_case(rng: &mut impl Rng, max_dim: usize) -> JoinStarCase {
    let total = rng.gen_range(1..=max_dim);
    let d1 = rng.gen_range(1..=total);
    let d2 = total - d1;
    let steps = rng.gen_range(0..=2);
    let base = random_complete_fan(rng, d1, steps);
    let data = (0..d1 * d2).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
    let f1 = lift(&base, &IntMatrix::new(d2, d1, data).unwrap());
    let f2 = if d2 == 0 {
        Fan::zero(total)
    } else {
        let steps = rng.gen_range(0..=2);
        pad_front(&random_complete_fan(rng, d2, steps), d1)
    };
    let tau = random_face(rng, &f1, 1);
    JoinStarCase { f1, f2, tau }
}

/// `join(star(f1, tau), f2) == star(join(f1, f2), tau)`. Rays of `f1` keep
/// their indices in the join, so `tau` names the same cone on both sides.
pub fn check_join_star(case: &JoinStarCase) -> Result<bool, FanError> {
    let left = join(&star_subdivide(&case.f1, &case.tau)?, &case.f2)?;
    let right = star_subdivide(&join(&case.f1, &case.f2)?, &case.tau)?;
    Ok(fans_equal(&left, &right))
}
