//! Cross-checks against small independent computations done here in plain
//! machine integers.

use flagbott::fan::{check_fan, check_unimodular, Fan};
use flagbott::gkm::{build_gkm_graph, tangential_weights, Basis};
use flagbott::io::{fan_to_json, generalized_tower_to_json, gkm_from_json, gkm_to_json, parse_fan, parse_tower};
use flagbott::io::{flag_tower_to_json, TowerInput};
use flagbott::orbit::{gbt_fan, orbit_fan, orbit_ray, permutohedral_fan, subset_from_elements};
use flagbott::tower::{FixedPoint, FlagBottTower, GeneralizedBottTower, DEFAULT_CAP};
use flagbott::verify::{random_flag_tower, random_generalized_tower};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_i128(f: &Fan) -> Vec<Vec<i128>> {
    f.rays()
        .iter()
        .map(|r| r.entries().iter().map(|x| i128::try_from(x).unwrap()).collect())
        .collect()
}

// Bareiss elimination; exact for the small matrices used here.
fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn column_matrix(cols: &[&Vec<i128>]) -> Vec<Vec<i128>> {
    let n = cols.len();
    (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect()
}

/// Number of maximal cones whose interior contains `p`, or `None` when `p`
/// sits on a wall of some cone.
fn locate(f: &Fan, rays: &[Vec<i128>], p: &[i128]) -> Option<usize> {
    let mut hits = 0;
    for cone in f.max_cones() {
        let cols: Vec<&Vec<i128>> = cone.iter().map(|&i| &rays[i]).collect();
        let d = det(column_matrix(&cols));
        assert_ne!(d, 0);
        let coeffs: Vec<i128> = (0..cols.len())
            .map(|i| {
                let mut cs = cols.clone();
                let pv = p.to_vec();
                cs[i] = &pv;
                det(column_matrix(&cs)) * d.signum()
            })
            .collect();
        if coeffs.iter().all(|&c| c > 0) {
            hits += 1;
        } else if coeffs.iter().all(|&c| c >= 0) {
            return None;
        }
    }
    Some(hits)
}

fn assert_complete_simplicial(f: &Fan, rng: &mut impl Rng, samples: usize) {
    let rays = to_i128(f);
    let mut seen = 0;
    while seen < samples {
        let p: Vec<i128> = (0..f.dim()).map(|_| rng.gen_range(-997..=997)).collect();
        if let Some(h) = locate(f, &rays, &p) {
            assert_eq!(h, 1, "point {p:?} lies in {h} cones");
            seen += 1;
        }
    }
}

fn all_unimodular(f: &Fan) -> bool {
    let rays = to_i128(f);
    f.max_cones().iter().all(|cone| {
        let cols: Vec<&Vec<i128>> = cone.iter().map(|&i| &rays[i]).collect();
        det(column_matrix(&cols)).abs() == 1
    })
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn two_stage_orbit_fan_every_cone_unimodular() {
    let t = GeneralizedBottTower::from_i64s(vec![2, 1], &[((2, 1), &[1])]).unwrap();
    let f = orbit_fan(&t, DEFAULT_CAP).unwrap();
    assert_eq!(f.max_cones().len(), 12);
    assert!(all_unimodular(&f));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert_complete_simplicial(&f, &mut rng, 300);
}

#[test]
fn gbt_fan_three_stage() {
    let t = GeneralizedBottTower::constant(vec![2, 1, 2], 1).unwrap();
    let f = gbt_fan(&t, DEFAULT_CAP).unwrap();
    assert_eq!(f.max_cones().len(), 3 * 2 * 3);
    assert!(all_unimodular(&f));
    assert!(check_fan(&f, true).is_clean());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    assert_complete_simplicial(&f, &mut rng, 300);
}

#[test]
fn permutohedral_counts_and_completeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let f = permutohedral_fan(n, DEFAULT_CAP).unwrap();
        assert_eq!(f.rays().len(), (1 << (n + 1)) - 2);
        assert_eq!(f.max_cones().len(), factorial(n + 1));
        assert!(all_unimodular(&f));
        assert_complete_simplicial(&f, &mut rng, 100);
    }
    assert!(check_fan(&permutohedral_fan(2, DEFAULT_CAP).unwrap(), true).is_clean());
}

#[test]
fn random_orbit_fans_are_smooth_and_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..12 {
        let t = random_generalized_tower(&mut rng, 3, 2, 3);
        let f = orbit_fan(&t, DEFAULT_CAP).unwrap();
        let expected: usize = t.dims().iter().map(|&n| factorial(n + 1)).product();
        assert_eq!(f.max_cones().len(), expected);
        assert!(all_unimodular(&f));
        assert!(check_unimodular(&f).unwrap());
        assert_complete_simplicial(&f, &mut rng, 60);
    }
}

#[test]
fn orbit_rays_of_complements_cancel_on_trivial_tower() {
    // no later-stage shift when every twisting vector is zero
    let t = GeneralizedBottTower::constant(vec![3, 2], 0).unwrap();
    for mask in 1u64..(1 << 4) - 1 {
        let comp = ((1 << 4) - 1) ^ mask;
        let a = orbit_ray(&t, 1, mask).unwrap();
        let b = orbit_ray(&t, 1, comp).unwrap();
        let sum: Vec<i64> = a
            .to_i64s()
            .unwrap()
            .iter()
            .zip(b.to_i64s().unwrap())
            .map(|(x, y)| x + y)
            .collect();
        assert!(sum.iter().all(|&x| x == 0), "{mask:b}");
    }
    let r = orbit_ray(&t, 2, subset_from_elements(&[1, 3])).unwrap();
    assert_eq!(r.to_i64s().unwrap(), vec![0, 0, 0, 0, -1]);
}

#[test]
fn trivial_tower_weights_are_root_differences() {
    // With all twisting matrices zero the manifold is a product of full
    // flag manifolds; the weight for the transposition (r, s) at w in block
    // j is e_{w(r)} - e_{w(s)} in that block.
    let t = FlagBottTower::trivial(vec![2, 1]).unwrap();
    let w = FixedPoint::from_one_line(&[&[2, 3, 1], &[2, 1]]).unwrap();
    let ws = tangential_weights(&t, &w, Basis::Full).unwrap();
    let got: Vec<Vec<i64>> = ws.iter().map(|x| x.coords.to_i64s().unwrap()).collect();
    let blocks: [&[usize]; 2] = [&[2, 3, 1], &[2, 1]];
    let offsets = [0, 3];
    let mut expected = Vec::new();
    for (b, word) in blocks.iter().enumerate() {
        for s in 0..word.len() {
            for r in s + 1..word.len() {
                let mut v = vec![0i64; 5];
                v[offsets[b] + word[r] - 1] += 1;
                v[offsets[b] + word[s] - 1] -= 1;
                expected.push(v);
            }
        }
    }
    assert_eq!(got, expected);
}

#[test]
fn gkm_vertex_and_edge_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let t = random_flag_tower(&mut rng, 3, 2, 2);
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        let verts: usize = t.dims().iter().map(|&n| factorial(n + 1)).product();
        let deg: usize = t.dims().iter().map(|&n| n * (n + 1) / 2).sum();
        assert_eq!(g.vertices().len(), verts);
        assert_eq!(g.edges().len(), verts * deg);
        assert!(g.violations().is_empty());
    }
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let t = random_generalized_tower(&mut rng, 3, 3, 5);
        let back = parse_tower(&generalized_tower_to_json(&t)).unwrap();
        assert_eq!(back, TowerInput::Generalized(t.clone()));

        let ft = random_flag_tower(&mut rng, 3, 2, 5);
        let back = parse_tower(&flag_tower_to_json(&ft)).unwrap();
        assert_eq!(back, TowerInput::Flag(ft.clone()));

        let f = orbit_fan(&t, DEFAULT_CAP).unwrap();
        let ff = parse_fan(&fan_to_json(&f, None)).unwrap();
        assert_eq!(ff.fan, f);

        let g = build_gkm_graph(&ft, Basis::Full, DEFAULT_CAP).unwrap();
        let text = gkm_to_json(&g);
        let g2 = gkm_from_json(&text).unwrap();
        assert_eq!(gkm_to_json(&g2), text);
        assert_eq!(g2.edges().len(), g.edges().len());
    }
}
