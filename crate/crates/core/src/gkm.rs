//! Tangent weights at fixed points, GKM graphs of flag Bott manifolds, and
//! connections on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{integer_multiple, mat_mul, pairwise_independent, IntMatrix, IntVector};
use crate::tower::{enumerate_fixed_points, FixedPoint, FlagBottTower, TowerError};

/// Coordinates for weights. `Full` uses `e_{j,k}` for all `k <= n_j + 1`;
/// `Effective` drops each `e_{j,n_j+1}`, which is what remains after
/// quotienting by the subtorus acting trivially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Full,
    Effective,
}

impl Basis {
    pub fn dim(self, dims: &[usize]) -> usize {
        match self {
            Basis::Full => dims.iter().map(|n| n + 1).sum(),
            Basis::Effective => dims.iter().sum(),
        }
    }

    /// Zero-based coordinate of `e_{j,k}`, or `None` if the basis omits it.
    pub fn coord(self, dims: &[usize], j: usize, k: usize) -> Option<usize> {
        match self {
            Basis::Full => Some(dims[..j - 1].iter().map(|n| n + 1).sum::<usize>() + k - 1),
            Basis::Effective => (k <= dims[j - 1]).then(|| dims[..j - 1].iter().sum::<usize>() + k - 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Full => "full",
            Basis::Effective => "effective",
        }
    }
}

/// Drops the coordinates `(j, n_j + 1)` from a full-basis vector.
pub fn to_effective(dims: &[usize], full: &IntVector) -> IntVector {
    let mut drop = vec![false; Basis::Full.dim(dims)];
    for j in 1..=dims.len() {
        drop[Basis::Full.coord(dims, j, dims[j - 1] + 1).unwrap()] = true;
    }
    full.select(|i| !drop[i])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub coords: IntVector,
    pub basis: Basis,
}

impl WeightVector {
    pub fn new(coords: IntVector, basis: Basis) -> Self {
        WeightVector { coords, basis }
    }

    pub fn fits(&self, dims: &[usize]) -> bool {
        self.coords.dim() == self.basis.dim(dims)
    }

    /// The vector as a sum of basis symbols, e.g. `e1,1 - 2e1,2 + e2,1`.
    pub fn pretty(&self, dims: &[usize]) -> String {
        let mut names = Vec::new();
        for (j, &n) in dims.iter().enumerate() {
            let top = if self.basis == Basis::Full { n + 1 } else { n };
            for k in 1..=top {
                names.push(format!("e{},{}", j + 1, k));
            }
        }
        let mut out = String::new();
        for (x, name) in self.coords.entries().iter().zip(&names) {
            let sign = x.sign();
            if sign == num_bigint::Sign::NoSign {
                continue;
            }
            let mag = x.magnitude();
            let neg = sign == num_bigint::Sign::Minus;
            if out.is_empty() {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if *mag != 1u32.into() {
                let _ = write!(out, "{mag}");
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkmError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("index out of range: need 1 <= l < j <= {m}, got j={j}, l={l}")]
    IndexOutOfRange { j: usize, l: usize, m: usize },
    #[error("edge {edge}: {reason}")]
    BadEdge { edge: usize, reason: String },
    #[error("vertex {vertex} has degree {degree}, above the search bound {bound}")]
    DegreeBound { vertex: usize, degree: usize, bound: usize },
    #[error("no connection: edge {edge} admits no compatible bijection")]
    NoConnection { edge: usize },
    #[error("edge {edge} has no reverse edge")]
    MissingReverse { edge: usize },
}

/// The row matrix `B` of `w`: row `k` has its 1 in column `w(k)`.
fn b_matrix(w: &crate::lattice::Permutation) -> IntMatrix {
    w.to_row_matrix()
}

/// All `X(j,l)` at one fixed point, keyed `(j, l)`.
///
/// Filled stage by stage with `l` descending, using
/// `X(j,l) = (sum_{l<p<j} X(j,p) A(p,l) + B_j A(j,l)) B_l`.
pub fn x_matrices(t: &FlagBottTower, w: &FixedPoint) -> Result<BTreeMap<(usize, usize), IntMatrix>, GkmError> {
    w.check_dims(t.dims())?;
    let m = t.stages();
    let b: Vec<IntMatrix> = w.perms.iter().map(b_matrix).collect();
    let mut x = BTreeMap::new();
    for j in 2..=m {
        for l in (1..j).rev() {
            let mut acc = mat_mul(&b[j - 1], t.matrix(j, l)).expect("tower shapes are validated");
            for p in l + 1..j {
                let term = mat_mul(&x[&(j, p)], t.matrix(p, l)).expect("tower shapes are validated");
                acc = acc.add(&term).expect("tower shapes are validated");
            }
            x.insert((j, l), mat_mul(&acc, &b[l - 1]).expect("tower shapes are validated"));
        }
    }
    Ok(x)
}

/// `X(j,l)` at `w`.
pub fn compute_x(t: &FlagBottTower, w: &FixedPoint, j: usize, l: usize) -> Result<IntMatrix, GkmError> {
    let m = t.stages();
    if !(1 <= l && l < j && j <= m) {
        return Err(GkmError::IndexOutOfRange { j, l, m });
    }
    w.check_dims(t.dims())?;
    // only stages up to j are needed
    let mut x = x_matrices(t, w)?;
    Ok(x.remove(&(j, l)).unwrap())
}

/// Rows `rho(j)_1 .. rho(j)_{n_j+1}` of `[X(j,1) ... X(j,j-1) B_j 0 ... 0]`
/// in the full basis, one list per stage.
pub(crate) fn block_rows(t: &FlagBottTower, w: &FixedPoint) -> Result<Vec<Vec<IntVector>>, GkmError> {
    let x = x_matrices(t, w)?;
    let dims = t.dims();
    let full = Basis::Full.dim(dims);
    let mut out = Vec::with_capacity(dims.len());
    for j in 1..=dims.len() {
        let size = dims[j - 1] + 1;
        let mut rows = Vec::with_capacity(size);
        for k in 0..size {
            let mut v = vec![BigInt::from(0); full];
            for l in 1..j {
                let start = Basis::Full.coord(dims, l, 1).unwrap();
                for (c, e) in x[&(j, l)].row_slice(k).iter().enumerate() {
                    v[start + c] = e.clone();
                }
            }
            let own = Basis::Full.coord(dims, j, w.block(j).image(k + 1)).unwrap();
            v[own] = BigInt::from(1);
            rows.push(IntVector::new(v));
        }
        out.push(rows);
    }
    Ok(out)
}

/// `(j, r, s)` triples with `s < r`, stage-major, then `s`, then `r`.
fn transpositions(dims: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (j, &n) in dims.iter().enumerate() {
        for s in 1..=n + 1 {
            for r in s + 1..=n + 1 {
                out.push((j + 1, r, s));
            }
        }
    }
    out
}

/// Tangent weights at `w`: `rho(j)_r - rho(j)_s` for every stage `j` and
/// every `s < r`, in the order of [`transpositions`].
pub fn tangential_weights(t: &FlagBottTower, w: &FixedPoint, basis: Basis) -> Result<Vec<WeightVector>, GkmError> {
    let rows = block_rows(t, w)?;
    Ok(transpositions(t.dims())
        .into_iter()
        .map(|(j, r, s)| {
            let full = &rows[j - 1][r - 1] - &rows[j - 1][s - 1];
            let coords = match basis {
                Basis::Full => full,
                Basis::Effective => to_effective(t.dims(), &full),
            };
            WeightVector::new(coords, basis)
        })
        .collect())
}

/// A directed edge `w -> w * (r, s)` changing only stage `block`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmEdge {
    pub source: usize,
    pub target: usize,
    pub block: usize,
    pub r: usize,
    pub s: usize,
    pub label: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmGraph {
    dims: Vec<usize>,
    basis: Basis,
    vertices: Vec<FixedPoint>,
    edges: Vec<GkmEdge>,
    out: Vec<Vec<usize>>,
    reverse: Vec<Option<usize>>,
}

impl GkmGraph {
    /// Assembles a graph from explicit parts. Indices and label dimensions are
    /// checked; the GKM conditions themselves are not (see [`Self::violations`]).
    pub fn from_parts(
        dims: Vec<usize>,
        basis: Basis,
        vertices: Vec<FixedPoint>,
        edges: Vec<GkmEdge>,
    ) -> Result<Self, GkmError> {
        for v in &vertices {
            v.check_dims(&dims)?;
        }
        let mut out = vec![Vec::new(); vertices.len()];
        let mut index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.source >= vertices.len() || e.target >= vertices.len() {
                return Err(GkmError::BadEdge {
                    edge: i,
                    reason: "endpoint out of range".into(),
                });
            }
            if e.label.basis != basis || !e.label.fits(&dims) {
                return Err(GkmError::BadEdge {
                    edge: i,
                    reason: "label does not fit the graph's basis".into(),
                });
            }
            out[e.source].push(i);
            index.insert((e.source, e.target, e.block, e.r, e.s), i);
        }
        let reverse = edges
            .iter()
            .map(|e| index.get(&(e.target, e.source, e.block, e.r, e.s)).copied())
            .collect();
        Ok(GkmGraph {
            dims,
            basis,
            vertices,
            edges,
            out,
            reverse,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn vertices(&self) -> &[FixedPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GkmEdge] {
        &self.edges
    }

    /// Indices of the edges leaving vertex `v`, in insertion order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn reverse_of(&self, e: usize) -> Option<usize> {
        self.reverse[e]
    }

    /// `sum n_j (n_j + 1) / 2`.
    pub fn expected_degree(&self) -> usize {
        self.dims.iter().map(|n| n * (n + 1) / 2).sum()
    }

    /// Edges `source < target`, one per undirected edge.
    pub fn undirected_edges(&self) -> impl Iterator<Item = &GkmEdge> {
        self.edges.iter().filter(|e| e.source < e.target)
    }

    /// Human-readable list of every broken GKM graph invariant: regularity,
    /// targets matching the transposition, and antisymmetric labels.
    pub fn violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let d = self.expected_degree();
        for (v, out) in self.out.iter().enumerate() {
            if out.len() != d {
                bad.push(format!(
                    "vertex {} has degree {}, expected {d}",
                    self.vertices[v].label(),
                    out.len()
                ));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !(e.block >= 1 && e.block <= self.dims.len() && e.s < e.r && e.r <= self.dims[e.block - 1] + 1) {
                bad.push(format!(
                    "edge {i} has invalid transposition ({},{}) in block {}",
                    e.r, e.s, e.block
                ));
                continue;
            }
            let expected = self.vertices[e.source].swap_in_block(e.block, e.r, e.s);
            if self.vertices[e.target] != expected {
                bad.push(format!("edge {i} target is not source * ({},{})", e.r, e.s));
            }
            match self.reverse[i] {
                None => bad.push(format!("edge {i} has no reverse")),
                Some(k) => {
                    if self.edges[k].label.coords != -&e.label.coords {
                        bad.push(format!("edge {i} label is not the negated reverse label"));
                    }
                }
            }
        }
        bad
    }
}

/// The GKM graph of `t`: all fixed points, and for every fixed point `w`,
/// stage `j` and `s < r`, an edge `w -> w * (r, s)` labelled
/// `rho(j)_r - rho(j)_s` at `w`.
pub fn build_gkm_graph(t: &FlagBottTower, basis: Basis, cap: u128) -> Result<GkmGraph, GkmError> {
    let vertices = enumerate_fixed_points(t.dims(), cap)?;
    let index: HashMap<&FixedPoint, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let moves = transpositions(t.dims());
    let per_vertex: Vec<Vec<GkmEdge>> = vertices
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let weights = tangential_weights(t, w, basis).expect("fixed point matches the tower");
            moves
                .iter()
                .zip(weights)
                .map(|(&(block, r, s), label)| GkmEdge {
                    source: i,
                    target: index[&w.swap_in_block(block, r, s)],
                    block,
                    r,
                    s,
                    label,
                })
                .collect()
        })
        .collect();
    GkmGraph::from_parts(
        t.dims().to_vec(),
        basis,
        vertices,
        per_vertex.into_iter().flatten().collect(),
    )
}

/// Whether the labels of the edges leaving each vertex are pairwise linearly
/// independent.
pub fn check_pairwise_independence(g: &GkmGraph) -> bool {
    (0..g.vertices().len()).into_par_iter().all(|v| {
        let out = g.out_edges(v);
        out.iter().enumerate().all(|(i, &a)| {
            out[i + 1..]
                .iter()
                .all(|&b| pairwise_independent(&g.edges()[a].label.coords, &g.edges()[b].label.coords))
        })
    })
}

/// For each directed edge `e: p -> q`, a bijection from the edges at `p` to
/// the edges at `q`. `maps[e]` lists, for each edge in `out_edges(p)` order,
/// its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    maps: Vec<Vec<usize>>,
}

impl Connection {
    /// Image of `e2` (an edge leaving the source of `e`) under `theta_e`.
    pub fn apply(&self, g: &GkmGraph, e: usize, e2: usize) -> Option<usize> {
        let pos = g.out_edges(g.edges()[e].source).iter().position(|&x| x == e2)?;
        Some(self.maps[e][pos])
    }

    pub fn map_of(&self, e: usize) -> &[usize] {
        &self.maps[e]
    }
}

pub const DEFAULT_DEGREE_BOUND: usize = 8;

fn compatible(g: &GkmGraph, e: usize, from: usize, to: usize) -> bool {
    let diff = &g.edges()[to].label.coords - &g.edges()[from].label.coords;
    diff.is_zero() || integer_multiple(&diff, &g.edges()[e].label.coords).is_some()
}

fn match_edges(g: &GkmGraph, e: usize, rev: usize) -> Option<Vec<usize>> {
    let from = g.out_edges(g.edges()[e].source);
    let to = g.out_edges(g.edges()[e].target);
    if from.len() != to.len() {
        return None;
    }
    let options: Vec<Vec<usize>> = from
        .iter()
        .map(|&a| {
            if a == e {
                vec![rev]
            } else {
                to.iter()
                    .copied()
                    .filter(|&b| b != rev && compatible(g, e, a, b))
                    .collect()
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..from.len()).collect();
    order.sort_by_key(|&i| options[i].len());
    let mut chosen = vec![usize::MAX; from.len()];
    let mut used = vec![false; to.len()];
    let pos_in_to: HashMap<usize, usize> = to.iter().enumerate().map(|(i, &b)| (b, i)).collect();

    fn search(
        depth: usize,
        order: &[usize],
        options: &[Vec<usize>],
        pos_in_to: &HashMap<usize, usize>,
        chosen: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&i) = order.get(depth) else {
            return true;
        };
        for &b in &options[i] {
            let p = pos_in_to[&b];
            if used[p] {
                continue;
            }
            used[p] = true;
            chosen[i] = b;
            if search(depth + 1, order, options, pos_in_to, chosen, used) {
                return true;
            }
            used[p] = false;
        }
        false
    }

    search(0, &order, &options, &pos_in_to, &mut chosen, &mut used).then_some(chosen)
}

/// Searches for a connection edge by edge. Each undirected edge is matched
/// once; the reverse orientation gets the inverse bijection.
pub fn find_connection(g: &GkmGraph, degree_bound: usize) -> Result<Connection, GkmError> {
    for v in 0..g.vertices().len() {
        let degree = g.out_edges(v).len();
        if degree > degree_bound {
            return Err(GkmError::DegreeBound {
                vertex: v,
                degree,
                bound: degree_bound,
            });
        }
    }
    let mut maps = vec![Vec::new(); g.edges().len()];
    let forward: Vec<(usize, usize)> = (0..g.edges().len())
        .filter(|&e| g.edges()[e].source < g.edges()[e].target || g.edges()[e].source == g.edges()[e].target)
        .map(|e| {
            g.reverse_of(e)
                .map(|r| (e, r))
                .ok_or(GkmError::MissingReverse { edge: e })
        })
        .collect::<Result<_, _>>()?;
    let found: Vec<(usize, usize, Vec<usize>)> = forward
        .par_iter()
        .map(|&(e, r)| {
            match_edges(g, e, r)
                .map(|m| (e, r, m))
                .ok_or(GkmError::NoConnection { edge: e })
        })
        .collect::<Result<_, _>>()?;
    for (e, r, map) in found {
        let from = g.out_edges(g.edges()[e].source);
        let to = g.out_edges(g.edges()[e].target);
        let mut inverse = vec![usize::MAX; to.len()];
        for (i, &img) in map.iter().enumerate() {
            let p = to.iter().position(|&b| b == img).unwrap();
            inverse[p] = from[i];
        }
        maps[e] = map;
        maps[r] = inverse;
    }
    Ok(Connection { maps })
}

/// Checks the three connection axioms directly.
pub fn verify_connection(g: &GkmGraph, c: &Connection) -> Result<(), String> {
    for (e, edge) in g.edges().iter().enumerate() {
        let from = g.out_edges(edge.source);
        let to = g.out_edges(edge.target);
        let map = c.map_of(e);
        if map.len() != from.len() {
            return Err(format!("theta_{e} has the wrong size"));
        }
        let mut seen: Vec<usize> = map.to_vec();
        seen.sort_unstable();
        let mut want = to.to_vec();
        want.sort_unstable();
        if seen != want {
            return Err(format!("theta_{e} is not a bijection onto the edges at the target"));
        }
        let rev = g.reverse_of(e).ok_or(format!("edge {e} has no reverse"))?;
        for (i, &a) in from.iter().enumerate() {
            let b = map[i];
            if a == e && b != rev {
                return Err(format!("theta_{e} does not send {e} to its reverse"));
            }
            if c.apply(g, rev, b) != Some(a) {
                return Err(format!("theta of the reverse of {e} is not the inverse"));
            }
            if !compatible(g, e, a, b) {
                return Err(format!(
                    "theta_{e}: label of {b} minus label of {a} is not a multiple of label {e}"
                ));
            }
        }
    }
    Ok(())
}

/// Renders the graph as DOT (one line per undirected edge) or JSON.
pub fn export_gkm(g: &GkmGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => to_dot(g),
        ExportFormat::Json => crate::io::gkm_to_json(g),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

fn to_dot(g: &GkmGraph) -> String {
    let mut s = String::from("graph gkm {\n");
    for v in g.vertices() {
        let _ = writeln!(s, "  \"{}\";", v.label());
    }
    for e in g.undirected_edges() {
        let label: Vec<String> = e.label.coords.entries().iter().map(ToString::to_string).collect();
        let _ = writeln!(
            s,
            "  \"{}\" -- \"{}\" [label=\"{}\"];",
            g.vertices()[e.source].label(),
            g.vertices()[e.target].label(),
            label.join(",")
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{IntMatrix, Permutation};
    use crate::tower::DEFAULT_CAP;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    fn v(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs)
    }

    fn fp(words: &[&[usize]]) -> FixedPoint {
        FixedPoint::from_one_line(words).unwrap()
    }

    fn three_stage() -> FlagBottTower {
        let mut mats = BTreeMap::new();
        mats.insert((2, 1), m(&[&[1, 2, 0], &[0, 0, 0]]));
        mats.insert((3, 1), m(&[&[3, 4, 0], &[0, 0, 0]]));
        mats.insert((3, 2), m(&[&[5, 0], &[0, 0]]));
        FlagBottTower::new(vec![2, 1, 1], mats).unwrap()
    }

    fn two_stage(c1: i64, c2: i64) -> FlagBottTower {
        let mut mats = BTreeMap::new();
        mats.insert((2, 1), m(&[&[c1, c2, 0], &[0, 0, 0]]));
        FlagBottTower::new(vec![2, 1], mats).unwrap()
    }

    #[test]
    fn x_golden() {
        let t = three_stage();
        let w = fp(&[&[3, 1, 2], &[1, 2], &[2, 1]]);
        assert_eq!(compute_x(&t, &w, 2, 1).unwrap(), m(&[&[2, 0, 1], &[0, 0, 0]]));
        assert_eq!(compute_x(&t, &w, 3, 1).unwrap(), m(&[&[0, 0, 0], &[14, 0, 8]]));
        assert_eq!(compute_x(&t, &w, 3, 2).unwrap(), m(&[&[0, 0], &[5, 0]]));
        assert!(matches!(compute_x(&t, &w, 1, 1), Err(GkmError::IndexOutOfRange { .. })));
        assert!(matches!(compute_x(&t, &w, 4, 1), Err(GkmError::IndexOutOfRange { .. })));
    }

    #[test]
    fn x_at_identity_is_a() {
        let t = three_stage();
        let e = FixedPoint::identity(t.dims());
        assert_eq!(&compute_x(&t, &e, 2, 1).unwrap(), t.matrix(2, 1));
    }

    #[test]
    fn x_two_stage_fiber_swap() {
        let t = two_stage(1, 2);
        let w = fp(&[&[1, 2, 3], &[2, 1]]);
        assert_eq!(compute_x(&t, &w, 2, 1).unwrap(), m(&[&[0, 0, 0], &[1, 2, 0]]));
    }

    #[test]
    fn weights_golden() {
        let t = three_stage();
        let w = fp(&[&[3, 1, 2], &[1, 2], &[2, 1]]);
        let ws = tangential_weights(&t, &w, Basis::Full).unwrap();
        assert_eq!(ws.len(), t.complex_dim());
        let target = v(&[14, 0, 8, 5, 0, 1, -1]);
        assert!(ws.iter().any(|x| x.coords == target));

        let fl3 = FlagBottTower::trivial(vec![2]).unwrap();
        let w = fp(&[&[2, 3, 1]]);
        let full: Vec<_> = tangential_weights(&fl3, &w, Basis::Full)
            .unwrap()
            .into_iter()
            .map(|x| x.coords)
            .collect();
        assert_eq!(full, vec![v(&[0, -1, 1]), v(&[1, -1, 0]), v(&[1, 0, -1])]);
        let eff: Vec<_> = tangential_weights(&fl3, &w, Basis::Effective)
            .unwrap()
            .into_iter()
            .map(|x| x.coords)
            .collect();
        assert_eq!(eff, vec![v(&[0, -1]), v(&[1, -1]), v(&[1, 0])]);
    }

    #[test]
    fn fl3_graph() {
        let t = FlagBottTower::trivial(vec![2]).unwrap();
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        assert_eq!(g.vertices().len(), 6);
        assert!(g.violations().is_empty());
        let src = g.vertices().iter().position(|x| x == &fp(&[&[2, 3, 1]])).unwrap();
        let dst = g.vertices().iter().position(|x| x == &fp(&[&[1, 3, 2]])).unwrap();
        let e = g.edges().iter().find(|e| e.source == src && e.target == dst).unwrap();
        assert_eq!(e.label.coords, v(&[1, -1]));
        assert_eq!(e.label.pretty(g.dims()), "e1,1 - e1,2");
        assert!(check_pairwise_independence(&g));
    }

    #[test]
    fn cp1_graph() {
        let t = FlagBottTower::trivial(vec![1]).unwrap();
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edges()[0].label.coords, -&g.edges()[1].label.coords);
        let c = find_connection(&g, DEFAULT_DEGREE_BOUND).unwrap();
        assert_eq!(c.map_of(0), &[1]);
        assert_eq!(c.map_of(1), &[0]);
        let dot = export_gkm(&g, ExportFormat::Dot);
        assert_eq!(dot.matches("--").count(), 1);
        assert_eq!(dot.lines().filter(|l| l.trim_end().ends_with("\";")).count(), 2);
    }

    #[test]
    fn fiber_edge_labels() {
        // a fiber edge flips the second stage: (w, e) -> (w, s1)
        let t = two_stage(1, 2);
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        let cases: [(&[usize], [i64; 3]); 6] = [
            (&[1, 2, 3], [-1, -2, -1]),
            (&[2, 1, 3], [-2, -1, -1]),
            (&[2, 3, 1], [0, -1, -1]),
            (&[3, 2, 1], [0, -2, -1]),
            (&[3, 1, 2], [-2, 0, -1]),
            (&[1, 3, 2], [-1, 0, -1]),
        ];
        for (w1, label) in cases {
            let src = g.vertices().iter().position(|x| x == &fp(&[w1, &[1, 2]])).unwrap();
            let e = g
                .out_edges(src)
                .iter()
                .map(|&i| &g.edges()[i])
                .find(|e| e.block == 2)
                .unwrap();
            assert_eq!(e.label.coords, v(&label), "w = {w1:?}");
        }
    }

    #[test]
    fn pairwise_independence_detects_duplicates() {
        let dims = vec![1, 1];
        let verts = vec![FixedPoint::identity(&dims), fp(&[&[2, 1], &[1, 2]])];
        let lab = |x: &[i64]| WeightVector::new(v(x), Basis::Effective);
        let edges = vec![
            GkmEdge {
                source: 0,
                target: 1,
                block: 1,
                r: 2,
                s: 1,
                label: lab(&[1, 0]),
            },
            GkmEdge {
                source: 0,
                target: 1,
                block: 1,
                r: 2,
                s: 1,
                label: lab(&[2, 0]),
            },
            GkmEdge {
                source: 1,
                target: 0,
                block: 1,
                r: 2,
                s: 1,
                label: lab(&[-1, 0]),
            },
        ];
        let g = GkmGraph::from_parts(dims, Basis::Effective, verts, edges).unwrap();
        assert!(!check_pairwise_independence(&g));
    }

    /// Every pair tested by the rank of the 2-row matrix.
    fn pairwise_by_rank(g: &GkmGraph) -> bool {
        (0..g.vertices().len()).all(|p| {
            let out = g.out_edges(p);
            out.iter().enumerate().all(|(i, &a)| {
                out[i + 1..].iter().all(|&b| {
                    IntMatrix::from_rows(&[g.edges()[a].label.coords.clone(), g.edges()[b].label.coords.clone()])
                        .unwrap()
                        .rank()
                        == 2
                })
            })
        })
    }

    #[test]
    fn fl3_pairs_by_rank() {
        let t = FlagBottTower::trivial(vec![2]).unwrap();
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        assert!(pairwise_by_rank(&g));
    }

    #[test]
    fn connections_exist() {
        for t in [FlagBottTower::trivial(vec![2]).unwrap(), two_stage(1, 2), three_stage()] {
            for basis in [Basis::Full, Basis::Effective] {
                let g = build_gkm_graph(&t, basis, DEFAULT_CAP).unwrap();
                let c = find_connection(&g, DEFAULT_DEGREE_BOUND).unwrap();
                verify_connection(&g, &c).unwrap();
            }
        }
    }

    #[test]
    fn degree_bound_enforced() {
        let t = FlagBottTower::trivial(vec![3]).unwrap();
        let g = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
        assert!(matches!(
            find_connection(&g, 5),
            Err(GkmError::DegreeBound { degree: 6, .. })
        ));
    }

    #[test]
    fn cap_enforced() {
        let t = FlagBottTower::trivial(vec![3, 3]).unwrap();
        assert!(matches!(
            build_gkm_graph(&t, Basis::Full, 10),
            Err(GkmError::Tower(TowerError::CapExceeded { .. }))
        ));
    }

    /// Chain-sum definition of `X(j,l)`, enumerating every increasing chain
    /// of intermediate stages.
    fn x_by_chains(t: &FlagBottTower, w: &FixedPoint, j: usize, l: usize) -> IntMatrix {
        let b = |i: usize| w.block(i).to_row_matrix();
        let between: Vec<usize> = (l + 1..j).collect();
        let mut total = IntMatrix::zeros(t.n(j) + 1, t.n(l) + 1);
        for mask in 0u32..(1 << between.len()) {
            let chain: Vec<usize> = between
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            // stages j > i_r > ... > i_1 > l
            let mut stops = vec![j];
            stops.extend(chain.iter().rev());
            stops.push(l);
            let mut prod = IntMatrix::identity(t.n(j) + 1);
            for pair in stops.windows(2) {
                let step = b(pair[0]).mul(t.matrix(pair[0], pair[1])).unwrap();
                prod = prod.mul(&step).unwrap();
            }
            prod = prod.mul(&b(l)).unwrap();
            total = total.add(&prod).unwrap();
        }
        total
    }

    pub(crate) fn arb_flag_tower(max_m: usize, max_n: usize, bound: i64) -> impl Strategy<Value = FlagBottTower> {
        proptest::collection::vec(1..=max_n, 1..=max_m)
            .prop_flat_map(move |dims| {
                let mut shapes = Vec::new();
                for j in 1..=dims.len() {
                    for l in 1..j {
                        shapes.push(((j, l), (dims[j - 1] + 1) * (dims[l - 1] + 1)));
                    }
                }
                let entries: Vec<_> = shapes
                    .iter()
                    .map(|&(_, len)| proptest::collection::vec(-bound..=bound, len))
                    .collect();
                (Just(dims), Just(shapes), entries)
            })
            .prop_map(|(dims, shapes, entries)| {
                let mut mats = BTreeMap::new();
                for (((j, l), _), data) in shapes.into_iter().zip(entries) {
                    let rows: Vec<&[i64]> = data.chunks(dims[l - 1] + 1).collect();
                    mats.insert((j, l), m(&rows));
                }
                FlagBottTower::new(dims, mats).unwrap()
            })
    }

    fn arb_point(dims: &[usize]) -> impl Strategy<Value = FixedPoint> {
        let blocks: Vec<_> = dims
            .iter()
            .map(|&n| Just((1..=n + 1).collect::<Vec<usize>>()).prop_shuffle())
            .collect();
        blocks.prop_map(|ws| FixedPoint::new(ws.iter().map(|w| Permutation::from_one_line(w).unwrap()).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn recursion_matches_chain_sum(
            (t, w) in arb_flag_tower(4, 2, 9).prop_flat_map(|t| { let d = t.dims().to_vec(); (Just(t), arb_point(&d)) })
        ) {
            for j in 2..=t.stages() {
                for l in 1..j {
                    prop_assert_eq!(compute_x(&t, &w, j, l).unwrap(), x_by_chains(&t, &w, j, l));
                }
            }
        }

        #[test]
        fn graph_invariants(t in arb_flag_tower(3, 2, 9)) {
            let full = build_gkm_graph(&t, Basis::Full, DEFAULT_CAP).unwrap();
            let eff = build_gkm_graph(&t, Basis::Effective, DEFAULT_CAP).unwrap();
            prop_assert!(full.violations().is_empty());
            prop_assert!(eff.violations().is_empty());
            prop_assert!(check_pairwise_independence(&eff));
            prop_assert!(check_pairwise_independence(&full));
            for (a, b) in full.edges().iter().zip(eff.edges()) {
                prop_assert_eq!((a.source, a.target), (b.source, b.target));
                prop_assert_eq!(to_effective(t.dims(), &a.label.coords), b.label.coords.clone());
                // nothing in later stages
                let start = Basis::Full.coord(t.dims(), a.block, t.n(a.block) + 1).unwrap() + 1;
                prop_assert!(a.label.coords.entries()[start..].iter().all(|x| *x == BigInt::from(0)));
            }
        }

        #[test]
        fn single_block_subgraphs_are_flag_graphs(t in arb_flag_tower(3, 2, 5), seed in any::<usize>()) {
            let g = build_gkm_graph(&t, Basis::Full, DEFAULT_CAP).unwrap();
            let base = seed % g.vertices().len();
            for j in 1..=t.stages() {
                // vertices agreeing with `base` outside stage j
                let same = |x: &FixedPoint| (1..=t.stages()).all(|i| i == j || x.block(i) == g.vertices()[base].block(i));
                let members: Vec<usize> = (0..g.vertices().len()).filter(|&i| same(&g.vertices()[i])).collect();
                let flag = build_gkm_graph(&FlagBottTower::trivial(vec![t.n(j)]).unwrap(), Basis::Full, DEFAULT_CAP).unwrap();
                prop_assert_eq!(members.len(), flag.vertices().len());
                // isomorphism via the stage-j permutation
                let pos = |i: usize| flag.vertices().iter().position(|x| x.block(1) == g.vertices()[i].block(j)).unwrap();
                let mut mine: Vec<(usize, usize)> = g.edges().iter()
                    .filter(|e| e.block == j && same(&g.vertices()[e.source]))
                    .map(|e| (pos(e.source), pos(e.target)))
                    .collect();
                let mut theirs: Vec<(usize, usize)> = flag.edges().iter().map(|e| (e.source, e.target)).collect();
                mine.sort_unstable();
                theirs.sort_unstable();
                prop_assert_eq!(mine, theirs);
            }
        }
    }
}
