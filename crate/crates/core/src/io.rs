//! JSON formats for towers, fans and GKM graphs.
//!
//! Integers are written as plain JSON numbers of any size. Tower keys are
//! `"j,l"` strings with 1-based stages; fan cones hold 0-based ray indices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::fan::{Fan, FanError};
use crate::gkm::{Basis, GkmEdge, GkmError, GkmGraph, WeightVector};
use crate::lattice::{IntMatrix, IntVector, Permutation};
use crate::tower::{associate, FixedPoint, FlagBottTower, GeneralizedBottTower, TowerError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Gkm(#[from] GkmError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Schema(msg.into()))
}

pub fn int_to_json(x: &BigInt) -> Value {
    Value::Number(
        x.to_string()
            .parse::<Number>()
            .expect("decimal integers are valid JSON numbers"),
    )
}

pub fn int_from_json(v: &Value, what: &str) -> Result<BigInt, IoError> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .or_else(|_| schema(format!("{what}: {n} is not an integer"))),
        _ => schema(format!("{what}: expected an integer, found {v}")),
    }
}

fn usize_from_json(v: &Value, what: &str) -> Result<usize, IoError> {
    v.as_u64().map(|x| x as usize).map_or_else(
        || schema(format!("{what}: expected a non-negative integer, found {v}")),
        Ok,
    )
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array()
        .map_or_else(|| schema(format!("{what}: expected an array")), Ok)
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object()
        .map_or_else(|| schema(format!("{what}: expected an object")), Ok)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value, IoError> {
    obj.get(key)
        .map_or_else(|| schema(format!("{what}: missing field \"{key}\"")), Ok)
}

pub fn vector_to_json(v: &IntVector) -> Value {
    Value::Array(v.entries().iter().map(int_to_json).collect())
}

pub fn vector_from_json(v: &Value, what: &str) -> Result<IntVector, IoError> {
    let entries = array(v, what)?
        .iter()
        .map(|x| int_from_json(x, what))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntVector::new(entries))
}

fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(vector_to_json).collect())
}

fn matrix_from_json(v: &Value, what: &str) -> Result<IntMatrix, IoError> {
    let rows = array(v, what)?
        .iter()
        .map(|r| vector_from_json(r, what))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return schema(format!("{what}: a matrix needs at least one row"));
    }
    IntMatrix::from_rows(&rows).or_else(|_| schema(format!("{what}: rows have different lengths")))
}

fn parse_key(key: &str) -> Result<(usize, usize), IoError> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if let [j, l] = parts[..] {
        if let (Ok(j), Ok(l)) = (j.parse(), l.parse()) {
            return Ok((j, l));
        }
    }
    schema(format!("key \"{key}\" is not of the form \"j,l\""))
}

/// Contents of a tower file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerInput {
    Flag(FlagBottTower),
    Generalized(GeneralizedBottTower),
}

impl TowerInput {
    /// The flag Bott tower, passing a generalized tower through [`associate`].
    pub fn into_flag(self) -> FlagBottTower {
        match self {
            TowerInput::Flag(t) => t,
            TowerInput::Generalized(t) => associate(&t),
        }
    }
}

/// Parses a tower file:
/// `{"type": "flag_bott", "n": [2, 1], "A": {"2,1": [[1,2,0],[0,0,0]]}}` or
/// `{"type": "generalized_bott", "n": [2, 1], "a": {"2,1": [1]}}`.
pub fn parse_tower(text: &str) -> Result<TowerInput, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "tower")?;
    let kind = field(obj, "type", "tower")?.as_str().unwrap_or_default();
    let dims = array(field(obj, "n", "tower")?, "n")?
        .iter()
        .map(|x| usize_from_json(x, "n"))
        .collect::<Result<Vec<_>, _>>()?;
    match kind {
        "flag_bott" => {
            let empty = Map::new();
            let entries = match obj.get("A") {
                Some(v) => object(v, "A")?,
                None => &empty,
            };
            let mut mats = BTreeMap::new();
            for (k, v) in entries {
                let key = parse_key(k)?;
                mats.insert(key, matrix_from_json(v, &format!("A[{k}]"))?);
            }
            Ok(TowerInput::Flag(FlagBottTower::new(dims, mats)?))
        }
        "generalized_bott" => {
            let empty = Map::new();
            let entries = match obj.get("a") {
                Some(v) => object(v, "a")?,
                None => &empty,
            };
            let mut vecs = BTreeMap::new();
            for (k, v) in entries {
                let key = parse_key(k)?;
                vecs.insert(key, vector_from_json(v, &format!("a[{k}]"))?);
            }
            Ok(TowerInput::Generalized(GeneralizedBottTower::new(dims, vecs)?))
        }
        other => schema(format!(
            "tower type \"{other}\" is not \"flag_bott\" or \"generalized_bott\""
        )),
    }
}

pub fn flag_tower_to_json(t: &FlagBottTower) -> String {
    let mut mats = Map::new();
    for (&(j, l), m) in t.matrices() {
        mats.insert(format!("{j},{l}"), matrix_to_json(m));
    }
    let v = json!({ "type": "flag_bott", "n": t.dims(), "A": mats });
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn generalized_tower_to_json(t: &GeneralizedBottTower) -> String {
    let mut vecs = Map::new();
    for (&(j, l), v) in t.vectors() {
        vecs.insert(format!("{j},{l}"), vector_to_json(v));
    }
    let v = json!({ "type": "generalized_bott", "n": t.dims(), "a": vecs });
    serde_json::to_string_pretty(&v).unwrap()
}

/// A fan together with optional per-ray labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanFile {
    pub fan: Fan,
    pub labels: Option<Vec<String>>,
}

/// `{"dim": 2, "rays": [[1,0],[0,1]], "max_cones": [[0,1]], "labels": [...]}`.
pub fn parse_fan(text: &str) -> Result<FanFile, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "fan")?;
    let dim = usize_from_json(field(obj, "dim", "fan")?, "dim")?;
    let rays = array(field(obj, "rays", "fan")?, "rays")?
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, &format!("rays[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let cones = array(field(obj, "max_cones", "fan")?, "max_cones")?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            array(c, &format!("max_cones[{i}]"))?
                .iter()
                .map(|x| usize_from_json(x, &format!("max_cones[{i}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels = match obj.get("labels") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let labels: Vec<String> = array(v, "labels")?
                .iter()
                .map(|s| s.as_str().map(str::to_owned))
                .collect::<Option<_>>()
                .map_or_else(|| schema("labels: expected strings"), Ok)?;
            if labels.len() != rays.len() {
                return schema(format!("labels: {} labels for {} rays", labels.len(), rays.len()));
            }
            Some(labels)
        }
    };
    Ok(FanFile {
        fan: Fan::new(dim, rays, cones)?,
        labels,
    })
}

pub fn fan_to_json(f: &Fan, labels: Option<&[String]>) -> String {
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(f.dim()));
    obj.insert(
        "rays".into(),
        Value::Array(f.rays().iter().map(vector_to_json).collect()),
    );
    obj.insert("max_cones".into(), json!(f.max_cones()));
    if let Some(labels) = labels {
        obj.insert("labels".into(), json!(labels));
    }
    serde_json::to_string_pretty(&Value::Object(obj)).unwrap()
}

/// One record per undirected edge, oriented from the smaller vertex index.
pub fn gkm_to_json(g: &GkmGraph) -> String {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|v| json!(v.perms.iter().map(Permutation::one_line).collect::<Vec<_>>()))
        .collect();
    let edges: Vec<Value> = g
        .undirected_edges()
        .map(|e| {
            json!({
                "source": e.source,
                "target": e.target,
                "block": e.block,
                "r": e.r,
                "s": e.s,
                "label": vector_to_json(&e.label.coords),
            })
        })
        .collect();
    let v = json!({
        "dims": g.dims(),
        "basis": g.basis().name(),
        "vertices": vertices,
        "edges": edges,
    });
    serde_json::to_string_pretty(&v).unwrap()
}

/// Inverse of [`gkm_to_json`]: both orientations of each edge are restored,
/// with the reverse label negated.
pub fn gkm_from_json(text: &str) -> Result<GkmGraph, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "graph")?;
    let dims = array(field(obj, "dims", "graph")?, "dims")?
        .iter()
        .map(|x| usize_from_json(x, "dims"))
        .collect::<Result<Vec<_>, _>>()?;
    let basis = match field(obj, "basis", "graph")?.as_str() {
        Some("full") => Basis::Full,
        Some("effective") => Basis::Effective,
        _ => return schema("basis: expected \"full\" or \"effective\""),
    };
    let mut vertices = Vec::new();
    for (i, v) in array(field(obj, "vertices", "graph")?, "vertices")?.iter().enumerate() {
        let words = array(v, &format!("vertices[{i}]"))?
            .iter()
            .map(|w| {
                array(w, &format!("vertices[{i}]"))?
                    .iter()
                    .map(|x| usize_from_json(x, &format!("vertices[{i}]")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let perms = words
            .iter()
            .map(|w| Permutation::from_one_line(w))
            .collect::<Result<Vec<_>, _>>()
            .or_else(|e| schema(format!("vertices[{i}]: {e}")))?;
        vertices.push(FixedPoint::new(perms));
    }
    let mut edges = Vec::new();
    for (i, e) in array(field(obj, "edges", "graph")?, "edges")?.iter().enumerate() {
        let what = format!("edges[{i}]");
        let eo = object(e, &what)?;
        let num = |k: &str| usize_from_json(field(eo, k, &what)?, &what);
        let label = vector_from_json(field(eo, "label", &what)?, &what)?;
        let (source, target, block, r, s) = (num("source")?, num("target")?, num("block")?, num("r")?, num("s")?);
        edges.push(GkmEdge {
            source,
            target,
            block,
            r,
            s,
            label: WeightVector::new(label.clone(), basis),
        });
        edges.push(GkmEdge {
            source: target,
            target: source,
            block,
            r,
            s,
            label: WeightVector::new(-&label, basis),
        });
    }
    edges.sort_by_key(|e| (e.source, e.block, e.s, e.r));
    Ok(GkmGraph::from_parts(dims, basis, vertices, edges)?)
}
