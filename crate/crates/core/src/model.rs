//! Domain types shared by every stage: typed points, the τ-neighborhood
//! graph and the clique predicates defined over it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbolic object type such as `Main-Early` or `A`.
///
/// Labels must be non-empty, may not contain `+`, whitespace, `,` or `;`, and
/// may not start with `-`; those characters are taken by the item and file
/// encodings downstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ObjectType(String);

impl ObjectType {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::input("object type label is empty"));
        }
        if label.starts_with('-') {
            return Err(Error::input(format!("object type {label:?} starts with '-'")));
        }
        if let Some(c) = label
            .chars()
            .find(|c| *c == '+' || *c == ',' || *c == ';' || c.is_whitespace())
        {
            return Err(Error::input(format!(
                "object type {label:?} contains reserved character {c:?}"
            )));
        }
        Ok(ObjectType(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ObjectType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ObjectType::new(s)
    }
}

impl TryFrom<String> for ObjectType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        ObjectType::new(s)
    }
}

impl From<ObjectType> for String {
    fn from(t: ObjectType) -> String {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dims {
    Two,
    Three,
}

impl Dims {
    pub fn count(self) -> usize {
        match self {
            Dims::Two => 2,
            Dims::Three => 3,
        }
    }

    pub fn from_count(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dims::Two),
            3 => Ok(Dims::Three),
            other => Err(Error::input(format!("dimensionality must be 2 or 3, got {other}"))),
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// Cartesian position in Mpc. 2D points keep a zero third component so the
/// distance kernel is branch-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coords {
    xyz: [f64; 3],
    dims: Dims,
}

impl Coords {
    pub fn new(values: &[f64]) -> Result<Self> {
        let dims = Dims::from_count(values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!("coordinate {v} is not finite")));
        }
        let mut xyz = [0.0; 3];
        xyz[..values.len()].copy_from_slice(values);
        Ok(Coords { xyz, dims })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xyz[..self.dims.count()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialObject {
    pub id: String,
    pub kind: ObjectType,
    pub coords: Coords,
}

impl SpatialObject {
    pub fn new(id: impl Into<String>, kind: ObjectType, coords: &[f64]) -> Result<Self> {
        Ok(SpatialObject {
            id: id.into(),
            kind,
            coords: Coords::new(coords)?,
        })
    }
}

/// L2 distance between two objects.
pub fn euclidean_distance(a: &SpatialObject, b: &SpatialObject) -> Result<f64> {
    if a.coords.dims != b.coords.dims {
        return Err(Error::input(format!(
            "dimensionality mismatch: {} is {}D, {} is {}D",
            a.id, a.coords.dims, b.id, b.coords.dims
        )));
    }
    Ok(distance(&a.coords, &b.coords))
}

#[inline]
pub(crate) fn distance(a: &Coords, b: &Coords) -> f64 {
    let [ax, ay, az] = a.xyz;
    let [bx, by, bz] = b.xyz;
    let (dx, dy, dz) = (ax - bx, ay - by, az - bz);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// The edge criterion. Closed threshold, no epsilon.
#[inline]
pub(crate) fn within(a: &Coords, b: &Coords, tau: f64) -> bool {
    distance(a, b) <= tau
}

/// Number of edges of a complete graph on `cardinality` vertices.
pub fn edge_count(cardinality: u64) -> Result<u64> {
    if cardinality < 2 {
        return Err(Error::input(format!(
            "a complete graph needs at least 2 members, got {cardinality}"
        )));
    }
    Ok(cardinality * (cardinality - 1) / 2)
}

pub fn validate_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::input(format!("tau must be a positive finite distance, got {tau}")))
    }
}

/// A validated set of objects: uniform dimensionality, unique ids.
#[derive(Debug, Clone)]
pub struct Dataset {
    dims: Dims,
    objects: Vec<SpatialObject>,
    by_id: HashMap<String, u32>,
}

impl Dataset {
    pub fn new(dims: Dims, objects: Vec<SpatialObject>) -> Result<Self> {
        if objects.len() > u32::MAX as usize {
            return Err(Error::input("too many objects for a single dataset"));
        }
        let mut by_id = HashMap::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            if o.coords.dims != dims {
                return Err(Error::input(format!(
                    "object {} is {}D but the dataset is {}D",
                    o.id, o.coords.dims, dims
                )));
            }
            if by_id.insert(o.id.clone(), i as u32).is_some() {
                return Err(Error::input(format!("duplicate object id {}", o.id)));
            }
        }
        Ok(Dataset { dims, objects, by_id })
    }

    /// Builds a dataset, taking the dimensionality from the first object
    /// (2D when empty).
    pub fn from_objects(objects: Vec<SpatialObject>) -> Result<Self> {
        let dims = objects.first().map_or(Dims::Two, |o| o.coords.dims);
        Dataset::new(dims, objects)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[SpatialObject] {
        &self.objects
    }

    pub fn get(&self, index: u32) -> &SpatialObject {
        &self.objects[index as usize]
    }

    pub fn index_of(&self, id: &str) -> Result<u32> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown object id {id}")))
    }

    /// Sorted, de-duplicated set of types present in the dataset.
    pub fn type_universe(&self) -> Vec<ObjectType> {
        let mut types: Vec<ObjectType> = self.objects.iter().map(|o| o.kind.clone()).collect();
        types.sort();
        types.dedup();
        types
    }
}

/// Undirected τ-neighborhood graph over a dataset, by object position.
#[derive(Debug, Clone)]
pub struct NeighborGraph<'a> {
    dataset: &'a Dataset,
    tau: f64,
    adjacency: Vec<Vec<u32>>,
}

impl<'a> NeighborGraph<'a> {
    /// Builds the graph by testing every pair. O(n²); this is the reference
    /// construction the grid route is checked against.
    pub fn all_pairs(dataset: &'a Dataset, tau: f64) -> Result<Self> {
        validate_tau(tau)?;
        let objs = dataset.objects();
        let mut adjacency = vec![Vec::new(); objs.len()];
        for i in 0..objs.len() {
            for j in (i + 1)..objs.len() {
                if within(&objs[i].coords, &objs[j].coords, tau) {
                    adjacency[i].push(j as u32);
                    adjacency[j].push(i as u32);
                }
            }
        }
        Ok(NeighborGraph { dataset, tau, adjacency })
    }

    /// Wraps precomputed adjacency lists, sorting them. Lists must be
    /// symmetric and irreflexive.
    pub(crate) fn from_adjacency(dataset: &'a Dataset, tau: f64, mut adjacency: Vec<Vec<u32>>) -> Self {
        debug_assert_eq!(adjacency.len(), dataset.len());
        for list in &mut adjacency {
            list.sort_unstable();
        }
        NeighborGraph { dataset, tau, adjacency }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Sorted neighbor positions of `v`, excluding `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    pub fn edge_total(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// True iff every distinct pair of `members` (positions) is adjacent.
    pub fn is_complete_indices(&self, members: &[u32]) -> bool {
        members.iter().enumerate().all(|(k, &a)| {
            members[k + 1..].iter().all(|&b| a == b || self.adjacent(a, b))
        })
    }

    /// Id-based completeness check.
    pub fn is_complete<S: AsRef<str>>(&self, members: &[S]) -> Result<bool> {
        let idx = members
            .iter()
            .map(|id| self.dataset.index_of(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.is_complete_indices(&idx))
    }

    /// True iff no vertex outside `members` is adjacent to all of them.
    pub fn is_maximal_indices(&self, members: &[u32]) -> bool {
        let Some(&first) = members.first() else {
            return self.is_empty();
        };
        !self.neighbors(first).iter().any(|&c| {
            !members.contains(&c) && members.iter().all(|&m| self.adjacent(m, c))
        })
    }
}
