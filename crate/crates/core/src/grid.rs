//! Uniform grid with cell side τ. A point's τ-neighbors can only live in its
//! own cell or one of the cells touching it (3^dims cells in total).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{validate_tau, Coords, Dataset, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    components: [i64; 3],
    dims: Dims,
}

impl CellKey {
    pub fn new(components: &[i64]) -> Result<Self> {
        let dims = Dims::from_count(components.len())?;
        let mut c = [0; 3];
        c[..components.len()].copy_from_slice(components);
        Ok(CellKey { components: c, dims })
    }

    /// Cell containing `coords`. Cells are half-open, `[k·τ, (k+1)·τ)`, and
    /// negative coordinates floor toward −∞.
    pub fn of(coords: &Coords, tau: f64) -> Self {
        let mut components = [0; 3];
        for (slot, v) in components.iter_mut().zip(coords.as_slice()) {
            *slot = (v / tau).floor() as i64;
        }
        CellKey {
            components,
            dims: coords.dims(),
        }
    }

    pub fn components(&self) -> &[i64] {
        &self.components[..self.dims.count()]
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// This key and every key differing by at most one in each component,
    /// in a fixed order.
    pub fn surrounding(&self) -> Vec<CellKey> {
        let [x, y, z] = self.components;
        let z_range = match self.dims {
            Dims::Two => 0..=0,
            Dims::Three => -1..=1,
        };
        let mut out = Vec::with_capacity(27);
        for dz in z_range {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    out.push(CellKey {
                        components: [x + dx, y + dy, z + dz],
                        dims: self.dims,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GridIndex {
    tau: f64,
    dims: Dims,
    cells: HashMap<CellKey, Vec<u32>>,
    object_cells: Vec<CellKey>,
}

impl GridIndex {
    /// Places every object of `dataset` into its τ-cell.
    pub fn build(dataset: &Dataset, tau: f64) -> Result<Self> {
        validate_tau(tau)?;
        let mut cells: HashMap<CellKey, Vec<u32>> = HashMap::new();
        let mut object_cells = Vec::with_capacity(dataset.len());
        for (i, obj) in dataset.objects().iter().enumerate() {
            let key = CellKey::of(&obj.coords, tau);
            cells.entry(key).or_default().push(i as u32);
            object_cells.push(key);
        }
        Ok(GridIndex {
            tau,
            dims: dataset.dims(),
            cells,
            object_cells,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn object_count(&self) -> usize {
        self.object_cells.len()
    }

    pub fn cell_of(&self, object: u32) -> Option<CellKey> {
        self.object_cells.get(object as usize).copied()
    }

    /// Object positions stored in `key`, in insertion order.
    pub fn cell(&self, key: &CellKey) -> &[u32] {
        self.cells.get(key).map_or(&[], Vec::as_slice)
    }

    /// Occupied cells among the 3^dims cells around `key`.
    pub fn neighbor_cells(&self, key: &CellKey) -> Vec<CellKey> {
        key.surrounding()
            .into_iter()
            .filter(|k| self.cells.contains_key(k))
            .collect()
    }

    /// Every object in the cells surrounding `object`'s cell, except itself.
    /// A superset of its true τ-neighbors.
    pub fn candidate_neighbors(&self, object: u32) -> Result<Vec<u32>> {
        let key = self
            .cell_of(object)
            .ok_or_else(|| Error::input(format!("object position {object} is not in the index")))?;
        let mut out = Vec::new();
        self.for_each_candidate(&key, |q| {
            if q != object {
                out.push(q);
            }
        });
        Ok(out)
    }

    /// Occupied cells with their object positions, in no particular order.
    pub(crate) fn occupied(&self) -> Vec<(&CellKey, &[u32])> {
        self.cells.iter().map(|(k, v)| (k, v.as_slice())).collect()
    }

    pub(crate) fn for_each_candidate(&self, key: &CellKey, mut f: impl FnMut(u32)) {
        for k in key.surrounding() {
            if let Some(members) = self.cells.get(&k) {
                members.iter().copied().for_each(&mut f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NeighborGraph, ObjectType, SpatialObject};
    use proptest::prelude::*;

    fn dataset(points: &[(&str, &[f64])]) -> Dataset {
        Dataset::from_objects(
            points
                .iter()
                .map(|(id, c)| SpatialObject::new(*id, ObjectType::new(&id[..1]).unwrap(), c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn grid_example() -> Dataset {
        dataset(&[
            ("A1", &[2.5, 4.5]),
            ("A2", &[6.0, 4.0]),
            ("A3", &[2.0, 9.0]),
            ("B1", &[1.5, 3.5]),
            ("B2", &[5.0, 3.0]),
            ("B3", &[5.0, 4.0]),
            ("C1", &[2.5, 3.0]),
            ("C2", &[6.0, 3.0]),
            ("D1", &[3.0, 9.0]),
            ("D2", &[7.0, 1.5]),
        ])
    }

    #[test]
    fn empty_input_has_no_cells() {
        let idx = GridIndex::build(&Dataset::from_objects(vec![]).unwrap(), 1.0).unwrap();
        assert_eq!(idx.cell_count(), 0);
        let key = CellKey::new(&[0, 0]).unwrap();
        assert!(idx.neighbor_cells(&key).is_empty());
    }

    #[test]
    fn rejects_bad_tau() {
        let ds = grid_example();
        assert!(GridIndex::build(&ds, 0.0).is_err());
        assert!(GridIndex::build(&ds, -1.0).is_err());
        assert!(GridIndex::build(&ds, f64::NAN).is_err());
    }

    #[test]
    fn grid_example_cells() {
        let ds = grid_example();
        let idx = GridIndex::build(&ds, 2.0).unwrap();
        let a1 = ds.index_of("A1").unwrap();
        let d2 = ds.index_of("D2").unwrap();
        assert_eq!(idx.cell_of(a1).unwrap().components(), &[1, 2]);
        assert_eq!(idx.cell_of(d2).unwrap().components(), &[3, 0]);
        let total: usize = idx.cells.values().map(Vec::len).sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn surrounding_counts() {
        let k2 = CellKey::new(&[0, 0]).unwrap().surrounding();
        assert_eq!(k2.len(), 9);
        assert!(k2.contains(&CellKey::new(&[-1, -1]).unwrap()));
        assert!(k2.contains(&CellKey::new(&[1, 1]).unwrap()));
        assert_eq!(CellKey::new(&[5, 5, 5]).unwrap().surrounding().len(), 27);
    }

    #[test]
    fn negative_coordinates_floor_down() {
        let c = Coords::new(&[-0.5, -2.0, 3.9]).unwrap();
        assert_eq!(CellKey::of(&c, 2.0).components(), &[-1, -1, 1]);
        // boundary belongs to the upper cell
        let c = Coords::new(&[2.0, 4.0]).unwrap();
        assert_eq!(CellKey::of(&c, 2.0).components(), &[1, 2]);
    }

    #[test]
    fn candidates_for_a1() {
        let ds = grid_example();
        let idx = GridIndex::build(&ds, 2.0).unwrap();
        let cands = idx.candidate_neighbors(ds.index_of("A1").unwrap()).unwrap();
        for id in ["B1", "C1"] {
            assert!(cands.contains(&ds.index_of(id).unwrap()));
        }
        assert!(!cands.contains(&ds.index_of("D2").unwrap()));
        assert!(!cands.contains(&ds.index_of("A1").unwrap()));
        assert!(idx.candidate_neighbors(99).is_err());
    }

    #[test]
    fn isolated_point_has_no_candidates() {
        let ds = dataset(&[("a", &[0.0, 0.0]), ("b", &[100.0, 100.0])]);
        let idx = GridIndex::build(&ds, 1.0).unwrap();
        assert!(idx.candidate_neighbors(0).unwrap().is_empty());
    }

    fn random_dataset(coords: Vec<Vec<f64>>) -> Dataset {
        Dataset::from_objects(
            coords
                .iter()
                .enumerate()
                .map(|(i, c)| SpatialObject::new(format!("p{i}"), ObjectType::new("T").unwrap(), c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn candidates_contain_all_true_neighbors(
            dims in 2usize..=3,
            raw in prop::collection::vec(prop::collection::vec(-20.0f64..20.0, 3), 0..80),
            tau in 0.5f64..6.0,
        ) {
            let coords: Vec<Vec<f64>> = raw.into_iter().map(|mut c| { c.truncate(dims); c }).collect();
            let ds = random_dataset(coords);
            let idx = GridIndex::build(&ds, tau).unwrap();
            let g = NeighborGraph::all_pairs(&ds, tau).unwrap();
            for p in 0..ds.len() as u32 {
                let cands = idx.candidate_neighbors(p).unwrap();
                for q in g.neighbors(p) {
                    prop_assert!(cands.contains(q));
                    let (kp, kq) = (idx.cell_of(p).unwrap(), idx.cell_of(*q).unwrap());
                    for (a, b) in kp.components().iter().zip(kq.components()) {
                        prop_assert!((a - b).abs() <= 1);
                    }
                }
            }
        }

        #[test]
        fn flattening_cells_reproduces_ids(
            raw in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 0..100),
            tau in 0.1f64..10.0,
        ) {
            let ds = random_dataset(raw);
            let idx = GridIndex::build(&ds, tau).unwrap();
            let mut ids: Vec<u32> = idx.cells.values().flatten().copied().collect();
            ids.sort_unstable();
            prop_assert_eq!(ids, (0..ds.len() as u32).collect::<Vec<_>>());
        }
    }
}
