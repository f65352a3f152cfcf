//! Maximal clique mining over the τ-neighborhood graph.
//!
//! The grid route builds one closed neighborhood list per connected object,
//! enumerates the maximal cliques of each list's induced subgraph that contain
//! the list's center, then merges the per-list results. Any clique found this
//! way is globally maximal: a vertex extending it would be adjacent to the
//! center and therefore already in the list.
//!
//! [`brute_force_maximal_cliques`] is an independent whole-graph enumerator
//! used as the reference in tests.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::grid::GridIndex;
use crate::model::{within, Dataset, NeighborGraph};

/// Default size cap for the brute-force oracle.
pub const ORACLE_LIMIT: usize = 500;

/// An object and all of its τ-neighbors. `members[0]` is the center; the
/// rest are sorted by dataset position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodList {
    pub center: u32,
    pub members: Vec<u32>,
}

impl NeighborhoodList {
    pub fn neighbors(&self) -> &[u32] {
        &self.members[1..]
    }
}

/// Member positions, ascending. Always at least two members.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaximalClique(Vec<u32>);

impl MaximalClique {
    pub fn members(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids<'d>(&self, dataset: &'d Dataset) -> Vec<&'d str> {
        self.0.iter().map(|&i| dataset.get(i).id.as_str()).collect()
    }
}

/// Canonically ordered cliques: members ascending, cliques lexicographic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliqueSet {
    cliques: Vec<MaximalClique>,
}

impl CliqueSet {
    fn from_unsorted(mut raw: Vec<Vec<u32>>) -> Self {
        for c in &mut raw {
            c.sort_unstable();
        }
        raw.sort_unstable();
        raw.dedup();
        CliqueSet {
            cliques: raw.into_iter().map(MaximalClique).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MaximalClique> {
        self.cliques.iter()
    }

    pub fn as_slice(&self) -> &[MaximalClique] {
        &self.cliques
    }

    /// Cliques as sorted id lists, sorted; convenient for comparisons.
    pub fn id_sets(&self, dataset: &Dataset) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .cliques
            .iter()
            .map(|c| {
                let mut ids: Vec<String> = c.ids(dataset).into_iter().map(str::to_owned).collect();
                ids.sort();
                ids
            })
            .collect();
        out.sort();
        out
    }

    /// Re-checks every clique against `graph`: size ≥ 2, complete, maximal.
    pub fn verify(&self, graph: &NeighborGraph<'_>) -> Result<()> {
        for c in &self.cliques {
            let m = c.members();
            if m.len() < 2 {
                return Err(Error::Invariant(format!("clique {m:?} has fewer than 2 members")));
            }
            if !graph.is_complete_indices(m) {
                return Err(Error::Invariant(format!("clique {m:?} is not complete")));
            }
            if !graph.is_maximal_indices(m) {
                return Err(Error::Invariant(format!("clique {m:?} is not maximal")));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a CliqueSet {
    type Item = &'a MaximalClique;
    type IntoIter = std::slice::Iter<'a, MaximalClique>;
    fn into_iter(self) -> Self::IntoIter {
        self.cliques.iter()
    }
}

/// One list per object that has at least one τ-neighbor, ordered by center.
pub fn build_neighborhoods(index: &GridIndex, dataset: &Dataset, exec: Execution) -> Vec<NeighborhoodList> {
    let tau = index.tau();
    let objects = dataset.objects();
    // Candidates are gathered once per cell and shared by all its objects.
    let cells = index.occupied();
    let per_cell = map_slice(exec, &cells, |&(key, residents)| {
        let mut candidates = Vec::new();
        index.for_each_candidate(key, |q| candidates.push(q));
        candidates.sort_unstable();
        residents
            .iter()
            .filter_map(|&p| {
                let here = &objects[p as usize].coords;
                let mut members = vec![p];
                members.extend(
                    candidates
                        .iter()
                        .copied()
                        .filter(|&q| q != p && within(here, &objects[q as usize].coords, tau)),
                );
                (members.len() > 1).then_some(NeighborhoodList { center: p, members })
            })
            .collect::<Vec<_>>()
    });
    let mut slots: Vec<Option<NeighborhoodList>> = (0..dataset.len()).map(|_| None).collect();
    for list in per_cell.into_iter().flatten() {
        let center = list.center as usize;
        slots[center] = Some(list);
    }
    slots.into_iter().flatten().collect()
}

/// The neighborhood graph implied by a set of neighborhood lists.
pub fn graph_from_neighborhoods<'a>(
    dataset: &'a Dataset,
    tau: f64,
    lists: &[NeighborhoodList],
) -> NeighborGraph<'a> {
    let mut adjacency = vec![Vec::new(); dataset.len()];
    for list in lists {
        adjacency[list.center as usize] = list.neighbors().to_vec();
    }
    NeighborGraph::from_adjacency(dataset, tau, adjacency)
}

/// Grid route end to end: index, neighborhoods and the graph they define.
pub fn grid_neighborhoods<'a>(
    dataset: &'a Dataset,
    tau: f64,
    exec: Execution,
) -> Result<(Vec<NeighborhoodList>, NeighborGraph<'a>)> {
    let index = GridIndex::build(dataset, tau)?;
    let lists = build_neighborhoods(&index, dataset, exec);
    let graph = graph_from_neighborhoods(dataset, tau, &lists);
    Ok((lists, graph))
}

/// Exact maximal cliques (size ≥ 2) of `graph`, found list by list.
pub fn mine_maximal_cliques(
    neighborhoods: &[NeighborhoodList],
    graph: &NeighborGraph<'_>,
    exec: Execution,
) -> CliqueSet {
    let per_list = map_slice(exec, neighborhoods, |list| {
        // Lower-positioned neighbors start out excluded, so each maximal
        // clique is reported only from the list of its smallest member.
        let neighbors = list.neighbors();
        let split = neighbors.partition_point(|&q| q < list.center);
        let mut found = Vec::new();
        let mut r = vec![list.center];
        expand(graph, &mut r, neighbors[split..].to_vec(), neighbors[..split].to_vec(), &mut found);
        found
    });

    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for clique in per_list.into_iter().flatten() {
        seen.insert(clique);
    }
    let merged: Vec<Vec<u32>> = seen.into_iter().collect();
    CliqueSet::from_unsorted(drop_strict_subsets(merged))
}

/// Bron–Kerbosch with Tomita pivoting on sorted position vectors. Emits each
/// maximal extension of `r` within `cand`, members sorted.
fn expand(graph: &NeighborGraph<'_>, r: &mut Vec<u32>, mut cand: Vec<u32>, mut excl: Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cand.is_empty() {
        if excl.is_empty() && r.len() >= 2 {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return;
    }
    let pivot = cand
        .iter()
        .chain(excl.iter())
        .copied()
        .max_by_key(|&u| (intersect_count(&cand, graph.neighbors(u)), std::cmp::Reverse(u)))
        .expect("cand is non-empty");
    let pivot_adj = graph.neighbors(pivot);
    let branch: Vec<u32> = cand
        .iter()
        .copied()
        .filter(|v| pivot_adj.binary_search(v).is_err())
        .collect();
    for v in branch {
        let adj = graph.neighbors(v);
        let next_cand = intersect(&cand, adj);
        let next_excl = intersect(&excl, adj);
        r.push(v);
        expand(graph, r, next_cand, next_excl, out);
        r.pop();
        if let Ok(pos) = cand.binary_search(&v) {
            cand.remove(pos);
        }
        let pos = excl.binary_search(&v).unwrap_or_else(|p| p);
        excl.insert(pos, v);
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersect_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Removes every set that is a strict subset of another. Input sets must be
/// sorted and distinct. Sweeps largest first, looking up supersets through
/// per-element posting lists of the sets kept so far.
pub(crate) fn drop_strict_subsets(mut sets: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    sets.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let universe = sets.iter().flatten().max().map_or(0, |&m| m as usize + 1);
    let mut postings: Vec<Vec<usize>> = vec![Vec::new(); universe];
    let mut kept: Vec<Vec<u32>> = Vec::with_capacity(sets.len());
    for set in sets {
        let rarest = set
            .iter()
            .min_by_key(|&&e| postings[e as usize].len())
            .copied();
        let covered = rarest.is_some_and(|e| {
            postings[e as usize].iter().any(|&k| {
                let sup = &kept[k];
                sup.len() > set.len() && set.iter().all(|x| sup.binary_search(x).is_ok())
            })
        });
        if covered {
            continue;
        }
        let id = kept.len();
        for &e in &set {
            postings[e as usize].push(id);
        }
        kept.push(set);
    }
    kept
}

/// Literal list pruning: a neighborhood list survives only when all of its
/// members are pairwise within τ; surviving lists are de-duplicated. Misses
/// maximal cliques whenever no closed neighborhood containing them is itself
/// a clique (a 5-cycle yields nothing).
pub fn faithful_prune(neighborhoods: &[NeighborhoodList], graph: &NeighborGraph<'_>) -> CliqueSet {
    let survivors = neighborhoods
        .iter()
        .filter(|l| graph.is_complete_indices(&l.members))
        .map(|l| l.members.clone())
        .collect();
    CliqueSet::from_unsorted(survivors)
}

/// Whole-graph maximal clique enumeration with pivoting, independent of the
/// grid. Refuses graphs larger than `limit` vertices.
pub fn brute_force_maximal_cliques(graph: &NeighborGraph<'_>, limit: usize) -> Result<CliqueSet> {
    if graph.len() > limit {
        return Err(Error::TooLarge {
            what: "brute-force clique enumeration",
            size: graph.len(),
            limit,
        });
    }
    let adj: Vec<BTreeSet<u32>> = (0..graph.len() as u32)
        .map(|v| graph.neighbors(v).iter().copied().collect())
        .collect();
    let mut out = Vec::new();
    let p: BTreeSet<u32> = (0..graph.len() as u32).collect();
    oracle_recurse(&adj, &mut BTreeSet::new(), p, BTreeSet::new(), &mut out);
    Ok(CliqueSet::from_unsorted(out.into_iter().filter(|c| c.len() >= 2).collect()))
}

fn oracle_recurse(
    adj: &[BTreeSet<u32>],
    r: &mut BTreeSet<u32>,
    mut p: BTreeSet<u32>,
    mut x: BTreeSet<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.iter().copied().collect());
        return;
    }
    let pivot = p
        .union(&x)
        .max_by_key(|&&u| p.intersection(&adj[u as usize]).count())
        .copied();
    let todo: Vec<u32> = match pivot {
        Some(u) => p.difference(&adj[u as usize]).copied().collect(),
        None => p.iter().copied().collect(),
    };
    for v in todo {
        let nv = &adj[v as usize];
        r.insert(v);
        oracle_recurse(
            adj,
            r,
            p.intersection(nv).copied().collect(),
            x.intersection(nv).copied().collect(),
            out,
        );
        r.remove(&v);
        p.remove(&v);
        x.insert(v);
    }
}

/// Number of cliques per cardinality.
pub fn cardinality_histogram(cliques: &CliqueSet) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for c in cliques {
        *hist.entry(c.len()).or_insert(0) += 1;
    }
    hist
}
