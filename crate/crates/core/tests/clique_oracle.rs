use gcg::clique::ORACLE_LIMIT;
use gcg::synth::{equal_weights, generate_synthetic, ClusterSpec, SynthSpec};
use gcg::{
    brute_force_maximal_cliques, grid_neighborhoods, mine_maximal_cliques, Dataset, Dims, Execution, NeighborGraph,
};
use proptest::prelude::*;

fn dataset(n: usize, dims: Dims, side: f64, seed: u64, clustered: bool) -> Dataset {
    let mut spec = SynthSpec::uniform(n, dims, side, equal_weights(&["A", "B", "C"]).unwrap(), seed);
    if clustered {
        spec.clustering = Some(ClusterSpec { centers: 4, sigma: side / 10.0 });
    }
    Dataset::new(dims, generate_synthetic(&spec).unwrap()).unwrap()
}

fn check(ds: &Dataset, tau: f64) {
    let reference = NeighborGraph::all_pairs(ds, tau).unwrap();
    let oracle = brute_force_maximal_cliques(&reference, ORACLE_LIMIT).unwrap();

    let (lists, graph) = grid_neighborhoods(ds, tau, Execution::Parallel).unwrap();
    // grid adjacency equals the all-pairs adjacency
    for v in 0..ds.len() as u32 {
        assert_eq!(graph.neighbors(v), reference.neighbors(v));
    }
    let seq = mine_maximal_cliques(&lists, &graph, Execution::Sequential);
    let par = mine_maximal_cliques(&lists, &graph, Execution::Parallel);
    assert_eq!(seq, par);
    assert_eq!(seq, oracle, "n={} tau={tau}", ds.len());

    seq.verify(&reference).unwrap();
    // every edge lies in some clique
    for a in 0..ds.len() as u32 {
        for &b in reference.neighbors(a) {
            assert!(seq.iter().any(|c| c.members().contains(&a) && c.members().contains(&b)));
        }
    }
    // no clique contains another
    for x in seq.iter() {
        for y in seq.iter() {
            if x != y {
                assert!(!x.members().iter().all(|m| y.members().contains(m)));
            }
        }
    }
}

#[test]
fn dense_and_sparse_instances() {
    for (dims, taus) in [(Dims::Two, [0.5, 1.5, 3.0, 6.0]), (Dims::Three, [1.0, 3.0, 5.0, 8.0])] {
        for seed in 0..3 {
            for &tau in &taus {
                check(&dataset(120, dims, 20.0, seed, false), tau);
                check(&dataset(120, dims, 20.0, seed, true), tau);
            }
        }
    }
}

#[test]
fn negative_coordinates() {
    let mut ds_objs = generate_synthetic(&SynthSpec::uniform(100, Dims::Two, 10.0, equal_weights(&["A"]).unwrap(), 5)).unwrap();
    for o in &mut ds_objs {
        let c = o.coords.as_slice();
        o.coords = gcg::model::Coords::new(&[c[0] - 5.0, c[1] - 5.0]).unwrap();
    }
    check(&Dataset::new(Dims::Two, ds_objs).unwrap(), 1.2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn grid_route_equals_oracle(n in 0usize..150, three in any::<bool>(), tau in 0.3f64..5.0, seed in any::<u64>()) {
        let dims = if three { Dims::Three } else { Dims::Two };
        check(&dataset(n, dims, 15.0, seed, seed % 2 == 0), tau);
    }
}
