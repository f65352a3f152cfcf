//! Runtime sweeps over uniform synthetic data at fixed density.

use std::fmt::Write as _;
use std::time::Instant;

use crate::clique::{grid_neighborhoods, mine_maximal_cliques};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{validate_tau, Dataset, Dims};
use crate::synth::{equal_weights, generate_synthetic, side_for_density, SynthSpec};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub taus: Vec<f64>,
    pub seed: u64,
    /// Points per Mpc^dims, held fixed while `n` varies.
    pub density: f64,
    pub dims: Dims,
    /// Timed runs per row; the fastest is reported.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10_000, 20_000, 40_000, 80_000],
            taus: vec![1.0],
            seed: 0,
            density: 0.5,
            dims: Dims::Two,
            repeats: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub tau: f64,
    pub wall_ms: f64,
    pub clique_count: usize,
}

/// The dataset a bench row runs on: `n` uniform points at `density`.
pub fn bench_dataset(n: usize, density: f64, dims: Dims, seed: u64) -> Result<Dataset> {
    let side = side_for_density(n, density, dims);
    let spec = SynthSpec::uniform(n, dims, side, equal_weights(&["A", "B", "C", "D"])?, seed);
    Dataset::new(dims, generate_synthetic(&spec)?)
}

/// Grid build, neighborhood lists and clique mining for one dataset.
pub fn time_mining(dataset: &Dataset, tau: f64, exec: Execution) -> Result<(f64, usize)> {
    let start = Instant::now();
    let (lists, graph) = grid_neighborhoods(dataset, tau, exec)?;
    let cliques = mine_maximal_cliques(&lists, &graph, exec);
    Ok((start.elapsed().as_secs_f64() * 1e3, cliques.len()))
}

pub fn run_bench(cfg: &BenchConfig, exec: Execution) -> Result<Vec<BenchRow>> {
    if !(cfg.density.is_finite() && cfg.density > 0.0) {
        return Err(Error::input(format!("density must be positive, got {}", cfg.density)));
    }
    let mut rows = Vec::new();
    for &tau in &cfg.taus {
        validate_tau(tau)?;
        for &n in &cfg.sizes {
            if n == 0 {
                rows.push(BenchRow {
                    n,
                    tau,
                    wall_ms: 0.0,
                    clique_count: 0,
                });
                continue;
            }
            let ds = bench_dataset(n, cfg.density, cfg.dims, cfg.seed)?;
            let mut best = f64::INFINITY;
            let mut count = 0;
            for _ in 0..cfg.repeats.max(1) {
                let (ms, c) = time_mining(&ds, tau, exec)?;
                best = best.min(ms);
                count = c;
            }
            log::info!("n={n} tau={tau}: {count} cliques in {best:.3} ms");
            rows.push(BenchRow {
                n,
                tau,
                wall_ms: best,
                clique_count: count,
            });
        }
    }
    Ok(rows)
}

pub fn render_rows(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,tau,wall_ms,clique_count\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.3},{}", r.n, r.tau, r.wall_ms, r.clique_count);
    }
    out
}
