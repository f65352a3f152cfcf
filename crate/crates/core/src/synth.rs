//! Seeded synthetic point sets for benchmarks and statistical tests.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::model::{Dims, ObjectType, SpatialObject};

/// Gaussian blobs: `centers` uniform in the box, each point assigned to a
/// uniformly chosen center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub centers: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    /// Box side lengths in Mpc; two or three entries.
    pub extent: Vec<f64>,
    pub type_weights: Vec<(ObjectType, f64)>,
    pub seed: u64,
    pub clustering: Option<ClusterSpec>,
}

impl SynthSpec {
    /// Uniform points in a square/cubic box of side `side`.
    pub fn uniform(n: usize, dims: Dims, side: f64, type_weights: Vec<(ObjectType, f64)>, seed: u64) -> Self {
        SynthSpec {
            n,
            extent: vec![side; dims.count()],
            type_weights,
            seed,
            clustering: None,
        }
    }

    fn validate(&self) -> Result<Dims> {
        let dims = Dims::from_count(self.extent.len())?;
        if self.extent.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::input("box extents must be positive"));
        }
        if self.type_weights.is_empty() {
            return Err(Error::input("at least one type weight is required"));
        }
        if self.type_weights.iter().any(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::input("type weights must be non-negative"));
        }
        let total: f64 = self.type_weights.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("type weights sum to {total}, expected 1")));
        }
        if let Some(c) = self.clustering {
            if c.centers == 0 || !(c.sigma.is_finite() && c.sigma > 0.0) {
                return Err(Error::input("clustering needs at least one center and a positive sigma"));
            }
        }
        Ok(dims)
    }
}

/// Uniform weights over `labels`.
pub fn equal_weights(labels: &[&str]) -> Result<Vec<(ObjectType, f64)>> {
    let w = 1.0 / labels.len().max(1) as f64;
    labels.iter().map(|l| Ok((ObjectType::new(*l)?, w))).collect()
}

/// Points per Mpc^dims giving `mean_neighbors` expected τ-neighbors per point.
pub fn density_for_mean_neighbors(mean_neighbors: f64, tau: f64, dims: Dims) -> f64 {
    let ball = match dims {
        Dims::Two => std::f64::consts::PI * tau * tau,
        Dims::Three => 4.0 / 3.0 * std::f64::consts::PI * tau.powi(3),
    };
    mean_neighbors / ball
}

/// Side of the box holding `n` points at `density`.
pub fn side_for_density(n: usize, density: f64, dims: Dims) -> f64 {
    (n.max(1) as f64 / density).powf(1.0 / dims.count() as f64)
}

/// Generates `spec.n` points with ids `s0, s1, …`. Same spec, same output.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Vec<SpatialObject>> {
    let dims = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let types = WeightedIndex::new(spec.type_weights.iter().map(|(_, w)| *w))
        .map_err(|e| Error::input(format!("invalid type weights: {e}")))?;

    let centers: Vec<Vec<f64>> = match spec.clustering {
        Some(c) => (0..c.centers)
            .map(|_| spec.extent.iter().map(|&e| rng.gen_range(0.0..e)).collect())
            .collect(),
        None => Vec::new(),
    };
    let noise = spec
        .clustering
        .map(|c| Normal::new(0.0, c.sigma).map_err(|e| Error::input(e.to_string())))
        .transpose()?;

    let mut out = Vec::with_capacity(spec.n);
    let mut coords = vec![0.0; dims.count()];
    for i in 0..spec.n {
        match (&noise, centers.is_empty()) {
            (Some(normal), false) => {
                let center = &centers[rng.gen_range(0..centers.len())];
                for (slot, c) in coords.iter_mut().zip(center) {
                    *slot = c + normal.sample(&mut rng);
                }
            }
            _ => {
                for (slot, &e) in coords.iter_mut().zip(&spec.extent) {
                    *slot = rng.gen_range(0.0..e);
                }
            }
        }
        let kind = spec.type_weights[types.sample(&mut rng)].0.clone();
        out.push(SpatialObject::new(format!("s{i}"), kind, &coords)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty() {
        let spec = SynthSpec::uniform(0, Dims::Two, 10.0, equal_weights(&["A"]).unwrap(), 1);
        assert!(generate_synthetic(&spec).unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec::uniform(1000, Dims::Three, 50.0, equal_weights(&["A", "B"]).unwrap(), 7);
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
        let clustered = SynthSpec {
            clustering: Some(ClusterSpec { centers: 5, sigma: 2.0 }),
            ..spec.clone()
        };
        assert_eq!(generate_synthetic(&clustered).unwrap(), generate_synthetic(&clustered).unwrap());
        let other = SynthSpec { seed: 8, ..spec.clone() };
        assert_ne!(generate_synthetic(&spec).unwrap(), generate_synthetic(&other).unwrap());
    }

    #[test]
    fn type_counts_are_binomial() {
        // Binomial(1000, 0.5): σ ≈ 15.8, so 4σ ≈ 63.
        let sigma = (1000.0f64 * 0.25).sqrt();
        for seed in 0..20 {
            let spec = SynthSpec::uniform(1000, Dims::Two, 10.0, equal_weights(&["A", "B"]).unwrap(), seed);
            let pts = generate_synthetic(&spec).unwrap();
            let a = pts.iter().filter(|p| p.kind.as_str() == "A").count() as f64;
            assert!((a - 500.0).abs() <= 4.0 * sigma, "seed {seed}: {a} A's");
        }
    }

    #[test]
    fn stays_in_box() {
        let spec = SynthSpec {
            n: 500,
            extent: vec![3.0, 7.0],
            type_weights: equal_weights(&["A"]).unwrap(),
            seed: 3,
            clustering: None,
        };
        for p in generate_synthetic(&spec).unwrap() {
            let c = p.coords.as_slice();
            assert!((0.0..3.0).contains(&c[0]) && (0.0..7.0).contains(&c[1]));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let bad_weights = vec![(ObjectType::new("A").unwrap(), 0.3)];
        assert!(generate_synthetic(&SynthSpec::uniform(5, Dims::Two, 1.0, bad_weights, 0)).is_err());
        assert!(generate_synthetic(&SynthSpec::uniform(5, Dims::Two, 1.0, vec![], 0)).is_err());
        assert!(generate_synthetic(&SynthSpec::uniform(5, Dims::Two, -1.0, equal_weights(&["A"]).unwrap(), 0)).is_err());
    }

    #[test]
    fn density_helpers() {
        let rho = density_for_mean_neighbors(2.0, 1.0, Dims::Two);
        assert!((rho * std::f64::consts::PI - 2.0).abs() < 1e-12);
        let side = side_for_density(100, 4.0, Dims::Two);
        assert!((side - 5.0).abs() < 1e-12);
    }
}
