//! Stochastic ball model instances: cluster centers at minimum separation
//! `delta`, each cluster filled with points drawn uniformly from the unit
//! ball around its center.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::{Partition, PointSet};
use crate::{Error, Result};

/// Arrangement of cluster centers in the first two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Two centers on the first axis (K = 2).
    TwoCenters,
    /// Equilateral triangle of side `delta` (K = 3).
    Triangle,
    /// Patch of equilateral triangles with adjacent centers `delta` apart
    /// (K = 4 or 5).
    Hive,
}

/// Instance description; `generate` is a pure function of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    /// Ambient dimension.
    pub m: usize,
    /// Number of clusters.
    #[serde(rename = "K")]
    pub k: usize,
    /// Total number of points; must be a multiple of `K`.
    pub n_total: usize,
    /// Minimum pairwise distance between centers.
    pub delta: f64,
    pub layout: Layout,
    pub seed: u64,
}

impl SbmConfig {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 || self.n_total == 0 {
            return Err(Error::invalid("m, K and n_total must be positive"));
        }
        if self.n_total % self.k != 0 {
            return Err(Error::invalid("n_total must be a multiple of K"));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::invalid("delta must be finite and nonnegative"));
        }
        let compatible = match self.layout {
            Layout::TwoCenters => self.k == 2,
            Layout::Triangle => self.k == 3,
            Layout::Hive => self.k == 4 || self.k == 5,
        };
        if !compatible {
            return Err(Error::invalid(format!(
                "layout {:?} incompatible with K = {}",
                self.layout, self.k
            )));
        }
        Ok(())
    }

    /// Derives the per-trial config used by experiment sweeps.
    pub fn with_delta_and_seed(&self, delta: f64, seed: u64) -> SbmConfig {
        SbmConfig {
            delta,
            seed,
            ..self.clone()
        }
    }
}

/// One draw from the uniform distribution on the closed unit ball of `R^m`:
/// a normalized Gaussian direction scaled by `U^(1/m)`.
pub fn sample_unit_ball(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..m).map(|_| standard_normal(rng)).collect();
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue; // essentially impossible; resample the direction
        }
        let radius = rng.gen_range(0.0..=1.0_f64).powf(1.0 / m as f64);
        return dir.into_iter().map(|v| v / norm * radius).collect();
    }
}

/// Box-Muller draw from N(0, 1).
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Cluster centers for the layout, embedded in the first two coordinates.
pub fn centers(layout: Layout, k: usize, m: usize, delta: f64) -> Vec<Vec<f64>> {
    let d = delta;
    let h = d * 3f64.sqrt() / 2.0;
    let pts2: Vec<[f64; 2]> = match (layout, k) {
        (Layout::TwoCenters, 2) => vec![[0.0, 0.0], [d, 0.0]],
        (Layout::Triangle, 3) => vec![[0.0, 0.0], [d, 0.0], [d / 2.0, h]],
        (Layout::Hive, 4) => vec![[0.0, 0.0], [d, 0.0], [d / 2.0, h], [d / 2.0, -h]],
        (Layout::Hive, 5) => vec![
            [0.0, 0.0],
            [d, 0.0],
            [d / 2.0, h],
            [d / 2.0, -h],
            [-d / 2.0, h],
        ],
        _ => unreachable!("validated layout/K"),
    };
    pts2.iter()
        .map(|p| {
            let mut c = vec![0.0; m];
            c[0] = p[0];
            if m > 1 {
                c[1] = p[1];
            }
            c
        })
        .collect()
}

/// Generates a point set together with its planted partition.
///
/// Points of cluster `k` are the center plus unit-ball draws; the output is
/// a pure function of the config.
pub fn generate(config: &SbmConfig) -> Result<(PointSet, Partition)> {
    config.validate()?;
    if config.m == 1 && config.k > 2 {
        return Err(Error::invalid("layouts with K > 2 need m >= 2"));
    }
    let per_cluster = config.n_total / config.k;
    let centers = centers(config.layout, config.k, config.m, config.delta);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut coords = Vec::with_capacity(config.n_total * config.m);
    let mut labels = Vec::with_capacity(config.n_total);
    for (k, center) in centers.iter().enumerate() {
        for _ in 0..per_cluster {
            let offset = sample_unit_ball(config.m, &mut rng);
            coords.extend(center.iter().zip(&offset).map(|(c, o)| c + o));
            labels.push(k);
        }
    }
    let points = PointSet::new(config.n_total, config.m, coords)?;
    let planted = Partition::from_labels(&labels, config.k)?;
    Ok((points, planted))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn samples_stay_in_unit_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [1, 2, 3, 7] {
            for _ in 0..500 {
                assert!(norm(&sample_unit_ball(m, &mut rng)) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn mean_radius_matches_m_over_m_plus_one() {
        // E[R] for the uniform ball in dimension m is m / (m + 1).
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 100_000;
        let mean: f64 = (0..trials)
            .map(|_| norm(&sample_unit_ball(2, &mut rng)))
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "mean radius {mean}");
    }

    #[test]
    fn one_dimensional_mean_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000;
        let mean: f64 = (0..trials)
            .map(|_| sample_unit_ball(1, &mut rng)[0])
            .sum::<f64>()
            / trials as f64;
        assert!(mean.abs() < 0.02, "1-D mean {mean}");
    }

    fn config(m: usize, k: usize, n: usize, delta: f64, layout: Layout, seed: u64) -> SbmConfig {
        SbmConfig {
            m,
            k,
            n_total: n,
            delta,
            layout,
            seed,
        }
    }

    #[test]
    fn two_center_layout() {
        let cfg = config(2, 2, 10, 3.0, Layout::TwoCenters, 11);
        let c = centers(cfg.layout, cfg.k, cfg.m, cfg.delta);
        assert_eq!(c, vec![vec![0.0, 0.0], vec![3.0, 0.0]]);
        let (points, planted) = generate(&cfg).unwrap();
        assert_eq!(points.len(), 10);
        assert_eq!(planted.cluster_sizes(), vec![5, 5]);
    }

    #[test]
    fn layouts_have_min_center_distance_delta() {
        for (layout, k) in [
            (Layout::TwoCenters, 2),
            (Layout::Triangle, 3),
            (Layout::Hive, 4),
            (Layout::Hive, 5),
        ] {
            let c = centers(layout, k, 3, 2.5);
            let mut min = f64::INFINITY;
            for i in 0..k {
                for j in (i + 1)..k {
                    let d: f64 = c[i]
                        .iter()
                        .zip(&c[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    min = min.min(d);
                }
            }
            assert!((min - 2.5).abs() < 1e-12, "layout {layout:?} K={k}: {min}");
        }
    }

    #[test]
    fn points_lie_within_their_ball_and_away_from_foreign_centers() {
        let cfg = config(3, 3, 30, 4.0, Layout::Triangle, 5);
        let (points, planted) = generate(&cfg).unwrap();
        let c = centers(cfg.layout, cfg.k, cfg.m, cfg.delta);
        for i in 0..points.len() {
            let own = planted.labels()[i];
            for (k, center) in c.iter().enumerate() {
                let dist: f64 = points
                    .point(i)
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if k == own {
                    assert!(dist <= 1.0 + 1e-12);
                } else {
                    // center gap delta and radius 1 leave at least delta - 1
                    assert!(dist >= cfg.delta - 1.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = config(2, 2, 16, 2.2, Layout::TwoCenters, 99);
        let (a, pa) = generate(&cfg).unwrap();
        let (b, pb) = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(pa, pb);
    }

    #[test]
    fn rejects_incompatible_layouts() {
        assert!(generate(&config(2, 3, 9, 2.0, Layout::TwoCenters, 0)).is_err());
        assert!(generate(&config(2, 2, 8, 2.0, Layout::Hive, 0)).is_err());
        assert!(generate(&config(2, 4, 9, 2.0, Layout::Hive, 0)).is_err());
    }

    #[test]
    fn config_json_schema_round_trips() {
        let cfg = config(2, 4, 40, 1.5, Layout::Hive, 7);
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"layout\":\"hive\""));
        assert!(json.contains("\"K\":4"));
        let back: SbmConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
