//! Deterministic optimality machinery for the two-cluster LP relaxation:
//! per-point distance statistics, the averaged-minimum optimality condition,
//! and an explicit dual certificate (multipliers for the trace row, the row
//! sums and the triangle inequalities) proving that a planted balanced
//! clustering minimizes the relaxation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::core::{DistanceMatrix, Partition};
use crate::{Error, Result};

/// Per-point average squared distances within and across the two clusters,
/// and their grand mean `eta`.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    pub d_in: Vec<f64>,
    pub d_out: Vec<f64>,
    pub eta: f64,
}

fn two_equal_clusters(d: &DistanceMatrix, planted: &Partition) -> Result<[Vec<usize>; 2]> {
    if planted.len() != d.len() {
        return Err(Error::invalid("partition/distance size mismatch"));
    }
    if planted.num_used() != 2 {
        return Err(Error::invalid("certificate machinery needs exactly two clusters"));
    }
    let clusters = planted.clusters();
    if clusters[0].len() != clusters[1].len() {
        return Err(Error::invalid("clusters must have equal sizes"));
    }
    Ok([clusters[0].clone(), clusters[1].clone()])
}

/// Averages `d_ij` over each point's own cluster (including `j = i`, which
/// contributes zero) and over the opposite cluster.
pub fn cluster_stats(d: &DistanceMatrix, planted: &Partition) -> Result<ClusterStats> {
    let [c1, c2] = two_equal_clusters(d, planted)?;
    let h = c1.len() as f64;
    let n = d.len();
    let mut d_in = vec![0.0; n];
    let mut d_out = vec![0.0; n];
    for (own, other) in [(&c1, &c2), (&c2, &c1)] {
        for &i in own.iter() {
            d_in[i] = own.iter().map(|&j| d.get(i, j)).sum::<f64>() / h;
            d_out[i] = other.iter().map(|&j| d.get(i, j)).sum::<f64>() / h;
        }
    }
    let mean = |c: &[usize]| c.iter().map(|&i| d_in[i]).sum::<f64>() / h;
    let eta = 0.5 * (mean(&c1) + mean(&c2));
    Ok(ClusterStats { d_in, d_out, eta })
}

fn pair_margin(
    d: &DistanceMatrix,
    stats: &ClusterStats,
    other: &[usize],
    i: usize,
    j: usize,
) -> f64 {
    let h = other.len() as f64;
    let avg_min: f64 = other
        .iter()
        .map(|&k| (d.get(i, k) + stats.d_in[j]).min(d.get(j, k) + stats.d_in[i]))
        .sum::<f64>()
        / h;
    avg_min - d.get(i, j) - stats.eta
}

/// Worst slack of the optimality condition over all within-cluster pairs;
/// a nonnegative margin certifies that the planted clustering solves the
/// two-cluster LP relaxation.
pub fn check_easyc(d: &DistanceMatrix, planted: &Partition) -> Result<f64> {
    let [c1, c2] = two_equal_clusters(d, planted)?;
    let stats = cluster_stats(d, planted)?;
    let mut margin = f64::INFINITY;
    for (own, other) in [(&c1, &c2), (&c2, &c1)] {
        for (pos, &i) in own.iter().enumerate() {
            for &j in &own[pos + 1..] {
                margin = margin.min(pair_margin(d, &stats, other, i, j));
            }
        }
    }
    Ok(margin)
}

/// Dual multipliers proving optimality of the planted clustering: `omega`
/// for the trace row, `mu` for the row sums, and sparse nonnegative
/// triangle multipliers keyed by `(owner, a, b)` with `a < b`.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub omega: f64,
    pub mu: Vec<f64>,
    pub lambda: HashMap<(usize, usize, usize), f64>,
}

fn lambda_key(owner: usize, a: usize, b: usize) -> (usize, usize, usize) {
    if a < b {
        (owner, a, b)
    } else {
        (owner, b, a)
    }
}

impl Certificate {
    pub fn lambda_at(&self, owner: usize, a: usize, b: usize) -> f64 {
        self.lambda
            .get(&lambda_key(owner, a, b))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn min_lambda(&self) -> f64 {
        if self.lambda.is_empty() {
            0.0
        } else {
            self.lambda.values().cloned().fold(f64::INFINITY, f64::min)
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut lambda: Vec<(usize, usize, usize, f64)> = self
            .lambda
            .iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|(&(i, j, k), &v)| (i, j, k, v))
            .collect();
        lambda.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let dump = CertificateDump {
            omega: self.omega,
            mu: self.mu.clone(),
            lambda,
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: CertificateDump = serde_json::from_str(text)?;
        let lambda = dump
            .lambda
            .into_iter()
            .map(|(i, j, k, v)| ((i, j, k), v))
            .collect();
        Ok(Certificate {
            omega: dump.omega,
            mu: dump.mu,
            lambda,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateDump {
    omega: f64,
    mu: Vec<f64>,
    lambda: Vec<(usize, usize, usize, f64)>,
}

/// Builds the closed-form certificate. Refuses when the optimality margin is
/// negative: the construction would need a negative multiplier and prove
/// nothing.
pub fn build_certificate(d: &DistanceMatrix, planted: &Partition) -> Result<Certificate> {
    let [c1, c2] = two_equal_clusters(d, planted)?;
    let stats = cluster_stats(d, planted)?;
    let margin = check_easyc(d, planted)?;
    if margin < 0.0 {
        return Err(Error::invalid(format!(
            "optimality margin {margin} is negative; certificate construction refused"
        )));
    }
    let n = d.len();
    let h = c1.len() as f64;

    let mu: Vec<f64> = (0..n)
        .map(|i| -stats.d_in[i] - stats.d_out[i] + stats.eta)
        .collect();
    let omega = 0.5
        * (0..n)
            .map(|i| stats.d_out[i] - stats.d_in[i])
            .sum::<f64>();

    let mut lambda = HashMap::new();
    for (own, other) in [(&c1, &c2), (&c2, &c1)] {
        for (pos, &i) in own.iter().enumerate() {
            for &j in &own[pos + 1..] {
                // spread the per-pair residual uniformly over the opposite
                // cluster; nonnegativity of the spread is the margin itself
                let spread = pair_margin(d, &stats, other, i, j) / h;
                for &k in other.iter() {
                    let delta =
                        (d.get(j, k) - d.get(i, k) + stats.d_in[i] - stats.d_in[j]) / h;
                    lambda.insert(lambda_key(i, j, k), delta.max(0.0) + spread);
                    lambda.insert(lambda_key(j, i, k), (-delta).max(0.0) + spread);
                }
            }
        }
    }
    Ok(Certificate { omega, mu, lambda })
}

/// Residual report of a certificate against the dual constraints.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// worst pair-row residual `mu_i + mu_j + sum(lambda...) + 2 d_ij`
    pub max_pair_residual: f64,
    /// worst point-row residual `omega + mu_i - sum(lambda...)`
    pub max_point_residual: f64,
    pub min_lambda: f64,
    /// gap against the planted clustering's dual value
    pub duality_gap: f64,
    pub pass: bool,
}

/// Checks the dual constraints, multiplier nonnegativity and strong duality
/// at the planted clustering; `tol` is absolute, scaled by `max(1, max d)`.
pub fn verify_certificate(
    cert: &Certificate,
    d: &DistanceMatrix,
    planted: &Partition,
    tol: f64,
) -> Result<VerifyReport> {
    let [c1, c2] = two_equal_clusters(d, planted)?;
    let n = d.len();
    if cert.mu.len() != n {
        return Err(Error::invalid("certificate size mismatch"));
    }

    let mut max_pair = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = cert.mu[i] + cert.mu[j] + 2.0 * d.get(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                acc += cert.lambda_at(i, j, k) + cert.lambda_at(j, i, k)
                    - cert.lambda_at(k, i, j);
            }
            max_pair = max_pair.max(acc.abs());
        }
    }

    let mut max_point = 0.0_f64;
    let mut lam_sum = vec![0.0; n];
    for (&(owner, _, _), &v) in &cert.lambda {
        lam_sum[owner] += v;
    }
    for i in 0..n {
        max_point = max_point.max((cert.omega + cert.mu[i] - lam_sum[i]).abs());
    }

    // dual objective must meet the planted cost: strong duality
    let within: f64 = [&c1, &c2]
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .flat_map(|(pos, &i)| c[pos + 1..].iter().map(move |&j| (i, j)))
                .map(|(i, j)| d.get(i, j))
                .sum::<f64>()
        })
        .sum();
    let target = -(4.0 / n as f64) * within;
    let dual_value = 2.0 * cert.omega + cert.mu.iter().sum::<f64>();
    let duality_gap = (dual_value - target).abs();

    let min_lambda = cert.min_lambda();
    let scale = 1.0f64.max(d.max_entry());
    let tol_eff = tol * scale;
    let pass = max_pair <= tol_eff
        && max_point <= tol_eff
        && min_lambda >= -tol_eff
        && duality_gap <= tol_eff;
    Ok(VerifyReport {
        max_pair_residual: max_pair,
        max_point_residual: max_point,
        min_lambda,
        duality_gap,
        pass,
    })
}

/// Default absolute verification tolerance (scaled by the largest distance).
pub const VERIFY_TOL: f64 = 1e-8;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{kmeans_cost, squared_distance_matrix, PointSet};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn points_1d(xs: &[f64]) -> PointSet {
        PointSet::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    fn planted_halves(n: usize) -> Partition {
        let labels: Vec<usize> = (0..n).map(|i| if i < n / 2 { 0 } else { 1 }).collect();
        Partition::from_labels(&labels, 2).unwrap()
    }

    #[test]
    fn stats_on_hand_instance() {
        let pts = points_1d(&[0.0, 2.0, 10.0, 12.0]);
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(4);
        let stats = cluster_stats(&d, &p).unwrap();
        assert_relative_eq!(stats.d_in[0], 2.0); // (0 + 4) / 2
        assert_relative_eq!(stats.d_in[1], 2.0);
        assert_relative_eq!(stats.eta, 2.0);
        assert_relative_eq!(stats.d_out[0], (100.0 + 144.0) / 2.0);
    }

    #[test]
    fn stats_on_identical_points() {
        let pts = points_1d(&[3.0; 6]);
        let d = squared_distance_matrix(&pts);
        let stats = cluster_stats(&d, &planted_halves(6)).unwrap();
        assert!(stats.d_in.iter().all(|&v| v == 0.0));
        assert!(stats.d_out.iter().all(|&v| v == 0.0));
        assert_eq!(stats.eta, 0.0);
    }

    #[test]
    fn stats_match_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let coords: Vec<f64> = (0..20).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let pts = PointSet::new(10, 2, coords).unwrap();
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(10);
        let stats = cluster_stats(&d, &p).unwrap();
        for i in 0..10 {
            let own: Vec<usize> = if i < 5 { (0..5).collect() } else { (5..10).collect() };
            let other: Vec<usize> = if i < 5 { (5..10).collect() } else { (0..5).collect() };
            let din: f64 = own.iter().map(|&j| d.get(i, j)).sum::<f64>() / 5.0;
            let dout: f64 = other.iter().map(|&j| d.get(i, j)).sum::<f64>() / 5.0;
            assert!((stats.d_in[i] - din).abs() < 1e-12);
            assert!((stats.d_out[i] - dout).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unequal_clusters() {
        let pts = points_1d(&[0.0, 1.0, 2.0, 10.0]);
        let d = squared_distance_matrix(&pts);
        let p = Partition::from_labels(&[0, 0, 0, 1], 2).unwrap();
        assert!(cluster_stats(&d, &p).is_err());
    }

    #[test]
    fn margin_signs_on_separated_and_interleaved_instances() {
        let far = points_1d(&[0.0, 2.0, 10.0, 12.0]);
        let d = squared_distance_matrix(&far);
        assert!(check_easyc(&d, &planted_halves(4)).unwrap() > 0.0);

        // clusters {0, 2} and {1, 3}: thoroughly interleaved
        let pts = points_1d(&[0.0, 2.0, 1.0, 3.0]);
        let d = squared_distance_matrix(&pts);
        assert!(check_easyc(&d, &planted_halves(4)).unwrap() < 0.0);
    }

    #[test]
    fn margin_is_rigid_motion_invariant_and_scales_quadratically() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(30);
        for _ in 0..5 {
            let coords: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let pts = PointSet::new(8, 2, coords.clone()).unwrap();
            let p = planted_halves(8);
            let base = check_easyc(&squared_distance_matrix(&pts), &p).unwrap();

            // translation + rotation
            let (tx, ty) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (angle.cos(), angle.sin());
            let moved: Vec<f64> = coords
                .chunks(2)
                .flat_map(|p| [c * p[0] - s * p[1] + tx, s * p[0] + c * p[1] + ty])
                .collect();
            let moved = PointSet::new(8, 2, moved).unwrap();
            let m2 = check_easyc(&squared_distance_matrix(&moved), &p).unwrap();
            assert_relative_eq!(base, m2, epsilon = 1e-9 * (1.0 + base.abs()));

            // scaling by 3 scales every squared distance (hence the margin) by 9
            let scaled: Vec<f64> = coords.iter().map(|v| 3.0 * v).collect();
            let scaled = PointSet::new(8, 2, scaled).unwrap();
            let m3 = check_easyc(&squared_distance_matrix(&scaled), &p).unwrap();
            assert_relative_eq!(9.0 * base, m3, epsilon = 1e-8 * (1.0 + base.abs()));
        }
    }

    #[test]
    fn proof_sum_identity_holds_per_instance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let coords: Vec<f64> = (0..24).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let pts = PointSet::new(12, 2, coords).unwrap();
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(12);
        let stats = cluster_stats(&d, &p).unwrap();
        let n = 12;
        let half_diff: f64 =
            0.5 * (0..n).map(|j| stats.d_out[j] - stats.d_in[j]).sum::<f64>();
        for c in p.clusters() {
            for &i in &c {
                let lhs: f64 = c
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| stats.d_in[i] - d.get(i, j) + stats.d_out[j] - stats.eta)
                    .sum();
                let rhs = half_diff - stats.d_out[i] - stats.d_in[i] + stats.eta;
                assert!((lhs - rhs).abs() < 1e-9, "identity broke: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn certificate_mu_matches_closed_form() {
        let pts = points_1d(&[-4.0, -3.0, 0.0, 1.0]);
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(4);
        let margin = check_easyc(&d, &p).unwrap();
        assert!(margin >= 0.0, "margin {margin}");
        let stats = cluster_stats(&d, &p).unwrap();
        let cert = build_certificate(&d, &p).unwrap();
        for i in 0..4 {
            assert_relative_eq!(
                cert.mu[i],
                -stats.d_in[i] - stats.d_out[i] + stats.eta,
                epsilon = 1e-12
            );
        }
        assert!(cert.lambda.values().all(|&v| v >= 0.0));
    }

    #[test]
    fn certificate_verifies_end_to_end() {
        let cfg = crate::sbm::SbmConfig {
            m: 2,
            k: 2,
            n_total: 20,
            delta: 3.2,
            layout: crate::sbm::Layout::TwoCenters,
            seed: 60,
        };
        let (pts, planted) = crate::sbm::generate(&cfg).unwrap();
        let d = squared_distance_matrix(&pts);
        let margin = check_easyc(&d, &planted).unwrap();
        assert!(margin >= 0.0, "resample the seed: margin {margin}");
        let cert = build_certificate(&d, &planted).unwrap();
        let report = verify_certificate(&cert, &d, &planted, VERIFY_TOL).unwrap();
        assert!(
            report.pass,
            "pair {} point {} gap {}",
            report.max_pair_residual, report.max_point_residual, report.duality_gap
        );

        // the LP agrees: planted cost is optimal
        let (sol, _) = crate::lp::cutting_plane_solve_default(
            &d,
            2,
            2,
            &crate::lp::LpOptions::default(),
        )
        .unwrap();
        let cost = kmeans_cost(&pts, &planted).unwrap();
        assert_relative_eq!(sol.cost_objective(), cost, max_relative = 1e-6);
    }

    #[test]
    fn construction_refused_below_margin() {
        let pts = points_1d(&[0.0, 2.0, 1.0, 3.0]);
        let d = squared_distance_matrix(&pts);
        assert!(build_certificate(&d, &planted_halves(4)).is_err());
    }

    #[test]
    fn perturbed_certificate_fails_with_matching_residual() {
        let pts = points_1d(&[0.0, 2.0, 10.0, 12.0]);
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(4);
        let mut cert = build_certificate(&d, &p).unwrap();
        cert.mu[0] += 1e-3;
        let report = verify_certificate(&cert, &d, &p, VERIFY_TOL).unwrap();
        assert!(!report.pass);
        let worst = report.max_pair_residual.max(report.max_point_residual);
        assert!((1e-4..1e-2).contains(&worst), "residual {worst}");
    }

    #[test]
    fn zero_certificate_fails_by_twice_the_distances() {
        let pts = points_1d(&[0.0, 2.0, 10.0, 12.0]);
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(4);
        let zero = Certificate {
            omega: 0.0,
            mu: vec![0.0; 4],
            lambda: HashMap::new(),
        };
        let report = verify_certificate(&zero, &d, &p, VERIFY_TOL).unwrap();
        assert!(!report.pass);
        assert_relative_eq!(report.max_pair_residual, 2.0 * d.max_entry());
    }

    #[test]
    fn json_round_trip() {
        let pts = points_1d(&[0.0, 2.0, 10.0, 12.0]);
        let d = squared_distance_matrix(&pts);
        let p = planted_halves(4);
        let cert = build_certificate(&d, &p).unwrap();
        let json = cert.to_json().unwrap();
        assert!(json.contains("\"omega\""));
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back.mu, cert.mu);
        assert_eq!(back.omega, cert.omega);
        let report = verify_certificate(&back, &d, &p, VERIFY_TOL).unwrap();
        assert!(report.pass);
    }
}
