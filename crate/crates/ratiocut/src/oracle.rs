//! Ground-truth clustering solvers: exhaustive K-means over all exact-K set
//! partitions (restricted-growth-string enumeration) and Lloyd's heuristic
//! with random restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{kmeans_cost, Partition, PointSet};
use crate::{Error, Result};

/// Size guard for [`exact_kmeans`]; combinatorial growth beyond this is
/// impractical.
fn check_enumeration_guard(n: usize, k: usize) -> Result<()> {
    let ok = (k <= 3 && n <= 12) || (k <= 5 && n <= 10);
    if ok {
        Ok(())
    } else {
        Err(Error::resource(format!(
            "exhaustive K-means refused for n = {n}, K = {k}"
        )))
    }
}

/// Visits every set partition of `[n]` with at most `max_blocks` blocks, in
/// lexicographic order of the restricted growth string.
pub(crate) fn for_each_growth_string<F: FnMut(&[usize], usize)>(
    n: usize,
    max_blocks: usize,
    mut f: F,
) {
    let mut a = vec![0usize; n];
    visit(&mut a, 1, 1, max_blocks, &mut f);

    fn visit<F: FnMut(&[usize], usize)>(
        a: &mut [usize],
        pos: usize,
        blocks: usize,
        max_blocks: usize,
        f: &mut F,
    ) {
        if pos == a.len() {
            f(a, blocks);
            return;
        }
        let top = (blocks + 1).min(max_blocks);
        for label in 0..top {
            a[pos] = label;
            visit(a, pos + 1, blocks.max(label + 1), max_blocks, f);
        }
    }
}

/// Global minimizer of the K-means objective over all exact-K partitions.
///
/// Ties are broken toward the lexicographically smallest canonical
/// assignment; the enumeration order guarantees that directly.
pub fn exact_kmeans(points: &PointSet, k: usize) -> Result<(Partition, f64)> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K = {k} out of range for n = {n}")));
    }
    check_enumeration_guard(n, k)?;

    let m = points.dim();
    let sq_norms: Vec<f64> = (0..n)
        .map(|i| points.point(i).iter().map(|c| c * c).sum())
        .collect();
    let total_sq: f64 = sq_norms.iter().sum();

    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_growth_string(n, k, |labels, blocks| {
        if blocks != k {
            return;
        }
        // cost = sum ||x_i||^2 - sum_k ||cluster sum||^2 / |cluster|
        let mut sums = vec![0.0; k * m];
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (d, &c) in points.point(i).iter().enumerate() {
                sums[l * m + d] += c;
            }
        }
        let mut reduction = 0.0;
        for l in 0..k {
            let s: f64 = sums[l * m..(l + 1) * m].iter().map(|v| v * v).sum();
            reduction += s / counts[l] as f64;
        }
        let cost = total_sq - reduction;
        if best.as_ref().map_or(true, |(_, c)| cost < *c) {
            best = Some((labels.to_vec(), cost));
        }
    });

    let (labels, cost) = best.expect("exact-K partition always exists for K <= n");
    let partition = Partition::from_labels(&labels, k)?;
    // clamp the subtraction form's rounding at zero
    Ok((partition, cost.max(0.0)))
}

/// Lloyd's algorithm: best of `restarts` runs from uniformly sampled initial
/// centers. Each run alternates assignment and centroid updates until the
/// assignment stops changing; emptied clusters are reseeded from the point
/// farthest from its current center.
pub fn lloyd(points: &PointSet, k: usize, restarts: usize, seed: u64) -> Result<(Partition, f64)> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K = {k} out of range for n = {n}")));
    }
    let restarts = restarts.max(1);
    let mut best: Option<(Partition, f64)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let (p, cost) = lloyd_once(points, k, &mut rng)?;
        if best.as_ref().map_or(true, |(_, c)| cost < *c) {
            best = Some((p, cost));
        }
    }
    Ok(best.unwrap())
}

fn lloyd_once(points: &PointSet, k: usize, rng: &mut ChaCha8Rng) -> Result<(Partition, f64)> {
    let n = points.len();
    let m = points.dim();

    // distinct initial centers drawn from the points
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    while chosen.len() < k {
        let c = rng.gen_range(0..n);
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    let mut centers: Vec<f64> = chosen
        .iter()
        .flat_map(|&i| points.point(i).to_vec())
        .collect();

    let mut labels = vec![0usize; n];
    for _ in 0..200 {
        // assignment step; ties go to the lowest-index center
        let mut changed = false;
        for i in 0..n {
            let mut best_l = 0;
            let mut best_d = f64::INFINITY;
            for l in 0..k {
                let d: f64 = points
                    .point(i)
                    .iter()
                    .zip(&centers[l * m..(l + 1) * m])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d < best_d {
                    best_d = d;
                    best_l = l;
                }
            }
            if labels[i] != best_l {
                labels[i] = best_l;
                changed = true;
            }
        }

        // repair empty clusters from the farthest point
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for l in 0..k {
            if counts[l] > 0 {
                continue;
            }
            let far = (0..n)
                .max_by(|&a, &b| {
                    let da = dist_to_center(points, &centers, labels[a], a, m);
                    let db = dist_to_center(points, &centers, labels[b], b, m);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            counts[labels[far]] -= 1;
            labels[far] = l;
            counts[l] = 1;
            changed = true;
        }

        // centroid step
        let mut sums = vec![0.0; k * m];
        for (i, &l) in labels.iter().enumerate() {
            for (d, &c) in points.point(i).iter().enumerate() {
                sums[l * m + d] += c;
            }
        }
        for l in 0..k {
            for d in 0..m {
                centers[l * m + d] = sums[l * m + d] / counts[l] as f64;
            }
        }

        if !changed {
            break;
        }
    }

    let partition = Partition::from_labels(&labels, k)?;
    let cost = kmeans_cost(points, &partition)?;
    Ok((partition, cost))
}

fn dist_to_center(points: &PointSet, centers: &[f64], l: usize, i: usize, m: usize) -> f64 {
    points
        .point(i)
        .iter()
        .zip(&centers[l * m..(l + 1) * m])
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn points_1d(xs: &[f64]) -> PointSet {
        PointSet::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn obvious_two_cluster_split() {
        let pts = points_1d(&[0.0, 0.1, 10.0, 10.1]);
        let (p, cost) = exact_kmeans(&pts, 2).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
        assert_relative_eq!(cost, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn all_singletons_cost_zero() {
        let pts = points_1d(&[1.0, 4.0, -2.0, 0.5, 9.0]);
        let (p, cost) = exact_kmeans(&pts, 5).unwrap();
        assert_eq!(p.num_used(), 5);
        assert_relative_eq!(cost, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn enumeration_guard() {
        let pts = points_1d(&(0..13).map(|i| i as f64).collect::<Vec<_>>());
        assert!(matches!(exact_kmeans(&pts, 3), Err(Error::Resource(_))));
        let pts = points_1d(&(0..11).map(|i| i as f64).collect::<Vec<_>>());
        assert!(matches!(exact_kmeans(&pts, 4), Err(Error::Resource(_))));
    }

    #[test]
    fn growth_strings_count_partitions() {
        // Bell numbers B(1..6) = 1, 2, 5, 15, 52, 203
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
            let mut count = 0usize;
            for_each_growth_string(n, n, |_, _| count += 1);
            assert_eq!(count, bell);
        }
        // Stirling S(4, 2) = 7, S(5, 3) = 25
        let mut s42 = 0;
        for_each_growth_string(4, 2, |_, b| {
            if b == 2 {
                s42 += 1;
            }
        });
        assert_eq!(s42, 7);
        let mut s53 = 0;
        for_each_growth_string(5, 3, |_, b| {
            if b == 3 {
                s53 += 1;
            }
        });
        assert_eq!(s53, 25);
    }

    #[test]
    fn exact_beats_lloyd_restarts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..5 {
            let coords: Vec<f64> = (0..16).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let pts = PointSet::new(8, 2, coords).unwrap();
            let (_, exact_cost) = exact_kmeans(&pts, 2).unwrap();
            let (_, lloyd_cost) = lloyd(&pts, 2, 20, 100 + trial).unwrap();
            assert!(exact_cost <= lloyd_cost + 1e-9);
        }
    }

    #[test]
    fn lloyd_matches_exact_on_separated_data() {
        let pts = points_1d(&[0.0, 0.2, 0.4, 8.0, 8.2, 8.4]);
        let (pe, ce) = exact_kmeans(&pts, 2).unwrap();
        let (pl, cl) = lloyd(&pts, 2, 20, 3).unwrap();
        assert_eq!(pe, pl);
        assert_relative_eq!(ce, cl, epsilon = 1e-12);
    }

    #[test]
    fn lloyd_single_restart_is_deterministic() {
        let pts = points_1d(&[0.0, 1.0, 5.0, 6.0, 11.0]);
        let a = lloyd(&pts, 3, 1, 42).unwrap();
        let b = lloyd(&pts, 3, 1, 42).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
