//! Shared data types: point sets, squared-distance matrices, partitions and
//! their ratio-cut encodings, plus pair indexing used across the crate.
//!
//! All indices are 0-based and pairs `(i, j)` with `i < j` are ordered
//! lexicographically; [`pair_index`] fixes that convention once for every
//! module.

use std::io::{Read, Write};

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of unordered pairs over `n` items.
pub fn num_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Maps a pair `(i, j)` with `0 <= i < j < n` to its lexicographic rank in
/// `[0, n(n-1)/2)`.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if j >= n || i >= j {
        return Err(Error::invalid(format!(
            "pair ({i}, {j}) out of range for n = {n}"
        )));
    }
    Ok(i * (2 * n - i - 1) / 2 + (j - i - 1))
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(idx: usize, n: usize) -> Result<(usize, usize)> {
    if idx >= num_pairs(n) {
        return Err(Error::invalid(format!(
            "pair index {idx} out of range for n = {n}"
        )));
    }
    let mut i = 0;
    let mut offset = 0;
    while offset + (n - i - 1) <= idx {
        offset += n - i - 1;
        i += 1;
    }
    Ok((i, i + 1 + (idx - offset)))
}

/// Unchecked variant of [`pair_index`] for hot loops; `i < j < n` required.
#[inline]
pub fn pair_index_unchecked(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// A finite set of points in Euclidean space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    m: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates (`n` rows of length `m`).
    pub fn new(n: usize, m: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid("point set needs n >= 1 and m >= 1"));
        }
        if coords.len() != n * m {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                n * m,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        Ok(PointSet { n, m, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("ragged coordinate rows"));
        }
        PointSet::new(n, m, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.m..(i + 1) * self.m]
    }

    /// Writes the set as CSV with header `x0,...,x{m-1}`, one point per row.
    pub fn to_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let header: Vec<String> = (0..self.m).map(|d| format!("x{d}")).collect();
        w.write_record(&header)?;
        for i in 0..self.n {
            let row: Vec<String> = self.point(i).iter().map(|c| format!("{c}")).collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(source);
        let m = r.headers()?.len();
        let mut coords = Vec::new();
        let mut n = 0;
        for record in r.records() {
            let record = record?;
            for field in record.iter() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad coordinate {field:?}")))?;
                coords.push(v);
            }
            n += 1;
        }
        PointSet::new(n, m, coords)
    }
}

/// Symmetric matrix of squared Euclidean distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit entries (row-major `n x n`), checking
    /// symmetry, nonnegativity and the zero diagonal.
    pub fn from_entries(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::invalid("distance matrix shape mismatch"));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::invalid("nonzero diagonal in distance matrix"));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 || (v - d[j * n + i]).abs() > 0.0 {
                    return Err(Error::invalid("distance matrix not symmetric nonnegative"));
                }
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }
}

/// `d_ij = ||x_i - x_j||^2` for every pair of points.
pub fn squared_distance_matrix(points: &PointSet) -> DistanceMatrix {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = points
                .point(i)
                .iter()
                .zip(points.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix { n, d }
}

/// An assignment of `n` points to labeled clusters.
///
/// Labels are canonicalized to first-occurrence order, so two assignments
/// that induce the same set partition compare equal (the declared budget `k`
/// does not participate in equality). `num_used()` many labels actually
/// occur.
#[derive(Debug, Clone, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    k: usize,
    assign: Vec<usize>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.assign == other.assign
    }
}

impl Partition {
    /// Builds a partition from raw labels, canonicalizing label order.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        let n = labels.len();
        if n == 0 || k == 0 {
            return Err(Error::invalid("partition needs n >= 1 and k >= 1"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::invalid(format!("label {bad} out of range for k = {k}")));
        }
        let mut remap = vec![usize::MAX; k];
        let mut next = 0;
        let assign = labels
            .iter()
            .map(|&l| {
                if remap[l] == usize::MAX {
                    remap[l] = next;
                    next += 1;
                }
                remap[l]
            })
            .collect();
        Ok(Partition { n, k, assign })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.assign
    }

    /// Number of labels that actually occur.
    pub fn num_used(&self) -> usize {
        self.assign.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// True when every label in `[k]` occurs at least once.
    pub fn is_exact(&self) -> bool {
        self.num_used() == self.k
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_used()];
        for &l in &self.assign {
            sizes[l] += 1;
        }
        sizes
    }

    /// Point indices grouped by cluster label.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_used()];
        for (i, &l) in self.assign.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Writes the assignment as a one-column CSV with header `label`.
    pub fn to_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["label"])?;
        for &l in &self.assign {
            w.write_record([l.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(source: R, k: usize) -> Result<Self> {
        let mut r = csv::Reader::from_reader(source);
        let mut labels = Vec::new();
        for record in r.records() {
            let record = record?;
            let field = record
                .get(0)
                .ok_or_else(|| Error::invalid("empty label row"))?;
            labels.push(
                field
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad label {field:?}")))?,
            );
        }
        Partition::from_labels(&labels, k)
    }
}

/// Exact rational helper: `1/s`.
fn one_over(s: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(s))
}

/// Pair-indexed encoding of a clustering: `1/|cluster|` inside a cluster,
/// `0` across clusters. Entries are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatioCutVector {
    n: usize,
    x: Vec<BigRational>,
}

impl RatioCutVector {
    pub fn from_entries(n: usize, x: Vec<BigRational>) -> Result<Self> {
        if x.len() != num_pairs(n) {
            return Err(Error::invalid("ratio-cut vector length mismatch"));
        }
        Ok(RatioCutVector { n, x })
    }

    pub fn len_points(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.x
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        debug_assert!(i < j);
        &self.x[pair_index_unchecked(i, j, self.n)]
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.x
            .iter()
            .map(|r| rational_to_f64(r))
            .collect()
    }

    /// Recovers the inducing partition exactly, or `None` when the entries
    /// are not of ratio-cut form.
    pub fn to_partition(&self) -> Option<Partition> {
        let n = self.n;
        let mut labels = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            if labels[i] != usize::MAX {
                continue;
            }
            labels[i] = next;
            // flood the connected component of positive entries
            let mut stack = vec![i];
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    if w == v || labels[w] != usize::MAX {
                        continue;
                    }
                    let (a, b) = if v < w { (v, w) } else { (w, v) };
                    if !self.entry(a, b).is_zero() {
                        labels[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        let partition = Partition::from_labels(&labels, next).ok()?;
        let rebuilt = ratio_cut_vector(&partition);
        (rebuilt == *self).then_some(partition)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    // entries in this crate stay tiny; the i64 path is always exact here
    let num = r.numer();
    let den = r.denom();
    match (i64::try_from(num), i64::try_from(den)) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => {
            let digits = |b: &BigInt| b.to_string().parse::<f64>().unwrap_or(f64::NAN);
            digits(num) / digits(den)
        }
    }
}

/// Ratio-cut encoding of a partition.
pub fn ratio_cut_vector(p: &Partition) -> RatioCutVector {
    let n = p.len();
    let sizes = p.cluster_sizes();
    let labels = p.labels();
    let mut x = vec![BigRational::zero(); num_pairs(n)];
    for i in 0..n {
        for j in (i + 1)..n {
            if labels[i] == labels[j] {
                x[pair_index_unchecked(i, j, n)] = one_over(sizes[labels[i]]);
            }
        }
    }
    RatioCutVector { n, x }
}

/// Symmetric `n x n` matrix `sum_k (1/|cluster_k|) 1_k 1_k^T` of an exact
/// partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionMatrix {
    n: usize,
    z: Vec<f64>,
}

impl PartitionMatrix {
    pub fn from_partition(p: &Partition) -> Result<Self> {
        if !p.is_exact() {
            return Err(Error::invalid("partition matrix needs an exact-K partition"));
        }
        let n = p.len();
        let sizes = p.cluster_sizes();
        let labels = p.labels();
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    z[i * n + j] = 1.0 / sizes[labels[i]] as f64;
                }
            }
        }
        Ok(PartitionMatrix { n, z })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.z
    }
}

/// Total within-cluster sum of squared distances to cluster centroids.
pub fn kmeans_cost(points: &PointSet, p: &Partition) -> Result<f64> {
    if p.len() != points.len() {
        return Err(Error::invalid("partition/point count mismatch"));
    }
    if !p.is_exact() {
        return Err(Error::invalid("kmeans cost needs every cluster nonempty"));
    }
    let m = points.dim();
    let sizes = p.cluster_sizes();
    let mut centroids = vec![0.0; sizes.len() * m];
    for (i, &l) in p.labels().iter().enumerate() {
        for (d, &c) in points.point(i).iter().enumerate() {
            centroids[l * m + d] += c;
        }
    }
    for (l, &s) in sizes.iter().enumerate() {
        for d in 0..m {
            centroids[l * m + d] /= s as f64;
        }
    }
    let mut cost = 0.0;
    for (i, &l) in p.labels().iter().enumerate() {
        cost += points
            .point(i)
            .iter()
            .zip(&centroids[l * m..(l + 1) * m])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    Ok(cost)
}

/// Default infinity-norm tolerance for partition-matrix detection.
pub const DETECT_TOL: f64 = 1e-6;

/// Tries to read a clustering off a float pair vector.
///
/// Clusters are taken as connected components of the graph
/// `{(i, j) : x_ij > tol}`; the candidate is accepted only when its exact
/// ratio-cut vector matches `x` entrywise within `tol`.
pub fn detect_partition_matrix(x: &[f64], n: usize, tol: f64) -> Option<Partition> {
    if x.len() != num_pairs(n) || x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if labels[i] != usize::MAX {
            continue;
        }
        labels[i] = next;
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if labels[w] != usize::MAX || w == v {
                    continue;
                }
                let (a, b) = if v < w { (v, w) } else { (w, v) };
                if x[pair_index_unchecked(a, b, n)] > tol {
                    labels[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    let partition = Partition::from_labels(&labels, next).ok()?;
    let rebuilt = ratio_cut_vector(&partition).to_f64_vec();
    let ok = rebuilt
        .iter()
        .zip(x)
        .all(|(a, b)| (a - b).abs() <= tol);
    ok.then_some(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pair_index_convention() {
        assert_eq!(pair_index(0, 1, 4).unwrap(), 0);
        assert_eq!(pair_index(0, 3, 4).unwrap(), 2);
        assert_eq!(pair_index(2, 3, 4).unwrap(), 5);
        assert!(pair_index(1, 1, 4).is_err());
        assert!(pair_index(2, 1, 4).is_err());
        assert!(pair_index(0, 4, 4).is_err());
    }

    #[test]
    fn pair_index_round_trips_up_to_n_50() {
        for n in 2..=50 {
            let mut seen = vec![false; num_pairs(n)];
            for i in 0..n {
                for j in (i + 1)..n {
                    let idx = pair_index(i, j, n).unwrap();
                    assert!(!seen[idx]);
                    seen[idx] = true;
                    assert_eq!(pair_from_index(idx, n).unwrap(), (i, j));
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn distance_matrix_matches_definition() {
        let pts = PointSet::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = squared_distance_matrix(&pts);
        assert_eq!(d.get(0, 1), 25.0);
        assert_eq!(d.get(1, 0), 25.0);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn distance_matrix_matches_naive_recomputation() {
        let pts = PointSet::from_rows(&[
            vec![0.3, -1.2],
            vec![2.5, 0.1],
            vec![-0.7, 0.9],
        ])
        .unwrap();
        let d = squared_distance_matrix(&pts);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for t in 0..2 {
                    let diff = pts.point(i)[t] - pts.point(j)[t];
                    acc += diff * diff;
                }
                assert_relative_eq!(d.get(i, j), acc, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(PointSet::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(PointSet::from_rows(&[vec![f64::INFINITY, 0.0]]).is_err());
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn ratio_cut_vector_examples() {
        let single = Partition::from_labels(&[0, 0, 0], 1).unwrap();
        assert_eq!(
            ratio_cut_vector(&single).entries(),
            &[rat(1, 3), rat(1, 3), rat(1, 3)]
        );

        let split = Partition::from_labels(&[0, 1, 1], 2).unwrap();
        assert_eq!(
            ratio_cut_vector(&split).entries(),
            &[rat(0, 1), rat(0, 1), rat(1, 2)]
        );

        let pairs = Partition::from_labels(&[0, 0, 1, 1], 2).unwrap();
        let x = ratio_cut_vector(&pairs);
        assert_eq!(*x.entry(0, 1), rat(1, 2));
        assert_eq!(*x.entry(2, 3), rat(1, 2));
        assert_eq!(*x.entry(0, 2), rat(0, 1));
        assert_eq!(*x.entry(1, 3), rat(0, 1));
    }

    #[test]
    fn kmeans_cost_examples() {
        let pts = PointSet::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let one = Partition::from_labels(&[0, 0], 1).unwrap();
        assert_relative_eq!(kmeans_cost(&pts, &one).unwrap(), 2.0);

        let singletons = Partition::from_labels(&[0, 1], 2).unwrap();
        assert_relative_eq!(kmeans_cost(&pts, &singletons).unwrap(), 0.0);

        let not_exact = Partition::from_labels(&[0, 0], 2).unwrap();
        assert!(kmeans_cost(&pts, &not_exact).is_err());
    }

    #[test]
    fn detect_round_trips_exact_vectors() {
        let p = Partition::from_labels(&[0, 1, 0, 2, 1], 3).unwrap();
        let x = ratio_cut_vector(&p).to_f64_vec();
        let got = detect_partition_matrix(&x, 5, DETECT_TOL).unwrap();
        assert_eq!(got, p);
    }

    #[test]
    fn detect_single_cluster_from_uniform_entries() {
        let x = vec![0.2; num_pairs(5)];
        let got = detect_partition_matrix(&x, 5, DETECT_TOL).unwrap();
        assert_eq!(got.num_used(), 1);
    }

    #[test]
    fn detect_rejects_midpoints() {
        let a = ratio_cut_vector(&Partition::from_labels(&[0, 0, 1, 1], 2).unwrap());
        let b = ratio_cut_vector(&Partition::from_labels(&[0, 1, 0, 1], 2).unwrap());
        let mid: Vec<f64> = a
            .to_f64_vec()
            .iter()
            .zip(b.to_f64_vec())
            .map(|(u, v)| 0.5 * (u + v))
            .collect();
        assert!(detect_partition_matrix(&mid, 4, DETECT_TOL).is_none());
    }

    #[test]
    fn partition_matrix_invariants() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 1], 2).unwrap();
        let z = PartitionMatrix::from_partition(&p).unwrap();
        let n = z.len();
        let mut trace = 0.0;
        for i in 0..n {
            trace += z.get(i, i);
            let row: f64 = (0..n).map(|j| z.get(i, j)).sum();
            assert_relative_eq!(row, 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(trace, 2.0, epsilon = 1e-12);
        assert!(z.entries().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn csv_round_trips() {
        let pts = PointSet::from_rows(&[vec![1.5, -2.0], vec![0.25, 3.0]]).unwrap();
        let mut buf = Vec::new();
        pts.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1"));
        let back = PointSet::from_csv(&buf[..]).unwrap();
        assert_eq!(back, pts);

        let p = Partition::from_labels(&[0, 1, 1, 0], 2).unwrap();
        let mut buf = Vec::new();
        p.to_csv(&mut buf).unwrap();
        let back = Partition::from_csv(&buf[..], 2).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        // cost through centroids must agree with the pair form
        // sum d_ij * X_ij and the matrix form 0.5 * <D, Z>.
        #[test]
        fn objective_equivalence(
            n in 2usize..10,
            k in 1usize..4,
            seed in 0u64..500,
        ) {
            let k = k.min(n);
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coords: Vec<f64> = (0..n * 2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let pts = PointSet::new(n, 2, coords).unwrap();
            // exact-k labels: force every label to occur
            let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
            for l in labels.iter_mut() {
                if rng.gen_bool(0.5) {
                    *l = rng.gen_range(0..k);
                }
            }
            for (slot, l) in labels.iter_mut().take(k).enumerate() {
                *l = slot;
            }
            let p = Partition::from_labels(&labels, k).unwrap();
            prop_assume!(p.is_exact());

            let d = squared_distance_matrix(&pts);
            let cost = kmeans_cost(&pts, &p).unwrap();

            let x = ratio_cut_vector(&p).to_f64_vec();
            let mut pair_form = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    pair_form += d.get(i, j) * x[pair_index_unchecked(i, j, n)];
                }
            }

            let z = PartitionMatrix::from_partition(&p).unwrap();
            let mut matrix_form = 0.0;
            for i in 0..n {
                for j in 0..n {
                    matrix_form += d.get(i, j) * z.get(i, j);
                }
            }

            prop_assert!((cost - pair_form).abs() <= 1e-9 * (1.0 + cost.abs()));
            prop_assert!((cost - 0.5 * matrix_form).abs() <= 1e-9 * (1.0 + cost.abs()));
        }

        // recovering the partition from its own encoding is the identity
        #[test]
        fn detect_inverts_ratio_cut(n in 1usize..9, seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let p = Partition::from_labels(&labels, n).unwrap();
            let x = ratio_cut_vector(&p).to_f64_vec();
            let got = detect_partition_matrix(&x, n, DETECT_TOL);
            prop_assert_eq!(got, Some(p));
        }
    }
}
