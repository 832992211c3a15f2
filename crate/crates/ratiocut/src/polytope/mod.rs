//! Exact rational study of the ratio-cut polytope (convex hull of ratio-cut
//! vectors over partitions into at most / exactly K clusters) and of its
//! polyhedral relaxation built from three inequality families: the trivial
//! facet, generalized triangle inequalities, and nonnegativity.
//!
//! Everything here runs in exact arithmetic — validity, facetness, vertex
//! and membership questions are combinatorial statements that float error
//! can corrupt.

mod linalg;
mod vertex_enum;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::core::{num_pairs, pair_index_unchecked, Partition, RatioCutVector};
use crate::oracle::for_each_growth_string;
use crate::{Error, Result};

use vertex_enum::Halfspace;

pub type Rat = BigRational;

fn rat_int(v: i64) -> Rat {
    Rat::from(BigInt::from(v))
}

fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// Where a constraint comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tag {
    TrivialFacet,
    AffineHull,
    GeneralizedTriangle { l: usize, t_set: Vec<usize> },
    Nonneg { i: usize, j: usize },
    ValidPair { i: usize, j: usize, t_set: Vec<usize> },
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn set(s: &[usize]) -> String {
            let inner: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", inner.join(","))
        }
        match self {
            Tag::TrivialFacet => write!(f, "trivial_facet"),
            Tag::AffineHull => write!(f, "affine_hull"),
            Tag::GeneralizedTriangle { l, t_set } => {
                write!(f, "generalized_triangle({l}, {})", set(t_set))
            }
            Tag::Nonneg { i, j } => write!(f, "nonneg({i},{j})"),
            Tag::ValidPair { i, j, t_set } => write!(f, "valid_pair({i},{j},{})", set(t_set)),
        }
    }
}

/// Sparse linear constraint over pair-indexed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    /// pair index -> coefficient; at least one entry nonzero
    pub coeffs: BTreeMap<usize, Rat>,
    pub sense: Sense,
    pub rhs: Rat,
    pub tag: Tag,
}

impl LinearConstraint {
    fn new(coeffs: BTreeMap<usize, Rat>, sense: Sense, rhs: Rat, tag: Tag) -> Self {
        debug_assert!(coeffs.values().any(|c| !c.is_zero()));
        LinearConstraint {
            coeffs,
            sense,
            rhs,
            tag,
        }
    }

    pub fn lhs_at(&self, x: &RatioCutVector) -> Rat {
        let entries = x.entries();
        let mut acc = Rat::zero();
        for (&p, c) in &self.coeffs {
            if !entries[p].is_zero() {
                acc += c * &entries[p];
            }
        }
        acc
    }

    /// Signed violation: positive means the constraint is broken.
    pub fn violation(&self, x: &RatioCutVector) -> Rat {
        let lhs = self.lhs_at(x);
        match self.sense {
            Sense::Le => lhs - &self.rhs,
            Sense::Ge => &self.rhs - lhs,
            Sense::Eq => (lhs - &self.rhs).abs(),
        }
    }

    pub fn is_satisfied_by(&self, x: &RatioCutVector) -> bool {
        self.violation(x) <= Rat::zero()
    }

    /// Dense coefficient vector over all pairs.
    pub fn dense_coeffs(&self, n: usize) -> Vec<Rat> {
        let mut row = vec![Rat::zero(); num_pairs(n)];
        for (&p, c) in &self.coeffs {
            row[p] = c.clone();
        }
        row
    }

    /// Renders `tag: sum c·X[i,j] {<=,>=,=} rhs` with rationals as `p/q`.
    pub fn render(&self, n: usize) -> String {
        let mut terms = Vec::new();
        for (&p, c) in &self.coeffs {
            let (i, j) = crate::core::pair_from_index(p, n).expect("pair index in range");
            terms.push(format!("{}·X[{},{}]", fmt_rat(c), i, j));
        }
        format!(
            "{}: {} {} {}",
            self.tag,
            terms.join(" + "),
            self.sense,
            fmt_rat(&self.rhs)
        )
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The trivial facet `sum X_ij >= (n-K)/2`, or the affine-hull equality for
/// the exactly-K variant.
pub fn trivial_constraint(n: usize, k: usize, exact: bool) -> LinearConstraint {
    let coeffs: BTreeMap<usize, Rat> = (0..num_pairs(n)).map(|p| (p, Rat::one())).collect();
    let rhs = rat(n as i64 - k as i64, 2);
    if exact {
        LinearConstraint::new(coeffs, Sense::Eq, rhs, Tag::AffineHull)
    } else {
        LinearConstraint::new(coeffs, Sense::Ge, rhs, Tag::TrivialFacet)
    }
}

/// Generalized triangle inequality for owner `l` and set `T`:
/// `2 sum_{j in T} X_lj + sum_{j not in T+l} X_lj <= 1 + sum_{i<j in T} X_ij`.
pub fn generalized_triangle(l: usize, t_set: &[usize], n: usize) -> Result<LinearConstraint> {
    if t_set.len() < 2 || t_set.contains(&l) || t_set.iter().any(|&j| j >= n) {
        return Err(Error::invalid("generalized triangle needs T ⊆ [n]∖{l}, |T| >= 2"));
    }
    let mut sorted = t_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != t_set.len() {
        return Err(Error::invalid("duplicate elements in T"));
    }
    let in_t = |j: usize| sorted.binary_search(&j).is_ok();

    let mut coeffs = BTreeMap::new();
    for j in 0..n {
        if j == l {
            continue;
        }
        let p = pair_of(l, j, n);
        let c = if in_t(j) { rat_int(2) } else { Rat::one() };
        coeffs.insert(p, c);
    }
    for (a_pos, &a) in sorted.iter().enumerate() {
        for &b in &sorted[a_pos + 1..] {
            coeffs.insert(pair_of(a, b, n), -Rat::one());
        }
    }
    Ok(LinearConstraint::new(
        coeffs,
        Sense::Le,
        Rat::one(),
        Tag::GeneralizedTriangle { l, t_set: sorted },
    ))
}

/// `X_ij >= 0`.
pub fn nonneg_constraint(i: usize, j: usize, n: usize) -> LinearConstraint {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(pair_of(i, j, n), Rat::one());
    LinearConstraint::new(coeffs, Sense::Ge, Rat::zero(), Tag::Nonneg { i, j })
}

/// Pair inequality used to separate the relaxation from the hull: with the
/// diagonal terms rewritten over pair variables it reads
/// `sum_{k in T}(X_ik + X_jk) - X_ij <= X_ii + X_jj + sum_{k<l in T} X_kl`.
pub fn valid_pair_constraint(i: usize, j: usize, t_set: &[usize], n: usize) -> Result<LinearConstraint> {
    if i == j || t_set.len() < 2 || t_set.contains(&i) || t_set.contains(&j) {
        return Err(Error::invalid("valid_pair needs distinct i, j and T ⊆ [n]∖{i,j}, |T| >= 2"));
    }
    let mut sorted = t_set.to_vec();
    sorted.sort_unstable();

    let mut coeffs: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut add = |p: usize, v: Rat| {
        let slot = coeffs.entry(p).or_insert_with(Rat::zero);
        *slot += v;
        if slot.is_zero() {
            coeffs.remove(&p);
        }
    };
    // row sums standing in for the diagonal entries
    for k in 0..n {
        if k != i {
            add(pair_of(i, k, n), Rat::one());
        }
        if k != j {
            add(pair_of(j, k, n), Rat::one());
        }
    }
    add(pair_of(i, j, n), -Rat::one());
    for &k in &sorted {
        add(pair_of(i, k, n), Rat::one());
        add(pair_of(j, k, n), Rat::one());
    }
    for (a_pos, &a) in sorted.iter().enumerate() {
        for &b in &sorted[a_pos + 1..] {
            add(pair_of(a, b, n), -Rat::one());
        }
    }
    Ok(LinearConstraint::new(
        coeffs,
        Sense::Le,
        rat_int(2),
        Tag::ValidPair { i, j, t_set: sorted },
    ))
}

fn pair_of(a: usize, b: usize, n: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    pair_index_unchecked(i, j, n)
}

/// A generated inequality description of the relaxation.
#[derive(Debug, Clone)]
pub struct InequalitySet {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub exact: bool,
    pub constraints: Vec<LinearConstraint>,
}

impl InequalitySet {
    /// Text dump, one constraint per line.
    pub fn dump<W: Write>(&self, mut sink: W) -> Result<()> {
        for c in &self.constraints {
            writeln!(sink, "{}", c.render(self.n))?;
        }
        Ok(())
    }
}

/// All relaxation constraints for parameters `(n, K, t)`: the trivial facet
/// (affine-hull equality when `exact`), every generalized triangle
/// inequality with `2 <= |T| <= t`, and all nonnegativity bounds.
pub fn rmet_inequalities(n: usize, k: usize, t: usize, exact: bool) -> Result<InequalitySet> {
    if n < 3 {
        return Err(Error::invalid("relaxation needs n >= 3"));
    }
    if !(2 <= t && t <= k && k <= n) {
        return Err(Error::invalid(format!(
            "need 2 <= t <= K <= n, got t = {t}, K = {k}, n = {n}"
        )));
    }
    let mut constraints = vec![trivial_constraint(n, k, exact)];
    for l in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != l).collect();
        for size in 2..=t.min(n - 1) {
            for_each_subset(&others, size, |t_set| {
                constraints.push(generalized_triangle(l, t_set, n).expect("valid T"));
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            constraints.push(nonneg_constraint(i, j, n));
        }
    }
    Ok(InequalitySet {
        n,
        k,
        t,
        exact,
        constraints,
    })
}

/// Visits all `size`-subsets of `items` in lexicographic order.
fn for_each_subset<F: FnMut(&[usize])>(items: &[usize], size: usize, mut f: F) {
    if size > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf = vec![0usize; size];
    loop {
        for (slot, &i) in idx.iter().enumerate() {
            buf[slot] = items[i];
        }
        f(&buf);
        // advance the index vector
        let mut pos = size;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] != items.len() - size + pos {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for p in (pos + 1)..size {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// One ratio-cut vector per set partition of `[n]` into exactly / at most
/// `K` nonempty clusters.
pub fn enumerate_ratio_cut_vectors(n: usize, k: usize, exact: bool) -> Result<Vec<RatioCutVector>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K = {k} out of range for n = {n}")));
    }
    if n > 12 {
        return Err(Error::resource("ratio-cut enumeration limited to n <= 12"));
    }
    let mut out = Vec::new();
    for_each_growth_string(n, k, |labels, blocks| {
        if exact && blocks != k {
            return;
        }
        let p = Partition::from_labels(labels, blocks.max(1)).expect("growth string is canonical");
        out.push(crate::core::ratio_cut_vector(&p));
    });
    Ok(out)
}

/// Brute-force validity: true iff every enumerated ratio-cut vector
/// satisfies the constraint exactly.
pub fn check_validity(c: &LinearConstraint, n: usize, k: usize, exact: bool) -> Result<bool> {
    let vectors = enumerate_ratio_cut_vectors(n, k, exact)?;
    Ok(vectors.iter().all(|x| c.is_satisfied_by(x)))
}

/// Exact facetness: the vectors satisfying the constraint with equality must
/// affinely span one dimension less than the polytope itself
/// (`C(n,2)` full-dimensional for at-most-K, `C(n,2) - 1` for exactly-K).
pub fn check_facet(c: &LinearConstraint, n: usize, k: usize, exact: bool) -> Result<bool> {
    if n > 9 {
        return Err(Error::resource("facet rank check limited to n <= 9"));
    }
    if !check_validity(c, n, k, exact)? {
        return Err(Error::invalid(format!(
            "constraint [{}] is not valid; facetness is undefined",
            c.render(n)
        )));
    }
    if c.sense == Sense::Eq {
        return Ok(false);
    }
    let vectors = enumerate_ratio_cut_vectors(n, k, exact)?;
    let tight: Vec<Vec<Rat>> = vectors
        .iter()
        .filter(|x| c.lhs_at(x) == c.rhs)
        .map(|x| x.entries().to_vec())
        .collect();
    if tight.is_empty() {
        return Ok(false);
    }
    let poly_dim = if exact {
        num_pairs(n) - 1
    } else {
        num_pairs(n)
    };
    Ok(linalg::affine_dim(&tight) == poly_dim - 1)
}

/// Evaluates every relaxation constraint at `x`; the point is a member when
/// the worst signed violation is nonpositive.
pub fn is_in_rmet(
    x: &RatioCutVector,
    n: usize,
    k: usize,
    t: usize,
    exact: bool,
) -> Result<(bool, Rat)> {
    if x.len_points() != n {
        return Err(Error::invalid("vector size mismatch"));
    }
    let system = rmet_inequalities(n, k, t, exact)?;
    let max_violation = system
        .constraints
        .iter()
        .map(|c| c.violation(x))
        .max()
        .expect("nonempty system");
    Ok((max_violation <= Rat::zero(), max_violation))
}

/// The explicit relaxation point that stays inside every generated
/// inequality yet violates one pair inequality, witnessing that the
/// relaxation is strictly larger than the hull for `n >= 5`.
///
/// Returns the point and the violated constraint (pair `{0,1}`,
/// `T = {2,3,4}`).
pub fn counterexample_point(n: usize) -> Result<(RatioCutVector, LinearConstraint)> {
    if n < 5 {
        return Err(Error::invalid(
            "the relaxation equals the hull for n <= 4; no counterexample exists",
        ));
    }
    let np = n as i64;
    let (alpha, omega, etas) = if n == 5 {
        (rat(5, 24), rat(2, 24), None)
    } else {
        let eta1 = rat(3 * np - 14, 2 * (3 * np - 7) * (np - 5));
        let eta2 = rat(4 * np - 21, 3 * (3 * np - 7) * (np - 5));
        let eta3 = rat(3 * np - 14, (3 * np - 7) * (np - 5));
        (
            rat(np, 3 * (3 * np - 7)),
            rat(np, 6 * (3 * np - 7)),
            Some((eta1, eta2, eta3)),
        )
    };

    let class = |v: usize| -> u8 {
        match v {
            0 | 1 => 0, // the separated pair
            2..=4 => 1, // T
            _ => 2,     // tail points
        }
    };
    let mut x = vec![Rat::zero(); num_pairs(n)];
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pair_index_unchecked(i, j, n);
            x[p] = match (class(i), class(j)) {
                (0, 0) => Rat::zero(),
                (0, 1) => alpha.clone(),
                (1, 1) => omega.clone(),
                (0, 2) => etas.as_ref().expect("tail needs n > 5").0.clone(),
                (1, 2) => etas.as_ref().expect("tail needs n > 5").1.clone(),
                (2, 2) => etas.as_ref().expect("tail needs n > 5").2.clone(),
                _ => unreachable!("classes are ordered"),
            };
        }
    }
    let point = RatioCutVector::from_entries(n, x)?;
    let constraint = valid_pair_constraint(0, 1, &[2, 3, 4], n)?;
    Ok((point, constraint))
}

/// Number of vertices the exact enumeration is willing to track.
const MAX_ENUM_VERTICES: usize = 2_000_000;

/// Enumerates the exact vertex set of the relaxation (at-most-K variant,
/// `t = K`). Guarded to `n <= 5`.
pub fn rmet_vertices(n: usize, k: usize) -> Result<Vec<Vec<Rat>>> {
    if n > 5 {
        return Err(Error::resource("vertex enumeration limited to n <= 5"));
    }
    let system = rmet_inequalities(n, k, k, false)?;
    let d = num_pairs(n);

    // bounding simplex: x >= 0 and sum x <= (n-1)/2
    let mut halfspaces = Vec::new();
    for p in 0..d {
        let mut a = vec![Rat::zero(); d];
        a[p] = -Rat::one();
        halfspaces.push(Halfspace { a, b: Rat::zero() });
    }
    let bound = rat(n as i64 - 1, 2);
    halfspaces.push(Halfspace {
        a: vec![Rat::one(); d],
        b: bound.clone(),
    });
    let n_init = halfspaces.len();

    for c in &system.constraints {
        if matches!(c.tag, Tag::Nonneg { .. }) {
            continue; // already provided by the bounding simplex
        }
        let dense = c.dense_coeffs(n);
        match c.sense {
            Sense::Le => halfspaces.push(Halfspace {
                a: dense,
                b: c.rhs.clone(),
            }),
            Sense::Ge => halfspaces.push(Halfspace {
                a: dense.into_iter().map(|v| -v).collect(),
                b: -c.rhs.clone(),
            }),
            Sense::Eq => {
                halfspaces.push(Halfspace {
                    a: dense.clone(),
                    b: c.rhs.clone(),
                });
                halfspaces.push(Halfspace {
                    a: dense.into_iter().map(|v| -v).collect(),
                    b: -c.rhs.clone(),
                });
            }
        }
    }

    let mut initial = vec![vec![Rat::zero(); d]];
    for p in 0..d {
        let mut v = vec![Rat::zero(); d];
        v[p] = bound.clone();
        initial.push(v);
    }
    vertex_enum::enumerate_vertices(&halfspaces, n_init, initial, MAX_ENUM_VERTICES)
}

/// Compares the exact vertex set of the relaxation with the ratio-cut
/// vectors: equality means the relaxation is the hull itself.
pub fn verify_rcut_equals_rmet(n: usize, k: usize) -> Result<bool> {
    use std::collections::BTreeSet;
    let vertices: BTreeSet<Vec<Rat>> = rmet_vertices(n, k)?.into_iter().collect();
    let hull_points: BTreeSet<Vec<Rat>> = enumerate_ratio_cut_vectors(n, k, false)?
        .into_iter()
        .map(|x| x.entries().to_vec())
        .collect();
    Ok(vertices == hull_points)
}

/// True iff the relaxation constraints tight at the ratio-cut vector have
/// full rank `C(n,2)`, i.e. the vector is a vertex of the relaxation.
pub fn is_vertex_of_rmet(x: &RatioCutVector, n: usize, k: usize) -> Result<bool> {
    if n > 9 {
        return Err(Error::resource("vertex rank check limited to n <= 9"));
    }
    if x.len_points() != n {
        return Err(Error::invalid("vector size mismatch"));
    }
    let partition = x
        .to_partition()
        .ok_or_else(|| Error::invalid("input is not a ratio-cut vector"))?;
    if partition.num_used() > k {
        return Err(Error::invalid(format!(
            "ratio-cut vector uses {} clusters, more than K = {k}",
            partition.num_used()
        )));
    }
    let system = rmet_inequalities(n, k, k, false)?;
    let tight_rows: Vec<Vec<Rat>> = system
        .constraints
        .iter()
        .filter(|c| c.lhs_at(x) == c.rhs)
        .map(|c| c.dense_coeffs(n))
        .collect();
    Ok(linalg::rank(tight_rows) == num_pairs(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::ratio_cut_vector;

    fn vector_of(labels: &[usize], k: usize) -> RatioCutVector {
        ratio_cut_vector(&Partition::from_labels(labels, k).unwrap())
    }

    #[test]
    fn enumeration_counts_and_contents() {
        let v32 = enumerate_ratio_cut_vectors(3, 2, false).unwrap();
        assert_eq!(v32.len(), 4);
        let expected: Vec<RatioCutVector> = vec![
            vector_of(&[0, 0, 0], 1),
            vector_of(&[0, 0, 1], 2),
            vector_of(&[0, 1, 0], 2),
            vector_of(&[0, 1, 1], 2),
        ];
        for e in &expected {
            assert!(v32.contains(e));
        }

        assert_eq!(enumerate_ratio_cut_vectors(4, 2, false).unwrap().len(), 8);
        assert_eq!(enumerate_ratio_cut_vectors(4, 2, true).unwrap().len(), 7);
    }

    #[test]
    fn exact_n_minus_one_hull_is_the_scaled_simplex() {
        // exactly n-1 clusters means a single merged pair: the vectors are
        // (1/2) e_p over all pairs p.
        for n in 3..=6 {
            let vs = enumerate_ratio_cut_vectors(n, n - 1, true).unwrap();
            assert_eq!(vs.len(), num_pairs(n));
            for v in vs {
                let nonzero: Vec<&Rat> = v.entries().iter().filter(|e| !e.is_zero()).collect();
                assert_eq!(nonzero.len(), 1);
                assert_eq!(*nonzero[0], rat(1, 2));
            }
        }
    }

    #[test]
    fn rmet_counts_for_small_cases() {
        let sys = rmet_inequalities(4, 2, 2, false).unwrap();
        let gt = sys
            .constraints
            .iter()
            .filter(|c| matches!(c.tag, Tag::GeneralizedTriangle { .. }))
            .count();
        let nn = sys
            .constraints
            .iter()
            .filter(|c| matches!(c.tag, Tag::Nonneg { .. }))
            .count();
        assert_eq!(gt, 12); // 4 choices of l x C(3,2) subsets
        assert_eq!(nn, 6);
        assert_eq!(sys.constraints.len(), 19);
    }

    #[test]
    fn instantiated_triangle_for_n3() {
        // l = 0, T = {1, 2}: 2(X_01 + X_02) <= 1 + X_12
        let c = generalized_triangle(0, &[1, 2], 3).unwrap();
        assert_eq!(c.coeffs.len(), 3);
        assert_eq!(c.coeffs[&0], rat_int(2));
        assert_eq!(c.coeffs[&1], rat_int(2));
        assert_eq!(c.coeffs[&2], -Rat::one());
        assert_eq!(c.rhs, Rat::one());
        assert_eq!(c.sense, Sense::Le);
    }

    #[test]
    fn generated_constraints_are_valid() {
        for n in 3..=6 {
            for k in 2..=n {
                let sys = rmet_inequalities(n, k, k, false).unwrap();
                for c in &sys.constraints {
                    assert!(
                        check_validity(c, n, k, false).unwrap(),
                        "invalid: {} at (n,K)=({n},{k})",
                        c.render(n)
                    );
                }
            }
        }
    }

    #[test]
    fn validity_examples() {
        let trivial = trivial_constraint(5, 2, false);
        assert!(check_validity(&trivial, 5, 2, false).unwrap());

        // X_01 <= 1/3 is violated by the vector with X_01 = 1/2
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0usize, Rat::one());
        let bad = LinearConstraint::new(coeffs, Sense::Le, rat(1, 3), Tag::Nonneg { i: 0, j: 1 });
        assert!(!check_validity(&bad, 3, 2, false).unwrap());

        let vp = valid_pair_constraint(0, 1, &[2, 3, 4], 6).unwrap();
        assert!(check_validity(&vp, 6, 2, false).unwrap());
    }

    #[test]
    fn affine_hull_holds_for_exact_vectors() {
        for n in 3..=6 {
            for k in 2..=n {
                let hull = trivial_constraint(n, k, true);
                for x in enumerate_ratio_cut_vectors(n, k, true).unwrap() {
                    assert_eq!(hull.lhs_at(&x), hull.rhs);
                }
            }
        }
    }

    #[test]
    fn facet_examples() {
        let t54 = trivial_constraint(5, 4, false);
        assert!(check_facet(&t54, 5, 4, false).unwrap());
        let t55 = trivial_constraint(5, 5, false);
        assert!(!check_facet(&t55, 5, 5, false).unwrap());

        let nn = nonneg_constraint(0, 1, 5);
        assert!(!check_facet(&nn, 5, 2, false).unwrap());
        assert!(check_facet(&nn, 5, 3, false).unwrap());

        let gt = generalized_triangle(0, &[1, 2], 5).unwrap();
        assert!(check_facet(&gt, 5, 2, false).unwrap());
    }

    #[test]
    fn facet_rejects_invalid_constraint() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0usize, Rat::one());
        let bad = LinearConstraint::new(coeffs, Sense::Le, rat(1, 3), Tag::Nonneg { i: 0, j: 1 });
        assert!(check_facet(&bad, 3, 2, false).is_err());
    }

    #[test]
    fn membership_examples() {
        let any = vector_of(&[0, 1, 0, 1], 2);
        assert!(is_in_rmet(&any, 4, 2, 2, false).unwrap().0);

        let zero = RatioCutVector::from_entries(4, vec![Rat::zero(); 6]).unwrap();
        let (member, violation) = is_in_rmet(&zero, 4, 2, 2, false).unwrap();
        assert!(!member);
        assert_eq!(violation, Rat::one()); // trivial facet misses by exactly 1
    }

    #[test]
    fn counterexample_n5_exact_margin() {
        let (x, c) = counterexample_point(5).unwrap();
        for k in 2..=5 {
            let (member, _) = is_in_rmet(&x, 5, k, k, false).unwrap();
            assert!(member, "point must lie in the relaxation for K = {k}");
        }
        assert_eq!(c.violation(&x), rat(1, 4));
        assert!(counterexample_point(4).is_err());
    }

    #[test]
    fn counterexample_tail_formulas() {
        for n in [6usize, 7, 8] {
            let (x, c) = counterexample_point(n).unwrap();
            let total: Rat = x.entries().iter().sum();
            assert_eq!(total, rat(n as i64 - 2, 2));
            let violation = c.violation(&x);
            assert_eq!(violation, rat(n as i64, 2 * (3 * n as i64 - 7)));
            for k in [2usize, 3] {
                let (member, worst) = is_in_rmet(&x, n, k, k, false).unwrap();
                assert!(member, "n = {n}, K = {k}, worst violation {worst}");
            }
        }
    }

    #[test]
    fn hull_equals_relaxation_only_up_to_n4() {
        assert!(verify_rcut_equals_rmet(3, 2).unwrap());
        assert!(verify_rcut_equals_rmet(4, 3).unwrap());
        assert!(!verify_rcut_equals_rmet(5, 2).unwrap());
    }

    #[test]
    fn ratio_cut_vectors_are_vertices() {
        let single = vector_of(&[0, 0, 0, 0, 0], 1);
        assert!(is_vertex_of_rmet(&single, 5, 2).unwrap());

        let three = vector_of(&[0, 0, 1, 1, 2, 2], 3);
        assert!(is_vertex_of_rmet(&three, 6, 3).unwrap());
    }

    #[test]
    fn vertex_check_rejects_non_ratio_cut_points() {
        let a = vector_of(&[0, 0, 1, 1], 2);
        let b = vector_of(&[0, 1, 0, 1], 2);
        let mid: Vec<Rat> = a
            .entries()
            .iter()
            .zip(b.entries())
            .map(|(u, v)| (u + v) / rat_int(2))
            .collect();
        let mid = RatioCutVector::from_entries(4, mid).unwrap();
        assert!(is_vertex_of_rmet(&mid, 4, 2).is_err());
    }

    #[test]
    fn render_uses_rational_notation() {
        let c = trivial_constraint(3, 2, false);
        assert_eq!(
            c.render(3),
            "trivial_facet: 1·X[0,1] + 1·X[0,2] + 1·X[1,2] >= 1/2"
        );
    }

    #[test]
    fn subset_visitor_is_exhaustive() {
        let items = [1usize, 3, 5, 7];
        let mut seen = Vec::new();
        for_each_subset(&items, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![1, 3],
                vec![1, 5],
                vec![1, 7],
                vec![3, 5],
                vec![3, 7],
                vec![5, 7],
            ]
        );
    }
}
