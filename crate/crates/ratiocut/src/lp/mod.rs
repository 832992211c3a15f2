//! LP relaxation of K-means over pair variables, solved by cutting planes.
//!
//! The model keeps one variable per point pair `X_ij` (i < j); diagonal
//! entries are the affine expressions `X_ii = 1 - sum_{j != i} X_ij`, so the
//! trace equality becomes `sum X_ij = (n - K)/2` over the pair variables and
//! the generalized triangle inequalities become pure pair-variable rows. The
//! triangle pool starts empty and grows by separation. A dense baseline LP
//! over the full symmetric matrix (row sums, trace, nonnegativity and
//! diagonal dominance) is provided for comparison.

mod mps;
mod simplex;

pub use mps::export_mps;

use std::collections::HashMap;

use crate::core::{num_pairs, pair_index_unchecked, DistanceMatrix, Partition};
use crate::{Error, Result};

use simplex::Simplex;

/// Column space of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarLayout {
    /// One column per pair (i < j), lexicographic.
    PairUpper { n: usize },
    /// Pair columns followed by the `n` diagonal columns.
    SymmetricFull { n: usize },
    /// Anonymous columns (internal/test use).
    Raw { num: usize },
}

impl VarLayout {
    pub fn num_vars(&self) -> usize {
        match *self {
            VarLayout::PairUpper { n } => num_pairs(n),
            VarLayout::SymmetricFull { n } => num_pairs(n) + n,
            VarLayout::Raw { num } => num,
        }
    }

    /// Deterministic column name `X_i_j` (diagonal columns are `X_i_i`).
    pub fn var_name(&self, col: usize) -> String {
        match *self {
            VarLayout::PairUpper { n } => {
                let (i, j) = crate::core::pair_from_index(col, n).expect("column in range");
                format!("X_{i}_{j}")
            }
            VarLayout::SymmetricFull { n } => {
                if col < num_pairs(n) {
                    let (i, j) = crate::core::pair_from_index(col, n).expect("column in range");
                    format!("X_{i}_{j}")
                } else {
                    let i = col - num_pairs(n);
                    format!("X_{i}_{i}")
                }
            }
            VarLayout::Raw { .. } => format!("C{col}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// Row identity, used for MPS naming and cut bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RowId {
    Trace,
    RowSum(usize),
    /// generalized triangle inequality for `owner` and set `set`
    Cut { owner: usize, set: Vec<usize> },
    /// `Z_ij <= Z_ii`
    DiagDominance { i: usize, j: usize },
    Other(String),
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub id: RowId,
}

/// Sparse LP over nonnegative variables.
#[derive(Debug, Clone)]
pub struct Model {
    pub n: usize,
    pub k: usize,
    pub t: Option<usize>,
    pub layout: VarLayout,
    /// objective coefficients, one per column (minimized)
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl Model {
    pub fn num_vars(&self) -> usize {
        self.layout.num_vars()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Solver output; `objective` is the model objective (twice the clustering
/// cost for the pair models, which carry the doubled distance coefficients).
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    /// basic column ids, reusable as a warm start
    pub basis: Vec<usize>,
    /// cutting-plane rounds used (0 for a plain solve)
    pub rounds: usize,
    /// cumulative simplex pivots behind this solution
    pub pivots: usize,
}

impl LpSolution {
    /// Objective on the clustering-cost scale: the pair models minimize
    /// `sum_{i<j} 2 d_ij X_ij`, which evaluates to twice the within-cluster
    /// cost on partition points.
    pub fn cost_objective(&self) -> f64 {
        self.objective / 2.0
    }
}

/// Options of the cutting-plane loop.
#[derive(Debug, Clone)]
pub struct LpOptions {
    pub max_rounds: usize,
    /// per-round cut budget; `5 n` by default
    pub max_cuts_per_round: Option<usize>,
    pub viol_tol: f64,
    pub feas_tol: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            max_rounds: 200,
            max_cuts_per_round: None,
            viol_tol: 1e-7,
            feas_tol: 1e-8,
        }
    }
}

/// Builds the pair-variable relaxation: trace equality, nonnegative
/// variables and an empty triangle pool (filled by separation).
pub fn build_lpk(d: &DistanceMatrix, k: usize, t: usize) -> Result<Model> {
    let n = d.len();
    if !(2 <= t && t <= k && k <= n) {
        return Err(Error::invalid(format!(
            "need 2 <= t <= K <= n, got t = {t}, K = {k}, n = {n}"
        )));
    }
    let np = num_pairs(n);
    let mut objective = vec![0.0; np];
    for i in 0..n {
        for j in (i + 1)..n {
            objective[pair_index_unchecked(i, j, n)] = 2.0 * d.get(i, j);
        }
    }
    let trace = Row {
        coeffs: (0..np).map(|p| (p, 1.0)).collect(),
        sense: RowSense::Eq,
        rhs: (n as f64 - k as f64) / 2.0,
        id: RowId::Trace,
    };
    Ok(Model {
        n,
        k,
        t: Some(t),
        layout: VarLayout::PairUpper { n },
        objective,
        rows: vec![trace],
    })
}

/// Pair-variable row of the generalized triangle inequality
/// `sum_{j in S} X_ij <= X_ii + sum_{j<k in S} X_jk` with the diagonal
/// substituted: coefficient 2 on (i, j in S), 1 on the rest of row i,
/// -1 inside S, rhs 1.
pub fn triangle_row(owner: usize, set: &[usize], n: usize) -> Row {
    debug_assert!(set.len() >= 2 && !set.contains(&owner));
    let mut coeffs = Vec::with_capacity(n - 1 + set.len() * (set.len() - 1) / 2);
    for j in 0..n {
        if j == owner {
            continue;
        }
        let c = if set.contains(&j) { 2.0 } else { 1.0 };
        coeffs.push((pair_of(owner, j, n), c));
    }
    for (pos, &a) in set.iter().enumerate() {
        for &b in &set[pos + 1..] {
            coeffs.push((pair_of(a, b, n), -1.0));
        }
    }
    coeffs.sort_unstable_by_key(|&(c, _)| c);
    Row {
        coeffs,
        sense: RowSense::Le,
        rhs: 1.0,
        id: RowId::Cut {
            owner,
            set: set.to_vec(),
        },
    }
}

fn pair_of(a: usize, b: usize, n: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    pair_index_unchecked(i, j, n)
}

/// A violated triangle inequality found by separation.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub owner: usize,
    pub set: Vec<usize>,
    pub violation: f64,
}

/// Finds triangle inequalities violated by `x`.
///
/// `|S| = 2` is scanned exhaustively. For `3 <= |S| <= t` the sets are grown
/// greedily from violated seeds (exhaustively enumerated instead when
/// `n <= 25`). An empty result certifies that no inequality within the
/// implemented search power is violated beyond `viol_tol`.
///
/// Selection under the `max_cuts` budget is balanced across owners `i`
/// (each owner's cuts ranked by violation, owners drained round-robin);
/// a budget spent purely on the globally most violated cuts stalls the
/// cutting-plane loop because those cuts overlap on a handful of pairs.
/// The returned list is sorted by violation.
pub fn separate(x: &[f64], n: usize, t: usize, max_cuts: usize, viol_tol: f64) -> Vec<Cut> {
    debug_assert_eq!(x.len(), num_pairs(n));
    let xv = |a: usize, b: usize| x[pair_of(a, b, n)];
    // diagonal values 1 - row sums
    let mut diag = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if j != i {
                diag[i] -= xv(i, j);
            }
        }
    }

    // exhaustive |S| = 2 scan, grouped by owner
    let mut seeds: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in (j + 1)..n {
                if k == i {
                    continue;
                }
                let viol = xv(i, j) + xv(i, k) - diag[i] - xv(j, k);
                if viol > viol_tol {
                    seeds[i].push((j, k, viol));
                }
            }
        }
    }
    for per_owner in seeds.iter_mut() {
        per_owner.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap()
                .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
        });
    }

    let mut large: Vec<Cut> = Vec::new();
    if t >= 3 {
        if n <= 25 {
            exhaustive_large_sets(x, n, t, viol_tol, &diag, &mut large);
        } else {
            greedy_large_sets(x, n, t, viol_tol, &seeds, &mut large);
        }
        large.sort_by(|a, b| {
            b.violation
                .partial_cmp(&a.violation)
                .unwrap()
                .then_with(|| a.owner.cmp(&b.owner))
                .then_with(|| a.set.cmp(&b.set))
        });
        large.dedup_by(|a, b| a.owner == b.owner && a.set == b.set);
    }

    // round-robin over owners, then top up with the larger sets
    let pair_budget = if large.is_empty() {
        max_cuts
    } else {
        max_cuts - (max_cuts / 3).min(large.len())
    };
    let mut cuts: Vec<Cut> = Vec::with_capacity(max_cuts);
    let mut rank = 0;
    'fill: loop {
        let mut any = false;
        for (owner, per_owner) in seeds.iter().enumerate() {
            if let Some(&(j, k, violation)) = per_owner.get(rank) {
                any = true;
                cuts.push(Cut {
                    owner,
                    set: vec![j, k],
                    violation,
                });
                if cuts.len() >= pair_budget {
                    break 'fill;
                }
            }
        }
        if !any {
            break;
        }
        rank += 1;
    }
    let room = max_cuts.saturating_sub(cuts.len());
    cuts.extend(large.into_iter().take(room));

    cuts.sort_by(|a, b| {
        b.violation
            .partial_cmp(&a.violation)
            .unwrap()
            .then_with(|| a.owner.cmp(&b.owner))
            .then_with(|| a.set.cmp(&b.set))
    });
    cuts.truncate(max_cuts);
    cuts
}


fn set_violation(x: &[f64], n: usize, diag: &[f64], owner: usize, set: &[usize]) -> f64 {
    let xv = |a: usize, b: usize| x[pair_of(a, b, n)];
    let mut v = -diag[owner];
    for (pos, &a) in set.iter().enumerate() {
        v += xv(owner, a);
        for &b in &set[pos + 1..] {
            v -= xv(a, b);
        }
    }
    v
}

fn exhaustive_large_sets(
    x: &[f64],
    n: usize,
    t: usize,
    viol_tol: f64,
    diag: &[f64],
    cuts: &mut Vec<Cut>,
) {
    for owner in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != owner).collect();
        for size in 3..=t.min(n - 1) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let set: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
                let viol = set_violation(x, n, diag, owner, &set);
                if viol > viol_tol {
                    cuts.push(Cut {
                        owner,
                        set,
                        violation: viol,
                    });
                }
                // next combination
                let mut pos = size;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if idx[pos] != others.len() - size + pos {
                        break;
                    }
                    if pos == 0 {
                        break;
                    }
                }
                if idx[pos] == others.len() - size + pos {
                    break;
                }
                idx[pos] += 1;
                for p in (pos + 1)..size {
                    idx[p] = idx[p - 1] + 1;
                }
            }
        }
    }
}

fn greedy_large_sets(
    x: &[f64],
    n: usize,
    t: usize,
    viol_tol: f64,
    seeds: &[Vec<(usize, usize, f64)>],
    cuts: &mut Vec<Cut>,
) {
    let xv = |a: usize, b: usize| x[pair_of(a, b, n)];
    for owner in 0..n {
        for &(j, k, seed_viol) in &seeds[owner] {
            let mut set = vec![j, k];
            let mut viol = seed_viol;
            while set.len() < t {
                // adding m changes the violation by x_im - sum_{s in set} x_ms
                let mut best: Option<(usize, f64)> = None;
                for cand in 0..n {
                    if cand == owner || set.contains(&cand) {
                        continue;
                    }
                    let gain =
                        xv(owner, cand) - set.iter().map(|&s| xv(s, cand)).sum::<f64>();
                    if gain > 0.0 && best.map_or(true, |(_, g)| gain > g) {
                        best = Some((cand, gain));
                    }
                }
                match best {
                    Some((cand, gain)) => {
                        set.push(cand);
                        viol += gain;
                    }
                    None => break,
                }
            }
            if set.len() >= 3 && viol > viol_tol {
                set.sort_unstable();
                cuts.push(Cut {
                    owner,
                    set,
                    violation: viol,
                });
            }
        }
    }
}

/// Backend abstraction so an external LP solver can replace the built-in
/// simplex behind the same cutting-plane loop.
pub trait LpBackend {
    fn open(&self, model: &Model, opts: &LpOptions) -> Result<Box<dyn LpSession>>;
}

pub trait LpSession {
    /// Appends rows; the next `solve` may warm-start from the previous basis.
    fn add_rows(&mut self, rows: &[Row]) -> Result<()>;
    fn solve(&mut self) -> Result<LpSolution>;
    /// Re-solves against the exact objective; backends that iterate with an
    /// internally perturbed objective clean it up here. Defaults to `solve`.
    fn finalize(&mut self) -> Result<LpSolution> {
        self.solve()
    }
    /// Suggests a starting basis made of the given structural columns.
    /// Returns true when the backend adopted it and reached an optimum from
    /// there; optional.
    fn try_crash(&mut self, _structurals: &[usize]) -> Result<bool> {
        Ok(false)
    }
    /// Drops currently inactive inequality rows when at least `min_batch` of
    /// them exist. Dropped rows stay in the caller's pool and may be
    /// re-added later. Optional for backends whose working set does not grow
    /// with the pool.
    fn purge_inactive(&mut self, _min_batch: usize) -> Result<()> {
        Ok(())
    }
    /// Row identities the backend dropped from its working set since the
    /// last call (explicit purges and any internal shedding).
    fn dropped_rows(&mut self) -> Vec<RowId> {
        Vec::new()
    }
}

/// Built-in dense revised simplex backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSimplex;

struct DenseSession {
    inner: Simplex,
    solved_once: bool,
    /// row identity per tag; tags are assigned in insertion order and
    /// survive working-set removals
    row_ids: Vec<RowId>,
}

impl LpBackend for DenseSimplex {
    fn open(&self, model: &Model, opts: &LpOptions) -> Result<Box<dyn LpSession>> {
        Ok(Box::new(DenseSession {
            inner: Simplex::new(model, opts.feas_tol)?,
            solved_once: false,
            row_ids: model.rows.iter().map(|r| r.id.clone()).collect(),
        }))
    }
}

impl LpSession for DenseSession {
    fn add_rows(&mut self, rows: &[Row]) -> Result<()> {
        self.inner.append_rows(rows)?;
        self.row_ids.extend(rows.iter().map(|r| r.id.clone()));
        Ok(())
    }

    fn solve(&mut self) -> Result<LpSolution> {
        let trace = std::env::var_os("RATIOCUT_TRACE").is_some();
        let before = self.inner.counters();
        let started = std::time::Instant::now();
        let status = if self.solved_once {
            self.inner.solve_dual()?
        } else {
            self.solved_once = true;
            self.inner.solve_primal()?
        };
        if status == LpStatus::Optimal {
            self.inner.ensure_clean()?;
        }
        if trace {
            let after = self.inner.counters();
            eprintln!(
                "[simplex] solve: pivots +{} (dual +{}), refactors +{}, {:.2}s",
                after.0 - before.0,
                after.1 - before.1,
                after.2 - before.2,
                started.elapsed().as_secs_f64()
            );
        }
        Ok(LpSolution {
            x: self.inner.structural_solution(),
            objective: self.inner.objective_value(),
            status,
            basis: self.inner.basis_columns(),
            rounds: 0,
            pivots: self.inner.pivot_count(),
        })
    }

    fn finalize(&mut self) -> Result<LpSolution> {
        let status = self.inner.finalize_exact()?;
        if status == LpStatus::Optimal {
            self.inner.ensure_clean()?;
        }
        Ok(LpSolution {
            x: self.inner.structural_solution(),
            objective: self.inner.objective_value(),
            status,
            basis: self.inner.basis_columns(),
            rounds: 0,
            pivots: self.inner.pivot_count(),
        })
    }

    fn try_crash(&mut self, structurals: &[usize]) -> Result<bool> {
        let adopted = self.inner.crash_basis(structurals)?;
        if adopted {
            self.solved_once = true;
        }
        Ok(adopted)
    }

    fn purge_inactive(&mut self, min_batch: usize) -> Result<()> {
        self.inner.maybe_purge(min_batch)?;
        Ok(())
    }

    fn dropped_rows(&mut self) -> Vec<RowId> {
        self.inner
            .take_dropped()
            .into_iter()
            .map(|tag| self.row_ids[tag as usize].clone())
            .collect()
    }
}


/// One-shot solve of a model with the built-in backend. Models with large
/// inequality systems are solved by lazy row activation: start from the
/// equality rows, repeatedly add the most violated inequalities, and verify
/// every model row at the end.
pub fn solve_lp(model: &Model) -> Result<LpSolution> {
    let opts = LpOptions::default();
    if model.rows.len() <= 600 {
        return DenseSimplex.open(model, &opts)?.solve();
    }
    solve_lp_lazily(model, &opts)
}

fn solve_lp_lazily(model: &Model, opts: &LpOptions) -> Result<LpSolution> {
    let always: Vec<usize> = model
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.sense == RowSense::Eq)
        .map(|(i, _)| i)
        .collect();
    let mut active = vec![false; model.rows.len()];
    for &i in &always {
        active[i] = true;
    }
    let id_to_index: std::collections::HashMap<RowId, usize> = model
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.clone(), i))
        .collect();

    let seed = Model {
        rows: always.iter().map(|&i| model.rows[i].clone()).collect(),
        ..model.clone()
    };
    let mut session = DenseSimplex.open(&seed, opts)?;
    let batch = 4 * model.n.max(64);
    for _round in 0..50_000 {
        let sol = session.solve()?;
        for id in session.dropped_rows() {
            if let Some(&idx) = id_to_index.get(&id) {
                active[idx] = false;
            }
        }
        if sol.status != LpStatus::Optimal {
            return Ok(sol);
        }
        let mut violated: Vec<(usize, f64)> = model
            .rows
            .iter()
            .enumerate()
            .filter(|(i, row)| !active[*i] && row.sense == RowSense::Le)
            .filter_map(|(i, row)| {
                let lhs: f64 = row.coeffs.iter().map(|&(c, v)| v * sol.x[c]).sum();
                let viol = lhs - row.rhs;
                (viol > opts.feas_tol).then_some((i, viol))
            })
            .collect();
        if violated.is_empty() {
            return Ok(sol);
        }
        violated.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        violated.truncate(batch);
        let rows: Vec<Row> = violated
            .iter()
            .map(|&(i, _)| {
                active[i] = true;
                model.rows[i].clone()
            })
            .collect();
        session.add_rows(&rows)?;
        for id in session.dropped_rows() {
            if let Some(&idx) = id_to_index.get(&id) {
                active[idx] = false;
            }
        }
    }
    Err(Error::Solver("lazy row activation failed to settle".into()))
}

/// Point count from which the cutting-plane loop seeds its pool from a
/// distance-based clustering heuristic and crash-starts the simplex there.
const CRASH_MIN_N: usize = 30;

/// Cutting-plane driver: solve, separate, append, repeat until no violated
/// triangle inequality remains (status `Optimal`) or the round budget runs
/// out (`IterationLimit`).
///
/// For larger instances the pool is seeded with the triangle rows tight at a
/// heuristic clustering vertex and the simplex starts from that basis;
/// growing the pool from empty spends thousands of degenerate pivots before
/// the working set can even express a clustering vertex. The seeding only
/// affects speed: cuts are valid rows the separator could have produced.
///
/// The pool of discovered cuts only grows and lives in the returned model;
/// the backend's working set may temporarily drop inactive pool rows, so the
/// final solution is verified against the whole pool (and re-solved with the
/// backend's exact objective) before returning.
pub fn cutting_plane_solve(
    d: &DistanceMatrix,
    k: usize,
    t: usize,
    backend: &dyn LpBackend,
    opts: &LpOptions,
) -> Result<(LpSolution, Model)> {
    let n = d.len();
    let mut model = build_lpk(d, k, t)?;
    let max_cuts = opts.max_cuts_per_round.unwrap_or(5 * n);

    // pool cut -> model row index; `enforced` tracks the backend working set
    let mut pool: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut enforced: Vec<bool> = vec![true; model.rows.len()];

    let crash_supports = if n >= CRASH_MIN_N {
        let guess = medoid_partition(d, k);
        let supports = seed_pool_from_partition(&guess, n, &mut model, &mut pool, &mut enforced);
        (!supports.is_empty()).then_some(supports)
    } else {
        None
    };

    let mut session = backend.open(&model, opts)?;
    if let Some(supports) = crash_supports {
        session.try_crash(&supports)?;
    }

    let trace = std::env::var_os("RATIOCUT_TRACE").is_some();
    let mut sol = session.solve()?;
    for id in session.dropped_rows() {
        if let RowId::Cut { owner, set } = id {
            if let Some(&idx) = pool.get(&(owner, set)) {
                enforced[idx] = false;
            }
        }
    }
    if sol.status != LpStatus::Optimal {
        return Ok((sol, model));
    }
    let mut finalized = false;
    for round in 1..=opts.max_rounds {
        let cuts = separate(&sol.x, n, t, max_cuts, opts.viol_tol);
        if trace {
            eprintln!(
                "[lp] round {round}: pool {} working {} violated {} obj {:.6} pivots {}",
                model.rows.len(),
                enforced.iter().filter(|&&e| e).count(),
                cuts.len(),
                sol.objective,
                sol.pivots
            );
        }
        let mut fresh: Vec<Row> = Vec::with_capacity(cuts.len());
        for cut in cuts {
            let key = (cut.owner, cut.set);
            match pool.get(&key) {
                Some(&idx) => {
                    if !enforced[idx] {
                        enforced[idx] = true;
                        fresh.push(model.rows[idx].clone());
                    }
                }
                None => {
                    let row = triangle_row(key.0, &key.1, n);
                    pool.insert(key, model.rows.len());
                    model.rows.push(row.clone());
                    enforced.push(true);
                    fresh.push(row);
                }
            }
        }
        if fresh.is_empty() {
            // separation is clean; re-add any pool row the working set
            // dropped that the solution no longer satisfies
            for (idx, row) in model.rows.iter().enumerate() {
                if enforced[idx] {
                    continue;
                }
                let lhs: f64 = row.coeffs.iter().map(|&(c, v)| v * sol.x[c]).sum();
                if lhs > row.rhs + opts.feas_tol {
                    enforced[idx] = true;
                    fresh.push(row.clone());
                }
            }
        }
        if fresh.is_empty() {
            if finalized {
                sol.rounds = round - 1;
                return Ok((sol, model));
            }
            // drop the internal objective perturbation and re-check
            sol = session.finalize()?;
            for id in session.dropped_rows() {
                if let RowId::Cut { owner, set } = id {
                    if let Some(&idx) = pool.get(&(owner, set)) {
                        enforced[idx] = false;
                    }
                }
            }
            finalized = true;
            if sol.status != LpStatus::Optimal {
                return Ok((sol, model));
            }
            continue;
        }
        session.add_rows(&fresh)?;
        sol = session.solve()?;
        sol.rounds = round;
        for id in session.dropped_rows() {
            if let RowId::Cut { owner, set } = id {
                if let Some(&idx) = pool.get(&(owner, set)) {
                    enforced[idx] = false;
                }
            }
        }
        if sol.status != LpStatus::Optimal {
            return Ok((sol, model));
        }
    }
    sol.status = LpStatus::IterationLimit;
    Ok((sol, model))
}

/// Distance-only clustering heuristic for pool seeding: farthest-point
/// medoid initialization followed by assignment/medoid alternation.
fn medoid_partition(d: &DistanceMatrix, k: usize) -> Partition {
    let n = d.len();
    let mut medoids = vec![0usize];
    while medoids.len() < k {
        let next = (0..n)
            .max_by(|&a, &b| {
                let da = medoids.iter().map(|&m| d.get(a, m)).fold(f64::INFINITY, f64::min);
                let db = medoids.iter().map(|&m| d.get(b, m)).fold(f64::INFINITY, f64::min);
                da.partial_cmp(&db).unwrap().then(b.cmp(&a))
            })
            .unwrap();
        medoids.push(next);
    }
    let mut labels = vec![0usize; n];
    for _ in 0..30 {
        let mut changed = false;
        for i in 0..n {
            let best = (0..k)
                .min_by(|&a, &b| {
                    d.get(i, medoids[a])
                        .partial_cmp(&d.get(i, medoids[b]))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .unwrap();
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        // medoid update: the point minimizing the within-cluster distance sum
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            if members.is_empty() {
                continue;
            }
            medoids[c] = *members
                .iter()
                .min_by(|&&a, &&b| {
                    let sa: f64 = members.iter().map(|&j| d.get(a, j)).sum();
                    let sb: f64 = members.iter().map(|&j| d.get(b, j)).sum();
                    sa.partial_cmp(&sb).unwrap().then(a.cmp(&b))
                })
                .unwrap();
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(&labels, k).expect("labels in range")
}

/// Adds, per within-cluster pair of the guess, triangle rows tight at the
/// guess's ratio-cut vertex; returns the support columns for the crash.
///
/// Converged pools on clustering vertices are dominated by within-cluster
/// triples `(i, {j, k})` with all three points in one cluster, so those are
/// what gets seeded (one per pair, third point cycling through the cluster),
/// plus a pair+outsider row per pair to couple the clusters.
fn seed_pool_from_partition(
    guess: &Partition,
    n: usize,
    model: &mut Model,
    pool: &mut HashMap<(usize, Vec<usize>), usize>,
    enforced: &mut Vec<bool>,
) -> Vec<usize> {
    let mut supports = Vec::new();
    let clusters = guess.clusters();
    let mut add = |owner: usize, a: usize, b: usize, model: &mut Model| {
        let set = if a < b { vec![a, b] } else { vec![b, a] };
        let key = (owner, set.clone());
        if pool.contains_key(&key) {
            return;
        }
        let row = triangle_row(owner, &set, n);
        pool.insert(key, model.rows.len());
        model.rows.push(row);
        enforced.push(true);
    };
    for members in &clusters {
        let s = members.len();
        if s < 2 || s == n {
            continue;
        }
        let outsider = (0..n)
            .find(|i| !members.contains(i))
            .expect("cluster is proper");
        for (pos, &i) in members.iter().enumerate() {
            for (off, &j) in members.iter().enumerate().skip(pos + 1) {
                supports.push(pair_of(i, j, n));
                if s >= 3 {
                    // third cluster point, cycling past j
                    let third = members[(off + 1) % s];
                    let third = if third == i || third == j {
                        members[(off + 2) % s]
                    } else {
                        third
                    };
                    if third != i && third != j {
                        add(i, j, third, model);
                    }
                } else {
                    add(i, j, outsider, model);
                }
            }
        }
    }
    supports
}

/// Cutting-plane solve with the built-in simplex.
pub fn cutting_plane_solve_default(
    d: &DistanceMatrix,
    k: usize,
    t: usize,
    opts: &LpOptions,
) -> Result<(LpSolution, Model)> {
    cutting_plane_solve(d, k, t, &DenseSimplex, opts)
}

/// Size guard for the dense baseline model.
const BADLP_MAX_N: usize = 60;

/// Dense baseline LP over the full symmetric matrix: row sums, trace,
/// nonnegativity, and `Z_ij <= Z_ii` for all ordered pairs.
pub fn build_badlp(d: &DistanceMatrix, k: usize) -> Result<Model> {
    let n = d.len();
    if k > n {
        return Err(Error::invalid(format!("K = {k} out of range for n = {n}")));
    }
    if n > BADLP_MAX_N {
        return Err(Error::resource(format!(
            "baseline LP limited to n <= {BADLP_MAX_N}, got {n}"
        )));
    }
    let np = num_pairs(n);
    let diag_col = |i: usize| np + i;

    let mut objective = vec![0.0; np + n];
    for i in 0..n {
        for j in (i + 1)..n {
            objective[pair_index_unchecked(i, j, n)] = 2.0 * d.get(i, j);
        }
    }

    let mut rows = Vec::with_capacity(n + 1 + n * (n - 1));
    for i in 0..n {
        let mut coeffs = vec![(diag_col(i), 1.0)];
        for j in 0..n {
            if j != i {
                coeffs.push((pair_of(i, j, n), 1.0));
            }
        }
        coeffs.sort_unstable_by_key(|&(c, _)| c);
        rows.push(Row {
            coeffs,
            sense: RowSense::Eq,
            rhs: 1.0,
            id: RowId::RowSum(i),
        });
    }
    rows.push(Row {
        coeffs: (0..n).map(|i| (diag_col(i), 1.0)).collect(),
        sense: RowSense::Eq,
        rhs: k as f64,
        id: RowId::Trace,
    });
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            rows.push(Row {
                coeffs: vec![(pair_of(i, j, n), 1.0), (diag_col(i), -1.0)],
                sense: RowSense::Le,
                rhs: 0.0,
                id: RowId::DiagDominance { i, j },
            });
        }
    }
    Ok(Model {
        n,
        k,
        t: None,
        layout: VarLayout::SymmetricFull { n },
        objective,
        rows,
    })
}
