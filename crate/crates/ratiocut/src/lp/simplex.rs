//! Dense revised primal/dual simplex over an explicit basis inverse.
//!
//! Built for the cutting-plane loop: the first call runs a two-phase primal
//! solve; rows appended afterwards keep the old basis dual-feasible, so
//! reoptimization runs the dual simplex from the extended basis. All
//! variables (structural and slack) are nonnegative with no upper bounds.

use crate::lp::{LpStatus, Model, Row, RowSense};
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
const RCOST_TOL: f64 = 1e-9;
const DEGEN_STEP: f64 = 1e-11;
const BLAND_TRIGGER: usize = 200;
const REFRESH_EVERY: usize = 500;
/// threshold for shedding inactive rows inside the dual loop
const PURGE_MIN_BATCH: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    /// slack of the given row; coefficient is `sign`
    Slack { row: usize },
    Artificial { row: usize },
    /// slack of a removed row; never enters again
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

pub(crate) struct Simplex {
    n_struct: usize,
    m: usize,
    /// structural objective
    cost: Vec<f64>,
    /// deterministically perturbed copy used while iterating; the tiny
    /// spread breaks the massive dual degeneracy of cut-heavy pools
    cost_perturbed: Vec<f64>,
    exact_mode: bool,
    /// per structural column: (row, coeff) entries
    col_entries: Vec<Vec<(usize, f64)>>,
    /// per row: structural entries (kept for row-wise products)
    row_entries: Vec<Vec<(usize, f64)>>,
    /// per row: slack sign (0.0 when the row has no slack)
    slack_sign: Vec<f64>,
    /// normalized rhs, b >= 0 for initial rows
    b: Vec<f64>,
    kinds: Vec<ColKind>,
    slack_col: Vec<Option<usize>>,
    artificial_col: Vec<Option<usize>>,
    /// caller-stable identity of each row, preserved across removals
    row_tags: Vec<u64>,
    next_tag: u64,
    dropped_tags: Vec<u64>,
    /// squared norms of the basis-inverse rows (dual steepest-edge weights)
    dse: Vec<f64>,
    basis: Vec<usize>,
    basic_pos: Vec<Option<usize>>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    rcost: Vec<f64>,
    phase: Phase,
    degenerate_streak: usize,
    feas_tol: f64,
    pivots_since_refresh: usize,
    total_pivots: usize,
    dual_pivots: usize,
    refactor_count: usize,
}

impl Simplex {
    pub(crate) fn new(model: &Model, feas_tol: f64) -> Result<Self> {
        let n_struct = model.num_vars();
        if model.rows.is_empty() {
            return Err(Error::Solver("model has no rows".into()));
        }
        let cmax = model
            .objective
            .iter()
            .fold(0.0_f64, |a, &b| a.max(b.abs()));
        let cost_perturbed = model
            .objective
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let h = splitmix(j as u64 ^ 0x5eed) as f64 / u64::MAX as f64;
                c + (1e-8 * c.abs() + 1e-10 * (1.0 + cmax)) * (0.5 + h)
            })
            .collect();
        let mut s = Simplex {
            n_struct,
            m: 0,
            cost: model.objective.clone(),
            cost_perturbed,
            exact_mode: false,
            col_entries: vec![Vec::new(); n_struct],
            row_entries: Vec::new(),
            slack_sign: Vec::new(),
            b: Vec::new(),
            kinds: (0..n_struct).map(|_| ColKind::Structural).collect(),
            slack_col: Vec::new(),
            artificial_col: Vec::new(),
            row_tags: Vec::new(),
            next_tag: 0,
            dropped_tags: Vec::new(),
            dse: Vec::new(),
            basis: Vec::new(),
            basic_pos: vec![None; n_struct],
            binv: Vec::new(),
            xb: Vec::new(),
            rcost: Vec::new(),
            phase: Phase::One,
            degenerate_streak: 0,
            feas_tol,
            pivots_since_refresh: 0,
            total_pivots: 0,
            dual_pivots: 0,
            refactor_count: 0,
        };
        for row in &model.rows {
            s.push_row(row, true)?;
        }
        Ok(s)
    }

    fn push_row(&mut self, row: &Row, allow_negate: bool) -> Result<()> {
        let r = self.m;
        let mut entries: Vec<(usize, f64)> = row
            .coeffs
            .iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|&(c, v)| (c, v))
            .collect();
        entries.sort_unstable_by_key(|&(c, _)| c);
        let mut rhs = row.rhs;
        let mut slack = match row.sense {
            RowSense::Le => 1.0,
            RowSense::Eq => 0.0,
        };
        if rhs < 0.0 {
            if !allow_negate {
                return Err(Error::Solver("appended rows must have nonnegative rhs".into()));
            }
            rhs = -rhs;
            slack = -slack;
            for e in entries.iter_mut() {
                e.1 = -e.1;
            }
        }
        for &(c, v) in &entries {
            self.col_entries[c].push((r, v));
        }
        self.row_entries.push(entries);
        self.b.push(rhs);
        self.slack_sign.push(slack);
        if slack != 0.0 {
            let id = self.kinds.len();
            self.kinds.push(ColKind::Slack { row: r });
            self.basic_pos.push(None);
            self.slack_col.push(Some(id));
        } else {
            self.slack_col.push(None);
        }
        self.artificial_col.push(None);
        self.row_tags.push(self.next_tag);
        self.next_tag += 1;
        self.m += 1;
        Ok(())
    }

    /// Tags of rows dropped since the last call.
    pub(crate) fn take_dropped(&mut self) -> Vec<u64> {
        std::mem::take(&mut self.dropped_tags)
    }

    /// Recomputes every dual steepest-edge weight from the explicit inverse.
    fn refresh_dse(&mut self) {
        let m = self.m;
        self.dse = (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                row.iter().map(|v| v * v).sum::<f64>().max(1e-12)
            })
            .collect();
    }

    fn col_cost(&self, col: usize) -> f64 {
        match self.phase {
            Phase::One => match self.kinds[col] {
                ColKind::Artificial { .. } => 1.0,
                _ => 0.0,
            },
            Phase::Two => match self.kinds[col] {
                ColKind::Structural => {
                    if self.exact_mode {
                        self.cost[col]
                    } else {
                        self.cost_perturbed[col]
                    }
                }
                _ => 0.0,
            },
        }
    }

    /// Switches to the exact objective and cleans up the few pivots the
    /// perturbation may have introduced.
    pub(crate) fn finalize_exact(&mut self) -> Result<LpStatus> {
        if self.exact_mode {
            return Ok(LpStatus::Optimal);
        }
        self.exact_mode = true;
        self.phase = Phase::Two;
        self.refresh_rcost();
        self.primal_loop()
    }

    fn col_enterable(&self, col: usize) -> bool {
        if self.basic_pos[col].is_some() || self.kinds[col] == ColKind::Dead {
            return false;
        }
        // artificials never come back once phase 1 ends
        !(self.phase == Phase::Two && matches!(self.kinds[col], ColKind::Artificial { .. }))
    }

    /// B^-1 * a_col for a sparse column.
    fn ftran(&self, col: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        match self.kinds[col] {
            ColKind::Structural => {
                for &(r, v) in &self.col_entries[col] {
                    let bcol = r;
                    for i in 0..m {
                        out[i] += self.binv[i * m + bcol] * v;
                    }
                }
            }
            ColKind::Slack { row } => {
                let sign = self.slack_sign[row];
                for i in 0..m {
                    out[i] = self.binv[i * m + row] * sign;
                }
            }
            ColKind::Artificial { row } => {
                for i in 0..m {
                    out[i] = self.binv[i * m + row];
                }
            }
            ColKind::Dead => unreachable!("dead columns never enter"),
        }
        out
    }

    /// pi * A over every column, with pi a dense row vector.
    fn price_row(&self, pi: &[f64]) -> Vec<f64> {
        let mut alpha = vec![0.0; self.kinds.len()];
        for (r, entries) in self.row_entries.iter().enumerate() {
            let p = pi[r];
            if p == 0.0 {
                continue;
            }
            for &(c, v) in entries {
                alpha[c] += p * v;
            }
        }
        for (col, kind) in self.kinds.iter().enumerate() {
            match *kind {
                ColKind::Slack { row } => alpha[col] = pi[row] * self.slack_sign[row],
                ColKind::Artificial { row } => alpha[col] = pi[row],
                ColKind::Structural | ColKind::Dead => {}
            }
        }
        alpha
    }

    fn refresh_rcost(&mut self) {
        let m = self.m;
        // y = c_B * B^-1
        let mut y = vec![0.0; m];
        for (pos, &col) in self.basis.iter().enumerate() {
            let c = self.col_cost(col);
            if c == 0.0 {
                continue;
            }
            for k in 0..m {
                y[k] += c * self.binv[pos * m + k];
            }
        }
        let ya = self.price_row(&y);
        self.rcost = (0..self.kinds.len())
            .map(|col| self.col_cost(col) - ya[col])
            .collect();
        for &col in &self.basis {
            self.rcost[col] = 0.0;
        }
        self.pivots_since_refresh = 0;
    }

    fn recompute_xb(&mut self) {
        let m = self.m;
        for i in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += self.binv[i * m + k] * self.b[k];
            }
            self.xb[i] = acc;
        }
    }

    /// Rebuilds B^-1 from the basis columns by Gauss-Jordan elimination.
    fn refactorize(&mut self) -> Result<()> {
        self.refactor_count += 1;
        let m = self.m;
        let mut mat = vec![0.0; m * 2 * m];
        let w = 2 * m;
        for (pos, &col) in self.basis.iter().enumerate() {
            match self.kinds[col] {
                ColKind::Structural => {
                    for &(r, v) in &self.col_entries[col] {
                        mat[r * w + pos] = v;
                    }
                }
                ColKind::Slack { row } => mat[row * w + pos] = self.slack_sign[row],
                ColKind::Artificial { row } => mat[row * w + pos] = 1.0,
                ColKind::Dead => unreachable!("dead columns never stay basic"),
            }
        }
        for i in 0..m {
            mat[i * w + m + i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&a, &b| {
                    mat[a * w + col]
                        .abs()
                        .partial_cmp(&mat[b * w + col].abs())
                        .unwrap()
                })
                .unwrap();
            let pv = mat[pivot_row * w + col];
            if pv.abs() < 1e-12 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if pivot_row != col {
                for k in 0..w {
                    mat.swap(col * w + k, pivot_row * w + k);
                }
            }
            let inv = 1.0 / mat[col * w + col];
            for k in 0..w {
                mat[col * w + k] *= inv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * w + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..w {
                    mat[r * w + k] -= f * mat[col * w + k];
                }
            }
        }
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = mat[i * w + m + k];
            }
        }
        self.recompute_xb();
        self.refresh_rcost();
        Ok(())
    }

    /// pivot: entering column `q` replaces the basic variable at position `r`.
    fn pivot(&mut self, q: usize, r: usize, alpha_col: &[f64], alpha_row: &[f64]) {
        let m = self.m;
        let pivot = alpha_col[r];

        // rcost update from the (pre-pivot) tableau row
        let ratio = self.rcost[q] / pivot;
        if ratio != 0.0 {
            for col in 0..self.kinds.len() {
                if alpha_row[col] != 0.0 {
                    self.rcost[col] -= ratio * alpha_row[col];
                }
            }
        }

        // basis bookkeeping
        let leaving = self.basis[r];
        self.basic_pos[leaving] = None;
        self.basis[r] = q;
        self.basic_pos[q] = Some(r);

        // xb update
        let theta = self.xb[r] / pivot;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha_col[i];
            }
        }
        self.xb[r] = theta;

        // binv update: row r scaled, others eliminated
        let inv = 1.0 / pivot;
        let row_start = r * m;
        for k in 0..m {
            self.binv[row_start + k] *= inv;
        }
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = alpha_col[i];
            if f == 0.0 {
                continue;
            }
            let is = i * m;
            for k in 0..m {
                self.binv[is + k] -= f * self.binv[row_start + k];
            }
        }

        self.rcost[q] = 0.0;
        self.pivots_since_refresh += 1;
        self.total_pivots += 1;
        if self.pivots_since_refresh >= REFRESH_EVERY {
            self.refresh_rcost();
            self.recompute_xb();
        }
    }

    pub(crate) fn pivot_count(&self) -> usize {
        self.total_pivots
    }

    pub(crate) fn counters(&self) -> (usize, usize, usize) {
        (self.total_pivots, self.dual_pivots, self.refactor_count)
    }

    fn start_basis(&mut self) {
        let m = self.m;
        self.basis.clear();
        for p in &mut self.basic_pos {
            *p = None;
        }
        for r in 0..m {
            let col = if self.slack_sign[r] > 0.0 {
                self.slack_col[r].unwrap()
            } else if let Some(id) = self.artificial_col[r] {
                id
            } else {
                let id = self.kinds.len();
                self.kinds.push(ColKind::Artificial { row: r });
                self.basic_pos.push(None);
                self.artificial_col[r] = Some(id);
                id
            };
            self.basis.push(col);
            self.basic_pos[col] = Some(r);
        }
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        self.xb = self.b.clone();
    }

    /// Two-phase primal solve from scratch.
    pub(crate) fn solve_primal(&mut self) -> Result<LpStatus> {
        self.start_basis();
        let needs_phase1 = self
            .basis
            .iter()
            .any(|&c| matches!(self.kinds[c], ColKind::Artificial { .. }));
        if needs_phase1 {
            self.phase = Phase::One;
            self.refresh_rcost();
            self.primal_loop()?;
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&c, _)| matches!(self.kinds[c], ColKind::Artificial { .. }))
                .map(|(_, &v)| v)
                .sum();
            if infeas > self.feas_tol.max(1e-7) {
                return Ok(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }
        self.phase = Phase::Two;
        self.refresh_rcost();
        let status = self.primal_loop()?;
        Ok(status)
    }

    /// Pivots basic artificials out wherever the row has a usable entry.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            let col = self.basis[r];
            if !matches!(self.kinds[col], ColKind::Artificial { .. }) {
                continue;
            }
            let mut pi = vec![0.0; m];
            pi.copy_from_slice(&self.binv[r * m..(r + 1) * m]);
            let alpha_row = self.price_row(&pi);
            let candidate = (0..self.kinds.len()).find(|&j| {
                self.basic_pos[j].is_none()
                    && !matches!(self.kinds[j], ColKind::Artificial { .. })
                    && alpha_row[j].abs() > PIVOT_TOL
            });
            if let Some(q) = candidate {
                let alpha_col = self.ftran(q);
                self.pivot(q, r, &alpha_col, &alpha_row);
            }
            // no candidate: the row is redundant; the artificial stays basic
            // at value zero and its tableau row is identically zero.
        }
    }

    fn iteration_cap(&self) -> usize {
        50 * (self.m + self.kinds.len()) + 20_000
    }

    fn primal_loop(&mut self) -> Result<LpStatus> {
        let cap = self.iteration_cap();
        self.degenerate_streak = 0;
        for _ in 0..cap {
            let q = match self.choose_entering() {
                Some(q) => q,
                None => return Ok(LpStatus::Optimal),
            };
            let alpha_col = self.ftran(q);
            let r = match self.primal_ratio_test(&alpha_col) {
                Some(r) => r,
                None => return Ok(LpStatus::Unbounded),
            };
            let step = self.xb[r] / alpha_col[r];
            if step.abs() < DEGEN_STEP {
                self.degenerate_streak += 1;
            } else {
                self.degenerate_streak = 0;
            }
            let mut pi = vec![0.0; self.m];
            pi.copy_from_slice(&self.binv[r * self.m..(r + 1) * self.m]);
            let alpha_row = self.price_row(&pi);
            self.pivot(q, r, &alpha_col, &alpha_row);
        }
        Err(Error::Solver("primal simplex iteration cap exceeded".into()))
    }

    fn choose_entering(&self) -> Option<usize> {
        if self.degenerate_streak >= BLAND_TRIGGER {
            // Bland: lowest-index improving column
            return (0..self.kinds.len())
                .find(|&j| self.col_enterable(j) && self.rcost[j] < -RCOST_TOL);
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.kinds.len() {
            if !self.col_enterable(j) {
                continue;
            }
            let rc = self.rcost[j];
            if rc < -RCOST_TOL && best.map_or(true, |(_, b)| rc < b) {
                best = Some((j, rc));
            }
        }
        best.map(|(j, _)| j)
    }

    fn primal_ratio_test(&self, alpha: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            if alpha[i] <= PIVOT_TOL {
                continue;
            }
            let ratio = (self.xb[i].max(0.0)) / alpha[i];
            let better = match best {
                None => true,
                Some((bi, br)) => {
                    // prefer strictly smaller ratios; among near-ties take the
                    // larger pivot (stability), then the lower basis index
                    ratio < br - 1e-12
                        || (ratio < br + 1e-12
                            && (alpha[i] > alpha[bi] + 1e-12
                                || (alpha[i] > alpha[bi] - 1e-12
                                    && self.basis[i] < self.basis[bi])))
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Dual simplex: restores primal feasibility after rows were appended,
    /// assuming reduced costs are still nonnegative. Leaving rows are priced
    /// by steepest-edge weights; inactive rows are shed periodically so the
    /// dense basis stays near the active set.
    pub(crate) fn solve_dual(&mut self) -> Result<LpStatus> {
        let cap = self.iteration_cap();
        self.phase = Phase::Two;
        self.refresh_dse();
        let mut stalls = 0usize;
        let mut since_purge = 0usize;
        for _ in 0..cap {
            since_purge += 1;
            if since_purge >= 256 && self.maybe_purge(PURGE_MIN_BATCH)? {
                since_purge = 0;
                self.refresh_dse();
            }
            let r = match self.choose_leaving_dual() {
                Some(r) => r,
                None => {
                    // primal feasible again; clean up any residual negativity
                    return self.primal_loop();
                }
            };
            let mut pi = vec![0.0; self.m];
            pi.copy_from_slice(&self.binv[r * self.m..(r + 1) * self.m]);
            let alpha_row = self.price_row(&pi);
            let q = match self.dual_ratio_test(&alpha_row, stalls >= BLAND_TRIGGER) {
                Some(q) => q,
                None => return Ok(LpStatus::Infeasible),
            };
            if self.rcost[q].abs() < RCOST_TOL {
                stalls += 1;
            } else {
                stalls = 0;
            }
            let alpha_col = self.ftran(q);
            if alpha_col[r].abs() < PIVOT_TOL {
                self.refactorize()?;
                self.refresh_dse();
                continue;
            }
            self.dual_pivots += 1;
            self.pivot_with_dse(q, r, &alpha_col, &alpha_row);
        }
        Err(Error::Solver("dual simplex iteration cap exceeded".into()))
    }

    fn choose_leaving_dual(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let v = self.xb[i];
            if v >= -self.feas_tol {
                continue;
            }
            let score = v * v / self.dse[i];
            if best.map_or(true, |(_, bs)| score > bs) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Pivot plus an exact steepest-edge weight refresh for the touched
    /// rows; the inverse is explicit, so the weights are recomputed from its
    /// updated rows directly.
    fn pivot_with_dse(&mut self, q: usize, r: usize, alpha_col: &[f64], alpha_row: &[f64]) {
        self.pivot(q, r, alpha_col, alpha_row);
        let m = self.m;
        if self.dse.len() != m {
            self.refresh_dse();
            return;
        }
        // rows changed: r scaled, every other row had a multiple of the new
        // row r subtracted; recompute norms in one pass over the inverse
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.dse[i] = row.iter().map(|v| v * v).sum::<f64>().max(1e-12);
        }
    }

    fn dual_ratio_test(&self, alpha_row: &[f64], bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.kinds.len() {
            if !self.col_enterable(j) || alpha_row[j] >= -PIVOT_TOL {
                continue;
            }
            let ratio = self.rcost[j].max(0.0) / (-alpha_row[j]);
            if bland {
                return Some(j);
            }
            let better = match best {
                None => true,
                Some((bj, br)) => {
                    ratio < br - 1e-12
                        || (ratio < br + 1e-12
                            && (alpha_row[j] < alpha_row[bj] - 1e-12
                                || (alpha_row[j] < alpha_row[bj] + 1e-12 && j < bj)))
                }
            };
            if better {
                best = Some((j, ratio));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Appends rows (with nonnegative rhs) and extends the basis with their
    /// slacks; the extended basis stays dual feasible.
    pub(crate) fn append_rows(&mut self, rows: &[Row]) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let m0 = self.m;
        let mut new_ids = Vec::with_capacity(rows.len());
        for row in rows {
            self.push_row(row, false)?;
            new_ids.push(self.slack_col[self.m - 1].expect("appended rows carry slacks"));
        }
        let m1 = self.m;

        // grow B^-1 blockwise: [[B^-1, 0], [-R B^-1, I]]
        let mut binv = vec![0.0; m1 * m1];
        for i in 0..m0 {
            binv[i * m1..i * m1 + m0].copy_from_slice(&self.binv[i * m0..(i + 1) * m0]);
        }
        for (off, row) in (m0..m1).zip(&self.row_entries[m0..m1]) {
            // R restricted to current basic columns, then times old B^-1
            for &(c, v) in row.iter() {
                if let Some(pos) = self.basic_pos[c] {
                    for k in 0..m0 {
                        binv[off * m1 + k] -= v * self.binv[pos * m0 + k];
                    }
                }
            }
            binv[off * m1 + off] = 1.0;
        }
        self.binv = binv;

        for (row_idx, &slack) in (m0..m1).zip(&new_ids) {
            self.basis.push(slack);
            self.basic_pos[slack] = Some(row_idx);
        }
        self.xb = vec![0.0; m1];
        self.recompute_xb();
        self.rcost.resize(self.kinds.len(), 0.0);
        Ok(())
    }

    /// Rows whose own slack is basic: the constraint is strictly satisfied
    /// and removing it leaves the basis state exactly consistent.
    pub(crate) fn inactive_rows(&self) -> Vec<usize> {
        (0..self.m)
            .filter(|&r| {
                self.slack_col[r]
                    .is_some_and(|s| self.basic_pos[s].is_some())
            })
            .collect()
    }

    /// Deletes rows with basic slacks. The basis matrix is block triangular
    /// against the deleted slack columns, so the surviving block of the
    /// inverse is the inverse of the surviving basis; values, reduced costs
    /// and optimality are untouched (deleted rows carry zero duals).
    pub(crate) fn remove_rows(&mut self, remove: &[usize]) -> Result<()> {
        if remove.is_empty() {
            return Ok(());
        }
        let m = self.m;
        let mut is_removed = vec![false; m];
        let mut removed_pos = vec![false; m];
        for &r in remove {
            let s = self.slack_col[r]
                .ok_or_else(|| Error::Solver("cannot remove a slackless row".into()))?;
            let p = self.basic_pos[s]
                .ok_or_else(|| Error::Solver("cannot remove an active row".into()))?;
            is_removed[r] = true;
            removed_pos[p] = true;
            self.basic_pos[s] = None;
            self.kinds[s] = ColKind::Dead;
        }

        let mut new_row = vec![usize::MAX; m];
        let mut kept_rows = Vec::with_capacity(m - remove.len());
        for r in 0..m {
            if !is_removed[r] {
                new_row[r] = kept_rows.len();
                kept_rows.push(r);
            }
        }
        let kept_pos: Vec<usize> = (0..m).filter(|&p| !removed_pos[p]).collect();
        let m2 = kept_rows.len();
        debug_assert_eq!(kept_pos.len(), m2);

        let mut binv = vec![0.0; m2 * m2];
        for (pi, &p) in kept_pos.iter().enumerate() {
            let src = p * m;
            for (ri, &r) in kept_rows.iter().enumerate() {
                binv[pi * m2 + ri] = self.binv[src + r];
            }
        }
        self.binv = binv;
        self.xb = kept_pos.iter().map(|&p| self.xb[p]).collect();
        self.basis = kept_pos.iter().map(|&p| self.basis[p]).collect();
        for (pi, &col) in self.basis.iter().enumerate() {
            self.basic_pos[col] = Some(pi);
        }

        let mut row_entries = Vec::with_capacity(m2);
        for &r in &kept_rows {
            row_entries.push(std::mem::take(&mut self.row_entries[r]));
        }
        self.row_entries = row_entries;
        self.b = kept_rows.iter().map(|&r| self.b[r]).collect();
        self.slack_sign = kept_rows.iter().map(|&r| self.slack_sign[r]).collect();
        self.slack_col = kept_rows.iter().map(|&r| self.slack_col[r]).collect();
        self.artificial_col = kept_rows.iter().map(|&r| self.artificial_col[r]).collect();
        for r in 0..m {
            if is_removed[r] {
                self.dropped_tags.push(self.row_tags[r]);
            }
        }
        self.row_tags = kept_rows.iter().map(|&r| self.row_tags[r]).collect();

        for kind in self.kinds.iter_mut() {
            if let ColKind::Slack { row } | ColKind::Artificial { row } = kind {
                *row = new_row[*row];
            }
        }
        for entries in self.col_entries.iter_mut() {
            entries.retain(|&(r, _)| !is_removed[r]);
            for e in entries.iter_mut() {
                e.0 = new_row[e.0];
            }
        }
        self.m = m2;
        Ok(())
    }

    /// Drops all inactive rows when at least `min_batch` of them exist.
    pub(crate) fn maybe_purge(&mut self, min_batch: usize) -> Result<bool> {
        let inactive = self.inactive_rows();
        if inactive.len() < min_batch.max(1) {
            return Ok(false);
        }
        self.remove_rows(&inactive)?;
        Ok(true)
    }

    /// Starts from a caller-suggested basis: the given structural columns,
    /// topped up with row slacks/artificials in row order. Refactors that
    /// basis and optimizes from it; returns false (state reset for a cold
    /// start) when the suggestion is singular or infeasible.
    pub(crate) fn crash_basis(&mut self, structurals: &[usize]) -> Result<bool> {
        self.start_basis(); // allocates artificials and a consistent state
        if structurals.len() > self.m {
            return Ok(false);
        }
        let mut columns = structurals.to_vec();
        for r in 0..self.m {
            if columns.len() == self.m {
                break;
            }
            if let Some(c) = self.artificial_col[r].or(self.slack_col[r]) {
                columns.push(c);
            }
        }
        if columns.len() != self.m {
            return Ok(false);
        }
        for p in &mut self.basic_pos {
            *p = None;
        }
        self.basis = columns;
        for pos in 0..self.m {
            let col = self.basis[pos];
            if self.kinds[col] == ColKind::Dead || self.basic_pos[col].is_some() {
                self.start_basis();
                return Ok(false);
            }
            self.basic_pos[col] = Some(pos);
        }
        self.phase = Phase::Two;
        if self.refactorize().is_err() {
            self.start_basis();
            return Ok(false);
        }
        if self.xb.iter().any(|&v| v < -self.feas_tol) {
            self.start_basis();
            return Ok(false);
        }
        self.drive_out_artificials();
        self.refresh_rcost();
        let status = self.primal_loop()?;
        Ok(status == LpStatus::Optimal)
    }

    /// Structural solution vector.
    pub(crate) fn structural_solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for (pos, &col) in self.basis.iter().enumerate() {
            if col < self.n_struct {
                x[col] = self.xb[pos];
            }
        }
        x
    }

    pub(crate) fn objective_value(&self) -> f64 {
        self.structural_solution()
            .iter()
            .zip(&self.cost)
            .map(|(x, c)| x * c)
            .sum()
    }

    pub(crate) fn basis_columns(&self) -> Vec<usize> {
        self.basis.clone()
    }

    /// Worst violation of the stored rows at the current solution.
    pub(crate) fn max_row_residual(&self) -> f64 {
        let x = self.structural_solution();
        let mut worst: f64 = 0.0;
        for r in 0..self.m {
            let lhs: f64 = self.row_entries[r]
                .iter()
                .map(|&(c, v)| v * x[c])
                .sum();
            let resid = if self.slack_sign[r] != 0.0 {
                // inequality row: lhs (+ slack) = b with slack >= 0
                (lhs - self.b[r]) * self.slack_sign[r]
            } else {
                (lhs - self.b[r]).abs()
            };
            worst = worst.max(resid);
        }
        worst = worst.max(-x.iter().cloned().fold(0.0, f64::min));
        worst
    }

    /// Re-solve from scratch if numerical drift left residuals; used as a
    /// safety net by the session layer.
    pub(crate) fn ensure_clean(&mut self) -> Result<()> {
        if self.max_row_residual() > self.feas_tol {
            self.refactorize()?;
            self.phase = Phase::Two;
            self.refresh_rcost();
            self.recompute_xb();
            if self.xb.iter().any(|&v| v < -self.feas_tol) {
                self.solve_dual()?;
            } else {
                self.primal_loop()?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Model, RowId, VarLayout};
    use approx::assert_relative_eq;

    fn tiny_model(objective: Vec<f64>, rows: Vec<Row>) -> Model {
        Model {
            n: 0,
            k: 0,
            t: None,
            layout: VarLayout::Raw {
                num: objective.len(),
            },
            objective,
            rows,
        }
    }

    #[test]
    fn min_x_subject_to_x_ge_3() {
        // x >= 3 as -x <= -3
        let model = tiny_model(
            vec![1.0],
            vec![Row {
                coeffs: vec![(0, -1.0)],
                sense: RowSense::Le,
                rhs: -3.0,
                id: RowId::Other("bound".into()),
            }],
        );
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Optimal);
        assert_relative_eq!(s.objective_value(), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn small_equality_lp() {
        // min x0 + 2 x1 s.t. x0 + x1 = 4, x0 <= 3
        let model = tiny_model(
            vec![1.0, 2.0],
            vec![
                Row {
                    coeffs: vec![(0, 1.0), (1, 1.0)],
                    sense: RowSense::Eq,
                    rhs: 4.0,
                    id: RowId::Other("sum".into()),
                },
                Row {
                    coeffs: vec![(0, 1.0)],
                    sense: RowSense::Le,
                    rhs: 3.0,
                    id: RowId::Other("cap".into()),
                },
            ],
        );
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Optimal);
        let x = s.structural_solution();
        assert_relative_eq!(x[0], 3.0, epsilon = 1e-9);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-9);
        assert_relative_eq!(s.objective_value(), 5.0, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_system_detected() {
        // x <= 1 and x >= 2 (as -x <= -2)
        let model = tiny_model(
            vec![1.0],
            vec![
                Row {
                    coeffs: vec![(0, 1.0)],
                    sense: RowSense::Le,
                    rhs: 1.0,
                    id: RowId::Other("ub".into()),
                },
                Row {
                    coeffs: vec![(0, -1.0)],
                    sense: RowSense::Le,
                    rhs: -2.0,
                    id: RowId::Other("lb".into()),
                },
            ],
        );
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        // min -x s.t. -x <= 0 (x free upward)
        let model = tiny_model(
            vec![-1.0],
            vec![Row {
                coeffs: vec![(0, -1.0)],
                sense: RowSense::Le,
                rhs: 0.0,
                id: RowId::Other("lb".into()),
            }],
        );
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn dual_resolve_after_row_append() {
        // min -x0 - x1 s.t. x0 + x1 <= 4 → x on the line; then append x0 <= 1
        let model = tiny_model(
            vec![-1.0, -1.0],
            vec![Row {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: RowSense::Le,
                rhs: 4.0,
                id: RowId::Other("sum".into()),
            }],
        );
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Optimal);
        assert_relative_eq!(s.objective_value(), -4.0, epsilon = 1e-9);

        s.append_rows(&[Row {
            coeffs: vec![(0, 1.0)],
            sense: RowSense::Le,
            rhs: 1.0,
            id: RowId::Other("cap0".into()),
        }])
        .unwrap();
        assert_eq!(s.solve_dual().unwrap(), LpStatus::Optimal);
        let x = s.structural_solution();
        assert!(x[0] <= 1.0 + 1e-9);
        assert_relative_eq!(s.objective_value(), -4.0, epsilon = 1e-9);

        // tighter cap actually changes the optimum
        s.append_rows(&[Row {
            coeffs: vec![(0, 1.0), (1, 1.0)],
            sense: RowSense::Le,
            rhs: 2.0,
            id: RowId::Other("sum2".into()),
        }])
        .unwrap();
        assert_eq!(s.solve_dual().unwrap(), LpStatus::Optimal);
        assert_relative_eq!(s.objective_value(), -2.0, epsilon = 1e-9);
    }

    #[test]
    fn removing_inactive_rows_preserves_the_solution() {
        // min -x0 - 2 x1 with a mix of binding and slack rows
        let rows: Vec<Row> = vec![
            Row {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: RowSense::Le,
                rhs: 3.0,
                id: RowId::Other("sum".into()),
            },
            Row {
                coeffs: vec![(0, 1.0)],
                sense: RowSense::Le,
                rhs: 10.0, // never binding
                id: RowId::Other("loose0".into()),
            },
            Row {
                coeffs: vec![(1, 1.0)],
                sense: RowSense::Le,
                rhs: 2.0,
                id: RowId::Other("cap1".into()),
            },
            Row {
                coeffs: vec![(0, 2.0), (1, 1.0)],
                sense: RowSense::Le,
                rhs: 50.0, // never binding
                id: RowId::Other("loose1".into()),
            },
        ];
        let model = tiny_model(vec![-1.0, -2.0], rows);
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Optimal);
        let obj = s.objective_value();
        let x = s.structural_solution();

        let inactive = s.inactive_rows();
        assert!(!inactive.is_empty());
        s.remove_rows(&inactive).unwrap();
        assert_eq!(s.structural_solution(), x);
        assert_eq!(s.objective_value(), obj);
        assert!(s.max_row_residual() <= 1e-9);

        // the shrunken state still supports appending and dual re-solves
        s.append_rows(&[Row {
            coeffs: vec![(0, 1.0), (1, 1.0)],
            sense: RowSense::Le,
            rhs: 2.5,
            id: RowId::Other("tighter".into()),
        }])
        .unwrap();
        assert_eq!(s.solve_dual().unwrap(), LpStatus::Optimal);
        assert_relative_eq!(s.objective_value(), -4.5, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_ties_still_terminate() {
        // several identical rows create degeneracy
        let rows: Vec<Row> = (0..6)
            .map(|i| Row {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                sense: RowSense::Le,
                rhs: 1.0,
                id: RowId::Other(format!("r{i}")),
            })
            .collect();
        let model = tiny_model(vec![-1.0, -2.0], rows);
        let mut s = Simplex::new(&model, 1e-8).unwrap();
        assert_eq!(s.solve_primal().unwrap(), LpStatus::Optimal);
        assert_relative_eq!(s.objective_value(), -2.0, epsilon = 1e-9);
    }
}
