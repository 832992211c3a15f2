//! Trace/row-stochastic/PSD/nonnegative relaxation of K-means, solved by
//! consensus operator splitting: three copies of the matrix variable are
//! projected onto the affine set `{Z = Z^T, Z 1 = 1, Tr Z = K}` (closed
//! form), the PSD cone (eigenvalue clipping) and the nonnegative orthant
//! (entrywise clamp), with scaled dual updates tying them to a consensus
//! average that absorbs the linear objective.

use nalgebra::{DMatrix, DVector};

use crate::core::{DistanceMatrix, Partition, PartitionMatrix};
use crate::{Error, Result};

/// Solver options; the defaults suit recovery classification at `n <= 150`.
#[derive(Debug, Clone)]
pub struct SdpOptions {
    pub max_iters: usize,
    pub tol: f64,
    /// splitting step
    pub rho: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            max_iters: 5000,
            tol: 1e-6,
            rho: 1.0,
        }
    }
}

/// Feasibility residuals of a returned matrix, recomputed from the matrix
/// itself rather than carried over from the solver state.
#[derive(Debug, Clone, Copy)]
pub struct SdpResiduals {
    /// worst consensus disagreement at the final iterate (Frobenius)
    pub primal: f64,
    /// consensus movement between the last two iterations (Frobenius)
    pub dual: f64,
    /// `max(0, -lambda_min(Z))`
    pub psd_violation: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// returned iterate; exactly feasible for the affine constraints
    pub z: DMatrix<f64>,
    pub objective: f64,
    pub residuals: SdpResiduals,
    pub iterations: usize,
    pub converged: bool,
    /// worst consensus residual per iteration (for trend checks)
    pub residual_history: Vec<f64>,
}

const SDP_MAX_N: usize = 150;

/// Projection onto `{Z symmetric, Z 1 = 1, Tr Z = K}`.
fn project_affine(m: &DMatrix<f64>, k: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let nf = n as f64;
    let m = (m + m.transpose()) * 0.5;
    // Z = M + mu 1^T + 1 mu^T + nu I solves the normal equations
    let a: DVector<f64> = m.column_sum();
    let t = m.trace();
    let sum_a: f64 = a.sum();
    let q = (nf - sum_a) / nf;
    let nu = (k - t - q) / (nf - 1.0);
    let s = (q - nu) / 2.0;
    let mut z = m.clone();
    let mu: DVector<f64> = DVector::from_fn(n, |i, _| (1.0 - a[i] - (s + nu)) / nf);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] += mu[i] + mu[j];
        }
        z[(i, i)] += nu;
    }
    z
}

/// Projection onto the PSD cone by eigenvalue clipping.
fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let clipped = DVector::from_fn(eig.eigenvalues.len(), |i, _| eig.eigenvalues[i].max(0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}

fn lambda_min(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Solves `min <D, Z>` over the relaxation feasible set.
///
/// On convergence the affine-feasible copy is returned, so trace and row
/// sums hold to machine precision and the PSD/nonnegativity violations are
/// bounded by the consensus tolerance.
pub fn solve_pengwei(d: &DistanceMatrix, k: usize, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K = {k} out of range for n = {n}")));
    }
    if n > SDP_MAX_N {
        return Err(Error::resource(format!(
            "dense eigendecompositions limited to n <= {SDP_MAX_N}"
        )));
    }

    // the argmin is invariant under positive objective scaling; normalizing
    // the cost matrix conditions the splitting
    let dmax = d.max_entry().max(1e-12);
    let dmat = DMatrix::from_fn(n, n, |i, j| d.get(i, j) / dmax);

    let kf = k as f64;
    let rho = opts.rho;
    // start from the barycentric feasible point
    let start = project_affine(&DMatrix::from_element(n, n, 1.0 / n as f64), kf);
    let mut zbar = start;
    let mut copies = vec![zbar.clone(), zbar.clone(), zbar.clone()];
    let mut duals = vec![DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];

    let mut history = Vec::with_capacity(opts.max_iters.min(8192));
    let mut converged = false;
    let mut iterations = 0;
    let mut dual_res = f64::INFINITY;

    for iter in 0..opts.max_iters {
        iterations = iter + 1;

        for (idx, (copy, dual)) in copies.iter_mut().zip(duals.iter_mut()).enumerate() {
            let target = &zbar - &*dual;
            *copy = match idx {
                0 => project_affine(&target, kf),
                1 => project_psd(&target),
                _ => target.map(|v| v.max(0.0)),
            };
        }

        let prev = zbar.clone();
        zbar = (&copies[0] + &duals[0] + &copies[1] + &duals[1] + &copies[2] + &duals[2]) / 3.0
            - &dmat / (3.0 * rho);

        for (copy, dual) in copies.iter().zip(duals.iter_mut()) {
            *dual += copy - &zbar;
        }

        let primal_res = copies
            .iter()
            .map(|c| (c - &zbar).norm())
            .fold(0.0_f64, f64::max);
        dual_res = rho * (&zbar - &prev).norm();
        history.push(primal_res);

        if primal_res.max(dual_res) <= opts.tol / 2.0 {
            converged = true;
            break;
        }
    }

    // return the affine-feasible copy of the final consensus
    let z = project_affine(&zbar, kf);
    let objective: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j) * z[(i, j)])
        .sum();
    let primal = copies
        .iter()
        .map(|c| (c - &z).norm())
        .fold(0.0_f64, f64::max);
    let psd_violation = (-lambda_min(&z)).max(0.0);

    Ok(SdpSolution {
        z,
        objective,
        residuals: SdpResiduals {
            primal,
            dual: dual_res,
            psd_violation,
        },
        iterations,
        converged,
        residual_history: history,
    })
}

/// Default infinity-norm tolerance for declaring SDP recovery; looser than
/// the LP tolerance because first-order iterates land near vertices, not on
/// them.
pub const SDP_RECOVERY_TOL: f64 = 1e-3;

/// True iff the solution matches the planted partition matrix entrywise
/// within `tol`.
pub fn sdp_recovers(sol: &SdpSolution, planted: &Partition, tol: f64) -> Result<bool> {
    let n = planted.len();
    if sol.z.nrows() != n {
        return Err(Error::invalid("solution/partition size mismatch"));
    }
    let target = PartitionMatrix::from_partition(planted)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((sol.z[(i, j)] - target.get(i, j)).abs());
        }
    }
    Ok(worst <= tol)
}
