//! Recovery and tightness sweeps over the separation parameter: paired
//! trials of the cutting-plane LP (t = 2, 3), the dense baseline LP, the
//! splitting SDP and Lloyd's heuristic on shared stochastic-ball instances,
//! with CSV and SVG emission.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{
    detect_partition_matrix, num_pairs, pair_index_unchecked, ratio_cut_vector,
    squared_distance_matrix, Partition, PartitionMatrix, PointSet,
};
use crate::lp::{self, LpOptions, LpStatus};
use crate::sbm::{self, SbmConfig};
use crate::sdp::{self, SdpOptions};
use crate::{Error, Result};

/// Methods a sweep can run on each instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LpkT2,
    LpkT3,
    Badlp,
    Sdp,
    Lloyd,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::LpkT2 => "lpk_t2",
            Method::LpkT3 => "lpk_t3",
            Method::Badlp => "badlp",
            Method::Sdp => "sdp",
            Method::Lloyd => "lloyd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DeltaGrid {
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0usize;
        loop {
            let v = self.start + self.step * i as f64;
            if v > self.stop + 1e-9 {
                break;
            }
            out.push(v);
            i += 1;
        }
        out
    }
}

/// Sweep description; `sbm.delta` acts as a template value and is replaced
/// by each grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sbm: SbmConfig,
    pub delta_grid: DeltaGrid,
    pub trials: usize,
    pub methods: Vec<Method>,
    /// base seed; per-trial seeds are derived from it
    pub seeds: u64,
    #[serde(default)]
    pub output: Option<String>,
    /// wall-clock means are environment noise; disable for byte-stable output
    #[serde(default = "default_true")]
    pub record_timings: bool,
    #[serde(default)]
    pub lp_max_rounds: Option<usize>,
    #[serde(default)]
    pub lp_viol_tol: Option<f64>,
}

fn default_true() -> bool {
    true
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if !(self.delta_grid.step > 0.0) {
            return Err(Error::invalid("grid step must be positive"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        Ok(())
    }

    fn lp_options(&self) -> LpOptions {
        let mut opts = LpOptions::default();
        if let Some(r) = self.lp_max_rounds {
            opts.max_rounds = r;
        }
        if let Some(v) = self.lp_viol_tol {
            opts.viol_tol = v;
        }
        opts
    }
}

/// Aggregated counts for one `(delta, method)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub method: Method,
    pub trials: usize,
    pub successes: usize,
    pub tight: usize,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<SweepRow>,
    pub config_hash: u64,
    pub version: String,
}

/// splitmix64 finalizer; stable across platforms and releases.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Instance seed shared by every method of a `(delta, trial)` cell.
pub fn trial_seed(base: u64, delta: f64, trial: usize) -> u64 {
    base ^ mix(delta.to_bits() ^ mix(trial as u64))
}

const LP_RECOVERY_TOL: f64 = 1e-6;

struct TrialOutcome {
    success: bool,
    tight: bool,
    seconds: f64,
}

fn full_matrix_matches(
    get: impl Fn(usize, usize) -> f64,
    planted: &Partition,
    tol: f64,
) -> Result<bool> {
    let z = PartitionMatrix::from_partition(planted)?;
    let n = planted.len();
    for i in 0..n {
        for j in 0..n {
            if (get(i, j) - z.get(i, j)).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Tightness of a full symmetric solution: the off-diagonal part must
/// round-trip through a partition whose matrix also matches the diagonal.
fn full_matrix_tight(get: impl Fn(usize, usize) -> f64, n: usize, tol: f64) -> bool {
    let mut x = vec![0.0; num_pairs(n)];
    for i in 0..n {
        for j in (i + 1)..n {
            x[pair_index_unchecked(i, j, n)] = get(i, j);
        }
    }
    let Some(p) = detect_partition_matrix(&x, n, tol) else {
        return false;
    };
    if !p.is_exact() {
        return false;
    }
    let Ok(z) = PartitionMatrix::from_partition(&p) else {
        return false;
    };
    (0..n).all(|i| (get(i, i) - z.get(i, i)).abs() <= tol)
}

fn run_method(
    method: Method,
    points: &PointSet,
    planted: &Partition,
    k: usize,
    seed: u64,
    lp_opts: &LpOptions,
) -> Result<TrialOutcome> {
    let started = Instant::now();
    let d = squared_distance_matrix(points);
    let n = points.len();
    let outcome = match method {
        Method::LpkT2 | Method::LpkT3 => {
            let t = if method == Method::LpkT2 { 2 } else { 3.min(k) };
            let (sol, _) = lp::cutting_plane_solve_default(&d, k, t, lp_opts)?;
            if sol.status != LpStatus::Optimal {
                TrialOutcome {
                    success: false,
                    tight: false,
                    seconds: 0.0,
                }
            } else {
                let target = ratio_cut_vector(planted).to_f64_vec();
                let success = sol
                    .x
                    .iter()
                    .zip(&target)
                    .all(|(a, b)| (a - b).abs() <= LP_RECOVERY_TOL);
                let tight = detect_partition_matrix(&sol.x, n, LP_RECOVERY_TOL).is_some();
                TrialOutcome {
                    success,
                    tight,
                    seconds: 0.0,
                }
            }
        }
        Method::Badlp => {
            let model = lp::build_badlp(&d, k)?;
            let sol = lp::solve_lp(&model)?;
            if sol.status != LpStatus::Optimal {
                TrialOutcome {
                    success: false,
                    tight: false,
                    seconds: 0.0,
                }
            } else {
                let np = num_pairs(n);
                let get = |i: usize, j: usize| {
                    if i == j {
                        sol.x[np + i]
                    } else {
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        sol.x[pair_index_unchecked(a, b, n)]
                    }
                };
                TrialOutcome {
                    success: full_matrix_matches(get, planted, LP_RECOVERY_TOL)?,
                    tight: full_matrix_tight(get, n, LP_RECOVERY_TOL),
                    seconds: 0.0,
                }
            }
        }
        Method::Sdp => {
            let sol = sdp::solve_pengwei(&d, k, &SdpOptions::default())?;
            let success = sdp::sdp_recovers(&sol, planted, sdp::SDP_RECOVERY_TOL)?;
            let get = |i: usize, j: usize| sol.z[(i, j)];
            TrialOutcome {
                success,
                tight: full_matrix_tight(get, n, sdp::SDP_RECOVERY_TOL),
                seconds: 0.0,
            }
        }
        Method::Lloyd => {
            let (p, _) = crate::oracle::lloyd(points, k, 10, seed)?;
            let success = p == *planted;
            TrialOutcome {
                success,
                // the heuristic always returns an actual partition
                tight: true,
                seconds: 0.0,
            }
        }
    };
    Ok(TrialOutcome {
        seconds: started.elapsed().as_secs_f64(),
        ..outcome
    })
}

/// Runs the sweep: per grid point and trial, one shared instance per cell,
/// every method on that instance, counting recovery and tightness. Solver
/// failures count as non-recovery rather than aborting the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let deltas = config.delta_grid.values();
    let lp_opts = config.lp_options();

    let cells: Vec<(usize, usize)> = (0..deltas.len())
        .flat_map(|d| (0..config.trials).map(move |t| (d, t)))
        .collect();

    let per_trial: Vec<Vec<TrialOutcome>> = cells
        .par_iter()
        .map(|&(d_idx, trial)| {
            let delta = deltas[d_idx];
            let seed = trial_seed(config.seeds, delta, trial);
            let instance_cfg = config.sbm.with_delta_and_seed(delta, seed);
            match sbm::generate(&instance_cfg) {
                Ok((points, planted)) => config
                    .methods
                    .iter()
                    .map(|&m| {
                        run_method(m, &points, &planted, instance_cfg.k, seed, &lp_opts)
                            .unwrap_or(TrialOutcome {
                                success: false,
                                tight: false,
                                seconds: 0.0,
                            })
                    })
                    .collect(),
                Err(_) => config
                    .methods
                    .iter()
                    .map(|_| TrialOutcome {
                        success: false,
                        tight: false,
                        seconds: 0.0,
                    })
                    .collect(),
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(deltas.len() * config.methods.len());
    for (d_idx, &delta) in deltas.iter().enumerate() {
        for (m_idx, &method) in config.methods.iter().enumerate() {
            let mut successes = 0;
            let mut tight = 0;
            let mut seconds = 0.0;
            for trial in 0..config.trials {
                let cell = d_idx * config.trials + trial;
                let outcome = &per_trial[cell][m_idx];
                successes += outcome.success as usize;
                tight += outcome.tight as usize;
                seconds += outcome.seconds;
            }
            rows.push(SweepRow {
                delta,
                method,
                trials: config.trials,
                successes,
                tight,
                mean_seconds: if config.record_timings {
                    seconds / config.trials as f64
                } else {
                    0.0
                },
            });
        }
    }
    // stable output order: delta ascending, method name ascending
    rows.sort_by(|a, b| {
        a.delta
            .partial_cmp(&b.delta)
            .unwrap()
            .then_with(|| a.method.name().cmp(b.method.name()))
    });

    let canonical = serde_json::to_string(config)?;
    let config_hash = canonical
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x1000_0000_01b3)
        });
    Ok(ExperimentResult {
        rows,
        config_hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// CSV emission: `delta,method,trials,successes,tight,mean_seconds`, rows in
/// the result's stable order.
pub fn emit_csv<W: Write>(result: &ExperimentResult, mut sink: W) -> Result<()> {
    writeln!(sink, "delta,method,trials,successes,tight,mean_seconds")?;
    for row in &result.rows {
        writeln!(
            sink,
            "{},{},{},{},{},{:.6}",
            row.delta, row.method, row.trials, row.successes, row.tight, row.mean_seconds
        )?;
    }
    Ok(())
}

const SVG_PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Success-rate curves as a standalone SVG: one polyline per method over
/// the delta grid, with axes and a legend.
pub fn emit_svg<W: Write>(result: &ExperimentResult, mut sink: W) -> Result<()> {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 20.0, 50.0);
    let mut methods: Vec<Method> = result.rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut deltas: Vec<f64> = result.rows.iter().map(|r| r.delta).collect();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    deltas.dedup();
    let (dmin, dmax) = match (deltas.first(), deltas.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a - 0.5, a + 0.5),
        _ => (0.0, 1.0),
    };
    let x_of = |d: f64| ml + (d - dmin) / (dmax - dmin) * (w - ml - mr);
    let y_of = |rate: f64| mt + (1.0 - rate) * (h - mt - mb);

    writeln!(
        sink,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">"
    )?;
    writeln!(
        sink,
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>"
    )?;
    // axes
    writeln!(
        sink,
        "  <line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb,
        w - mr,
        h - mb
    )?;
    writeln!(
        sink,
        "  <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb
    )?;
    for tick in [0.0, 0.5, 1.0] {
        writeln!(
            sink,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{tick}</text>",
            ml - 6.0,
            y_of(tick) + 4.0
        )?;
    }
    writeln!(
        sink,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">separation</text>",
        (ml + w - mr) / 2.0,
        h - 12.0
    )?;
    for (pos, &d) in deltas.iter().enumerate() {
        if deltas.len() <= 8 || pos % (deltas.len() / 8 + 1) == 0 {
            writeln!(
                sink,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{d}</text>",
                x_of(d),
                h - mb + 16.0
            )?;
        }
    }

    for (m_idx, method) in methods.iter().enumerate() {
        let color = SVG_PALETTE[m_idx % SVG_PALETTE.len()];
        let points: Vec<String> = deltas
            .iter()
            .filter_map(|&d| {
                result
                    .rows
                    .iter()
                    .find(|r| r.method == *method && r.delta == d)
                    .map(|r| {
                        let rate = r.successes as f64 / r.trials.max(1) as f64;
                        format!("{:.2},{:.2}", x_of(d), y_of(rate))
                    })
            })
            .collect();
        writeln!(
            sink,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            points.join(" ")
        )?;
        let ly = mt + 16.0 * m_idx as f64 + 10.0;
        writeln!(
            sink,
            "  <line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ml + 10.0,
            ml + 34.0
        )?;
        writeln!(
            sink,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            ml + 40.0,
            ly + 4.0,
            method
        )?;
    }
    writeln!(sink, "</svg>")?;
    Ok(())
}
