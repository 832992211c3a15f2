//! Dev probe: converge one instance and report the composition of the
//! active cut set at optimality.

use ratiocut::core::{detect_partition_matrix, squared_distance_matrix, DETECT_TOL};
use ratiocut::lp::{cutting_plane_solve_default, LpOptions, RowId, RowSense};
use ratiocut::sbm::{generate, Layout, SbmConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let delta: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let cfg = SbmConfig {
        m: 2,
        k: 2,
        n_total: n,
        delta,
        layout: Layout::TwoCenters,
        seed: 7,
    };
    let (points, planted) = generate(&cfg).unwrap();
    let d = squared_distance_matrix(&points);
    let started = std::time::Instant::now();
    let (sol, model) = cutting_plane_solve_default(&d, 2, 2, &LpOptions::default()).unwrap();
    println!(
        "status {:?} rounds {} pivots {} obj {:.4} in {:.1}s, pool {}",
        sol.status,
        sol.rounds,
        sol.pivots,
        sol.objective,
        started.elapsed().as_secs_f64(),
        model.rows.len()
    );
    let labels = planted.labels();
    let mut within_pair_foreign = 0usize; // i,j same cluster, k foreign
    let mut within_triple = 0usize; // i,j,k same cluster
    let mut cross_pair = 0usize; // i alone, j or k with it...
    let mut other = 0usize;
    let mut active_counts = (0usize, 0usize, 0usize, 0usize);
    for row in &model.rows {
        if let RowId::Cut { owner, set } = &row.id {
            let (j, k) = (set[0], set[1]);
            let li = labels[*owner];
            let class = if labels[j] == li && labels[k] == li {
                within_triple += 1;
                0
            } else if labels[j] == li || labels[k] == li {
                within_pair_foreign += 1;
                1
            } else if labels[j] == labels[k] {
                cross_pair += 1;
                2
            } else {
                other += 1;
                3
            };
            if row.sense == RowSense::Le {
                let lhs: f64 = row.coeffs.iter().map(|&(c, v)| v * sol.x[c]).sum();
                if (lhs - row.rhs).abs() < 1e-7 {
                    match class {
                        0 => active_counts.0 += 1,
                        1 => active_counts.1 += 1,
                        2 => active_counts.2 += 1,
                        _ => active_counts.3 += 1,
                    }
                }
            }
        }
    }
    println!(
        "pool classes: within-triple {within_pair_foreign_t}, pair+foreign {within_pair_foreign}, cross-pair {cross_pair}, mixed {other}",
        within_pair_foreign_t = within_triple
    );
    println!(
        "TIGHT at solution: within-triple {}, pair+foreign {}, cross-pair {}, mixed {}",
        active_counts.0, active_counts.1, active_counts.2, active_counts.3
    );
    match detect_partition_matrix(&sol.x, n, DETECT_TOL) {
        Some(p) => println!("tight solution, partition == planted: {}", p == planted),
        None => println!("solution is NOT a partition matrix"),
    }
}
