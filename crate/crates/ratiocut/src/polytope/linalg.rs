//! Exact rational Gaussian elimination: matrix rank and affine rank.

use num::{BigRational, Zero};

/// Rank of the row set, computed exactly.
pub(crate) fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        for i in (r + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] / &rows[r][col];
            for c in col..cols {
                let delta = &factor * &rows[r][c];
                rows[i][c] = &rows[i][c] - delta;
            }
        }
        r += 1;
    }
    r
}

/// Dimension of the affine span of the points (rank of differences).
pub(crate) fn affine_dim(points: &[Vec<BigRational>]) -> usize {
    match points {
        [] | [_] => 0,
        [base, rest @ ..] => rank(
            rest.iter()
                .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect(),
        ),
    }
}
