//! Fixed-format MPS writer for the LP models.
//!
//! Rows are named `RSUM_i`, `TRACE`, `CUT_k` (triangle pool order) and
//! `D_i_j` (diagonal dominance); columns use the `X_i_j` naming of the
//! variable layout and the objective row is `COST`. Output is deterministic,
//! so exporting the same model twice yields identical bytes.
//!
//! For the pair-variable models the row sums are identities of the diagonal
//! substitution and carry no coefficients; they are still emitted (as empty
//! `E` rows) so the row naming is uniform across layouts.

use std::io::Write;

use crate::lp::{Model, Row, RowId, RowSense, VarLayout};
use crate::Result;

fn row_name(row: &Row, cut_index: &mut usize) -> String {
    match &row.id {
        RowId::Trace => "TRACE".to_string(),
        RowId::RowSum(i) => format!("RSUM_{i}"),
        RowId::Cut { .. } => {
            let name = format!("CUT_{cut_index}");
            *cut_index += 1;
            name
        }
        RowId::DiagDominance { i, j } => format!("D_{i}_{j}"),
        RowId::Other(name) => name.clone(),
    }
}

fn fmt_value(v: f64) -> String {
    let s = format!("{v}");
    if s.len() <= 12 {
        s
    } else {
        format!("{v:.6e}")
    }
}

/// Writes the model in MPS format.
pub fn export_mps<W: Write>(model: &Model, mut sink: W) -> Result<()> {
    let n_vars = model.num_vars();

    // resolve row names once, in model order
    let mut cut_index = 0usize;
    let names: Vec<String> = model
        .rows
        .iter()
        .map(|r| row_name(r, &mut cut_index))
        .collect();

    // pair layouts: surface the substituted row-sum identities as empty rows
    let phantom_rsums = matches!(model.layout, VarLayout::PairUpper { .. });
    let mut phantom: Vec<String> = Vec::new();
    if phantom_rsums {
        phantom = (0..model.n).map(|i| format!("RSUM_{i}")).collect();
    }

    writeln!(sink, "NAME          RATIOCUT")?;
    writeln!(sink, "ROWS")?;
    writeln!(sink, " N  COST")?;
    for name in &phantom {
        writeln!(sink, " E  {name}")?;
    }
    for (row, name) in model.rows.iter().zip(&names) {
        let sense = match row.sense {
            RowSense::Le => "L",
            RowSense::Eq => "E",
        };
        writeln!(sink, " {sense}  {name}")?;
    }

    // gather entries per column
    let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_vars];
    for (r, row) in model.rows.iter().enumerate() {
        for &(c, v) in &row.coeffs {
            per_col[c].push((r, v));
        }
    }

    writeln!(sink, "COLUMNS")?;
    for col in 0..n_vars {
        let cname = model.layout.var_name(col);
        let mut entries: Vec<(String, f64)> = Vec::new();
        if model.objective[col] != 0.0 {
            entries.push(("COST".to_string(), model.objective[col]));
        }
        for &(r, v) in &per_col[col] {
            entries.push((names[r].clone(), v));
        }
        let mut it = entries.chunks(2);
        for chunk in &mut it {
            match chunk {
                [(r1, v1), (r2, v2)] => writeln!(
                    sink,
                    "    {:<10}{:<10}{:<15}{:<10}{}",
                    cname,
                    r1,
                    fmt_value(*v1),
                    r2,
                    fmt_value(*v2)
                )?,
                [(r1, v1)] => {
                    writeln!(sink, "    {:<10}{:<10}{}", cname, r1, fmt_value(*v1))?
                }
                _ => {}
            }
        }
    }

    writeln!(sink, "RHS")?;
    for (row, name) in model.rows.iter().zip(&names) {
        if row.rhs != 0.0 {
            writeln!(sink, "    RHS       {:<10}{}", name, fmt_value(row.rhs))?;
        }
    }
    writeln!(sink, "ENDATA")?;
    Ok(())
}
