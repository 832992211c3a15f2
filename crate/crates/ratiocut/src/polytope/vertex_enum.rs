//! Exact vertex enumeration by incremental halfspace insertion (double
//! description over the vertex set of a bounded polytope).
//!
//! The caller supplies the full halfspace list `a·x <= b` together with the
//! vertices of the polytope cut out by the first `n_init` halfspaces (for
//! this crate: a bounding simplex). Each remaining halfspace is inserted in
//! turn; surviving vertices are kept and every cut edge between a violating
//! and a satisfying vertex contributes its intersection point. Adjacency is
//! decided combinatorially from exact tight sets, so the result is the exact
//! vertex set.

use num::{BigRational, Zero};

use crate::{Error, Result};

pub(crate) struct Halfspace {
    pub a: Vec<BigRational>,
    pub b: BigRational,
}

struct Vertex {
    coords: Vec<BigRational>,
    tight: u128,
}

fn eval(h: &Halfspace, x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (c, v) in h.a.iter().zip(x) {
        if !c.is_zero() && !v.is_zero() {
            acc += c * v;
        }
    }
    acc - &h.b
}

fn tight_set(halfspaces: &[Halfspace], upto: usize, x: &[BigRational]) -> u128 {
    let mut bits = 0u128;
    for (idx, h) in halfspaces.iter().take(upto).enumerate() {
        if eval(h, x).is_zero() {
            bits |= 1 << idx;
        }
    }
    bits
}

/// Enumerates the vertices of `{x : a_i·x <= b_i for all i}`.
///
/// `initial_vertices` must be exactly the vertices of the polytope defined by
/// the first `n_init` halfspaces, and the full system must be bounded and
/// nonempty.
pub(crate) fn enumerate_vertices(
    halfspaces: &[Halfspace],
    n_init: usize,
    initial_vertices: Vec<Vec<BigRational>>,
    max_vertices: usize,
) -> Result<Vec<Vec<BigRational>>> {
    if halfspaces.len() > 128 {
        return Err(Error::resource("vertex enumeration limited to 128 halfspaces"));
    }
    let dim = halfspaces
        .first()
        .map(|h| h.a.len())
        .ok_or_else(|| Error::invalid("no halfspaces"))?;

    let mut verts: Vec<Vertex> = initial_vertices
        .into_iter()
        .map(|coords| {
            let tight = tight_set(halfspaces, n_init, &coords);
            Vertex { coords, tight }
        })
        .collect();

    for h_idx in n_init..halfspaces.len() {
        let h = &halfspaces[h_idx];
        let vals: Vec<BigRational> = verts.iter().map(|v| eval(h, &v.coords)).collect();

        let mut inside: Vec<usize> = Vec::new();
        let mut on: Vec<usize> = Vec::new();
        let mut outside: Vec<usize> = Vec::new();
        for (i, val) in vals.iter().enumerate() {
            if val.is_zero() {
                on.push(i);
            } else if *val < BigRational::zero() {
                inside.push(i);
            } else {
                outside.push(i);
            }
        }

        if outside.is_empty() {
            for &i in &on {
                verts[i].tight |= 1 << h_idx;
            }
            continue;
        }

        // intersection points of cut edges
        let mut cut_points: Vec<Vertex> = Vec::new();
        for &u in &outside {
            for &v in &inside {
                if !adjacent(&verts, u, v, dim) {
                    continue;
                }
                // p = u + t (v - u) with t = val_u / (val_u - val_v) in (0, 1)
                let t = &vals[u] / (&vals[u] - &vals[v]);
                let coords: Vec<BigRational> = verts[u]
                    .coords
                    .iter()
                    .zip(&verts[v].coords)
                    .map(|(cu, cv)| cu + &t * (cv - cu))
                    .collect();
                let tight = tight_set(halfspaces, h_idx + 1, &coords);
                cut_points.push(Vertex { coords, tight });
            }
        }

        let mut next: Vec<Vertex> = Vec::with_capacity(inside.len() + on.len() + cut_points.len());
        let keep: Vec<usize> = inside.iter().chain(&on).copied().collect();
        let mut verts_drain: Vec<Option<Vertex>> = verts.into_iter().map(Some).collect();
        for i in keep {
            let mut v = verts_drain[i].take().unwrap();
            if vals[i].is_zero() {
                v.tight |= 1 << h_idx;
            }
            next.push(v);
        }
        next.extend(cut_points);
        verts = next;

        if verts.len() > max_vertices {
            return Err(Error::resource(format!(
                "vertex count exceeded {max_vertices} during enumeration"
            )));
        }
    }

    Ok(verts.into_iter().map(|v| v.coords).collect())
}

/// Exact combinatorial adjacency: `u` and `v` span an edge iff no other
/// vertex is tight on all constraints common to both.
fn adjacent(verts: &[Vertex], u: usize, v: usize, dim: usize) -> bool {
    let common = verts[u].tight & verts[v].tight;
    if (common.count_ones() as usize) < dim.saturating_sub(1) {
        return false;
    }
    !verts
        .iter()
        .enumerate()
        .any(|(w, vert)| w != u && w != v && vert.tight & common == common)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;
    use std::collections::BTreeSet;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn unit_box_3d() -> (Vec<Halfspace>, Vec<Vec<BigRational>>) {
        let mut hs = Vec::new();
        for d in 0..3 {
            let mut a = vec![rat(0, 1); 3];
            a[d] = rat(-1, 1);
            hs.push(Halfspace { a, b: rat(0, 1) });
            let mut a = vec![rat(0, 1); 3];
            a[d] = rat(1, 1);
            hs.push(Halfspace { a, b: rat(1, 1) });
        }
        let corners = (0..8)
            .map(|mask: i64| (0..3).map(|d| rat((mask >> d) & 1, 1)).collect())
            .collect();
        (hs, corners)
    }

    fn as_set(vs: Vec<Vec<BigRational>>) -> BTreeSet<Vec<BigRational>> {
        vs.into_iter().collect()
    }

    #[test]
    fn cube_with_corner_cut() {
        let (mut hs, corners) = unit_box_3d();
        // x + y + z <= 5/2 slices off the (1,1,1) corner
        hs.push(Halfspace {
            a: vec![rat(1, 1), rat(1, 1), rat(1, 1)],
            b: rat(5, 2),
        });
        let got = as_set(enumerate_vertices(&hs, 6, corners, 10_000).unwrap());

        let mut expected: BTreeSet<Vec<BigRational>> = (0..8)
            .filter(|&mask| mask != 7)
            .map(|mask: i64| (0..3).map(|d| rat((mask >> d) & 1, 1)).collect())
            .collect();
        expected.insert(vec![rat(1, 2), rat(1, 1), rat(1, 1)]);
        expected.insert(vec![rat(1, 1), rat(1, 2), rat(1, 1)]);
        expected.insert(vec![rat(1, 1), rat(1, 1), rat(1, 2)]);
        assert_eq!(got, expected);
    }

    #[test]
    fn cut_through_existing_vertices_keeps_them() {
        let (mut hs, corners) = unit_box_3d();
        // x + y <= 1 passes exactly through four cube vertices
        hs.push(Halfspace {
            a: vec![rat(1, 1), rat(1, 1), rat(0, 1)],
            b: rat(1, 1),
        });
        let got = as_set(enumerate_vertices(&hs, 6, corners, 10_000).unwrap());
        let expected: BTreeSet<Vec<BigRational>> = vec![
            vec![rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn redundant_halfspace_changes_nothing() {
        let (mut hs, corners) = unit_box_3d();
        hs.push(Halfspace {
            a: vec![rat(1, 1), rat(1, 1), rat(1, 1)],
            b: rat(10, 1),
        });
        let got = as_set(enumerate_vertices(&hs, 6, corners.clone(), 10_000).unwrap());
        assert_eq!(got, as_set(corners));
    }
}
