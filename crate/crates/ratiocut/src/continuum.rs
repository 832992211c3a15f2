//! Continuum-limit checks for two unit balls: the split-cost function of
//! hyperplane partitions, the one-dimensional recovery threshold, and the
//! planar geometric inequality governing the averaged-minimum condition.
//!
//! All ball integrals reduce to one-dimensional quadrature with analytic
//! cross-section volumes; nothing here needs general cubature.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Adaptive Simpson quadrature with an absolute tolerance; returns the
/// integral and an error estimate.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> (f64, f64) {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            (left + right + delta / 15.0, delta.abs() / 15.0)
        } else {
            let (lv, le) = recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1);
            let (rv, re) = recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1);
            (lv + rv, le + re)
        }
    }
    if a >= b {
        return (0.0, 0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Volume of the unit ball in dimension `k` (with the convention that the
/// 0-ball has volume 1).
fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / k as f64 * unit_ball_volume(k - 2),
    }
}

/// Integrals of a slab of a unit ball centered at `center` on the first
/// axis, over `s` in `[lo, hi]`: mass, first moment, second moment, and the
/// perpendicular second-moment term.
struct SlabIntegrals {
    mass: f64,
    moment: f64,
    second: f64,
    perp: f64,
    err: f64,
}

fn slab_integrals(center: f64, lo: f64, hi: f64, m: usize, tol: f64) -> SlabIntegrals {
    let lo = lo.max(center - 1.0);
    let hi = hi.min(center + 1.0);
    if lo >= hi {
        return SlabIntegrals {
            mass: 0.0,
            moment: 0.0,
            second: 0.0,
            perp: 0.0,
            err: 0.0,
        };
    }
    let vol = unit_ball_volume(m - 1);
    let cross = move |s: f64| {
        let r2 = (1.0 - (s - center) * (s - center)).max(0.0);
        vol * r2.powf((m as f64 - 1.0) / 2.0)
    };
    // within a cross-section of radius r, the perpendicular part integrates
    // to area * r^2 (m-1)/(m+1)
    let perp_frac = (m as f64 - 1.0) / (m as f64 + 1.0);
    let (mass, e1) = adaptive_simpson(&cross, lo, hi, tol);
    let (moment, e2) = adaptive_simpson(&|s| s * cross(s), lo, hi, tol);
    let (second, e3) = adaptive_simpson(&|s| s * s * cross(s), lo, hi, tol);
    let (perp, e4) = adaptive_simpson(
        &|s| {
            let r2 = (1.0 - (s - center) * (s - center)).max(0.0);
            cross(s) * r2 * perp_frac
        },
        lo,
        hi,
        tol,
    );
    SlabIntegrals {
        mass,
        moment,
        second,
        perp,
        err: e1 + e2 + e3 + e4,
    }
}

/// Split cost and estimated quadrature error for the cut `x_1 <= -a` of two
/// unit balls centered at `±(delta/2) e_1`.
pub fn split_cost_with_error(a: f64, m: usize, delta: f64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if a.abs() >= delta / 2.0 + 1.0 {
        return Err(Error::invalid("cut plane leaves the support"));
    }
    let tol = 2.5e-7; // per integral; several integrals stay within 1e-6 per region
    let centers = [-delta / 2.0, delta / 2.0];
    let cut = -a;

    let mut err = 0.0;
    let mut cost = 0.0;
    for (lo, hi) in [(f64::NEG_INFINITY, cut), (cut, f64::INFINITY)] {
        // each region is a union of slabs of the two balls; the optimal
        // center is the region barycenter, which lies on the axis
        let mut mass = 0.0;
        let mut moment = 0.0;
        let mut second = 0.0;
        let mut perp = 0.0;
        for &c in &centers {
            let s = slab_integrals(c, lo, hi, m, tol);
            mass += s.mass;
            moment += s.moment;
            second += s.second;
            perp += s.perp;
            err += s.err;
        }
        if mass > 1e-12 {
            cost += second - moment * moment / mass + perp;
        }
    }
    Ok((cost, err))
}

/// Split cost `F(a)`; see [`split_cost_with_error`].
pub fn split_cost(a: f64, m: usize, delta: f64) -> Result<f64> {
    split_cost_with_error(a, m, delta).map(|(v, _)| v)
}

/// Sampled split-cost curve, dumpable as `a,F` CSV.
#[derive(Debug, Clone)]
pub struct SplitCostCurve {
    pub m: usize,
    pub delta: f64,
    pub grid: Vec<(f64, f64)>,
    pub quadrature_error: f64,
}

impl SplitCostCurve {
    pub fn sample(m: usize, delta: f64, lo: f64, hi: f64, step: f64) -> Result<Self> {
        if step <= 0.0 {
            return Err(Error::invalid("step must be positive"));
        }
        let mut grid = Vec::new();
        let mut err: f64 = 0.0;
        let mut a = lo;
        while a <= hi + 1e-12 {
            let (f, e) = split_cost_with_error(a, m, delta)?;
            grid.push((a, f));
            err = err.max(e);
            a += step;
        }
        Ok(SplitCostCurve {
            m,
            delta,
            grid,
            quadrature_error: err,
        })
    }

    pub fn to_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "a,F")?;
        for (a, f) in &self.grid {
            writeln!(sink, "{a},{f}")?;
        }
        Ok(())
    }
}

/// Grid minimizer of the split cost over `a in [-1, 1]`, refined by
/// golden-section search around the winner.
pub fn argmin_split(m: usize, delta: f64, grid_step: f64) -> Result<f64> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::invalid("grid step must be in (0, 0.01]"));
    }
    let mut best = (f64::INFINITY, 0.0);
    let mut a = -1.0;
    while a <= 1.0 + 1e-12 {
        let f = split_cost(a, m, delta)?;
        if f < best.0 {
            best = (f, a);
        }
        a += grid_step;
    }
    let lo = (best.1 - grid_step).max(-1.0);
    let hi = (best.1 + grid_step).min(1.0);
    Ok(golden_section(|a| split_cost(a, m, delta).expect("domain checked"), lo, hi, 1e-9))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Split cost of the one-dimensional boundary measure: each unit ball
/// contributes its boundary pair `center ± 1` as unit atoms, and a cut at
/// plane position `p` groups the atoms left and right of it.
///
/// This is the measure behind the classical one-dimensional transition; the
/// solid-interval cost has no such transition because interior cuts lose to
/// the gap cut at every separation (the filled mass pins the barycenters).
fn boundary_split_cost_1d(p: f64, delta: f64) -> f64 {
    let atoms = [
        -delta / 2.0 - 1.0,
        -delta / 2.0 + 1.0,
        delta / 2.0 - 1.0,
        delta / 2.0 + 1.0,
    ];
    let mut cost = 0.0;
    for side in [true, false] {
        let group: Vec<f64> = atoms
            .iter()
            .copied()
            .filter(|&x| (x <= p) == side)
            .collect();
        if group.is_empty() {
            continue;
        }
        let mean: f64 = group.iter().sum::<f64>() / group.len() as f64;
        cost += group.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    }
    cost
}

/// Whether the symmetric split is the strict global minimizer over all cut
/// positions in dimension one at the given separation.
fn symmetric_split_optimal_1d(delta: f64) -> bool {
    let planted = boundary_split_cost_1d(0.0, delta);
    // distinct nonempty splits are cuts between consecutive atoms
    let probes = [
        -delta / 2.0, // 1 | 3
        delta / 2.0,  // 3 | 1
    ];
    probes
        .iter()
        .all(|&p| boundary_split_cost_1d(p, delta) > planted)
}

/// Separation at which the symmetric split becomes the strict global
/// one-dimensional minimizer, found by bisection.
pub fn one_d_threshold() -> f64 {
    let mut lo = 2.0; // asymmetric split wins here
    let mut hi = 3.0; // symmetric split wins here
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if symmetric_split_optimal_1d(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Output of the planar inequality scan.
#[derive(Debug, Clone)]
pub struct GeometricCondition {
    /// whether the located maximum stays below `delta^2 / 2`
    pub holds: bool,
    pub max_value: f64,
    /// angles `(theta, eta)` of the maximizing directions
    pub max_angles: (f64, f64),
    /// value at the antipodal axis pair, analytically `delta + 1`
    pub endpoint_value: f64,
}

/// Disk average of `max(x·z, y·z)` minus `x·y` for unit vectors at angles
/// `theta`, `eta`, where the disk has unit radius and center `delta e_1`.
fn disk_objective(theta: f64, eta: f64, delta: f64) -> f64 {
    let x = [theta.cos(), theta.sin()];
    let y = [eta.cos(), eta.sin()];
    // max(u, v) = (u + v)/2 + |u - v|/2; the first part averages to the
    // value at the barycenter, the second reduces to a 1-D slice integral
    let mean_part = 0.5 * delta * (x[0] + y[0]);
    let w = [x[0] - y[0], x[1] - y[1]];
    let wnorm = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let abs_part = if wnorm < 1e-14 {
        (w[0] * delta).abs()
    } else {
        let beta = w[0] * delta; // w · center
        // u has density (2/pi) sqrt(1 - t^2) along the w direction
        let (v, _) = adaptive_simpson(
            &|t: f64| {
                (beta + wnorm * t).abs() * (2.0 / std::f64::consts::PI)
                    * (1.0 - t * t).max(0.0).sqrt()
            },
            -1.0,
            1.0,
            1e-9,
        );
        v
    };
    mean_part + 0.5 * abs_part - (x[0] * y[0] + x[1] * y[1])
}

/// Scans unit-vector pairs on the circle for the maximum of the disk
/// objective and compares it against `delta^2 / 2`. The planar case decides
/// the inequality in every dimension.
pub fn geometric_condition(delta: f64, grid: usize) -> Result<GeometricCondition> {
    if delta < 2.0 {
        return Err(Error::invalid("separation below touching balls"));
    }
    let grid = grid.max(16);
    let tau = std::f64::consts::TAU;
    let step = tau / grid as f64;

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid {
        let theta = i as f64 * step;
        for j in 0..grid {
            let eta = j as f64 * step;
            let v = disk_objective(theta, eta, delta);
            if v > best.0 {
                best = (v, theta, eta);
            }
        }
    }
    // refine locally, twice, an order of magnitude each time
    let mut span = step;
    let (mut max_value, mut th, mut et) = best;
    for _ in 0..2 {
        let fine = span / 10.0;
        let mut local = (max_value, th, et);
        let mut t = th - span;
        while t <= th + span + 1e-12 {
            let mut e = et - span;
            while e <= et + span + 1e-12 {
                let v = disk_objective(t, e, delta);
                if v > local.0 {
                    local = (v, t, e);
                }
                e += fine;
            }
            t += fine;
        }
        max_value = local.0;
        th = local.1;
        et = local.2;
        span = fine;
    }

    let endpoint_value = disk_objective(0.0, std::f64::consts::PI, delta);
    let max_value = max_value.max(endpoint_value);
    Ok(GeometricCondition {
        holds: max_value < delta * delta / 2.0,
        max_value,
        max_angles: (th, et),
        endpoint_value,
    })
}

/// Default angular resolution for [`geometric_condition`].
pub const GEOMETRIC_GRID: usize = 400;

/// Plug-in estimate of the optimality-slack constant: one third of the gap
/// between `delta^2 / 2` and the located maximum, with the disk average at
/// the maximizer re-estimated by Monte Carlo.
pub fn epsilon_estimate(delta: f64, mc_samples: usize, seed: u64) -> Result<f64> {
    let cond = geometric_condition(delta, GEOMETRIC_GRID)?;
    let (theta, eta) = cond.max_angles;
    let x = [theta.cos(), theta.sin()];
    let y = [eta.cos(), eta.sin()];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = mc_samples.max(1);
    let mut acc = 0.0;
    for _ in 0..samples {
        // uniform point of the unit disk at center (delta, 0)
        let (mut u, mut v);
        loop {
            u = rng.gen_range(-1.0..1.0);
            v = rng.gen_range(-1.0..1.0);
            if u * u + v * v <= 1.0 {
                break;
            }
        }
        let z = [delta + u, v];
        acc += (x[0] * z[0] + x[1] * z[1]).max(y[0] * z[0] + y[1] * z[1]);
    }
    let mc_obj = acc / samples as f64 - (x[0] * y[0] + x[1] * y[1]);
    let g = mc_obj.max(cond.endpoint_value);
    Ok((delta * delta / 2.0 - g) / 3.0)
}
