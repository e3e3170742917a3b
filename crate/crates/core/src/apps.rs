//! End-to-end experiments: the piecewise (z-3)^2 / z^2 counterexample
//! geometry, the z^2+2 separation argument, the bi-equicontinuity
//! violation ratios, quasicircle turning constants, and Hausdorff
//! convergence of truncated sequences.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{components, escape_time, filled_julia, min_component_gap};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::poly::Polynomial;
use crate::seq::{Bounds, SeqKind, SequenceSpec};
use crate::sphere::ExtComplex;

/// The counterexample sequence: (z-3)^2 at times (j+1)(j+2)/2 - 1 for
/// 1 <= j <= n (every such time when `n` is None), z^2 otherwise.
pub fn counterexample_seq(n: Option<u32>) -> SequenceSpec {
    match n {
        Some(n) => SequenceSpec::builtin_thm72(n),
        None => SequenceSpec::builtin_thm72_limit(),
    }
}

/// t_j = (j+1)(j+2)/2 - 1.
pub fn special_time(j: u32) -> usize {
    let j = j as usize;
    (j + 1) * (j + 2) / 2 - 1
}

/// One row of the counterexample geometry report.
#[derive(Clone, Debug, Serialize)]
pub struct Thm72Row {
    pub j: u32,
    pub time_index: usize,
    pub component_count: usize,
    pub max_diameter: f64,
    pub min_diameter: f64,
    pub min_single_step_derivative_on_j: f64,
    pub adjacent_gap: Option<f64>,
    pub mask_cells: usize,
}

/// Piece geometry at time t_j: runs the escape sieve, labels components,
/// and samples the next map's derivative over the boundary cells.
pub fn thm72_geometry(
    n: Option<u32>,
    j: u32,
    grid: GridSpec,
    depth: usize,
) -> Result<Thm72Row> {
    if let Some(n) = n {
        if j > n {
            return Err(Error::SpecInput(format!("j = {} exceeds n = {}", j, n)));
        }
    }
    let seq = counterexample_seq(n);
    let t = special_time(j);
    let ja = filled_julia(&seq, t, grid, depth)?;
    if ja.k_mask.is_empty() {
        return Err(Error::DepthUnsuitable(format!(
            "sieve is empty at time {}; resolution insufficient to separate components, try doubling the grid",
            t
        )));
    }
    let comps = components(&ja.k_mask);
    let max_diameter = comps.iter().map(|c| c.diameter).fold(0.0, f64::max);
    let min_diameter = comps.iter().map(|c| c.diameter).fold(f64::INFINITY, f64::min);
    let next = seq.term(t + 1);
    let min_der = ja
        .j_cell_centers()
        .iter()
        .map(|&z| next.eval_with_derivative(z).1.norm())
        .fold(f64::INFINITY, f64::min);
    Ok(Thm72Row {
        j,
        time_index: t,
        component_count: comps.len(),
        max_diameter,
        min_diameter,
        min_single_step_derivative_on_j: min_der,
        adjacent_gap: min_component_gap(&ja.k_mask),
        mask_cells: ja.k_mask.cell_count(),
    })
}

/// Containment checks around time t_j: the boundary cells avoid D(3, 1)
/// just before the shifted-square step and avoid the unit disc at and
/// right after it (shrunk by two cell widths for rasterization).
pub fn thm72_containment(j: u32, grid: GridSpec, depth: usize) -> Result<bool> {
    let seq = counterexample_seq(Some(j + 1));
    let t = special_time(j);
    let h = grid.cell_width();
    let three = Complex64::new(3.0, 0.0);
    let mut ok = true;
    for (time, center, radius) in [
        (t - 1, three, 1.0 - 2.0 * h),
        (t, Complex64::new(0.0, 0.0), 1.0 - 2.0 * h),
        (t + 1, Complex64::new(0.0, 0.0), 1.0 - 2.0 * h),
    ] {
        let ja = filled_julia(&seq, time, grid, depth)?;
        for z in ja.j_cell_centers() {
            if (z - center).norm() < radius {
                ok = false;
            }
        }
    }
    Ok(ok)
}

/// Separation data for z^2 + 2.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub delta: f64,
    pub components: usize,
    pub component_gap: f64,
    pub circle_points_escaped: usize,
    pub circle_points_total: usize,
}

pub fn z2plus2_sequence() -> SequenceSpec {
    SequenceSpec::constant(
        Polynomial::quadratic_plus_c(Complex64::new(2.0, 0.0)),
        Bounds { d: 2, k: 1.0, m: 2.0 },
    )
    .expect("z^2+2 is in bounds")
}

/// Finds the smallest R on a 0.01 grid in (1, 2) with the depth-limited
/// filled set inside D(0, R), returns delta = 2 sqrt(2 - R), and verifies
/// the two-piece structure of the depth-1 preimage of D(0, R).
pub fn z2plus2_separation(grid: GridSpec, depth: usize) -> Result<SeparationReport> {
    let seq = z2plus2_sequence();
    let ja = filled_julia(&seq, 0, grid, depth)?;
    if ja.k_mask.is_empty() {
        return Err(Error::DepthUnsuitable(
            "sieve is empty; lower the depth for this resolution".into(),
        ));
    }
    let max_mod = ja
        .k_mask
        .cell_centers()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if max_mod >= 2.0 {
        return Err(Error::DepthUnsuitable(format!(
            "mask not contained in D(0,2): max modulus {:.4}; depth too small",
            max_mod
        )));
    }
    let r = ((max_mod * 100.0).ceil() / 100.0).max(1.01);
    let delta = 2.0 * (2.0 - r).sqrt();

    // escape of the circle C(0, 2)
    let total = 512usize;
    let escaped = (0..total)
        .filter(|&k| {
            let z = Complex64::from_polar(2.0, std::f64::consts::TAU * k as f64 / total as f64);
            escape_time(&seq, 0, z, 50).escaped
        })
        .count();

    // depth-1 preimage of D(0, r)
    let bits: Vec<bool> = (0..grid.cells())
        .map(|i| {
            let (ix, iy) = grid.coords(i);
            let z = grid.cell_center(ix, iy);
            (z * z + Complex64::new(2.0, 0.0)).norm() <= r
        })
        .collect();
    let first = bits
        .iter()
        .position(|&b| b)
        .ok_or_else(|| Error::DepthUnsuitable("preimage of D(0,R) is empty".into()))?;
    let (fx, fy) = grid.coords(first);
    let pre = crate::grid::RegionMask {
        grid,
        bits,
        contains_infinity: false,
        basepoint: ExtComplex::Finite(grid.cell_center(fx, fy)),
    };
    let comps = components(&pre);
    let gap = min_component_gap(&pre).unwrap_or(0.0);
    Ok(SeparationReport {
        r,
        delta,
        components: comps.len(),
        component_gap: gap,
        circle_points_escaped: escaped,
        circle_points_total: total,
    })
}

/// delta / adjacent_gap(t_j) for the limit sequence: grows without bound
/// along j, which is the measurable obstruction to any bi-equicontinuous
/// conjugacy with a single quadratic.
pub fn equiconjugacy_violation(
    j_list: &[u32],
    grid: GridSpec,
    depth: usize,
    separation_grid: GridSpec,
    separation_depth: usize,
) -> Result<Vec<f64>> {
    let sep = z2plus2_separation(separation_grid, separation_depth)?;
    let mut out = Vec::with_capacity(j_list.len());
    for &j in j_list {
        let row = thm72_geometry(None, j, grid, depth)?;
        let gap = row.adjacent_gap.ok_or_else(|| {
            Error::DepthUnsuitable(format!(
                "single component at time {}; no adjacent gap",
                row.time_index
            ))
        })?;
        out.push(sep.delta / gap);
    }
    Ok(out)
}

/// Turning-constant report for a quasicircle candidate.
#[derive(Clone, Debug, Serialize)]
pub struct TurningReport {
    pub constant: f64,
    pub resolution: usize,
    pub depth: usize,
    pub n_points: usize,
}

/// Checks that every term is a monic centered quadratic z^2 + c with
/// |c| < 1/4 and returns the c values materialized so far.
fn monic_centered_small_c(seq: &SequenceSpec) -> Result<()> {
    let polys: Vec<&Polynomial> = match seq.kind {
        SeqKind::ExplicitPrefixPeriodicTail => {
            seq.prefix.iter().chain(seq.tail.iter()).collect()
        }
        _ => return Err(Error::Hypothesis),
    };
    for p in polys {
        let c = p.coeffs();
        let monic_centered = p.degree() == 2
            && (c[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12
            && c[1].norm() < 1e-12;
        if !monic_centered || c[0].norm() >= 0.25 {
            return Err(Error::Hypothesis);
        }
    }
    Ok(())
}

/// Orders the boundary cells into a closed curve by nearest-neighbor
/// chaining and measures the bounded-turning constant: the maximum over
/// sampled point pairs of diam(smaller arc) / |z1 - z2|.
pub fn thm71_quasicircle(
    seq: &SequenceSpec,
    grid: GridSpec,
    depth: usize,
) -> Result<TurningReport> {
    monic_centered_small_c(seq)?;
    let ja = filled_julia(seq, 0, grid, depth)?;
    let pts = ja.j_cell_centers();
    if pts.len() < 16 {
        return Err(Error::EmptyMask);
    }
    let chain = chain_nearest_neighbor(&pts, 3.0 * grid.cell_width())?;

    // 512 samples spread evenly along the chain
    let n_samples = 512.min(chain.len());
    let stride = chain.len() as f64 / n_samples as f64;
    let samples: Vec<Complex64> = (0..n_samples)
        .map(|k| chain[(k as f64 * stride) as usize])
        .collect();

    let constant = turning_constant(&samples, 8);
    Ok(TurningReport {
        constant,
        resolution: grid.resolution,
        depth,
        n_points: n_samples,
    })
}

/// Maximum over sampled pairs (index separation >= `min_sep` both ways) of
/// diam(smaller arc) / chord. Each unordered pair is visited once, from the
/// endpoint whose forward arc is the shorter one, so the arc's diameter can
/// be maintained incrementally while the far endpoint advances.
pub fn turning_constant(samples: &[Complex64], min_sep: usize) -> f64 {
    let n = samples.len();
    let mut cum = vec![0.0f64; 2 * n + 1];
    for i in 0..2 * n {
        cum[i + 1] = cum[i] + (samples[(i + 1) % n] - samples[i % n]).norm();
    }
    let total = cum[n];
    let mut constant = 0.0f64;
    for s in 0..n {
        let mut arc: Vec<Complex64> = vec![samples[s]];
        let mut diam = 0.0f64;
        let mut e = s + 1;
        while e - s <= n - min_sep {
            let len_fwd = cum[e] - cum[s];
            if len_fwd > 0.5 * total {
                break;
            }
            let p = samples[e % n];
            for &q in &arc {
                diam = diam.max((p - q).norm());
            }
            arc.push(p);
            if e - s >= min_sep {
                let chord = (samples[s] - p).norm();
                if chord > 0.0 {
                    constant = constant.max(diam / chord);
                }
            }
            e += 1;
        }
    }
    constant
}

/// Nearest-neighbor chaining of a point cloud into a closed loop; faults
/// when a jump exceeds `max_jump` or the loop fails to close.
fn chain_nearest_neighbor(pts: &[Complex64], max_jump: f64) -> Result<Vec<Complex64>> {
    let n = pts.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = 0usize;
    used[0] = true;
    order.push(pts[0]);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &p) in pts.iter().enumerate() {
            if !used[j] {
                let d = (p - pts[current]).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        if best_d > max_jump {
            return Err(Error::CurveTracing(format!(
                "chaining jump {:.3} exceeds limit {:.3}",
                best_d, max_jump
            )));
        }
        used[best] = true;
        order.push(pts[best]);
        current = best;
    }
    let closing = (order[0] - order[order.len() - 1]).norm();
    if closing > max_jump {
        return Err(Error::CurveTracing(format!(
            "chain failed to close: gap {:.3}",
            closing
        )));
    }
    Ok(order)
}

/// Hausdorff distances d_H(J_m(n), J_m(limit)) for each n in `n_list`.
pub fn hausdorff_convergence(
    n_list: &[u32],
    m: usize,
    grid: GridSpec,
    depth: usize,
) -> Result<Vec<f64>> {
    let limit = counterexample_seq(None);
    let ja_limit = filled_julia(&limit, m, grid, depth)?;
    let limit_pts: Vec<ExtComplex> = ja_limit
        .j_cell_centers()
        .into_iter()
        .map(ExtComplex::Finite)
        .collect();
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let seq = counterexample_seq(Some(n));
        let ja = filled_julia(&seq, m, grid, depth)?;
        let pts: Vec<ExtComplex> = ja
            .j_cell_centers()
            .into_iter()
            .map(ExtComplex::Finite)
            .collect();
        out.push(crate::dynamics::hausdorff_dist(&pts, &limit_pts)?);
    }
    Ok(out)
}
