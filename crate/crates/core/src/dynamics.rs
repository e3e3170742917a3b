//! Escape-time computation of iterated filled Julia sets, boundary
//! extraction, invariance checks, Hausdorff distance and connected
//! component analysis.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{spherical_diameter, GridSpec, RegionMask};
use crate::seq::{compose_eval, ComposeOutcome, SequenceSpec};
use crate::sphere::{self, ExtComplex};

/// Result of the orbit escape test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscapeResult {
    pub escaped: bool,
    /// Index of the first orbit point beyond the escape radius (the start
    /// point has index 0); meaningful only when `escaped` is true.
    pub steps: usize,
}

/// Tests whether the orbit z, P_{m+1}(z), P_{m+2}(P_{m+1}(z)), ... leaves
/// the escape disc within `max_depth` applications.
pub fn escape_time(seq: &SequenceSpec, m: usize, z: Complex64, max_depth: usize) -> EscapeResult {
    let r = seq.escape_radius();
    let mut w = z;
    for k in 0..=max_depth {
        if w.norm() > r {
            return EscapeResult {
                escaped: true,
                steps: k,
            };
        }
        if k < max_depth {
            w = seq.term(m + k + 1).eval(w);
        }
    }
    EscapeResult {
        escaped: false,
        steps: max_depth,
    }
}

/// Depth-n raster approximation of a filled Julia set: the cells whose
/// centers survive the escape sieve, the extracted boundary cells, and the
/// per-cell escape steps for rendering.
#[derive(Clone, Debug)]
pub struct JuliaApprox {
    pub time: usize,
    pub depth: usize,
    pub k_mask: RegionMask,
    pub j_cells: Vec<usize>,
    pub escape_steps: Vec<u32>,
}

impl JuliaApprox {
    pub fn j_cell_centers(&self) -> Vec<Complex64> {
        self.j_cells
            .iter()
            .map(|&i| {
                let (ix, iy) = self.k_mask.grid.coords(i);
                self.k_mask.grid.cell_center(ix, iy)
            })
            .collect()
    }
}

/// Escape-time sieve over the grid at time `m`: a cell belongs to the mask
/// iff its center does not escape within `depth` steps. The chart must
/// contain the escape disc plus one unit of margin.
pub fn filled_julia(
    seq: &SequenceSpec,
    m: usize,
    grid: GridSpec,
    depth: usize,
) -> Result<JuliaApprox> {
    let r = seq.escape_radius();
    if !grid.covers_disc(r + 1.0) {
        return Err(Error::GridTooSmall {
            required_half_width: grid.required_half_width(r + 1.0),
        });
    }
    let res = grid.resolution;
    // per-row parallel sieve; rows own disjoint output slices so results
    // are identical regardless of the worker count
    let polys: Vec<_> = (1..=depth).map(|k| seq.term(m + k)).collect();
    let mut bits = vec![false; grid.cells()];
    let mut steps = vec![0u32; grid.cells()];
    bits.par_chunks_mut(res)
        .zip(steps.par_chunks_mut(res))
        .enumerate()
        .for_each(|(iy, (brow, srow))| {
            for ix in 0..res {
                let mut w = grid.cell_center(ix, iy);
                let mut escaped_at = None;
                let mut k = 0usize;
                loop {
                    if w.norm() > r {
                        escaped_at = Some(k);
                        break;
                    }
                    if k == depth {
                        break;
                    }
                    w = polys[k].eval(w);
                    k += 1;
                    if !w.is_finite() {
                        escaped_at = Some(k);
                        break;
                    }
                }
                match escaped_at {
                    Some(k) => srow[ix] = k as u32,
                    None => brow[ix] = true,
                }
            }
        });

    let basepoint = match bits.iter().position(|&b| b) {
        Some(idx) => {
            let (ix, iy) = grid.coords(idx);
            ExtComplex::Finite(grid.cell_center(ix, iy))
        }
        None => ExtComplex::Finite(grid.cell_center(0, 0)),
    };
    let k_mask = if bits.iter().any(|&b| b) {
        RegionMask::new(grid, bits, basepoint)?
    } else {
        // empty sieve: keep an unmarked mask with a nominal basepoint
        RegionMask {
            grid,
            bits,
            contains_infinity: false,
            basepoint,
        }
    };
    let j_cells = k_mask.boundary_cells();
    Ok(JuliaApprox {
        time: m,
        depth,
        k_mask,
        j_cells,
        escape_steps: steps,
    })
}

/// Samples boundary cells of `ja_m`, pushes their centers forward by
/// Q_{m,n}, and returns the maximum Chebyshev cell distance from each image
/// to the nearest boundary cell of `ja_n`. Images that leave the chart (or
/// overflow) count as infinite deviation.
pub fn invariance_check<R: Rng>(
    seq: &SequenceSpec,
    m: usize,
    n: usize,
    ja_m: &JuliaApprox,
    ja_n: &JuliaApprox,
    samples: usize,
    rng: &mut R,
) -> f64 {
    assert!(!ja_m.j_cells.is_empty() && !ja_n.j_cells.is_empty());
    let grid = ja_n.k_mask.grid;
    let targets: Vec<(f64, f64)> = ja_n
        .j_cells
        .iter()
        .map(|&i| {
            let (ix, iy) = grid.coords(i);
            (ix as f64, iy as f64)
        })
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let pick = ja_m.j_cells[rng.gen_range(0..ja_m.j_cells.len())];
        let (ix, iy) = ja_m.k_mask.grid.coords(pick);
        let z = ja_m.k_mask.grid.cell_center(ix, iy);
        let dev = match compose_eval(seq, m, n, z) {
            ComposeOutcome::Escaped { .. } => f64::INFINITY,
            ComposeOutcome::Value(w) => match grid.locate(w) {
                None => f64::INFINITY,
                Some((jx, jy)) => {
                    let (fx, fy) = (jx as f64, jy as f64);
                    targets
                        .iter()
                        .map(|&(tx, ty)| (tx - fx).abs().max((ty - fy).abs()))
                        .fold(f64::INFINITY, f64::min)
                }
            },
        };
        worst = worst.max(dev);
    }
    worst
}

/// Hausdorff distance between two point lists in the spherical metric.
pub fn hausdorff_dist(a: &[ExtComplex], b: &[ExtComplex]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let pa: Vec<[f64; 3]> = a.iter().map(|&p| sphere::to_sphere3(p)).collect();
    let pb: Vec<[f64; 3]> = b.iter().map(|&p| sphere::to_sphere3(p)).collect();
    let sup_a = directed_sup(&pa, &pb);
    let sup_b = directed_sup(&pb, &pa);
    Ok(sphere::dist_from_chord3_sq(sup_a.max(sup_b)))
}

fn directed_sup(from: &[[f64; 3]], to: &[[f64; 3]]) -> f64 {
    from.par_iter()
        .map(|p| {
            to.iter()
                .map(|q| sphere::chord3_sq(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Connected-component report entry.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentInfo {
    pub cells: usize,
    pub diameter: f64,
    pub centroid: [f64; 2],
}

/// 8-connected components of a mask with spherical diameters and centroids,
/// in row-major discovery order.
pub fn components(mask: &RegionMask) -> Vec<ComponentInfo> {
    let (labels, count) = mask.label_components();
    let grid = mask.grid;
    let mut out = Vec::with_capacity(count);
    for label in 1..=count as u32 {
        let mut bits = vec![false; mask.bits.len()];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut cells = 0usize;
        let mut first = None;
        for (i, &l) in labels.iter().enumerate() {
            if l == label {
                bits[i] = true;
                let (ix, iy) = grid.coords(i);
                sum += grid.cell_center(ix, iy);
                cells += 1;
                if first.is_none() {
                    first = Some(i);
                }
            }
        }
        let (ix, iy) = grid.coords(first.unwrap());
        let comp = RegionMask {
            grid,
            bits,
            contains_infinity: false,
            basepoint: ExtComplex::Finite(grid.cell_center(ix, iy)),
        };
        let centroid = sum / cells as f64;
        out.push(ComponentInfo {
            cells,
            diameter: spherical_diameter(&comp, false),
            centroid: [centroid.re, centroid.im],
        });
    }
    out
}

/// Minimum Euclidean distance between cell centers of distinct components;
/// `None` when there are fewer than two components.
pub fn min_component_gap(mask: &RegionMask) -> Option<f64> {
    let (labels, count) = mask.label_components();
    if count < 2 {
        return None;
    }
    let grid = mask.grid;
    let mut groups: Vec<Vec<Complex64>> = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        if l > 0 {
            let (ix, iy) = grid.coords(i);
            groups[(l - 1) as usize].push(grid.cell_center(ix, iy));
        }
    }
    let mut best = f64::INFINITY;
    for i in 0..count {
        for j in (i + 1)..count {
            for &p in &groups[i] {
                for &q in &groups[j] {
                    best = best.min((p - q).norm());
                }
            }
        }
    }
    Some(best)
}
