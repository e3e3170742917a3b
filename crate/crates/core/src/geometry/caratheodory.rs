//! Carathéodory limits of pointed raster domains and the scalar
//! Carathéodory bound for pointed discs.
//!
//! The limit of a sequence of pointed domains is computed through the
//! Hausdorff limit of the complements: the complements are accumulated
//! cellwise over the trailing half of the sequence (majority vote), with a
//! consecutive-pair oscillation check standing in for convergence at the
//! chart's resolution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{label_bits, spherical_diameter, RegionMask};
use crate::sphere::{self, ExtComplex};

/// Outcome of a Carathéodory limit: a pointed domain or a degenerate point.
#[derive(Clone, Debug)]
pub enum CaratheodoryLimit {
    Domain(RegionMask),
    DegeneratePoint(ExtComplex),
}

fn finite_basepoint(mask: &RegionMask) -> Result<Complex64> {
    mask.basepoint
        .as_finite()
        .ok_or_else(|| Error::OutsideDomain("base point at infinity is not supported".into()))
}

/// Bounding-box diagonal (in cells) of the 8-connected component of the
/// mask containing its base point; whole-mask box when the base point cell
/// is unmarked.
fn basepoint_component_diag(mask: &RegionMask) -> f64 {
    let res = mask.grid.resolution;
    let (labels, _) = mask.label_components();
    let bp_label = finite_basepoint(mask)
        .ok()
        .and_then(|z| mask.grid.locate(z))
        .map(|(ix, iy)| labels[mask.grid.index(ix, iy)])
        .unwrap_or(0);
    let mut min_x = usize::MAX;
    let mut max_x = 0usize;
    let mut min_y = usize::MAX;
    let mut max_y = 0usize;
    let mut any = false;
    for iy in 0..res {
        for ix in 0..res {
            let l = labels[iy * res + ix];
            if l != 0 && (bp_label == 0 || l == bp_label) {
                any = true;
                min_x = min_x.min(ix);
                max_x = max_x.max(ix);
                min_y = min_y.min(iy);
                max_y = max_y.max(iy);
            }
        }
    }
    if !any {
        return 0.0;
    }
    let dx = (max_x - min_x) as f64;
    let dy = (max_y - min_y) as f64;
    (dx * dx + dy * dy).sqrt()
}

/// Directed Hausdorff distance (in cells) from the complement of `a` to the
/// complement of `b`, using the Euclidean distance transform of `b`'s mask.
/// Off-chart cells belong to both complements and contribute nothing.
fn complement_directed_hausdorff_cells(a: &RegionMask, dt_b: &[f64], b: &RegionMask) -> f64 {
    let mut worst = 0.0f64;
    for (i, &bit_a) in a.bits.iter().enumerate() {
        if !bit_a && b.bits[i] {
            // in complement of a, inside b: distance to b's complement
            worst = worst.max(dt_b[i].sqrt());
        }
    }
    worst
}

/// Carathéodory limit of a sequence of pointed domains sharing one grid.
///
/// Faults when the base points diverge (last quarter further than 2 cells
/// apart pairwise) or when the complements keep oscillating by more than 2
/// cells between consecutive members of the trailing half.
pub fn caratheodory_limit(domains: &[RegionMask]) -> Result<CaratheodoryLimit> {
    if domains.len() < 4 {
        return Err(Error::SpecInput("need at least 4 domains".into()));
    }
    let grid = domains[0].grid;
    for d in domains {
        if d.grid != grid {
            return Err(Error::SpecInput("domains must share one grid".into()));
        }
    }
    let h = grid.cell_width();

    // base point convergence over the last quarter
    let quarter = &domains[domains.len() - domains.len() / 4..];
    let mut bps = Vec::new();
    for d in quarter {
        bps.push(finite_basepoint(d)?);
    }
    for i in 0..bps.len() {
        for j in (i + 1)..bps.len() {
            let dist = (bps[i] - bps[j]).norm();
            if dist > 2.0 * h {
                return Err(Error::BasepointsDiverge(format!(
                    "base points {} and {} are {:.2} cells apart",
                    bps[i],
                    bps[j],
                    dist / h
                )));
            }
        }
    }
    let limit_bp = *bps.last().unwrap();

    // consecutive oscillation of complements over the trailing half
    let trailing = &domains[domains.len() / 2..];
    let dts: Vec<Vec<f64>> = trailing
        .iter()
        .map(|d| d.distance_to_complement_sq())
        .collect();
    let mut osc = 0.0f64;
    for i in 0..trailing.len() - 1 {
        let fwd = complement_directed_hausdorff_cells(&trailing[i], &dts[i + 1], &trailing[i + 1]);
        let bwd = complement_directed_hausdorff_cells(&trailing[i + 1], &dts[i], &trailing[i]);
        osc = osc.max(fwd.max(bwd));
    }
    if osc > 2.0 {
        return Err(Error::NotConvergent(format!(
            "complement oscillation {:.2} cells over the trailing half",
            osc
        )));
    }

    // cellwise majority vote for the Hausdorff limit of the complements
    let n_cells = grid.cells();
    let mut votes = vec![0u32; n_cells];
    for d in trailing {
        for (i, &bit) in d.bits.iter().enumerate() {
            if !bit {
                votes[i] += 1;
            }
        }
    }
    let need = trailing.len() as u32 - trailing.len() as u32 / 2;
    let limit_complement: Vec<bool> = votes.iter().map(|&v| v >= need).collect();

    // degenerate when the pointed components keep shrinking
    let first_diag = basepoint_component_diag(&trailing[0]);
    let last_diag = basepoint_component_diag(trailing.last().unwrap());
    if first_diag > 0.0 && last_diag <= 0.6 * first_diag {
        return Ok(CaratheodoryLimit::DegeneratePoint(ExtComplex::Finite(
            limit_bp,
        )));
    }

    let (ix, iy) = match grid.locate(limit_bp) {
        Some(c) => c,
        None => {
            return Err(Error::OutsideDomain(
                "limit base point off the chart".into(),
            ))
        }
    };
    if limit_complement[grid.index(ix, iy)] {
        return Ok(CaratheodoryLimit::DegeneratePoint(ExtComplex::Finite(
            limit_bp,
        )));
    }

    let open: Vec<bool> = limit_complement.iter().map(|c| !c).collect();
    let (labels, _) = label_bits(&open, grid.resolution, true);
    let bp_label = labels[grid.index(ix, iy)];
    let bits: Vec<bool> = labels.iter().map(|&l| l != 0 && l == bp_label).collect();
    let mask = RegionMask {
        grid,
        bits,
        contains_infinity: false,
        basepoint: ExtComplex::Finite(limit_bp),
    };
    Ok(CaratheodoryLimit::Domain(mask))
}

/// Carathéodory bound of a pointed disc: |log(delta#(u) diam#(complement))|
/// with the spherical distance from the base point to the complement and
/// the spherical diameter of the complement. The annulus terms vanish for
/// discs.
pub fn caratheodory_bound_disc(mask: &RegionMask) -> Result<f64> {
    let u = finite_basepoint(mask)?;
    let comp_bits: Vec<bool> = mask.bits.iter().map(|b| !b).collect();
    let comp_has_cells = comp_bits.iter().any(|&b| b);
    let comp_has_inf = !mask.contains_infinity;
    if !comp_has_cells && !comp_has_inf {
        return Err(Error::OutsideDomain(
            "complement is empty: domain covers the sphere at this resolution".into(),
        ));
    }

    let grid = mask.grid;
    let mut delta = f64::INFINITY;
    if comp_has_inf {
        delta = sphere::spherical_dist(ExtComplex::Finite(u), ExtComplex::Infinity);
    }
    for (i, &b) in comp_bits.iter().enumerate() {
        if b {
            let (ix, iy) = grid.coords(i);
            delta = delta.min(sphere::spherical_dist_zz(u, grid.cell_center(ix, iy)));
        }
    }

    let bp = if comp_has_cells {
        let first = comp_bits.iter().position(|&b| b).unwrap();
        let (ix, iy) = grid.coords(first);
        ExtComplex::Finite(grid.cell_center(ix, iy))
    } else {
        ExtComplex::Infinity
    };
    let complement = RegionMask {
        grid,
        bits: comp_bits,
        contains_infinity: comp_has_inf,
        basepoint: bp,
    };
    let diam = spherical_diameter(&complement, true);
    Ok((delta * diam).ln().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn chart(res: usize) -> GridSpec {
        GridSpec::new(Complex64::new(0.0, 0.0), 1.2, res).unwrap()
    }

    /// D \ closure(D(1 - 2/n, 1/n)) pointed at 0; lenient about the base
    /// point for the first members where it grazes the removed disc.
    fn annulus_family_member(grid: GridSpec, n: usize) -> RegionMask {
        let c = Complex64::new(1.0 - 2.0 / n as f64, 0.0);
        let r = 1.0 / n as f64;
        let mut bits = vec![false; grid.cells()];
        for iy in 0..grid.resolution {
            for ix in 0..grid.resolution {
                let z = grid.cell_center(ix, iy);
                bits[grid.index(ix, iy)] = z.norm() < 1.0 && (z - c).norm() > r;
            }
        }
        RegionMask {
            grid,
            bits,
            contains_infinity: false,
            basepoint: ExtComplex::finite(0.0, 0.0),
        }
    }

    #[test]
    fn constant_family_returns_input() {
        let grid = chart(256);
        let disc = RegionMask::disc(
            grid,
            Complex64::new(0.0, 0.0),
            0.8,
            ExtComplex::finite(0.0, 0.0),
        )
        .unwrap();
        let family: Vec<RegionMask> = (0..12).map(|_| disc.clone()).collect();
        match caratheodory_limit(&family).unwrap() {
            CaratheodoryLimit::Domain(m) => {
                let diff = m
                    .bits
                    .iter()
                    .zip(&disc.bits)
                    .filter(|(a, b)| a != b)
                    .count();
                assert_eq!(diff, 0);
            }
            _ => panic!("degenerate"),
        }
    }

    #[test]
    fn annulus_family_converges_to_pointed_disc() {
        let grid = chart(512);
        let family: Vec<RegionMask> = (2..=64)
            .map(|n| annulus_family_member(grid, n))
            .collect();
        match caratheodory_limit(&family).unwrap() {
            CaratheodoryLimit::Domain(m) => {
                let reference = RegionMask::disc(
                    grid,
                    Complex64::new(0.0, 0.0),
                    1.0,
                    ExtComplex::finite(0.0, 0.0),
                )
                .unwrap();
                let sym_diff = m
                    .bits
                    .iter()
                    .zip(&reference.bits)
                    .filter(|(a, b)| a != b)
                    .count();
                let area = reference.cell_count();
                assert!(
                    (sym_diff as f64) < 0.01 * area as f64,
                    "sym diff {} of {}",
                    sym_diff,
                    area
                );
            }
            _ => panic!("degenerate"),
        }
    }

    #[test]
    fn shrinking_discs_degenerate() {
        let grid = chart(512);
        let family: Vec<RegionMask> = (2..=64)
            .map(|n| {
                RegionMask::disc(
                    grid,
                    Complex64::new(0.0, 0.0),
                    1.0 / n as f64,
                    ExtComplex::finite(0.0, 0.0),
                )
                .unwrap()
            })
            .collect();
        match caratheodory_limit(&family).unwrap() {
            CaratheodoryLimit::DegeneratePoint(p) => {
                assert!(p.as_finite().unwrap().norm() < 2.0 * grid.cell_width());
            }
            _ => panic!("expected degenerate point"),
        }
    }

    #[test]
    fn bound_of_pointed_unit_disc() {
        let grid = chart(512);
        let disc = RegionMask::disc(
            grid,
            Complex64::new(0.0, 0.0),
            1.0,
            ExtComplex::finite(0.0, 0.0),
        )
        .unwrap();
        let b = caratheodory_bound_disc(&disc).unwrap();
        // |log(pi/4 * pi/2)| = |log(pi^2/8)|
        let want = (std::f64::consts::PI.powi(2) / 8.0).ln().abs();
        assert!((b - want).abs() < 0.01, "bound {} want {}", b, want);
    }

    #[test]
    fn bound_diverges_for_shrinking_discs() {
        let grid = chart(512);
        let bound_of = |r: f64| {
            let d = RegionMask::disc(
                grid,
                Complex64::new(0.0, 0.0),
                r,
                ExtComplex::finite(0.0, 0.0),
            )
            .unwrap();
            caratheodory_bound_disc(&d).unwrap()
        };
        let b1 = bound_of(0.5);
        let b2 = bound_of(0.125);
        let b3 = bound_of(0.03125);
        assert!(b1 < b2 && b2 < b3, "{} {} {}", b1, b2, b3);
    }

    #[test]
    fn bound_is_rotation_invariant() {
        let grid = chart(512);
        let disc = RegionMask::disc(
            grid,
            Complex64::new(0.0, 0.0),
            0.9,
            ExtComplex::finite(0.0, 0.0),
        )
        .unwrap();
        // rotating a centered disc about 0 leaves the raster set unchanged
        // up to cell quantization; spherical quantities only see moduli
        let b = caratheodory_bound_disc(&disc).unwrap();
        let rotated = RegionMask::from_predicate(grid, ExtComplex::finite(0.0, 0.0), |z| {
            (z * Complex64::from_polar(1.0, 0.7)).norm() <= 0.9
        })
        .unwrap();
        let br = caratheodory_bound_disc(&rotated).unwrap();
        assert!((b - br).abs() < 5e-3, "{} vs {}", b, br);
    }
}
