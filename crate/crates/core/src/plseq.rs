//! Polynomial-like mapping sequences: disc-pair construction from
//! polynomial data, verification of the defining properties, the Stage-I
//! restriction through equators of hyperbolic annuli, and the associated
//! filled Julia sets.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::JuliaApprox;
use crate::error::{Error, Result};
use crate::geometry::{
    caratheodory_bound_disc, fill_enclosed, hyperbolic_dist_bounds, marching_squares,
    quasihyperbolic_distances, winding_number, AnnulusData, Curve,
};
use crate::grid::{GridSpec, RegionMask};
use crate::seq::SequenceSpec;
use crate::sphere::ExtComplex;

/// One stage of a polynomial-like sequence: a proper map `f` from the
/// pointed disc `u` onto the next pointed disc `v_next`.
#[derive(Clone, Debug)]
pub struct PlTriple {
    pub u: RegionMask,
    pub v_next: RegionMask,
    pub f: crate::poly::Polynomial,
}

/// A materialized polynomial-like mapping sequence.
#[derive(Clone, Debug)]
pub struct PlSeq {
    /// V_0; kept so indexing over the pointed discs V_m starts at 0.
    pub v0: RegionMask,
    pub triples: Vec<PlTriple>,
    pub degree_bound: u32,
    /// The sequence constant: caps the Carathéodory bounds and the
    /// hyperbolic distance from critical values to base points.
    pub constant: f64,
}

impl PlSeq {
    pub fn horizon(&self) -> usize {
        self.triples.len()
    }

    /// V_m for m in 0..=horizon.
    pub fn v(&self, m: usize) -> &RegionMask {
        if m == 0 {
            &self.v0
        } else {
            &self.triples[m - 1].v_next
        }
    }
}

fn basepoint_cell(mask: &RegionMask) -> Result<usize> {
    let z = mask
        .basepoint
        .as_finite()
        .ok_or_else(|| Error::OutsideDomain("base point at infinity".into()))?;
    let (ix, iy) = mask
        .grid
        .locate(z)
        .ok_or_else(|| Error::OutsideDomain("base point off the chart".into()))?;
    Ok(mask.grid.index(ix, iy))
}

/// Builds the standard disc-pair sequence over a polynomial sequence:
/// V_m = D(0, rho) and U_m = the component of P_{m+1}^{-1}(D(0, rho))
/// containing the dominant (smallest-modulus) critical point, which is the
/// base point u_m.
pub fn disc_pl_from_polys(
    seq: &SequenceSpec,
    rho: f64,
    horizon: usize,
    resolution: usize,
) -> Result<PlSeq> {
    // no a-priori floor on rho: the compact-containment check below is the
    // real gate, and it reports the violating time index
    if rho <= 0.0 {
        return Err(Error::SpecInput(format!("rho = {} must be positive", rho)));
    }
    let grid = GridSpec::escape_chart(rho, resolution);

    // base points u_m = dominant critical point of P_{m+1}, m = 0..=horizon
    let mut bases = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        bases.push(seq.term(m + 1).dominant_critical_point()?);
    }

    let mut triples = Vec::with_capacity(horizon);
    let mut max_bound = 0.0f64;
    let mut pl3_cache: Option<(Vec<bool>, Vec<f64>)> = None;
    let mut bound_cache: Option<(Vec<bool>, f64)> = None;

    for m in 0..horizon {
        let f = seq.term(m + 1);
        let u_bp = bases[m];
        // component of the full preimage containing the base point
        let pre = RegionMask::from_predicate(grid, ExtComplex::Finite(u_bp), |z| {
            f.eval(z).norm() <= rho
        })
        .map_err(|_| Error::NotCompactlyContained { time: m })?;
        let (labels, _) = pre.label_components();
        let bp_idx = basepoint_cell(&pre)?;
        let keep = labels[bp_idx];
        let bits: Vec<bool> = labels.iter().map(|&l| l != 0 && l == keep).collect();
        let u_mask = RegionMask {
            grid,
            bits,
            contains_infinity: false,
            basepoint: ExtComplex::Finite(u_bp),
        };
        let v_mask = RegionMask::disc(grid, Complex64::new(0.0, 0.0), rho, ExtComplex::Finite(
            bases[m + 1],
        ))?;
        // compact containment: dilation by two cells stays inside V_m
        if !u_mask.dilate(2).subset_of(&v_mask) {
            return Err(Error::NotCompactlyContained { time: m });
        }

        // contributions to the sequence constant
        let ub = cached_bound(&u_mask, &mut bound_cache)?;
        max_bound = max_bound.max(ub);
        let vb = caratheodory_bound_disc(&v_mask)?;
        max_bound = max_bound.max(vb);
        let pl3 = pl3_upper(&f, &v_mask, &mut pl3_cache)?;
        max_bound = max_bound.max(pl3);

        triples.push(PlTriple {
            u: u_mask,
            v_next: v_mask,
            f,
        });
    }

    let v0 = RegionMask::disc(
        grid,
        Complex64::new(0.0, 0.0),
        rho,
        ExtComplex::Finite(bases[0]),
    )?;
    Ok(PlSeq {
        v0,
        triples,
        degree_bound: seq.bounds.d,
        constant: max_bound.max(1.0),
    })
}

/// Largest hyperbolic-bracket upper bound from the critical values of `f`
/// to the base point of `v`, measured inside `v`. Reuses the single-source
/// distances when consecutive masks are identical.
fn pl3_upper(
    f: &crate::poly::Polynomial,
    v: &RegionMask,
    cache: &mut Option<(Vec<bool>, Vec<f64>)>,
) -> Result<f64> {
    let source = basepoint_cell(v)?;
    let reuse = matches!(cache, Some((bits, _)) if *bits == v.bits);
    if !reuse {
        let dist = quasihyperbolic_distances(v, source);
        *cache = Some((v.bits.clone(), dist));
    }
    let dist = &cache.as_ref().unwrap().1;
    let mut worst = 0.0f64;
    for cp in f.critical_points()? {
        let cv = f.eval(cp);
        let (ix, iy) = v
            .grid
            .locate(cv)
            .ok_or_else(|| Error::OutsideDomain(format!("critical value {} off chart", cv)))?;
        let idx = v.grid.index(ix, iy);
        if !v.bits[idx] {
            return Err(Error::OutsideDomain(format!(
                "critical value {} outside V",
                cv
            )));
        }
        worst = worst.max(2.0 * dist[idx]);
    }
    Ok(worst)
}

fn cached_bound(mask: &RegionMask, cache: &mut Option<(Vec<bool>, f64)>) -> Result<f64> {
    if let Some((bits, val)) = cache {
        if *bits == mask.bits {
            return Ok(*val);
        }
    }
    let val = caratheodory_bound_disc(mask)?;
    *cache = Some((mask.bits.clone(), val));
    Ok(val)
}

/// Per-property verification report.
#[derive(Clone, Debug, Serialize)]
pub struct PlReport {
    pub pl1_pass: bool,
    pub pl1_max_caratheodory_bound: f64,
    pub pl1_compact_containment: bool,
    pub pl2_pass: bool,
    pub pl2_degrees: Vec<usize>,
    pub pl2_max_base_derivative: f64,
    pub pl3_pass: bool,
    pub pl3_max_upper: f64,
    pub constant: f64,
}

impl PlReport {
    pub fn all_pass(&self) -> bool {
        self.pl1_pass && self.pl2_pass && self.pl3_pass
    }
}

/// Number of preimages of `target` under `f` that land in `mask`.
fn preimage_count(f: &crate::poly::Polynomial, target: Complex64, mask: &RegionMask) -> Result<usize> {
    let mut shifted = f.coeffs().to_vec();
    shifted[0] -= target;
    let p = crate::poly::Polynomial::new(shifted)?;
    let roots = p.roots()?;
    Ok(roots.iter().filter(|r| mask.contains_point(**r)).count())
}

/// Checks the three defining properties against the stored constant,
/// measuring as it goes. Failures are report entries, not faults.
pub fn verify_pl(pl: &PlSeq, check_constant: f64) -> Result<PlReport> {
    let k = check_constant;
    let mut max_bound = 0.0f64;
    let mut containment = true;
    let mut degrees = Vec::new();
    let mut max_base_der = 0.0f64;
    let mut pl3_max = 0.0f64;
    let mut degrees_ok = true;

    let mut bound_cache_u: Option<(Vec<bool>, f64)> = None;
    let mut bound_cache_v: Option<(Vec<bool>, f64)> = None;
    let mut pl3_cache: Option<(Vec<bool>, Vec<f64>)> = None;

    for (m, triple) in pl.triples.iter().enumerate() {
        max_bound = max_bound.max(cached_bound(&triple.u, &mut bound_cache_u)?);
        max_bound = max_bound.max(cached_bound(&triple.v_next, &mut bound_cache_v)?);
        containment &= triple.u.dilate(2).subset_of(pl.v(m));

        // proper of constant degree: preimage counts over 50 targets taken
        // from the interior of V_{m+1} (8 cells clear of its boundary, so
        // the preimages stay clear of U's raster boundary)
        let dt = triple.v_next.distance_to_complement_sq();
        let interior: Vec<usize> = (0..dt.len())
            .filter(|&i| triple.v_next.bits[i] && dt[i] >= 64.0)
            .collect();
        let samples = 50usize;
        let stride = (interior.len() / samples).max(1);
        let mut counts = Vec::new();
        for &i in interior.iter().step_by(stride).take(samples) {
            let (ix, iy) = triple.v_next.grid.coords(i);
            let target = triple.v_next.grid.cell_center(ix, iy);
            counts.push(preimage_count(&triple.f, target, &triple.u)?);
        }
        counts.dedup();
        let degree = counts.first().copied().unwrap_or(0);
        if counts.len() != 1 || degree < 2 || degree > pl.degree_bound as usize {
            degrees_ok = false;
        }
        degrees.push(degree);

        let u_bp = triple.u.basepoint.as_finite().unwrap();
        let (_, der) = triple.f.eval_with_derivative(u_bp);
        max_base_der = max_base_der.max(der.norm());

        pl3_max = pl3_max.max(pl3_upper(&triple.f, &triple.v_next, &mut pl3_cache)?);
    }

    Ok(PlReport {
        pl1_pass: max_bound <= k && containment,
        pl1_max_caratheodory_bound: max_bound,
        pl1_compact_containment: containment,
        pl2_pass: degrees_ok && max_base_der <= 1e-9,
        pl2_degrees: degrees,
        pl2_max_base_derivative: max_base_der,
        pl3_pass: pl3_max <= k,
        pl3_max_upper: pl3_max,
        constant: k,
    })
}

/// Stage-I restriction data at one time index.
#[derive(Clone, Debug)]
pub struct RestrictionStage {
    pub t: AnnulusData,
    pub gamma_outer: Curve,
    pub v_prime: RegionMask,
    pub s: RegionMask,
    pub gamma_inner: Curve,
    pub u_prime: RegionMask,
    pub l: AnnulusData,
    pub b: f64,
}

/// Restricts a polynomial-like sequence: T_m is the hyperbolic annulus
/// {BK < rho_{V_m}(z, u_m) < 2BK} (bracket midpoints), Gamma_m its equator,
/// V'_m the enclosed disc, gamma_m the pullback of Gamma_{m+1} around the
/// base point, and U'_m the disc it encloses.
pub fn restrict(pl: &PlSeq, b: f64) -> Result<(PlSeq, Vec<RestrictionStage>)> {
    if b <= 1.0 {
        return Err(Error::SpecInput("B must exceed 1".into()));
    }
    let k = pl.constant;
    let horizon = pl.horizon();
    let grid = pl.v0.grid;

    // T_m, Gamma_m, V'_m for every m = 0..=horizon; constant sequences
    // repeat the same masks, so solved annuli are reused by bit equality
    let mut equators: Vec<Curve> = Vec::with_capacity(horizon + 1);
    let mut v_primes: Vec<RegionMask> = Vec::with_capacity(horizon + 1);
    let mut t_data: Vec<AnnulusData> = Vec::with_capacity(horizon + 1);
    let mut dist_cache: Option<(Vec<bool>, usize, Vec<f64>)> = None;
    let mut t_cache: Option<AnnulusData> = None;
    for m in 0..=horizon {
        let v = pl.v(m);
        let source = basepoint_cell(v)?;
        let reuse = matches!(&dist_cache, Some((bits, src, _)) if *bits == v.bits && *src == source);
        if !reuse {
            let d = quasihyperbolic_distances(v, source);
            dist_cache = Some((v.bits.clone(), source, d));
        }
        let dist = &dist_cache.as_ref().unwrap().2;
        let mut bits = vec![false; grid.cells()];
        for (i, &q) in dist.iter().enumerate() {
            if v.bits[i] && q.is_finite() {
                let mid = 1.25 * q; // midpoint of the bracket [q/2, 2q]
                bits[i] = mid > b * k && mid < 2.0 * b * k;
            }
        }
        if !bits.iter().any(|&x| x) {
            return Err(Error::CurveTracing(format!(
                "hyperbolic annulus empty at time {}",
                m
            )));
        }
        let first = bits.iter().position(|&x| x).unwrap();
        let (fx, fy) = grid.coords(first);
        let t_mask = RegionMask {
            grid,
            bits,
            contains_infinity: false,
            basepoint: ExtComplex::Finite(grid.cell_center(fx, fy)),
        };
        let data = match &t_cache {
            Some(prev) if prev.mask.bits == t_mask.bits => prev.clone(),
            _ => {
                let fresh = AnnulusData::analyze(t_mask)
                    .map_err(|e| Error::CurveTracing(format!("equator at time {}: {}", m, e)))?;
                t_cache = Some(fresh.clone());
                fresh
            }
        };
        let v_bp = v.basepoint.as_finite().unwrap();
        if winding_number(&data.equator.points, v_bp) == 0 {
            return Err(Error::CurveTracing(format!(
                "equator does not enclose the base point at time {}",
                m
            )));
        }
        let mut vp_bits = fill_enclosed(grid, &data.equator.points);
        // keep the curve's cells out; the disc is the strict interior
        for (i, bit) in vp_bits.iter_mut().enumerate() {
            *bit = *bit && v.bits[i];
        }
        let v_prime = RegionMask {
            grid,
            bits: vp_bits,
            contains_infinity: false,
            basepoint: v.basepoint,
        };
        equators.push(data.equator.clone());
        v_primes.push(v_prime);
        t_data.push(data);
    }

    let mut stages = Vec::with_capacity(horizon);
    let mut new_triples = Vec::with_capacity(horizon);
    let mut l_cache: Option<AnnulusData> = None;
    for (m, triple) in pl.triples.iter().enumerate() {
        let f = &triple.f;
        // S_m: cells of U_m mapping into T_{m+1}
        let s_bits: Vec<bool> = (0..grid.cells())
            .map(|i| {
                if !triple.u.bits[i] {
                    return false;
                }
                let (ix, iy) = grid.coords(i);
                t_data[m + 1].mask.contains_point(f.eval(grid.cell_center(ix, iy)))
            })
            .collect();
        let s_first = s_bits.iter().position(|&x| x);
        let s_mask = RegionMask {
            grid,
            bits: s_bits,
            contains_infinity: false,
            basepoint: match s_first {
                Some(i) => {
                    let (ix, iy) = grid.coords(i);
                    ExtComplex::Finite(grid.cell_center(ix, iy))
                }
                None => triple.u.basepoint,
            },
        };

        // gamma_m: the component of f^{-1}(Gamma_{m+1}) around u_m, traced
        // by marching squares on the pullback indicator
        let u_bp = triple.u.basepoint.as_finite().unwrap();
        let indicator: Vec<f64> = (0..grid.cells())
            .map(|i| {
                let (ix, iy) = grid.coords(i);
                if v_primes[m + 1].contains_point(f.eval(grid.cell_center(ix, iy))) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let loops = marching_squares(&indicator, grid, 0.5);
        let mut around: Vec<Vec<Complex64>> = loops
            .into_iter()
            .filter(|l| l.len() >= 4 && winding_number(l, u_bp) != 0)
            .collect();
        if around.len() != 1 {
            return Err(Error::CurveTracing(format!(
                "{} pullback curves enclose the base point at time {}",
                around.len(),
                m
            )));
        }
        let gamma = Curve {
            points: around.pop().unwrap(),
            closed: true,
            basepoint_index: 0,
        };

        let mut up_bits = fill_enclosed(grid, &gamma.points);
        for (i, bit) in up_bits.iter_mut().enumerate() {
            *bit = *bit && triple.u.bits[i];
        }
        let u_prime = RegionMask {
            grid,
            bits: up_bits,
            contains_infinity: false,
            basepoint: triple.u.basepoint,
        };
        if !u_prime.subset_of(&triple.u) || !v_primes[m].subset_of(pl.v(m)) {
            return Err(Error::CurveTracing(format!(
                "restriction escaped the original domains at time {}",
                m
            )));
        }

        // L_m = V'_m minus the closure of U'_m
        let closure = u_prime.dilate(1);
        let l_bits: Vec<bool> = v_primes[m]
            .bits
            .iter()
            .zip(&closure.bits)
            .map(|(v, c)| *v && !*c)
            .collect();
        let l_first = l_bits.iter().position(|&x| x).ok_or_else(|| {
            Error::CurveTracing(format!("restriction annulus empty at time {}", m))
        })?;
        let (lx, ly) = grid.coords(l_first);
        let l_mask = RegionMask {
            grid,
            bits: l_bits,
            contains_infinity: false,
            basepoint: ExtComplex::Finite(grid.cell_center(lx, ly)),
        };
        let l_data = match &l_cache {
            Some(prev) if prev.mask.bits == l_mask.bits => prev.clone(),
            _ => {
                let fresh = AnnulusData::analyze(l_mask)
                    .map_err(|e| Error::CurveTracing(format!("L annulus at time {}: {}", m, e)))?;
                l_cache = Some(fresh.clone());
                fresh
            }
        };

        stages.push(RestrictionStage {
            t: t_data[m].clone(),
            gamma_outer: equators[m].clone(),
            v_prime: v_primes[m].clone(),
            s: s_mask,
            gamma_inner: gamma.clone(),
            u_prime: u_prime.clone(),
            l: l_data,
            b,
        });
        new_triples.push(PlTriple {
            u: u_prime,
            v_next: v_primes[m + 1].clone(),
            f: f.clone(),
        });
    }

    let restricted = PlSeq {
        v0: v_primes[0].clone(),
        triples: new_triples,
        degree_bound: pl.degree_bound,
        constant: 2.0 * k,
    };
    Ok((restricted, stages))
}

/// Cell sieve for the filled Julia set of a polynomial-like sequence at
/// time m: a cell survives while its orbit stays inside the discs U_n.
pub fn pl_filled_julia(pl: &PlSeq, m: usize, depth: usize) -> Result<JuliaApprox> {
    if m + depth > pl.horizon() {
        return Err(Error::HorizonExhausted {
            time: m,
            depth,
            horizon: pl.horizon(),
        });
    }
    let grid = pl.v0.grid;
    let res = grid.resolution;
    let mut bits = vec![false; grid.cells()];
    let mut steps = vec![0u32; grid.cells()];
    for iy in 0..res {
        for ix in 0..res {
            let i = grid.index(ix, iy);
            if !pl.triples[m].u.bits[i] {
                continue;
            }
            let mut z = grid.cell_center(ix, iy);
            let mut alive = true;
            for k in 0..depth {
                let triple = &pl.triples[m + k];
                z = triple.f.eval(z);
                // landing outside U_{m+k+1} means the orbit entered the
                // fundamental annulus V \ U and never returns
                let inside_next = if m + k + 1 < pl.horizon() {
                    pl.triples[m + k + 1].u.contains_point(z)
                } else {
                    // at the horizon only membership in V remains testable
                    pl.v(m + k + 1).contains_point(z)
                };
                if !inside_next {
                    alive = false;
                    steps[i] = (k + 1) as u32;
                    break;
                }
            }
            bits[i] = alive;
        }
    }
    let basepoint = match bits.iter().position(|&b| b) {
        Some(idx) => {
            let (ix, iy) = grid.coords(idx);
            ExtComplex::Finite(grid.cell_center(ix, iy))
        }
        None => pl.triples[m].u.basepoint,
    };
    let k_mask = RegionMask {
        grid,
        bits,
        contains_infinity: false,
        basepoint,
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

/// Symmetric-difference area fraction |K_m delta K'_m| / |K_m| between the
/// filled sets of a sequence and its restriction.
pub fn restriction_preserves_k(
    pl: &PlSeq,
    restricted: &PlSeq,
    m: usize,
    depth: usize,
) -> Result<f64> {
    let a = pl_filled_julia(pl, m, depth)?;
    let b = pl_filled_julia(restricted, m, depth)?;
    let sym: usize = a
        .k_mask
        .bits
        .iter()
        .zip(&b.k_mask.bits)
        .filter(|(x, y)| x != y)
        .count();
    let base = a.k_mask.cell_count();
    if base == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(sym as f64 / base as f64)
}

/// Convenience wrapper: the hyperbolic bracket from a point to the base
/// point of a pointed disc.
pub fn bracket_to_basepoint(mask: &RegionMask, z: Complex64) -> Result<crate::geometry::DistBounds> {
    let bp = mask
        .basepoint
        .as_finite()
        .ok_or_else(|| Error::OutsideDomain("base point at infinity".into()))?;
    hyperbolic_dist_bounds(mask, z, bp)
}
