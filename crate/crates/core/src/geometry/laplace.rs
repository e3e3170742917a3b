//! Discrete harmonic potential on a doubly connected raster region and the
//! conformal modulus derived from its Dirichlet energy.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{label_bits, RegionMask};

use super::curve::{marching_squares, winding_number, Curve};

/// Solved 5-point Laplace problem on an annulus mask: potential 0 on the
/// inner complement component, 1 on the outer one (the side reaching the
/// chart edge), harmonic on the mask.
pub struct AnnulusPotential {
    pub mask: RegionMask,
    /// Full-grid field: solved values on mask cells, Dirichlet values
    /// elsewhere (off-chart counts as outer).
    pub field: Vec<f64>,
    pub inner_component: usize,
    pub outer_component: usize,
    energy: f64,
}

/// Labels the complement of the mask (4-connectivity) and identifies the
/// inner and outer sides. All edge-touching components merge conceptually
/// through the off-chart plane and count as one outer side.
fn complement_sides(mask: &RegionMask) -> Result<(Vec<u32>, usize, usize)> {
    let res = mask.grid.resolution;
    let inv: Vec<bool> = mask.bits.iter().map(|b| !b).collect();
    let (labels, count) = label_bits(&inv, res, false);
    if count == 0 {
        return Err(Error::NotDoublyConnected { components: 0 });
    }
    let mut touches_edge = vec![false; count + 1];
    for iy in 0..res {
        for ix in 0..res {
            if ix == 0 || iy == 0 || ix == res - 1 || iy == res - 1 {
                let l = labels[iy * res + ix];
                if l > 0 {
                    touches_edge[l as usize] = true;
                }
            }
        }
    }
    let inner: Vec<usize> = (1..=count).filter(|&l| !touches_edge[l]).collect();
    let outer: Vec<usize> = (1..=count).filter(|&l| touches_edge[l]).collect();
    if inner.len() != 1 || outer.is_empty() {
        // effective component count after merging the edge side
        let effective = inner.len() + if outer.is_empty() { 0 } else { 1 };
        return Err(Error::NotDoublyConnected {
            components: effective,
        });
    }
    Ok((labels, inner[0], outer[0]))
}

/// Solves the Dirichlet problem with conjugate gradients to relative
/// residual 1e-8.
pub fn annulus_potential(mask: &RegionMask) -> Result<AnnulusPotential> {
    let (labels, inner, _outer_first) = complement_sides(mask)?;
    let res = mask.grid.resolution;
    let n = res * res;

    // Dirichlet value for non-mask cells: 0 on the inner component, 1
    // everywhere else (all outer components and off-chart)
    let dirichlet = |idx: usize| -> f64 {
        if labels[idx] as usize == inner {
            0.0
        } else {
            1.0
        }
    };

    let unknowns: Vec<usize> = (0..n).filter(|&i| mask.bits[i]).collect();
    let mut eq_of = vec![usize::MAX; n];
    for (e, &i) in unknowns.iter().enumerate() {
        eq_of[i] = e;
    }
    let m = unknowns.len();
    if m == 0 {
        return Err(Error::EmptyMask);
    }

    // neighbor lists and right-hand side; off-chart neighbors carry value 1
    let mut nbrs: Vec<[i64; 4]> = vec![[-1; 4]; m];
    let mut b = vec![0.0f64; m];
    for (e, &i) in unknowns.iter().enumerate() {
        let ix = (i % res) as isize;
        let iy = (i / res) as isize;
        for (s, (dx, dy)) in [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().enumerate() {
            let nx = ix + dx;
            let ny = iy + dy;
            if nx < 0 || ny < 0 || nx >= res as isize || ny >= res as isize {
                b[e] += 1.0; // off-chart: outer value
                continue;
            }
            let j = ny as usize * res + nx as usize;
            if mask.bits[j] {
                nbrs[e][s] = eq_of[j] as i64;
            } else {
                b[e] += dirichlet(j);
            }
        }
    }

    let matvec = |x: &[f64], out: &mut [f64]| {
        out.par_iter_mut().enumerate().for_each(|(e, o)| {
            let mut acc = 4.0 * x[e];
            for &nb in &nbrs[e] {
                if nb >= 0 {
                    acc -= x[nb as usize];
                }
            }
            *o = acc;
        });
    };
    // deterministic dot product: parallel fixed-size chunks, serial combine
    let dot = |a: &[f64], c: &[f64]| -> f64 {
        let partials: Vec<f64> = a
            .par_chunks(8192)
            .zip(c.par_chunks(8192))
            .map(|(xa, xc)| xa.iter().zip(xc).map(|(u, v)| u * v).sum::<f64>())
            .collect();
        partials.iter().sum()
    };

    let mut x = vec![0.5f64; m];
    let mut ax = vec![0.0f64; m];
    matvec(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let b_norm = dot(&b, &b).sqrt().max(1.0);
    let target = 1e-8 * b_norm;
    let mut ap = vec![0.0f64; m];
    for _ in 0..20 * res.max(100) {
        if rs.sqrt() <= target {
            break;
        }
        matvec(&p, &mut ap);
        let alpha = rs / dot(&p, &ap);
        x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        rs = rs_new;
        p.par_iter_mut()
            .zip(&r)
            .for_each(|(pi, ri)| *pi = ri + beta * *pi);
    }

    let mut field = vec![0.0f64; n];
    for i in 0..n {
        field[i] = if mask.bits[i] {
            x[eq_of[i]]
        } else {
            dirichlet(i)
        };
    }

    // Dirichlet energy over grid edges incident to at least one mask cell;
    // off-chart neighbors contribute (u - 1)^2 on chart-edge mask cells
    let mut energy = 0.0f64;
    for iy in 0..res {
        for ix in 0..res {
            let i = iy * res + ix;
            // rightward and upward edges, counted once
            for (dx, dy) in [(1isize, 0isize), (0, 1)] {
                let nx = ix as isize + dx;
                let ny = iy as isize + dy;
                let (va, vb, relevant) = if nx >= res as isize || ny >= res as isize {
                    (field[i], 1.0, mask.bits[i])
                } else {
                    let j = ny as usize * res + nx as usize;
                    (field[i], field[j], mask.bits[i] || mask.bits[j])
                };
                if relevant {
                    let d = va - vb;
                    energy += d * d;
                }
            }
            if ix == 0 && mask.bits[i] {
                let d = field[i] - 1.0;
                energy += d * d;
            }
            if iy == 0 && mask.bits[i] {
                let d = field[i] - 1.0;
                energy += d * d;
            }
        }
    }

    let outer_label = {
        // any edge-touching complement label; recompute cheaply
        let mut found = 0usize;
        for iy in 0..res {
            for ix in 0..res {
                if ix == 0 || iy == 0 || ix == res - 1 || iy == res - 1 {
                    let l = labels[iy * res + ix] as usize;
                    if l > 0 && l != inner {
                        found = l;
                    }
                }
            }
        }
        found
    };

    Ok(AnnulusPotential {
        mask: mask.clone(),
        field,
        inner_component: inner,
        outer_component: outer_label,
        energy,
    })
}

impl AnnulusPotential {
    /// Conformal modulus under the convention mod A(0,r,R) = log(R/r)/(2 pi),
    /// i.e. the reciprocal of the Dirichlet energy of the 0/1 potential.
    pub fn modulus(&self) -> f64 {
        1.0 / self.energy
    }

    /// The half-level set of the potential as a closed curve separating the
    /// two complement components.
    pub fn equator(&self) -> Result<Curve> {
        let grid = self.mask.grid;
        let loops = marching_squares(&self.field, grid, 0.5);
        // an inner-component cell to test separation against
        let res = grid.resolution;
        let inv: Vec<bool> = self.mask.bits.iter().map(|b| !b).collect();
        let (labels, _) = label_bits(&inv, res, false);
        let inner_cell = (0..res * res)
            .find(|&i| labels[i] as usize == self.inner_component)
            .ok_or(Error::LevelSetDisconnected)?;
        let (cx, cy) = grid.coords(inner_cell);
        let center = grid.cell_center(cx, cy);

        let separating: Vec<Vec<num_complex::Complex64>> = loops
            .into_iter()
            .filter(|l| l.len() >= 4 && winding_number(l, center) != 0)
            .collect();
        if separating.len() != 1 {
            return Err(Error::LevelSetDisconnected);
        }
        let points = separating.into_iter().next().unwrap();
        Ok(Curve {
            points,
            closed: true,
            basepoint_index: 0,
        })
    }
}

/// Conformal modulus of a doubly connected raster region.
pub fn annulus_modulus(mask: &RegionMask) -> Result<f64> {
    Ok(annulus_potential(mask)?.modulus())
}
