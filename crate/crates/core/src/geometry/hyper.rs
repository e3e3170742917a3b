//! Quasihyperbolic shortest paths on the 8-neighbor cell graph.
//!
//! On a simply connected domain the hyperbolic density is bracketed by
//! |dz|/(2 delta) and 2|dz|/delta, so the quasihyperbolic path length Q
//! (density 1/delta) yields the two-sided bracket [Q/2, 2Q].

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::RegionMask;
use crate::poly::Polynomial;
use crate::sphere::{self, ExtComplex};

/// Two-sided bracket for a hyperbolic distance; `upper` is exactly four
/// times `lower` since both derive from the same quasihyperbolic length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DistBounds {
    fn from_quasihyperbolic(q: f64) -> Self {
        DistBounds {
            lower: q / 2.0,
            upper: 2.0 * q,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    idx: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (cost, idx): deterministic tie-breaking
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source quasihyperbolic distances from a cell: Dijkstra over the
/// 8-neighbor graph with edge weight |step| (1/delta(a) + 1/delta(b)) / 2,
/// delta being the distance to the mask complement. Unreachable or unmarked
/// cells get infinity.
pub fn quasihyperbolic_distances(mask: &RegionMask, source: usize) -> Vec<f64> {
    let grid = mask.grid;
    let res = grid.resolution;
    let h = grid.cell_width();
    let dt = mask.distance_to_complement_sq();
    let delta: Vec<f64> = dt.iter().map(|&d2| d2.sqrt() * h).collect();
    let mut dist = vec![f64::INFINITY; mask.bits.len()];
    if !mask.bits[source] {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        cost: 0.0,
        idx: source,
    });
    let offsets: [(isize, isize, f64); 8] = [
        (-1, 0, 1.0),
        (1, 0, 1.0),
        (0, -1, 1.0),
        (0, 1, 1.0),
        (-1, -1, std::f64::consts::SQRT_2),
        (-1, 1, std::f64::consts::SQRT_2),
        (1, -1, std::f64::consts::SQRT_2),
        (1, 1, std::f64::consts::SQRT_2),
    ];
    while let Some(HeapEntry { cost, idx }) = heap.pop() {
        if cost > dist[idx] {
            continue;
        }
        let ix = (idx % res) as isize;
        let iy = (idx / res) as isize;
        for &(dx, dy, len) in &offsets {
            let nx = ix + dx;
            let ny = iy + dy;
            if nx < 0 || ny < 0 || nx >= res as isize || ny >= res as isize {
                continue;
            }
            let j = ny as usize * res + nx as usize;
            if !mask.bits[j] {
                continue;
            }
            let w = len * h * 0.5 * (1.0 / delta[idx] + 1.0 / delta[j]);
            let cand = cost + w;
            if cand < dist[j] {
                dist[j] = cand;
                heap.push(HeapEntry { cost: cand, idx: j });
            }
        }
    }
    dist
}

fn locate_interior(mask: &RegionMask, z: Complex64) -> Result<usize> {
    let (ix, iy) = mask
        .grid
        .locate(z)
        .ok_or_else(|| Error::OutsideDomain(format!("{} is off the chart", z)))?;
    if !mask.get(ix, iy) {
        return Err(Error::OutsideDomain(format!("{} is outside the domain", z)));
    }
    Ok(mask.grid.index(ix, iy))
}

/// Bracket for the hyperbolic distance between two interior points of a
/// simply connected raster domain.
pub fn hyperbolic_dist_bounds(mask: &RegionMask, z: Complex64, w: Complex64) -> Result<DistBounds> {
    let a = locate_interior(mask, z)?;
    let b = locate_interior(mask, w)?;
    let boundary: std::collections::HashSet<usize> = mask.boundary_cells().into_iter().collect();
    if boundary.contains(&a) || boundary.contains(&b) {
        return Err(Error::OutsideDomain(
            "endpoint lies on a boundary cell".into(),
        ));
    }
    if a == b {
        return Ok(DistBounds {
            lower: 0.0,
            upper: 0.0,
        });
    }
    let dist = quasihyperbolic_distances(mask, a);
    let q = dist[b];
    if !q.is_finite() {
        return Err(Error::OutsideDomain(
            "points lie in different components".into(),
        ));
    }
    Ok(DistBounds::from_quasihyperbolic(q))
}

/// Empirical Lipschitz constant: maximum spherical derivative of `p` over
/// sampled cells within hyperbolic distance (upper bound) `r_hyp` of the
/// base point.
pub fn lipschitz_profile<R: Rng>(
    p: &Polynomial,
    mask: &RegionMask,
    r_hyp: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let bp = match mask.basepoint {
        ExtComplex::Finite(z) => z,
        ExtComplex::Infinity => {
            return Err(Error::OutsideDomain("base point at infinity".into()))
        }
    };
    let source = locate_interior(mask, bp)?;
    let dist = quasihyperbolic_distances(mask, source);
    let eligible: Vec<usize> = (0..mask.bits.len())
        .filter(|&i| mask.bits[i] && 2.0 * dist[i] <= r_hyp)
        .collect();
    if eligible.is_empty() {
        return Err(Error::EmptyMask);
    }
    let value_at = |idx: usize| -> f64 {
        let (ix, iy) = mask.grid.coords(idx);
        sphere::spherical_derivative(p, mask.grid.cell_center(ix, iy))
    };
    let mut best = value_at(source);
    for _ in 0..samples {
        let idx = eligible[rng.gen_range(0..eligible.len())];
        best = best.max(value_at(idx));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_disc(res: usize) -> RegionMask {
        let grid = GridSpec::escape_chart(0.1, res); // half-width 1.1
        RegionMask::disc(
            grid,
            Complex64::new(0.0, 0.0),
            1.0,
            ExtComplex::finite(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn bracket_is_exact_factor_four_and_contains_disc_distance() {
        let mask = unit_disc(1024);
        for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let b = hyperbolic_dist_bounds(
                &mask,
                Complex64::new(0.0, 0.0),
                Complex64::new(r, 0.0),
            )
            .unwrap();
            assert_eq!(b.upper, 4.0 * b.lower);
            let exact = ((1.0 + r) / (1.0 - r)).ln();
            assert!(
                b.contains(exact),
                "r={}: bracket [{}, {}] misses {}",
                r,
                b.lower,
                b.upper,
                exact
            );
        }
    }

    #[test]
    fn same_point_has_zero_bracket() {
        let mask = unit_disc(256);
        let b = hyperbolic_dist_bounds(
            &mask,
            Complex64::new(0.2, 0.1),
            Complex64::new(0.2, 0.1),
        )
        .unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn outside_point_faults() {
        let mask = unit_disc(256);
        assert!(hyperbolic_dist_bounds(
            &mask,
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0)
        )
        .is_err());
    }

    #[test]
    fn lipschitz_profile_examples() {
        let mask = unit_disc(512);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ident = Polynomial::from_real(&[0.0, 1.0]).unwrap();
        let v = lipschitz_profile(&ident, &mask, 1.0, 400, &mut rng).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "identity profile {}", v);

        let constant = Polynomial::from_real(&[0.7]).unwrap();
        let c = lipschitz_profile(&constant, &mask, 1.0, 100, &mut rng).unwrap();
        assert_eq!(c, 0.0);

        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let a = lipschitz_profile(&sq, &mask, 1.0, 400, &mut rng).unwrap();
        assert!(a <= 2.0 && a > 0.0);
        // reproducible within 5% across seeds
        let mut rng2 = ChaCha8Rng::seed_from_u64(99);
        let b = lipschitz_profile(&sq, &mask, 1.0, 400, &mut rng2).unwrap();
        assert!((a - b).abs() / a < 0.05, "a {} b {}", a, b);
    }
}
