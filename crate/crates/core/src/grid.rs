//! Square raster charts over a bounded region of the plane, and boolean
//! region masks with a base point.
//!
//! Conventions used across the toolkit: masks are sets of cells sampled at
//! cell centers; connected components use 8-connectivity; boundary
//! detection uses 4-connectivity; cells outside the chart count as outside
//! every mask.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{self, ExtComplex};

/// A square chart: `resolution` x `resolution` cells covering the square of
/// half-width `half_width` around `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, resolution: usize) -> Result<Self> {
        if half_width.is_nan() || half_width <= 0.0 || resolution == 0 {
            return Err(Error::SpecInput("invalid grid".into()));
        }
        Ok(GridSpec {
            center,
            half_width,
            resolution,
        })
    }

    /// Chart centered at the origin covering the escape disc of radius
    /// `radius` plus one unit of margin.
    pub fn escape_chart(radius: f64, resolution: usize) -> Self {
        GridSpec {
            center: Complex64::new(0.0, 0.0),
            half_width: radius + 1.0,
            resolution,
        }
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn cells(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        let h = self.cell_width();
        Complex64::new(
            self.center.re - self.half_width + (ix as f64 + 0.5) * h,
            self.center.im - self.half_width + (iy as f64 + 0.5) * h,
        )
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.resolution + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.resolution, idx / self.resolution)
    }

    /// Cell containing a point, if it lies on the chart.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let h = self.cell_width();
        let fx = (z.re - (self.center.re - self.half_width)) / h;
        let fy = (z.im - (self.center.im - self.half_width)) / h;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let ix = fx.floor() as usize;
        let iy = fy.floor() as usize;
        if ix >= self.resolution || iy >= self.resolution {
            return None;
        }
        Some((ix, iy))
    }

    /// True when the chart rectangle contains the closed disc of the given
    /// radius about the origin.
    pub fn covers_disc(&self, radius: f64) -> bool {
        self.center.re - self.half_width <= -radius
            && self.center.re + self.half_width >= radius
            && self.center.im - self.half_width <= -radius
            && self.center.im + self.half_width >= radius
    }

    /// Half-width needed for this chart's center to cover the disc.
    pub fn required_half_width(&self, radius: f64) -> f64 {
        radius + self.center.re.abs().max(self.center.im.abs())
    }
}

/// A raster subset of the sphere: marked cells, an optional point at
/// infinity, and a base point inside the set.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    pub grid: GridSpec,
    pub bits: Vec<bool>,
    pub contains_infinity: bool,
    pub basepoint: ExtComplex,
}

impl RegionMask {
    pub fn new(grid: GridSpec, bits: Vec<bool>, basepoint: ExtComplex) -> Result<Self> {
        assert_eq!(bits.len(), grid.cells());
        let mask = RegionMask {
            grid,
            bits,
            contains_infinity: matches!(basepoint, ExtComplex::Infinity),
            basepoint,
        };
        match basepoint {
            ExtComplex::Infinity => {}
            ExtComplex::Finite(z) => {
                if !mask.contains_point(z) {
                    return Err(Error::OutsideDomain(format!(
                        "basepoint {} not in mask",
                        z
                    )));
                }
            }
        }
        Ok(mask)
    }

    /// Mask of cells whose centers satisfy a predicate.
    pub fn from_predicate<F: Fn(Complex64) -> bool>(
        grid: GridSpec,
        basepoint: ExtComplex,
        pred: F,
    ) -> Result<Self> {
        let mut bits = vec![false; grid.cells()];
        for iy in 0..grid.resolution {
            for ix in 0..grid.resolution {
                bits[grid.index(ix, iy)] = pred(grid.cell_center(ix, iy));
            }
        }
        RegionMask::new(grid, bits, basepoint)
    }

    /// Round disc |z - c| <= r.
    pub fn disc(grid: GridSpec, c: Complex64, r: f64, basepoint: ExtComplex) -> Result<Self> {
        Self::from_predicate(grid, basepoint, |z| (z - c).norm() <= r)
    }

    /// Round annulus r < |z - c| < s.
    pub fn annulus(
        grid: GridSpec,
        c: Complex64,
        r: f64,
        s: f64,
        basepoint: ExtComplex,
    ) -> Result<Self> {
        Self::from_predicate(grid, basepoint, |z| {
            let t = (z - c).norm();
            t > r && t < s
        })
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.bits[self.grid.index(ix, iy)]
    }

    pub fn cell_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.contains_infinity && self.bits.iter().all(|b| !b)
    }

    /// True when the cell containing the point is marked.
    pub fn contains_point(&self, z: Complex64) -> bool {
        match self.grid.locate(z) {
            Some((ix, iy)) => self.get(ix, iy),
            None => false,
        }
    }

    /// Marked cell indices in row-major order.
    pub fn cell_indices(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn cell_centers(&self) -> Vec<Complex64> {
        self.cell_indices()
            .iter()
            .map(|&i| {
                let (ix, iy) = self.grid.coords(i);
                self.grid.cell_center(ix, iy)
            })
            .collect()
    }

    /// 8-connected component labels: 0 means unmarked, labels start at 1 in
    /// row-major discovery order. Returns (labels, count).
    pub fn label_components(&self) -> (Vec<u32>, usize) {
        label_bits(&self.bits, self.grid.resolution, true)
    }

    /// Boundary cells: marked cells with an unmarked 4-neighbor (chart
    /// edges count as unmarked).
    pub fn boundary_cells(&self) -> Vec<usize> {
        let res = self.grid.resolution;
        let mut out = Vec::new();
        for iy in 0..res {
            for ix in 0..res {
                if !self.get(ix, iy) {
                    continue;
                }
                let edge = ix == 0 || iy == 0 || ix == res - 1 || iy == res - 1;
                if edge
                    || !self.get(ix - 1, iy)
                    || !self.get(ix + 1, iy)
                    || !self.get(ix, iy - 1)
                    || !self.get(ix, iy + 1)
                {
                    out.push(self.grid.index(ix, iy));
                }
            }
        }
        out
    }

    /// Chebyshev dilation by `k` cells.
    pub fn dilate(&self, k: usize) -> RegionMask {
        let res = self.grid.resolution;
        let mut bits = vec![false; self.bits.len()];
        for iy in 0..res {
            for ix in 0..res {
                if !self.get(ix, iy) {
                    continue;
                }
                let x0 = ix.saturating_sub(k);
                let y0 = iy.saturating_sub(k);
                let x1 = (ix + k).min(res - 1);
                let y1 = (iy + k).min(res - 1);
                for y in y0..=y1 {
                    for x in x0..=x1 {
                        bits[self.grid.index(x, y)] = true;
                    }
                }
            }
        }
        RegionMask {
            grid: self.grid,
            bits,
            contains_infinity: self.contains_infinity,
            basepoint: self.basepoint,
        }
    }

    /// True when every marked cell of `self` is marked in `other` (same
    /// grid assumed) and the infinity flags are compatible.
    pub fn subset_of(&self, other: &RegionMask) -> bool {
        if self.contains_infinity && !other.contains_infinity {
            return false;
        }
        self.bits
            .iter()
            .zip(other.bits.iter())
            .all(|(a, b)| !*a || *b)
    }

    /// Exact squared Euclidean distance (in cell units) from every cell to
    /// the nearest unmarked cell center; unmarked cells get 0. Off-chart
    /// cells count as unmarked, so chart-edge distances are finite.
    pub fn distance_to_complement_sq(&self) -> Vec<f64> {
        let res = self.grid.resolution;
        let inf = 1e18;
        let f: Vec<f64> = self
            .bits
            .iter()
            .map(|&b| if b { inf } else { 0.0 })
            .collect();
        // seed off-chart: a marked cell at the edge is 1 away from the
        // first off-chart center
        let mut g = vec![inf; self.bits.len()];
        // column pass (1D transform along y for each x), then row pass
        let mut line = vec![0.0f64; res + 2];
        for ix in 0..res {
            line[0] = 0.0; // virtual off-chart cell below
            for iy in 0..res {
                line[iy + 1] = f[self.grid.index(ix, iy)];
            }
            line[res + 1] = 0.0; // virtual off-chart cell above
            let t = dt_1d(&line);
            for iy in 0..res {
                g[self.grid.index(ix, iy)] = t[iy + 1];
            }
        }
        // row pass over the column results; virtual off-chart columns carry
        // value 0 so chart edges stay one cell away
        let mut out = vec![0.0f64; self.bits.len()];
        let mut row = vec![0.0f64; res + 2];
        for iy in 0..res {
            row[0] = 0.0;
            for ix in 0..res {
                row[ix + 1] = g[self.grid.index(ix, iy)];
            }
            row[res + 1] = 0.0;
            let t = dt_1d(&row);
            for ix in 0..res {
                out[self.grid.index(ix, iy)] = t[ix + 1];
            }
        }
        out
    }
}

/// Felzenszwalb-Huttenlocher 1D squared distance transform.
#[allow(clippy::needless_range_loop)]
fn dt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0f64; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let s = ((f[q] + (q * q) as f64) - (f[v[k]] + (v[k] * v[k]) as f64))
                / (2.0 * q as f64 - 2.0 * v[k] as f64);
            if s <= z[k] {
                // finite s never undercuts z[0] = -inf, so k stays >= 0
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = dq * dq + f[v[k]];
    }
    d
}

/// Connected-component labeling over a bit array; `eight` selects 8- vs
/// 4-connectivity. Labels are assigned in row-major discovery order so the
/// result is deterministic.
pub fn label_bits(bits: &[bool], res: usize, eight: bool) -> (Vec<u32>, usize) {
    let mut labels = vec![0u32; bits.len()];
    let mut count = 0u32;
    let mut stack = Vec::new();
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let ix = idx % res;
            let iy = idx / res;
            let x0 = ix.saturating_sub(1);
            let y0 = iy.saturating_sub(1);
            let x1 = (ix + 1).min(res - 1);
            let y1 = (iy + 1).min(res - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if !eight && x != ix && y != iy {
                        continue;
                    }
                    let j = y * res + x;
                    if bits[j] && labels[j] == 0 {
                        labels[j] = count;
                        stack.push(j);
                    }
                }
            }
        }
    }
    (labels, count as usize)
}

/// Spherical diameter of a raster set (its marked cells, plus an optional
/// point at infinity, plus the off-chart plane when `offchart_in_set`).
///
/// The maximum chordal distance over a region is attained on the region's
/// boundary unless the region contains an antipodal pair, in which case it
/// is exactly pi/2; both cases are checked. The off-chart plane is
/// represented by the chart-edge cells and the infinity flag, which is
/// accurate as long as the interesting geometry sits inside the chart.
pub fn spherical_diameter(mask: &RegionMask, offchart_in_set: bool) -> f64 {
    let mut candidates: Vec<ExtComplex> = mask
        .boundary_cells()
        .iter()
        .map(|&i| {
            let (ix, iy) = mask.grid.coords(i);
            ExtComplex::Finite(mask.grid.cell_center(ix, iy))
        })
        .collect();
    if mask.contains_infinity {
        candidates.push(ExtComplex::Infinity);
    }
    for &i in &mask.cell_indices() {
        let (ix, iy) = mask.grid.coords(i);
        let z = mask.grid.cell_center(ix, iy);
        match sphere::antipode(z) {
            ExtComplex::Infinity => {
                if mask.contains_infinity {
                    return std::f64::consts::FRAC_PI_2;
                }
            }
            ExtComplex::Finite(a) => {
                let inside = match mask.grid.locate(a) {
                    Some((ax, ay)) => mask.get(ax, ay),
                    None => offchart_in_set,
                };
                if inside {
                    return std::f64::consts::FRAC_PI_2;
                }
            }
        }
    }
    let pts: Vec<[f64; 3]> = candidates.iter().map(|&c| sphere::to_sphere3(c)).collect();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let c2 = sphere::chord3_sq(&pts[i], &pts[j]);
            if c2 > best {
                best = c2;
            }
        }
    }
    sphere::dist_from_chord3_sq(best)
}
