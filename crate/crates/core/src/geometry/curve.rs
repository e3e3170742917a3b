//! Closed curves on raster charts: marching-squares level-set extraction,
//! winding numbers and polygon fill.

use num_complex::Complex64;
use std::collections::HashMap;

use crate::grid::GridSpec;

/// Ordered point list, optionally closed (the last point connects back to
/// the first).
#[derive(Clone, Debug)]
pub struct Curve {
    pub points: Vec<Complex64>,
    pub closed: bool,
    pub basepoint_index: usize,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polygonal length, including the closing segment for closed curves.
    pub fn arc_length(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.points.windows(2) {
            acc += (w[1] - w[0]).norm();
        }
        if self.closed && self.points.len() > 1 {
            acc += (self.points[0] - self.points[self.points.len() - 1]).norm();
        }
        acc
    }
}

/// Vertex key: a lattice edge between two cell centers, identified by the
/// lower cell index and the axis (0 horizontal, 1 vertical).
type EdgeKey = (usize, u8);

/// Extracts the closed loops of the level set {field = level} by marching
/// squares over the lattice of cell centers. The field is sampled at cell
/// centers; each returned loop is ordered and implicitly closed.
pub fn marching_squares(field: &[f64], grid: GridSpec, level: f64) -> Vec<Vec<Complex64>> {
    let res = grid.resolution;
    debug_assert_eq!(field.len(), res * res);
    let idx = |ix: usize, iy: usize| iy * res + ix;

    // segment endpoints as (edge key, interpolated point)
    let interp = |i: usize, j: usize| -> Complex64 {
        let (ix, iy) = grid.coords(i);
        let (jx, jy) = grid.coords(j);
        let a = grid.cell_center(ix, iy);
        let b = grid.cell_center(jx, jy);
        let fa = field[i];
        let fb = field[j];
        let t = if (fb - fa).abs() < 1e-300 {
            0.5
        } else {
            ((level - fa) / (fb - fa)).clamp(0.0, 1.0)
        };
        a + (b - a) * t
    };
    let hkey = |i: usize| -> EdgeKey { (i, 0) }; // edge i -> i+1 (x direction)
    let vkey = |i: usize| -> EdgeKey { (i, 1) }; // edge i -> i+res (y direction)

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..res - 1 {
        for ix in 0..res - 1 {
            let i00 = idx(ix, iy);
            let i10 = idx(ix + 1, iy);
            let i01 = idx(ix, iy + 1);
            let i11 = idx(ix + 1, iy + 1);
            let mut case = 0u8;
            if field[i00] > level {
                case |= 1;
            }
            if field[i10] > level {
                case |= 2;
            }
            if field[i11] > level {
                case |= 4;
            }
            if field[i01] > level {
                case |= 8;
            }
            // edges of this square: bottom (i00-i10), right (i10-i11),
            // top (i01-i11), left (i00-i01)
            let bottom = hkey(i00);
            let right = vkey(i10);
            let top = hkey(i01);
            let left = vkey(i00);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // saddle: disambiguate by the center average
                    let avg =
                        0.25 * (field[i00] + field[i10] + field[i01] + field[i11]);
                    let flip = (avg > level) == (case == 5);
                    if flip {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // chain segments into loops: each level-crossing lattice edge belongs
    // to exactly two squares, so every vertex has degree two
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(s);
        by_edge.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let mut keys: Vec<EdgeKey> = Vec::new();
        used[start] = true;
        let (a0, b0) = segments[start];
        keys.push(a0);
        let mut current = b0;
        loop {
            keys.push(current);
            let next = by_edge
                .get(&current)
                .and_then(|ss| ss.iter().find(|&&s| !used[s]).copied());
            match next {
                None => break,
                Some(s) => {
                    used[s] = true;
                    let (a, b) = segments[s];
                    current = if a == current { b } else { a };
                }
            }
        }
        // drop the duplicated closing key if the walk returned home
        if keys.len() > 2 && keys[0] == *keys.last().unwrap() {
            keys.pop();
        }
        let pts: Vec<Complex64> = keys
            .iter()
            .map(|&(i, axis)| {
                let j = if axis == 0 { i + 1 } else { i + res };
                interp(i, j)
            })
            .collect();
        if pts.len() >= 3 {
            loops.push(pts);
        }
    }
    loops
}

/// Integer winding number of a closed polygon around a point.
pub fn winding_number(polygon: &[Complex64], p: Complex64) -> i32 {
    let mut wn = 0i32;
    let n = polygon.len();
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let is_left = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && is_left > 0.0 {
                wn += 1;
            }
        } else if b.im <= p.im && is_left < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Cells whose centers lie inside a closed polygon (even-odd rule by
/// horizontal scanline).
pub fn fill_enclosed(grid: GridSpec, polygon: &[Complex64]) -> Vec<bool> {
    let res = grid.resolution;
    let mut bits = vec![false; res * res];
    let n = polygon.len();
    for iy in 0..res {
        let y = grid.cell_center(0, iy).im;
        let mut crossings: Vec<f64> = Vec::new();
        for i in 0..n {
            let a = polygon[i];
            let b = polygon[(i + 1) % n];
            if (a.im <= y && b.im > y) || (b.im <= y && a.im > y) {
                let t = (y - a.im) / (b.im - a.im);
                crossings.push(a.re + t * (b.re - a.re));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            for ix in 0..res {
                let x = grid.cell_center(ix, iy).re;
                if x > pair[0] && x < pair[1] {
                    bits[iy * res + ix] = true;
                }
            }
        }
    }
    bits
}
