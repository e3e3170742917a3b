//! Spherical geometry on the Riemann sphere.
//!
//! The metric is induced by the density |dz|/(1+|z|^2), under which the
//! full sphere has diameter pi/2. Distances are computed in closed form as
//! arcsin of the chordal quotient.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::Polynomial;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Complex64::new(re, im))
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(*z),
            ExtComplex::Infinity => None,
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

/// Chordal quotient |z-w| / sqrt((1+|z|^2)(1+|w|^2)), extended to infinity.
///
/// Equals the 3D Euclidean distance between the stereographic projections
/// onto the sphere of radius 1/2, so it is monotone in the spherical
/// distance and lands in [0, 1].
pub fn chordal(a: ExtComplex, b: ExtComplex) -> f64 {
    match (a, b) {
        (ExtComplex::Finite(z), ExtComplex::Finite(w)) => {
            let q = (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt();
            q.min(1.0)
        }
        (ExtComplex::Finite(z), ExtComplex::Infinity)
        | (ExtComplex::Infinity, ExtComplex::Finite(z)) => {
            (1.0 / (1.0 + z.norm_sqr()).sqrt()).min(1.0)
        }
        (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
    }
}

/// Spherical distance d#(a, b) in [0, pi/2].
pub fn spherical_dist(a: ExtComplex, b: ExtComplex) -> f64 {
    chordal(a, b).asin()
}

/// Convenience overload for two finite points.
pub fn spherical_dist_zz(z: Complex64, w: Complex64) -> f64 {
    spherical_dist(ExtComplex::Finite(z), ExtComplex::Finite(w))
}

/// Stereographic projection onto the sphere of radius 1/2 centered at
/// (0, 0, 1/2); infinity maps to the north pole.
pub fn to_sphere3(a: ExtComplex) -> [f64; 3] {
    match a {
        ExtComplex::Finite(z) => {
            let d = 1.0 + z.norm_sqr();
            [z.re / d, z.im / d, z.norm_sqr() / d]
        }
        ExtComplex::Infinity => [0.0, 0.0, 1.0],
    }
}

/// Squared 3D chord distance between projections; cheap comparison key for
/// nearest/farthest spherical queries.
pub fn chord3_sq(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    dx * dx + dy * dy + dz * dz
}

/// Spherical distance recovered from a squared 3D chord.
pub fn dist_from_chord3_sq(c2: f64) -> f64 {
    c2.sqrt().min(1.0).asin()
}

/// Antipode of a finite point: -1/conj(z). Zero maps to infinity.
pub fn antipode(z: Complex64) -> ExtComplex {
    if z.norm_sqr() == 0.0 {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(-1.0 / z.conj())
    }
}

/// Spherical derivative f#(z) = |f'(z)| / (1 + |f(z)|^2) of a polynomial at
/// a finite point.
pub fn spherical_derivative(p: &Polynomial, z: Complex64) -> f64 {
    let (val, der) = p.eval_with_derivative(z);
    der.norm() / (1.0 + val.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn zero_to_infinity_is_quarter_turn() {
        let d = spherical_dist(ExtComplex::finite(0.0, 0.0), ExtComplex::Infinity);
        assert!((d - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn identity_of_indiscernibles() {
        let z = ExtComplex::finite(1.25, -0.5);
        assert_eq!(spherical_dist(z, z), 0.0);
        assert_eq!(spherical_dist(ExtComplex::Infinity, ExtComplex::Infinity), 0.0);
    }

    #[test]
    fn zero_to_one_is_pi_over_four() {
        // oracle: integrate |dz|/(1+|z|^2) along [0,1]; the integral is
        // atan(1) = pi/4, matching the arcsin closed form
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            acc += 1.0 / (1.0 + t * t) / n as f64;
        }
        let d = spherical_dist(ExtComplex::finite(0.0, 0.0), ExtComplex::finite(1.0, 0.0));
        assert!((d - FRAC_PI_4).abs() < 1e-12);
        assert!((d - acc).abs() < 1e-9);
    }

    #[test]
    fn symmetry_and_triangle_inequality_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let mut pts = [ExtComplex::Infinity; 3];
            for p in pts.iter_mut() {
                if rng.gen::<f64>() < 0.02 {
                    *p = ExtComplex::Infinity;
                } else {
                    *p = ExtComplex::finite(
                        rng.gen_range(-10.0..10.0),
                        rng.gen_range(-10.0..10.0),
                    );
                }
            }
            let dab = spherical_dist(pts[0], pts[1]);
            let dba = spherical_dist(pts[1], pts[0]);
            assert_eq!(dab, dba);
            let dac = spherical_dist(pts[0], pts[2]);
            let dcb = spherical_dist(pts[2], pts[1]);
            assert!(dab <= dac + dcb + 1e-12);
        }
    }

    #[test]
    fn spherical_derivative_examples() {
        let ident = Polynomial::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        assert!((spherical_derivative(&ident, Complex64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);

        let sq = Polynomial::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        // f# of z^2 at 1 is 2/(1+1) = 1
        assert!((spherical_derivative(&sq, Complex64::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spherical_derivative_matches_finite_differences() {
        // centered quotient d#(f(z+h), f(z-h)) / (2h) at step 1e-6,
        // degree <= 4 and |z| <= 2, tolerance 1e-5
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let deg = rng.gen_range(1..=4);
            let mut coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            if coeffs[deg].norm() < 0.1 {
                coeffs[deg] = Complex64::new(0.5, 0.5);
            }
            let p = Polynomial::new(coeffs).unwrap();
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if z.norm() > 2.0 {
                continue;
            }
            let h = 1e-6;
            let dir = Complex64::from_polar(h, rng.gen_range(0.0..std::f64::consts::TAU));
            let fd = spherical_dist_zz(p.eval(z + dir), p.eval(z - dir)) / (2.0 * h);
            let exact = spherical_derivative(&p, z);
            assert!(
                (fd - exact).abs() < 1e-5,
                "fd {} exact {} at z {}",
                fd,
                exact,
                z
            );
        }
    }
}
