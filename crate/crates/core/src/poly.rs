//! Complex polynomials: Horner evaluation, derivatives, and root finding
//! by Aberth-Ehrlich iteration with Newton polishing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A polynomial a_0 + a_1 z + ... + a_d z^d with complex coefficients,
/// stored in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. The leading
    /// coefficient must be nonzero unless the polynomial is constant.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        }
        if coeffs.len() > 1 && coeffs.last().unwrap().norm() == 0.0 {
            return Err(Error::InvalidPolynomial(
                "leading coefficient is zero".into(),
            ));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// z^2 + c
    pub fn quadratic_plus_c(c: Complex64) -> Self {
        Polynomial {
            coeffs: vec![c, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    /// (z - a)^2 = a^2 - 2a z + z^2
    pub fn square_shifted(a: f64) -> Self {
        Polynomial {
            coeffs: vec![
                Complex64::new(a * a, 0.0),
                Complex64::new(-2.0 * a, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut val = Complex64::new(0.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            der = der * z + val;
            val = val * z + c;
        }
        (val, der)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Polynomial { coeffs }
    }

    /// All roots, each repeated by multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        roots_aberth(self)
    }

    /// Critical points: roots of the derivative, with multiplicity.
    /// Each returned point satisfies |p'(root)| <= 1e-9.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        if self.degree() < 2 {
            return Err(Error::InvalidPolynomial(
                "critical points need degree >= 2".into(),
            ));
        }
        let der = self.derivative();
        let roots = der.roots()?;
        for &r in &roots {
            let res = der.eval(r).norm();
            if res > 1e-9 {
                return Err(Error::RootFinding {
                    poly: format!("{}", self),
                    detail: format!("critical point residual {:.3e} at {}", res, r),
                });
            }
        }
        Ok(roots)
    }

    /// The critical point of smallest modulus; ties broken by (re, im).
    pub fn dominant_critical_point(&self) -> Result<Complex64> {
        let mut pts = self.critical_points()?;
        pts.sort_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        });
        Ok(pts[0])
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| format!("({:.6}{:+.6}i) z^{}", c.re, c.im, k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Aberth-Ehrlich simultaneous iteration. Degrees stay small here (<= 8 in
/// every shipped configuration), so conditioning is benign.
fn roots_aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    // strip trailing zero coefficients: roots at the origin
    let mut coeffs = p.coeffs.clone();
    let mut zero_roots = 0usize;
    while coeffs.len() > 1 && coeffs[0].norm() == 0.0 {
        coeffs.remove(0);
        zero_roots += 1;
    }
    let reduced = Polynomial { coeffs };
    let n = reduced.degree();
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
    if n == 0 {
        return Ok(roots);
    }

    // Cauchy-style inclusion radius for initial guesses
    let lead = reduced.leading_coeff().norm();
    let radius = 1.0
        + reduced
            .coeffs
            .iter()
            .take(n)
            .map(|c| c.norm() / lead)
            .fold(0.0_f64, f64::max);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.7, angle)
        })
        .collect();

    let scale = reduced.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for _ in 0..400 {
        let mut max_step = 0.0_f64;
        let snapshot = zs.clone();
        for i in 0..n {
            let (val, der) = reduced.eval_with_derivative(snapshot[i]);
            if val.norm() <= 1e-300 * scale {
                continue;
            }
            let newton = if der.norm() > 0.0 {
                val / der
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in snapshot.iter().enumerate() {
                if j != i {
                    let diff = snapshot[i] - zj;
                    if diff.norm() > 1e-300 {
                        sum += 1.0 / diff;
                    }
                }
            }
            let denom = 1.0 - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            zs[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius.max(1.0) {
            break;
        }
    }

    // cluster nearby approximations into multiplicity groups, then polish
    // each cluster mean with multiplicity-aware Newton steps
    let tol = 1e-6 * radius.max(1.0);
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let mut cluster = vec![zs[i]];
        used[i] = true;
        for j in (i + 1)..n {
            if !used[j] && (zs[j] - zs[i]).norm() < tol {
                cluster.push(zs[j]);
                used[j] = true;
            }
        }
        let mult = cluster.len();
        let mut z = cluster.iter().sum::<Complex64>() / mult as f64;
        for _ in 0..40 {
            let (val, der) = reduced.eval_with_derivative(z);
            if der.norm() == 0.0 || val.norm() == 0.0 {
                break;
            }
            let step = val / der * mult as f64;
            z -= step;
            if step.norm() < 1e-15 * radius.max(1.0) {
                break;
            }
        }
        for _ in 0..mult {
            roots.push(z);
        }
    }

    if roots.len() != p.degree() {
        return Err(Error::RootFinding {
            poly: format!("{}", p),
            detail: format!("expected {} roots, got {}", p.degree(), roots.len()),
        });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        // (z-3)^2 at 3 -> 0
        let p = Polynomial::square_shifted(3.0);
        assert!(p.eval(c(3.0, 0.0)).norm() < 1e-15);
        // z^2 at 1+i -> 2i
        let q = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!((q.eval(c(1.0, 1.0)) - c(0.0, 2.0)).norm() < 1e-15);
        // z^2 + 2 at 0 -> 2
        let r = Polynomial::quadratic_plus_c(c(2.0, 0.0));
        assert!((r.eval(c(0.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn critical_point_examples() {
        let p = Polynomial::quadratic_plus_c(c(0.3, 0.0));
        let cp = p.critical_points().unwrap();
        assert_eq!(cp.len(), 1);
        assert!(cp[0].norm() < 1e-12);

        let q = Polynomial::square_shifted(3.0);
        let cq = q.critical_points().unwrap();
        assert_eq!(cq.len(), 1);
        assert!((cq[0] - c(3.0, 0.0)).norm() < 1e-12);

        // z^3 - 3z: p' = 3z^2 - 3, critical points +-1
        let r = Polynomial::from_real(&[0.0, -3.0, 0.0, 1.0]).unwrap();
        let mut cr = r.critical_points().unwrap();
        cr.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(cr.len(), 2);
        assert!((cr[0] - c(-1.0, 0.0)).norm() < 1e-10);
        assert!((cr[1] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn multiple_roots_carry_multiplicity() {
        // p = z^4 has p' = 4z^3: critical point 0 with multiplicity 3
        let p = Polynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let cp = p.critical_points().unwrap();
        assert_eq!(cp.len(), 3);
        for r in cp {
            assert!(r.norm() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn roots_reproduce_factored_polynomials(
            roots in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..6)
        ) {
            // keep the synthetic roots pairwise separated so the check is
            // a plain matching problem
            let mut rs: Vec<Complex64> = roots.iter().map(|&(a, b)| c(a, b)).collect();
            rs.dedup_by(|a, b| (*a - *b).norm() < 0.2);
            let mut coeffs = vec![c(1.0, 0.0)];
            for &r in &rs {
                let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
                for (k, &co) in coeffs.iter().enumerate() {
                    next[k + 1] += co;
                    next[k] -= co * r;
                }
                coeffs = next;
            }
            let p = Polynomial::new(coeffs).unwrap();
            let mut found = p.roots().unwrap();
            prop_assert_eq!(found.len(), rs.len());
            for &r in &rs {
                let (idx, d) = found
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (i, (f - r).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                prop_assert!(d < 1e-6, "root {} missed by {}", r, d);
                found.remove(idx);
            }
        }
    }
}
