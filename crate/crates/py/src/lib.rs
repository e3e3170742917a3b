//! Python bindings: sequence specs, escape sieves, component reports, and
//! the spherical/hyperbolic primitives, mirroring the `nonauto` CLI.

// fires inside the #[pyfunction] macro expansion
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nonauto::apps;
use nonauto::dynamics;
use nonauto::geometry;
use nonauto::grid::{GridSpec, RegionMask};
use nonauto::poly::Polynomial;
use nonauto::seq::{self, SequenceSpec};
use nonauto::sphere::{self, ExtComplex};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A bounded polynomial sequence parsed from the JSON spec format.
#[pyclass(name = "Sequence")]
struct PySequence {
    inner: SequenceSpec,
}

#[pymethods]
impl PySequence {
    /// Parses the JSON spec text (same schema as the CLI's --seq files).
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(PySequence {
            inner: SequenceSpec::from_json(json).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    /// Ascending coefficients of P_m as (re, im) pairs.
    fn term_coeffs(&self, m: usize) -> Vec<(f64, f64)> {
        self.inner
            .term(m)
            .coeffs()
            .iter()
            .map(|c| (c.re, c.im))
            .collect()
    }

    fn escape_radius(&self) -> f64 {
        self.inner.escape_radius()
    }

    /// Q_{m,n}(z); raises on overflow toward infinity.
    fn compose_eval(&self, m: usize, n: usize, z: (f64, f64)) -> PyResult<(f64, f64)> {
        match seq::compose_eval(&self.inner, m, n, Complex64::new(z.0, z.1)) {
            seq::ComposeOutcome::Value(v) => Ok((v.re, v.im)),
            seq::ComposeOutcome::Escaped { step } => Err(PyRuntimeError::new_err(format!(
                "orbit escaped at step {}",
                step
            ))),
        }
    }

    fn composition_degree(&self, m: usize, n: usize) -> u128 {
        seq::composition_degree(&self.inner, m, n)
    }

    /// Escape test for one point: (escaped, steps).
    fn escape_time(&self, m: usize, z: (f64, f64), max_depth: usize) -> (bool, usize) {
        let r = dynamics::escape_time(&self.inner, m, Complex64::new(z.0, z.1), max_depth);
        (r.escaped, r.steps)
    }
}

/// Escape sieve at time `m`: returns a dict with the surviving cell
/// indices, boundary cell indices, grid data and component statistics.
#[pyfunction]
#[pyo3(signature = (sequence, m, resolution, depth, half_width=None))]
fn filled_julia(
    py: Python<'_>,
    sequence: &PySequence,
    m: usize,
    resolution: usize,
    depth: usize,
    half_width: Option<f64>,
) -> PyResult<PyObject> {
    let grid = match half_width {
        Some(hw) => GridSpec::new(Complex64::new(0.0, 0.0), hw, resolution).map_err(err)?,
        None => GridSpec::escape_chart(sequence.inner.escape_radius(), resolution),
    };
    let ja = dynamics::filled_julia(&sequence.inner, m, grid, depth).map_err(err)?;
    let comps = dynamics::components(&ja.k_mask);

    let dict = pyo3::types::PyDict::new_bound(py);
    dict.set_item("resolution", resolution)?;
    dict.set_item("half_width", grid.half_width)?;
    dict.set_item("cell_width", grid.cell_width())?;
    dict.set_item("cells", ja.k_mask.cell_indices())?;
    dict.set_item("j_cells", ja.j_cells.clone())?;
    dict.set_item("area", ja.k_mask.cell_count() as f64 * grid.cell_width().powi(2))?;
    dict.set_item("component_count", comps.len())?;
    dict.set_item(
        "component_diameters",
        comps.iter().map(|c| c.diameter).collect::<Vec<_>>(),
    )?;
    Ok(dict.into())
}

/// Spherical distance between two points of the extended plane; pass
/// `None` for the point at infinity.
#[pyfunction]
#[pyo3(signature = (a, b))]
fn spherical_dist(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> f64 {
    let lift = |p: Option<(f64, f64)>| match p {
        Some((re, im)) => ExtComplex::finite(re, im),
        None => ExtComplex::Infinity,
    };
    sphere::spherical_dist(lift(a), lift(b))
}

/// Spherical derivative of the polynomial with the given ascending
/// coefficients at z.
#[pyfunction]
fn spherical_derivative(coeffs: Vec<(f64, f64)>, z: (f64, f64)) -> PyResult<f64> {
    let p = Polynomial::new(coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(sphere::spherical_derivative(&p, Complex64::new(z.0, z.1)))
}

#[pyfunction]
fn escape_radius(d: u32, k: f64, m: f64) -> PyResult<f64> {
    let b = seq::Bounds::new(d, k, m).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(seq::escape_radius(b))
}

/// Hausdorff distance (spherical) between two point lists.
#[pyfunction]
fn hausdorff_dist(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> PyResult<f64> {
    let lift = |v: &[(f64, f64)]| -> Vec<ExtComplex> {
        v.iter().map(|&(re, im)| ExtComplex::finite(re, im)).collect()
    };
    dynamics::hausdorff_dist(&lift(&a), &lift(&b)).map_err(err)
}

/// Conformal modulus of the round annulus r < |z| < s rasterized at the
/// given resolution.
#[pyfunction]
fn round_annulus_modulus(r: f64, s: f64, resolution: usize) -> PyResult<f64> {
    let grid = GridSpec::escape_chart(s, resolution);
    let mask = RegionMask::annulus(
        grid,
        Complex64::new(0.0, 0.0),
        r,
        s,
        ExtComplex::finite(0.5 * (r + s), 0.0),
    )
    .map_err(err)?;
    geometry::annulus_modulus(&mask).map_err(err)
}

/// Two-sided hyperbolic distance bracket (lower, upper) between two points
/// of the disc |z - c| < radius, from the quasihyperbolic cell graph.
#[pyfunction]
fn hyperbolic_bracket_in_disc(
    center: (f64, f64),
    radius: f64,
    z: (f64, f64),
    w: (f64, f64),
    resolution: usize,
) -> PyResult<(f64, f64)> {
    let c = Complex64::new(center.0, center.1);
    let grid = GridSpec::new(c, radius * 1.1, resolution).map_err(err)?;
    let mask = RegionMask::disc(grid, c, radius, ExtComplex::Finite(c)).map_err(err)?;
    let b = geometry::hyperbolic_dist_bounds(
        &mask,
        Complex64::new(z.0, z.1),
        Complex64::new(w.0, w.1),
    )
    .map_err(err)?;
    Ok((b.lower, b.upper))
}

/// Carathéodory bound of the pointed disc (D(c, radius), c).
#[pyfunction]
fn caratheodory_bound_of_disc(
    center: (f64, f64),
    radius: f64,
    resolution: usize,
) -> PyResult<f64> {
    let c = Complex64::new(center.0, center.1);
    let grid = GridSpec::new(c, radius * 1.2, resolution).map_err(err)?;
    let mask = RegionMask::disc(grid, c, radius, ExtComplex::Finite(c)).map_err(err)?;
    geometry::caratheodory_bound_disc(&mask).map_err(err)
}

/// Turning constant of the time-0 boundary for a small-c quadratic
/// sequence (raises ValueError outside the hypothesis).
#[pyfunction]
fn turning_constant(sequence: &PySequence, resolution: usize, depth: usize) -> PyResult<f64> {
    let grid = GridSpec::escape_chart(sequence.inner.escape_radius(), resolution);
    match apps::thm71_quasicircle(&sequence.inner, grid, depth) {
        Ok(rep) => Ok(rep.constant),
        Err(nonauto::Error::Hypothesis) => Err(PyValueError::new_err(
            nonauto::Error::Hypothesis.to_string(),
        )),
        Err(e) => Err(err(e)),
    }
}

#[pymodule]
fn nonauto_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(filled_julia, m)?)?;
    m.add_function(wrap_pyfunction!(spherical_dist, m)?)?;
    m.add_function(wrap_pyfunction!(spherical_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(escape_radius, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_dist, m)?)?;
    m.add_function(wrap_pyfunction!(round_annulus_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolic_bracket_in_disc, m)?)?;
    m.add_function(wrap_pyfunction!(caratheodory_bound_of_disc, m)?)?;
    m.add_function(wrap_pyfunction!(turning_constant, m)?)?;
    Ok(())
}
