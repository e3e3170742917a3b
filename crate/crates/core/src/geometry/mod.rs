//! Carathéodory topology on pointed raster domains, hyperbolic-distance
//! bracketing, annulus moduli and equators, and Lipschitz profiles.

mod caratheodory;
mod curve;
mod hyper;
mod laplace;

pub use caratheodory::{caratheodory_bound_disc, caratheodory_limit, CaratheodoryLimit};
pub use curve::{fill_enclosed, marching_squares, winding_number, Curve};
pub use hyper::{hyperbolic_dist_bounds, lipschitz_profile, quasihyperbolic_distances, DistBounds};
pub use laplace::{annulus_modulus, annulus_potential, AnnulusPotential};

use crate::error::Result;
use crate::grid::RegionMask;

/// A doubly connected raster region together with its conformal modulus and
/// extracted equator.
#[derive(Clone, Debug)]
pub struct AnnulusData {
    pub mask: RegionMask,
    pub modulus: f64,
    pub equator: Curve,
    pub inner_component: usize,
    pub outer_component: usize,
}

impl AnnulusData {
    /// Solves the annulus potential once and derives modulus plus equator.
    pub fn analyze(mask: RegionMask) -> Result<AnnulusData> {
        let pot = annulus_potential(&mask)?;
        let modulus = pot.modulus();
        let equator = pot.equator()?;
        Ok(AnnulusData {
            mask,
            modulus,
            equator,
            inner_component: pot.inner_component,
            outer_component: pot.outer_component,
        })
    }
}
