//! Angular-momentum algebra for the dipole products of two-photon paths.

mod dipole;
mod half;
mod surd;
mod wigner;

pub use dipole::{
    dipole_component, double_dipole_products, FineStructureState, LevelProducts, Polarization, Term, GROUND_MJ,
    RADIAL_PRODUCT_SIGN,
};
pub use half::HalfInteger;
pub use surd::{Surd, SurdSum};
pub use wigner::{triangle, wigner3j, wigner3j_exact, wigner6j, wigner6j_exact};
