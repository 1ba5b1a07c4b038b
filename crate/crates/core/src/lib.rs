//! Exact arithmetic for integral symplectic lattices, affine Siegel groups,
//! tamings and polarized field calculus, twisted cohomology of local
//! systems with charge-lattice integrality checks, and U-duality groups.

pub mod exact_linalg;
pub mod field_calculus;
pub mod local_systems;
pub mod polarization;
pub mod sampling;
pub mod siegel_group;
pub mod symplectic_lattices;
pub mod uduality;

pub use exact_linalg::{IntegerMatrix, LinalgError, RationalMatrix};
pub use siegel_group::{AffineSymplectomorphism, TorusPoint};
pub use symplectic_lattices::{IntegralSymplecticSpace, LatticeType};
