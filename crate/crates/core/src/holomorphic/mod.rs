//! Finite-energy `J0`-holomorphic page curves in `R x M`.

pub mod acs;
pub mod curve;
pub mod foliation;
pub mod half_cylinder;
pub mod residual;

pub use acs::{cartesian_smoothness, j0_cartesian, AcsSample, CartesianCheck, J0_at};
pub use curve::{assemble_page_curve, half_cylinder_energy_closed_form, omega_energy, EnergyReport, PageCurve};
pub use foliation::{foliation_sample, leaf_transversality, leaves_to_csv, FoliationOptions, FoliationReport};
pub use half_cylinder::{solve_half_cylinder, AsymptoticFit, Branch, HalfCylinderOptions, HalfCylinderSolution};
pub use residual::{cr_residual, richardson_check, MapSamples, ResidualField, Richardson};
