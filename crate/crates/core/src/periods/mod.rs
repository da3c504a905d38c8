//! Period lattices, polarizations and the split (omega, omega').

mod group;
mod lattice;
mod polarization;
mod split;

pub(crate) use group::ext_gcd;
pub use group::{coset_reps, psi, schreier_generators, GroupElement, ProjectiveLine};
pub use lattice::{
    big_period_matrix, eichler_vector, gamma_period, gamma_period_at, generator_periods, terms_for_c, LatticeBasis,
};
pub use polarization::{
    compatible_forms, find_polarization, frobenius_normal_form, hecke_matrix, riemann_first_residual,
    riemann_hermitian,
};
pub use split::{compute_period_data, pairing_matrix, split_periods, BasisMode, HomologyFixture, PeriodData};
