//! Emergent particle profiles from a Bohmian treatment of a free Dirac field.
//!
//! The crate is organised bottom-up:
//!
//! * [`grassmann`]: finite Grassmann algebras, Berezin integration and the
//!   Gaussian identities (duals, norms) that the functional picture relies on.
//! * [`spinor`]: Dirac-representation matrices, the momentum-space
//!   Hamiltonian, spectral projectors, covariance kernels and spinor boosts.
//! * [`vacuum`]: Gaussian vacuum functionals over a truncated box-mode set,
//!   field-operator representation, excitations, vacuum energy and the
//!   bosonization map.
//! * [`dynamics`]: polar decomposition of spinor values and RK4 integration
//!   of the mode guidance equation.
//! * [`synth`]: shell quadrature, lattice shell sums, the closed-form rest
//!   and boosted profiles and finite-difference Klein-Gordon residuals.
//! * [`export`]: CSV/JSON writers shared by the command-line front end.

pub mod dynamics;
pub mod error;
pub mod export;
pub mod grassmann;
pub mod spinor;
pub mod synth;
pub mod vacuum;

pub use num_complex::Complex64;

pub use dynamics::{
    integrate_trajectory, polar_decompose, verify_closed_form, ClosedFormCheck, GuidanceOde,
    ModeTrajectory, ModeVariable, PolarDecomposition,
};
pub use error::{Error, Result};
pub use grassmann::{
    gaussian_dual, state_norm, Algebra, BerezinConvention, CovarianceMatrix, GaussianDual,
    GeneratorIndex, GeneratorKind, GrassmannElement, NormCheck,
};
pub use spinor::{
    alpha, beta, boost_operator, boost_spinor, covariance_k, energy_projectors, hamiltonian_k,
    rest_spinor, square_check, BoostParams, DiracSpinor, SignConvention, SpinorMatrix,
};
pub use synth::{
    boost_profile, closed_form_profile, kg_residual, lattice_shell_sum, mode_sum_profile,
    residual_study, shell_average, Axis, BoostVariant, BoostedFrame, FieldProfile, Grid,
    ProfileModel, ProfileSource, ProfileVariant, ResidualRegion, ResidualReport, ShellSpec,
    SpacetimePoint,
};
pub use vacuum::{
    annihilation_check, bosonize, build_vacuum, create_excitation, vacuum_energy, Branch,
    BosonizedState, CommutingPolynomial, FieldOperatorRep, FunctionalState, Mode, ModeBasis,
    VacuumEnergy,
};
