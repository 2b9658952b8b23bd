//! Non-Gaussianity generating power of conditional maps.
//!
//! Inputs are pure two-mode Gaussian states `D_α R_θ S_r |ζ⟩` where the
//! operations act on the map's input mode (mode 1) and mode 0 is the ancilla.
//! Outputs of conditional unitary maps stay pure, so their non-Gaussianity is
//! the entropy of the Gaussified output.

mod analytic;
mod bounds;
mod family;
mod optimize;
pub mod sample;
mod wick;

pub use analytic::{analytic_entropy, analytic_output, analytic_output_covariance, analytic_output_for_map, AnalyticForm, Which};
pub use bounds::{
    assisted_lower_bound, classify, d_g_bound, d_g_bound_states, d_g_default_inputs, delta_tilde, divergence_profile,
    gd_upper_bound, mixed_unitary_bounds, mixture_assisted_delta, single_mode_params, Backend, Classification,
    Diagnostics, DivergenceProfile, Domain, EvalRecord, GdBound, Lattice, MonotoneConfig, MonotoneResult, ProfileConfig,
    ProfileMethod, ResultKind, GD_SAMPLE_BOX, GD_SLACK,
};
pub use family::{
    fock_cutoffs, input_family_fock, input_family_fock_with, input_family_gaussian, output_state_fock, output_state_fock_within, InputParams,
    MAX_AUTO_CUTOFF,
};
pub use optimize::{nelder_mead_max, NelderMeadOptions, NelderMeadResult};
pub use wick::{parse_word, tmsv_wick_expectation, TmsvMode, WickSymbol, MAX_WICK_LEN};
