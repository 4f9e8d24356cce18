//! The two nontrivial SU(2)-invariant Cayley fibrations: the completely
//! integrable one from the SO(3) x Id_2 action (level sets of a first
//! integral) and the phase-portrait one from the Sp(1) x Id_1 action.

pub mod so3;
pub mod sp1;

pub use so3::{
    asymptotic_cone_so3, classify_so3, conserved_f, h_primitive, multi_moment_so3, ode_rhs_so3,
    singular_model_so3, smooth_model_so3, theorem_residuals_so3, trace_level_set, u_min_locus,
    u_of_alpha, ConeEnd, ConeReport, FibreCurveSO3, SO3FibreParams, So3Topology,
};
pub use sp1::{
    alpha_c, beta_c, classify_sp1, cone_fit_sp1, f1_f2, integrate_fibre, multi_moment_sp1,
    restricted_metric_sp1, trace_fibre, verify_cayley_sp1, Direction, FibreCurveSp1,
    IntegrateOptions, Sp1ConeEnd, Sp1Event, Sp1PhaseState, Sp1Topology,
};
