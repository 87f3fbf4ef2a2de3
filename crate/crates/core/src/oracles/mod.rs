//! Exact solutions, error norms, refinement studies and the acceptance battery.

pub mod battery;
pub mod convergence;
pub mod exact;
pub mod norms;

pub use battery::{run_battery, CriterionResult, CRITERIA};
pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable, Scheme, Study};
pub use exact::{
    burgers_characteristics, burgers_riemann, Characteristics, ExactSolution, Profile, RiemannBurgers, SineBurgers,
    SineProfile,
};
pub use norms::{cell_errors, error_norms, sample_errors, shock_distance, ErrorNorms, PointErrors};
