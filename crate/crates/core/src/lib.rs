//! Wave packets on the circle: truncated angular-momentum states, operator
//! matrices, uncertainty moments, circular squeezed states, the squeezed-state
//! pencil and the phase/modulus variational problem.

pub mod bessel;
pub mod css;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod operators;
pub mod optim;
pub mod pencil;
pub mod phase;
pub mod run;
pub mod spectral;
pub mod state;

pub use css::{css_moments, css_state, CssParams};
pub use error::{Error, Result};
pub use moments::{delta_phi_p, moments, relation_margins, MomentReport, Relation, RelationMargin};
pub use operators::{build, build_square, commutator, OperatorId, OperatorMatrix};
pub use pencil::{
    quantization_scan, solve_pencil, uncertainty_floor, Family, PencilProblem, PencilSolution,
    QuantizationScan,
};
pub use phase::{delta_l_of, f_table, minimize_phase, FTable, ModulusProfile, PhaseProfile};
pub use run::{run, Command, OutputFormat, RunConfig, RunOutcome};
pub use state::{grid_for, AngularState, GridFunction, ModeWindow, Projection};
