//! EPR2 local/nonlocal decompositions of N-qubit generalized GHZ correlations.
//!
//! * [`qcore`]: quantum joint probabilities, dense and closed form.
//! * [`epr2`]: the factorized local model, the lower bound on the local
//!   content and sampled certification of the decomposition.
//! * [`bounds`]: upper bounds from Bell-type inequalities.
//! * [`cli`]: the `ghz-epr2` command-line front end.

pub mod bounds;
pub mod cli;
pub mod epr2;
pub mod error;
pub mod minimize;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{BlochDirection, GhzScenario, MeasurementContext, OutcomePattern, StateVector};
