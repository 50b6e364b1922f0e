//! Two-group contests in which every player can add constructive effort to
//! their own group or sabotage it.
//!
//! Players with negative valuations want their own group to lose. The
//! crate evaluates the sabotage-aware success function, computes closed-form
//! best responses and equilibria, and certifies or refutes candidate profiles
//! by exhaustive unilateral deviation search.

pub mod best_response;
pub mod cli;
pub mod csf;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod verify;

pub use csf::{payoff, win_probability, WinProbabilities};
pub use equilibrium::{classify, solve, thresholds, Classification, EquilibriumResult, Regime, Thresholds};
pub use error::{Error, Result, ValidationError};
pub use model::{validate_spec, ContestSpec, Effort, PlayerId, RawContestSpec, StrategyProfile};
pub use verify::{best_deviation, is_epsilon_nash, refute_class, Deviation, ForbiddenClass, VerificationReport};
