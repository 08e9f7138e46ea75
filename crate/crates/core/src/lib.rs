//! Discrete-time quantum walk in momentum space with a quadratic phase drift.
//!
//! Each step applies a Hadamard coin, a chirality-conditioned shift of the
//! momentum index and the free-drift phase e^{-i2πΩk²}. For generic Ω the
//! spreading stops (dynamical localization); for rational Ω = p/q the variance
//! grows quadratically. The [`floquet`] module builds the Floquet recursions
//! and their real five-diagonal tight-binding form.

pub mod error;
pub mod evolution;
pub mod experiment;
pub mod fit;
pub mod floquet;
pub mod observables;
pub mod phase;
pub mod state;
pub mod tolerances;

pub use error::{Result, WalkError};
pub use evolution::{
    coin_step, evolve, markov_step, phase_step, run_coherent, run_markov, shift_step, CoherentWalk, Evolver,
    MarkovWalk, ProbabilityField, StepMode, Walk,
};
pub use fit::FitResult;
pub use floquet::{AndersonCoefficients, Chirality, FloquetPair, QuasiEnergy};
pub use observables::{Observable, ObservableSeries};
pub use phase::Omega;
pub use state::{ComplexValue, InitialCondition, SpinorField, WalkParams};
