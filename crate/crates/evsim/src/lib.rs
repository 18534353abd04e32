//! Hourly agent-based simulation of residential EV adoption and its impact
//! on a distribution transformer and on charging CO2-eq emissions.
//!
//! The pipeline: a logistic adoption curve (national or local) is realized
//! as household-level adoption events, each EV follows an inferred daily
//! driving pattern and the Traditional charging strategy, loads aggregate at
//! the transformer, and emissions are accounted against a repeating,
//! decaying carbon-intensity series. Runs are deterministic per seed.

pub mod adoption;
pub mod charging;
pub mod driving;
pub mod emissions;
pub mod engine;
pub mod error;
pub mod fleet;
pub mod grid;
pub mod io;
pub mod timeutil;

pub use error::{Result, SimError};
