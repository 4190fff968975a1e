//! Simulation toolkit for pre- and post-selected quantum systems.
//!
//! * [`hilbert`]: dense complex linear algebra on small Hilbert spaces.
//! * [`measurement`]: ideal measurements and the Monte Carlo chain oracle.
//! * [`tsvf`]: ABL probabilities, weak values, time reversal.
//! * [`weakpointer`]: Gaussian-pointer weak measurements.
//! * [`scenarios`]: the catalog of worked examples with verdicts.
//! * [`report`]: run configuration, reports, and the CLI commands.

pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod random;
pub mod report;
pub mod scenarios;
pub mod tsvf;
pub mod weakpointer;

pub use error::{Error, Result};
