//! Experiment harness for the robust G-MUSIC pipeline: configuration,
//! Monte Carlo runners and CSV output. The `rgmusic` binary is a thin clap
//! front end over [`runners`].

pub mod config;
pub mod csvout;
pub mod runners;
