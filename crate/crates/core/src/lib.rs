//! Timed automata whose guards are input-determined operators.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod ltl;
pub mod mso;
pub mod omega;
pub mod operators;
pub mod parse;
pub mod recursive;
pub mod symbolic;
pub mod testkit;
pub mod time;

pub use config::Config;
pub use error::{Error, Result};
pub use time::{Action, Interval, Lasso, PositionSet, Rational, TimedLasso};
