//! Exact and Monte Carlo tools for three related extremal problems: the
//! Manickam–Miklós–Singhi subset-sum problem, the Kikuta–Ruckle threshold
//! problem, and Alpern's caching game.

pub mod caching;
pub mod error;
pub mod exactnum;
pub mod kr;
pub mod mms;
pub mod solver;

pub use error::{Error, Result};
pub use exactnum::Rational;
