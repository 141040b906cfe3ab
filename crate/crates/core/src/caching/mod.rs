//! Alpern's caching game with two nuts, both of which must be found.

pub mod bounds;
pub mod io;
pub mod model;
pub mod payoff;
pub mod strategies;

pub use bounds::{
    best_discretelimit_bound, best_known_upper_bound, bound_uniform_simplex, discretelimit_bound,
    discretelimitthm_bound, summary_table, table_2_2_4, table_2_2_4_rows, Status, SummaryEntry,
};
pub use model::{Continuation, DepthPair, DigPlan, GameParams, HiderPairMix, Probe};
pub use payoff::{pair_payoff, placement_events, plan_wins, win_units, PlacementEvent};
pub use strategies::{
    hider_19_7_mixture, hider_5_2_strategy, hider_lattice_mix, hider_small_h_strategy, hider_stacked,
    largeh_value, searcher_integer_h_value, Case19_7, IntegerHStrategy, LargeHStrategy, SmallH,
};
