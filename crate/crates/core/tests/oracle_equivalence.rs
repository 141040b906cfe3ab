//! Randomized agreement between the exact kernels and direct enumeration.

mod common;

const INSTANCES: usize = 250;

#[test]
fn subset_sum_distribution_matches_enumeration() {
    common::check_subset_sum_distribution(INSTANCES, 1).unwrap();
}

#[test]
fn mms_value_matches_enumeration() {
    common::check_mms_value(INSTANCES, 2).unwrap();
}

#[test]
fn kr_general_value_matches_enumeration() {
    common::check_kr_general_value(INSTANCES, 3).unwrap();
}

#[test]
fn pair_payoff_matches_enumeration() {
    common::check_pair_payoff(INSTANCES, 4).unwrap();
}
