//! Property suites for the algebraic and lattice invariants.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn pick(points in points_strategy()) {
        pick_relation(&points)?;
    }

    #[test]
    fn euler((e, terms) in form_strategy()) {
        euler_relation(e, &terms)?;
    }

    #[test]
    fn divide_round_trips(a in poly_strategy(), b in poly_strategy()) {
        divide_round_trip(&a, &b)?;
    }

    #[test]
    fn planted_double_roots((r, g) in planted_strategy()) {
        planted_univariate(r, &g)?;
    }

    #[test]
    fn planted_singular_sections(which in 0usize..5, seed in any::<u64>()) {
        planted_section(which, seed)?;
    }

    #[test]
    fn sylvester_equals_macaulay((a, b) in binary_pair_strategy()) {
        sylvester_macaulay(&a, &b)?;
    }
}
