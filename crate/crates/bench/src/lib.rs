//! Shared fixtures for the benchmarks.

use adiakit::models::{CouplingAxis, Example1, Example2, Example2Params};

pub fn example1() -> Example1 {
    Example1::default()
}

pub fn example2(axis: CouplingAxis) -> Example2 {
    Example2::new(Example2Params::with_coupling(axis)).expect("default parameters are valid")
}
