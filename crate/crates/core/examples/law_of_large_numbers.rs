//! Slope of S_n before the first axis visit, against α₁α₂ − β₁β₂.
//!
//! cargo run --release --example law_of_large_numbers

use competition::analysis::{linear_diagnostics, lln_check};
use competition::rates::{Model, State, TypeIIModel};
use competition::sim::{run, Clock, Recording, StopRule};
use competition::stream::seeds_from_master;

fn main() {
    let m = TypeIIModel::new([1.0, 1.0], [3.0, 2.0], [1.0, 1.0]);
    let d = linear_diagnostics(&m);
    let model = Model::TypeII(m);
    let rule = StopRule::jumps(1_000_000).on_boundary();
    for seed in seeds_from_master(3, 10) {
        let t = run(
            &model,
            State::xy(2000, 2000),
            &rule,
            seed,
            Recording::Full,
            Clock::JumpChain,
        )
        .unwrap();
        println!("{}", lln_check(&t, &d).unwrap());
    }
}
