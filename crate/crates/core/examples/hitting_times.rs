//! Monte Carlo first axis-hitting times from a few starting points.
//!
//! cargo run --release --example hitting_times

use competition::analysis::hitting_stats;
use competition::rates::{Model, State, TypeIIModel, TypeIModel};
use competition::stream::seeds_from_master;

fn main() {
    let seeds = seeds_from_master(7, 200);
    let starts = [State::xy(10, 10), State::xy(50, 50), State::xy(100, 100)];
    let models = [
        ("lotka-volterra", Model::TypeI(TypeIModel::lotka_volterra())),
        (
            "supercritical",
            Model::TypeII(TypeIIModel::new([1.0, 1.0], [2.0, 2.0], [1.0, 1.0])),
        ),
        (
            "subcritical",
            Model::TypeII(TypeIIModel::new([1.0, 1.0], [1.0, 1.0], [2.0, 2.0])),
        ),
    ];
    for (name, m) in &models {
        println!("{name}");
        for h in hitting_stats(m, &starts, &seeds, 10_000_000).unwrap() {
            println!("  {h}");
        }
    }
}
