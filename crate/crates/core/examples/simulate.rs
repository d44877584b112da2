//! One Lotka-Volterra trajectory from (20, 20): prints the first axis visit
//! and the tail of the path.
//!
//! cargo run --example simulate -- [seed]

use competition::rates::{State, TypeIModel};
use competition::sim::{simulate, Recording, StopRule};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let model = TypeIModel::lotka_volterra().into();
    let t = simulate(
        &model,
        State::xy(20, 20),
        &StopRule::jumps(50_000),
        seed,
        Recording::Full,
    )
    .expect("simulation");
    println!("{}", t.summary());
    for e in t.events.iter().rev().take(10).rev() {
        println!("n={:>6} t={:>10.4} {}", e.n, e.time, e.state);
    }
}
