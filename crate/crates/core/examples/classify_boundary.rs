//! Which axis wins and how high the loser climbs after burn-in.
//!
//! cargo run --release --example classify_boundary -- [runs]

use competition::analysis::classify;
use competition::rates::{Model, State, TypeIIModel, TypeIModel};
use competition::sim::{par_map_seeds, run, Clock, Recording, StopRule};
use competition::stream::seeds_from_master;

fn main() {
    let runs = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    let models = [
        ("lotka-volterra", Model::TypeI(TypeIModel::lotka_volterra())),
        (
            "linear",
            Model::TypeII(TypeIIModel::new([1.0, 1.0], [2.0, 2.0], [1.0, 1.0])),
        ),
        (
            "ok-corral",
            Model::TypeII(TypeIIModel::ok_corral([1.0, 1.0], [1.0, 1.0])),
        ),
    ];
    let rule = StopRule::jumps(100_000);
    for (name, model) in &models {
        println!("{name}");
        let seeds = seeds_from_master(2024, runs);
        let out = par_map_seeds(&seeds, |seed| {
            let t = run(
                model,
                State::xy(1, 1),
                &rule,
                seed,
                Recording::default(),
                Clock::Continuous,
            )
            .unwrap();
            classify(model, &t, 0.5).unwrap()
        });
        for c in out {
            println!("  {c}");
        }
    }
}
