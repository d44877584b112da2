//! Reuter's series for the symmetric linear model and immigration-death rates.
//!
//! cargo run --example reuter_series

use competition::analysis::{reuter_series, RateSequences};
use competition::rates::{Model, ReuterModel};

fn main() {
    for (alpha, beta) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.0)] {
        let rep =
            reuter_series(&RateSequences::symmetric_linear(alpha, beta, 1.0, 200), 200).unwrap();
        println!("alpha={alpha} beta={beta}\n{rep}\n");
    }
    let imm = Model::Reuter(ReuterModel::immigration_death(1.0, 1.0, 1.0, 1.0, 1.0));
    let rep = reuter_series(&RateSequences::from_model(&imm, 200).unwrap(), 200).unwrap();
    println!("immigration-death\n{rep}");
}
