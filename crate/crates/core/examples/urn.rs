//! The auxiliary urn with α = 5, β = 1: a sample path of Z_n and the exact
//! second moment of U_n = X_n − Y_n.
//!
//! cargo run --release --example urn > urn.csv

use competition::analysis::{urn_moment_recursion, urn_simulate};
use competition::rates::{AuxUrnModel, State};

fn main() {
    let u = AuxUrnModel::new(5.0, 1.0);
    let d = urn_simulate(&u, State::xy(1, 1), 10_000, 42).unwrap();
    eprintln!("{d}");
    let m = urn_moment_recursion(&u, State::xy(1, 1), 1_000_000).unwrap();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        eprintln!("n={n:>8} n^(-2rho) E[U_n^2] = {:.6}", m.scaled_second(n));
    }
    d.write_csv(std::io::stdout().lock()).unwrap();
}
