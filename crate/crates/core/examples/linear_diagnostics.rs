//! Constants of the linear model and the exact one-step identities at a
//! few states.
//!
//! cargo run --example linear_diagnostics

use competition::analysis::{functionals, linear_diagnostics, s_drift, un_squared_one_step};
use competition::rates::{State, TypeIIModel};

fn main() {
    let d = linear_diagnostics(&TypeIIModel::new([1.0, 1.0], [3.0, 2.0], [1.0, 1.0]));
    println!("{d}\n");
    for s in [State::xy(1, 1), State::xy(40, 7), State::xy(1000, 1000)] {
        let f = functionals(&d, s);
        let drift = s_drift(&d, s).unwrap();
        let step = un_squared_one_step(&d, s).unwrap();
        println!(
            "{s}: R={} S={} T={} U={:.4} | E dS = {:.12} vs {:.12} | E U'^2 = {:.6} = {:.6} + {:.6}",
            f.r, f.s, f.t, f.u, drift.enumerated, drift.formula, step.lhs, step.rhs_main, step.rhs_remainder
        );
    }
}
