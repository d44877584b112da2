//! Drift certificates on the strips next to the axis.
//!
//! cargo run --release --example lyapunov_certificate

use competition::lyapunov::{certify, leading_order, LogLyapunov, LyapunovFunction, PowerLyapunov};
use competition::rates::{Model, TypeIIModel, TypeIModel};

fn main() {
    let cases = [
        (
            Model::TypeI(TypeIModel::lotka_volterra()),
            LyapunovFunction::Power(PowerLyapunov::new(0.3, 0.6)),
            vec![0, 1],
        ),
        (
            Model::TypeII(TypeIIModel::ok_corral([1.0, 1.0], [1.0, 1.0])),
            LyapunovFunction::Log(LogLyapunov::new(1.0, 1.0)),
            vec![0, 1, 2],
        ),
    ];
    for (model, f, levels) in cases {
        let rep = certify(&model, f.as_test_function(), &levels, 1_000_000).expect("scan");
        println!("{} model\n{rep}", model.name());
        for y in levels {
            let t = leading_order(&model, &f, y).expect("known pair");
            println!(
                "  y={y}: G f ~ {} x^{} (ln x)^{}",
                t.coefficient, t.power, t.log_power
            );
        }
        println!();
    }
}
