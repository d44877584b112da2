use competition::rates::{
    enumerate_transitions, AuxUrnModel, Model, State, TypeIIModel, TypeIModel,
};
use competition::sim::step;
use competition::stream::Stream;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: usize = 200_000;

/// Chi-square goodness of fit of the simulated move at `s` against the
/// enumerated rates, plus the holding-time mean against `1/total`.
fn check_state(model: &Model, s: State, seed: u64) {
    let list = enumerate_transitions(model, s).unwrap();
    let mut counts = vec![0usize; list.len()];
    let mut hold_sum = 0.0;
    let mut rng = Stream::new(seed);
    for _ in 0..DRAWS {
        let (hold, next) = step(model, s, &mut rng).unwrap();
        hold_sum += hold;
        let i = list.iter().position(|t| t.target == next).unwrap();
        counts[i] += 1;
    }
    let stat: f64 = list
        .iter()
        .zip(&counts)
        .map(|(t, &c)| {
            let e = DRAWS as f64 * t.rate / list.total();
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = (list.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(0.999);
    assert!(
        stat < critical,
        "{} at {s}: chi2 = {stat}, critical {critical}",
        model.name()
    );

    // mean of an exponential: sd equals mean
    let mean = hold_sum / DRAWS as f64;
    let expected = 1.0 / list.total();
    assert!((mean - expected).abs() < 4.0 * expected / (DRAWS as f64).sqrt());
}

#[test]
fn moves_at_one_one() {
    check_state(&TypeIModel::lotka_volterra().into(), State::xy(1, 1), 1);
    check_state(
        &TypeIIModel::new([1.0, 2.0], [0.5, 1.5], [2.0, 0.7]).into(),
        State::xy(1, 1),
        2,
    );
    check_state(&AuxUrnModel::new(5.0, 1.0).into(), State::xy(1, 1), 3);
}

#[test]
fn moves_on_the_axes() {
    check_state(&TypeIModel::lotka_volterra().into(), State::xy(4, 0), 4);
    check_state(
        &TypeIIModel::symmetric(1.0, 2.0, 1.0).into(),
        State::xy(0, 9),
        5,
    );
}
