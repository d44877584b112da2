use competition::analysis::{
    functionals, linear_diagnostics, s_drift, symmetric_step, un_squared_one_step, urn_factor,
    urn_martingale_defect, Regime,
};
use competition::rates::{enumerate_transitions, AuxUrnModel, Model, State, TypeIIModel};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = TypeIIModel> {
    (
        (0.1f64..5.0, 0.1f64..5.0),
        (0.0f64..5.0, 0.0f64..5.0),
        (0.1f64..5.0, 0.1f64..5.0),
    )
        .prop_map(|(l, a, b)| TypeIIModel::new([l.0, l.1], [a.0, a.1], [b.0, b.1]))
}

fn interior() -> impl Strategy<Value = State> {
    (1u64..100_000, 1u64..100_000).prop_map(|(x, y)| State::xy(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn root_residuals(m in params()) {
        let d = linear_diagnostics(&m);
        let p = d.params;
        let r = d.r;
        prop_assert!(r > 0.0);
        let quad = p.beta2 * r * r + (p.alpha1 - p.alpha2) * r - p.beta1;
        prop_assert!(quad.abs() <= 1e-12 * (p.beta2 * r * r).max(p.beta1));
        let fixed = (p.beta1 + r * p.alpha2) / (p.alpha1 + r * p.beta2);
        prop_assert!((r - fixed).abs() <= 1e-12 * r);
        prop_assert!(p.alpha1 >= p.alpha2);
    }

    #[test]
    fn total_rate_and_decomposition(m in params(), s in interior()) {
        let d = linear_diagnostics(&m);
        let f = functionals(&d, s);
        let total = enumerate_transitions(&Model::TypeII(m), s).unwrap().total();
        prop_assert!((total - f.r).abs() <= 1e-12 * f.r);
        if d.regime == Regime::Supercritical {
            prop_assert!(d.k.unwrap() > 0.0 && d.l.unwrap() < 0.0);
        }
        if let (Some(k), Some(l)) = (d.k, d.l) {
            let p = d.params;
            let recon = p.lambda1 + p.lambda2 + k * f.s + l * f.t;
            let scale = f.r.max((k * f.s).abs()).max((l * f.t).abs());
            prop_assert!((recon - f.r).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn one_step_identities(m in params(), s in interior()) {
        let d = linear_diagnostics(&m);
        prop_assert!(s_drift(&d, s).unwrap().relative_error() <= 1e-9);
        let st = un_squared_one_step(&d, s).unwrap();
        prop_assert!(st.identity_error() <= 1e-9);
        let w = if d.swapped { s.swapped() } else { s };
        if w.x2 >= d.y0 {
            prop_assert!(st.remainder_positive);
            prop_assert!(st.lhs >= st.rhs_main * (1.0 - 1e-12));
        }
    }

    #[test]
    fn remainder_independent_of_x(m in params(), y in 1u64..1000, xs in prop::collection::vec(1u64..100_000, 8)) {
        let d = linear_diagnostics(&m);
        for x in xs {
            let s = State::xy(x, y);
            let w = if d.swapped { s.swapped() } else { s };
            let st = un_squared_one_step(&d, s).unwrap();
            let f = functionals(&d, s);
            let reduced = d.cubic_coeff * w.x2 as f64 + d.q3;
            let p = d.params;
            let q2 = (d.r * d.r * p.beta2 + p.alpha1) * w.x1 as f64
                + (p.beta1 + d.r * d.r * p.alpha2) * w.x2 as f64
                + p.lambda1
                + d.r * d.r * p.lambda2;
            let scale = (2.0 * f.u * d.q1).abs() + q2.abs();
            prop_assert!((st.rhs_remainder * f.r - reduced).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn symmetric_reduction(l in 0.1f64..5.0, a in 0.0f64..5.0, b in 0.1f64..5.0, s in interior()) {
        let c = symmetric_step(&TypeIIModel::symmetric(l, a, b), s).unwrap();
        prop_assert!(c.relative_error() <= 1e-12);
    }

    #[test]
    fn urn_martingale(alpha in 0.1f64..5.0, beta in 0.1f64..5.0, x in 1u64..2000, y in 1u64..2000) {
        let u = AuxUrnModel::new(alpha, beta);
        let n = x + y - 2;
        let prefix: f64 = (0..n).map(|k| urn_factor(&u, 2, k, 1.0)).product();
        prop_assert!(urn_martingale_defect(&u, 2, State::xy(x, y), n, prefix).unwrap() <= 1e-12);
    }
}

#[test]
fn reference_values() {
    let d = linear_diagnostics(&TypeIIModel::new([1.0, 1.0], [3.0, 2.0], [1.0, 1.0]));
    assert!((d.r - 0.618_033_988_749_895).abs() < 1e-15);
    assert_eq!(d.rho_tilde, 5.0);
    assert_eq!(d.y0, 1);
    let crit = linear_diagnostics(&TypeIIModel::new([1.0, 1.0], [2.0, 2.0], [1.0, 4.0]));
    assert_eq!(crit.regime, Regime::Critical);
    assert!(crit.k.is_none() && crit.l.is_none());
}
