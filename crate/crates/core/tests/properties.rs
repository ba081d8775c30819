mod common;

use common::spec;
use disparity::inference::{proportion_reduced, ProportionScale};
use disparity::synthetic::{generate, CovariateEquation, StructuralParams};
use disparity::{decompose, Estimator, Proposition};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = StructuralParams> {
    (
        0.2f64..0.8,
        prop::array::uniform6(-1.5f64..1.5),
        prop::array::uniform3(0.3f64..2.0),
        prop::option::of(prop::array::uniform3(-0.5f64..0.5)),
    )
        .prop_map(|(g, b, sd, cov)| StructuralParams {
            group_prevalence: g,
            x_group: b[0],
            m_group: b[1],
            m_early: b[2],
            y_group: b[3],
            y_early: b[4],
            y_target: b[5],
            x_sd: sd[0],
            m_sd: sd[1],
            y_sd: sd[2],
            covariate: cov.map(|c| CovariateEquation {
                prevalence: 0.5,
                on_early: c[0],
                on_target: c[1],
                on_outcome: c[2],
            }),
            ..Default::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimators_add_up_and_agree(p in params(), seed in 0u64..1000) {
        let d = generate(&p, 300, seed).unwrap();
        for prop in Proposition::BASE {
            let a = decompose(&d, &spec(&d, prop, Estimator::Successive)).unwrap();
            let b = decompose(&d, &spec(&d, prop, Estimator::Product)).unwrap();
            let c = decompose(&d, &spec(&d, prop, Estimator::Successive).with_interactions(true)).unwrap();
            for e in [&a, &b, &c] {
                prop_assert!((e.residual + e.reduction - e.initial).abs() < 1e-10);
            }
            let scale = a.initial.abs().max(1e-8);
            prop_assert!((a.reduction - b.reduction).abs() / scale < 1e-8);
        }
    }

    #[test]
    fn shifting_the_outcome_changes_nothing(p in params(), shift in -50.0f64..50.0) {
        let d = generate(&p, 200, 1).unwrap();
        let y: Vec<Option<f64>> = d.dense("y").unwrap().into_iter().map(|v| Some(v + shift)).collect();
        let moved = d.with_column("y", y).unwrap();
        for prop in Proposition::BASE {
            let a = decompose(&d, &spec(&d, prop, Estimator::Product)).unwrap();
            let b = decompose(&moved, &spec(&moved, prop, Estimator::Product)).unwrap();
            prop_assert!((a.reduction - b.reduction).abs() < 1e-9 * (1.0 + a.reduction.abs()));
        }
    }

    #[test]
    fn proportion_is_linear_in_residual(initial in -5.0f64..5.0, residual in -5.0f64..5.0) {
        prop_assume!(initial.abs() > 1e-6);
        let p = proportion_reduced(initial, residual, ProportionScale::Additive).unwrap();
        prop_assert!((p * initial - (initial - residual)).abs() < 1e-9);
    }
}
