mod common;

use common::{col, continuous, replace, residualize, spec};
use disparity::regression::{fit_ols, DesignMatrix};
use disparity::oaxaca::{oaxaca_decompose, ObMode, ObOptions, ReferenceCoefficients};
use disparity::synthetic::{generate, ConfounderEquation, StructuralParams};
use disparity::{decompose, Error, Estimator, Proposition};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn group_means(d: &disparity::Dataset, name: &str) -> (f64, f64) {
    let (r, v) = (col(d, "r"), col(d, name));
    let mut s = [0.0; 2];
    let mut n = [0.0; 2];
    for i in 0..r.len() {
        s[r[i] as usize] += v[i];
        n[r[i] as usize] += 1.0;
    }
    (s[0] / n[0], s[1] / n[1])
}

#[test]
fn marginal_gap_is_reproduced() {
    let d = continuous(400, 1);
    let ob = oaxaca_decompose(&d, "y", "r", &names(&["x", "m"]), &[], &ObOptions::default()).unwrap();
    let (y0, y1) = group_means(&d, "y");
    assert_eq!(ob.mode, ObMode::Marginal);
    assert!((ob.total_gap - (y1 - y0)).abs() < 1e-12);
    assert!((ob.explained + ob.unexplained - ob.total_gap).abs() < 1e-12);
    // explained part: group-1 slopes times raw mean gaps
    let g1: Vec<usize> = (0..d.n_rows()).filter(|&i| col(&d, "r")[i] == 1.0).collect();
    let sub = d.take_rows(&g1);
    let x = DesignMatrix::intercept(g1.len())
        .with_column("x", &col(&sub, "x"))
        .unwrap()
        .with_column("m", &col(&sub, "m"))
        .unwrap();
    let slopes = fit_ols(&x, &col(&sub, "y")).unwrap();
    let (x0, x1) = group_means(&d, "x");
    let (m0, m1) = group_means(&d, "m");
    assert!((ob.explained_for("x").unwrap() - slopes.coef("x").unwrap() * (x1 - x0)).abs() < 1e-12);
    assert!((ob.explained_for("m").unwrap() - slopes.coef("m").unwrap() * (m1 - m0)).abs() < 1e-12);
}

#[test]
fn equal_means_explain_nothing() {
    let d = continuous(400, 2);
    let x = residualize(&col(&d, "x"), &[&col(&d, "r")]);
    let d = replace(&d, "x", &x);
    let ob = oaxaca_decompose(&d, "y", "r", &names(&["x"]), &[], &ObOptions::default()).unwrap();
    assert!(ob.explained.abs() < 1e-12);
}

#[test]
fn shared_coefficients_leave_nothing_unexplained() {
    let d = continuous(400, 3);
    let x = col(&d, "x");
    let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v).collect();
    let d = replace(&d, "y", &y);
    for reference in [ReferenceCoefficients::Group1, ReferenceCoefficients::Group0] {
        let opts = ObOptions {
            reference,
            ..Default::default()
        };
        let ob = oaxaca_decompose(&d, "y", "r", &names(&["x"]), &[], &opts).unwrap();
        assert!(ob.unexplained.abs() < 1e-10);
        assert!((ob.explained - ob.total_gap).abs() < 1e-10);
    }
}

#[test]
fn reference_choice_moves_mass_but_keeps_total() {
    let d = continuous(400, 4);
    let run = |reference| {
        let opts = ObOptions {
            reference,
            ..Default::default()
        };
        oaxaca_decompose(&d, "y", "r", &names(&["x", "m"]), &names(&["c"]), &opts).unwrap()
    };
    let a = run(ReferenceCoefficients::Group1);
    let b = run(ReferenceCoefficients::Group0);
    assert_eq!(a.mode, ObMode::Conditional);
    assert!((a.total_gap - b.total_gap).abs() < 1e-12);
    assert!((a.explained - b.explained).abs() > 1e-6);
    assert!((b.explained + b.unexplained - b.total_gap).abs() < 1e-12);
}

#[test]
fn explanatory_order_is_irrelevant() {
    let d = continuous(400, 5);
    let o = ObOptions::default();
    let a = oaxaca_decompose(&d, "y", "r", &names(&["x", "m"]), &names(&["c"]), &o).unwrap();
    let b = oaxaca_decompose(&d, "y", "r", &names(&["m", "x"]), &names(&["c"]), &o).unwrap();
    for v in ["x", "m"] {
        assert!((a.explained_for(v).unwrap() - b.explained_for(v).unwrap()).abs() < 1e-12);
    }
    assert!((a.unexplained - b.unexplained).abs() < 1e-12);
}

#[test]
fn p3_via_oaxaca_splits_the_conditional_gap() {
    let d = continuous(400, 6);
    let s = spec(&d, Proposition::P3, Estimator::Successive).with_interactions(true);
    let e = decompose(&d, &s).unwrap();
    let ob = oaxaca_decompose(&d, "y", "r", &names(&["x", "m"]), &names(&["c"]), &ObOptions::default()).unwrap();
    assert!((e.reduction - ob.explained).abs() < 1e-12);
    assert!((e.residual - ob.unexplained).abs() < 1e-12);
}

#[test]
fn confounder_binding_is_refused() {
    let p = StructuralParams {
        confounder: Some(ConfounderEquation {
            intercept: 0.0,
            group: 0.5,
            early: 0.3,
            sd: 1.0,
            on_target: 0.4,
            on_outcome: 0.2,
        }),
        ..Default::default()
    };
    let d = generate(&p, 200, 1).unwrap();
    let s = spec(&d, Proposition::P2, Estimator::Successive).with_interactions(true);
    assert!(matches!(decompose(&d, &s), Err(Error::TimeDependentConfounding)));
}
