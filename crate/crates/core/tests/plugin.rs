mod common;

use common::spec;
use disparity::data::Role;
use disparity::plugin::plugin_mu;
use disparity::synthetic::{generate, ConfounderEquation, CovariateEquation, GeneratorMode, StructuralParams};
use disparity::{decompose, Dataset, Error, Estimator, Proposition};

/// Cells `(r, x, m, count)`; group-1 outcome 1 + 10x + 3m, group-0 outcome 2x + m.
fn hand_table() -> Dataset {
    let cells = [
        (0, 0, 0, 3),
        (0, 0, 1, 1),
        (0, 1, 0, 2),
        (0, 1, 1, 4),
        (1, 0, 0, 3),
        (1, 0, 1, 3),
        (1, 1, 0, 1),
        (1, 1, 1, 3),
    ];
    let (mut r, mut x, mut m, mut y) = (vec![], vec![], vec![], vec![]);
    for (rv, xv, mv, n) in cells {
        for _ in 0..n {
            let (rv, xv, mv) = (rv as f64, xv as f64, mv as f64);
            r.push(rv);
            x.push(xv);
            m.push(mv);
            y.push(if rv == 1.0 { 1.0 + 10.0 * xv + 3.0 * mv } else { 2.0 * xv + mv });
        }
    }
    Dataset::from_dense(vec![("r", r), ("x", x), ("m", m), ("y", y)])
        .unwrap()
        .with_role(Role::Outcome, &["y"])
        .unwrap()
        .with_role(Role::Group, &["r"])
        .unwrap()
        .with_role(Role::Early, &["x"])
        .unwrap()
        .with_role(Role::Target, &["m"])
        .unwrap()
}

#[test]
fn hand_computed_standardization() {
    let d = hand_table();
    // (proposition, x*, residual, reduction) worked out from the cell counts
    let cases = [
        (Proposition::P1, None, 7.25, -2.15),
        (Proposition::P2, Some(1.0), 13.0 - 16.0 / 6.0, 0.25),
        (Proposition::P2, None, 6.25 - (0.15 + 0.4 * 16.0 / 6.0), 0.55),
        (Proposition::P3, None, 6.8, -1.7),
        (Proposition::P4, None, 4.8, 0.3),
    ];
    for (p, x_star, residual, reduction) in cases {
        let e = plugin_mu(&d, &spec(&d, p, Estimator::Plugin).with_conditioning_x(x_star)).unwrap();
        assert!((e.residual - residual).abs() < 1e-12, "{p} {x_star:?}: {} vs {residual}", e.residual);
        assert!((e.reduction - reduction).abs() < 1e-12, "{p} {x_star:?}: {} vs {reduction}", e.reduction);
    }
}

fn confounded_data(seed: u64) -> Dataset {
    let p = StructuralParams {
        x_intercept: 0.3,
        x_group: 0.2,
        m_intercept: 0.2,
        m_group: 0.2,
        m_early: 0.1,
        y_group: -0.5,
        y_early: 0.4,
        y_target: 0.7,
        mode: GeneratorMode::BinaryXm,
        confounder: Some(ConfounderEquation {
            intercept: 0.3,
            group: 0.2,
            early: 0.2,
            sd: 0.0,
            on_target: 0.2,
            on_outcome: 0.9,
        }),
        covariate: Some(CovariateEquation {
            prevalence: 0.5,
            on_early: 0.1,
            on_target: 0.1,
            on_outcome: 0.3,
        }),
        ..Default::default()
    };
    generate(&p, 4000, seed).unwrap()
}

#[test]
fn p7_matches_enumeration_over_confounder() {
    let d = confounded_data(1);
    let names = ["r", "x", "m", "l", "c", "y"];
    let cols: Vec<Vec<f64>> = names.iter().map(|n| d.dense(n).unwrap()).collect();
    let n = d.n_rows();
    let a = f64::NAN;
    // pattern over (r, x, m, l, c); NaN matches anything
    let tally = |pat: [f64; 5]| -> (f64, f64) {
        let mut cnt = 0.0;
        let mut sum = 0.0;
        for i in 0..n {
            if (0..5).all(|k| pat[k].is_nan() || cols[k][i] == pat[k]) {
                cnt += 1.0;
                sum += cols[5][i];
            }
        }
        (cnt, sum)
    };
    let p = |ev: [f64; 5], given: [f64; 5]| tally(ev).0 / tally(given).0;
    let mean = |pat: [f64; 5]| {
        let (c, s) = tally(pat);
        s / c
    };
    let n1 = tally([1.0, a, a, a, a]).0;
    let (mut mu, mut m0, mut m1) = (0.0, 0.0, 0.0);
    for c in [0.0, 1.0] {
        let w = tally([1.0, a, a, a, c]).0 / n1;
        let mut s = 0.0;
        for x in [0.0, 1.0] {
            for m in [0.0, 1.0] {
                for l in [0.0, 1.0] {
                    s += p([1.0, x, a, a, c], [1.0, a, a, a, c])
                        * p([0.0, a, m, a, c], [0.0, a, a, a, c])
                        * p([1.0, x, a, l, c], [1.0, x, a, a, c])
                        * mean([1.0, x, m, l, c]);
                }
            }
        }
        mu += w * s;
        m0 += w * mean([0.0, a, a, a, c]);
        m1 += w * mean([1.0, a, a, a, c]);
    }
    let e = decompose(&d, &spec(&d, Proposition::P7, Estimator::Plugin)).unwrap();
    assert!((e.residual - (mu - m0)).abs() < 1e-12);
    assert!((e.reduction - (m1 - mu)).abs() < 1e-12);
    // the confounder matters here, so P7 differs from P4
    let p4 = decompose(&d, &spec(&d, Proposition::P4, Estimator::Plugin)).unwrap();
    assert!((p4.residual - e.residual).abs() > 1e-6);
}

#[test]
fn equal_distributions_remove_nothing() {
    // both groups share identical (x, m) cell counts; outcomes differ
    let mut r = vec![];
    let mut x = vec![];
    let mut m = vec![];
    let mut y = vec![];
    for g in [0.0, 1.0] {
        for (xv, mv, count) in [(0.0, 0.0, 4), (0.0, 1.0, 2), (1.0, 0.0, 3), (1.0, 1.0, 5)] {
            for k in 0..count {
                r.push(g);
                x.push(xv);
                m.push(mv);
                y.push(g * 2.0 + xv - mv + k as f64 * 0.1);
            }
        }
    }
    let d = Dataset::from_dense(vec![("r", r), ("x", x), ("m", m), ("y", y)])
        .unwrap()
        .with_role(Role::Outcome, &["y"])
        .unwrap()
        .with_role(Role::Group, &["r"])
        .unwrap()
        .with_role(Role::Early, &["x"])
        .unwrap()
        .with_role(Role::Target, &["m"])
        .unwrap();
    // P4 also severs the x-m association inside group 1, so only P1-P3 apply
    for p in [Proposition::P1, Proposition::P2, Proposition::P3] {
        let e = plugin_mu(&d, &spec(&d, p, Estimator::Plugin)).unwrap();
        assert!(e.reduction.abs() < 1e-12, "{p}: {}", e.reduction);
    }
}

#[test]
fn relabeling_levels_changes_nothing() {
    let d = confounded_data(2);
    let relabel = |name: &str, f: fn(f64) -> f64| -> Vec<Option<f64>> {
        d.dense(name).unwrap().into_iter().map(|v| Some(f(v))).collect()
    };
    let moved = d
        .with_column("x", relabel("x", |v| 3.0 + 4.0 * v))
        .unwrap()
        .with_column("m", relabel("m", |v| 5.0 - 6.0 * v))
        .unwrap()
        .with_column("c", relabel("c", |v| 10.0 * v))
        .unwrap();
    for p in Proposition::ALL {
        let a = decompose(&d, &spec(&d, p, Estimator::Plugin)).unwrap();
        let b = decompose(&moved, &spec(&moved, p, Estimator::Plugin)).unwrap();
        assert!((a.residual - b.residual).abs() < 1e-12, "{p}");
        assert!((a.reduction - b.reduction).abs() < 1e-12, "{p}");
    }
}

#[test]
fn missing_group1_cell_is_reported() {
    let d = hand_table();
    let keep: Vec<usize> = (0..d.n_rows())
        .filter(|&i| {
            let v = |n: &str| d.column(n).unwrap()[i].unwrap();
            !(v("r") == 1.0 && v("x") == 1.0 && v("m") == 0.0)
        })
        .collect();
    let d = d.take_rows(&keep);
    match plugin_mu(&d, &spec(&d, Proposition::P3, Estimator::Plugin)) {
        Err(Error::EmptyStratum { cell }) => assert!(cell.contains("r=1") && cell.contains("x=1"), "{cell}"),
        other => panic!("expected an empty stratum, got {other:?}"),
    }
}

#[test]
fn continuous_early_variable_is_refused() {
    let d = common::continuous(200, 1);
    match plugin_mu(&d, &spec(&d, Proposition::P1, Estimator::Plugin)) {
        Err(Error::TooManyLevels { column, limit, .. }) => {
            assert_eq!(column, "x");
            assert_eq!(limit, 20);
        }
        other => panic!("expected too many levels, got {other:?}"),
    }
}
