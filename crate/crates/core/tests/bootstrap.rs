mod common;

use common::{continuous, spec};
use disparity::inference::{bootstrap_statistic, resample_indices};
use disparity::{bootstrap, BootstrapOptions, Error, Estimator, Proposition};

#[test]
fn same_seed_same_report_different_seed_different_report() {
    let d = continuous(200, 1);
    let s = spec(&d, Proposition::P4, Estimator::Product);
    let o = BootstrapOptions {
        replicates: 50,
        seed: 3,
        stratify: false,
    };
    let a = bootstrap(&d, &s, &o).unwrap();
    let b = bootstrap(&d, &s, &o).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let c = bootstrap(&d, &s, &BootstrapOptions { seed: 4, ..o }).unwrap();
    assert_ne!(a.reduction.se, c.reduction.se);
    assert_eq!(a.failed, 0);
    assert!(a.reduction.lower <= a.reduction.upper);
}

#[test]
fn resampling_uses_every_row_roughly_once() {
    let n = 5000;
    let idx = resample_indices(n, None, 1, 0);
    let mut seen = vec![0usize; n];
    for i in idx {
        seen[i] += 1;
    }
    let unused = seen.iter().filter(|c| **c == 0).count() as f64 / n as f64;
    // about exp(-1) of rows are left out of a bootstrap sample
    assert!((unused - (-1.0f64).exp()).abs() < 0.02, "{unused}");
}

#[test]
fn failures_are_counted_then_fatal() {
    let d = continuous(100, 2);
    let o = BootstrapOptions {
        replicates: 100,
        seed: 0,
        stratify: false,
    };
    let some = bootstrap_statistic(&d, None, &o, |s| {
        if s.dense("y")?[0] > 2.0 {
            Err(Error::InvalidSpec("large first draw".into()))
        } else {
            Ok(vec![1.0])
        }
    })
    .unwrap();
    assert!(some.failed > 0 && some.failed <= 10, "{}", some.failed);
    assert_eq!(some.failure_reasons.values().sum::<usize>(), some.failed);
    let all = bootstrap_statistic(&d, None, &o, |_| -> disparity::Result<Vec<f64>> {
        Err(Error::InvalidSpec("always".into()))
    });
    assert!(matches!(all, Err(Error::TooManyFailures { failed: 100, total: 100 })));
}
