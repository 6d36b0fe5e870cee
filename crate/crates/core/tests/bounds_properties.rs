use drocc::ambiguity::AmbiguitySpec;
use drocc::bounds::{independent_candidate, lower_bound, upper_bound};
use drocc::problem::make_synthetic_1d_instance;
use drocc::tdist::t_critical;

#[test]
fn bounds_are_bit_reproducible() {
    let inst = make_synthetic_1d_instance::<f64>();
    let spec = AmbiguitySpec::SimplexOnly;
    let a = lower_bound(&inst, &spec, 24, 6, 0.05, 77).unwrap();
    let b = lower_bound(&inst, &spec, 24, 6, 0.05, 77).unwrap();
    assert_eq!(a, b);
    let x = independent_candidate(&inst, &spec, 24, 77).unwrap();
    let u = upper_bound(&inst, &spec, &x, 24, 6, 0.05, 77).unwrap();
    assert_eq!(u, upper_bound(&inst, &spec, &x, 24, 6, 0.05, 77).unwrap());
}

#[test]
fn smaller_alpha_widens_margin() {
    let inst = make_synthetic_1d_instance::<f64>();
    let spec = AmbiguitySpec::SimplexOnly;
    let wide = lower_bound(&inst, &spec, 24, 8, 0.01, 3).unwrap();
    let narrow = lower_bound(&inst, &spec, 24, 8, 0.10, 3).unwrap();
    assert_eq!(wide.mean, narrow.mean);
    assert!(wide.bound <= narrow.bound);
    let mut prev = f64::INFINITY;
    for alpha in [0.01, 0.025, 0.05, 0.1, 0.2, 0.4] {
        let t = t_critical(alpha, 9).unwrap();
        assert!(t < prev);
        prev = t;
    }
}

#[test]
fn lower_replicates_sit_below_upper_replicates() {
    let inst = make_synthetic_1d_instance::<f64>();
    let spec = AmbiguitySpec::SimplexOnly;
    let mut violations = 0;
    // Small batches make the optimization bias of the sampled minimum visible
    // above the replicate noise.
    let (n, m) = (8, 10);
    for seed in 0..20 {
        let x = independent_candidate(&inst, &spec, n, seed).unwrap();
        let up = upper_bound(&inst, &spec, &x, n, m, 0.05, seed).unwrap();
        let lo = lower_bound(&inst, &spec, n, m, 0.05, seed).unwrap();
        if lo.mean > up.mean {
            violations += 1;
        }
    }
    assert!(violations <= 2, "{violations} sandwich violations");
}
