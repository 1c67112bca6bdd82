use nacopula::oracle::fd_density;
use nacopula::{cdf, fit2, log_density, logpdf3, nll, parse, sample_nested, Error};

#[test]
fn density_agrees_with_finite_differences_of_cdf() {
    let tree = parse("C(0.8; 1, C(2.5; 2, 3), 4)").unwrap();
    let u = [0.35, 0.6, 0.45, 0.7];
    let ld = log_density(&tree, &u).unwrap();
    let fd = fd_density(&tree, &u).unwrap();
    assert!((ld.value.exp() / fd - 1.0).abs() < 1e-5, "{} vs {fd}", ld.value.exp());
    assert!(cdf(&tree, &u).unwrap().value < 0.35);
}

#[test]
fn three_level_matches_generic_entry_point() {
    let tree = parse("G(1.2; 1, G(1.6; 2, G(2.4; 3, 4)), 5)").unwrap();
    let u = [0.2, 0.5, 0.55, 0.6, 0.9];
    let a = logpdf3(&tree, &u).unwrap().value;
    let b = log_density(&tree, &u).unwrap().value;
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn sample_fit_round_trip() {
    let truth = parse("G(1.5; 1, G(2.5; 2, 3, 4))").unwrap();
    let data = sample_nested(&truth, 1500, 11).unwrap();
    let fit = fit2(&truth, &data, [1.2, 1.8]).unwrap();
    assert!(fit.converged);
    assert!((fit.theta_hat[0] - 1.5).abs() < 0.15, "{:?}", fit.theta_hat);
    assert!((fit.theta_hat[1] - 2.5).abs() < 0.25, "{:?}", fit.theta_hat);
    assert!(fit.nll_min <= nll(&truth, [1.5, 2.5], &data).unwrap() + 1e-9);
}

#[test]
fn errors_are_typed() {
    assert!(matches!(parse("G(1.5; 1, G(2; 2, 3"), Err(Error::Parse { .. })));
    let tree = parse("G(1.5; 1, G(2; 2, 3))").unwrap();
    assert!(matches!(log_density(&tree, &[0.5, 0.0, 0.5]), Err(Error::Boundary { .. })));
    assert!(matches!(sample_nested(&parse("J(2; 1, J(3; 2, 3))").unwrap(), 3, 1), Err(Error::Unsupported(_))));
}
