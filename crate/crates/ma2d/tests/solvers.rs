//! Cross-method behavior on the benchmark problems at desk scale.

use ma2d::bench::{run_solve, Method};
use ma2d::methods::{euler_default_cap, MethodConfig};

#[test]
fn newton_and_slack_methods_agree_on_smooth_problem() {
    let cfg = MethodConfig::default();
    let (_, newton) = run_solve(Method::ANewton, 1, 31, &cfg).unwrap();
    let (_, slack) = run_solve(Method::B, 1, 31, &cfg).unwrap();
    let (_, damped) = run_solve(Method::C, 1, 31, &cfg).unwrap();
    // Three independent discretization paths; their solutions can differ
    // only by the sum of their individual errors.
    assert!(newton.u.linf_diff(&slack.u) <= 5e-3);
    assert!(newton.u.linf_diff(&damped.u) <= 5e-3);
    assert!(slack.u.linf_diff(&damped.u) <= 5e-3);
}

#[test]
fn damping_factor_moves_the_plateau_but_not_its_order() {
    let mut strong = MethodConfig::default();
    strong.alpha = 0.9;
    let mut weak = MethodConfig::default();
    weak.alpha = 0.1;
    let (row_strong, _) = run_solve(Method::C, 1, 31, &strong).unwrap();
    let (row_weak, _) = run_solve(Method::C, 1, 31, &weak).unwrap();
    assert!(row_strong.error <= 5e-2, "alpha 0.9 plateau {:.3e}", row_strong.error);
    assert!(row_weak.error <= 5e-2, "alpha 0.1 plateau {:.3e}", row_weak.error);
    let ratio = row_strong.error / row_weak.error;
    assert!(
        (0.1..=10.0).contains(&ratio),
        "plateaus differ by more than an order: {:.3e} vs {:.3e}",
        row_strong.error,
        row_weak.error
    );
}

#[test]
fn newton_matches_reference_order_with_few_iterations() {
    let (row, _) = run_solve(Method::ANewton, 1, 63, &MethodConfig::default()).unwrap();
    // Reference error for this configuration is 2.801e-4; the contract is
    // its order of magnitude, not its digits.
    assert!(
        row.error >= 2.801e-5 && row.error <= 2.801e-3,
        "error {:.3e} outside reference order",
        row.error
    );
    assert!(row.converged);
    // The explicit sweep needs its full default budget here; Newton needs
    // a vanishing fraction of it.
    assert!(row.iters * 100 < euler_default_cap(63), "{} iterations", row.iters);
}

#[test]
fn slack_fixed_point_error_bands_on_smooth_problems() {
    let cfg = MethodConfig::default();
    let (ex1, _) = run_solve(Method::B, 1, 45, &cfg).unwrap();
    assert!(ex1.converged);
    // Reference 2.202e-4 at this size, factor-4 contract, undershoot allowed.
    assert!(ex1.error <= 4.0 * 2.202e-4, "example 1 N=45 error {:.3e}", ex1.error);

    let (ex2, _) = run_solve(Method::B, 2, 89, &cfg).unwrap();
    assert!(ex2.converged);
    // Reference order 1e-5 to 1e-4 for the cone problem at this size.
    assert!(
        ex2.error >= 1e-5 && ex2.error <= 1e-4,
        "example 2 N=89 error {:.3e} outside reference order",
        ex2.error
    );
}
