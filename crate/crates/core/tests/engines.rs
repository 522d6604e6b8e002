use leaf_duffing::integrate::{quad_singular, rk_integrate, RkOptions, SecondOrderIvp};

// pi_n / 2 from 30-digit references.
const HALF_PI_N: [(u32, f64); 3] = [(2, 1.311_028_777_146_059_9), (3, 1.214_325_323_943_790_8), (4, 1.163_592_571_218_269_4)];

fn half_pi_n(n: u32, tol: f64) -> f64 {
    let two_n = 2.0 * n as f64;
    quad_singular(|nd| 1.0 / (-(two_n * (-nd.to_hi).ln_1p()).exp_m1()).sqrt(), 0.0, 1.0, tol)
        .unwrap()
        .value
}

#[test]
fn realized_error_tracks_tolerance() {
    for (n, exact) in HALF_PI_N {
        let mut last = f64::INFINITY;
        let mut tol = 1e-3;
        while tol > 1e-14 {
            let err = (half_pi_n(n, tol) - exact).abs();
            assert!(err <= tol, "n = {n}, tol = {tol:e}: error {err:e}");
            assert!(err <= last.max(4.0 * f64::EPSILON), "n = {n}: error grew when tightening");
            last = err;
            tol *= 0.5;
        }
    }
}

#[test]
fn cubic_blowup_matches_lemniscatic_constant() {
    // x'' = 2 x^3 from x(0) = 1, x'(0) = 0 is cleafh_2, which blows up at eta_2.
    let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, _v: f64| 2.0 * x.powi(3), t0: 0.0, x0: 1.0, v0: 0.0 };
    let opts = RkOptions { tol: 1e-12, ..RkOptions::default() };
    let w = rk_integrate(&ivp, 3.0, &opts).unwrap();
    let b = w.blowup.expect("solution must blow up");
    assert!((b.pole_estimate(1.0) - HALF_PI_N[0].1).abs() < 1e-6);
}

#[test]
fn energy_is_conserved_over_many_periods() {
    // x'' = -2 x^3 from sleaf_2 data; x'^2 + x^4 = 1 along the exact flow.
    let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, _v: f64| -2.0 * x.powi(3), t0: 0.0, x0: 0.0, v0: 1.0 };
    let w = rk_integrate(&ivp, 20.0 * 2.622_057_554_292_12, &RkOptions::default()).unwrap();
    let drift = w.samples.iter().map(|s| (s.v * s.v + s.x.powi(4) - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-8, "drift {drift:e}");
}
