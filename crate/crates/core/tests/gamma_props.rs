use extkit::gamma::{gamma_eval, tagged_trig, GammaParams};

const REGIMES: [(f64, f64); 6] = [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (2.0, 3.0)];

/// 1000 points of `(0.05, 1.5)`, scaled to stay inside the first pole-free
/// interval when `κ > 0`.
fn grid(c: f64, big_c: f64) -> Vec<f64> {
    let top = if c != 0.0 && big_c / c > 0.0 {
        0.95 * std::f64::consts::PI / (c.abs() * (big_c / c).sqrt())
    } else {
        1.5
    };
    (0..1000).map(|i| 0.05 + (top - 0.05) * i as f64 / 999.0).collect()
}

#[test]
fn ode_residual_on_grids() {
    for (c, big_c) in REGIMES {
        let p = GammaParams::new(c, big_c);
        for u in grid(c, big_c) {
            let g = gamma_eval(&p, u).unwrap();
            let res = g.d1 + c * g.gamma * g.gamma + big_c;
            assert!(res.abs() <= 1e-12 * (1.0 + g.d1.abs()), "({c}, {big_c}) u={u}: {res:e}");
        }
    }
}

#[test]
fn second_derivative_matches_differences() {
    let h = 1e-5;
    for (c, big_c) in REGIMES {
        let p = GammaParams::new(c, big_c);
        for u in grid(c, big_c).into_iter().step_by(50).skip(1) {
            let g = gamma_eval(&p, u).unwrap();
            let fd = (gamma_eval(&p, u + h).unwrap().d1 - gamma_eval(&p, u - h).unwrap().d1) / (2.0 * h);
            assert!((fd - g.d2).abs() <= 1e-6 * g.d2.abs().max(1.0), "({c}, {big_c}) u={u}");
        }
    }
}

#[test]
fn tagged_identity() {
    for kappa in [2.5, 0.0, -4.0] {
        for i in 0..100 {
            let x = -1.0 + 0.02 * i as f64;
            let (s, c, _) = match tagged_trig(kappa, x) {
                Ok(v) => v,
                Err(_) => continue,
            };
            assert!((c * c + kappa * s * s - 1.0).abs() <= 1e-12);
        }
    }
    let (s, c, t) = tagged_trig(-4.0, 0.3).unwrap();
    assert!((s - 0.6f64.sinh() / 2.0).abs() < 1e-15 && (c - 0.6f64.cosh()).abs() < 1e-15);
    assert!((t - 0.6f64.tanh() / 2.0).abs() < 1e-15);
}
