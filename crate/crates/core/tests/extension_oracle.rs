mod support;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extkit::diffkit::ScalarField;
use extkit::extension::{
    gn_closed, gn_recursive, k_char, kbar_with, pd_coeffs, ExtDerivValue, ExtendedState, Extension, ExtensionParams,
    GSolution, GlobalStatus, IntegralIndices,
};
use extkit::gamma::{gamma_eval, GammaParams};
use extkit::poisson::{HamiltonianSystem, PoissonStructure};

use support::{gn, k_oracle, kbar_oracle, rel};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn oscillator(omega: f64) -> (HamiltonianSystem, GSolution) {
    let l = ScalarField::real(2, "osc", move |x| {
        (x[1].square() + x[0].square() * (omega * omega)) * 0.5
    });
    let sys = HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap();
    let g = GSolution::new(
        ScalarField::coordinate(2, 0, "q"),
        0.0,
        omega * omega / 2.0,
        "",
        GlobalStatus::GloballyDefined,
        &[vec![1.0, 0.0]],
    )
    .unwrap();
    (sys, g)
}

#[test]
fn gn_recursion_matches_exact_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=8 {
        let poly = gn(n);
        let xl = poly.derive();
        for _ in 0..20 {
            let (g, y, lam) = (
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let vals = [c(g), c(y), c(lam), c(0.0), c(0.0), c(0.0)];
            let rec = gn_recursive(n, ExtDerivValue::new(g, y), lam);
            let closed = gn_closed(n, ExtDerivValue::new(g, y), lam);
            for v in [rec, closed] {
                assert!(rel(c(v.value), poly.eval(vals)) <= 1e-12, "n={n}");
                assert!(rel(c(v.xl), xl.eval(vals)) <= 1e-12, "n={n}");
            }
        }
    }
}

#[test]
fn gn_third_order_by_hand() {
    let (g, y, lam) = (0.7, -1.3, 0.4);
    let v = gn_recursive(3, ExtDerivValue::new(g, y), lam).value;
    assert!((v - (3.0 * g * y * y - 2.0 * lam * g * g * g)).abs() < 1e-14);
}

#[test]
fn operator_power_matches_pd_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (m, n) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
        let k = k_oracle(m, n);
        for trial in 0..60 {
            let g = if trial % 3 == 0 {
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
            } else {
                c(rng.random_range(-2.0..2.0))
            };
            let y = Complex64::new(rng.random_range(-2.0..2.0), if trial % 3 == 0 { 0.5 } else { 0.0 });
            let lam: f64 = rng.random_range(-2.0..2.0);
            let p_u: f64 = rng.random_range(-2.0..2.0);
            let gamma: f64 = rng.random_range(-2.0..2.0);
            let (p, d) = pd_coeffs(m, n, m, p_u, gamma, lam).unwrap();
            let gn_v = gn_closed(n, ExtDerivValue::new(g, y), lam);
            let closed = gn_v.value * p + gn_v.xl * d;
            let exact = k.eval([g, y, c(lam), c(p_u), c(gamma), c(0.0)]);
            assert!(rel(closed, exact) <= 1e-9, "(m,n)=({m},{n}) {closed} vs {exact}");
        }
    }
}

#[test]
fn k_char_on_oscillator_matches_oracle() {
    let omega = 2.0;
    let (sys, g) = oscillator(omega);
    let params = ExtensionParams::new(0.0, omega * omega / 2.0, 1.5, 0.0, 2, 1);
    let k = k_oracle(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (u, p_u, q, p) = (
            rng.random_range(0.2..2.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let state = ExtendedState::new(u, p_u, vec![q, p]).unwrap();
        let value = k_char(&sys, &g, &params, &state).unwrap();
        let gamma = -1.5 * u;
        // X_L q = p for the oscillator
        let exact = k.eval([c(q), c(p), c(omega * omega / 2.0), c(p_u), c(gamma), c(0.0)]);
        assert!(rel(value, exact) <= 1e-9);
    }
}

#[test]
fn kbar_matches_oracle_with_omega() {
    let omega = 1.3;
    let (sys, g) = oscillator(omega);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (s, r) in [(1, 1), (2, 2), (1, 2)] {
        let oracle = kbar_oracle(s, r);
        let params = ExtensionParams::new(0.0, omega * omega / 2.0, 0.8, 0.6, 2 * s, r);
        for _ in 0..20 {
            let (u, p_u, q, p) = (
                rng.random_range(0.3..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let state = ExtendedState::new(u, p_u, vec![q, p]).unwrap();
            let value = kbar_with(&sys, &g, &params, s, r, &state).unwrap();
            let gamma = gamma_eval(&GammaParams::new(0.0, 0.8), u).unwrap().gamma;
            let w = 2.0 * 0.6 / (gamma * gamma);
            let exact = oracle.eval([c(q), c(p), c(omega * omega / 2.0), c(p_u), c(gamma), c(w)]);
            assert!(rel(value, exact) <= 1e-9, "s={s} r={r}");
        }
    }
}

#[test]
fn odd_m_with_omega_doubles_indices() {
    let omega = 1.0;
    let (sys, g) = oscillator(omega);
    let params = ExtensionParams::new(0.0, 0.5, 1.0, 0.4, 3, 2);
    let ext = Extension::new(sys.clone(), g.clone(), params).unwrap();
    assert_eq!(ext.indices(), IntegralIndices::Bar { s: 3, r: 4 });
    let y = [0.9, 0.2, 0.3, -0.5];
    let state = ExtendedState::from_slice(&y).unwrap();
    let direct = kbar_with(&sys, &g, &params, 3, 4, &state).unwrap();
    assert_eq!(ext.integral(&y).unwrap(), direct);
    let gamma = -0.9;
    let exact = kbar_oracle(3, 4).eval([c(0.3), c(-0.5), c(0.5), c(0.2), c(gamma), c(0.8 / (gamma * gamma))]);
    assert!(rel(direct, exact) <= 1e-9);
}
