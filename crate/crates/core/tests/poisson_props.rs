use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extkit::catalog::{instantiate, list_entries, ParamMap};
use extkit::diffkit::{Jet2, ScalarField};
use extkit::poisson::{
    antisymmetry_defect, apply_xl, apply_xl2, bracket, extend_structure, ham_vector_field, jacobi_residual,
};
use extkit::verify::{rk4_step, sample_points, SampleSpec};

/// Random quadratic polynomial in `dim` variables.
fn random_poly(dim: usize, rng: &mut ChaCha8Rng) -> ScalarField {
    let lin: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let quad: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c0: f64 = rng.random_range(-1.0..1.0);
    ScalarField::real(dim, "random quadratic", move |x| {
        let mut acc = Jet2::constant(dim, c0);
        for i in 0..dim {
            acc = acc + &x[i] * lin[i];
            for j in 0..dim {
                acc = acc + &x[i] * &x[j] * quad[i * dim + j];
            }
        }
        acc
    })
}

fn points(inst: &extkit::catalog::Instance, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let sing = inst.singular_set();
    let pred = move |x: &[f64], m: f64| sing.as_ref().is_some_and(|p| p(x, m));
    let spec = SampleSpec::new(inst.domain.clone(), count, seed).with_margin(inst.margin);
    sample_points(&spec, Some(&pred)).unwrap().points
}

#[test]
fn jacobi_identity_for_euler_and_lotka_volterra() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for id in ["euler_top", "lotka_volterra"] {
        let inst = instantiate(id, &ParamMap::new()).unwrap();
        let s = &inst.system.structure;
        let mut worst: f64 = 0.0;
        for x in points(&inst, 50, 4) {
            let (f, g, h) = (
                random_poly(s.dim(), &mut rng),
                random_poly(s.dim(), &mut rng),
                random_poly(s.dim(), &mut rng),
            );
            worst = worst.max(jacobi_residual(s, &f, &g, &h, &x).unwrap().abs());
        }
        assert!(worst <= 1e-9, "{id}: {worst:e}");
    }
}

#[test]
fn hamiltonian_and_casimir_are_invariant() {
    for entry in list_entries() {
        let inst = instantiate(entry.id, &ParamMap::new()).unwrap();
        let sys = &inst.system;
        for x in points(&inst, 50, 5) {
            let xl = apply_xl(sys, &sys.hamiltonian, &x).unwrap();
            assert!(xl.abs() <= 1e-12, "{}: X_L L = {xl:e}", entry.id);
        }
    }
    let euler = instantiate("euler_top", &ParamMap::new()).unwrap();
    let m = &euler.system.observables["M"];
    for x in points(&euler, 50, 6) {
        assert!(apply_xl(&euler.system, m, &x).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn bracket_examples_from_the_bivectors() {
    let euler = instantiate("euler_top", &ParamMap::new()).unwrap();
    let coord = |i: usize| ScalarField::coordinate(3, i, "m");
    let x = [0.3, -0.7, 1.1];
    let b = bracket(&euler.system.structure, &coord(0), &coord(1), &x).unwrap();
    assert!((b + x[2]).abs() < 1e-15);
    let v = ham_vector_field(&euler.system, &[1.0, 0.0, 0.0]).unwrap();
    assert!(v.iter().all(|c| c.abs() < 1e-15));

    let lv = instantiate("lotka_volterra", &ParamMap::new()).unwrap();
    let (xv, yv): (f64, f64) = (1.3, 0.6);
    let bx = ScalarField::coordinate(2, 0, "x");
    let by = ScalarField::coordinate(2, 1, "y");
    let a = -(xv * xv * yv * yv * (-yv - xv).exp());
    assert!((bracket(&lv.system.structure, &bx, &by, &[xv, yv]).unwrap() - a).abs() < 1e-14);

    // X_L at (1, 1) against finite differences of L
    let l = |x: f64, y: f64| (x + y).exp() / (x * y);
    let h = 1e-6;
    let lx = (l(1.0 + h, 1.0) - l(1.0 - h, 1.0)) / (2.0 * h);
    let ly = (l(1.0, 1.0 + h) - l(1.0, 1.0 - h)) / (2.0 * h);
    let a1 = -(-2f64).exp();
    let v = ham_vector_field(&lv.system, &[1.0, 1.0]).unwrap();
    assert!((v[0] - a1 * ly).abs() < 1e-8 && (v[1] + a1 * lx).abs() < 1e-8);
}

#[test]
fn extended_structures_stay_antisymmetric() {
    for entry in list_entries() {
        let inst = instantiate(entry.id, &ParamMap::new()).unwrap();
        let ext = extend_structure(&inst.system.structure);
        assert_eq!(ext.dim(), inst.system.dim() + 2);
        for x in points(&inst, 100, 7) {
            let mut y = vec![0.4, -0.2];
            y.extend(&x);
            assert!(antisymmetry_defect(&ext, &y).unwrap() <= 1e-14);
            let m = ext.matrix(&y).unwrap();
            let n = ext.dim();
            assert_eq!(m[1], 1.0);
            assert!((2..n).all(|j| m[j] == 0.0 && m[n + j] == 0.0));
        }
    }
}

#[test]
fn second_derivative_matches_flow_differences() {
    let inst = instantiate("quartic1", &ParamMap::new()).unwrap();
    let sys = &inst.system;
    let g = &inst.solution().unwrap().field;
    let flow = |y: &[f64]| sys.flow(y);
    let tau = 1e-3;
    for x in points(&inst, 20, 8) {
        let advance = |h: f64| (0..50).fold(x.clone(), |y, _| rk4_step(&flow, &y, h / 50.0).unwrap());
        let (gp, gm, g0) = (
            g.value(&advance(tau)).unwrap(),
            g.value(&advance(-tau)).unwrap(),
            g.value(&x).unwrap(),
        );
        let fd = (gp - 2.0 * g0 + gm) / (tau * tau);
        let ad = apply_xl2(sys, g, &x).unwrap();
        assert!((fd - ad).abs() <= 1e-5 * ad.abs().max(1.0), "{fd} vs {ad}");
    }
}
