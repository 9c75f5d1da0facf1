use std::f64::consts::TAU;

use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use riccati_core::diffpoly::parse;
use riccati_core::numerics::{
    hill_system, pvf_system, uniform_grid, Env, FunctionSpec, IntegratorOptions, NumericsError, OdeSystem,
};

/// Derivative of a 2pi-periodic signal sampled at `N` equispaced points of
/// `[0, 2pi)`, by multiplying the spectrum with `i k`.
fn spectral_derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if j < n / 2 { j as f64 } else if j == n / 2 { 0.0 } else { j as f64 - n as f64 };
        *c *= Complex::new(0.0, k);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

#[test]
fn function_jets_agree_with_spectral_derivatives() {
    let v: FunctionSpec = "trig:1;0.3,0.2;-0.1,0.05".parse().unwrap();
    let xs = periodic_grid(64);
    let mut col: Vec<f64> = xs.iter().map(|&x| v.value(x)).collect();
    for m in 1..=4 {
        col = spectral_derivative(&col);
        for (x, s) in xs.iter().zip(&col) {
            assert_abs_diff_eq!(v.jet(*x, m)[m], *s, epsilon = 1e-9);
        }
    }
}

#[test]
fn pvf_columns_agree_with_spectral_derivatives() {
    // with v = 1 every solution is a trigonometric polynomial of period pi
    let n = 64;
    let mut grid = periodic_grid(n);
    grid.push(TAU);
    let env = Env::new().with_coeff("v", FunctionSpec::Constant(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let ics: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = pvf_system(1.0).integrate(&env, &ics, &grid, &IntegratorOptions::default()).unwrap();
        let y: Vec<f64> = t.component(0)[..n].to_vec();
        let dy = spectral_derivative(&y);
        let ddy = spectral_derivative(&dy);
        for j in 0..n {
            assert_abs_diff_eq!(t.states[j][1], dy[j], epsilon = 1e-8);
            assert_abs_diff_eq!(t.states[j][2], ddy[j], epsilon = 1e-8);
        }
        assert_abs_diff_eq!(t.states[n][0], t.states[0][0], epsilon = 1e-8);
    }
}

#[test]
fn hill_with_constant_coefficient_is_a_cosine() {
    let grid = uniform_grid(0.0, 10.0, 201);
    let env = Env::new().with_coeff("v", FunctionSpec::Constant(4.0));
    let t = hill_system(1.0).integrate(&env, &[1.0, 0.0], &grid, &IntegratorOptions::default()).unwrap();
    for (x, s) in grid.iter().zip(&t.states) {
        assert_abs_diff_eq!(s[0], (2.0 * x).cos(), epsilon = 1e-8);
        assert_abs_diff_eq!(s[1], -2.0 * (2.0 * x).sin(), epsilon = 1e-8);
    }
}

#[test]
fn riccati_pole_is_located() {
    // u' = u^2, u(0) = 1 gives u = 1/(1 - x)
    let sys = OdeSystem::from_monic(&parse("u1 - u^2").unwrap(), "u").unwrap();
    let grid = uniform_grid(0.0, 2.0, 21);
    let opts = IntegratorOptions::default().with_blowup(1e8);
    let err = match sys.integrate(&Env::new(), &[1.0], &grid, &opts) {
        Err(NumericsError::Integration(e)) => e,
        other => panic!("expected a pole, got {other:?}"),
    };
    assert!(err.is_pole());
    assert_abs_diff_eq!(err.last_x().unwrap(), 1.0, epsilon = 1e-6);
    let partial = err.partial().unwrap();
    for (x, s) in partial.grid.iter().zip(&partial.states) {
        assert_abs_diff_eq!(s[0], 1.0 / (1.0 - x), epsilon = 1e-8 / (1.0 - x).powi(2));
    }
}

#[test]
fn tolerance_controls_the_error() {
    let sys = OdeSystem::from_monic(&parse("u1 + u").unwrap(), "u").unwrap();
    let grid = uniform_grid(0.0, 5.0, 11);
    let err = |rtol: f64| {
        let t = sys.integrate(&Env::new(), &[1.0], &grid, &IntegratorOptions::with_tol(rtol, rtol * 1e-2)).unwrap();
        grid.iter().zip(&t.states).map(|(x, s)| (s[0] - (-x).exp()).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(1e-5), err(1e-10));
    assert!(coarse < 1e-4 && fine < 1e-9 && fine < coarse, "{coarse:e} {fine:e}");
}
