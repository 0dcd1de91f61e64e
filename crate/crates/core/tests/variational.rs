use std::f64::consts::PI;

use fracvar::core1d::{Alpha, Calculus};
use fracvar::field::{AxisBox, Polynomial, ScalarField};
use fracvar::string_app::{alpha_sweep, StringProblem};
use fracvar::variational::{legendre_modes, Lagrangian2D, Lagrangian3D, RitzAnsatz, VariationalProblem2D, VariationalProblem3D};
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

fn calc(a: f64) -> Calculus {
    Calculus::new(Alpha::new(a).unwrap())
}

fn bubble2() -> ScalarField {
    Polynomial::new(2, vec![(1.0, [1, 1, 0]), (-1.0, [2, 1, 0]), (-1.0, [1, 2, 0]), (1.0, [2, 2, 0])]).to_field()
}

#[test]
fn integration_by_parts_holds_classically() {
    let bx = AxisBox::unit(2).unwrap();
    let f = Polynomial::new(2, vec![(1.0, [2, 1, 0]), (-0.5, [0, 3, 0])]).to_field();
    let g = Polynomial::new(2, vec![(0.3, [1, 0, 0]), (1.0, [1, 2, 0])]).to_field();
    let r = calc(1.0).check_lemma_2d(&f, &g, &bubble2(), &bx).unwrap();
    assert!(r.passes(1e-12), "{r}");

    let cube = AxisBox::unit(3).unwrap();
    let eta = ScalarField::new(3, |p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]) * p[2] * (1.0 - p[2]));
    let a = Polynomial::new(3, vec![(1.0, [1, 1, 0])]).to_field();
    let b = Polynomial::new(3, vec![(1.0, [0, 0, 2])]).to_field();
    let c = Polynomial::new(3, vec![(1.0, [1, 0, 1])]).to_field();
    let r = calc(1.0).check_lemma_3d([&a, &b, &c], &eta, &cube).unwrap();
    assert!(r.passes(1e-10), "{r}");
}

/// `G = x`, `F = 0`, `h = x(1-x)y(1-y)` at `α = ½`: both sides reduce to
/// Beta integrals in `x` times the same `y` factor.
#[test]
fn fractional_integration_by_parts_gap_matches_beta_oracle() {
    let a = 0.5;
    let y_factor = a * beta(2.0, a + 1.0);
    let g1 = gamma(1.5);
    let g2 = gamma(2.5);
    let lhs = y_factor * a * (beta(2.5, 0.5) / g1 - 2.0 * beta(3.5, 0.5) / g2);
    let rhs = -y_factor * a * beta(2.5, 1.5) / g1;
    let r = calc(a)
        .check_lemma_2d(&ScalarField::constant(2, 0.0), &ScalarField::coordinate(2, 0), &bubble2(), &AxisBox::unit(2).unwrap())
        .unwrap();
    assert!((r.lhs - lhs).abs() < 1e-10, "{} vs {lhs}", r.lhs);
    assert!((r.rhs - rhs).abs() < 1e-10, "{} vs {rhs}", r.rhs);
    assert!((r.lhs - r.rhs).abs() > 0.3 * r.rhs.abs());
}

#[test]
fn boundary_nonvanishing_variation_is_rejected() {
    let bx = AxisBox::unit(2).unwrap();
    let one = ScalarField::constant(2, 1.0);
    assert!(calc(0.5).check_lemma_2d(&one, &one, &one, &bx).is_err());
}

/// `D^α D^α t^k = Γ(k+1)/Γ(k+1-2α) t^(k-2α)`.
fn twice(k: f64, a: f64, t: f64) -> f64 {
    gamma(k + 1.0) / gamma(k + 1.0 - 2.0 * a) * t.powf(k - 2.0 * a)
}

#[test]
fn three_dimensional_residual_from_one_dimensional_closed_forms() {
    let a = 0.5;
    let w = Polynomial::new(3, vec![(1.0, [2, 1, 0]), (-2.0, [0, 1, 3])]).to_field();
    let prob = VariationalProblem3D::new(Lagrangian3D::dirichlet(), AxisBox::unit(3).unwrap(), calc(a)).unwrap();
    for p in [[0.3, 0.6, 0.45], [0.8, 0.2, 0.7]] {
        let [x, y, z] = p;
        // x²y: D_xD_x x² · y + x² · D_yD_y y;  -2yz³: -2 (D_yD_y y · z³ + y · D_zD_z z³)
        let dd = twice(2.0, a, x) * y + x * x * twice(1.0, a, y) - 2.0 * (twice(1.0, a, y) * z.powi(3) + y * twice(3.0, a, z));
        let got = prob.el_residual(&w, p).unwrap();
        assert!((got + dd).abs() < 1e-5, "{got} vs {}", -dd);
    }
}

#[test]
fn harmonic_functions_are_classical_extremals() {
    let w2 = Polynomial::new(2, vec![(1.0, [2, 0, 0]), (-1.0, [0, 2, 0]), (0.5, [1, 1, 0])]).to_field();
    let p2 = VariationalProblem2D::new(Lagrangian2D::dirichlet(), AxisBox::unit(2).unwrap(), calc(1.0)).unwrap();
    assert!(p2.el_residual(&w2, [0.3, 0.7]).unwrap().abs() < 1e-6);
    let w3 = Polynomial::new(3, vec![(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (-2.0, [0, 0, 2])]).to_field();
    let p3 = VariationalProblem3D::new(Lagrangian3D::dirichlet(), AxisBox::unit(3).unwrap(), calc(1.0)).unwrap();
    assert!(p3.el_residual(&w3, [0.3, 0.7, 0.5]).unwrap().abs() < 1e-6);
}

#[test]
fn natural_boundary_traces_shrink_with_basis() {
    let bx = AxisBox::unit(2).unwrap();
    let lag = Lagrangian2D::new(
        |z| 0.5 * (z[3] * z[3] + z[4] * z[4]) + 0.5 * z[2] * z[2] - (z[0] - z[1]).exp() * z[2],
        |z| z[2] - (z[0] - z[1]).exp(),
        |z| z[3],
        |z| z[4],
    )
    .unwrap();
    for a in [0.5, 0.75, 1.0] {
        let prob = VariationalProblem2D::new(lag.clone(), bx.clone(), calc(a)).unwrap();
        let traces: Vec<f64> = [1, 3, 5]
            .into_iter()
            .map(|deg| {
                let ans = RitzAnsatz::unconstrained(ScalarField::constant(2, 0.0), legendre_modes(&bx, deg));
                let sol = prob.ritz_stationary(&ans, 1e-10, 20).unwrap();
                assert!(sol.converged);
                prob.natural_boundary_residuals(&sol.surface(), 17).unwrap().max_abs()
            })
            .collect();
        assert!(traces[0] > traces[1] && traces[1] > traces[2], "alpha={a}: {traces:?}");
    }
}

/// Classical Ritz oracle for the standing-wave string with `n × n` modes.
/// `H` is diagonal with `π²(4l² - k²)/8`; only `k = 1` modes see the base
/// `(1 - 2t) sin πx`, with `g = -π/(4l)`. Resonant modes (`k = 2l`) are
/// left at zero.
fn classical_string_oracle(n: usize) -> (Vec<f64>, f64) {
    let mut coeffs = Vec::new();
    let mut j = 0.5 * (1.0 - PI * PI / 12.0);
    for k in 1..=n {
        for l in 1..=n {
            let h = PI * PI * (4.0 * (l * l) as f64 - (k * k) as f64) / 8.0;
            let g = if k == 1 { -PI / (4.0 * l as f64) } else { 0.0 };
            if h == 0.0 {
                coeffs.push(0.0);
            } else {
                coeffs.push(-g / h);
                j -= 0.5 * g * g / h;
            }
        }
    }
    (coeffs, j)
}

#[test]
fn classical_string_matches_oracle() {
    let p = StringProblem::standing_wave(calc(1.0));
    let ans = p.ansatz(4);
    let sol = p.solve(&ans, 1e-12).unwrap();
    let (want, j) = classical_string_oracle(4);
    assert!(sol.converged);
    for (got, want) in sol.coeffs().iter().zip(&want) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
    assert!((sol.value - j).abs() < 1e-8, "{} vs {j}", sol.value);

    let rows = alpha_sweep(&p, &[Alpha::new(1.0).unwrap()], &ans, 1e-12);
    assert!((rows[0].action - j).abs() < 1e-8);
    for (got, want) in rows[0].coeffs.iter().zip(&want) {
        assert!((got - want).abs() < 1e-8);
    }
}

#[test]
fn classical_action_matches_plain_quadrature() {
    let p = StringProblem::uniform(
        1.0,
        (0.0, 0.5),
        1.0,
        1.0,
        fracvar::core1d::Function1D::new(|x| (PI * x).sin()),
        fracvar::core1d::Function1D::new(|x| (PI * x).sin() * 1.5f64.cos()),
        calc(1.0),
    )
    .unwrap();
    let w = ScalarField::new(2, |q| (PI * q[0]).sin() * (3.0 * q[1]).cos());
    // ½∬(w_t² - w_x²) = ½[9·½·∫sin²3t - π²·½·∫cos²3t] over t ∈ [0, ½]
    let s = 0.25 - (3.0f64).sin() / 12.0;
    let c = 0.25 + (3.0f64).sin() / 12.0;
    let want = 0.5 * (9.0 * 0.5 * s - PI * PI * 0.5 * c);
    assert!((p.string_action(&w).unwrap() - want).abs() < 1e-8);
}
