use bpre_core::models::{bundled, EnvironmentModel, OffspringLaw};
use bpre_core::ratefn::{
    psi_beta_limit_value, psi_direct_value, psi_galton_watson, ExtReal, RateProfile,
};

const BETAS: [f64; 3] = [1.5, 2.0, 5.0];

fn theta_grid(profile: &RateProfile, points: usize) -> Vec<f64> {
    let top = 1.5 * profile.ess_sup_x.max(0.5);
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect()
}

/// `sup_{λ ∈ grid} (λθ − K(λ))` over 1e5 points of `[0, 60]`.
fn lambda_by_grid(env: &EnvironmentModel, theta: f64) -> f64 {
    (0..=100_000)
        .map(|i| {
            let l = 60.0 * i as f64 / 100_000.0;
            l * theta - env.cgf(l)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn lambda_matches_legendre_grid() {
    for model in bundled::rate_test_envs() {
        let p = RateProfile::new(&model.env, 2.0).unwrap();
        for i in 0..20 {
            let theta = p.ess_sup_x * i as f64 / 20.0;
            let oracle = lambda_by_grid(&model.env, theta);
            let v = p.lambda(theta).value();
            // grid sup is a lower bound that is tight away from the supremum
            assert!(v >= oracle - 1e-9, "{} {theta}", model.name);
            assert!(v - oracle < 1e-6, "{} {theta}: {v} vs {oracle}", model.name);
        }
        assert_eq!(p.lambda(p.ess_sup_x + 0.01), ExtReal::PosInf);
    }
}

#[test]
fn two_algorithms_agree() {
    for model in bundled::rate_test_envs() {
        for beta in BETAS {
            let p = RateProfile::new(&model.env, beta).unwrap();
            for theta in theta_grid(&p, 60) {
                let d = psi_direct_value(&p, theta);
                let g = p.psi_piecewise(theta);
                assert!(
                    (d - g).abs() <= 1e-4,
                    "{} β={beta} θ={theta}: {d} vs {g}",
                    model.name
                );
            }
        }
    }
}

#[test]
fn galton_watson_reduction() {
    for m in [0.5, 1.0, 2.0] {
        let env = EnvironmentModel::single(
            OffspringLaw::bounded(vec![0.5 * (2.0 - m), 0.0, 0.5 * m]).unwrap(),
        );
        for beta in [1.5, 3.0] {
            let p = RateProfile::new(&env, beta).unwrap();
            for i in 0..50 {
                let theta = 1.5 * i as f64 / 49.0;
                let closed = if m <= 1.0 {
                    -f64::ln(m) + beta * theta
                } else if theta <= m.ln() {
                    0.0
                } else {
                    beta * (theta - m.ln())
                };
                match psi_galton_watson(m, beta, theta) {
                    Ok(v) => assert!((v - closed).abs() < 1e-12),
                    Err(_) => assert!(m > 1.0 && theta < m.ln()),
                }
                assert!(
                    (psi_direct_value(&p, theta) - closed).abs() < 1e-6,
                    "m={m} β={beta} θ={theta}"
                );
                assert!((p.psi_piecewise(theta) - closed).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn rate_function_properties() {
    for (_, model) in bundled::all() {
        for beta in BETAS {
            let p = RateProfile::new(&model.env, beta).unwrap();
            let grid = theta_grid(&p, 40);
            let psi: Vec<f64> = grid.iter().map(|&t| psi_direct_value(&p, t)).collect();
            assert!((psi[0] - p.gamma).abs() < 1e-6);
            for (i, &t) in grid.iter().enumerate() {
                if let ExtReal::Finite(l) = p.lambda(t) {
                    assert!(psi[i] <= l + 1e-8);
                }
                for j in i + 1..grid.len() {
                    assert!(psi[j] <= psi[i] + beta * (grid[j] - t) + 1e-8);
                }
                if i >= 1 && i + 1 < grid.len() {
                    assert!(psi[i] <= 0.5 * (psi[i - 1] + psi[i + 1]) + 1e-8);
                }
            }
        }
    }
}

#[test]
fn psi_increases_with_beta() {
    for model in bundled::rate_test_envs() {
        let profiles: Vec<_> = [1.5, 2.0, 3.0, 5.0, 10.0]
            .iter()
            .map(|&b| RateProfile::new(&model.env, b).unwrap())
            .collect();
        for theta in theta_grid(&profiles[0], 25) {
            let vals: Vec<f64> = profiles
                .iter()
                .map(|p| psi_direct_value(p, theta))
                .collect();
            assert!(vals.windows(2).all(|w| w[0] <= w[1] + 1e-9));
        }
    }
}

#[test]
fn large_beta_limit() {
    for model in bundled::rate_test_envs() {
        let p = RateProfile::new(&model.env, 64.0).unwrap();
        for theta in theta_grid(&p, 30) {
            if let ExtReal::Finite(lim) = psi_beta_limit_value(&p, theta) {
                assert!((psi_direct_value(&p, theta) - lim).abs() <= 1e-3);
            }
        }
    }
}

#[test]
fn third_piece_closed_form() {
    let p = RateProfile::new(&bundled::critical().env, 2.0).unwrap();
    assert!(p.dagger_is_tangency());
    for theta in [0.62, 0.65, 0.69] {
        let v = psi_direct_value(&p, theta);
        let closed = 2.0 * theta - (0.5 * 4.0 + 0.5 * 0.25f64).ln();
        assert!((v - closed).abs() < 1e-8);
    }
}
