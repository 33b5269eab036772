//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bpre_cli::{execute, Cli};
use bpre_core::models::{bundled, EnvironmentModel, Model, OffspringLaw};
use bpre_core::ratefn::{
    psi_beta_limit_value, psi_direct_value, psi_galton_watson, ExtReal, RateProfile, WalkLaw,
};
use bpre_core::simulate::{
    conditional_survival_bound_check, empirical_rate_curve, exact_tail, mc_tail,
    survival_rate_scan, tilt_for_drift, tilted_tail, McConfig,
};
use clap::Parser;

const BETAS: [f64; 3] = [1.5, 2.0, 5.0];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn grid(p: &RateProfile, points: usize) -> Vec<f64> {
    let top = 1.5 * p.ess_sup_x.max(0.5);
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect()
}

fn all_envs() -> Vec<Model> {
    let mut v = bundled::rate_test_envs();
    v.push(bundled::galton_watson_half());
    v.push(bundled::heavy_supercritical());
    v.push(bundled::deep_tail());
    v
}

fn two_algorithms() -> Verdict {
    let start = Instant::now();
    let envs = bundled::rate_test_envs();
    let blocks: Vec<f64> = std::thread::scope(|scope| {
        let handles: Vec<_> = envs
            .iter()
            .flat_map(|m| BETAS.map(|beta| (m, beta)))
            .map(|(m, beta)| {
                scope.spawn(move || {
                    let p = RateProfile::new(&m.env, beta).unwrap();
                    grid(&p, 200)
                        .into_iter()
                        .map(|t| (psi_direct_value(&p, t) - p.psi_piecewise(t)).abs())
                        .fold(0.0, f64::max)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let worst = blocks.iter().copied().fold(0.0, f64::max);
    let count = 200 * blocks.len();
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-4 && elapsed < Duration::from_secs(60),
        format!("{count} points, max diff {worst:.3e}, {elapsed:.1?}"),
    )
}

fn galton_watson_reduction() -> Verdict {
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0] {
        let law = OffspringLaw::bounded(vec![0.5 * (2.0 - m), 0.0, 0.5 * m]).unwrap();
        let env = EnvironmentModel::single(law);
        for beta in [1.5, 3.0] {
            let p = RateProfile::new(&env, beta).unwrap();
            for i in 0..50 {
                let theta = 1.5 * i as f64 / 49.0;
                // below log m the supercritical closed form is undefined and ψ vanishes
                let closed = psi_galton_watson(m, beta, theta).unwrap_or(0.0);
                worst = worst.max((psi_direct_value(&p, theta) - closed).abs());
            }
        }
    }
    verdict(worst <= 1e-6, format!("300 points, max diff {worst:.3e}"))
}

fn property_suite() -> Verdict {
    let (mut at_zero, mut below, mut lip, mut convex) = (
        0.0f64,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for m in all_envs() {
        for beta in BETAS {
            let p = RateProfile::new(&m.env, beta).unwrap();
            let thetas = grid(&p, 60);
            let psi: Vec<f64> = thetas.iter().map(|&t| psi_direct_value(&p, t)).collect();
            at_zero = at_zero.max((psi[0] - p.gamma).abs());
            for i in 0..thetas.len() {
                if let ExtReal::Finite(l) = p.lambda(thetas[i]) {
                    below = below.max(psi[i] - l);
                }
                for j in i + 1..thetas.len() {
                    lip = lip.max(psi[j] - psi[i] - beta * (thetas[j] - thetas[i]));
                }
                if i >= 1 && i + 1 < thetas.len() {
                    convex = convex.max(psi[i] - 0.5 * (psi[i - 1] + psi[i + 1]));
                }
            }
        }
    }
    verdict(
        at_zero <= 1e-6 && below <= 1e-8 && lip <= 1e-8 && convex <= 1e-8,
        format!(
            "|psi(0)-gamma| {at_zero:.1e}, psi-Lambda {below:.1e}, lipschitz {lip:.1e}, convexity {convex:.1e}"
        ),
    )
}

fn beta_limit() -> Verdict {
    let mut worst: f64 = 0.0;
    for m in all_envs() {
        let p = RateProfile::new(&m.env, 64.0).unwrap();
        for theta in grid(&p, 60) {
            if let ExtReal::Finite(l) = psi_beta_limit_value(&p, theta) {
                worst = worst.max((psi_direct_value(&p, theta) - l).abs());
            }
        }
    }
    verdict(worst <= 1e-3, format!("max diff {worst:.3e}"))
}

fn tilt_correctness() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut envs = 0;
    for m in all_envs() {
        let walk = WalkLaw::new(&m.env);
        if walk.is_degenerate() {
            continue;
        }
        envs += 1;
        let (lo, hi) = (walk.drift(), walk.x_max());
        for i in 1..=20 {
            let target = lo + (hi - lo) * i as f64 / 21.0;
            let lambda = tilt_for_drift(&m.env, target).unwrap();
            worst = worst.max((m.env.tilt(lambda).unwrap().drift() - target).abs());
        }
    }
    let specific = (bundled::critical().env.tilt(1.0).unwrap().drift() - 0.6 * 2f64.ln()).abs();
    verdict(
        worst <= 1e-8 && specific <= 1e-12,
        format!("{envs} envs x 20 targets, max diff {worst:.1e}; critical at 1: {specific:.1e}"),
    )
}

fn oracle_triangle() -> Verdict {
    let start = Instant::now();
    let n = 4;
    let cfg = McConfig::new(1_000_000, 11);
    let mut worst_naive: f64 = 0.0;
    for m in bundled::rate_test_envs() {
        for k in [1u64, 2, 4, 8] {
            let p = exact_tail(&m.env, n, 1, k, None).unwrap().estimate.p_hat;
            if p <= 0.0 || p >= 1.0 {
                continue;
            }
            let mc = mc_tail(&m.env, n, 1, k, &cfg).unwrap();
            let se = (p * (1.0 - p) / cfg.replicates as f64).sqrt();
            worst_naive = worst_naive.max((mc.p_hat - p).abs() / se);
        }
    }

    // deep tail: the threshold whose exact probability is closest to 1e-6
    let env = bundled::deep_tail().env;
    let (k, p) = (2u64..=625)
        .map(|k| (k, exact_tail(&env, n, 1, k, None).unwrap().estimate.p_hat))
        .filter(|&(_, p)| p > 0.0)
        .min_by(|a, b| {
            (a.1.ln() - 1e-6f64.ln())
                .abs()
                .total_cmp(&(b.1.ln() - 1e-6f64.ln()).abs())
        })
        .unwrap();
    let t = tilted_tail(&env, n, 1, (k as f64).ln() / n as f64, k, &cfg).unwrap();
    let z = (t.p_hat - p).abs() / t.std_err;
    let naive_var = p * (1.0 - p) / cfg.replicates as f64;
    let vr = naive_var / (t.std_err * t.std_err);
    let elapsed = start.elapsed();
    verdict(
        worst_naive <= 3.0 && z <= 3.0 && vr >= 10.0 && elapsed < Duration::from_secs(300),
        format!(
            "naive max {worst_naive:.2} sigma; deep tail k={k} p={p:.4e}, tilted {:.4e} ({z:.2} sigma), VR {vr:.0}, {elapsed:.1?}",
            t.p_hat
        ),
    )
}

fn survival_bound() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut sequences = 0;
    for m in [
        bundled::strongly_subcritical(),
        bundled::critical(),
        bundled::supercritical(),
        bundled::galton_watson_half(),
        bundled::deep_tail(),
    ] {
        for n in 1..=4 {
            let c = conditional_survival_bound_check(&m.env, n, None).unwrap();
            worst = worst.max(c.max_excess);
            sequences += c.sequences;
        }
    }
    let law = OffspringLaw::bounded(vec![0.5, 0.5]).unwrap();
    let eq = conditional_survival_bound_check(&EnvironmentModel::single(law), 4, None).unwrap();
    let equality = eq.equalities == eq.sequences;
    verdict(
        worst <= 1e-12 && equality,
        format!(
            "{sequences} sequences, max excess {worst:.1e}, equality case reproduced: {equality}"
        ),
    )
}

fn empirical_convergence() -> Verdict {
    let start = Instant::now();
    let m = bundled::heavy_supercritical();
    let beta = m.beta().unwrap();
    let p = RateProfile::new(&m.env, beta).unwrap();
    let theta = p.drift + 0.1;
    let psi = psi_direct_value(&p, theta);
    let cfg = McConfig::new(1_000_000, 1);
    let curve = empirical_rate_curve(&m.env, beta, theta, &[10, 20, 40], &cfg).unwrap();
    let errs: Vec<f64> = curve.iter().map(|r| (r.rate - psi).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
    let last = errs[2] / psi;
    let elapsed = start.elapsed();
    let rates: Vec<String> = curve.iter().map(|r| format!("{:.4}", r.rate)).collect();
    verdict(
        last <= 0.25 && monotone && elapsed < Duration::from_secs(600),
        format!(
            "psi {psi:.5}, rates at n=10,20,40: {}, n=40 rel err {:.1}%, {elapsed:.1?}",
            rates.join(", "),
            100.0 * last
        ),
    )
}

fn survival_scan() -> Verdict {
    let env = bundled::galton_watson_half().env;
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let p = exact_tail(&env, n, 1, 1, None).unwrap().estimate.p_hat;
        worst = worst.max((-p.ln() / n as f64 - 2f64.ln()).abs());
    }
    let mc = survival_rate_scan(&env, &[15], &McConfig::new(1_000_000, 3)).unwrap();
    let rel = (mc[0].rate - 2f64.ln()).abs() / 2f64.ln();
    verdict(
        worst <= 1e-12 && rel <= 0.2,
        format!(
            "oracle max diff {worst:.1e}; MC n=15 rate {:.4} ({:.1}%)",
            mc[0].rate,
            100.0 * rel
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "0", "4"] {
        let out = dir.path().join(threads);
        let cli = Cli::try_parse_from([
            "bpre",
            "verify",
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ])
        .unwrap();
        let outcome = execute(&cli).unwrap();
        let file = std::fs::read_to_string(out.join("verify.csv")).unwrap();
        csvs.push((outcome.code, outcome.stdout, file));
    }
    let same = csvs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        same,
        format!(
            "threads 1, 0, 4; {} report bytes, exit {}",
            csvs[0].2.len(),
            csvs[0].0
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("psi two-algorithm agreement", two_algorithms),
        ("Galton-Watson reduction", galton_watson_reduction),
        ("rate function properties", property_suite),
        ("large-beta limit", beta_limit),
        ("tilt correctness", tilt_correctness),
        ("oracle triangle", oracle_triangle),
        ("conditional survival bound", survival_bound),
        ("empirical convergence smoke test", empirical_convergence),
        ("survival-rate scan", survival_scan),
        ("verify determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
