use std::fs;
use std::path::Path;

use bpre_core::models::{load_model, verify_tail_assumption, Model};
use bpre_core::parallel::Execution;
use bpre_core::path::{optimal_strategy, path_profile, phase_report, PathProfile};
use bpre_core::ratefn::{psi_direct_value, RateProfile, WalkLaw};
use bpre_core::simulate::{
    exact_tail, growth_threshold, mc_tail, survival_tilt, tilted_tail_with_lambda, McConfig,
    TailEstimate,
};
use bpre_core::Error;

use crate::args::{
    parse_n_list, thetas, McArgs, ModelArgs, PathArgs, PhaseArgs, PlotArgs, RateArgs, SimArgs,
};
use crate::output::{ext, num, write_all, Csv, Summary};
use crate::svg::{Marker, Plot, Series};
use crate::{CliError, Outcome};

/// Support bound used when checking a declared tail envelope.
const TAIL_CHECK_Z: u64 = 1 << 20;

fn load(args: &ModelArgs) -> Result<(Model, f64), CliError> {
    let model = load_model(&args.model)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.model.display())))?;
    if let Some(assume) = &model.tail {
        verify_tail_assumption(&model.env, assume, TAIL_CHECK_Z)?.into_result()?;
    }
    let beta = args.beta.or(model.beta()).ok_or_else(|| {
        CliError::validation("no --beta given and the model declares no tail exponent")
    })?;
    if beta.is_nan() || beta <= 1.0 {
        return Err(CliError::validation(format!("beta {beta} must exceed 1")));
    }
    Ok((model, beta))
}

pub fn mc_config(mc: &McArgs) -> Result<McConfig, CliError> {
    if mc.replicates < 1 {
        return Err(CliError::validation("--replicates must be >= 1"));
    }
    Ok(McConfig::new(mc.replicates, mc.seed)
        .with_cap(mc.cap)
        .with_exec(Execution::from_threads(mc.threads)))
}

pub fn analyze(args: &RateArgs) -> Result<Outcome, CliError> {
    let (model, beta) = load(&args.model)?;
    let grid =
        thetas(&args.theta)?.ok_or_else(|| CliError::validation("need --theta or --theta-grid"))?;
    let p = RateProfile::new(&model.env, beta)?;
    let mut csv = Csv::new(&["theta", "lambda", "chi", "psi_direct", "psi_piecewise"]);
    for &theta in &grid {
        csv.row(&[
            num(theta),
            ext(p.lambda(theta)),
            ext(p.chi(theta)),
            num(psi_direct_value(&p, theta)),
            num(p.psi_piecewise(theta)),
        ]);
    }
    let mut summary = Summary::default();
    summary
        .text("model", &model.name)
        .number("beta", beta)
        .text("regime", p.regime.as_str())
        .number("drift", p.drift)
        .number("ess_sup_x", p.ess_sup_x)
        .number("gamma", p.gamma)
        .ext("theta_star", p.theta_star)
        .ext("theta_dagger", p.theta_dagger);
    let text = summary.render();
    write_all(
        &args.out,
        &[
            ("analyze.csv", csv.into_string()),
            ("summary.json", text.clone()),
        ],
    )?;
    Ok(Outcome::ok(text))
}

fn estimate_row(csv: &mut Csv, e: &TailEstimate, n: usize, theta: &str, seed: &str) {
    let rate = if e.p_hat > 0.0 {
        -e.p_hat.ln() / n as f64
    } else {
        f64::INFINITY
    };
    csv.row(&[
        e.method.as_str().to_string(),
        n.to_string(),
        e.threshold.to_string(),
        theta.to_string(),
        num(e.p_hat),
        num(e.std_err),
        e.n_samples.to_string(),
        seed.to_string(),
        num(rate),
    ]);
}

pub fn simulate(args: &SimArgs) -> Result<Outcome, CliError> {
    let grid = thetas(&args.theta)?;
    let model = load_model(&args.model.model)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.model.model.display())))?;
    let ns = parse_n_list(args.n, args.n_list.as_deref())?;
    let cfg = mc_config(&args.mc)?;
    let env = &model.env;
    let walk = WalkLaw::new(env);
    let seed = args.mc.seed.to_string();

    // (θ label, tilt λ, threshold per n)
    let mut jobs: Vec<(String, f64, Option<f64>)> = Vec::new();
    match &grid {
        None => jobs.push((String::new(), survival_tilt(env), None)),
        Some(grid) => {
            let (_, beta) = load(&args.model)?;
            for &theta in grid {
                let st = optimal_strategy(env, beta, theta)?;
                let lambda = st
                    .growth_slope()
                    .and_then(|g| walk.solve_tilt(g, None))
                    .unwrap_or(0.0);
                jobs.push((num(theta), lambda, Some(theta)));
            }
        }
    }

    let mut csv = Csv::new(&[
        "method",
        "n",
        "k",
        "theta",
        "p_hat",
        "std_err",
        "n_samples",
        "seed",
        "rate",
    ]);
    let mut skipped = 0;
    for (label, lambda, theta) in &jobs {
        for &n in &ns {
            let k = match theta {
                Some(t) => growth_threshold(*t, n)?,
                None => 1,
            };
            if k > cfg.cap {
                return Err(CliError::validation(format!(
                    "threshold {k} at n = {n} exceeds the cap {}",
                    cfg.cap
                )));
            }
            match exact_tail(env, n, 1, k, None) {
                Ok(e) => estimate_row(&mut csv, &e.estimate, n, label, "-"),
                Err(Error::Guard(_)) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
            estimate_row(&mut csv, &mc_tail(env, n, 1, k, &cfg)?, n, label, &seed);
            if *lambda > 0.0 {
                let t = tilted_tail_with_lambda(env, n, 1, *lambda, k, &cfg)?;
                estimate_row(&mut csv, &t, n, label, &seed);
            }
        }
    }
    let text = csv.into_string();
    write_all(&args.out, &[("simulate.csv", text.clone())])?;
    let mut stdout = text;
    if skipped > 0 {
        stdout.push_str(&format!(
            "# exact oracle skipped for {skipped} instance(s): guard\n"
        ));
    }
    Ok(Outcome::ok(stdout))
}

pub fn path(args: &PathArgs) -> Result<Outcome, CliError> {
    let (model, beta) = load(&args.model)?;
    if !(args.theta >= 0.0 && args.theta.is_finite()) {
        return Err(CliError::validation("theta must be finite and >= 0"));
    }
    let prof = path_profile(&model.env, beta, args.theta, args.resolution)?;
    let st = prof.strategy;
    let mut csv = Csv::new(&["t", "f_left", "f_right"]);
    for &(t, _) in &prof.samples {
        csv.row(&[
            num(t),
            num(PathProfile::value_left(&st, t)),
            num(PathProfile::value_right(&st, t)),
        ]);
    }
    let mut summary = Summary::default();
    summary
        .text("model", &model.name)
        .number("beta", beta)
        .number("theta", st.theta)
        .number("t_theta", st.t_theta)
        .number("s_theta", st.s_theta)
        .number("value", st.value)
        .text("regime", st.regime.as_str());
    if let Some(j) = prof.jump {
        summary
            .number("jump_t", j.t)
            .number("jump_from", j.from)
            .number("jump_to", j.to);
    }
    let text = summary.render();
    write_all(
        &args.out,
        &[
            ("path.csv", csv.into_string()),
            ("strategy.json", text.clone()),
        ],
    )?;
    Ok(Outcome::ok(text))
}

pub fn phase(args: &PhaseArgs) -> Result<Outcome, CliError> {
    let (model, beta) = load(&args.model)?;
    let r = phase_report(&model.env, beta)?;
    let mut csv = Csv::new(&["lo", "hi", "regime"]);
    for iv in &r.intervals {
        csv.row(&[num(iv.lo), num(iv.hi), iv.regime.as_str().to_string()]);
    }
    let mut summary = Summary::default();
    summary
        .text("model", &model.name)
        .number("beta", beta)
        .number("gamma", r.gamma)
        .ext("theta_star", r.theta_star)
        .number("theta_dagger", r.theta_dagger);
    for (i, iv) in r.intervals.iter().enumerate() {
        summary.text(
            &format!("interval_{i}"),
            &format!("[{}, {}) {}", num(iv.lo), num(iv.hi), iv.regime.as_str()),
        );
    }
    for k in &r.kinks {
        let key = format!("kink_{}", num(k.theta));
        summary
            .number(&format!("{key}_left_slope"), k.left_slope)
            .number(&format!("{key}_right_slope"), k.right_slope)
            .text(
                &format!("{key}_order"),
                if k.is_smooth(1e-4) { "second" } else { "first" },
            );
    }
    if let Some(c) = &r.closed_form {
        summary.text("closed_form", c);
    }
    let text = summary.render();
    write_all(
        &args.out,
        &[
            ("phase.csv", csv.into_string()),
            ("phase.json", text.clone()),
        ],
    )?;
    Ok(Outcome::ok(text))
}

/// Columns of a CSV file with a header line; `inf` parses as infinity.
fn read_columns(path: &Path, wanted: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let idx: Vec<usize> = wanted
        .iter()
        .map(|w| {
            header.iter().position(|h| h == w).ok_or_else(|| {
                CliError::validation(format!("{} has no column '{w}'", path.display()))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut cols = vec![Vec::new(); wanted.len()];
    for (ln, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        for (c, &i) in idx.iter().enumerate() {
            let v = cells
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::validation(format!("{} line {}: bad value", path.display(), ln + 2))
                })?;
            cols[c].push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(CliError::validation(format!(
            "{} has no rows",
            path.display()
        )));
    }
    Ok(cols)
}

fn rate_plot(path: &Path) -> Result<Plot, CliError> {
    let c = read_columns(path, &["theta", "lambda", "chi", "psi_direct"])?;
    let series = [("Lambda", 1), ("chi", 2), ("psi", 3)]
        .into_iter()
        .map(|(label, i)| Series {
            label: label.into(),
            points: c[0].iter().copied().zip(c[i].iter().copied()).collect(),
        })
        .collect();
    Ok(Plot {
        title: "Rate functions".into(),
        x_label: "theta".into(),
        y_label: "rate".into(),
        series,
        markers: vec![],
    })
}

fn path_plot(path: &Path) -> Result<Plot, CliError> {
    let c = read_columns(path, &["t", "f_left", "f_right"])?;
    let mut points = Vec::new();
    let mut markers = Vec::new();
    for ((&t, &l), &r) in c[0].iter().zip(&c[1]).zip(&c[2]) {
        points.push((t, l));
        if r != l {
            points.push((t, r));
            markers.push(Marker {
                x: t,
                y_from: l,
                y_to: r,
            });
        }
    }
    Ok(Plot {
        title: "Predicted path profile".into(),
        x_label: "t".into(),
        y_label: "log Z / n".into(),
        series: vec![Series {
            label: "f".into(),
            points,
        }],
        markers,
    })
}

pub fn plot(args: &PlotArgs) -> Result<Outcome, CliError> {
    let input = args.input.as_ref().unwrap_or(&args.out);
    let rates = input.join("analyze.csv");
    let profile = input.join("path.csv");
    let mut files = Vec::new();
    if rates.exists() {
        files.push(("rates.svg", rate_plot(&rates)?));
    }
    if profile.exists() {
        files.push(("path.svg", path_plot(&profile)?));
    }
    if files.is_empty() {
        return Err(CliError::validation(format!(
            "no analyze.csv or path.csv in {}",
            input.display()
        )));
    }
    let rendered: Vec<(&str, String)> = files
        .into_iter()
        .map(|(name, p)| {
            p.render()
                .map(|s| (name, s))
                .ok_or_else(|| CliError::validation(format!("nothing finite to plot in {name}")))
        })
        .collect::<Result<_, _>>()?;
    write_all(&args.out, &rendered)?;
    let names: Vec<&str> = rendered.iter().map(|(n, _)| *n).collect();
    Ok(Outcome::ok(format!("wrote {}\n", names.join(", "))))
}
