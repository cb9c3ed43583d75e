//! Subcommand drivers. Each one stages its files and writes them only after
//! every profile passed the residual check.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use sublin_core::oracle::{energy_drift, integrate, IntegrateOptions, StopRule};
use sublin_core::profiles::{
    classical, degenerate_single, layout, multibump, signed_multibump, DEFAULT_GRID,
};
use sublin_core::regularized::{lambda1_eps, linear_shooting_eigenvalue, trace};
use sublin_core::symbolic::{
    build, build_with, manifest, project, shift, translate, SymbolWindow, BLOCK_CELLS,
};
use sublin_core::timemap::{
    classical_window, extinction_time_quadrature, invert_amplitude, invert_c, psi_sample, time_map,
    time_map_amplitude, time_map_infimum, time_map_supremum, ExtinctionForm,
};
use sublin_core::{Error, Params};

use crate::output::{
    csv, json, stage_profile, verify, Cell, CliError, CliResult, RunInfo, Staged, Tolerances,
};
use crate::{Command, Common};

const MIN_GRID: usize = 17;
/// Default lambda grid size for `bifurcation`.
const BIFURCATION_POINTS: usize = 256;
/// Decades of `λ - σ₁` covered below `Σ₁` by the default grid.
const BLOWUP_DECADES: f64 = 8.0;
/// Smallest relative excess `c/u_H - 1` in the `timemap` table.
const TIMEMAP_MIN_EXCESS: f64 = 1e-6;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Homoclinic { .. } => "homoclinic",
        Command::Bifurcation { .. } => "bifurcation",
        Command::Timemap { .. } => "timemap",
        Command::Classical => "classical",
        Command::Multibump { .. } => "multibump",
        Command::Chaos { .. } => "chaos",
        Command::Regularized { .. } => "regularized",
        Command::Orbit { .. } => "orbit",
        Command::Check { .. } => "check",
    }
}

pub fn run(common: &Common, cmd: &Command) -> CliResult<Vec<PathBuf>> {
    if !(common.tol > 0.0 && common.tol < 1.0) {
        return Err(invalid(format!(
            "--tol must lie in (0, 1), got {}",
            common.tol
        )));
    }
    if let Some(n) = common.grid_n {
        if n < MIN_GRID {
            return Err(invalid(format!(
                "--grid-n must be at least {MIN_GRID}, got {n}"
            )));
        }
    }
    let params = Params::new(common.lambda, common.a, common.p, common.length)?;
    let run = RunInfo {
        command: name(cmd),
        seed: common.seed,
        tolerances: Tolerances::new(common.tol),
    };
    let mut out = Staged::new(&common.out_dir);
    let n = common.grid_n.unwrap_or(DEFAULT_GRID);

    match cmd {
        Command::Homoclinic {
            a_list,
            lambda_grid,
        } => {
            let lams = lambda_grid
                .as_ref()
                .map_or(vec![params.lambda()], |l| l.0.clone());
            let weights = a_list.as_ref().map_or(vec![params.a()], |l| l.0.clone());
            homoclinic(&mut out, &run, &params, &lams, &weights, n, common.tol)?
        }
        Command::Bifurcation {
            lambda_grid,
            j_max,
            cap,
        } => bifurcation(
            &mut out,
            &params,
            lambda_grid.as_ref().map(|l| l.0.as_slice()),
            *j_max,
            *cap,
        )?,
        Command::Timemap { points, c_max } => timemap(&mut out, &params, *points, *c_max)?,
        Command::Classical => {
            let prof = classical(params.lambda(), &params, n)?;
            let c = invert_c(params.lambda(), &params)?;
            stage_profile(
                &mut out,
                "classical",
                &prof,
                &run,
                json!({ "c": c, "window": classical_window(&params) }),
            )?;
        }
        Command::Multibump { centers, signs } => {
            let lay = layout(&centers.0, params.lambda(), &params)?;
            let prof = match signs {
                Some(s) => signed_multibump(&lay, &s.0, &params, n)?,
                None => multibump(&lay, &params, n)?,
            };
            if prof.bump_count() != lay.len() {
                return Err(CliError::Verification(format!(
                    "expected {} bumps, found {}",
                    lay.len(),
                    prof.bump_count()
                )));
            }
            let extra = json!({
                "centers": lay.centers,
                "slacks": lay.slacks,
                "free_length": lay.free_length(),
                "polytope_diameter": lay.polytope_diameter(),
            });
            stage_profile(&mut out, "multibump", &prof, &run, extra)?;
        }
        Command::Chaos {
            symbols,
            random,
            offset,
        } => {
            let symbols = match (symbols, random) {
                (Some(s), _) => s.0.clone(),
                (None, Some(len)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
                    (0..*len).map(|_| rng.gen_range(-1i8..=1)).collect()
                }
                (None, None) => return Err(invalid("either --symbols or --random is required")),
            };
            let cells = common.grid_n.map_or(BLOCK_CELLS, |n| n - 1);
            chaos(
                &mut out,
                &run,
                &params,
                SymbolWindow::new(*offset, symbols)?,
                cells,
            )?
        }
        Command::Regularized {
            eps_list,
            lambda_grid,
            points,
        } => regularized(
            &mut out,
            &params,
            &eps_list.0,
            lambda_grid.as_ref().map(|l| l.0.as_slice()),
            *points,
        )?,
        Command::Orbit {
            u0,
            v0,
            x_max,
            stop_at_zero,
            samples,
        } => {
            let u0 = u0.unwrap_or(1.5 * params.equilibria().u_h);
            let x_max = x_max.unwrap_or(params.length());
            orbit(
                &mut out,
                &params,
                u0,
                *v0,
                x_max,
                *stop_at_zero,
                *samples,
                common.tol,
            )?
        }
        Command::Check { cases } => check(&params, common.seed, *cases)?,
    }
    out.commit()
}

fn homoclinic(
    out: &mut Staged,
    run: &RunInfo<'_>,
    params: &Params,
    lams: &[f64],
    weights: &[f64],
    n: usize,
    tol: f64,
) -> CliResult<()> {
    let mut rows = Vec::new();
    for &lam in lams {
        for &a in weights {
            let k = rows.len();
            let unit = Params::new(lam, a, params.p(), 1.0)?;
            let eq = *unit.equilibria();
            let at = unit.with_length(2.0 * eq.t_h)?;
            let prof = degenerate_single(lam, eq.t_h, &at, n)?;
            let quad = extinction_time_quadrature(lam, params.p(), ExtinctionForm::PowerRoot, tol)?;
            let extra = json!({ "u_h": eq.u_h, "t_h": eq.t_h, "t_h_quadrature": quad });
            stage_profile(out, &format!("homoclinic_{k:03}"), &prof, run, extra)?;
            rows.push(vec![
                Cell::Int(k as i64),
                lam.into(),
                a.into(),
                params.p().into(),
                eq.u_h.into(),
                eq.t_h.into(),
                (2.0 * eq.t_h).into(),
                quad.into(),
            ]);
        }
    }
    let header = [
        "index",
        "lambda",
        "a",
        "p",
        "u_h",
        "t_h",
        "extinction_time",
        "t_h_quadrature",
    ];
    out.add("homoclinic.csv", csv(&header, rows));
    Ok(())
}

fn bifurcation(
    out: &mut Staged,
    params: &Params,
    grid: Option<&[f64]>,
    j_max: u32,
    cap: f64,
) -> CliResult<()> {
    if j_max == 0 {
        return Err(invalid("--j-max must be at least 1"));
    }
    if !(cap > 0.0) {
        return Err(invalid("--cap must be positive"));
    }
    let eq = params.equilibria();
    let grid: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => {
            // log-spaced towards sigma_1 inside the window, uniform above it
            let (s1, b1, top) = (eq.sigma(1), eq.big_sigma(1), 1.25 * eq.big_sigma(j_max));
            let inner = BIFURCATION_POINTS / 4;
            let outer = BIFURCATION_POINTS - inner;
            let near = (0..inner).map(|k| {
                let e = BLOWUP_DECADES * (k as f64 / inner as f64 - 1.0);
                s1 + (b1 - s1) * 10f64.powf(e)
            });
            let far = (0..outer).map(|k| b1 + (top - b1) * k as f64 / (outer - 1) as f64);
            near.chain(far).collect()
        }
    };
    let (lower, upper) = classical_window(params);
    let rows: Vec<(f64, Option<f64>, Vec<Cell>)> = grid
        .par_iter()
        .map(|&lam| -> CliResult<_> {
            let at = params.with_lambda(lam)?;
            let c = if lam > lower && lam < upper {
                Some(invert_c(lam, params)?)
            } else {
                None
            };
            let degenerate = (lam >= upper).then_some(at.equilibria().u_h);
            let flagged = Cell::Int(c.map_or(0, |c| i64::from(c > cap)));
            let mut row = vec![lam.into(), c.into(), degenerate.into(), flagged];
            let t_h = at.equilibria().t_h;
            row.extend((1..=j_max).map(|j| Cell::Real(at.length() - 2.0 * j as f64 * t_h)));
            Ok((lam, c, row))
        })
        .collect::<CliResult<_>>()?;

    let mut branch: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.1.map(|c| (r.0, c))).collect();
    branch.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = branch
        .windows(2)
        .find(|w| w[0].0 < w[1].0 && !(w[1].1 < w[0].1))
    {
        return Err(CliError::Verification(format!(
            "classical sup-norm not decreasing between lambda = {} and {}",
            w[0].0, w[1].0
        )));
    }

    let mut header = vec![
        "lambda".to_string(),
        "classical_sup".into(),
        "degenerate_sup".into(),
        "flagged".into(),
    ];
    header.extend((1..=j_max).map(|j| format!("slack_{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.add(
        "bifurcation.csv",
        csv(&header, rows.into_iter().map(|r| r.2)),
    );
    let thresholds = (1..=j_max).map(|j| {
        vec![
            Cell::Int(j as i64),
            eq.sigma(j).into(),
            eq.big_sigma(j).into(),
        ]
    });
    out.add(
        "thresholds.csv",
        csv(&["j", "sigma", "big_sigma"], thresholds),
    );
    Ok(())
}

fn timemap(out: &mut Staged, params: &Params, points: usize, c_max: f64) -> CliResult<()> {
    if points < 2 {
        return Err(invalid("--points must be at least 2"));
    }
    if !(c_max - 1.0 > TIMEMAP_MIN_EXCESS) {
        return Err(invalid(format!(
            "--c-max must exceed 1 + {TIMEMAP_MIN_EXCESS}"
        )));
    }
    let eq = params.equilibria();
    let span = ((c_max - 1.0) / TIMEMAP_MIN_EXCESS).ln();
    let rows: Vec<(f64, f64, f64)> = (0..points)
        .into_par_iter()
        .map(|k| {
            let excess = TIMEMAP_MIN_EXCESS * (span * k as f64 / (points - 1) as f64).exp();
            let c = eq.u_h * (1.0 + excess);
            Ok((c, 1.0 + excess, time_map(c, params)?.t))
        })
        .collect::<CliResult<_>>()?;
    if rows.windows(2).any(|w| !(w[1].2 < w[0].2)) {
        return Err(CliError::Verification(
            "time map not strictly decreasing".into(),
        ));
    }
    let psi: Vec<(f64, f64)> = (1..=points)
        .into_par_iter()
        .map(|k| {
            let xi = k as f64 / (points + 1) as f64;
            Ok((xi, psi_sample(xi, params.p(), params.length())?.lam))
        })
        .collect::<CliResult<_>>()?;
    if psi.windows(2).any(|w| !(w[1].1 > w[0].1)) {
        return Err(CliError::Verification(
            "bifurcation map not strictly increasing".into(),
        ));
    }
    out.add(
        "timemap.csv",
        csv(
            &["c", "c_over_u_h", "t"],
            rows.iter()
                .map(|&(c, r, t)| vec![c.into(), r.into(), t.into()]),
        ),
    );
    out.add(
        "psi.csv",
        csv(
            &["xi", "lambda"],
            psi.iter().map(|&(x, l)| vec![x.into(), l.into()]),
        ),
    );
    let summary = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "u_h": eq.u_h,
        "t_h": eq.t_h,
        "infimum": time_map_infimum(params.lambda()),
        "supremum": time_map_supremum(params),
    });
    out.add("timemap.json", json(&summary));
    Ok(())
}

fn chaos(
    out: &mut Staged,
    run: &RunInfo<'_>,
    params: &Params,
    window: SymbolWindow,
    cells: usize,
) -> CliResult<()> {
    let critical = params.with_lambda(params.equilibria().big_sigma(1))?;
    let prof = build_with(&window, &critical, cells)?;
    let read_back = project(&prof)?;
    if read_back != window {
        return Err(CliError::Verification(format!(
            "projection returned {:?} instead of {:?}",
            read_back.symbols, window.symbols
        )));
    }
    let m = manifest(&window, &prof)?;
    stage_profile(out, "chaos", &prof, run, json!({ "window": window }))?;
    out.add("chaos_manifest.json", json(&m));
    Ok(())
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:e}")
}

fn regularized(
    out: &mut Staged,
    params: &Params,
    eps_list: &[f64],
    grid: Option<&[f64]>,
    points: usize,
) -> CliResult<()> {
    if points == 0 && grid.is_none() {
        return Err(invalid("--points must be at least 1"));
    }
    let mut tags: Vec<String> = eps_list.iter().map(|&e| eps_tag(e)).collect();
    tags.sort();
    tags.dedup();
    if tags.len() != eps_list.len() {
        return Err(invalid("--eps-list has repeated values"));
    }
    let sigma1 = params.equilibria().sigma(1);
    let mut summary = Vec::new();
    for &eps in eps_list {
        let upper = lambda1_eps(eps, params)?;
        let lams: Vec<f64> = match grid {
            Some(g) => g.to_vec(),
            None => (1..=points)
                .map(|k| sigma1 + (upper - sigma1) * k as f64 / (points + 1) as f64)
                .collect(),
        };
        let mut rows = Vec::with_capacity(lams.len());
        let mut failures = Vec::new();
        for (&lam, res) in lams.iter().zip(trace(eps, &lams, params)) {
            match res {
                Ok(bp) => {
                    if let Some(prof) = &bp.profile {
                        verify(prof, &format!("eps = {eps:e}, lambda = {lam}"))?;
                    }
                    rows.push(vec![
                        eps.into(),
                        lam.into(),
                        bp.slope.into(),
                        bp.sup_norm.into(),
                        bp.w_norm()?.into(),
                    ]);
                }
                Err(e @ (Error::NoBracket { .. } | Error::LambdaOutsideWindow { .. })) => {
                    failures.push(json!({ "lambda": lam, "error": e.to_string() }));
                    rows.push(vec![
                        eps.into(),
                        lam.into(),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                    ]);
                }
                Err(e) => return Err(e.into()),
            }
        }
        let file = format!("branch_eps_{}.csv", eps_tag(eps));
        out.add(
            file.clone(),
            csv(&["eps", "lam", "slope", "sup_norm", "w_norm"], rows),
        );
        summary.push(json!({
            "eps": eps,
            "file": file,
            "lambda1_eps": upper,
            "lambda1_shooting": linear_shooting_eigenvalue(eps, params)?,
            "failures": failures,
        }));
    }
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "sigma1": sigma1,
        "norm": "w_norm = 1 / max(sup|u|, sup|u'|)",
        "branches": summary,
    });
    out.add("regularized.json", json(&doc));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn orbit(
    out: &mut Staged,
    params: &Params,
    u0: f64,
    v0: f64,
    x_max: f64,
    stop_at_zero: bool,
    samples: usize,
    tol: f64,
) -> CliResult<()> {
    if samples < 2 {
        return Err(invalid("--samples must be at least 2"));
    }
    if !(x_max > 0.0) {
        return Err(invalid("--x-max must be positive"));
    }
    let mut opts = IntegrateOptions::new(tol);
    if stop_at_zero {
        opts = opts.stop(StopRule::FirstZeroU);
    }
    let traj = integrate(u0, v0, params, x_max, opts)?;
    let (t_end, _) = traj.end();
    let rows = (0..samples).map(|k| {
        let t = t_end * k as f64 / (samples - 1) as f64;
        let [u, v] = traj.eval(t);
        vec![t.into(), u.into(), v.into(), params.energy(u, v).into()]
    });
    out.add("orbit.csv", csv(&["t", "u", "v", "E"], rows));
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "u0": u0,
        "v0": v0,
        "x_max": x_max,
        "t_end": t_end,
        "tol": tol,
        "energy_drift": energy_drift(&traj, params),
        "events": traj.events,
    });
    out.add("orbit.json", json(&doc));
    Ok(())
}

fn check(params: &Params, seed: u64, cases: usize) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let critical = params.with_lambda(params.equilibria().big_sigma(1))?;
    let (lower, upper) = classical_window(params);
    let mut conjugacy = 0;
    let mut inversion = 0;
    for _ in 0..cases {
        let len = rng.gen_range(2..=12);
        let offset = rng.gen_range(-5i64..=5);
        let window =
            SymbolWindow::new(offset, (0..len).map(|_| rng.gen_range(-1i8..=1)).collect())?;
        let prof = build(&window, &critical)?;
        if project(&prof)? != window || project(&translate(&prof)?)? != shift(&window)? {
            conjugacy += 1;
        }

        let lam = lower + rng.gen_range(0.01..0.99) * (upper - lower);
        let amp = invert_amplitude(lam, params)?;
        let t = time_map_amplitude(&amp, &params.with_lambda(lam)?)?;
        if (t - 0.5 * params.length()).abs() > 1e-10 * params.length().max(1.0) {
            inversion += 1;
        }
    }
    eprintln!("conjugacy: {}/{cases} ok", cases - conjugacy);
    eprintln!("inversion: {}/{cases} ok", cases - inversion);
    if conjugacy + inversion > 0 {
        return Err(CliError::Verification(format!(
            "{conjugacy} conjugacy and {inversion} inversion failures (seed {seed})"
        )));
    }
    Ok(())
}
