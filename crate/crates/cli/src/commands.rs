use std::fs;

use serde_json::{json, Value};

use erws_core::exact::{
    classify_baseline, first_moment, first_moment_2d, second_moment_2d, second_moment_asymptotics,
    second_moment_exact, sigma2_exact, Method, MomentAlgebra,
};
use erws_core::fit::fit_power_law;
use erws_core::oracle::{enumerate_exact, enumerate_exact_2d, iterate_recurrences};
use erws_core::sim::{run_ensemble, run_ensemble_2d, EnsembleConfig, MomentCurve};
use erws_core::{Params1D, Params2D, RegimeReport};

use crate::output::{csv_writer, fmt_g17, fmt_opt, write_json};
use crate::{usage, ExactArgs, Failure, FitArgs, OracleArgs, ScanArgs, SimulateArgs, WalkArgs};

/// Largest disagreement between oracle paths before `oracle` exits with code 4.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

fn params_1d(w: &WalkArgs, s: f64) -> Result<Params1D, Failure> {
    Params1D::from_gamma(w.gamma, w.r, w.eps, s).map_err(usage)
}

fn params_2d(w: &WalkArgs, gamma_prime: f64, axis_share: f64, s: [f64; 4]) -> Result<Params2D, Failure> {
    Params2D::from_gammas(w.gamma, gamma_prime, w.r, w.eps, s, axis_share).map_err(usage)
}

pub fn cmd_exact(a: &ExactArgs) -> Result<(), Failure> {
    let params = params_1d(&a.walk, a.s)?;
    let (checkpoints, t_max) = a.checkpoints.resolve(a.t_max, a.points).map_err(usage)?;
    let expansion = second_moment_asymptotics(&params);
    let leading = expansion.leading();

    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut fallback = false;
    for &t in &checkpoints {
        let s2 = sigma2_exact(&params, t)?;
        let m2 = second_moment_exact(&params, t)?;
        fallback |= s2.method == Method::Recurrence || m2.method == Method::Recurrence;
        rows.push((t, first_moment(&params, t)?, s2.value, m2.value));
        if fallback {
            break;
        }
    }
    let method = if fallback {
        // one forward pass serves every checkpoint
        let table = iterate_recurrences(&params, t_max, &checkpoints)?;
        rows = checkpoints
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, table.m1[i], table.sigma2[i], table.m2[i]))
            .collect();
        Method::Recurrence
    } else {
        Method::ClosedForm
    };

    let mut out = csv_writer(a.out.as_deref())?;
    out.write_record(["t", "m1", "sigma2", "m2", "m2_over_t", "m2_leading_term", "method"])?;
    for (t, m1, s2, m2) in rows {
        out.write_record([
            t.to_string(),
            fmt_g17(m1),
            fmt_g17(s2),
            fmt_g17(m2),
            fmt_g17(m2 / t as f64),
            fmt_g17(leading.eval(t as f64)),
            method.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    if fallback && a.strict {
        return Err(Failure::Fallback(format!(
            "closed form is resonant at eps={}, r={}, gamma={}; values come from the recurrence",
            a.walk.eps, a.walk.r, a.walk.gamma
        )));
    }
    Ok(())
}

fn write_curve(a: &SimulateArgs, curve: &MomentCurve) -> Result<(), Failure> {
    let mut out = csv_writer(a.out.as_deref())?;
    let mut header = vec!["t", "mean_x"];
    if curve.dim == 2 {
        header.push("mean_y");
    }
    header.extend(["msd", "msd_se", "walkers"]);
    out.write_record(&header)?;
    for k in 0..curve.checkpoints.len() {
        let mut row = vec![curve.checkpoints[k].to_string()];
        row.extend(curve.mean[k].iter().map(|&v| fmt_g17(v)));
        row.push(fmt_g17(curve.msd[k]));
        row.push(fmt_g17(curve.msd_se[k]));
        row.push(curve.walkers.to_string());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let (checkpoints, _) = a.checkpoints.resolve(Some(a.t_max), a.points).map_err(usage)?;
    let workers = match a.threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let seed = a.seed.resolve();
    if matches!(a.seed, crate::args::Seed::Random) {
        eprintln!("master seed: {seed}");
    }
    let mut cfg = EnsembleConfig::new(a.walkers, a.t_max, seed)
        .with_checkpoints(checkpoints)
        .with_workers(workers);
    if let Some(cap) = a.memory_cap {
        cfg.memory_cap = cap;
    }
    let curve = match a.dim {
        1 => run_ensemble(&params_1d(&a.walk, a.s)?, &cfg)?,
        2 => {
            let s = match (a.s1, a.s2, a.s3, a.s4) {
                (None, None, None, None) => [0.25; 4],
                (Some(s1), Some(s2), Some(s3), Some(s4)) => [s1, s2, s3, s4],
                _ => return Err(usage("give all of --s1 --s2 --s3 --s4 or none")),
            };
            run_ensemble_2d(&params_2d(&a.walk, a.gamma_prime, a.axis_share, s)?, &cfg)?
        }
        d => return Err(usage(format!("--dim must be 1 or 2, got {d}"))),
    };
    write_curve(a, &curve)
}

/// Implied `(p, q)` of a 1D cell lie in `(0, 1)`.
fn admissible(r: f64, gamma: f64) -> bool {
    let inside = |v: f64| v > 0.0 && v < 1.0;
    inside(r) && inside(0.5 * (1.0 - r + gamma)) && inside(0.5 * (1.0 - r - gamma))
}

fn classify_cell(a: &ScanArgs, r: f64, gamma: f64) -> Option<RegimeReport> {
    if !admissible(r, gamma) {
        return None;
    }
    if a.baseline || a.eps == 0.0 {
        classify_baseline(gamma, r).ok()
    } else {
        Params1D::from_gamma(gamma, r, a.eps, 0.5)
            .ok()
            .map(|p| MomentAlgebra::from_params(&p).classify())
    }
}

pub fn cmd_scan(a: &ScanArgs) -> Result<(), Failure> {
    if !a.baseline && !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1) unless --baseline is set, got {}", a.eps)));
    }
    let mut cells = Vec::new();
    for r in a.r_range.values() {
        match (a.path, &a.gamma_range) {
            (Some(path), _) => cells.push((r, path.gamma(a.eps, r))),
            (None, Some(g)) => cells.extend(g.values().into_iter().map(|gamma| (r, gamma))),
            (None, None) => return Err(usage("either --gamma-range or --path is required")),
        }
    }
    let mut out = csv_writer(a.out.as_deref())?;
    out.write_record(["r", "gamma", "regime", "leading_exponent", "diffusivity", "residual_gap"])?;
    for (r, gamma) in cells {
        let row = match classify_cell(a, r, gamma) {
            Some(rep) => [
                fmt_g17(r),
                fmt_g17(gamma),
                rep.regime.as_str().to_string(),
                fmt_g17(rep.leading_exponent),
                fmt_opt(rep.diffusivity()),
                fmt_opt(rep.residual_gap),
            ],
            None => [fmt_g17(r), fmt_g17(gamma), "invalid".into(), String::new(), String::new(), String::new()],
        };
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<(), Failure> {
    if a.t == 0 {
        return Err(usage("--t must be at least 1"));
    }
    let t = a.t as u64;
    let (report, diffs) = match a.dim {
        1 => {
            let params = params_1d(&a.walk, a.s)?;
            let en = enumerate_exact(&params, a.t)?;
            let (e1, e2) = (en.m1_f64(), en.m2_f64());
            let (c1, c2) = (first_moment(&params, t)?, second_moment_exact(&params, t)?.value);
            let table = iterate_recurrences(&params, t, &[t])?;
            let (r1, r2) = (table.m1[0], table.m2[0]);
            let diffs = vec![e1 - c1, e1 - r1, c1 - r1, e2 - c2, e2 - r2, c2 - r2];
            let report = json!({
                "dim": 1,
                "t": t,
                "enumeration": {"m1": e1, "m2": e2},
                "closed_form": {"m1": c1, "m2": c2},
                "recurrence": {"m1": r1, "m2": r2},
            });
            (report, diffs)
        }
        2 => {
            let params = params_2d(&a.walk, a.gamma_prime, a.axis_share, [0.25; 4])?;
            let en = enumerate_exact_2d(&params, a.t)?;
            let (e1, e2) = (en.m1_f64(), en.m2_f64());
            let c1 = first_moment_2d(&params, t)?;
            let c2 = second_moment_2d(&params, t)?.value;
            let r2 = MomentAlgebra::from_params_2d(&params).iterate(t).1;
            let diffs = vec![e1[0] - c1[0], e1[1] - c1[1], e2 - c2, e2 - r2, c2 - r2];
            let report = json!({
                "dim": 2,
                "t": t,
                "enumeration": {"m1": e1, "m2": e2},
                "closed_form": {"m1": c1, "m2": c2},
                "recurrence": {"m1": c1, "m2": r2},
            });
            (report, diffs)
        }
        d => return Err(usage(format!("--dim must be 1 or 2, got {d}"))),
    };
    let max_abs_diff = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mut report = report;
    report["max_abs_diff"] = json!(max_abs_diff);
    write_json(a.out.as_deref(), &report)?;
    if max_abs_diff > ORACLE_TOLERANCE {
        return Err(Failure::Mismatch(format!("max_abs_diff = {max_abs_diff:e} exceeds {ORACLE_TOLERANCE:e}")));
    }
    Ok(())
}

pub fn cmd_fit(a: &FitArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.input)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let t_col = find("t").ok_or_else(|| anyhow::anyhow!("input has no `t` column"))?;
    let (name, y_col) = match &a.column {
        Some(c) => (c.clone(), find(c).ok_or_else(|| anyhow::anyhow!("input has no `{c}` column"))?),
        None => ["msd", "m2"]
            .iter()
            .find_map(|c| find(c).map(|i| (c.to_string(), i)))
            .ok_or_else(|| anyhow::anyhow!("input has neither `msd` nor `m2` column"))?,
    };
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64, Failure> {
            let field = record.get(i).unwrap_or("");
            field
                .parse::<f64>()
                .map_err(|_| anyhow::anyhow!("row {}: `{field}` is not a number", line + 2).into())
        };
        let t = parse(t_col)?;
        if t >= a.window.0 as f64 && t <= a.window.1 as f64 {
            points.push((t, parse(y_col)?));
        }
    }
    let fit = fit_power_law(&points)?;
    let report: Value = json!({
        "exponent": fit.exponent,
        "log_coefficient": fit.log_coefficient,
        "r_squared": fit.r_squared,
        "points": points.len(),
        "column": name,
    });
    write_json(a.out.as_deref(), &report)?;
    Ok(())
}
