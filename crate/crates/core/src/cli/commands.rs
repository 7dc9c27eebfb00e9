use serde_json::Value;

use crate::analytic::{
    critical_limit_constant, large_eps_limit_constant, small_ball_asymptotic, small_ball_bounds, small_ball_sup,
};
use crate::error::{parameter, Result};
use crate::montecarlo::{
    condition_profile, estimate_small_dev, rate_regression, truncation_stats, LogT, McConfig,
};
use crate::weights::{
    classify_chung_family, classify_psi_family, increment_diagnostic, j_ab_checkpoints, j_chung_checkpoints,
    kernel_sum_direct, kernel_sum_integral, scaled_limit_check, EpsilonSchedule, KernelSumResult, PsiSpec,
    WeightParams,
};

use super::args::*;
use super::output::Record;

fn kv(pairs: &[(&str, Value)]) -> Vec<(String, Value)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn schedule(tau: f64) -> EpsilonSchedule {
    if tau == 0.0 {
        EpsilonSchedule::zero()
    } else {
        EpsilonSchedule::tau_over_loglog(tau)
    }
}

pub fn smallball(a: &SmallballArgs) -> Result<Vec<Record>> {
    let (x, tol) = (a.x.unwrap(), a.tol.unwrap());
    let r = small_ball_sup(x, tol)?;
    let base = kv(&[("x", x.into()), ("tol", tol.into())]);
    let (lo, hi) = small_ball_bounds(x)?;
    Ok(vec![
        Record::new("probability")
            .params(&base)
            .param("representation", serde_json::to_value(r.representation).unwrap())
            .param("terms", r.terms_used)
            .param("error_bound", r.error_bound)
            .value(r.value),
        Record::new("asymptotic").params(&base).value(small_ball_asymptotic(x)?),
        Record::new("lower_bound").params(&base).value(lo),
        Record::new("upper_bound").params(&base).value(hi),
    ])
}

pub fn constants(a: &ConstantsArgs) -> Result<Vec<Record>> {
    let (b, theorem) = (a.b.unwrap(), a.theorem.unwrap());
    let rec = match theorem {
        1 => {
            let (aa, tau) = (a.a.unwrap(), a.tau.unwrap());
            let c = critical_limit_constant(aa, b, tau)?;
            Record::new("critical_constant")
                .params(&kv(&[("theorem", 1.into()), ("a", aa.into()), ("b", b.into()), ("tau", tau.into())]))
                .value(c.value)
        }
        2 => {
            let c = large_eps_limit_constant(b)?;
            Record::new("large_eps_constant")
                .params(&kv(&[("theorem", 2.into()), ("b", b.into())]))
                .value(c.value)
        }
        t => return Err(parameter(format!("--theorem must be 1 or 2, got {t}"))),
    };
    Ok(vec![rec])
}

pub fn series(s: &SeriesArgs) -> Result<Vec<Record>> {
    let (a, b, eps, tau) = (s.a.unwrap(), s.b.unwrap(), s.eps.unwrap(), s.tau.unwrap());
    let params = WeightParams::new(a, b)?;
    let mode = s.mode.unwrap();
    let mut base = kv(&[("a", a.into()), ("b", b.into()), ("eps", eps.into())]);
    match mode {
        SeriesMode::Direct => {
            let n_max = s.nmax.unwrap();
            base.extend(kv(&[("mode", "direct".into()), ("nmax", n_max.into())]));
            let r = kernel_sum_direct(params, eps, n_max, None)?;
            let integral = kernel_sum_integral(params, eps)?;
            let (lo, hi) = r.bracket.expect("direct mode brackets");
            Ok(vec![
                Record::new("partial_sum").params(&base).value(r.partial_sum),
                Record::new("tail_bound").params(&base).value(r.tail_bound),
                Record::new("bracket_lo").params(&base).value(lo).reference(integral),
                Record::new("bracket_hi").params(&base).value(hi).reference(integral),
                Record::new("integral").params(&base).value(integral),
            ])
        }
        SeriesMode::Integral => {
            base.extend(kv(&[("mode", "integral".into()), ("tau", tau.into())]));
            let integral = kernel_sum_integral(params, eps)?;
            let row = scaled_limit_check(params, schedule(tau), &[eps])?[0];
            Ok(vec![
                Record::new("integral").params(&base).value(integral),
                Record::new("scaled")
                    .params(&base)
                    .value(row.scaled_value)
                    .reference(row.reference)
                    .deviation(row.deviation),
                Record::new("scaled_finite_eps")
                    .params(&base)
                    .value(row.finite_eps_value)
                    .reference(row.reference)
                    .deviation(row.finite_eps_value / row.reference - 1.0),
            ])
        }
    }
}

fn dist_params(d: &DistArgs) -> Vec<(String, Value)> {
    kv(&[("dist", d.spec().summary().into())])
}

pub fn mc(m: &McArgs, seed: u64, threads: usize) -> Result<Vec<Record>> {
    let dist = m.dist.spec();
    let (n, eps, tau, reps) = (m.n.unwrap(), m.eps.unwrap(), m.tau.unwrap(), m.reps.unwrap());
    let cfg = McConfig::new(reps, seed).with_threads(threads);
    let e = estimate_small_dev(&dist, n, eps, schedule(tau), &cfg, None)?;
    Ok(vec![Record::new("p_hat")
        .params(&dist_params(&m.dist))
        .params(&kv(&[
            ("n", n.into()),
            ("eps", eps.into()),
            ("tau", tau.into()),
            ("reps", reps.into()),
            ("threshold", e.threshold.into()),
            ("successes", e.successes.into()),
        ]))
        .value(e.p_hat)
        .stderr(e.stderr)
        .reference(e.reference)])
}

pub fn sweep(s: &SweepArgs, seed: u64, threads: usize) -> Result<Vec<Record>> {
    let dist = s.dist.spec();
    let (eps, reps) = (s.eps.unwrap(), s.reps.unwrap());
    let grid = s.ngrid.clone().unwrap();
    let cfg = McConfig::new(reps, seed).with_threads(threads);
    let r = rate_regression(&dist, eps, &grid, &cfg, None)?;
    let base = [dist_params(&s.dist), kv(&[("eps", eps.into()), ("reps", reps.into())])].concat();
    let mut out: Vec<Record> = r
        .estimates
        .iter()
        .map(|e| {
            Record::new("p_hat")
                .params(&base)
                .param("n", e.n)
                .value(e.p_hat)
                .stderr(e.stderr)
                .reference(e.reference)
        })
        .collect();
    out.push(
        Record::new("slope")
            .params(&base)
            .param("decreasing", r.decreasing_within(2.0))
            .value(r.slope)
            .reference(r.expected_slope),
    );
    out.push(Record::new("intercept").params(&base).value(r.intercept));
    Ok(out)
}

pub fn truncate(t: &TruncateArgs, seed: u64, threads: usize) -> Result<Vec<Record>> {
    let dist = t.dist.spec();
    let (n, p, reps) = (t.n.unwrap(), t.p.unwrap(), t.reps.unwrap());
    let cfg = McConfig::new(reps, seed).with_threads(threads);
    let s = truncation_stats(&dist, n, p, &cfg)?;
    let base = [dist_params(&t.dist), kv(&[("n", n.into()), ("p", p.into()), ("reps", reps.into())])].concat();
    let q = s.delta_quantiles;
    let mut out = vec![
        Record::new("threshold").params(&base).value(s.threshold),
        Record::new("b_n").params(&base).value(s.b_n).reference(n as f64 * dist.variance()),
        Record::new("b_n_ratio").params(&base).value(s.b_n_over_n_sigma2).reference(1.0),
    ];
    for (name, v) in [
        ("delta_min", q.min),
        ("delta_q50", q.q50),
        ("delta_q90", q.q90),
        ("delta_q99", q.q99),
        ("delta_max", q.max),
        ("delta_mean", q.mean),
    ] {
        out.push(Record::new(name).params(&base).value(v));
    }
    Ok(out)
}

/// Decades from 10³ below `n_max`, then `n_max` itself.
fn decade_checkpoints(n_max: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = (3..20).map(|k| 10u64.pow(k)).take_while(|&c| c < n_max).collect();
    cps.push(n_max);
    cps
}

pub fn integral_test(t: &IntegralTestArgs) -> Result<Vec<Record>> {
    let (a, b, n_max) = (t.a.unwrap(), t.b.unwrap(), t.nmax.unwrap());
    if n_max < 100_000 {
        return Err(parameter(format!("--nmax must be at least 1e5, got {n_max}")));
    }
    let params = WeightParams::new(a, b)?;
    let family = t.family.unwrap();
    let (psi, mut base) = match family {
        PsiFamily::CLoglog => {
            let c = t.c.unwrap();
            (PsiSpec::c_loglog(c)?, kv(&[("family", "c-loglog".into()), ("c", c.into())]))
        }
        PsiFamily::Tabulated => {
            let pts = t.points.clone().unwrap();
            (PsiSpec::tabulated(parse_points(&pts)?)?, kv(&[("family", "tabulated".into()), ("points", pts.into())]))
        }
    };
    base.extend(kv(&[("a", a.into()), ("b", b.into()), ("nmax", n_max.into())]));
    let cps = decade_checkpoints(n_max);
    let jab = j_ab_checkpoints(&psi, params, &cps, None)?;
    let jc = j_chung_checkpoints(&psi, &cps, None)?;

    let mut out = Vec::new();
    let partial_rows = |name: &str, rows: &[KernelSumResult], out: &mut Vec<Record>| {
        for r in rows {
            out.push(
                Record::new(name)
                    .params(&base)
                    .param("n", r.n_max)
                    .param("tail_bound", if r.tail_bound.is_finite() { Value::from(r.tail_bound) } else { "inf".into() })
                    .value(r.partial_sum),
            );
        }
    };
    partial_rows("j_ab_partial", &jab, &mut out);
    partial_rows("j_partial", &jc, &mut out);

    let boundary = match family {
        PsiFamily::CLoglog => {
            let c = t.c.unwrap();
            let boundary = |aa: f64| (1.0 / (c * c) - 1.0 - aa).abs() < 1e-12;
            Some((
                classify_psi_family(c, params),
                classify_chung_family(c),
                boundary(a),
                boundary(0.0),
            ))
        }
        PsiFamily::Tabulated => None,
    };
    for (name, parts, b_eff, analytic) in [
        ("verdict_j_ab", &jab, b, boundary.map(|v| (v.0, v.2))),
        ("verdict_j", &jc, 1.0, boundary.map(|v| (v.1, v.3))),
    ] {
        let diag = increment_diagnostic(parts, b_eff)?;
        let verdict = analytic.map(|v| v.0).unwrap_or(diag.verdict);
        let mut rec = Record::new(name)
            .params(&base)
            .param("verdict", verdict.to_string())
            .param("diagnostic_verdict", diag.verdict.to_string())
            .param("last_ratio", *diag.ratios.last().unwrap())
            .value(diag.local_exponent);
        if let Some((_, true)) = analytic {
            let note = "boundary case: summand decays like (log log n)^b/(n log n), so the series diverges";
            log::warn!("{name}: {note}");
            rec = rec.param("note", note);
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn condition(c: &ConditionArgs) -> Result<Vec<Record>> {
    let dist = c.dist.spec();
    let mut grid: Vec<(String, Value, LogT)> = Vec::new();
    if let Some(ts) = &c.tgrid {
        for &t in ts {
            grid.push(("t".into(), t.into(), LogT::from_t(t)?));
        }
    }
    if let Some(ks) = &c.kgrid {
        for k in parse_kgrid(ks)? {
            grid.push(("k".into(), k.into(), LogT::atom(k)));
        }
    }
    let levels: Vec<LogT> = grid.iter().map(|g| g.2).collect();
    let rows = condition_profile(&dist, &levels)?;
    Ok(grid
        .iter()
        .zip(rows)
        .map(|((key, v, _), p)| {
            Record::new("profile")
                .params(&dist_params(&c.dist))
                .param(key, v.clone())
                .param("ln_t", p.ln_t)
                .param("loglog_t", p.loglog_t)
                .param("tail_second_moment", p.tail_second_moment)
                .value(p.value)
        })
        .collect())
}
