//! Scenario execution. Replication r of every ensemble uses the stream
//! (seed, r); limit-process samples use its child stream `TAG_LIMIT`, so all
//! numbers are fixed by the serialized scenario.

use ctrwkit_core::cadlag::{GridPath, Interpolation, StepPath};
use ctrwkit_core::decompositions::{
    default_gdca_gamma, default_gdci_gamma, estimate_bn, flattens, gd_statistics, gdca_statistic, gdci_moment_sums,
    split_martingale, split_uv, VniFamily,
};
use ctrwkit_core::error::Result as CoreResult;
use ctrwkit_core::integral::{
    adversarial_experiment, func, grid_integral, ito_integral, simulate, upsilon_sample, Integrand,
};
use ctrwkit_core::metrics::{d_j1, d_m1, d_uniform};
use ctrwkit_core::processes::{gen_levy, gen_time_changed_levy, Coupling, ProcessConfig};
use ctrwkit_core::rng::{sample_stable, SeedSpec};
use ctrwkit_core::runner::Runner;
use ctrwkit_core::sde::{
    coef2, coef3, solve_ext_sddn, solve_s_limit, solve_sdd_limit, solve_sddn, solve_sn, Growth, Kernel, SddeSpec,
    SdeSpec,
};
use ctrwkit_core::stats::{ks_two_sample, median, sorted, wasserstein1, DiagnosticReport, Estimate, ParamValue};

use crate::bundle::write_bundle;
use crate::error::{config, CliError, Result};
use crate::expr::parse;
use crate::io::read_step_path;
use crate::scenario::{IntegralSpec, Kind, Scenario};

pub const TAG_LIMIT: u64 = 101;
const TAG_BN: u64 = 102;

pub fn rep_seed(sc: &Scenario, r: usize) -> SeedSpec {
    SeedSpec::new(sc.seed, r as u64)
}

pub fn limit_seed(sc: &Scenario, r: usize) -> SeedSpec {
    rep_seed(sc, r).child(TAG_LIMIT)
}

fn replicate<R, T, F>(runner: &R, reps: usize, f: F) -> Result<Vec<T>>
where
    R: Runner,
    T: Send,
    F: Fn(usize) -> CoreResult<T> + Sync + Send,
{
    Ok(runner.run(reps, f).into_iter().collect::<CoreResult<Vec<T>>>()?)
}

fn header(sc: &Scenario) -> DiagnosticReport {
    DiagnosticReport::new(sc.name(), sc.seed)
        .param("kind", sc.kind().name())
        .param("reps", sc.reps)
        .param("horizon", sc.horizon)
        .param("n", sc.n.iter().map(|&n| n as f64).collect::<Vec<_>>())
        .param("config", sc.to_toml())
}

fn absorb(report: &mut DiagnosticReport, other: DiagnosticReport) {
    for (k, v) in other.params {
        report.params.entry(k).or_insert(v);
    }
    report.estimates.extend(other.estimates);
}

fn ks(name: String, a: &[f64], b: &[f64]) -> Result<Estimate> {
    let r = ks_two_sample(a, b)?;
    Ok(Estimate::exact(name, r.statistic, a.len().min(b.len()) as u64))
}

fn config_for(sc: &Scenario, n: u64) -> Result<ProcessConfig> {
    sc.process()?.build(n)
}

/// Limit of X^n on the scenario grid: ψ Z_{D^{-1}} for a CTRW, ψ Z for a
/// moving average, together with D^{-1} (the identity for a moving average).
pub fn limit_driver(cfg: &ProcessConfig, horizon: f64, step: f64, seed: SeedSpec) -> CoreResult<(GridPath, GridPath)> {
    let z = cfg.innovation.limit_law()?;
    let psi = cfg.psi();
    match cfg.waiting {
        Some(w) => {
            let d_scale = w.limit_law()?.scale;
            let tc = gen_time_changed_levy(&z, w.beta, d_scale, horizon, step, seed)?;
            let x = tc.path.values().iter().map(|v| psi * v).collect();
            Ok((tc.d_inv, GridPath::new(step, x, Interpolation::Step)?))
        }
        None => {
            let x = gen_levy(&z.scaled(psi), horizon, step, seed)?;
            let ident = (0..x.len()).map(|k| x.time(k)).collect();
            Ok((GridPath::new(step, ident, Interpolation::Linear)?, x))
        }
    }
}

fn no_coupled_limit(cfg: &ProcessConfig) -> Result<()> {
    if cfg.coupling == Coupling::MagnitudeCoupled {
        return Err(config("no limit simulation for coupled CTRWs; set compare_limit = false"));
    }
    Ok(())
}

pub fn run_scenario<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    sc.validate()?;
    match sc.kind() {
        Kind::Simulate => run_simulate(sc, runner),
        Kind::Attraction => run_attraction(sc, runner),
        Kind::Gd => run_gd(sc, runner),
        Kind::Gdca => run_gdca(sc, runner),
        Kind::Gdci => run_gdci(sc, runner),
        Kind::Integrals => run_integrals(sc, runner),
        Kind::Adversarial => {
            let cfg = config_for(sc, sc.n[0])?;
            let mut report = header(sc);
            absorb(&mut report, adversarial_experiment(&cfg, &sc.n, sc.reps, sc.seed, runner)?);
            Ok(report)
        }
        Kind::Sde => run_sde(sc, runner),
        Kind::Sdde => run_sdde(sc, runner),
        Kind::Metrics => run_metrics(sc),
    }
}

fn run_simulate<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let mut report = header(sc);
    let paths_dir = sc.output.as_ref().and_then(|o| o.paths.clone());
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let bundles = replicate(runner, sc.reps, |r| simulate(&cfg, sc.horizon, rep_seed(sc, r)))?;
        let finals: Vec<f64> = bundles.iter().map(|b| b.x.final_value()).collect();
        let events: Vec<f64> = bundles.iter().map(|b| b.jump_count() as f64).collect();
        report.push(Estimate::mean(format!("n={n}.x_T.mean"), &finals));
        report.push(Estimate::quantile(format!("n={n}.x_T.median"), &sorted(&finals), 0.5));
        report.push(Estimate::mean(format!("n={n}.events.mean"), &events));
        if let Some(dir) = &paths_dir {
            for (r, b) in bundles.iter().enumerate() {
                write_bundle(dir, &format!("n{n}.r{r}"), sc.process()?, b)?;
            }
        }
    }
    Ok(report)
}

fn run_attraction<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let mut report = header(sc);
    let cfg0 = config_for(sc, sc.n[0])?;
    let coupled = cfg0.coupling == Coupling::MagnitudeCoupled;
    let (t, step, lreps) = (sc.horizon, sc.limit_step(), sc.limit_reps());
    // limit samples: ψ Z_{D^{-1}_T} (or ψ Z_T) and D^{-1}_T
    let (x_lim, d_lim) = if coupled {
        (Vec::new(), Vec::new())
    } else {
        match cfg0.waiting {
            None => {
                let law = cfg0.innovation.limit_law()?.scaled(cfg0.psi()).increment(t);
                (sample_stable(&law, SeedSpec::new(sc.seed, 0).child(TAG_LIMIT), lreps)?, Vec::new())
            }
            Some(_) => {
                let pairs = replicate(runner, lreps, |r| {
                    let (d_inv, x) = limit_driver(&cfg0, t, step, limit_seed(sc, r))?;
                    Ok((x.final_value(), d_inv.final_value()))
                })?;
                pairs.into_iter().unzip()
            }
        }
    };
    let mut prev: Option<Vec<f64>> = None;
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let nb = (n as f64).powf(-cfg.time_exponent());
        let pairs = replicate(runner, sc.reps, |r| {
            let b = simulate(&cfg, t, rep_seed(sc, r))?;
            Ok((b.x.final_value(), b.counting.final_value() * nb))
        })?;
        let (xs, ds): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        report.push(Estimate::quantile(format!("n={n}.x_T.median"), &sorted(&xs), 0.5));
        if !coupled {
            report.push(ks(format!("n={n}.ks"), &xs, &x_lim)?);
            if cfg.waiting.is_some() {
                report.push(ks(format!("n={n}.ks_counting"), &ds, &d_lim)?);
            }
        }
        if let Some(p) = &prev {
            report.push(ks(format!("n={n}.ks_prev"), &xs, p)?);
        }
        prev = Some(xs);
    }
    Ok(report)
}

fn run_gd<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let spec = sc.gd.as_ref().unwrap();
    let mut report = header(sc).param("a", spec.a);
    let mut jump_ok = true;
    let mut tails: Vec<Vec<Estimate>> = Vec::new();
    for (i, &n) in sc.n.iter().enumerate() {
        let cfg = config_for(sc, n)?;
        let splits =
            replicate(runner, sc.reps, |r| split_martingale(&simulate(&cfg, sc.horizon, rep_seed(sc, r))?, spec.a))?;
        let m_final: Vec<f64> = splits.iter().map(|s| s.m.value_at(sc.horizon)).collect();
        report.push(Estimate::mean(format!("n={n}.mean_M"), &m_final));
        let stats = gd_statistics(&[(n, splits)], sc.horizon, &spec.r_grid, &spec.c_grid, sc.seed)?;
        jump_ok &= stats.flag("jump_bound_2a").unwrap_or(false);
        tails.push(spec.r_grid.iter().map(|r| stats.get(&format!("n={n}.tv_tail.R={r}")).unwrap().clone()).collect());
        let (flags, rest): (Vec<Estimate>, Vec<Estimate>) =
            stats.estimates.into_iter().partition(|e| e.name.starts_with("flag."));
        drop(flags);
        report.estimates.extend(rest);
        let bn = estimate_bn(
            &cfg.innovation,
            n,
            cfg.time_exponent(),
            spec.a,
            spec.bn_reps,
            SeedSpec::new(sc.seed, i as u64).child(TAG_BN),
        )?;
        report.push(bn.estimate);
        report.push(Estimate::exact(format!("bn.n={n}.closed_form"), bn.closed_form, 1));
    }
    report.push_flag("jump_bound_2a", jump_ok);
    if tails.len() >= 2 {
        let (mid, last) = (&tails[tails.len() - 2], &tails[tails.len() - 1]);
        for (k, r) in spec.r_grid.iter().enumerate() {
            report.push_flag(&format!("tv_tail_flattens.R={r}"), flattens(&mid[k], &last[k]));
        }
    }
    Ok(report)
}

fn run_gdca<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let cfg0 = config_for(sc, sc.n[0])?;
    let gamma = sc
        .gdca
        .as_ref()
        .and_then(|g| g.gamma)
        .unwrap_or_else(|| default_gdca_gamma(cfg0.innovation.alpha, cfg0.time_exponent()));
    let mut report = header(sc).param("gamma", gamma);
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let vals = replicate(runner, sc.reps, |r| {
            let b = simulate(&cfg, sc.horizon, rep_seed(sc, r))?;
            gdca_statistic(&split_uv(&b)?, gamma, &b)
        })?;
        report.push(Estimate::quantile(format!("n={n}.median"), &sorted(&vals), 0.5));
        report.push(Estimate::mean(format!("n={n}.mean"), &vals));
    }
    Ok(report)
}

fn run_gdci<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let cfg0 = config_for(sc, sc.n[0])?;
    let spec = sc.gdci.clone().unwrap_or(crate::scenario::GdciSpec { gamma: None, k: 2.0 });
    let gamma = spec.gamma.unwrap_or_else(|| default_gdci_gamma(cfg0.innovation.alpha));
    let mut report = header(sc).param("gamma", gamma).param("K", spec.k);
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let bundles = replicate(runner, sc.reps, |r| simulate(&cfg, sc.horizon, rep_seed(sc, r)))?;
        let fam = VniFamily::from_bundles(&bundles, gamma)?;
        drop(bundles);
        let sums = gdci_moment_sums(&fam, spec.k)?;
        for (label, mut e, exact) in [("large", sums.large, sums.large_exact), ("small", sums.small, sums.small_exact)]
        {
            e.name = format!("n={n}.{label}");
            report.push(e);
            report.push(Estimate::exact(format!("n={n}.{label}_exact"), exact, 1));
        }
    }
    Ok(report)
}

/// Integrand of an `[integral]` section.
pub fn build_integrand(spec: &IntegralSpec, cfg: &ProcessConfig) -> Result<Integrand> {
    let kind = spec.integrand.as_str();
    Ok(match kind {
        "const" => {
            let v = spec.value;
            Integrand::Deterministic(func(move |_| v))
        }
        "adversarial" => Integrand::adversarial(),
        "lipschitz" => {
            let g = parse(&spec.base, &["y"])?;
            let gamma = spec.gamma.unwrap_or(0.5 * cfg.time_exponent() / cfg.innovation.alpha);
            Integrand::Lipschitz { c: spec.c, gamma, base: func(move |y| g.eval(&[y])), base_sup: spec.base_sup }
        }
        _ => {
            let src =
                kind.strip_prefix("deterministic:").ok_or_else(|| config(format!("unknown integrand `{kind}`")))?;
            let f = parse(src, &["t"])?;
            Integrand::Deterministic(func(move |t| f.eval(&[t])))
        }
    })
}

fn run_integrals<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let spec = sc.integral.as_ref().unwrap();
    let cfg0 = config_for(sc, sc.n[0])?;
    let h = build_integrand(spec, &cfg0)?;
    let t = sc.horizon;
    let mut report = header(sc).param("integrand", spec.integrand.as_str()).param("eps", spec.eps.clone());
    if let Integrand::Lipschitz { gamma, .. } = &h {
        report = report.param("gamma", *gamma);
    }
    let limit = if spec.compare_limit {
        if spec.integrand == "adversarial" {
            return Err(config("the adversarial integrand has no limit scheme; set compare_limit = false"));
        }
        no_coupled_limit(&cfg0)?;
        let step = sc.limit_step();
        let vals = replicate(runner, sc.limit_reps(), |r| {
            let (_, x) = limit_driver(&cfg0, t, step, limit_seed(sc, r))?;
            Ok(grid_integral(&h, &x, t)?.final_value())
        })?;
        report.push(Estimate::quantile("limit.median", &sorted(&vals), 0.5));
        Some(vals)
    } else {
        None
    };
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let rows = replicate(runner, sc.reps, |r| {
            let b = simulate(&cfg, t, rep_seed(sc, r))?;
            let v = ito_integral(&h, &b.x, t, Some(&b))?.final_value();
            let ups = spec.eps.iter().map(|&e| upsilon_sample(&h, e, spec.m, &b, t)).collect::<CoreResult<Vec<_>>>()?;
            Ok((v, ups))
        })?;
        let vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
        report.push(Estimate::quantile(format!("n={n}.median"), &sorted(&vals), 0.5));
        if let Some(lim) = &limit {
            report.push(ks(format!("n={n}.ks_limit"), &vals, lim)?);
        }
        for (k, e) in spec.eps.iter().enumerate() {
            let ups: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            let mut est = Estimate::mean(format!("n={n}.eps={e}"), &ups);
            est.ci_low = est.ci_low.max(0.0);
            report.push(est);
        }
    }
    Ok(report)
}

fn run_sde<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let s = sc.sde.as_ref().unwrap();
    let vars = ["t", "ytilde", "y"];
    let (b, mu, sigma) = (parse(&s.b, &vars)?, parse(&s.mu, &vars)?, parse(&s.sigma, &vars)?);
    let mut spec = SdeSpec::new(
        coef3(move |t, d, x| b.eval(&[t, d, x])),
        coef3(move |t, d, x| mu.eval(&[t, d, x])),
        coef3(move |t, d, x| sigma.eval(&[t, d, x])),
        s.x0,
    );
    if let Some(g) = &s.growth {
        spec = spec.with_growth(Growth::new(g.k, g.c, g.p)?);
    }
    if s.mesh_divisions == 0 {
        return Err(config("mesh_divisions must be positive"));
    }
    let t = sc.horizon;
    let mesh = t / s.mesh_divisions as f64;
    let mut report = header(sc);
    if s.growth.is_some() {
        report.push_flag("growth_certificate", spec.spot_check(t, 10.0).is_empty());
    }
    let cfg0 = config_for(sc, sc.n[0])?;
    let limit = if s.compare_limit {
        no_coupled_limit(&cfg0)?;
        let step = sc.limit_step();
        let vals = replicate(runner, sc.limit_reps(), |r| {
            let (d_inv, x) = limit_driver(&cfg0, t, step, limit_seed(sc, r))?;
            Ok(solve_s_limit(&spec, &d_inv, &x)?.path.final_value())
        })?;
        report.push(Estimate::mean("limit.mean", &vals));
        push_halves(&mut report, &vals)?;
        Some(vals)
    } else {
        None
    };
    let mut prev: Option<Vec<f64>> = None;
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let scale = (n as f64).powf(-cfg.time_exponent());
        let rows = replicate(runner, sc.reps, |r| {
            let b = simulate(&cfg, t, rep_seed(sc, r))?;
            let sol = solve_sn(&spec, &b.counting.scaled(scale), &b.x, mesh)?;
            Ok((sol.path.final_value(), !sol.warnings.is_empty()))
        })?;
        let vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
        sde_estimates(&mut report, n, &vals, rows.iter().filter(|r| r.1).count(), limit.as_deref(), prev.as_deref())?;
        prev = Some(vals);
    }
    Ok(report)
}

// W1 between the two halves of the limit sample: the sampling noise level of W1.
fn push_halves(report: &mut DiagnosticReport, vals: &[f64]) -> Result<()> {
    let (a, b) = vals.split_at(vals.len() / 2);
    if !a.is_empty() {
        report.push(Estimate::exact("limit.w1_halves", wasserstein1(a, &b[..a.len()])?, a.len() as u64));
    }
    Ok(())
}

fn sde_estimates(
    report: &mut DiagnosticReport,
    n: u64,
    vals: &[f64],
    warned: usize,
    limit: Option<&[f64]>,
    prev: Option<&[f64]>,
) -> Result<()> {
    report.push(Estimate::mean(format!("n={n}.mean"), vals));
    report.push(Estimate::exact(format!("n={n}.median"), median(vals), vals.len() as u64));
    report.push(Estimate::exact(format!("n={n}.warned"), warned as f64, vals.len() as u64));
    if let Some(lim) = limit {
        report.push(Estimate::exact(format!("n={n}.w1_limit"), wasserstein1(vals, lim)?, vals.len() as u64));
        report.push(ks(format!("n={n}.ks_limit"), vals, lim)?);
    }
    if let Some(p) = prev {
        report.push(Estimate::exact(format!("n={n}.w1_prev"), wasserstein1(vals, p)?, vals.len() as u64));
    }
    Ok(())
}

fn run_sdde<R: Runner>(sc: &Scenario, runner: &R) -> Result<DiagnosticReport> {
    let s = sc.sdde.as_ref().unwrap();
    let cfg0 = config_for(sc, sc.n[0])?;
    if cfg0.waiting.is_some() {
        return Err(config("sdde scenarios are driven by a moving average; remove [process.waiting]"));
    }
    let vars = ["t", "xdel"];
    let (b, sigma) = (parse(&s.b, &vars)?, parse(&s.sigma, &vars)?);
    let mut spec = SddeSpec::constant_eta(
        coef2(move |t, x| b.eval(&[t, x])),
        coef2(move |t, x| sigma.eval(&[t, x])),
        s.delay,
        s.eta,
        cfg0.psi(),
    )?;
    if let Some(k) = &s.kernel {
        let phi = parse(&k.phi, &["t", "s", "y"])?;
        spec = spec.with_kernel(Kernel {
            phi: coef3(move |t, u, y| phi.eval(&[t, u, y])),
            bound: k.bound,
            lipschitz: k.lipschitz,
        });
    }
    if let Some(bd) = s.bound {
        spec = spec.with_bound(bd);
    }
    if s.mesh_divisions == 0 {
        return Err(config("mesh_divisions must be positive"));
    }
    let t = sc.horizon;
    let mesh = t / s.mesh_divisions as f64;
    let solve =
        |z: &StepPath| if spec.kernel.is_some() { solve_ext_sddn(&spec, z, mesh) } else { solve_sddn(&spec, z, mesh) };
    let mut report = header(sc);
    if s.bound.is_some() {
        report.push_flag("bound_spot_check", spec.spot_check(t).is_empty());
    }
    let limit = if s.compare_limit {
        let z = cfg0.innovation.limit_law()?;
        let step = sc.limit_step();
        let vals = replicate(runner, sc.limit_reps(), |r| {
            let zp = gen_levy(&z, t, step, limit_seed(sc, r))?;
            Ok(solve_sdd_limit(&spec, &zp)?.path.final_value())
        })?;
        report.push(Estimate::mean("limit.mean", &vals));
        push_halves(&mut report, &vals)?;
        Some(vals)
    } else {
        None
    };
    let mut prev: Option<Vec<f64>> = None;
    for &n in &sc.n {
        let cfg = config_for(sc, n)?;
        let rows = replicate(runner, sc.reps, |r| {
            let b = simulate(&cfg, t, rep_seed(sc, r))?;
            let sol = solve(&b.x)?;
            Ok((sol.path.final_value(), !sol.warnings.is_empty()))
        })?;
        let vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
        sde_estimates(&mut report, n, &vals, rows.iter().filter(|r| r.1).count(), limit.as_deref(), prev.as_deref())?;
        prev = Some(vals);
    }
    Ok(report)
}

/// The M1/J1 separation pair: two half-jumps 1/n apart against one jump.
pub fn separation_witness(n: u64) -> CoreResult<(StepPath, StepPath)> {
    let h = 1.0 / n as f64;
    let xn = StepPath::from_jumps(0.0, &[(0.5 - h, 0.5), (0.5, 0.5)], 1.0)?;
    let x = StepPath::from_jumps(0.0, &[(0.5, 1.0)], 1.0)?;
    Ok((xn, x))
}

fn metric_estimates(report: &mut DiagnosticReport, prefix: &str, x: &StepPath, y: &StepPath, res: usize) -> Result<()> {
    let m1 = d_m1(x, y, res)?;
    report.push(Estimate::exact(format!("{prefix}d_uniform"), d_uniform(x, y)?.value, 1));
    report.push(Estimate::exact(format!("{prefix}d_j1"), d_j1(x, y)?.value, 1));
    report.push(Estimate::exact(format!("{prefix}d_m1"), m1.value, 1));
    report.push(Estimate::exact(format!("{prefix}d_m1_mesh"), m1.mesh, 1));
    Ok(())
}

fn run_metrics(sc: &Scenario) -> Result<DiagnosticReport> {
    let m = sc.metrics.as_ref().unwrap();
    let mut report = header(sc).param("resolution", m.resolution);
    if m.witness {
        for &n in &sc.n {
            let (xn, x) = separation_witness(n)?;
            metric_estimates(&mut report, &format!("n={n}."), &xn, &x, m.resolution)?;
        }
        return Ok(report);
    }
    let (px, py) = (m.x.as_ref().unwrap(), m.y.as_ref().unwrap());
    let (x, y) = (read_step_path(px, None)?, read_step_path(py, None)?);
    let h = m.horizon.unwrap_or(x.horizon().max(y.horizon()));
    let with_h = |p: &StepPath, file: &std::path::Path| {
        StepPath::new(p.times().to_vec(), p.values().to_vec(), h).map_err(|e| CliError::format(file, e))
    };
    let (x, y) = (with_h(&x, px)?, with_h(&y, py)?);
    report.params.insert("x".into(), ParamValue::Text(px.display().to_string()));
    report.params.insert("y".into(), ParamValue::Text(py.display().to_string()));
    metric_estimates(&mut report, "", &x, &y, m.resolution)?;
    Ok(report)
}
