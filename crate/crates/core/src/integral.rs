//! Itô sums against step and grid integrators, integrand discretisation,
//! the Υ control quantity and the adversarial-integrand experiment.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cadlag::{GridPath, Interpolation, StepPath};
use crate::error::{param, Error, Result};
use crate::processes::{gen_ctrw, gen_moving_average, InnovationRecord, ProcessConfig, SimulationBundle};
use crate::rng::{InnovationMode, SeedSpec};
use crate::runner::Runner;
use crate::stats::{sorted, DiagnosticReport, Estimate};

pub type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Func {
    Arc::new(f)
}

#[derive(Clone)]
pub enum Integrand {
    /// H_t = f(t).
    Deterministic(Func),
    /// H^n_t = w^{-1} ∫_{t-w}^t g(X_u) du with w = 2 sup|g| / (C n^γ), so that
    /// |H_t − H_s| <= C n^γ |t − s|. Without a bundle (limit integrals) w = 0
    /// and H_{t-} = g(X_{t-}).
    Lipschitz {
        c: f64,
        gamma: f64,
        base: Func,
        base_sup: f64,
    },
    /// sgn(θ_k) on [L_k/n, L_{k+1}/n). `lookahead` > 0 reads θ_{k+lookahead}
    /// and trips the adaptedness guard.
    Adversarial {
        lookahead: usize,
    },
    PureJump(StepPath),
    Pathwise(StepPath),
    Sampled(GridPath),
}

impl core::fmt::Debug for Integrand {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Integrand::Deterministic(_) => f.write_str("Deterministic"),
            Integrand::Lipschitz { c, gamma, .. } => write!(f, "Lipschitz(C={c}, gamma={gamma})"),
            Integrand::Adversarial { lookahead } => write!(f, "Adversarial(lookahead={lookahead})"),
            Integrand::PureJump(p) => write!(f, "PureJump({} cells)", p.len()),
            Integrand::Pathwise(p) => write!(f, "Pathwise({} cells)", p.len()),
            Integrand::Sampled(g) => write!(f, "Sampled({} nodes)", g.len()),
        }
    }
}

impl Integrand {
    pub fn adversarial() -> Self {
        Integrand::Adversarial { lookahead: 0 }
    }

    pub fn lipschitz_tanh(c: f64, gamma: f64) -> Self {
        Integrand::Lipschitz { c, gamma, base: func(libm::tanh), base_sup: 1.0 }
    }

    fn is_continuous(&self) -> bool {
        matches!(self, Integrand::Deterministic(_) | Integrand::Lipschitz { .. })
    }

    /// Window length of the Lipschitz kind at level n.
    pub fn window(&self, n: u64) -> f64 {
        match self {
            Integrand::Lipschitz { c, gamma, base_sup, .. } => 2.0 * base_sup / (c * libm::pow(n as f64, *gamma)),
            _ => 0.0,
        }
    }

    /// Attach the integrator path (and the bundle for adapted kinds).
    pub fn bind<'a>(&'a self, x: &'a StepPath, bundle: Option<&'a SimulationBundle>) -> Result<Bound<'a>> {
        let kind = match self {
            Integrand::Deterministic(f) => BoundKind::Func(f),
            Integrand::Lipschitz { c, gamma, base, base_sup } => {
                if !(*c > 0.0 && *gamma >= 0.0 && *base_sup > 0.0) {
                    return Err(param("Lipschitz integrand needs C > 0, gamma >= 0, sup|g| > 0"));
                }
                let w = bundle.map_or(0.0, |b| self.window(b.config.n));
                let gv: Vec<f64> = x.values().iter().map(|v| base(*v)).collect();
                let times = x.times();
                let mut cum = Vec::with_capacity(times.len());
                cum.push(0.0);
                for i in 1..times.len() {
                    cum.push(cum[i - 1] + (times[i] - times[i - 1]) * gv[i - 1]);
                }
                BoundKind::Window { g: base, w, x, gv, cum }
            }
            Integrand::Adversarial { lookahead } => {
                let b = bundle
                    .ok_or_else(|| Error::Precondition("adversarial integrand needs a simulation bundle".into()))?;
                BoundKind::Adversarial { events: &b.events, rec: &b.innovations, lookahead: *lookahead }
            }
            Integrand::PureJump(p) | Integrand::Pathwise(p) => BoundKind::Step(p),
            Integrand::Sampled(g) => BoundKind::Owned(g.to_step_path()),
        };
        Ok(Bound { kind })
    }
}

pub struct Bound<'a> {
    kind: BoundKind<'a>,
}

enum BoundKind<'a> {
    Func(&'a Func),
    Window { g: &'a Func, w: f64, x: &'a StepPath, gv: Vec<f64>, cum: Vec<f64> },
    Step(&'a StepPath),
    Owned(StepPath),
    Adversarial { events: &'a [f64], rec: &'a InnovationRecord, lookahead: usize },
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn adversarial_read(rec: &InnovationRecord, known: usize, lookahead: usize) -> Result<f64> {
    if lookahead > 0 {
        return Err(Error::Adaptedness { at: known + 1, read: known + lookahead });
    }
    rec.get(known as i64).map(sign).ok_or_else(|| Error::Data(format!("innovation θ_{known} not recorded")))
}

impl Bound<'_> {
    /// H_t.
    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(match &self.kind {
            BoundKind::Func(f) => f(t),
            BoundKind::Window { g, w, x, gv, cum } => {
                if *w == 0.0 {
                    g(x.value_at(t))
                } else {
                    (window_cum(x, gv, cum, t) - window_cum(x, gv, cum, t - w)) / w
                }
            }
            BoundKind::Step(p) => p.value_at(t),
            BoundKind::Owned(p) => p.value_at(t),
            BoundKind::Adversarial { events, rec, lookahead } => {
                adversarial_read(rec, events.partition_point(|&e| e <= t), *lookahead)?
            }
        })
    }

    /// H_{t-}.
    pub fn left(&self, t: f64) -> Result<f64> {
        Ok(match &self.kind {
            BoundKind::Func(f) => f(t),
            BoundKind::Window { g, w, x, .. } if *w == 0.0 => g(x.left_limit(t)),
            BoundKind::Window { .. } => self.value(t)?,
            BoundKind::Step(p) => p.left_limit(t),
            BoundKind::Owned(p) => p.left_limit(t),
            BoundKind::Adversarial { events, rec, lookahead } => {
                adversarial_read(rec, events.partition_point(|&e| e < t), *lookahead)?
            }
        })
    }
}

// ∫_0^t g(X_u) du with X_u = X_0 for u < 0.
fn window_cum(x: &StepPath, gv: &[f64], cum: &[f64], t: f64) -> f64 {
    if t <= 0.0 {
        return t * gv[0];
    }
    let i = x.index_at(t);
    cum[i] + (t - x.times()[i]) * gv[i]
}

fn check_horizon(x: &StepPath, t: f64) -> Result<()> {
    if !(t > 0.0 && t <= x.horizon() * (1.0 + 1e-12)) {
        return Err(Error::TimeRange { t, horizon: x.horizon() });
    }
    Ok(())
}

/// t ↦ Σ_{jump times s <= t} H_{s-} ΔX_s on [0, t].
pub fn ito_integral(h: &Integrand, x: &StepPath, t: f64, bundle: Option<&SimulationBundle>) -> Result<StepPath> {
    check_horizon(x, t)?;
    let b = h.bind(x, bundle)?;
    let (times, xv) = (x.times(), x.values());
    let end = times.partition_point(|&s| s <= t);
    let mut out = Vec::with_capacity(end);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..end {
        acc += b.left(times[i])? * (xv[i] - xv[i - 1]);
        out.push(acc);
    }
    StepPath::new(times[..end].to_vec(), out, t)
}

/// Left-point scheme Σ H_{t_k} (X_{t_{k+1}} − X_{t_k}) on the grid of `x`, up to `t`.
pub fn grid_integral(h: &Integrand, x: &GridPath, t: f64) -> Result<GridPath> {
    let step = x.step();
    if let Integrand::Sampled(g) = h {
        if (g.step() - step).abs() > 1e-12 * step || g.len() < x.len() {
            return Err(Error::Shape(format!(
                "integrand grid (step {}, {} nodes) does not match integrator (step {step}, {} nodes)",
                g.step(),
                g.len(),
                x.len()
            )));
        }
    }
    if matches!(h, Integrand::Adversarial { .. }) {
        return Err(Error::Precondition("adversarial integrand is only defined against a simulation bundle".into()));
    }
    let last = x.len() - 1;
    if !(t > 0.0) || t > x.horizon() * (1.0 + 1e-9) {
        return Err(Error::TimeRange { t, horizon: x.horizon() });
    }
    let k_end = (libm::floor(t / step + 1e-9) as usize).min(last);
    let xs = match h {
        Integrand::Lipschitz { .. } => Some(grid_as_steps(x)),
        _ => None,
    };
    let fallback = StepPath::constant(0.0, 1.0);
    let b = h.bind(xs.as_ref().unwrap_or(&fallback), None)?;
    let v = x.values();
    let mut out = Vec::with_capacity(k_end + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 0..k_end {
        let hk = match h {
            Integrand::Sampled(g) => g.values()[k],
            _ => b.value(x.time(k))?,
        };
        acc += hk * (v[k + 1] - v[k]);
        out.push(acc);
    }
    GridPath::new(step, out, Interpolation::Step)
}

// Grid nodes as an uncompressed step path (node k holds on [t_k, t_{k+1})).
fn grid_as_steps(x: &GridPath) -> StepPath {
    let times: Vec<f64> = (0..x.len()).map(|k| x.time(k)).collect();
    StepPath::from_parts(times, x.values().to_vec(), x.horizon().max(x.step()))
}

/// Fine evaluation mesh used to locate ε-moves of continuous integrands.
pub const DISCRETISE_MESH: usize = 4096;

/// H^{|m,ε}: H frozen at the points of the ε-move stopping partition
/// refined by {jT/m}.
pub fn discretize_integrand(
    h: &Integrand,
    eps: f64,
    m: usize,
    x: &StepPath,
    t: f64,
    bundle: Option<&SimulationBundle>,
) -> Result<StepPath> {
    if !(eps > 0.0) {
        return Err(param("eps must be positive"));
    }
    if m == 0 {
        return Err(param("m must be at least 1"));
    }
    check_horizon(x, t)?;
    let b = h.bind(x, bundle)?;
    let grid: Vec<f64> = (0..=m).map(|j| j as f64 * t / m as f64).collect();
    let mut cands: Vec<(f64, bool)> = grid.iter().map(|&g| (g, true)).collect();
    let mut extra: Vec<f64> = match h {
        Integrand::PureJump(p) | Integrand::Pathwise(p) => p.times().to_vec(),
        Integrand::Sampled(g) => (0..g.len()).map(|k| g.time(k)).collect(),
        Integrand::Adversarial { .. } => bundle.map(|b| b.events.clone()).unwrap_or_default(),
        Integrand::Deterministic(_) => (0..=DISCRETISE_MESH).map(|j| j as f64 * t / DISCRETISE_MESH as f64).collect(),
        Integrand::Lipschitz { .. } => {
            let w = bundle.map_or(0.0, |bb| h.window(bb.config.n));
            let mut v: Vec<f64> = (0..=DISCRETISE_MESH).map(|j| j as f64 * t / DISCRETISE_MESH as f64).collect();
            for &s in x.times() {
                v.push(s);
                v.push(s + w);
            }
            v
        }
    };
    extra.retain(|&s| s > 0.0 && s <= t);
    cands.extend(extra.into_iter().map(|s| (s, false)));
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    cands.dedup_by(|a, b| a.0 == b.0);

    let mut pts = alloc::vec![0.0];
    let mut vals = alloc::vec![b.value(0.0)?];
    let mut prev = 0.0f64;
    for &(s, on_grid) in &cands[1..] {
        loop {
            let cur = *vals.last().unwrap();
            let vs = b.value(s)?;
            if on_grid {
                pts.push(s);
                vals.push(vs);
                break;
            }
            if (vs - cur).abs() < eps {
                break;
            }
            let hit = if h.is_continuous() { bisect_hit(&b, cur, eps, prev.max(*pts.last().unwrap()), s)? } else { s };
            pts.push(hit);
            vals.push(b.value(hit)?);
            if hit == s {
                break;
            }
        }
        prev = s;
    }
    StepPath::new(pts, vals, t)
}

// First time in (lo, hi] where |H − cur| >= eps, given that it fails at lo and holds at hi.
fn bisect_hit(b: &Bound<'_>, cur: f64, eps: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (b.value(mid)? - cur).abs() >= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// sup_{s <= t} |∫_0^s (H_{u-} − H^{|m,ε}_{u-}) dX_u| ∧ 1 for one realisation.
pub fn upsilon_sample(h: &Integrand, eps: f64, m: usize, bundle: &SimulationBundle, t: f64) -> Result<f64> {
    let x = &bundle.x;
    let disc = discretize_integrand(h, eps, m, x, t, Some(bundle))?;
    let b = h.bind(x, Some(bundle))?;
    let (times, xv) = (x.times(), x.values());
    let (mut acc, mut sup) = (0.0f64, 0.0f64);
    for i in 1..times.partition_point(|&s| s <= t) {
        acc += (b.left(times[i])? - disc.left_limit(times[i])) * (xv[i] - xv[i - 1]);
        sup = sup.max(acc.abs());
    }
    Ok(sup.min(1.0))
}

/// Monte Carlo Υ_{n,m,ε} per (n, ε).
pub fn upsilon_estimate(
    ensembles: &[(u64, Vec<SimulationBundle>)],
    h: &Integrand,
    eps_list: &[f64],
    m: usize,
    t: f64,
    seed: u64,
) -> Result<DiagnosticReport> {
    if ensembles.is_empty() || ensembles.iter().any(|(_, e)| e.is_empty()) {
        return Err(Error::Data("empty ensemble".into()));
    }
    let mut report = DiagnosticReport::new("upsilon", seed).param("m", m).param("t", t).param("eps", eps_list.to_vec());
    for (n, ens) in ensembles {
        for &eps in eps_list {
            let xs: Vec<f64> = ens.iter().map(|b| upsilon_sample(h, eps, m, b, t)).collect::<Result<_>>()?;
            let mut e = Estimate::mean(format!("n={n}.eps={eps}"), &xs);
            e.ci_low = e.ci_low.max(0.0);
            report.push(e);
        }
    }
    Ok(report)
}

/// |∫ H dX|*_t for the adversarial integrand.
pub fn adversarial_sup(bundle: &SimulationBundle, t: f64) -> Result<f64> {
    let path = ito_integral(&Integrand::adversarial(), &bundle.x, t, Some(bundle))?;
    Ok(path.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

pub fn simulate(config: &ProcessConfig, horizon: f64, seed: SeedSpec) -> Result<SimulationBundle> {
    if config.waiting.is_some() {
        gen_ctrw(config, horizon, seed)
    } else {
        gen_moving_average(config, horizon, seed)
    }
}

/// Median and 90th percentile of |∫ H^n dX^n|*_1 per n, with an uncorrelated
/// companion (c_0 only) and least-squares growth exponents of the medians in log n.
pub fn adversarial_experiment<R: Runner>(
    config: &ProcessConfig,
    n_list: &[u64],
    replications: usize,
    seed: u64,
    runner: &R,
) -> Result<DiagnosticReport> {
    config.validate()?;
    if !config.coefficients.iter().skip(1).any(|&c| c > 0.0) {
        return Err(Error::Precondition("adversarial experiment needs some c_j > 0 with j >= 1".into()));
    }
    let law = &config.innovation;
    if matches!(law.mode, InnovationMode::Raw) {
        return Err(Error::Precondition("adversarial experiment needs symmetric or centered innovations".into()));
    }
    if !(law.alpha < 2.0) {
        return Err(Error::Precondition(format!("adversarial experiment needs alpha < 2, got {}", law.alpha)));
    }
    if n_list.is_empty() || replications < 2 {
        return Err(param("need at least one n and two replications"));
    }
    let mut companion = config.clone();
    companion.coefficients.truncate(1);
    let mut report = DiagnosticReport::new("adversarial", seed)
        .param("n", n_list.iter().map(|&n| n as f64).collect::<Vec<_>>())
        .param("replications", replications)
        .param("coefficients", config.coefficients.clone())
        .param("alpha", law.alpha);
    for (prefix, cfg) in [("", config), ("companion.", &companion)] {
        let mut medians = Vec::new();
        for &n in n_list {
            let cfg_n = cfg.clone().with_n(n);
            let sups: Vec<Result<f64>> = runner.run(replications, |r| {
                let b = simulate(&cfg_n, 1.0, SeedSpec::new(seed, r as u64))?;
                adversarial_sup(&b, 1.0)
            });
            let sups: Vec<f64> = sups.into_iter().collect::<Result<_>>()?;
            let s = sorted(&sups);
            let med = Estimate::quantile(format!("{prefix}n={n}.median"), &s, 0.5);
            medians.push(med.value);
            report.push(med);
            report.push(Estimate::quantile(format!("{prefix}n={n}.p90"), &s, 0.9));
        }
        let slope = log_slope(n_list, &medians);
        report.push(Estimate::exact(format!("{prefix}growth_exponent"), slope, replications as u64));
    }
    Ok(report)
}

/// Least-squares slope of ln y against ln n.
pub fn log_slope(ns: &[u64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        ns.iter().zip(ys).filter(|(_, y)| **y > 0.0).map(|(n, y)| (libm::log(*n as f64), libm::log(*y))).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
