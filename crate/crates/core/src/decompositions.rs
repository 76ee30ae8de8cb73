//! Truncated martingale split, the U/V split of correlated processes, the
//! V^{n,i} family, condition (TC), and the GD / GD-mod-CA / GD-mod-CI
//! statistics.

use alloc::format;
use alloc::vec::Vec;

use crate::cadlag::{total_variation, StepPath};
use crate::error::{param, Error, Result};
use crate::processes::{spatial_scale, SimulationBundle};
use crate::rng::{InnovationLaw, InnovationMode, SeedSpec};
use crate::stats::{DiagnosticReport, Estimate};

/// h(x) = x 1{|x| <= a} + sgn(x) a 1{|x| > a}.
pub fn truncate_h(x: f64, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(param(format!("truncation level must be >= 1, got {a}")));
    }
    Ok(x.clamp(-a, a))
}

// E[P 1{l <= P <= u}] and P(l <= P <= u) for P ~ Pareto(alpha) on [1, inf).
fn pareto_first_moment(alpha: f64, l: f64, u: f64) -> f64 {
    let l = l.max(1.0);
    if !(u > l) {
        return 0.0;
    }
    if (alpha - 1.0).abs() < 1e-12 {
        libm::log(u / l)
    } else {
        alpha * (libm::pow(l, 1.0 - alpha) - libm::pow(u, 1.0 - alpha)) / (alpha - 1.0)
    }
}

fn pareto_mass(alpha: f64, l: f64, u: f64) -> f64 {
    let l = l.max(1.0);
    if !(u > l) {
        return 0.0;
    }
    libm::pow(l, -alpha) - libm::pow(u, -alpha)
}

/// E[ζ 1{|ζ| <= a}] for ζ = κ θ, θ drawn from `law`.
pub fn truncated_mean(law: &InnovationLaw, kappa: f64, a: f64) -> f64 {
    let k = kappa * law.scale;
    let big_a = a / k;
    match law.mode {
        InnovationMode::Symmetric | InnovationMode::Gaussian => 0.0,
        InnovationMode::Raw => k * pareto_first_moment(law.alpha, 1.0, big_a),
        InnovationMode::Centered => {
            let m = law.pareto_mean();
            let (l, u) = (m - big_a, m + big_a);
            k * (pareto_first_moment(law.alpha, l, u) - m * pareto_mass(law.alpha, l, u))
        }
    }
}

/// E[h(κ θ)] in closed form.
pub fn truncated_h_mean(law: &InnovationLaw, kappa: f64, a: f64) -> f64 {
    let k = kappa * law.scale;
    let big_a = a / k;
    let alpha = law.alpha;
    let tails = match law.mode {
        InnovationMode::Symmetric | InnovationMode::Gaussian => return 0.0,
        InnovationMode::Raw => libm::pow(big_a.max(1.0), -alpha),
        InnovationMode::Centered => {
            let m = law.pareto_mean();
            let upper = libm::pow(m + big_a, -alpha);
            let lower = if m - big_a > 1.0 { 1.0 - libm::pow(m - big_a, -alpha) } else { 0.0 };
            upper - lower
        }
    };
    truncated_mean(law, kappa, a) + a * tails
}

/// X = M + A with M the compensated sum of small scaled innovations.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSplit {
    pub m: StepPath,
    pub a_part: StepPath,
    pub truncation: f64,
    /// E[ζ^n_1 1{|ζ^n_1| <= a}].
    pub compensator: f64,
}

/// M^n_t = Σ_{k <= N} ζ^n_k 1{|ζ^n_k| <= a} − N · E[ζ^n_1 1{|ζ^n_1| <= a}], A = X − M.
pub fn split_martingale(bundle: &SimulationBundle, a: f64) -> Result<TruncatedSplit> {
    truncate_h(0.0, a)?;
    let cfg = &bundle.config;
    if cfg.is_correlated() || cfg.coefficients.len() > 1 {
        return Err(Error::UnsupportedDecomposition(
            "truncated martingale split needs zero-order coefficients (c_0); correlated processes admit no good decomposition".into(),
        ));
    }
    let s = cfg.spatial_scale();
    let compensator = truncated_mean(&cfg.innovation, s * cfg.coefficients[0], a);
    let xv = bundle.x.values();
    let mut mv = Vec::with_capacity(xv.len());
    mv.push(0.0);
    let mut m = 0.0;
    let mut k = 0usize;
    let times = bundle.x.times();
    // walk events; coincident events share one breakpoint
    for &t in &times[1..] {
        while k < bundle.events.len() && bundle.events[k] <= t {
            let z = bundle.scaled_zeta(k + 1);
            if z.abs() <= a {
                m += z;
            }
            m -= compensator;
            k += 1;
        }
        mv.push(m);
    }
    let av: Vec<f64> = xv.iter().zip(&mv).map(|(x, m)| x - m).collect();
    let horizon = bundle.horizon;
    Ok(TruncatedSplit {
        m: StepPath::new(times.to_vec(), mv, horizon)?,
        a_part: StepPath::new(times.to_vec(), av, horizon)?,
        truncation: a,
        compensator,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BnEstimate {
    pub estimate: Estimate,
    /// n^β E[h(ζ^n_1)] by analytic integration against the Pareto density.
    pub closed_form: f64,
}

/// Monte Carlo and closed-form n^β E[h(ζ^n_1)] with ζ^n_1 = n^{-β/α} θ_1.
pub fn estimate_bn(
    law: &InnovationLaw,
    n: u64,
    beta: f64,
    a: f64,
    replications: usize,
    seed: SeedSpec,
) -> Result<BnEstimate> {
    law.validate()?;
    truncate_h(0.0, a)?;
    if replications < 2 {
        return Err(param("need at least two replications"));
    }
    let kappa = spatial_scale(n, beta, law.alpha);
    let nb = libm::pow(n as f64, beta);
    let mut rng = seed.rng();
    let xs: Vec<f64> = (0..replications).map(|_| nb * (kappa * law.draw(&mut rng)).clamp(-a, a)).collect();
    Ok(BnEstimate {
        estimate: Estimate::mean(format!("bn.n={n}"), &xs),
        closed_form: nb * truncated_h_mean(law, kappa, a),
    })
}

/// ψ^{-1} X = U + V with U = U1 + U2.
#[derive(Clone, Debug, PartialEq)]
pub struct UVSplit {
    pub u: StepPath,
    pub u1: StepPath,
    pub u2: StepPath,
    pub v: StepPath,
    pub psi: f64,
}

/// Tail sums Σ_{j >= k} c_j for k = 1..𝒥.
pub fn tail_sums(c: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; c.len().saturating_sub(1)];
    let mut acc = 0.0;
    for k in (1..c.len()).rev() {
        acc += c[k];
        out[k - 1] = acc;
    }
    out
}

/// V_t = −(s/ψ) Σ_{k=1}^{N ∧ 𝒥} T_k θ_{N−k+1}, U1_t = s Σ_{m<=N} θ_m,
/// U2_t = (s/ψ) Σ_{k>=0} (Σ_{j=k+1}^{N+k} c_j) θ_{−k}, with s the spatial
/// scale and N the number of events up to t.
pub fn split_uv(bundle: &SimulationBundle) -> Result<UVSplit> {
    let cfg = &bundle.config;
    let rec = &bundle.innovations;
    let n_events = bundle.events.len();
    if rec.future_len() < n_events {
        return Err(Error::Data(format!("{n_events} events but {} innovations recorded", rec.future_len())));
    }
    let c = &cfg.coefficients;
    let order = c.len() - 1;
    let psi = cfg.psi();
    let s = cfg.spatial_scale();
    let tails = tail_sums(c);
    let past = rec.past().min(order.saturating_sub(1));
    let times = bundle.x.times();
    let cap = times.len();
    let (mut u1v, mut u2v, mut vv) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    let (mut u1, mut k) = (0.0, 0usize);
    u1v.push(0.0);
    u2v.push(0.0);
    vv.push(0.0);
    for &t in &times[1..] {
        while k < n_events && bundle.events[k] <= t {
            k += 1;
            u1 += s * rec.theta(k as i64);
        }
        let nn = k;
        let mut v = 0.0;
        for i in 1..=nn.min(order) {
            v += tails[i - 1] * rec.theta((nn - i + 1) as i64);
        }
        let mut u2 = 0.0;
        for back in 0..=past {
            let hi = (nn + back).min(order);
            let coef: f64 = if hi > back { c[back + 1..=hi].iter().sum() } else { 0.0 };
            u2 += coef * rec.theta(-(back as i64));
        }
        u1v.push(u1);
        u2v.push(s / psi * u2);
        vv.push(-s / psi * v);
    }
    let horizon = bundle.horizon;
    let uv: Vec<f64> = u1v.iter().zip(&u2v).map(|(a, b)| a + b).collect();
    let xv = bundle.x.values();
    let scale = xv.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..cap {
        let resid = uv[i] + vv[i] - xv[i] / psi;
        if resid.abs() > 1e-9 * scale * (1.0 + i as f64).sqrt() {
            return Err(Error::Data(format!("U + V differs from X/ψ by {resid} at {}", times[i])));
        }
    }
    Ok(UVSplit {
        u: StepPath::new(times.to_vec(), uv, horizon)?,
        u1: StepPath::new(times.to_vec(), u1v, horizon)?,
        u2: StepPath::new(times.to_vec(), u2v, horizon)?,
        v: StepPath::new(times.to_vec(), vv, horizon)?,
        psi,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TcReport {
    pub holds: bool,
    /// Σ_{j>=i} c_j for i = 1..𝒥.
    pub tail_sums: Vec<f64>,
    /// Σ_i Σ_{j>=i} c_j.
    pub double_sum: f64,
    /// ρ used for α = 1.
    pub rho: Option<f64>,
    pub rho_sum: Option<f64>,
}

/// Condition (TC); trivially true for finite coefficient sequences.
pub fn check_tc(c: &[f64], alpha: f64) -> TcReport {
    let tails = tail_sums(c);
    let double_sum = tails.iter().sum();
    let (rho, rho_sum) = if (alpha - 1.0).abs() < 1e-12 {
        (Some(0.5), Some(tails.iter().map(|t| libm::sqrt(*t)).sum()))
    } else {
        (None, None)
    };
    TcReport { holds: true, tail_sums: tails, double_sum, rho, rho_sum }
}

/// First breakpoint index with |M| >= c, if any.
fn hitting_index(m: &StepPath, c: f64) -> Option<usize> {
    m.values().iter().position(|v| v.abs() >= c)
}

/// GD diagnostics over ensembles of truncated splits, one ensemble per n.
pub fn gd_statistics(
    ensembles: &[(u64, Vec<TruncatedSplit>)],
    t: f64,
    r_grid: &[f64],
    c_grid: &[f64],
    seed: u64,
) -> Result<DiagnosticReport> {
    if ensembles.is_empty() || ensembles.iter().any(|(_, e)| e.is_empty()) {
        return Err(Error::Data("empty ensemble".into()));
    }
    let mut report =
        DiagnosticReport::new("gd", seed).param("t", t).param("R", r_grid.to_vec()).param("c", c_grid.to_vec());
    let mut tails_by_n: Vec<Vec<Estimate>> = Vec::new();
    let mut jump_bound_ok = true;
    for (n, ens) in ensembles {
        let total = ens.len() as u64;
        let tvs: Vec<f64> = ens.iter().map(|s| total_variation(&s.a_part, t)).collect::<Result<_>>()?;
        let mut row = Vec::new();
        for &r in r_grid {
            let count = tvs.iter().filter(|&&v| v > r).count() as u64;
            let e = Estimate::proportion(format!("n={n}.tv_tail.R={r}"), count, total)?;
            row.push(e.clone());
            report.push(e);
        }
        tails_by_n.push(row);
        for &c in c_grid {
            let vals: Vec<f64> = ens
                .iter()
                .map(|s| {
                    let m = &s.m;
                    match hitting_index(m, c) {
                        Some(k) if m.times()[k] <= t => (m.values()[k] - m.values()[k - 1]).abs(),
                        _ => {
                            let k = m.index_at(t);
                            if k > 0 && m.times()[k] == t {
                                (m.values()[k] - m.values()[k - 1]).abs()
                            } else {
                                0.0
                            }
                        }
                    }
                })
                .collect();
            report.push(Estimate::mean(format!("n={n}.jump_at_tau.c={c}"), &vals));
        }
        let mut max_jump = 0.0f64;
        for s in ens {
            for w in s.m.values().windows(2) {
                max_jump = max_jump.max((w[1] - w[0]).abs());
            }
            if max_jump > 2.0 * s.truncation {
                jump_bound_ok = false;
            }
        }
        report.push(Estimate::exact(format!("n={n}.max_abs_jump_M"), max_jump, total));
    }
    report.push_flag("jump_bound_2a", jump_bound_ok);
    if tails_by_n.len() >= 2 {
        let last = &tails_by_n[tails_by_n.len() - 1];
        let mid = &tails_by_n[tails_by_n.len() - 2];
        for (i, &r) in r_grid.iter().enumerate() {
            report.push_flag(&format!("tv_tail_flattens.R={r}"), flattens(&mid[i], &last[i]));
        }
    }
    Ok(report)
}

/// Estimate at the larger n within 2 CI widths of the one at the smaller n.
pub fn flattens(mid: &Estimate, last: &Estimate) -> bool {
    let width = (mid.ci_high - mid.ci_low).max(last.ci_high - last.ci_low);
    (last.value - mid.value).abs() <= 2.0 * width
}

/// n^{-γ} Σ_{s ∈ points} |V_s|.
pub fn gdca_sum(v: &StepPath, points: &[f64], n: u64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(param("gamma must be positive"));
    }
    let sum: f64 = points.iter().map(|&s| v.value_at(s).abs()).sum();
    Ok(libm::pow(n as f64, -gamma) * sum)
}

/// Partition {k n^{-β} T : k = 0..⌊n^β⌋} ∪ event times, sorted without repeats.
pub fn gdca_partition(bundle: &SimulationBundle) -> Vec<f64> {
    let beta = bundle.config.time_exponent();
    let horizon = bundle.horizon;
    let nb = libm::pow(bundle.config.n as f64, beta);
    let count = libm::floor(nb * (1.0 + 1e-12)) as usize;
    let mut pts: Vec<f64> = (0..=count).map(|k| (k as f64 / nb * horizon).min(horizon)).collect();
    pts.extend_from_slice(&bundle.events);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// The GD-mod-CA statistic n^{-γ} Σ_{s ∈ π^n} |V^n_s| of one realisation.
pub fn gdca_statistic(split: &UVSplit, gamma: f64, bundle: &SimulationBundle) -> Result<f64> {
    gdca_sum(&split.v, &gdca_partition(bundle), bundle.config.n, gamma)
}

/// Default γ for GD-mod-CA: (β − β/α) + 0.1.
pub fn default_gdca_gamma(alpha: f64, beta: f64) -> f64 {
    beta - beta / alpha + 0.1
}

/// Default γ for GD-mod-CI: min(0.2, (α−1)/2) for α > 1, else 0.2.
pub fn default_gdci_gamma(alpha: f64) -> f64 {
    if alpha > 1.0 {
        (0.2f64).min((alpha - 1.0) / 2.0)
    } else {
        0.2
    }
}

/// V^{n,i} at the stopping times σ_k: −(s/ψ) T_i θ_{k−i+1} for k >= i.
#[derive(Clone, Debug, PartialEq)]
pub struct VniFamily {
    pub n: u64,
    pub alpha: f64,
    /// f(n) = n^β (n for moving averages).
    pub f_n: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub law: InnovationLaw,
    /// Coefficient of θ in V^{n,i}, per i: −(s/ψ) T_i.
    pub weights: Vec<f64>,
    /// Pooled samples of V^{n,i}_{σ_k} (k >= i) per i.
    pub samples: Vec<Vec<f64>>,
    /// Number of stopping times observed per realisation, summed.
    pub counters: Vec<u64>,
}

impl VniFamily {
    /// Pool V^{n,i}_{σ_k} over an ensemble sharing one config.
    pub fn from_bundles(bundles: &[SimulationBundle], gamma: f64) -> Result<Self> {
        let first = bundles.first().ok_or_else(|| Error::Data("empty ensemble".into()))?;
        let cfg = &first.config;
        let law = cfg.innovation;
        if matches!(law.mode, InnovationMode::Raw) {
            return Err(Error::Precondition("GD-mod-CI needs centered or symmetric innovations".into()));
        }
        if !(law.alpha > 1.0 || law.is_symmetric()) {
            return Err(Error::Precondition("GD-mod-CI needs alpha > 1 or symmetric innovations".into()));
        }
        if !(gamma > 0.0) {
            return Err(param("gamma must be positive"));
        }
        let s = cfg.spatial_scale();
        let psi = cfg.psi();
        let weights: Vec<f64> = tail_sums(&cfg.coefficients).iter().map(|t| -s * t / psi).collect();
        let mut samples = alloc::vec![Vec::new(); weights.len()];
        let mut counters = alloc::vec![0u64; weights.len()];
        for b in bundles {
            if b.config != *cfg {
                return Err(Error::Shape("ensemble mixes configurations".into()));
            }
            let n_events = b.jump_count();
            for (i, w) in weights.iter().enumerate() {
                let lag = i + 1;
                for k in lag..=n_events {
                    samples[i].push(w * b.innovations.theta((k - lag + 1) as i64));
                }
                counters[i] += n_events.saturating_sub(lag - 1) as u64;
            }
        }
        Ok(Self {
            n: cfg.n,
            alpha: law.alpha,
            f_n: libm::pow(cfg.n as f64, cfg.time_exponent()),
            gamma,
            lambda: law.alpha - gamma,
            mu: law.alpha + gamma,
            law,
            weights,
            samples,
            counters,
        })
    }

    /// Σ_i V^{n,i}_{σ_k} for one realisation at event k.
    pub fn sum_at(&self, bundle: &SimulationBundle, k: usize) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| k > *i)
            .map(|(i, w)| w * bundle.innovations.theta((k - i) as i64))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdciSums {
    /// Σ_i (Σ_{k<=K f(n)} E[|V^{n,i}|^λ 1{>1}])^{1/λ}, Monte Carlo.
    pub large: Estimate,
    /// Σ_i (Σ_{k<=K f(n)} E[|V^{n,i}|^μ 1{<=1}])^{1/μ}, Monte Carlo.
    pub small: Estimate,
    /// The same sums with the expectations integrated numerically.
    pub large_exact: f64,
    pub small_exact: f64,
}

/// Moment sums of Def. GD-mod-CI (ii.iii) with K f(n) stopping times.
pub fn gdci_moment_sums(family: &VniFamily, k_mult: f64) -> Result<GdciSums> {
    if !(k_mult > 0.0) {
        return Err(param("K must be positive"));
    }
    let (lam, mu) = (family.lambda, family.mu);
    let terms = libm::floor(k_mult * family.f_n * (1.0 + 1e-12));
    let mut large = (0.0, 0.0, 0.0);
    let mut small = (0.0, 0.0, 0.0);
    let mut large_exact = 0.0;
    let mut small_exact = 0.0;
    let mut samples = 0u64;
    for (i, xs) in family.samples.iter().enumerate() {
        let count = (terms - i as f64).max(0.0);
        if count == 0.0 || family.weights[i] == 0.0 {
            continue;
        }
        let big: Vec<f64> = xs.iter().map(|v| if v.abs() > 1.0 { libm::pow(v.abs(), lam) } else { 0.0 }).collect();
        let lit: Vec<f64> = xs.iter().map(|v| if v.abs() <= 1.0 { libm::pow(v.abs(), mu) } else { 0.0 }).collect();
        samples += xs.len() as u64;
        for (acc, vals, p) in [(&mut large, &big, lam), (&mut small, &lit, mu)] {
            let e = Estimate::mean("", vals);
            let f = |m: f64| libm::pow((count * m).max(0.0), 1.0 / p);
            acc.0 += f(e.value);
            acc.1 += f(e.ci_low);
            acc.2 += f(e.ci_high);
        }
        let kappa = family.weights[i].abs();
        large_exact += libm::pow(count * power_moment(&family.law, kappa, lam, true), 1.0 / lam);
        small_exact += libm::pow(count * power_moment(&family.law, kappa, mu, false), 1.0 / mu);
    }
    let mk = |name: &str, t: (f64, f64, f64)| Estimate {
        name: name.into(),
        value: t.0,
        ci_low: t.1.min(t.0),
        ci_high: t.2.max(t.0),
        n_samples: samples.max(1),
    };
    Ok(GdciSums { large: mk("gdci.large", large), small: mk("gdci.small", small), large_exact, small_exact })
}

/// E[|κθ|^p 1{|κθ| > 1}] (`above`) or E[|κθ|^p 1{|κθ| <= 1}], by adaptive
/// Simpson in log x against the Pareto density, with the far tail in closed form.
pub fn power_moment(law: &InnovationLaw, kappa: f64, p: f64, above: bool) -> f64 {
    let a = law.alpha;
    let k = kappa * law.scale;
    let shift = match law.mode {
        InnovationMode::Centered => law.pareto_mean(),
        InnovationMode::Gaussian => return gaussian_power_moment(k, p, above),
        _ => 0.0,
    };
    let g = |x: f64| {
        let y = k * (x - shift).abs();
        if (y > 1.0) == above {
            libm::pow(y, p)
        } else {
            0.0
        }
    };
    // density of P in log x: α x^{-α}
    let f = |u: f64| {
        let x = libm::exp(u);
        g(x) * a * libm::pow(x, -a)
    };
    let mut breaks = alloc::vec![1.0, shift + 1.0 / k];
    if shift - 1.0 / k > 1.0 {
        breaks.push(shift - 1.0 / k);
    }
    let top = 1e8 * breaks.iter().fold(1.0f64, |m, b| m.max(*b));
    breaks.push(top);
    breaks.retain(|b| *b >= 1.0);
    breaks.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (libm::log(w[0]), libm::log(w[1]));
        if hi > lo {
            total += adaptive_simpson(&f, lo, hi, 1e-12, 40);
        }
    }
    if above && p < a {
        // tail beyond `top`: |x - shift|^p ≈ x^p
        total += libm::pow(k, p) * a * libm::pow(top, p - a) / (a - p);
    }
    total
}

fn gaussian_power_moment(k: f64, p: f64, above: bool) -> f64 {
    let f = |x: f64| {
        let y = k * x;
        let w = 2.0 * libm::exp(-x * x / 2.0) / libm::sqrt(2.0 * core::f64::consts::PI);
        if (y > 1.0) == above {
            libm::pow(y, p) * w
        } else {
            0.0
        }
    };
    let cut = 1.0 / k;
    if above {
        if cut > 40.0 {
            0.0
        } else {
            adaptive_simpson(&f, cut, 40.0f64.max(cut + 1.0), 1e-13, 40)
        }
    } else {
        adaptive_simpson(&f, 0.0, cut.min(40.0), 1e-13, 40)
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            go(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + go(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    go(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{gen_ctrw, gen_moving_average, ProcessConfig};
    use crate::rng::WaitingLaw;
    use alloc::vec;

    #[test]
    fn h_examples() {
        assert_eq!(truncate_h(0.5, 1.0).unwrap(), 0.5);
        assert_eq!(truncate_h(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(truncate_h(-3.0, 1.0).unwrap(), -1.0);
        assert!(truncate_h(0.0, 0.5).is_err());
    }

    #[test]
    fn tc_examples() {
        let r = check_tc(&[1.0, 0.5], 1.5);
        assert!(r.holds);
        assert_eq!(r.double_sum, 0.5);
        assert_eq!(check_tc(&[1.0], 1.2).double_sum, 0.0);
        let r3 = check_tc(&[1.0, 1.0, 1.0], 1.5);
        assert_eq!(r3.tail_sums, vec![2.0, 1.0]);
        assert_eq!(r3.double_sum, 3.0);
        assert_eq!(check_tc(&[1.0, 1.0], 1.0).rho, Some(0.5));
    }

    #[test]
    fn truncated_means() {
        let sym = InnovationLaw::symmetric(1.5).unwrap();
        assert_eq!(truncated_mean(&sym, 0.1, 1.0), 0.0);
        let cen = InnovationLaw::centered(1.5).unwrap();
        // a -> inf: the full mean, zero
        assert!(truncated_mean(&cen, 1.0, 1e12).abs() < 1e-5);
        assert!(truncated_h_mean(&cen, 1.0, 1e12).abs() < 1e-5);
        // raw, α=0.5, κ=1, a=4: ∫_1^4 x·0.5 x^{-1.5} dx = [x^{0.5}]_1^4 = 1
        let raw = InnovationLaw::new(0.5, InnovationMode::Raw, 1.0).unwrap();
        assert!((truncated_mean(&raw, 1.0, 4.0) - 1.0).abs() < 1e-12);
        assert!((truncated_h_mean(&raw, 1.0, 4.0) - (1.0 + 4.0 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn uv_hand_example() {
        let law = InnovationLaw::symmetric(1.5).unwrap();
        let cfg = ProcessConfig::moving_average(law, vec![1.0, 1.0], 1).unwrap();
        let mut b = gen_moving_average(&cfg, 2.0, SeedSpec::new(0, 0)).unwrap();
        b.innovations = crate::processes::InnovationRecord::new(1, vec![0.3, -0.7, 2.0, 1.0]).unwrap();
        b.x = b.rebuild().unwrap();
        let uv = split_uv(&b).unwrap();
        assert_eq!(uv.psi, 2.0);
        assert_eq!(uv.v.value_at(2.0), -0.5);
    }

    #[test]
    fn zero_order_uv_is_trivial() {
        let law = InnovationLaw::symmetric(1.5).unwrap();
        let cfg = ProcessConfig::ctrw(law, WaitingLaw::new(0.8, 1.0).unwrap(), vec![1.0], 100).unwrap();
        let b = gen_ctrw(&cfg, 1.0, SeedSpec::new(4, 1)).unwrap();
        let uv = split_uv(&b).unwrap();
        assert!(uv.v.values().iter().all(|&v| v == 0.0));
        assert_eq!(uv.u.values(), b.x.values());
    }

    #[test]
    fn martingale_split_rejects_correlated() {
        let law = InnovationLaw::symmetric(1.5).unwrap();
        let cfg = ProcessConfig::moving_average(law, vec![1.0, 0.5], 10).unwrap();
        let b = gen_moving_average(&cfg, 1.0, SeedSpec::new(0, 0)).unwrap();
        assert_eq!(split_martingale(&b, 1.0).unwrap_err().tag(), "UNSUPPORTED_DECOMPOSITION");
    }

    #[test]
    fn symmetric_split_has_no_compensator() {
        let law = InnovationLaw::symmetric(1.2).unwrap();
        let cfg = ProcessConfig::ctrw(law, WaitingLaw::new(0.6, 1.0).unwrap(), vec![1.0], 1000).unwrap();
        let b = gen_ctrw(&cfg, 1.0, SeedSpec::new(2, 2)).unwrap();
        let s = split_martingale(&b, 1.0).unwrap();
        assert_eq!(s.compensator, 0.0);
        for k in 1..b.x.len() {
            let big: f64 = (1..=k).map(|j| b.scaled_zeta(j)).filter(|z| z.abs() > 1.0).sum();
            assert!((s.a_part.values()[k] - big).abs() < 1e-12);
        }
    }

    #[test]
    fn gdca_hand_example() {
        let v = StepPath::new(vec![0.0, 0.5], vec![0.5, -0.25], 1.0).unwrap();
        assert_eq!(gdca_sum(&v, &[0.0, 0.5], 1, 1.0).unwrap(), 0.75);
        assert_eq!(gdca_sum(&StepPath::constant(0.0, 1.0), &[0.0, 0.5], 10, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn power_moment_matches_pareto_closed_form() {
        let law = InnovationLaw::symmetric(1.5).unwrap();
        let (k, lam, mu) = (0.05, 1.3, 1.7);
        let m = 1.0 / k;
        let above = libm::pow(k, lam) * 1.5 * libm::pow(m, lam - 1.5) / (1.5 - lam);
        let below = libm::pow(k, mu) * 1.5 * (libm::pow(m, mu - 1.5) - 1.0) / (mu - 1.5);
        assert!((power_moment(&law, k, lam, true) / above - 1.0).abs() < 1e-6);
        assert!((power_moment(&law, k, mu, false) / below - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gdci_rejects_raw() {
        let law = InnovationLaw::new(1.5, InnovationMode::Raw, 1.0).unwrap();
        let cfg = ProcessConfig::moving_average(law, vec![1.0, 0.5], 10).unwrap();
        let b = gen_moving_average(&cfg, 1.0, SeedSpec::new(0, 0)).unwrap();
        assert_eq!(VniFamily::from_bundles(&[b], 0.2).unwrap_err().tag(), "PRECONDITION");
    }

    #[test]
    fn gdci_zero_order_is_empty() {
        let law = InnovationLaw::symmetric(1.5).unwrap();
        let cfg = ProcessConfig::moving_average(law, vec![1.0], 50).unwrap();
        let b = gen_moving_average(&cfg, 1.0, SeedSpec::new(0, 0)).unwrap();
        let fam = VniFamily::from_bundles(&[b], 0.2).unwrap();
        let s = gdci_moment_sums(&fam, 1.0).unwrap();
        assert_eq!((s.large.value, s.small.value, s.large_exact, s.small_exact), (0.0, 0.0, 0.0, 0.0));
    }
}
