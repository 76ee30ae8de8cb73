//! Generators: moving averages, CTRWs (uncorrelated, correlated, coupled),
//! the renewal counter, stable subordinators with their inverses, and
//! time-changed stable Lévy paths.

use alloc::format;
use alloc::vec::Vec;

use crate::cadlag::{GridPath, Interpolation, StepPath};
use crate::error::{param, Error, Result};
use crate::rng::{InnovationLaw, SeedSpec, StableParams, WaitingLaw};

const TAG_INNOVATIONS: u64 = 1;
const TAG_WAITS: u64 = 2;
const TAG_SUBORDINATOR: u64 = 3;
const TAG_LEVY: u64 = 4;

/// Default grid step for limit processes, as a fraction of the horizon.
pub const DEFAULT_GRID_FRACTION: f64 = 1.0 / 4096.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    Uncoupled,
    /// J_k = scale_J * max(1, (|θ_k| / scale_θ)^{α/β}).
    MagnitudeCoupled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessConfig {
    pub innovation: InnovationLaw,
    /// `None` means unit waits, i.e. a moving average.
    pub waiting: Option<WaitingLaw>,
    pub coefficients: Vec<f64>,
    /// Number of past innovations θ_0, ..., θ_{-past} kept; defaults to the
    /// coefficient order.
    pub past_horizon: Option<usize>,
    pub n: u64,
    pub coupling: Coupling,
}

impl ProcessConfig {
    pub fn moving_average(innovation: InnovationLaw, coefficients: Vec<f64>, n: u64) -> Result<Self> {
        let c = Self { innovation, waiting: None, coefficients, past_horizon: None, n, coupling: Coupling::Uncoupled };
        c.validate()?;
        Ok(c)
    }

    pub fn ctrw(innovation: InnovationLaw, waiting: WaitingLaw, coefficients: Vec<f64>, n: u64) -> Result<Self> {
        let c = Self {
            innovation,
            waiting: Some(waiting),
            coefficients,
            past_horizon: None,
            n,
            coupling: Coupling::Uncoupled,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn coupled(mut self) -> Result<Self> {
        self.coupling = Coupling::MagnitudeCoupled;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = n;
        self
    }

    pub fn with_past_horizon(mut self, past: usize) -> Self {
        self.past_horizon = Some(past);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.innovation.validate()?;
        if let Some(w) = &self.waiting {
            w.validate()?;
        }
        if self.n == 0 {
            return Err(param("scaling n must be positive"));
        }
        let c = &self.coefficients;
        if c.is_empty() || !(c[0] > 0.0) {
            return Err(param("coefficients must start with c_0 > 0"));
        }
        if c.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(param("coefficients must be finite and nonnegative"));
        }
        if self.coupling == Coupling::MagnitudeCoupled {
            if self.waiting.is_none() {
                return Err(param("coupling needs a waiting law"));
            }
            if self.is_correlated() || c.len() > 1 {
                return Err(param("coupled CTRWs are uncorrelated: coefficients must be (c_0)"));
            }
        }
        Ok(())
    }

    /// ψ = Σ c_j.
    pub fn psi(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    /// Coefficient order 𝒥.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn past(&self) -> usize {
        self.past_horizon.unwrap_or(self.order())
    }

    pub fn is_correlated(&self) -> bool {
        self.coefficients[1..].iter().any(|&c| c > 0.0)
    }

    /// β for CTRWs, 1 for moving averages.
    pub fn time_exponent(&self) -> f64 {
        self.waiting.map_or(1.0, |w| w.beta)
    }

    /// n^{-β/α} (or n^{-1/α} for a moving average).
    pub fn spatial_scale(&self) -> f64 {
        spatial_scale(self.n, self.time_exponent(), self.innovation.alpha)
    }
}

pub fn spatial_scale(n: u64, time_exponent: f64, alpha: f64) -> f64 {
    libm::pow(n as f64, -time_exponent / alpha)
}

/// θ_{-past}, ..., θ_0, θ_1, ... stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct InnovationRecord {
    past: usize,
    values: Vec<f64>,
}

impl InnovationRecord {
    /// `values[0]` is θ_{-past}.
    pub fn new(past: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() <= past {
            return Err(Error::Data(format!("innovation record shorter than its past ({past})")));
        }
        Ok(Self { past, values })
    }

    pub fn past(&self) -> usize {
        self.past
    }

    /// Number of innovations θ_1, θ_2, ... present.
    pub fn future_len(&self) -> usize {
        self.values.len() - self.past - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// θ_k for -past <= k <= future_len.
    #[inline]
    pub fn theta(&self, k: i64) -> f64 {
        self.values[(k + self.past as i64) as usize]
    }

    pub fn get(&self, k: i64) -> Option<f64> {
        let idx = k + self.past as i64;
        if idx < 0 {
            None
        } else {
            self.values.get(idx as usize).copied()
        }
    }
}

/// Everything drawn for one realisation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationBundle {
    pub config: ProcessConfig,
    pub horizon: f64,
    pub seed: SeedSpec,
    pub x: StepPath,
    /// Renewal counter N_{n t} (for moving averages ⌊n t⌋).
    pub counting: StepPath,
    pub innovations: InnovationRecord,
    /// J_1, ..., J_{N+1} (the last one overshoots n T); `None` for moving averages.
    pub waits: Option<Vec<f64>>,
    /// Event times L_k / n (or k / n), k = 1..N.
    pub events: Vec<f64>,
}

impl SimulationBundle {
    pub fn jump_count(&self) -> usize {
        self.events.len()
    }

    /// X rebuilt from the records and config.
    pub fn rebuild(&self) -> Result<StepPath> {
        let t = self.config.time_exponent();
        let paths = assemble(&self.config, &self.innovations, self.waits.as_deref(), self.horizon, t)?;
        Ok(paths.x)
    }

    /// Scaled innovation ζ^n_k = s · Σ_j c_j θ_{k-j} (k >= 1).
    pub fn scaled_zeta(&self, k: usize) -> f64 {
        self.config.spatial_scale() * zeta(&self.config.coefficients, &self.innovations, k)
    }
}

#[inline]
fn zeta(c: &[f64], rec: &InnovationRecord, k: usize) -> f64 {
    let jmax = (c.len() - 1).min(k + rec.past);
    let mut z = 0.0;
    for (j, cj) in c[..=jmax].iter().enumerate() {
        z += cj * rec.theta(k as i64 - j as i64);
    }
    z
}

pub struct AssembledPaths {
    pub x: StepPath,
    pub counting: StepPath,
    pub events: Vec<f64>,
}

fn unit_count(n: u64, horizon: f64) -> usize {
    libm::floor(n as f64 * horizon * (1.0 + 1e-12)) as usize
}

/// Build X and N from records. `waits = None` gives event times k/n; with
/// waits the events are L_k/n for L_k <= nT. `time_exponent` sets the
/// spatial scale n^{-time_exponent/α}.
pub fn assemble(
    config: &ProcessConfig,
    innovations: &InnovationRecord,
    waits: Option<&[f64]>,
    horizon: f64,
    time_exponent: f64,
) -> Result<AssembledPaths> {
    if !(horizon > 0.0) {
        return Err(param(format!("horizon must be positive, got {horizon}")));
    }
    let n = config.n as f64;
    let mut events = Vec::new();
    match waits {
        None => {
            let k_max = unit_count(config.n, horizon);
            events.extend((1..=k_max).map(|k| (k as f64 / n).min(horizon)));
        }
        Some(js) => {
            let limit = n * horizon;
            let mut l = 0.0;
            for &j in js {
                l += j;
                if l > limit {
                    break;
                }
                events.push((l / n).min(horizon));
            }
        }
    }
    if innovations.future_len() < events.len() {
        return Err(Error::Data(format!(
            "{} events but only {} innovations recorded",
            events.len(),
            innovations.future_len()
        )));
    }
    let s = spatial_scale(config.n, time_exponent, config.innovation.alpha);
    let mut times = Vec::with_capacity(events.len() + 1);
    let mut values = Vec::with_capacity(events.len() + 1);
    let mut ctimes = Vec::with_capacity(events.len() + 1);
    let mut cvalues = Vec::with_capacity(events.len() + 1);
    times.push(0.0);
    values.push(0.0);
    ctimes.push(0.0);
    cvalues.push(0.0);
    let mut v = 0.0;
    for (i, &t) in events.iter().enumerate() {
        let k = i + 1;
        v += s * zeta(&config.coefficients, innovations, k);
        // coincident event times (possible only through round-off) merge
        if t == *times.last().unwrap() {
            *values.last_mut().unwrap() = v;
            *cvalues.last_mut().unwrap() = k as f64;
        } else {
            times.push(t);
            values.push(v);
            ctimes.push(t);
            cvalues.push(k as f64);
        }
    }
    Ok(AssembledPaths {
        x: StepPath::from_parts(times, values, horizon),
        counting: StepPath::from_parts(ctimes, cvalues, horizon),
        events,
    })
}

fn draw_innovations(law: &InnovationLaw, past: usize, count: usize, seed: SeedSpec) -> InnovationRecord {
    let mut rng = seed.child(TAG_INNOVATIONS).rng();
    let values = (0..past + 1 + count).map(|_| law.draw(&mut rng)).collect();
    InnovationRecord { past, values }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(param(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

/// X^n_t = n^{-1/α} Σ_{k ≤ ⌊nt⌋} ζ_k.
pub fn gen_moving_average(config: &ProcessConfig, horizon: f64, seed: SeedSpec) -> Result<SimulationBundle> {
    config.validate()?;
    check_horizon(horizon)?;
    if config.waiting.is_some() {
        return Err(param("moving averages take no waiting law"));
    }
    let k_max = unit_count(config.n, horizon);
    let innovations = draw_innovations(&config.innovation, config.past(), k_max, seed);
    let paths = assemble(config, &innovations, None, horizon, 1.0)?;
    Ok(SimulationBundle {
        config: config.clone(),
        horizon,
        seed,
        x: paths.x,
        counting: paths.counting,
        innovations,
        waits: None,
        events: paths.events,
    })
}

fn draw_waits(law: &WaitingLaw, limit: f64, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.child(TAG_WAITS).rng();
    let mut waits = Vec::new();
    let mut l = 0.0;
    while l <= limit {
        let j = law.draw(&mut rng);
        l += j;
        waits.push(j);
    }
    waits
}

/// X^n_t = n^{-β/α} Σ_{k ≤ N_{nt}} ζ_k with renewal times L_k = J_1 + ... + J_k.
pub fn gen_ctrw(config: &ProcessConfig, horizon: f64, seed: SeedSpec) -> Result<SimulationBundle> {
    config.validate()?;
    check_horizon(horizon)?;
    let law = config.waiting.ok_or_else(|| param("CTRW needs a waiting law"))?;
    let limit = config.n as f64 * horizon;
    let past = config.past();
    let (innovations, waits) = match config.coupling {
        Coupling::Uncoupled => {
            let waits = draw_waits(&law, limit, seed);
            let count = waits.len() - 1;
            (draw_innovations(&config.innovation, past, count, seed), waits)
        }
        Coupling::MagnitudeCoupled => {
            let mut rng = seed.child(TAG_INNOVATIONS).rng();
            let mut values: Vec<f64> = (0..past + 1).map(|_| config.innovation.draw(&mut rng)).collect();
            let mut waits = Vec::new();
            let expo = config.innovation.alpha / law.beta;
            let mut l = 0.0;
            while l <= limit {
                let th = config.innovation.draw(&mut rng);
                let j = law.scale * libm::pow((th / config.innovation.scale).abs(), expo).max(1.0);
                l += j;
                waits.push(j);
                if l <= limit {
                    values.push(th);
                }
            }
            (InnovationRecord { past, values }, waits)
        }
    };
    let paths = assemble(config, &innovations, Some(&waits), horizon, law.beta)?;
    Ok(SimulationBundle {
        config: config.clone(),
        horizon,
        seed,
        x: paths.x,
        counting: paths.counting,
        innovations,
        waits: Some(waits),
        events: paths.events,
    })
}

/// Renewal counter N_{n t} and D^n_t = n^{-β} N_{n t} on [0, T]. Uses the
/// same wait stream as [`gen_ctrw`], so for equal seeds the counters agree.
pub fn gen_counting(law: &WaitingLaw, n: u64, horizon: f64, seed: SeedSpec) -> Result<(StepPath, StepPath)> {
    law.validate()?;
    check_horizon(horizon)?;
    if n == 0 {
        return Err(param("scaling n must be positive"));
    }
    let waits = draw_waits(law, n as f64 * horizon, seed);
    counting_from_waits(&waits, n, horizon, law.beta)
}

/// Counter and its n^{-β} rescaling from given waits.
pub fn counting_from_waits(waits: &[f64], n: u64, horizon: f64, beta: f64) -> Result<(StepPath, StepPath)> {
    check_horizon(horizon)?;
    if waits.iter().any(|j| !(*j > 0.0)) {
        return Err(Error::Data("waiting times must be positive".into()));
    }
    let nf = n as f64;
    let limit = nf * horizon;
    let mut times = alloc::vec![0.0];
    let mut counts = alloc::vec![0.0];
    let mut l = 0.0;
    for (i, &j) in waits.iter().enumerate() {
        l += j;
        if l > limit {
            break;
        }
        let t = (l / nf).min(horizon);
        if t == *times.last().unwrap() {
            *counts.last_mut().unwrap() = (i + 1) as f64;
        } else {
            times.push(t);
            counts.push((i + 1) as f64);
        }
    }
    let scale = libm::pow(nf, -beta);
    let d = counts.iter().map(|c| c * scale).collect();
    Ok((StepPath::from_parts(times.clone(), counts, horizon), StepPath::from_parts(times, d, horizon)))
}

/// Subordinator D on an s-grid and its generalised inverse on a t-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinatorPaths {
    pub d: GridPath,
    pub d_inv: GridPath,
}

const MAX_GRID_NODES: usize = 1 << 27;

/// β-stable subordinator with D_1 ~ S(β, 1, `scale`), simulated by i.i.d.
/// increments on the grid `k·step` until it exceeds `horizon`, and its
/// exact generalised inverse D^{-1}_t = inf{s : D_s > t} on the same-step
/// t-grid. Between nodes D is interpolated linearly, which makes D^{-1}
/// continuous with D^{-1}_0 = 0.
pub fn gen_subordinator_inverse(
    beta: f64,
    scale: f64,
    horizon: f64,
    step: f64,
    seed: SeedSpec,
) -> Result<SubordinatorPaths> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BetaRange(beta));
    }
    check_horizon(horizon)?;
    if !(step > 0.0) {
        return Err(param("grid step must be positive"));
    }
    let inc = StableParams::new(beta, 1.0, scale, 0.0)?.increment(step);
    let mut rng = seed.child(TAG_SUBORDINATOR).rng();
    let mut values = alloc::vec![0.0];
    let mut d = 0.0;
    while d <= horizon {
        d += inc.draw(&mut rng);
        values.push(d);
        if values.len() > MAX_GRID_NODES {
            return Err(Error::Data("subordinator did not exceed the horizon".into()));
        }
    }
    let d = GridPath::new(step, values, Interpolation::Linear)?;
    let d_inv = generalized_inverse(&d, step, horizon)?;
    Ok(SubordinatorPaths { d, d_inv })
}

/// inf{s : D_s > t} at t = k·t_step, k = 0..=⌈T/t_step⌉, for a
/// nondecreasing D given on a grid (step or linear interpolation).
pub fn generalized_inverse(d: &GridPath, t_step: f64, horizon: f64) -> Result<GridPath> {
    if !(t_step > 0.0) {
        return Err(param("grid step must be positive"));
    }
    let dv = d.values();
    if dv.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Data("time change must be nondecreasing".into()));
    }
    if !(d.final_value() > horizon) {
        return Err(Error::Data("time change does not exceed the horizon".into()));
    }
    let nodes = libm::ceil(horizon / t_step - 1e-9) as usize;
    let h = d.step();
    let mut out = Vec::with_capacity(nodes + 1);
    let mut k = 0usize;
    for i in 0..=nodes {
        let t = (i as f64 * t_step).min(horizon);
        while dv[k] <= t {
            k += 1;
        }
        let s = match d.interpolation() {
            Interpolation::Step => k as f64 * h,
            Interpolation::Linear if k == 0 => 0.0,
            Interpolation::Linear => {
                let (a, b) = (dv[k - 1], dv[k]);
                (k - 1) as f64 * h + h * (t - a) / (b - a)
            }
        };
        out.push(s);
    }
    GridPath::new(t_step, out, Interpolation::Linear)
}

/// Z evaluated along a time change: t_k ↦ Z(D^{-1}_{t_k}).
pub fn time_change(z: &GridPath, d_inv: &GridPath) -> Result<GridPath> {
    let needed = d_inv.final_value();
    if needed > z.horizon() * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::Shape(format!("Lévy path covers [0, {}] but time change reaches {needed}", z.horizon())));
    }
    let values = d_inv.values().iter().map(|&s| z.value_at(s)).collect();
    GridPath::new(d_inv.step(), values, Interpolation::Step)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeChangedLevy {
    /// Z on the s-grid.
    pub z: GridPath,
    pub d: GridPath,
    pub d_inv: GridPath,
    /// Z_{D^{-1}_t} on the t-grid.
    pub path: GridPath,
}

/// Z_{D^{-1}} with Z_1 ~ `z_law`, D_1 ~ S(β, 1, `d_scale`), Z and D
/// independent, all on grids of step `step`.
pub fn gen_time_changed_levy(
    z_law: &StableParams,
    beta: f64,
    d_scale: f64,
    horizon: f64,
    step: f64,
    seed: SeedSpec,
) -> Result<TimeChangedLevy> {
    z_law.validate()?;
    let sub = gen_subordinator_inverse(beta, d_scale, horizon, step, seed)?;
    let inc = z_law.increment(step);
    let mut rng = seed.child(TAG_LEVY).rng();
    let len = sub.d.len();
    let mut zv = Vec::with_capacity(len);
    let mut z = 0.0;
    zv.push(0.0);
    for _ in 1..len {
        z += inc.draw(&mut rng);
        zv.push(z);
    }
    let z = GridPath::new(step, zv, Interpolation::Step)?;
    let path = time_change(&z, &sub.d_inv)?;
    Ok(TimeChangedLevy { z, d: sub.d, d_inv: sub.d_inv, path })
}

/// Lévy path Z on [0, horizon] with Z_1 ~ `law`, grid step `step`.
pub fn gen_levy(law: &StableParams, horizon: f64, step: f64, seed: SeedSpec) -> Result<GridPath> {
    law.validate()?;
    check_horizon(horizon)?;
    let nodes = libm::ceil(horizon / step - 1e-9) as usize;
    let inc = law.increment(step);
    let mut rng = seed.child(TAG_LEVY).rng();
    let mut z = 0.0;
    let mut values = Vec::with_capacity(nodes + 1);
    values.push(0.0);
    for _ in 0..nodes {
        z += inc.draw(&mut rng);
        values.push(z);
    }
    GridPath::new(step, values, Interpolation::Step)
}
