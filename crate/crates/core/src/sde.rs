//! Event-driven solvers for CTRW- and moving-average-driven SDEs and SDDEs,
//! and left-point Euler schemes for their limits.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cadlag::{GridPath, Interpolation, StepPath};
use crate::error::{param, Error, Result};

pub type Coef3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type Coef2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub fn coef3(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Coef3 {
    Arc::new(f)
}

pub fn coef2(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Coef2 {
    Arc::new(f)
}

/// Default drift mesh is T / 2^12.
pub const DEFAULT_MESH_DIVISIONS: usize = 4096;

/// |coef(t, ỹ, y)| <= K |y|^p + C.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Growth {
    pub k: f64,
    pub c: f64,
    pub p: f64,
}

impl Growth {
    pub fn new(k: f64, c: f64, p: f64) -> Result<Self> {
        if !(k >= 0.0 && c >= 0.0 && p > 0.0 && p < 1.0) {
            return Err(param(format!("growth certificate needs K, C >= 0 and p in (0,1), got ({k}, {c}, {p})")));
        }
        Ok(Self { k, c, p })
    }

    pub fn admits(&self, y: f64, value: f64) -> bool {
        value.abs() <= self.k * libm::pow(y.abs(), self.p) + self.c + 1e-12
    }
}

#[derive(Clone)]
pub struct SdeSpec {
    pub b: Coef3,
    pub mu: Coef3,
    pub sigma: Coef3,
    pub x0: f64,
    pub growth: Option<Growth>,
}

const PROBE_Y: [f64; 9] = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0, 1e3, 1e6];

impl SdeSpec {
    pub fn new(b: Coef3, mu: Coef3, sigma: Coef3, x0: f64) -> Self {
        Self { b, mu, sigma, x0, growth: None }
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = Some(growth);
        self
    }

    fn coefs(&self) -> [(&'static str, &Coef3); 3] {
        [("b", &self.b), ("mu", &self.mu), ("sigma", &self.sigma)]
    }

    /// Spot-check the growth certificate for t <= T, |ỹ| <= R. Returns warnings.
    pub fn spot_check(&self, horizon: f64, radius: f64) -> Vec<String> {
        let Some(g) = self.growth else { return Vec::new() };
        let mut out = Vec::new();
        for (name, f) in self.coefs() {
            'probe: for i in 0..=8 {
                let t = horizon * i as f64 / 8.0;
                for j in 0..=4 {
                    let yt = radius * (j as f64 / 2.0 - 1.0);
                    for y in PROBE_Y.iter().flat_map(|y| [*y, -*y]) {
                        let v = f(t, yt, y);
                        if !v.is_finite() || !g.admits(y, v) {
                            out.push(format!("growth certificate fails for {name} at (t={t}, ytilde={yt}, y={y}): |{v}| > K|y|^p + C"));
                            break 'probe;
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<P> {
    pub path: P,
    pub warnings: Vec<String>,
}

struct ViolationLog {
    count: usize,
    first: Option<(f64, &'static str)>,
}

impl ViolationLog {
    fn new() -> Self {
        Self { count: 0, first: None }
    }

    fn check(&mut self, growth: Option<Growth>, name: &'static str, t: f64, y: f64, v: f64) {
        if let Some(g) = growth {
            if !g.admits(y, v) {
                self.count += 1;
                self.first.get_or_insert((t, name));
            }
        }
    }

    fn finish(self) -> Vec<String> {
        match self.first {
            Some((t, name)) => alloc::vec![format!(
                "growth certificate violated {} times during integration (first: {name} at t={t})",
                self.count
            )],
            None => Vec::new(),
        }
    }
}

fn mesh_nodes(horizon: f64, mesh: f64) -> Result<Vec<f64>> {
    if !(mesh > 0.0) {
        return Err(param("mesh must be positive"));
    }
    let k = libm::ceil(horizon / mesh - 1e-9) as usize;
    Ok((0..=k).map(|j| (j as f64 * mesh).min(horizon)).collect())
}

fn merge_nodes(mut a: Vec<f64>, b: impl IntoIterator<Item = f64>, horizon: f64) -> Vec<f64> {
    a.extend(b.into_iter().filter(|&s| s >= 0.0 && s <= horizon));
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

/// (S_n): drift by explicit Euler on the mesh, jumps of D^n and Z^n applied
/// at their (shared) event times with left-limit coefficients.
pub fn solve_sn(spec: &SdeSpec, d: &StepPath, z: &StepPath, mesh: f64) -> Result<Solution<StepPath>> {
    if d.times() != z.times() {
        return Err(Error::Shape("D^n and Z^n must share their jump times".into()));
    }
    let horizon = z.horizon().min(d.horizon());
    let nodes = merge_nodes(mesh_nodes(horizon, mesh)?, z.times().iter().copied(), horizon);
    let (zt, zv, dv) = (z.times(), z.values(), d.values());
    let mut log = ViolationLog::new();
    let mut x = spec.x0;
    let mut vals = Vec::with_capacity(nodes.len());
    let mut e = 1usize;
    for (i, &t) in nodes.iter().enumerate() {
        if e < zt.len() && zt[e] == t {
            let dl = dv[e - 1];
            let mu = (spec.mu)(t, dl, x);
            let sg = (spec.sigma)(t, dl, x);
            log.check(spec.growth, "mu", t, x, mu);
            log.check(spec.growth, "sigma", t, x, sg);
            x += mu * (dv[e] - dv[e - 1]) + sg * (zv[e] - zv[e - 1]);
            e += 1;
        }
        vals.push(x);
        if let Some(&next) = nodes.get(i + 1) {
            let b = (spec.b)(t, dv[e - 1], x);
            if b != 0.0 {
                log.check(spec.growth, "b", t, x, b);
                x += b * (next - t);
            }
        }
    }
    Ok(Solution { path: StepPath::new(nodes, vals, horizon)?, warnings: log.finish() })
}

/// (S): X_{k+1} = X_k + b Δt + μ ΔD^{-1} + σ ΔZ_{D^{-1}}, coefficients at node k.
pub fn solve_s_limit(spec: &SdeSpec, d_inv: &GridPath, z_tc: &GridPath) -> Result<Solution<GridPath>> {
    let h = d_inv.step();
    if (z_tc.step() - h).abs() > 1e-12 * h || z_tc.len() != d_inv.len() {
        return Err(Error::Shape("D^{-1} and Z_{D^{-1}} must share one grid".into()));
    }
    let (dv, zv) = (d_inv.values(), z_tc.values());
    let mut log = ViolationLog::new();
    let mut out = Vec::with_capacity(dv.len());
    let mut x = spec.x0;
    out.push(x);
    for k in 0..dv.len() - 1 {
        let t = d_inv.time(k);
        let (b, mu, sg) = ((spec.b)(t, dv[k], x), (spec.mu)(t, dv[k], x), (spec.sigma)(t, dv[k], x));
        log.check(spec.growth, "sigma", t, x, sg);
        x += b * h + mu * (dv[k + 1] - dv[k]) + sg * (zv[k + 1] - zv[k]);
        out.push(x);
    }
    Ok(Solution { path: GridPath::new(h, out, Interpolation::Step)?, warnings: log.finish() })
}

/// Kernel of the extended SDDE: σ̃(t) = ∫_{t-r}^t Φ(t, s, X_s) ds.
#[derive(Clone)]
pub struct Kernel {
    pub phi: Coef3,
    pub bound: f64,
    pub lipschitz: f64,
}

#[derive(Clone)]
pub struct SddeSpec {
    pub b: Coef2,
    pub sigma: Coef2,
    pub delay: f64,
    /// Initial segment: η(s) = eta.value_at(s + r) for s in [-r, 0].
    pub eta: StepPath,
    /// c = Σ c_k of the driving moving average (σ is divided by it).
    pub c_sum: f64,
    pub kernel: Option<Kernel>,
    /// Declared sup |b| ∨ |σ|.
    pub bound: Option<f64>,
}

impl SddeSpec {
    pub fn new(b: Coef2, sigma: Coef2, delay: f64, eta: StepPath, c_sum: f64) -> Result<Self> {
        if !(delay > 0.0) {
            return Err(param(format!("delay must be positive, got {delay}")));
        }
        if (eta.horizon() - delay).abs() > 1e-12 * delay {
            return Err(Error::Shape(format!("initial segment covers {} but the delay is {delay}", eta.horizon())));
        }
        if !(c_sum > 0.0) {
            return Err(param("coefficient sum must be positive"));
        }
        Ok(Self { b, sigma, delay, eta, c_sum, kernel: None, bound: None })
    }

    /// η ≡ value on [-r, 0].
    pub fn constant_eta(b: Coef2, sigma: Coef2, delay: f64, value: f64, c_sum: f64) -> Result<Self> {
        if !(delay > 0.0) {
            return Err(param(format!("delay must be positive, got {delay}")));
        }
        Self::new(b, sigma, delay, StepPath::constant(value, delay), c_sum)
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = Some(kernel);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn eta_at(&self, s: f64) -> f64 {
        self.eta.value_at(s + self.delay)
    }

    fn eta_left(&self, s: f64) -> f64 {
        self.eta.left_limit(s + self.delay)
    }

    /// Spot-check sup |b| ∨ |σ| <= bound on a probe grid. Returns warnings.
    pub fn spot_check(&self, horizon: f64) -> Vec<String> {
        let Some(bound) = self.bound else { return Vec::new() };
        let mut out = Vec::new();
        for (name, f) in [("b", &self.b), ("sigma", &self.sigma)] {
            'probe: for i in 0..=8 {
                let t = horizon * i as f64 / 8.0;
                for y in PROBE_Y {
                    for x in [y, -y] {
                        let v = f(t, x);
                        if !v.is_finite() || v.abs() > bound + 1e-12 {
                            out.push(format!(
                                "boundedness certificate fails for {name} at (t={t}, x={x}): |{v}| > {bound}"
                            ));
                            break 'probe;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Solution history: η on [-r, 0) followed by the computed node values.
struct History<'a> {
    spec: &'a SddeSpec,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl History<'_> {
    fn at(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.spec.eta_at(s);
        }
        let i = self.times.partition_point(|&u| u <= s).saturating_sub(1);
        self.values[i]
    }

    fn left(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.spec.eta_left(s);
        }
        let i = self.times.partition_point(|&u| u < s).saturating_sub(1);
        self.values[i]
    }

    /// Trapezoid rule over the stored nodes of [t-r, t].
    fn kernel_integral(&self, k: &Kernel, t: f64, x_left: f64) -> f64 {
        let r = self.spec.delay;
        let lo = t - r;
        let mut pts: Vec<(f64, f64)> = Vec::new();
        pts.push((lo, self.at(lo)));
        let eta = &self.spec.eta;
        for (u, v) in eta.times().iter().zip(eta.values()) {
            let s = u - r;
            if s > lo && s < 0.0 {
                pts.push((s, *v));
            }
        }
        let start = self.times.partition_point(|&u| u <= lo);
        for i in start..self.times.len() {
            if self.times[i] < t {
                pts.push((self.times[i], self.values[i]));
            }
        }
        pts.push((t, x_left));
        let mut acc = 0.0;
        // piecewise-constant path: the value on [s_i, s_{i+1}) is the one at s_i
        for w in pts.windows(2) {
            let (s0, x0) = w[0];
            let s1 = w[1].0;
            acc += 0.5 * (s1 - s0) * ((k.phi)(t, s0, x0) + (k.phi)(t, s1, x0));
        }
        acc
    }
}

/// (SD_n) and its extended form: exact event-driven solution, drift by
/// explicit Euler on the union of mesh, driver events and delayed breakpoints.
pub fn solve_sddn(spec: &SddeSpec, z: &StepPath, mesh: f64) -> Result<Solution<StepPath>> {
    let horizon = z.horizon();
    let r = spec.delay;
    let mut nodes = merge_nodes(mesh_nodes(horizon, mesh)?, z.times().iter().copied(), horizon);
    // delayed breakpoints of η and of the solution itself
    let mut shifted: Vec<f64> = spec.eta.times().iter().copied().filter(|&u| u > 0.0).collect();
    let mut frontier: Vec<f64> = z.times().iter().copied().filter(|&u| u > 0.0).collect();
    frontier.extend(shifted.iter().copied());
    let mut j = 1.0;
    while j * r < horizon {
        frontier = frontier.iter().map(|u| u + r).filter(|&u| u <= horizon).collect();
        shifted.extend(frontier.iter().copied());
        j += 1.0;
    }
    nodes = merge_nodes(nodes, shifted, horizon);

    let mut warnings = spec.spot_check(horizon);
    let mut hist = History { spec, times: Vec::with_capacity(nodes.len()), values: Vec::with_capacity(nodes.len()) };
    let (zt, zv) = (z.times(), z.values());
    let mut x = spec.eta_at(0.0);
    let mut e = 1usize;
    let inv_c = 1.0 / spec.c_sum;
    for (i, &t) in nodes.iter().enumerate() {
        if e < zt.len() && zt[e] == t {
            let del = hist.left(t - r);
            let mut sg = (spec.sigma)(t, del);
            if let Some(k) = &spec.kernel {
                sg += hist.kernel_integral(k, t, x);
            }
            x += inv_c * sg * (zv[e] - zv[e - 1]);
            e += 1;
        }
        hist.times.push(t);
        hist.values.push(x);
        if let Some(&next) = nodes.get(i + 1) {
            let b = (spec.b)(t, hist.at(t - r));
            if b != 0.0 {
                x += b * (next - t);
            }
        }
    }
    let bad = hist.values.iter().any(|v| !v.is_finite());
    if bad {
        warnings.push("solution left the finite range".into());
    }
    Ok(Solution { path: StepPath::new(hist.times, hist.values, horizon)?, warnings })
}

/// Extended SDDE: σ replaced by σ + σ̃. Requires a kernel on the spec.
pub fn solve_ext_sddn(spec: &SddeSpec, z: &StepPath, mesh: f64) -> Result<Solution<StepPath>> {
    let k = spec.kernel.as_ref().ok_or_else(|| Error::Precondition("extended SDDE needs a kernel Φ".into()))?;
    if !(k.bound >= 0.0 && k.lipschitz >= 0.0) {
        return Err(param("kernel bound and Lipschitz constant must be nonnegative"));
    }
    solve_sddn(spec, z, mesh)
}

/// (SD): left-point Euler on the grid of Z with the delayed argument read
/// from the grid history or η. The grid step must divide r.
pub fn solve_sdd_limit(spec: &SddeSpec, z: &GridPath) -> Result<Solution<GridPath>> {
    let h = z.step();
    let ratio = spec.delay / h;
    let d = libm::round(ratio);
    if (ratio - d).abs() > 1e-9 * ratio.max(1.0) || d < 1.0 {
        return Err(param(format!("grid step {h} does not divide the delay {}", spec.delay)));
    }
    let d = d as usize;
    let zv = z.values();
    let mut out = Vec::with_capacity(zv.len());
    let mut x = spec.eta_at(0.0);
    out.push(x);
    for k in 0..zv.len() - 1 {
        let t = z.time(k);
        let del = if k >= d { out[k - d] } else { spec.eta_at(t - spec.delay) };
        let mut sg = (spec.sigma)(t, del);
        if let Some(kern) = &spec.kernel {
            // rectangle rule on the grid history
            let mut acc = 0.0;
            for i in 0..d {
                let s = t - spec.delay + i as f64 * h;
                let xs = if k + i >= d { out[k + i - d] } else { spec.eta_at(s) };
                acc += (kern.phi)(t, s, xs) * h;
            }
            sg += acc;
        }
        x += (spec.b)(t, del) * h + sg * (zv[k + 1] - zv[k]);
        out.push(x);
    }
    Ok(Solution { path: GridPath::new(h, out, Interpolation::Step)?, warnings: spec.spot_check(z.horizon()) })
}
