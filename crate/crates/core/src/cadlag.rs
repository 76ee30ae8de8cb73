//! Càdlàg step paths on [0, T] and the path functionals used by the
//! diagnostics: total variation, jump statistics, the M1 modulus, the
//! number of eps-increments and the consecutive-increment functional.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};

/// Right-continuous piecewise-constant path: value `values[k]` on
/// `[times[k], times[k+1])`, the last value holding up to the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPath {
    times: Vec<f64>,
    values: Vec<f64>,
    horizon: f64,
}

impl StepPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, horizon: f64) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Shape(format!("{} breakpoints but {} values", times.len(), values.len())));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(param(format!("horizon must be positive, got {horizon}")));
        }
        if times[0] != 0.0 {
            return Err(Error::Data(format!("first breakpoint must be 0, got {}", times[0])));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Data(format!("breakpoints not strictly increasing at {}", w[1])));
            }
        }
        if *times.last().unwrap() > horizon {
            return Err(Error::Data(format!("breakpoint {} beyond horizon {horizon}", times.last().unwrap())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite path value".into()));
        }
        Ok(Self { times, values, horizon })
    }

    pub(crate) fn from_parts(times: Vec<f64>, values: Vec<f64>, horizon: f64) -> Self {
        debug_assert!(times.len() == values.len() && !times.is_empty());
        Self { times, values, horizon }
    }

    pub fn constant(value: f64, horizon: f64) -> Self {
        Self { times: alloc::vec![0.0], values: alloc::vec![value], horizon }
    }

    /// Path starting at `start` with jumps `(time, size)`; times must be
    /// strictly increasing in (0, horizon].
    pub fn from_jumps(start: f64, jumps: &[(f64, f64)], horizon: f64) -> Result<Self> {
        let mut times = Vec::with_capacity(jumps.len() + 1);
        let mut values = Vec::with_capacity(jumps.len() + 1);
        times.push(0.0);
        values.push(start);
        let mut v = start;
        for &(t, dx) in jumps {
            v += dx;
            times.push(t);
            values.push(v);
        }
        Self::new(times, values, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the cell containing `t` (largest breakpoint <= t).
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.index_at(t)]
    }

    /// Value on the cell strictly before `t`; equals `value_at(0)` at t = 0.
    pub fn left_limit(&self, t: f64) -> f64 {
        self.values[self.times.partition_point(|&s| s < t).saturating_sub(1)]
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Jumps `(time, size)` at breakpoints after 0 (zero-size breakpoints included).
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..self.times.len()).map(move |k| (self.times[k], self.values[k] - self.values[k - 1]))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { times: self.times.clone(), values: self.values.iter().map(|v| c * v).collect(), horizon: self.horizon }
    }

    /// Pointwise combination on the union of both breakpoint sets.
    pub fn zip_with(&self, other: &StepPath, f: impl Fn(f64, f64) -> f64) -> Result<StepPath> {
        check_horizons(self, other)?;
        let (mut i, mut j) = (0usize, 0usize);
        let mut times = Vec::with_capacity(self.len() + other.len());
        let mut values = Vec::with_capacity(self.len() + other.len());
        loop {
            values.push(f(self.values[i], other.values[j]));
            times.push(self.times[i].max(other.times[j]));
            let ni = self.times.get(i + 1).copied();
            let nj = other.times.get(j + 1).copied();
            match (ni, nj) {
                (None, None) => break,
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => i += 1,
                (Some(_), None) => i += 1,
                _ => j += 1,
            }
        }
        Ok(StepPath { times, values, horizon: self.horizon })
    }

    /// Drop breakpoints where the value does not change.
    pub fn compressed(&self) -> StepPath {
        let mut times = alloc::vec![0.0];
        let mut values = alloc::vec![self.values[0]];
        for k in 1..self.len() {
            if self.values[k] != *values.last().unwrap() {
                times.push(self.times[k]);
                values.push(self.values[k]);
            }
        }
        StepPath { times, values, horizon: self.horizon }
    }
}

pub(crate) fn check_horizons(x: &StepPath, y: &StepPath) -> Result<()> {
    if x.horizon != y.horizon {
        return Err(Error::Shape(format!("horizons differ: {} vs {}", x.horizon, y.horizon)));
    }
    Ok(())
}

fn check_time(path: &StepPath, t: f64) -> Result<()> {
    if !(t >= 0.0 && t <= path.horizon) {
        return Err(Error::TimeRange { t, horizon: path.horizon });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Step,
    Linear,
}

/// Path sampled on the uniform grid `k * step`, k = 0..len.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPath {
    step: f64,
    values: Vec<f64>,
    interpolation: Interpolation,
}

impl GridPath {
    pub fn new(step: f64, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(param(format!("grid step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(Error::Data("empty grid path".into()));
        }
        Ok(Self { step, values, interpolation })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.step * k as f64
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Value at `t`, clamped to the grid range. Node lookups tolerate
    /// round-off of a relative 1e-9 step.
    pub fn value_at(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        let x = t / self.step;
        if x <= 0.0 {
            return self.values[0];
        }
        let k = libm::floor(x + 1e-9) as usize;
        if k >= last {
            return self.values[last];
        }
        match self.interpolation {
            Interpolation::Step => self.values[k],
            Interpolation::Linear => {
                let frac = (x - k as f64).max(0.0);
                self.values[k] + frac * (self.values[k + 1] - self.values[k])
            }
        }
    }

    /// Step path with breakpoints at the grid nodes (compressed).
    pub fn to_step_path(&self) -> StepPath {
        let horizon = self.horizon().max(self.step);
        let times: Vec<f64> = (0..self.len()).map(|k| self.time(k)).collect();
        StepPath::from_parts(times, self.values.clone(), horizon).compressed()
    }
}

/// Total variation over [0, t].
pub fn total_variation(path: &StepPath, t: f64) -> Result<f64> {
    check_time(path, t)?;
    let k = path.index_at(t);
    Ok(path.values[..=k].windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpStats {
    pub max_jump: f64,
    pub count_above: usize,
    pub running_sup: f64,
}

/// Largest jump, number of jumps with |size| > a, and sup |path| over [0, t].
pub fn jump_stats(path: &StepPath, t: f64, a: f64) -> Result<JumpStats> {
    check_time(path, t)?;
    if !(a > 0.0) {
        return Err(param(format!("jump threshold must be positive, got {a}")));
    }
    let k = path.index_at(t);
    let vals = &path.values[..=k];
    let mut max_jump = 0.0f64;
    let mut count_above = 0;
    for w in vals.windows(2) {
        let d = (w[1] - w[0]).abs();
        max_jump = max_jump.max(d);
        if d > a {
            count_above += 1;
        }
    }
    let running_sup = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(JumpStats { max_jump, count_above, running_sup })
}

/// M1 modulus: sup over t1 <= s <= t2 <= t with t2 - t1 <= delta of the
/// distance from path(s) to the segment [path(t1), path(t2)].
///
/// Evaluated on cells: for cells i < j < k the pair is admissible when
/// `times[k] - times[i+1] < delta`, since t1 may sit just before the end of
/// cell i. Runs in O(cells x window) with running extrema.
pub fn m1_modulus(path: &StepPath, delta: f64, t: f64) -> f64 {
    if !(delta > 0.0) {
        return 0.0;
    }
    let last = path.index_at(t.min(path.horizon));
    let (tm, v) = (&path.times, &path.values);
    let mut best = 0.0f64;
    for i in 0..last.saturating_sub(1) {
        let (mut lo_in, mut hi_in) = (v[i + 1], v[i + 1]);
        let mut k = i + 2;
        while k <= last && tm[k] - tm[i + 1] < delta {
            let lo = v[i].min(v[k]);
            let hi = v[i].max(v[k]);
            best = best.max(lo - lo_in).max(hi_in - hi);
            lo_in = lo_in.min(v[k]);
            hi_in = hi_in.max(v[k]);
            k += 1;
        }
    }
    best
}

/// Maximal number of disjoint eps-increments on [0, t]. Consecutive
/// increments may share an endpoint, so the greedy scan that closes an
/// increment as early as possible is optimal.
pub fn max_eps_increments(path: &StepPath, eps: f64, t: f64) -> usize {
    if !(eps > 0.0) {
        return 0;
    }
    let last = path.index_at(t.min(path.horizon));
    let v = &path.values;
    let (mut lo, mut hi) = (v[0], v[0]);
    let mut count = 0;
    for &x in &v[1..=last] {
        lo = lo.min(x);
        hi = hi.max(x);
        if x - lo >= eps || hi - x >= eps {
            count += 1;
            lo = x;
            hi = x;
        }
    }
    count
}

/// Consecutive-increment functional
/// sup{ |x(s)-x(r)| ∧ |y(r)-y(u)| : s < r < u <= s + delta, u <= t }.
///
/// Both paths are piecewise constant, so the supremum is attained on the
/// cells of the merged breakpoint grid; the same admissibility rule as in
/// [`m1_modulus`] applies.
pub fn avci_functional(x: &StepPath, y: &StepPath, delta: f64, t: f64) -> Result<f64> {
    check_horizons(x, y)?;
    check_time(x, t)?;
    if !(delta > 0.0) {
        return Err(param(format!("delta must be positive, got {delta}")));
    }
    let merged = x.zip_with(y, |_, _| 0.0)?;
    let g = merged.times();
    let last = merged.index_at(t);
    let xs: Vec<f64> = g[..=last].iter().map(|&s| x.value_at(s)).collect();
    let ys: Vec<f64> = g[..=last].iter().map(|&s| y.value_at(s)).collect();
    let mut best = 0.0f64;
    for a in 0..last.saturating_sub(1) {
        let mut c = a + 2;
        while c <= last && g[c] - g[a + 1] < delta {
            for b in a + 1..c {
                best = best.max((xs[a] - xs[b]).abs().min((ys[b] - ys[c]).abs()));
            }
            c += 1;
        }
    }
    Ok(best)
}
