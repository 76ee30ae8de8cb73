//! Uniform, J1 and M1 distances between paths on a common horizon [0, T].
//!
//! J1 is `inf_λ max(‖λ − id‖, ‖x∘λ − y‖)` over increasing homeomorphisms of
//! [0, T]; M1 is the Fréchet-type distance between completed graphs under the
//! L∞ point metric on (t, x). Both follow Whitt's formulations.

use alloc::vec;
use alloc::vec::Vec;

use crate::cadlag::{check_horizons, GridPath, Interpolation, StepPath};
use crate::error::{param, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Time at which the sup-distance is attained.
    Uniform { at: f64 },
    /// Knots `(u, τ)` of a piecewise-linear warp: λ(u) = τ, so the jump of
    /// `x` at τ is placed at `u` in `y`'s clock.
    TimeWarp { knots: Vec<(f64, f64)> },
    /// Discrete monotone matching between graph vertices.
    GraphMatching { resolution: usize, vertices: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub witness: Witness,
    pub exact: bool,
    /// Discretisation mesh; 0 for exact results.
    pub mesh: f64,
}

/// sup over the merged breakpoints of |x − y|.
pub fn d_uniform(x: &StepPath, y: &StepPath) -> Result<MetricResult> {
    check_horizons(x, y)?;
    let diff = x.zip_with(y, |a, b| (a - b).abs())?;
    let (mut value, mut at) = (0.0f64, 0.0);
    for (t, v) in diff.times().iter().zip(diff.values()) {
        if *v > value {
            value = *v;
            at = *t;
        }
    }
    Ok(MetricResult { value, witness: Witness::Uniform { at }, exact: true, mesh: 0.0 })
}

/// Exact J1 distance between step paths.
///
/// The optimal warp can be taken piecewise linear with knots at jump times,
/// so the distance is one of the finitely many values |x_a − y_b| or
/// |τ_i − σ_j|. Each candidate is tested by a dynamic programme over the
/// lattice of (jumps of x consumed, jumps of y consumed) that tracks the
/// earliest admissible time for each state; the smallest feasible candidate
/// is found by bisection.
pub fn d_j1(x: &StepPath, y: &StepPath) -> Result<MetricResult> {
    check_horizons(x, y)?;
    let x = x.compressed();
    let y = y.compressed();
    let upper = d_uniform(&x, &y)?.value;
    let (xv, yv) = (x.values(), y.values());
    let (xt, yt) = (x.times(), y.times());
    let mut cand = vec![0.0, upper];
    for &a in xv {
        for &b in yv {
            let d = (a - b).abs();
            if d < upper {
                cand.push(d);
            }
        }
    }
    for &s in &xt[1..] {
        for &t in &yt[1..] {
            let d = (s - t).abs();
            if d < upper {
                cand.push(d);
            }
        }
    }
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let scale = 1.0 + x.horizon() + upper + xv.iter().chain(yv).fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if j1_feasible(&x, &y, cand[mid] + slack).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let knots = j1_feasible(&x, &y, cand[lo] + slack).unwrap_or_default();
    Ok(MetricResult { value: cand[lo], witness: Witness::TimeWarp { knots }, exact: true, mesh: 0.0 })
}

/// Returns warp knots if J1 distance <= eps is attainable.
fn j1_feasible(x: &StepPath, y: &StepPath, eps: f64) -> Option<Vec<(f64, f64)>> {
    let (xv, yv, xt, yt) = (x.values(), y.values(), x.times(), y.times());
    let horizon = x.horizon();
    let (p, q) = (xv.len() - 1, yv.len() - 1);
    let ok = |a: usize, b: usize| (xv[a] - yv[b]).abs() <= eps;
    if !ok(0, 0) {
        return None;
    }
    let w = q + 1;
    let mut entry = vec![f64::INFINITY; (p + 1) * w];
    // 0: start, 1: x jump, 2: y jump, 3: both
    let mut from = vec![0u8; (p + 1) * w];
    entry[0] = 0.0;
    for a in 0..=p {
        for b in 0..=q {
            let e = entry[a * w + b];
            if !e.is_finite() {
                continue;
            }
            let next_y = if b < q { yt[b + 1] } else { horizon };
            if a < p && ok(a + 1, b) {
                let tau = xt[a + 1];
                let lo = if tau == horizon { horizon } else { e.max(tau - eps).max(0.0) };
                let hi = (tau + eps).min(next_y).min(horizon);
                if lo <= hi && lo >= e {
                    let idx = (a + 1) * w + b;
                    if lo < entry[idx] {
                        entry[idx] = lo;
                        from[idx] = 1;
                    }
                }
            }
            if b < q && yt[b + 1] >= e && ok(a, b + 1) && (yt[b + 1] < horizon || a == p) {
                let idx = a * w + b + 1;
                if yt[b + 1] < entry[idx] {
                    entry[idx] = yt[b + 1];
                    from[idx] = 2;
                }
            }
            if a < p && b < q && ok(a + 1, b + 1) {
                let (tau, sig) = (xt[a + 1], yt[b + 1]);
                let pinned = tau == horizon || sig == horizon;
                let fits = if pinned { tau == sig } else { (sig - tau).abs() <= eps };
                if fits && sig >= e {
                    let idx = (a + 1) * w + b + 1;
                    if sig < entry[idx] {
                        entry[idx] = sig;
                        from[idx] = 3;
                    }
                }
            }
        }
    }
    if !entry[p * w + q].is_finite() {
        return None;
    }
    let mut knots = Vec::with_capacity(p);
    let (mut a, mut b) = (p, q);
    while a > 0 || b > 0 {
        match from[a * w + b] {
            1 => {
                knots.push((entry[a * w + b], xt[a]));
                a -= 1;
            }
            2 => b -= 1,
            _ => {
                knots.push((entry[a * w + b], xt[a]));
                a -= 1;
                b -= 1;
            }
        }
    }
    knots.reverse();
    Some(knots)
}

/// Completed graph of a path as a polyline in the (t, x) plane.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletedGraph {
    points: Vec<(f64, f64)>,
}

impl CompletedGraph {
    /// Staircase with vertical segments filling every jump.
    pub fn from_step(path: &StepPath) -> Self {
        let (t, v) = (path.times(), path.values());
        let mut points = vec![(0.0, v[0])];
        for k in 1..t.len() {
            points.push((t[k], v[k - 1]));
            points.push((t[k], v[k]));
        }
        points.push((path.horizon(), v[v.len() - 1]));
        Self::from_polyline(points).expect("staircase is monotone in time")
    }

    /// Grid path: linear interpolation joins nodes directly, step
    /// interpolation gives a staircase.
    pub fn from_grid(path: &GridPath) -> Self {
        match path.interpolation() {
            Interpolation::Step => Self::from_step(&path.to_step_path()),
            Interpolation::Linear => {
                let points = path.values().iter().enumerate().map(|(k, &v)| (path.time(k), v)).collect();
                Self::from_polyline(points).expect("grid is monotone in time")
            }
        }
    }

    /// Arbitrary polyline whose time coordinate is nondecreasing.
    pub fn from_polyline(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Data("completed graph needs two points".into()));
        }
        if points.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::Data("completed graph must be nondecreasing in time".into()));
        }
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        if out.len() == 1 {
            out.push(out[0]);
        }
        Ok(Self { points: out })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Vertices with each segment split into `resolution - 1` equal pieces,
    /// plus the largest L∞ edge length.
    fn discretise(&self, resolution: usize) -> (Vec<(f64, f64)>, f64) {
        let mut out = vec![self.points[0]];
        let mut mesh = 0.0f64;
        let pieces = resolution - 1;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            for k in 1..=pieces {
                let s = k as f64 / pieces as f64;
                out.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
            }
            mesh = mesh.max((b.0 - a.0).abs().max((b.1 - a.1).abs()) / pieces as f64);
        }
        (out, mesh)
    }
}

/// Discrete Fréchet distance between two vertex chains under the L∞ metric.
fn discrete_frechet(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    let d = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
    let m = q.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    prev[0] = d(p[0], q[0]);
    for j in 1..m {
        prev[j] = prev[j - 1].max(d(p[0], q[j]));
    }
    for &pi in &p[1..] {
        cur[0] = prev[0].max(d(pi, q[0]));
        for j in 1..m {
            let reach = prev[j].min(prev[j - 1]).min(cur[j - 1]);
            cur[j] = reach.max(d(pi, q[j]));
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// M1 distance between completed graphs, approximated by the discrete
/// Fréchet distance of the discretised graphs. The true value lies in
/// `[value − mesh, value]`.
pub fn d_m1_graphs(x: &CompletedGraph, y: &CompletedGraph, resolution: usize) -> Result<MetricResult> {
    if resolution < 2 {
        return Err(param("M1 resolution must be at least 2"));
    }
    if x.horizon() != y.horizon() {
        return Err(Error::Shape(alloc::format!("horizons differ: {} vs {}", x.horizon(), y.horizon())));
    }
    let (p, mp) = x.discretise(resolution);
    let (q, mq) = y.discretise(resolution);
    let value = discrete_frechet(&p, &q);
    Ok(MetricResult {
        value,
        witness: Witness::GraphMatching { resolution, vertices: (p.len(), q.len()) },
        exact: false,
        mesh: mp.max(mq),
    })
}

pub const DEFAULT_M1_RESOLUTION: usize = 64;

pub fn d_m1(x: &StepPath, y: &StepPath, resolution: usize) -> Result<MetricResult> {
    check_horizons(x, y)?;
    d_m1_graphs(&CompletedGraph::from_step(&x.compressed()), &CompletedGraph::from_step(&y.compressed()), resolution)
}
