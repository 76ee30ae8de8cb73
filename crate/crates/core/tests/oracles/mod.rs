//! Exhaustive reference implementations for small step paths. Shared by the
//! core integration tests and the acceptance target.
#![allow(dead_code)]

use rand::Rng;

/// Plain step path: value v[i] on [t[i], t[i+1]).
#[derive(Clone, Debug)]
pub struct Steps {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub horizon: f64,
}

impl Steps {
    pub fn eval(&self, s: f64) -> f64 {
        let mut out = self.v[0];
        for (ti, vi) in self.t.iter().zip(&self.v) {
            if *ti <= s {
                out = *vi;
            }
        }
        out
    }
}

const LEVELS: [f64; 7] = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Random path on [0, 1] with at most `max_breaks` breakpoints after 0.
/// Repeated values and jumps at T occur with positive probability.
pub fn random_steps<R: Rng>(rng: &mut R, max_breaks: usize) -> Steps {
    let k = rng.random_range(0..=max_breaks);
    let mut t: Vec<f64> = (0..k).map(|_| if rng.random_bool(0.05) { 1.0 } else { rng.random::<f64>() }).collect();
    t.push(0.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let v = t.iter().map(|_| LEVELS[rng.random_range(0..LEVELS.len())]).collect();
    Steps { t, v, horizon: 1.0 }
}

fn candidates(bps: &[f64], t: f64) -> Vec<f64> {
    let mut c = vec![0.0, t];
    for &g in bps {
        if g > 0.0 && g <= t {
            c.push(g);
            c.push(g - 1e-9);
        }
    }
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

pub fn total_variation(p: &Steps, t: f64) -> f64 {
    let c = candidates(&p.t, t);
    c.windows(2).map(|w| (p.eval(w[1]) - p.eval(w[0])).abs()).sum()
}

/// (max |jump|, #jumps > a, sup |x|) over [0, t].
pub fn jump_stats(p: &Steps, t: f64, a: f64) -> (f64, usize, f64) {
    let c = candidates(&p.t, t);
    let mut mj = 0.0f64;
    let mut cnt = 0;
    for &g in p.t.iter().filter(|&&g| g > 0.0 && g <= t) {
        let d = (p.eval(g) - p.eval(g - 1e-9)).abs();
        mj = mj.max(d);
        if d > a {
            cnt += 1;
        }
    }
    let sup = c.iter().map(|&s| p.eval(s).abs()).fold(0.0, f64::max);
    (mj, cnt, sup)
}

fn seg_dist(a: f64, b: f64, x: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// sup over real t1 <= s <= t2 <= t, t2 - t1 <= delta.
pub fn m1_modulus(p: &Steps, delta: f64, t: f64) -> f64 {
    let c = candidates(&p.t, t);
    let mut best = 0.0f64;
    for i in 0..c.len() {
        for k in i..c.len() {
            if c[k] - c[i] > delta {
                break;
            }
            for j in i..=k {
                best = best.max(seg_dist(p.eval(c[i]), p.eval(c[k]), p.eval(c[j])));
            }
        }
    }
    best
}

/// N^T_eps by dynamic programming over all ordered pairs of breakpoints.
pub fn max_eps_increments(p: &Steps, eps: f64, t: f64) -> usize {
    let vals: Vec<f64> = p.t.iter().filter(|&&g| g <= t).map(|&g| p.eval(g)).collect();
    let n = vals.len();
    // best[j]: max number of increments using points 0..=j
    let mut best = vec![0usize; n];
    for j in 0..n {
        let mut b = if j > 0 { best[j - 1] } else { 0 };
        for i in 0..j {
            if (vals[j] - vals[i]).abs() >= eps {
                b = b.max(best[i] + 1);
            }
        }
        best[j] = b;
    }
    best[n - 1]
}

/// sup{ |x(s)-x(r)| ∧ |y(r)-y(u)| : s < r < u <= s + delta, u <= t }.
pub fn avci(x: &Steps, y: &Steps, delta: f64, t: f64) -> f64 {
    let mut bps = x.t.clone();
    bps.extend_from_slice(&y.t);
    let c = candidates(&bps, t);
    let mut best = 0.0f64;
    for i in 0..c.len() {
        for k in i + 2..c.len() {
            if c[k] - c[i] > delta {
                break;
            }
            for j in i + 1..k {
                let a = (x.eval(c[i]) - x.eval(c[j])).abs();
                let b = (y.eval(c[j]) - y.eval(c[k])).abs();
                best = best.max(a.min(b));
            }
        }
    }
    best
}

pub fn d_uniform(x: &Steps, y: &Steps) -> f64 {
    let mut bps = x.t.clone();
    bps.extend_from_slice(&y.t);
    candidates(&bps, x.horizon).iter().map(|&s| (x.eval(s) - y.eval(s)).abs()).fold(0.0, f64::max)
}

fn jumps(p: &Steps) -> (f64, Vec<(f64, f64)>) {
    let mut out = Vec::new();
    let mut cur = p.v[0];
    for (ti, vi) in p.t.iter().zip(&p.v).skip(1) {
        if *vi != cur {
            out.push((*ti, *vi));
            cur = *vi;
        }
    }
    (p.v[0], out)
}

/// Exact J1 distance by enumerating every interleaving (with ties) of the
/// jumps of x, carried through the warp, with the jumps of y.
///
/// For a fixed interleaving the uniform part is read off the merged value
/// sequence, and the best warp clamps each jump time of x into the interval
/// between the neighbouring jumps of y that the interleaving prescribes.
pub fn d_j1(x: &Steps, y: &Steps) -> f64 {
    let horizon = x.horizon;
    let (x0, xj) = jumps(x);
    let (y0, yj) = jumps(y);
    let mut best = f64::INFINITY;
    let mut seq = Vec::new();
    enumerate(&xj, &yj, 0, 0, &mut seq, &mut |s: &[u8]| {
        let (mut a, mut b) = (0usize, 0usize);
        let (mut xv, mut yv) = (x0, y0);
        let mut sup = (xv - yv).abs();
        let mut warp = 0.0f64;
        for &step in s {
            match step {
                0 => {
                    // x jump strictly between y jumps b-1 and b
                    let lo = if b == 0 { 0.0 } else { yj[b - 1].0 };
                    let hi = if b < yj.len() { yj[b].0 } else { horizon };
                    let tau = xj[a].0;
                    if tau == horizon && hi < horizon {
                        return;
                    }
                    if tau == horizon && b < yj.len() {
                        return;
                    }
                    warp = warp.max(if tau < lo {
                        lo - tau
                    } else if tau > hi {
                        tau - hi
                    } else {
                        0.0
                    });
                    xv = xj[a].1;
                    a += 1;
                }
                1 => {
                    if yj[b].0 == horizon && a < xj.len() {
                        return;
                    }
                    yv = yj[b].1;
                    b += 1;
                }
                _ => {
                    let (tau, sig) = (xj[a].0, yj[b].0);
                    if (tau == horizon) != (sig == horizon) {
                        return;
                    }
                    warp = warp.max((tau - sig).abs());
                    xv = xj[a].1;
                    yv = yj[b].1;
                    a += 1;
                    b += 1;
                }
            }
            sup = sup.max((xv - yv).abs());
        }
        best = best.min(warp.max(sup));
    });
    best
}

fn enumerate(xj: &[(f64, f64)], yj: &[(f64, f64)], a: usize, b: usize, seq: &mut Vec<u8>, f: &mut dyn FnMut(&[u8])) {
    if a == xj.len() && b == yj.len() {
        f(seq);
        return;
    }
    if a < xj.len() {
        seq.push(0);
        enumerate(xj, yj, a + 1, b, seq, f);
        seq.pop();
    }
    if b < yj.len() {
        seq.push(1);
        enumerate(xj, yj, a, b + 1, seq, f);
        seq.pop();
    }
    if a < xj.len() && b < yj.len() {
        seq.push(2);
        enumerate(xj, yj, a + 1, b + 1, seq, f);
        seq.pop();
    }
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of S1(alpha, skew, scale, 0) by Gil-Pelaez inversion of the
/// characteristic function, tabulated on [-range, range]. Restricted to the
/// cases where the integrand is bounded at 0: skew = 0, or alpha > 1.
pub struct StableCdf {
    lo: f64,
    dx: f64,
    table: Vec<f64>,
    tail_right: f64,
    tail_left: f64,
    alpha: f64,
}

impl StableCdf {
    pub fn new(alpha: f64, skew: f64, scale: f64, range: f64, dx: f64) -> Self {
        assert!(skew == 0.0 || alpha > 1.0);
        let sa = scale.powf(alpha);
        let u_max = (40.0 / sa).powf(1.0 / alpha);
        let m = 8000usize;
        let du = u_max / m as f64;
        let k = skew * (std::f64::consts::FRAC_PI_2 * alpha).tan();
        // Simpson weights with the 1/u factor folded in; u = 0 contributes its limit.
        let nodes: Vec<(f64, f64, f64)> = (0..=m)
            .map(|i| {
                let u = i as f64 * du;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let ua = sa * u.powf(alpha);
                (u, w * du / 3.0 * (-ua).exp(), ua * k)
            })
            .collect();
        let count = (2.0 * range / dx).round() as usize;
        let table = (0..=count)
            .map(|j| {
                let x = -range + j as f64 * dx;
                let mut acc = 0.0;
                for &(u, w, phase) in &nodes[1..] {
                    acc += w * (phase - u * x).sin() / u;
                }
                // sin(phase - u x)/u -> -x at u = 0 (phase is o(u) here)
                acc -= nodes[0].1 * x;
                0.5 - acc / std::f64::consts::PI
            })
            .collect::<Vec<_>>();
        let c = tail_constant(alpha) * sa;
        Self { lo: -range, dx, table, tail_right: c * (1.0 + skew) / 2.0, tail_left: c * (1.0 - skew) / 2.0, alpha }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let hi = self.lo + self.dx * (self.table.len() - 1) as f64;
        if x < self.lo {
            return self.tail_left * (-x).powf(-self.alpha);
        }
        if x >= hi {
            return 1.0 - self.tail_right * x.powf(-self.alpha);
        }
        let p = (x - self.lo) / self.dx;
        let i = p.floor() as usize;
        let f = p - i as f64;
        self.table[i] * (1.0 - f) + self.table[i + 1] * f
    }
}

pub fn tail_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        2.0 / std::f64::consts::PI
    } else {
        (1.0 - alpha) / (libm::tgamma(2.0 - alpha) * (std::f64::consts::FRAC_PI_2 * alpha).cos())
    }
}
