//! Two-sample distances, Monte Carlo summaries and the report type.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};

/// Finite, non-empty sample with a label and the seed it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub label: String,
    pub seed: u64,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, seed: u64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("empty sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("sample contains non-finite values".into()));
        }
        Ok(Self { label: label.into(), seed, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sorted(&self) -> Vec<f64> {
        sorted(&self.values)
    }
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic two-sided p-value; approximate when either size < 50.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Data("KS needs at least two values per sample".into()));
    }
    let (x, y) = (sorted(a), sorted(b));
    let statistic = ks_sorted(&x, &y);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let en = libm::sqrt(n * m / (n + m));
    Ok(KsResult { statistic, p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * statistic) })
}

/// KS statistic for two already sorted samples.
pub fn ks_sorted(x: &[f64], y: &[f64]) -> f64 {
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Kolmogorov survival function Q(l) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = libm::exp(-2.0 * (k * k) as f64 * lambda * lambda);
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Wasserstein-1 distance between two empirical laws, computed exactly as
/// the integral of |F_a - F_b| (equals the mean sorted difference for equal sizes).
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Data("Wasserstein distance of an empty sample".into()));
    }
    let (x, y) = (sorted(a), sorted(b));
    if x.len() == y.len() {
        return Ok(x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum::<f64>() / x.len() as f64);
    }
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = x[0].min(y[0]);
    let mut total = 0.0;
    while i < x.len() || j < y.len() {
        let next = match (x.get(i), y.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / n - j as f64 / m).abs() * (next - prev);
        while i < x.len() && x[i] <= next {
            i += 1;
        }
        while j < y.len() && y[j] <= next {
            j += 1;
        }
        prev = next;
    }
    Ok(total)
}

/// Standard normal quantile (Acklam's rational approximation, one Halley step).
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    let x = if p < 0.02425 {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - 0.02425 {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(x * x / 2.0);
    x - u / (1.0 + x * u / 2.0)
}

/// Proportion `count/total` with its Wilson score interval at `level`.
pub fn tail_estimate(count: u64, total: u64, level: f64) -> Result<(f64, f64, f64)> {
    if total == 0 {
        return Err(Error::Data("tail estimate over zero trials".into()));
    }
    if count > total {
        return Err(param("count exceeds total"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(param("confidence level must lie in (0, 1)"));
    }
    let z = normal_quantile(0.5 + level / 2.0);
    let n = total as f64;
    let p = count as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Ok((p, (center - half).max(0.0).min(p), (center + half).min(1.0).max(p)))
}

/// One named Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
}

impl Estimate {
    pub fn exact(name: impl Into<String>, value: f64, n_samples: u64) -> Self {
        Self { name: name.into(), value, ci_low: value, ci_high: value, n_samples: n_samples.max(1) }
    }

    /// Sample mean with a 95% normal interval.
    pub fn mean(name: impl Into<String>, xs: &[f64]) -> Self {
        let n = xs.len().max(1) as f64;
        let m = xs.iter().sum::<f64>() / n;
        let se = if xs.len() > 1 {
            libm::sqrt(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0) / n)
        } else {
            0.0
        };
        Self {
            name: name.into(),
            value: m,
            ci_low: m - 1.96 * se,
            ci_high: m + 1.96 * se,
            n_samples: xs.len().max(1) as u64,
        }
    }

    /// Proportion with a 95% Wilson interval.
    pub fn proportion(name: impl Into<String>, count: u64, total: u64) -> Result<Self> {
        let (p, lo, hi) = tail_estimate(count, total, 0.95)?;
        Ok(Self { name: name.into(), value: p, ci_low: lo, ci_high: hi, n_samples: total })
    }

    /// Empirical `q`-quantile with a distribution-free 95% order-statistic interval.
    pub fn quantile(name: impl Into<String>, xs: &[f64], q: f64) -> Self {
        let s = sorted(xs);
        let n = s.len();
        let value = quantile_sorted(&s, q);
        let half = 1.96 * libm::sqrt(n as f64 * q * (1.0 - q));
        let lo = libm::floor(n as f64 * q - half).max(0.0) as usize;
        let hi = (libm::ceil(n as f64 * q + half) as usize).min(n.saturating_sub(1));
        Self { name: name.into(), value, ci_low: s[lo].min(value), ci_high: s[hi].max(value), n_samples: n as u64 }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Linear-interpolated quantile of a sorted sample.
pub fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let h = (s.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let k = libm::floor(h) as usize;
    if k + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[k] + (h - k as f64) * (s[k + 1] - s[k])
}

pub fn median(xs: &[f64]) -> f64 {
    quantile_sorted(&sorted(xs), 0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Num(f64),
    Text(String),
    List(Vec<f64>),
    Flag(bool),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Num(v)
    }
}
impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}
impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.into())
    }
}
impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}
impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::List(v)
    }
}
impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Flag(v)
    }
}

/// Named estimates plus the scenario parameters and seed that produced them.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DiagnosticReport {
    pub scenario: String,
    pub params: BTreeMap<String, ParamValue>,
    pub seed: u64,
    pub estimates: Vec<Estimate>,
}

impl DiagnosticReport {
    pub fn new(scenario: impl Into<String>, seed: u64) -> Self {
        Self { scenario: scenario.into(), seed, ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn push(&mut self, e: Estimate) {
        self.estimates.push(e);
    }

    /// Boolean outcome stored as a 0/1 estimate named `flag.<name>`.
    pub fn push_flag(&mut self, name: &str, value: bool) {
        let v = if value { 1.0 } else { 0.0 };
        self.estimates.push(Estimate::exact(alloc::format!("flag.{name}"), v, 1));
    }

    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.get(&alloc::format!("flag.{name}")).map(|e| e.value != 0.0)
    }

    pub fn merge(&mut self, other: DiagnosticReport) {
        self.estimates.extend(other.estimates);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_examples() {
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[0.0, 1.0]).unwrap().statistic, 0.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[0.5, 1.5]).unwrap().statistic, 0.5);
        assert!(ks_two_sample(&[1.0], &[1.0, 2.0]).is_err());
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn ks_ties() {
        assert_eq!(ks_sorted(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]), 1.0 / 3.0);
    }

    #[test]
    fn w1_examples() {
        assert_eq!(wasserstein1(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(wasserstein1(&[0.0, 1.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert!((wasserstein1(&[0.0, 1.0], &[0.0, 0.5, 1.0]).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(wasserstein1(&[], &[1.0]).is_err());
    }

    #[test]
    fn wilson_examples() {
        let (p, lo, hi) = tail_estimate(50, 100, 0.95).unwrap();
        assert_eq!(p, 0.5);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3, "{lo} {hi}");
        let (p0, lo0, hi0) = tail_estimate(0, 100, 0.95).unwrap();
        assert_eq!((p0, lo0), (0.0, 0.0));
        assert!(hi0 > 0.0);
        let (p1, lo1, _) = tail_estimate(100, 100, 0.95).unwrap();
        assert_eq!(p1, 1.0);
        assert!(lo1 < 1.0);
        assert!(tail_estimate(1, 0, 0.95).is_err());
    }

    #[test]
    fn quantile_function() {
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-12);
        assert!((normal_quantile(0.5)).abs() < 1e-15);
        assert!((normal_quantile(0.001) + 3.090232306167813).abs() < 1e-10);
    }

    #[test]
    fn report_flags() {
        let mut r = DiagnosticReport::new("x", 1).param("n", 3usize);
        r.push_flag("ok", true);
        assert_eq!(r.flag("ok"), Some(true));
        assert_eq!(r.flag("missing"), None);
    }
}
