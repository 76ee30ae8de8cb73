//! Samplers for strictly stable laws and for Pareto-tailed laws in their
//! normal domain of attraction.
//!
//! All randomness flows from a [`SeedSpec`]: a master seed plus a stream id,
//! mapped onto ChaCha8 with `set_stream`, so replication `r` can be evaluated
//! independently of every other replication.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{param, Error, Result};

pub type Rand = ChaCha8Rng;

/// Address of an independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> Rand {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Stream for replication `r` under this master seed.
    pub fn replication(&self, r: u64) -> Self {
        Self { seed: self.seed, stream: r }
    }

    /// Derived sub-stream (innovations, waits, time change, ...). The child
    /// keeps the stream id and gets a mixed seed, so `(seed, stream).child(t)`
    /// never collides with another replication's parent stream.
    pub fn child(&self, tag: u64) -> Self {
        Self { seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_mul(0xD1B5_4A32_D192_ED03))), stream: self.stream }
    }
}

// Uniform on (0, 1], 53 bits.
#[inline]
fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let bits = rng.next_u64() >> 11;
    (bits + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// S1-parameterised stable law: `alpha` in (0,2], `skew` in [-1,1],
/// `scale` > 0, `shift` real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub skew: f64,
    pub scale: f64,
    pub shift: f64,
}

impl StableParams {
    pub fn new(alpha: f64, skew: f64, scale: f64, shift: f64) -> Result<Self> {
        let p = Self { alpha, skew, scale, shift };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::AlphaRange(self.alpha));
        }
        if !(self.skew.abs() <= 1.0) {
            return Err(param(alloc::format!("skew must lie in [-1, 1], got {}", self.skew)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(param(alloc::format!("scale must be positive, got {}", self.scale)));
        }
        if !self.shift.is_finite() {
            return Err(param("shift must be finite"));
        }
        Ok(())
    }

    /// Law of `c * X` for `c > 0` (strict stability keeps alpha and skew).
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = *self;
        out.scale *= c;
        out.shift *= c;
        if (self.alpha - 1.0).abs() < 1e-15 {
            out.shift += 2.0 / PI * self.skew * self.scale * c * libm::log(c);
        }
        out
    }

    /// Law of the Lévy increment over a time step `h` when this is the law at time 1.
    pub fn increment(&self, h: f64) -> StableParams {
        StableParams {
            alpha: self.alpha,
            skew: self.skew,
            scale: self.scale * libm::pow(h, 1.0 / self.alpha),
            shift: self.shift * h,
        }
    }

    /// One draw by the Chambers-Mallows-Stuck transform (Weron's form):
    /// V ~ U(-pi/2, pi/2), W ~ Exp(1).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        if a == 2.0 {
            let z: f64 = StandardNormal.sample(rng);
            return self.scale * core::f64::consts::SQRT_2 * z + self.shift;
        }
        let v = PI * (open_unit(rng) - 0.5);
        let w: f64 = Exp1.sample(rng);
        let b = self.skew;
        if a == 1.0 {
            let pb = FRAC_PI_2 + b * v;
            let x = (pb * libm::tan(v) - b * libm::log(FRAC_PI_2 * w * libm::cos(v) / pb)) * (2.0 / PI);
            return self.scale * x + 2.0 / PI * b * self.scale * libm::log(self.scale) + self.shift;
        }
        let t = b * libm::tan(FRAC_PI_2 * a);
        let bb = libm::atan(t) / a;
        let s = libm::pow(1.0 + t * t, 1.0 / (2.0 * a));
        let av = a * (v + bb);
        let x = s * libm::sin(av) / libm::pow(libm::cos(v), 1.0 / a) * libm::pow(libm::cos(v - av) / w, (1.0 - a) / a);
        self.scale * x + self.shift
    }
}

impl Distribution<f64> for StableParams {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw(rng)
    }
}

/// `count` i.i.d. stable draws.
pub fn sample_stable(params: &StableParams, seed: SeedSpec, count: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if count == 0 {
        return Err(param("count must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok((0..count).map(|_| params.draw(&mut rng)).collect())
}

/// Tail constant C_alpha with P(X > x) ~ C_alpha (1+skew)/2 scale^alpha x^-alpha.
pub fn tail_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        2.0 / PI
    } else {
        (1.0 - alpha) / (libm::tgamma(2.0 - alpha) * libm::cos(FRAC_PI_2 * alpha))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnovationMode {
    /// Random sign times Pareto(alpha).
    Symmetric,
    /// Pareto(alpha) minus its mean alpha/(alpha-1); needs alpha > 1.
    Centered,
    /// One-sided Pareto(alpha), no centring.
    Raw,
    /// Standard normal; forces alpha = 2.
    Gaussian,
}

/// Law of the innovations theta_k: `scale * P` with P(|P| > x) = x^-alpha, x >= 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnovationLaw {
    pub alpha: f64,
    pub mode: InnovationMode,
    pub scale: f64,
}

impl InnovationLaw {
    pub fn new(alpha: f64, mode: InnovationMode, scale: f64) -> Result<Self> {
        let law = Self { alpha, mode, scale };
        law.validate()?;
        Ok(law)
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, InnovationMode::Symmetric, 1.0)
    }

    pub fn centered(alpha: f64) -> Result<Self> {
        Self::new(alpha, InnovationMode::Centered, 1.0)
    }

    pub fn gaussian() -> Self {
        Self { alpha: 2.0, mode: InnovationMode::Gaussian, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::AlphaRange(self.alpha));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(param(alloc::format!("innovation scale must be positive, got {}", self.scale)));
        }
        match self.mode {
            InnovationMode::Gaussian if self.alpha != 2.0 => Err(param("gaussian innovations require alpha = 2")),
            InnovationMode::Gaussian => Ok(()),
            _ if self.alpha == 2.0 => {
                Err(param("alpha = 2 requires gaussian innovations (Pareto(2) tails are outside the normal domain)"))
            }
            InnovationMode::Centered if self.alpha <= 1.0 => {
                Err(param(alloc::format!("centered innovations need alpha > 1 (mean undefined), got {}", self.alpha)))
            }
            _ => Ok(()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.mode, InnovationMode::Symmetric | InnovationMode::Gaussian)
    }

    pub fn is_centered(&self) -> bool {
        !matches!(self.mode, InnovationMode::Raw)
    }

    /// Mean subtracted in centered mode (unscaled).
    pub fn pareto_mean(&self) -> f64 {
        self.alpha / (self.alpha - 1.0)
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.mode {
            InnovationMode::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.scale * z
            }
            InnovationMode::Symmetric => {
                let bits = rng.next_u64();
                let u = ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
                let p = libm::pow(u, -1.0 / self.alpha);
                if bits & 1 == 0 {
                    self.scale * p
                } else {
                    -self.scale * p
                }
            }
            InnovationMode::Centered => {
                let p = libm::pow(open_unit(rng), -1.0 / self.alpha);
                self.scale * (p - self.pareto_mean())
            }
            InnovationMode::Raw => self.scale * libm::pow(open_unit(rng), -1.0 / self.alpha),
        }
    }

    /// Strictly stable law of lim n^{-1/alpha}(theta_1 + ... + theta_n).
    pub fn limit_law(&self) -> Result<StableParams> {
        self.validate()?;
        let a = self.alpha;
        match self.mode {
            InnovationMode::Gaussian => StableParams::new(2.0, 0.0, self.scale / core::f64::consts::SQRT_2, 0.0),
            InnovationMode::Symmetric => {
                StableParams::new(a, 0.0, self.scale * libm::pow(1.0 / tail_constant(a), 1.0 / a), 0.0)
            }
            InnovationMode::Centered => {
                StableParams::new(a, 1.0, self.scale * libm::pow(1.0 / tail_constant(a), 1.0 / a), 0.0)
            }
            InnovationMode::Raw if a < 1.0 => {
                StableParams::new(a, 1.0, self.scale * libm::pow(1.0 / tail_constant(a), 1.0 / a), 0.0)
            }
            InnovationMode::Raw => {
                Err(param("raw innovations with alpha >= 1 need a centring sequence; no strict stable limit"))
            }
        }
    }
}

impl Distribution<f64> for InnovationLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw(rng)
    }
}

pub fn sample_innovation(law: &InnovationLaw, seed: SeedSpec, count: usize) -> Result<Vec<f64>> {
    law.validate()?;
    if count == 0 {
        return Err(param("count must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok((0..count).map(|_| law.draw(&mut rng)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaitingFamily {
    /// `scale * P`, P(P > x) = x^-beta for x >= 1.
    Pareto,
    /// `scale * (P + beta/(1-beta))`: same tail and limit, with the missing
    /// small-jump mass of the Pareto law restored as a constant shift. The
    /// second-order drift of the renewal sums disappears, so n^-beta N_n
    /// reaches its limit much faster for beta close to 1.
    CompensatedPareto,
}

/// Law of the waiting times J_k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaitingLaw {
    pub beta: f64,
    pub scale: f64,
    pub family: WaitingFamily,
}

impl WaitingLaw {
    pub fn new(beta: f64, scale: f64) -> Result<Self> {
        let law = Self { beta, scale, family: WaitingFamily::Pareto };
        law.validate()?;
        Ok(law)
    }

    pub fn compensated(beta: f64, scale: f64) -> Result<Self> {
        let law = Self { beta, scale, family: WaitingFamily::CompensatedPareto };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::BetaRange(self.beta));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(param(alloc::format!("waiting scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = libm::pow(open_unit(rng), -1.0 / self.beta);
        match self.family {
            WaitingFamily::Pareto => self.scale * p,
            WaitingFamily::CompensatedPareto => self.scale * (p + self.beta / (1.0 - self.beta)),
        }
    }

    /// Law of D_1 where n^{-1/beta} L_{n t} -> D_t.
    pub fn limit_law(&self) -> Result<StableParams> {
        self.validate()?;
        let b = self.beta;
        StableParams::new(b, 1.0, self.scale * libm::pow(1.0 / tail_constant(b), 1.0 / b), 0.0)
    }
}

impl Distribution<f64> for WaitingLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw(rng)
    }
}

pub fn sample_waiting(law: &WaitingLaw, seed: SeedSpec, count: usize) -> Result<Vec<f64>> {
    law.validate()?;
    if count == 0 {
        return Err(param("count must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok((0..count).map(|_| law.draw(&mut rng)).collect())
}
