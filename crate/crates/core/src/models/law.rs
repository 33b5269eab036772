use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

use super::zeta::{ZetaTable, TABLE_LEN};
use crate::error::{Error, Result};

/// Probability mass below which truncated series are cut.
pub const SERIES_TOL: f64 = 1e-13;

/// Below this population size offspring sums are drawn individual by individual.
const DIRECT_SUM_LIMIT: u64 = 24;

/// Reproduction law of a single individual.
#[derive(Clone)]
pub enum OffspringLaw {
    /// `P(0) = zero_mass`, `P(k) = (1 - zero_mass)(1 - q) q^{k-1}` for `k ≥ 1`.
    LinearFractional {
        zero_mass: f64,
        q: f64,
    },
    Poisson {
        rate: f64,
    },
    /// Explicit pmf over `{0, ..., pmf.len() - 1}`.
    Bounded {
        pmf: Vec<f64>,
    },
    /// `P(0) = zero_mass`, `P(k) ∝ k^{-(beta + 1)}` for `k ≥ 1`.
    Zeta {
        beta: f64,
        zero_mass: f64,
        table: Arc<ZetaTable>,
    },
}

impl fmt::Debug for OffspringLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LinearFractional { zero_mass, q } => f
                .debug_struct("LinearFractional")
                .field("zero_mass", zero_mass)
                .field("q", q)
                .finish(),
            Self::Poisson { rate } => f.debug_struct("Poisson").field("rate", rate).finish(),
            Self::Bounded { pmf } => f.debug_struct("Bounded").field("pmf", pmf).finish(),
            Self::Zeta {
                beta, zero_mass, ..
            } => f
                .debug_struct("Zeta")
                .field("beta", beta)
                .field("zero_mass", zero_mass)
                .finish(),
        }
    }
}

impl PartialEq for OffspringLaw {
    fn eq(&self, other: &Self) -> bool {
        use OffspringLaw::*;
        match (self, other) {
            (LinearFractional { zero_mass: a, q }, LinearFractional { zero_mass: b, q: r }) => {
                a == b && q == r
            }
            (Poisson { rate: a }, Poisson { rate: b }) => a == b,
            (Bounded { pmf: a }, Bounded { pmf: b }) => a == b,
            (
                Zeta {
                    beta: a,
                    zero_mass: x,
                    ..
                },
                Zeta {
                    beta: b,
                    zero_mass: y,
                    ..
                },
            ) => a == b && x == y,
            _ => false,
        }
    }
}

impl OffspringLaw {
    pub fn linear_fractional(zero_mass: f64, q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&zero_mass) {
            return Err(Error::InvalidParameter(format!(
                "linear-fractional zero mass {zero_mass} not in [0, 1)"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "linear-fractional ratio {q} not in (0, 1)"
            )));
        }
        Ok(Self::LinearFractional { zero_mass, q })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Poisson rate {rate} must be positive"
            )));
        }
        Ok(Self::Poisson { rate })
    }

    /// Bounded law from an explicit pmf. The pmf must sum to one within 1e-12;
    /// trailing zeros are dropped.
    pub fn bounded(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter(
                "bounded pmf must be a nonempty list of nonnegative numbers".into(),
            ));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "bounded pmf sums to {total}, expected 1"
            )));
        }
        let mut pmf = pmf;
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        if pmf.len() == 1 {
            return Err(Error::InvalidParameter(
                "bounded law with all mass at zero has zero mean".into(),
            ));
        }
        Ok(Self::Bounded { pmf })
    }

    /// Bounded law from `(value, probability)` pairs.
    pub fn bounded_from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let len = pairs.iter().map(|(k, _)| k + 1).max().unwrap_or(0);
        let mut pmf = vec![0.0; len];
        for &(k, p) in pairs {
            pmf[k] += p;
        }
        Self::bounded(pmf)
    }

    pub fn zeta(beta: f64, zero_mass: f64) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "zeta tail exponent {beta} must exceed 1"
            )));
        }
        if !(0.0..1.0).contains(&zero_mass) {
            return Err(Error::InvalidParameter(format!(
                "zeta zero mass {zero_mass} not in [0, 1)"
            )));
        }
        Ok(Self::Zeta {
            beta,
            zero_mass,
            table: ZetaTable::new(beta),
        })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::LinearFractional { .. } => "linear_fractional",
            Self::Poisson { .. } => "poisson",
            Self::Bounded { .. } => "bounded",
            Self::Zeta { .. } => "zeta",
        }
    }

    /// Largest value with positive mass, if the support is finite.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            Self::Bounded { pmf } => Some(pmf.len() as u64 - 1),
            _ => None,
        }
    }

    /// Tail exponent for power-law families.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            Self::Zeta { beta, .. } => Some(*beta),
            _ => None,
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match self {
            Self::LinearFractional { zero_mass, q } => {
                if k == 0 {
                    *zero_mass
                } else {
                    (1.0 - zero_mass) * (1.0 - q) * q.powf((k - 1) as f64)
                }
            }
            Self::Poisson { rate } => {
                let kf = k as f64;
                (kf * rate.ln() - rate - ln_factorial(k)).exp()
            }
            Self::Bounded { pmf } => pmf.get(k as usize).copied().unwrap_or(0.0),
            Self::Zeta {
                zero_mass, table, ..
            } => {
                if k == 0 {
                    *zero_mass
                } else {
                    (1.0 - zero_mass) * table.pmf(k)
                }
            }
        }
    }

    /// `P(L > z)`.
    pub fn tail(&self, z: u64) -> f64 {
        match self {
            Self::LinearFractional { zero_mass, q } => (1.0 - zero_mass) * q.powf(z as f64),
            Self::Poisson { rate } => {
                // Sum the upper tail directly once past the mode; complement below it.
                if (z as f64) < *rate {
                    let head: f64 = (0..=z).map(|k| self.pmf(k)).sum();
                    (1.0 - head).max(0.0)
                } else {
                    let mut acc = 0.0;
                    let mut k = z + 1;
                    let mut term = self.pmf(k);
                    while term > acc * 1e-17 && term > 0.0 {
                        acc += term;
                        k += 1;
                        term *= rate / k as f64;
                    }
                    acc
                }
            }
            Self::Bounded { pmf } => pmf.iter().skip(z as usize + 1).sum(),
            Self::Zeta {
                zero_mass, table, ..
            } => (1.0 - zero_mass) * table.tail_from(z + 1),
        }
    }

    /// Expected offspring count `m = f'(1)`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::LinearFractional { zero_mass, q } => (1.0 - zero_mass) / (1.0 - q),
            Self::Poisson { rate } => *rate,
            Self::Bounded { pmf } => pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum(),
            Self::Zeta {
                beta,
                zero_mass,
                table,
            } => (1.0 - zero_mass) * super::zeta::riemann_zeta(*beta) / table.norm,
        }
    }

    /// Smallest `n` such that the mass above `n` is below `tol`.
    pub fn truncation_point(&self, tol: f64) -> Option<u64> {
        if let Some(max) = self.support_max() {
            return Some(max);
        }
        let mut n = 1u64;
        while self.tail(n) >= tol {
            n = n.checked_mul(2)?;
            if n > (1u64 << 40) {
                return None;
            }
        }
        let (mut lo, mut hi) = (n / 2, n);
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if self.tail(mid) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// pmf on `{0, ..., n}`.
    pub fn pmf_vec(&self, n: u64) -> Vec<f64> {
        (0..=n).map(|k| self.pmf(k)).collect()
    }

    /// Generating function `E[s^L]` for `s ∈ [0, 1]`.
    pub fn pgf(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("pgf argument {s} outside [0, 1]")));
        }
        if s == 1.0 {
            return Ok(1.0);
        }
        Ok(match self {
            Self::LinearFractional { zero_mass, q } => {
                zero_mass + (1.0 - zero_mass) * (1.0 - q) * s / (1.0 - q * s)
            }
            Self::Poisson { rate } => (rate * (s - 1.0)).exp(),
            Self::Bounded { pmf } => pmf.iter().rev().fold(0.0, |acc, p| acc * s + p),
            Self::Zeta {
                beta,
                zero_mass,
                table,
            } => {
                // Σ_{k ≤ n} k^{-r} s^k with remainder ≤ s^{n+1} P(L' > n).
                let r = beta + 1.0;
                let mut acc = 0.0;
                let mut sk = 1.0;
                let mut k = 0u64;
                loop {
                    k += 1;
                    sk *= s;
                    acc += (k as f64).powf(-r) * sk;
                    let bound = (1.0 - zero_mass) * sk * s * table.tail_from(k + 1);
                    if bound <= SERIES_TOL || sk == 0.0 {
                        break;
                    }
                    if k >= 1 << 28 {
                        return Err(Error::Truncation(format!(
                            "zeta pgf at s = {s} needs more than 2^28 terms"
                        )));
                    }
                }
                zero_mass + (1.0 - zero_mass) * acc / table.norm
            }
        })
    }

    /// One draw from the law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Self::LinearFractional { zero_mass, q } => {
                let u: f64 = rng.random();
                if u < *zero_mass {
                    0
                } else {
                    let v: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
                    1 + (v.ln() / q.ln()).floor() as u64
                }
            }
            Self::Poisson { rate } => {
                Poisson::new(*rate).expect("validated rate").sample(rng) as u64
            }
            Self::Bounded { pmf } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (k, p) in pmf.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return k as u64;
                    }
                }
                // rounding: last positive entry
                pmf.iter().rposition(|p| *p > 0.0).unwrap_or(0) as u64
            }
            Self::Zeta {
                zero_mass, table, ..
            } => {
                let u: f64 = rng.random();
                if u < *zero_mass {
                    0
                } else {
                    // 1 - (u - a)/(1 - a), in (0, 1]
                    let w = (1.0 - u) / (1.0 - zero_mass);
                    table.quantile_upper(w)
                }
            }
        }
    }

    /// Sum of `z` independent draws, saturating at `limit`.
    ///
    /// Returns `(sum, saturated)`. Large sums are drawn through sufficient
    /// statistics (per-value multinomial counts, Poisson and negative-binomial
    /// closure) so the cost does not grow linearly in `z`; every branch is an
    /// exact sampler.
    pub fn sample_sum<R: Rng + ?Sized>(&self, z: u64, limit: u64, rng: &mut R) -> (u64, bool) {
        if z == 0 {
            return (0, false);
        }
        if z <= DIRECT_SUM_LIMIT {
            let mut total = 0u64;
            for _ in 0..z {
                total = total.saturating_add(self.sample(rng));
                if total > limit {
                    return (limit, true);
                }
            }
            return (total, false);
        }
        let total = match self {
            Self::Poisson { rate } => {
                let lam = rate * z as f64;
                Poisson::new(lam).expect("finite intensity").sample(rng) as u64
            }
            Self::LinearFractional { zero_mass, q } => {
                let positive = binomial(rng, z, 1.0 - zero_mass);
                if positive == 0 {
                    0
                } else {
                    // failures before `positive` successes: Poisson–Gamma mixture
                    let g = Gamma::new(positive as f64, q / (1.0 - q))
                        .expect("positive shape")
                        .sample(rng);
                    let extra = if g > 0.0 {
                        Poisson::new(g).expect("finite intensity").sample(rng) as u64
                    } else {
                        0
                    };
                    positive.saturating_add(extra)
                }
            }
            Self::Bounded { pmf } => {
                let mut remaining = z;
                let mut mass_left = 1.0;
                let mut total = 0u64;
                for (k, p) in pmf.iter().enumerate() {
                    if remaining == 0 {
                        break;
                    }
                    let c = if mass_left <= *p || k + 1 == pmf.len() {
                        remaining
                    } else {
                        binomial(rng, remaining, p / mass_left)
                    };
                    total = total.saturating_add(c.saturating_mul(k as u64));
                    remaining -= c;
                    mass_left -= p;
                }
                total
            }
            Self::Zeta {
                zero_mass, table, ..
            } => {
                let positive = binomial(rng, z, 1.0 - zero_mass);
                zeta_positive_sum(table, positive, limit, rng)
            }
        };
        if total > limit {
            (limit, true)
        } else {
            (total, false)
        }
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if p <= 0.0 || n == 0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Sum of `n` draws of the positive zeta part. Values below a cut `J` are
/// counted by sequential conditional binomials; the few draws at or above `J`
/// are sampled one by one from the conditional tail.
fn zeta_positive_sum<R: Rng + ?Sized>(table: &ZetaTable, n: u64, limit: u64, rng: &mut R) -> u64 {
    if n == 0 {
        return 0;
    }
    // Balance cell count against expected number of individual tail draws.
    let nf = n as f64;
    let (mut lo, mut hi) = (1usize, TABLE_LEN);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if nf * table.tail[mid] <= mid as f64 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let cut = lo as u64;
    let mut remaining = n;
    let mut total = 0u64;
    for k in 1..cut {
        if remaining == 0 {
            return total;
        }
        let p = table.pmf(k) / table.tail[k as usize];
        let c = binomial(rng, remaining, p);
        total = total.saturating_add(c.saturating_mul(k));
        remaining -= c;
    }
    let cut_tail = table.tail_from(cut);
    for _ in 0..remaining {
        // conditional on L' ≥ cut: upper-tail probability uniform on (0, P(L' ≥ cut)]
        let w = (1.0 - rng.random::<f64>()) * cut_tail;
        let v = table.quantile_upper(w).max(cut);
        total = total.saturating_add(v);
        if total > limit {
            return total;
        }
    }
    total
}

fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k < 256 {
        return (2..=k).map(|j| (j as f64).ln()).sum();
    }
    // Stirling series; error below 1e-15 for k ≥ 256
    let x = k as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}
