//! Discrete power-law (zeta) numerics: Hurwitz-type tail sums, a cached
//! inversion table and exact sampling of single draws.

use std::sync::Arc;

/// Index below which the tail sum is accumulated term by term.
const EM_SPLIT: u64 = 1_000;

/// Number of table entries kept for inversion; draws beyond use the analytic tail.
pub(crate) const TABLE_LEN: usize = 1 << 16;

/// `Σ_{j ≥ n} j^{-r}` for `n ≥ EM_SPLIT`, by Euler–Maclaurin with three
/// Bernoulli corrections. The first omitted term is below 1e-25 relative for
/// `r > 1`, `n ≥ 1000`.
fn em_tail(n: f64, r: f64) -> f64 {
    let np = n.powf(-r);
    let mut total = n * np / (r - 1.0) + 0.5 * np;
    // B2/2!, B4/4!, B6/6!
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30_240.0];
    let mut rising = r; // r (r+1) ... (r+2j-2)
    let mut pow = np / n; // n^{-r-2j+1}
    for (j, c) in coeffs.iter().enumerate() {
        total += c * rising * pow;
        let k = 2 * j as u64 + 1;
        rising *= (r + k as f64) * (r + k as f64 + 1.0);
        pow /= n * n;
    }
    total
}

/// Hurwitz-type tail `Σ_{j ≥ n} j^{-r}` for `n ≥ 1` and `r > 1`.
pub fn tail_sum(n: u64, r: f64) -> f64 {
    debug_assert!(n >= 1 && r > 1.0);
    if n >= EM_SPLIT {
        return em_tail(n as f64, r);
    }
    // Smallest terms first.
    let mut acc = em_tail(EM_SPLIT as f64, r);
    for j in (n..EM_SPLIT).rev() {
        acc += (j as f64).powf(-r);
    }
    acc
}

/// Riemann zeta function for real `s > 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    tail_sum(1, s)
}

/// Precomputed distribution of the positive part `L' ≥ 1` with
/// `P(L' = k) ∝ k^{-(beta+1)}`.
#[derive(Debug)]
pub struct ZetaTable {
    pub beta: f64,
    pub norm: f64,
    /// `tail[k] = P(L' ≥ k)` for `k = 0..=TABLE_LEN + 1`; `tail[0] = tail[1] = 1`.
    pub tail: Vec<f64>,
}

impl ZetaTable {
    pub fn new(beta: f64) -> Arc<Self> {
        let r = beta + 1.0;
        let norm = riemann_zeta(r);
        let last = TABLE_LEN as u64 + 1;
        let mut tail = vec![0.0; TABLE_LEN + 2];
        let mut acc = tail_sum(last, r);
        tail[last as usize] = acc / norm;
        for k in (1..last).rev() {
            acc += (k as f64).powf(-r);
            tail[k as usize] = acc / norm;
        }
        tail[1] = 1.0;
        tail[0] = 1.0;
        Arc::new(Self { beta, norm, tail })
    }

    /// `P(L' = k)` for `k ≥ 1`.
    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (k as f64).powf(-(self.beta + 1.0)) / self.norm
    }

    /// `P(L' ≥ k)` for `k ≥ 1`.
    pub fn tail_from(&self, k: u64) -> f64 {
        if k <= 1 {
            1.0
        } else if (k as usize) < self.tail.len() {
            self.tail[k as usize]
        } else {
            tail_sum(k, self.beta + 1.0) / self.norm
        }
    }

    /// Inverse of the upper tail: smallest `k ≥ 1` with `P(L' > k) ≤ w`,
    /// for `w ∈ (0, 1]`.
    pub fn quantile_upper(&self, w: f64) -> u64 {
        let table_end = self.tail[TABLE_LEN + 1];
        if w > table_end {
            // tail is nonincreasing: find first index k+1 with tail[k+1] <= w
            let (mut lo, mut hi) = (1usize, TABLE_LEN + 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if self.tail[mid + 1] <= w {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return lo as u64;
        }
        // Beyond the table: P(L' > k) ≈ (k + 1/2)^{-beta} / (beta * norm).
        let x = (self.beta * self.norm * w).powf(-1.0 / self.beta) - 0.5;
        let k = x.ceil().max(TABLE_LEN as f64 + 1.0);
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            k as u64
        }
    }
}
