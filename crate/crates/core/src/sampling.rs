//! Seeded low-discrepancy points on the unit cube.
//!
//! Additive recurrence `frac(s + k alpha)` with `alpha_j = phi_d^-j`, where
//! `phi_d` is the positive root of `x^(d+1) = x + 1`. The shift `s` is drawn
//! from a ChaCha stream seeded by the user, so each point depends only on
//! `(seed, k)` and can be evaluated in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiRandom {
    alpha: Vec<f64>,
    shift: Vec<f64>,
}

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let phi = generalized_golden_ratio(dim);
        let alpha = (1..=dim).map(|j| phi.powi(-(j as i32))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Self { alpha, shift }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// The `k`-th point, strictly inside `(0, 1)^d`.
    pub fn point(&self, k: u64) -> Vec<f64> {
        let kf = (k + 1) as f64;
        self.alpha
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| {
                let u = (s + kf * a).fract();
                if u <= 0.0 {
                    f64::EPSILON
                } else {
                    u
                }
            })
            .collect()
    }
}

fn generalized_golden_ratio(dim: usize) -> f64 {
    let p = (dim + 1) as i32;
    let mut x = 2.0_f64;
    for _ in 0..60 {
        let f = x.powi(p) - x - 1.0;
        let df = p as f64 * x.powi(p - 1) - 1.0;
        x -= f / df;
    }
    x
}

/// Map a unit-cube point to a strictly increasing tuple in `(lo, hi)` by
/// sorting its coordinates. Returns `None` on ties.
pub fn ordered_tuple(u: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let mut v: Vec<f64> = u.iter().map(|t| lo + (hi - lo) * t).collect();
    v.sort_by(f64::total_cmp);
    if v.windows(2).any(|w| w[0] >= w[1]) {
        None
    } else {
        Some(v)
    }
}
