//! Schmidt-coefficient profiles of spectrally impure squeezers.
//!
//! The squared coefficients are `x_1` plus `x_i = k(i) (1 - x_1)` for
//! `2 <= i <= l`, with geometric weights `k(i) = b^(l-i) / sum_{j=1}^{l-1} b^(j-1)`.
//! Normalisation holds by construction; `x_1` is fixed by the purity
//! `sum x_i^2 = P`, a quadratic whose larger root is taken.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtProfile {
    l: usize,
    b: f64,
    purity: f64,
    x: Vec<f64>,
    s: Vec<f64>,
}

impl SchmidtProfile {
    /// Number of Schmidt modes (spectral modes per spatial mode).
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// Squared coefficients, summing to 1.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Positive square roots of [`x`](Self::x).
    pub fn s(&self) -> &[f64] {
        &self.s
    }
}

/// Geometric weights `k(2..=l)`.
fn weights(l: usize, b: f64) -> Vec<f64> {
    let norm: f64 = (1..l).map(|j| b.powi(j as i32 - 1)).sum();
    (2..=l).map(|i| b.powi((l - i) as i32) / norm).collect()
}

/// Closed interval of purities reachable for `(l, b)`.
pub fn achievable_purity_range(l: usize, b: f64) -> (f64, f64) {
    if l <= 1 {
        return (1.0, 1.0);
    }
    let kappa: f64 = weights(l, b).iter().map(|k| k * k).sum();
    (kappa / (1.0 + kappa), 1.0)
}

pub fn schmidt_profile(l: usize, b: f64, purity: f64) -> Result<SchmidtProfile> {
    if l == 0 {
        return Err(Error::Parameter("a profile needs at least one Schmidt mode".into()));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Parameter(format!("geometric base must be positive, got {b}")));
    }
    let (min, max) = achievable_purity_range(l, b);
    let infeasible = || Error::InfeasiblePurity {
        l,
        b,
        purity,
        min,
        max,
    };
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(infeasible());
    }
    if l == 1 {
        if purity != 1.0 {
            return Err(infeasible());
        }
        return Ok(SchmidtProfile {
            l,
            b,
            purity,
            x: vec![1.0],
            s: vec![1.0],
        });
    }
    let k = weights(l, b);
    let kappa: f64 = k.iter().map(|w| w * w).sum();
    // (1 + kappa) x^2 - 2 kappa x + kappa - P = 0
    let mut disc = purity * (1.0 + kappa) - kappa;
    if disc < 0.0 && disc > -1e-14 {
        disc = 0.0;
    }
    if disc < 0.0 {
        return Err(infeasible());
    }
    let x1 = ((kappa + disc.sqrt()) / (1.0 + kappa)).min(1.0);
    let x: Vec<f64> = std::iter::once(x1)
        .chain(k.iter().map(|w| w * (1.0 - x1)))
        .collect();
    let s = x.iter().map(|v| v.sqrt()).collect();
    Ok(SchmidtProfile {
        l,
        b,
        purity,
        x,
        s,
    })
}
