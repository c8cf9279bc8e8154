//! Choice of the embedding scale `c`.

use nalgebra::{Complex, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::gstate::{apply_uniform_loss, embed_graph, scaling_bound};

use super::detect::click_count_distribution;

/// Largest graph for which the exact k-click mass is the search objective.
pub const EXACT_OBJECTIVE_MAX_MODES: usize = 14;

const GRID_POINTS: usize = 32;
const RELATIVE_TOLERANCE: f64 = 1e-4;

/// Mean number of clicks on the lossy embedded state, from the adjacency
/// eigendecomposition. Each mode is dark with probability
/// `(|sum_j |U_ij|^2 (1 - l t_j^2)/(1 - t_j^2)|^2 - (1-l)^2 |sum_j U_ij^2 t_j/(1 - t_j^2)|^2)^{-1/2}`,
/// with `t_j = c |λ_j|` and the columns of `U` for negative eigenvalues multiplied by `i`.
pub fn expected_clicks(g: &Graph, c: f64, loss: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Parameter(format!("loss must lie in [0, 1], got {loss}")));
    }
    let bound = scaling_bound(g);
    if !(c >= 0.0 && c < bound) {
        return Err(Error::UnphysicalScaling { c, bound });
    }
    let n = g.n();
    let eig = SymmetricEigen::new(g.adjacency_matrix());
    let t: Vec<f64> = eig.eigenvalues.iter().map(|l| c * l.abs()).collect();
    let mut clicks = n as f64;
    for i in 0..n {
        let mut diag = 0.0;
        let mut off = Complex::new(0.0, 0.0);
        for j in 0..n {
            let u = eig.eigenvectors[(i, j)];
            let tj = t[j];
            let denom = 1.0 - tj * tj;
            diag += u * u * (1.0 - loss * tj * tj) / denom;
            // (i u)^2 = -u^2 for negative eigenvalues
            let sign = if eig.eigenvalues[j] < 0.0 { -1.0 } else { 1.0 };
            off += Complex::new(sign * u * u * tj / denom, 0.0);
        }
        let det = diag * diag - (1.0 - loss).powi(2) * off.norm_sqr();
        clicks -= 1.0 / det.sqrt();
    }
    Ok(clicks.max(0.0))
}

/// Outcome of [`optimize_scaling`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingChoice {
    pub c: f64,
    /// k-click mass for exact searches, `|<C> - k|` for surrogate searches.
    pub objective: f64,
    /// Exact objective was used rather than the mean-click surrogate.
    pub exact: bool,
    /// The optimum sits at the top of the feasible range, so `k` clicks are not
    /// reachable as the most likely count.
    pub warning: bool,
}

/// Scale maximising the probability of exactly `k` clicks after uniform loss.
///
/// A 32-point grid over `(0, 1/λ_max)` is refined by golden-section search. Up to
/// [`EXACT_OBJECTIVE_MAX_MODES`] modes the exact k-click mass is maximised, above
/// that `|<C>(c) - k|` is minimised.
pub fn optimize_scaling(g: &Graph, k: usize, loss: f64) -> Result<ScalingChoice> {
    let n = g.n();
    if k > n {
        return Err(Error::Parameter(format!("target of {k} clicks exceeds {n} modes")));
    }
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Parameter(format!("loss must lie in [0, 1], got {loss}")));
    }
    let bound = scaling_bound(g);
    if !bound.is_finite() {
        return Err(Error::DegenerateGraph("an edgeless graph has no scale to tune".into()));
    }
    let exact = n <= EXACT_OBJECTIVE_MAX_MODES;
    // minimised in both cases
    let cost = |c: f64| -> Result<f64> {
        if exact {
            let state = apply_uniform_loss(&embed_graph(g, c)?, loss)?;
            Ok(-click_count_distribution(&state)?[k])
        } else {
            Ok((expected_clicks(g, c, loss)? - k as f64).abs())
        }
    };
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| (i + 1) as f64 / (GRID_POINTS + 1) as f64 * bound)
        .collect();
    let mut values = Vec::with_capacity(GRID_POINTS);
    for &c in &grid {
        values.push(cost(c)?);
    }
    let best = (0..GRID_POINTS)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(GRID_POINTS - 1)];
    let (c, value) = golden_section(lo, hi, &cost)?;
    let (c, value) = if value <= values[best] { (c, value) } else { (grid[best], values[best]) };
    let top = grid[GRID_POINTS - 1];
    let warning = c >= top * (1.0 - RELATIVE_TOLERANCE);
    Ok(ScalingChoice {
        c,
        objective: if exact { -value } else { value },
        exact,
        warning,
    })
}

fn golden_section(mut a: f64, mut b: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > RELATIVE_TOLERANCE * 0.5 * (a + b) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
