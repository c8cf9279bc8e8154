//! Substitution of single-spectral-mode squeezers by spectrally impure sources.

use nalgebra::Complex;

use super::symplectic::{bloch_messiah, passive, squeezing_matrix, williamson_pure};
use super::{CovarianceState, SchmidtProfile};
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Multiplier `mu` with `sum_j sinh^2(mu s_j) = sinh^2(r)`, found by bisection.
///
/// The left side is increasing in `mu`, and the root lies in `[r, r / max s_j]`.
pub fn squeezing_multiplier(r: f64, s: &[f64]) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let target = r.sinh().powi(2);
    let f = |mu: f64| s.iter().map(|sj| (mu * sj).sinh().powi(2)).sum::<f64>() - target;
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let (mut lo, mut hi) = (r, r / s_max);
    if f(hi) < 0.0 {
        hi *= 1.0 + 1e-12;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * r.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Rebuilds a pure single-spectral-mode state with impure sources.
///
/// The state is factored as `U D(r) V^†`; the passive parts are lifted to
/// `U ⊗ I_l`, `V ⊗ I_l` and every squeezer `r_i` becomes `l` spectral squeezers
/// `mu_i s_j` carrying the same mean photon number. The result is
/// `M M^†` with `M = (U ⊗ I) D(mu s) (V ⊗ I)^†`.
pub fn expand_spectral(state: &CovarianceState, profile: &SchmidtProfile) -> Result<CovarianceState> {
    if state.spectral_modes() != 1 {
        return Err(Error::Parameter(
            "spectral expansion needs a single-spectral-mode input".into(),
        ));
    }
    let m = williamson_pure(state)?;
    let factors = bloch_messiah(&m)?;
    let n = state.spatial_modes();
    let nf = profile.l();
    let big = n * nf;

    let lift = |u: &CMat| {
        let mut out = CMat::zeros(big, big);
        for i in 0..n {
            for k in 0..n {
                for a in 0..nf {
                    out[(i * nf + a, k * nf + a)] = u[(i, k)];
                }
            }
        }
        out
    };
    let u = lift(&factors.u);
    let v = lift(&factors.v);
    let r: Vec<f64> = factors
        .squeezers
        .squeezing()
        .iter()
        .flat_map(|&ri| {
            let mu = squeezing_multiplier(ri, profile.s());
            profile.s().iter().map(move |sj| mu * sj)
        })
        .collect();
    let full = passive(&u) * squeezing_matrix(&r) * passive(&v).adjoint();
    let mut sigma = &full * full.adjoint();
    sigma = (&sigma + sigma.adjoint()) * Complex::new(0.5, 0.0);
    Ok(CovarianceState::from_sigma(sigma, n, nf)?.with_scaling(state.scaling_c()))
}
