//! Zero-mean Gaussian states in the doubled (annihilation/creation) basis.
//!
//! A state over `M` modes is a `2M x 2M` complex covariance matrix `sigma`
//! ordered as `(a_1..a_M, a_1^†..a_M^†)`, normalised so that the vacuum is the
//! identity. Modes are laid out spatial-major: mode `(i, j)` (spatial `i`,
//! spectral `j`) sits at index `i * spectral_modes + j`.

mod schmidt;
mod spectral;
mod symplectic;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{self, CMat, ZERO};

pub use schmidt::{achievable_purity_range, schmidt_profile, SchmidtProfile};
pub use spectral::{expand_spectral, squeezing_multiplier};
pub use symplectic::{
    bloch_messiah, squeezing_matrix, symplectic_defect, williamson_pure, SqueezerBank,
    SymplecticFactors,
};

/// Lower bound on symplectic eigenvalues accepted as physical.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;
/// Deviation of symplectic eigenvalues from 1 tolerated for a pure state.
pub const PURITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceState {
    sigma: CMat,
    spatial_modes: usize,
    spectral_modes: usize,
    scaling_c: Option<f64>,
}

impl CovarianceState {
    pub fn vacuum(spatial_modes: usize, spectral_modes: usize) -> Result<Self> {
        if spatial_modes == 0 || spectral_modes == 0 {
            return Err(Error::Parameter("mode counts must be positive".into()));
        }
        let m = spatial_modes * spectral_modes;
        Ok(Self {
            sigma: CMat::identity(2 * m, 2 * m),
            spatial_modes,
            spectral_modes,
            scaling_c: None,
        })
    }

    /// Wraps a covariance matrix after checking its shape and Hermiticity.
    pub fn from_sigma(
        sigma: DMatrix<Complex<f64>>,
        spatial_modes: usize,
        spectral_modes: usize,
    ) -> Result<Self> {
        let m = spatial_modes * spectral_modes;
        if m == 0 || sigma.nrows() != 2 * m || sigma.ncols() != 2 * m {
            return Err(Error::Shape(format!(
                "expected a {0}x{0} covariance matrix, got {1}x{2}",
                2 * m,
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let herm = linalg::inf_norm(&(&sigma - sigma.adjoint()));
        if herm > 1e-9 {
            return Err(Error::Shape(format!("covariance matrix not Hermitian ({herm:.3e})")));
        }
        Ok(Self {
            sigma,
            spatial_modes,
            spectral_modes,
            scaling_c: None,
        })
    }

    pub fn sigma(&self) -> &DMatrix<Complex<f64>> {
        &self.sigma
    }

    pub fn spatial_modes(&self) -> usize {
        self.spatial_modes
    }

    pub fn spectral_modes(&self) -> usize {
        self.spectral_modes
    }

    pub fn total_modes(&self) -> usize {
        self.spatial_modes * self.spectral_modes
    }

    pub fn scaling_c(&self) -> Option<f64> {
        self.scaling_c
    }

    pub(crate) fn with_scaling(mut self, c: Option<f64>) -> Self {
        self.scaling_c = c;
        self
    }

    /// Doubled-basis rows belonging to every spectral mode of spatial mode `i`.
    pub fn rows_of_spatial(&self, i: usize) -> Vec<usize> {
        let m = self.total_modes();
        let base = i * self.spectral_modes;
        (0..self.spectral_modes)
            .map(|j| base + j)
            .chain((0..self.spectral_modes).map(|j| m + base + j))
            .collect()
    }

    /// Mean photon number of one (spatial, spectral) mode.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        (self.sigma[(mode, mode)].re - 1.0) / 2.0
    }

    /// Mean photon number summed over the spectral modes of spatial mode `i`.
    pub fn mean_photons_spatial(&self, i: usize) -> f64 {
        (0..self.spectral_modes)
            .map(|j| self.mean_photons(i * self.spectral_modes + j))
            .sum()
    }

    /// Symplectic eigenvalues, descending (`M` values; all 1 for a pure state).
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let m = self.total_modes();
        let root = linalg::hermitian_function(&self.sigma, |x| x.max(0.0).sqrt());
        let k = linalg::symplectic_form(m);
        let (vals, _) = linalg::hermitian_eigen(&(&root * k * &root));
        let mut nu: Vec<f64> = vals.iter().rev().take(m).copied().collect();
        nu.sort_by(|a, b| b.total_cmp(a));
        nu
    }

    /// Symplectic eigenvalues all at least `1 - PHYSICALITY_TOLERANCE`.
    pub fn is_physical(&self) -> bool {
        self.symplectic_eigenvalues()
            .iter()
            .all(|&nu| nu >= 1.0 - PHYSICALITY_TOLERANCE)
    }

    pub fn is_pure(&self) -> bool {
        self.symplectic_eigenvalues()
            .iter()
            .all(|&nu| (nu - 1.0).abs() <= PURITY_TOLERANCE)
    }

    /// Reduced state on the listed spatial modes (in the given order).
    pub fn marginal(&self, spatial: &[usize]) -> Result<Self> {
        if spatial.is_empty() {
            return Err(Error::Parameter("marginal over no modes".into()));
        }
        if let Some(&bad) = spatial.iter().find(|&&i| i >= self.spatial_modes) {
            return Err(Error::Parameter(format!("spatial mode {bad} out of range")));
        }
        let nf = self.spectral_modes;
        let m = self.total_modes();
        let ann: Vec<usize> = spatial
            .iter()
            .flat_map(|&i| (0..nf).map(move |j| i * nf + j))
            .collect();
        let rows: Vec<usize> = ann.iter().copied().chain(ann.iter().map(|r| r + m)).collect();
        Ok(Self {
            sigma: linalg::submatrix(&self.sigma, &rows, &rows),
            spatial_modes: spatial.len(),
            spectral_modes: nf,
            scaling_c: self.scaling_c,
        })
    }

    /// Largest absolute row sum of the difference of two covariance matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.sigma.shape() != other.sigma.shape() {
            return f64::INFINITY;
        }
        linalg::inf_norm(&(&self.sigma - &other.sigma))
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump {
            spatial_modes: self.spatial_modes,
            spectral_modes: self.spectral_modes,
            scaling_c: self.scaling_c,
            sigma: self
                .sigma
                .row_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        let n = dump.sigma.len();
        if dump.sigma.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("covariance dump is not square".into()));
        }
        let sigma = CMat::from_fn(n, n, |i, j| {
            let [re, im] = dump.sigma[i][j];
            Complex::new(re, im)
        });
        Ok(Self::from_sigma(sigma, dump.spatial_modes, dump.spectral_modes)?
            .with_scaling(dump.scaling_c))
    }
}

/// Diagnostic JSON form of a state; `sigma` is nested rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub spatial_modes: usize,
    pub spectral_modes: usize,
    pub scaling_c: Option<f64>,
    pub sigma: Vec<Vec<[f64; 2]>>,
}

/// Eigenvalues of the adjacency matrix, ascending.
pub fn adjacency_spectrum(g: &Graph) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(g.adjacency_matrix());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Supremum of admissible scaling parameters, `1 / lambda_max` (infinite for edgeless graphs).
pub fn scaling_bound(g: &Graph) -> f64 {
    let lambda_max = adjacency_spectrum(g).last().copied().unwrap_or(0.0);
    if lambda_max > 1e-12 {
        1.0 / lambda_max
    } else {
        f64::INFINITY
    }
}

/// Pure state whose kernel is `c (A ⊕ A)`: `sigma = 2 (I - X c(A ⊕ A))^{-1} - I`.
pub fn embed_graph(g: &Graph, c: f64) -> Result<CovarianceState> {
    let bound = scaling_bound(g);
    if !(c > 0.0 && c < bound) {
        return Err(Error::UnphysicalScaling { c, bound });
    }
    let n = g.n();
    let a = g.adjacency_matrix();
    let mut m = CMat::identity(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = Complex::new(-c * a[(i, j)], 0.0);
            m[(i, n + j)] = v;
            m[(n + i, j)] = v;
        }
    }
    let inv = m
        .try_inverse()
        .ok_or(Error::UnphysicalScaling { c, bound })?;
    let mut sigma = inv * Complex::new(2.0, 0.0) - CMat::identity(2 * n, 2 * n);
    sigma = (&sigma + sigma.adjoint()) * Complex::new(0.5, 0.0);
    Ok(CovarianceState {
        sigma,
        spatial_modes: n,
        spectral_modes: 1,
        scaling_c: Some(c),
    })
}

/// Kernel `X (I - 2 sigma_Q^{-1})` with `sigma_Q = sigma + I`.
pub fn recover_kernel(state: &CovarianceState) -> Result<DMatrix<Complex<f64>>> {
    if state.spectral_modes != 1 {
        return Err(Error::Parameter(
            "kernel recovery needs a single spectral mode".into(),
        ));
    }
    let dim = state.sigma.nrows();
    let sigma_q = &state.sigma + CMat::identity(dim, dim);
    let inv = sigma_q
        .cholesky()
        .ok_or_else(|| Error::Numerical("sigma + I is not positive definite".into()))?
        .inverse();
    let x = linalg::swap_matrix(dim / 2);
    Ok(x * (CMat::identity(dim, dim) - inv * Complex::new(2.0, 0.0)))
}

/// Uniform loss on every mode: `sigma -> (1 - l) sigma + l I`.
pub fn apply_uniform_loss(state: &CovarianceState, loss: f64) -> Result<CovarianceState> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Parameter(format!("loss must lie in [0, 1], got {loss}")));
    }
    let dim = state.sigma.nrows();
    let sigma = state.sigma.map(|z| z * (1.0 - loss))
        + CMat::from_diagonal_element(dim, dim, Complex::new(loss, 0.0));
    Ok(CovarianceState {
        sigma,
        ..state.clone()
    })
}

/// `c (A ⊕ A)` as a complex matrix.
pub fn graph_kernel(g: &Graph, c: f64) -> DMatrix<Complex<f64>> {
    let n = g.n();
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        if (i < n) == (j < n) && g.has_edge(i % n, j % n) {
            Complex::new(c, 0.0)
        } else {
            ZERO
        }
    })
}
