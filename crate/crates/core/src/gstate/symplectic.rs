//! Williamson (pure-state) and Bloch-Messiah decompositions.
//!
//! A complex-basis symplectic matrix has the block form `[[α, β], [β*, α*]]`
//! and satisfies `M K M^† = K` with `K = diag(I, -I)`. Bloch-Messiah writes it
//! as `diag(U, U*) D(r) diag(V, V*)^†` with `D(r) = [[cosh r, sinh r], [sinh r, cosh r]]`.

use nalgebra::{Complex, DMatrix};

use super::{CovarianceState, PURITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, ZERO};

/// Maximum `||M K M^† - K||_inf` accepted as symplectic.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-9;

/// Single-mode squeezing parameters `r_i >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqueezerBank {
    squeezing: Vec<f64>,
}

impl SqueezerBank {
    pub fn new(squeezing: Vec<f64>) -> Result<Self> {
        if let Some(r) = squeezing.iter().find(|r| !(**r >= 0.0)) {
            return Err(Error::Parameter(format!("squeezing must be >= 0, got {r}")));
        }
        Ok(Self { squeezing })
    }

    pub fn squeezing(&self) -> &[f64] {
        &self.squeezing
    }

    /// `tanh r_i`, each in `[0, 1)`.
    pub fn tanh(&self) -> Vec<f64> {
        self.squeezing.iter().map(|r| r.tanh()).collect()
    }

    pub fn len(&self) -> usize {
        self.squeezing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squeezing.is_empty()
    }
}

/// Passive unitaries and squeezers with `M = diag(U, U*) D(r) diag(V, V*)^†`.
#[derive(Clone, Debug)]
pub struct SymplecticFactors {
    pub u: DMatrix<Complex<f64>>,
    pub v: DMatrix<Complex<f64>>,
    pub squeezers: SqueezerBank,
}

impl SymplecticFactors {
    pub fn reconstruct(&self) -> DMatrix<Complex<f64>> {
        passive(&self.u) * squeezing_matrix(self.squeezers.squeezing()) * passive(&self.v).adjoint()
    }
}

/// `diag(U, U*)`.
pub(crate) fn passive(u: &CMat) -> CMat {
    let n = u.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(u);
    out.view_mut((n, n), (n, n)).copy_from(&u.conjugate());
    out
}

/// `[[diag(cosh r), diag(sinh r)], [diag(sinh r), diag(cosh r)]]`.
pub fn squeezing_matrix(r: &[f64]) -> DMatrix<Complex<f64>> {
    let n = r.len();
    let mut d = CMat::zeros(2 * n, 2 * n);
    for (i, &ri) in r.iter().enumerate() {
        let (ch, sh) = (Complex::new(ri.cosh(), 0.0), Complex::new(ri.sinh(), 0.0));
        d[(i, i)] = ch;
        d[(n + i, n + i)] = ch;
        d[(i, n + i)] = sh;
        d[(n + i, i)] = sh;
    }
    d
}

/// `||M K M^† - K||_inf`.
pub fn symplectic_defect(m: &DMatrix<Complex<f64>>) -> f64 {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return f64::INFINITY;
    }
    let k = linalg::symplectic_form(m.nrows() / 2);
    linalg::inf_norm(&(m * &k * m.adjoint() - k))
}

/// Symplectic matrix generating a pure state from vacuum: the principal square
/// root `sigma^{1/2}`, so that `sigma = M M^†`.
pub fn williamson_pure(state: &CovarianceState) -> Result<DMatrix<Complex<f64>>> {
    let nu = state.symplectic_eigenvalues();
    let worst = nu.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    if worst > PURITY_TOLERANCE {
        return Err(Error::Impure {
            max_symplectic_eigenvalue: nu.first().copied().unwrap_or(1.0),
        });
    }
    Ok(linalg::hermitian_function(state.sigma(), |x| x.max(0.0).sqrt()))
}

/// Takagi factorisation `B = U diag(s) U^T` of a complex symmetric matrix.
///
/// Uses the real symmetric embedding `[[Re B, Im B], [Im B, -Re B]]`, whose
/// eigenpairs `(s, (x, y))` with `s > 0` give Takagi vectors `x + i y`; those
/// are orthonormal even inside degenerate eigenspaces. Columns for vanishing
/// values are completed by Gram-Schmidt. Values are returned descending.
fn takagi(b: &CMat) -> (Vec<f64>, CMat) {
    let n = b.nrows();
    let h = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let z = b[(bi, bj)];
        match (i < n, j < n) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        }
    });
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &c| {
        eig.eigenvalues[c]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&c))
    });
    let top = eig.eigenvalues[order[0]].max(1.0);
    let tol = 1e-12 * top;

    let mut values = Vec::with_capacity(n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &idx in order.iter().take(n) {
        let s = eig.eigenvalues[idx];
        if s <= tol {
            break;
        }
        let v = eig.eigenvectors.column(idx);
        cols.push((0..n).map(|i| Complex::new(v[i], v[n + i])).collect());
        values.push(s);
    }
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand: Vec<C64> = (0..n).map(|i| if i == e { Complex::new(1.0, 0.0) } else { ZERO }).collect();
        for _ in 0..2 {
            for col in &cols {
                let proj: C64 = col.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (c, a) in cand.iter_mut().zip(col) {
                    *c -= proj * a;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(cand.into_iter().map(|z| z / norm).collect());
            values.push(0.0);
        }
    }
    let u = CMat::from_fn(n, n, |i, j| cols[j][i]);
    (values, u)
}

/// Bloch-Messiah decomposition of a complex-basis symplectic matrix.
///
/// Squeezing values are sorted descending; degenerate values share a
/// deterministic basis from the Takagi step.
pub fn bloch_messiah(m: &DMatrix<Complex<f64>>) -> Result<SymplecticFactors> {
    let defect = symplectic_defect(m);
    if !(defect <= SYMPLECTIC_TOLERANCE) {
        return Err(Error::Decomposition { defect });
    }
    let n = m.nrows() / 2;
    let sigma = m * m.adjoint();
    let b = sigma.view((0, n), (n, n)).into_owned();
    let b = (&b + b.transpose()) * Complex::new(0.5, 0.0);
    let (sinh2r, u) = takagi(&b);
    let r: Vec<f64> = sinh2r.iter().map(|s| s.asinh() / 2.0).collect();
    let neg: Vec<f64> = r.iter().map(|x| -x).collect();
    let w = squeezing_matrix(&neg) * passive(&u).adjoint() * m;
    let v = w.view((0, 0), (n, n)).adjoint();
    Ok(SymplecticFactors {
        u,
        v,
        squeezers: SqueezerBank::new(r)?,
    })
}
