//! Dense complex linear algebra shared by the state and sampler modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) type C64 = Complex<f64>;
pub(crate) type CMat = DMatrix<C64>;

pub(crate) const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = Complex { re: 1.0, im: 0.0 };

/// Induced infinity norm (largest absolute row sum).
pub(crate) fn inf_norm(m: &CMat) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn submatrix(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |a, b| m[(rows[a], cols[b])])
}

/// The block-swap matrix `[[0, I], [I, 0]]` of size `2m`.
pub(crate) fn swap_matrix(m: usize) -> CMat {
    CMat::from_fn(2 * m, 2 * m, |i, j| if (i + m) % (2 * m) == j { ONE } else { ZERO })
}

/// `diag(I_m, -I_m)`, the complex-basis symplectic form.
pub(crate) fn symplectic_form(m: usize) -> CMat {
    CMat::from_fn(2 * m, 2 * m, |i, j| match (i == j, i < m) {
        (true, true) => ONE,
        (true, false) => -ONE,
        _ => ZERO,
    })
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let scaled = CMat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| {
        vecs[(i, j)] * Complex::new(f(vals[j]), 0.0)
    });
    &scaled * vecs.adjoint()
}

/// Cholesky factor of a principal submatrix of a fixed Hermitian matrix that can
/// be extended by appending rows and truncated back.
///
/// Row `p` of the factor lives in `l[p * cap .. p * cap + p + 1]`.
pub(crate) struct GrowingCholesky<'a> {
    sigma: &'a CMat,
    cap: usize,
    rows: Vec<usize>,
    l: Vec<C64>,
}

impl<'a> GrowingCholesky<'a> {
    pub(crate) fn new(sigma: &'a CMat) -> Self {
        let cap = sigma.nrows();
        Self {
            sigma,
            cap,
            rows: Vec::with_capacity(cap),
            l: vec![ZERO; cap * cap],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
    }

    /// Appends rows of `sigma` and returns the product of the new diagonal entries,
    /// i.e. the square root of the determinant ratio.
    pub(crate) fn push_rows(&mut self, new_rows: &[usize]) -> Result<f64> {
        let mut product = 1.0;
        let cap = self.cap;
        for &row in new_rows {
            let p = self.rows.len();
            if p >= cap {
                return Err(Error::Numerical("Cholesky factor overflow".into()));
            }
            let (done, current) = self.l.split_at_mut(p * cap);
            let current = &mut current[..p + 1];
            for c in 0..p {
                let lc = &done[c * cap..c * cap + c + 1];
                let mut s = self.sigma[(row, self.rows[c])];
                for e in 0..c {
                    s -= current[e] * lc[e].conj();
                }
                current[c] = s / lc[c].re;
            }
            let mut d = self.sigma[(row, row)].re;
            for z in &current[..p] {
                d -= z.norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::Numerical(format!(
                    "matrix is not positive definite (pivot {d:.3e})"
                )));
            }
            let s = d.sqrt();
            current[p] = Complex::new(s, 0.0);
            product *= s;
            self.rows.push(row);
        }
        Ok(product)
    }

    /// Solves `L x = b` by forward substitution.
    fn forward_solve(&self, b: &mut [C64]) {
        let cap = self.cap;
        for p in 0..self.rows.len() {
            let lp = &self.l[p * cap..p * cap + p + 1];
            let mut s = b[p];
            for e in 0..p {
                s -= lp[e] * b[e];
            }
            b[p] = s / lp[p].re;
        }
    }

    /// Schur complement `sigma[B,B] - sigma[B,F] sigma[F,F]^{-1} sigma[F,B]` where `F`
    /// are the rows already factored.
    pub(crate) fn schur_complement(&self, b_rows: &[usize]) -> CMat {
        let f = self.rows.len();
        let mut x: Vec<Vec<C64>> = b_rows
            .iter()
            .map(|&rb| {
                let mut col: Vec<C64> = self.rows.iter().map(|&rf| self.sigma[(rf, rb)]).collect();
                self.forward_solve(&mut col);
                col
            })
            .collect();
        let n = b_rows.len();
        let mut s = submatrix(self.sigma, b_rows, b_rows);
        if f > 0 {
            for a in 0..n {
                for b in a..n {
                    let dot: C64 = (0..f).map(|e| x[a][e].conj() * x[b][e]).sum();
                    s[(a, b)] -= dot;
                    if a != b {
                        s[(b, a)] = s[(a, b)].conj();
                    }
                }
            }
        }
        for a in 0..n {
            s[(a, a)].im = 0.0;
        }
        x.clear();
        s
    }
}

/// `det(sigma[R, R])^{-1/2}` for every union `R` of the given row blocks, indexed
/// by the bitmask of chosen blocks.
pub(crate) fn subset_inv_sqrt_dets(sigma: &CMat, blocks: &[Vec<usize>]) -> Result<Vec<f64>> {
    subset_inv_sqrt_dets_from(sigma, &[], blocks)
}

/// As [`subset_inv_sqrt_dets`], with `base` rows always included.
pub(crate) fn subset_inv_sqrt_dets_from(
    sigma: &CMat,
    base: &[usize],
    blocks: &[Vec<usize>],
) -> Result<Vec<f64>> {
    if blocks.len() > 24 {
        return Err(Error::Capacity(format!(
            "subset enumeration over {} modes exceeds 2^24 determinants",
            blocks.len()
        )));
    }
    let mut out = vec![0.0; 1 << blocks.len()];
    let mut chol = GrowingCholesky::new(sigma);
    let root = 1.0 / chol.push_rows(base)?;
    out[0] = root;
    fn walk(
        chol: &mut GrowingCholesky<'_>,
        blocks: &[Vec<usize>],
        out: &mut [f64],
        mask: usize,
        value: f64,
        next: usize,
    ) -> Result<()> {
        let depth = chol.len();
        for b in next..blocks.len() {
            chol.truncate(depth);
            let v = value / chol.push_rows(&blocks[b])?;
            let m = mask | (1 << b);
            out[m] = v;
            walk(chol, blocks, out, m, v, b + 1)?;
        }
        chol.truncate(depth);
        Ok(())
    }
    walk(&mut chol, blocks, &mut out, 0, root, 0)?;
    Ok(out)
}

/// `det(sigma[R, R])^{-1/2}` for a single row set.
pub(crate) fn inv_sqrt_det(sigma: &CMat, rows: &[usize]) -> Result<f64> {
    let mut chol = GrowingCholesky::new(sigma);
    Ok(1.0 / chol.push_rows(rows)?)
}

/// In-place subset Möbius transform: `g[C] = sum_{T ⊆ C} (-1)^{|C \ T|} f[T]`.
pub(crate) fn mobius_in_place(values: &mut [f64]) {
    let n = values.len().trailing_zeros();
    debug_assert_eq!(values.len(), 1 << n);
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                values[mask] -= values[mask ^ step];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hpd(n: usize, seed: u64) -> CMat {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let a = CMat::from_fn(n, n, |_, _| {
            Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        &a * a.adjoint() + CMat::identity(n, n)
    }

    fn det_via_lu(m: &CMat) -> f64 {
        m.clone().lu().determinant().re
    }

    #[test]
    fn subset_dets_match_direct_determinants() {
        let s = random_hpd(8, 1);
        let blocks: Vec<Vec<usize>> = (0..3).map(|i| vec![i, i + 4]).collect();
        for base in [vec![], vec![3, 7]] {
            let table = subset_inv_sqrt_dets_from(&s, &base, &blocks).unwrap();
            for mask in 0..8usize {
                let rows: Vec<usize> = (0..3)
                    .filter(|b| mask >> b & 1 == 1)
                    .flat_map(|b| blocks[b].clone())
                    .chain(base.iter().copied())
                    .collect();
                let expect = if rows.is_empty() {
                    1.0
                } else {
                    det_via_lu(&submatrix(&s, &rows, &rows)).powf(-0.5)
                };
                assert!((table[mask] - expect).abs() < 1e-12 * expect, "mask {mask}");
            }
        }
        assert_eq!(subset_inv_sqrt_dets(&s, &blocks).unwrap()[0], 1.0);
    }

    #[test]
    fn schur_complement_matches_block_formula() {
        let s = random_hpd(7, 2);
        let mut chol = GrowingCholesky::new(&s);
        chol.push_rows(&[0, 3, 5]).unwrap();
        let b = [1, 6, 2];
        let got = chol.schur_complement(&b);
        let f = [0, 3, 5];
        let sff = submatrix(&s, &f, &f).try_inverse().unwrap();
        let expect = submatrix(&s, &b, &b) - submatrix(&s, &b, &f) * sff * submatrix(&s, &f, &b);
        assert!(inf_norm(&(got - expect)) < 1e-12);
    }

    #[test]
    fn mobius_inverts_subset_sums() {
        let f: Vec<f64> = (0..8).map(|i| (i * i) as f64 + 0.5).collect();
        let mut g = f.clone();
        mobius_in_place(&mut g);
        for c in 0..8usize {
            let mut expect = 0.0;
            for t in 0..8usize {
                if t & !c == 0 {
                    let sign = if (c.count_ones() - t.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                    expect += sign * f[t];
                }
            }
            assert!((g[c] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_definite_is_reported() {
        let m = CMat::from_fn(2, 2, |i, j| if i == j { ZERO } else { ONE });
        assert!(matches!(inv_sqrt_det(&m, &[0, 1]), Err(Error::Numerical(_))));
    }
}
