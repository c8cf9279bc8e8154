//! Hafnians of symmetric complex matrices.
//!
//! [`hafnian`] uses the power-trace formula
//! `haf(A) = sum_{Z ⊆ [n]} (-1)^(n - |Z|) f((A X)_Z)`, where `X` swaps the two
//! halves of the index set, `(A X)_Z` keeps rows and columns `{i, i + n : i ∈ Z}`,
//! and `f(C)` is the `λ^n` coefficient of `exp(sum_j tr(C^j) λ^j / (2j))`.
//! [`hafnian_by_matchings`] sums over perfect matchings directly and serves as
//! a reference.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, ONE, ZERO};

/// Largest dimension accepted by [`hafnian`].
pub const MAX_POWER_TRACE_DIM: usize = 32;
/// Largest dimension accepted by [`hafnian_by_matchings`].
pub const MAX_MATCHING_DIM: usize = 12;

const SYMMETRY_TOLERANCE: f64 = 1e-10;

fn check_shape(m: &CMat, max_dim: usize) -> Result<()> {
    let d = m.nrows();
    if m.ncols() != d {
        return Err(Error::Shape(format!("hafnian of a non-square {}x{} matrix", d, m.ncols())));
    }
    if d % 2 == 1 {
        return Err(Error::Shape(format!("hafnian of odd dimension {d}")));
    }
    if d > max_dim {
        return Err(Error::Capacity(format!("hafnian dimension {d} exceeds {max_dim}")));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..d {
        for j in i + 1..d {
            if (m[(i, j)] - m[(j, i)]).norm() > SYMMETRY_TOLERANCE * scale {
                return Err(Error::Shape(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Hafnian by the power-trace formula. Cost `O(2^(d/2) d^4)`.
pub fn hafnian(m: &DMatrix<Complex<f64>>) -> Result<Complex<f64>> {
    check_shape(m, MAX_POWER_TRACE_DIM)?;
    let n = m.nrows() / 2;
    if n == 0 {
        return Ok(ONE);
    }
    // (A X)[r, c] = A[r, c ± n]
    let ax = CMat::from_fn(2 * n, 2 * n, |r, c| m[(r, (c + n) % (2 * n))]);
    let mut total = ZERO;
    let mut idx = Vec::with_capacity(2 * n);
    for z in 1u32..(1 << n) {
        idx.clear();
        idx.extend((0..n).filter(|i| z >> i & 1 == 1));
        let size = idx.len();
        for a in 0..size {
            idx.push(idx[a] + n);
        }
        let c = CMat::from_fn(idx.len(), idx.len(), |r, s| ax[(idx[r], idx[s])]);
        let term = power_trace_coefficient(&c, n);
        if (n - size).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// `λ^n` coefficient of `exp(sum_{j=1}^n tr(C^j) λ^j / (2j))`.
fn power_trace_coefficient(c: &CMat, n: usize) -> C64 {
    let mut a = vec![ZERO; n + 1];
    let mut power = c.clone();
    for (j, aj) in a.iter_mut().enumerate().skip(1) {
        if j > 1 {
            power = &power * c;
        }
        *aj = power.trace() / (2.0 * j as f64);
    }
    // p_m = (1/m) sum_{j=1}^m j a_j p_{m-j}
    let mut p = vec![ZERO; n + 1];
    p[0] = ONE;
    for m in 1..=n {
        let mut s = ZERO;
        for j in 1..=m {
            s += a[j] * p[m - j] * j as f64;
        }
        p[m] = s / m as f64;
    }
    p[n]
}

/// Hafnian by explicit enumeration of perfect matchings.
pub fn hafnian_by_matchings(m: &DMatrix<Complex<f64>>) -> Result<Complex<f64>> {
    check_shape(m, MAX_MATCHING_DIM)?;
    fn rec(m: &CMat, free: u32) -> C64 {
        if free == 0 {
            return ONE;
        }
        let i = free.trailing_zeros() as usize;
        let rest = free & !(1 << i);
        let mut others = rest;
        let mut sum = ZERO;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            sum += m[(i, j)] * rec(m, rest & !(1 << j));
        }
        sum
    }
    let d = m.nrows();
    Ok(rec(m, ((1u64 << d) - 1) as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    pub(crate) fn random_symmetric(d: usize, seed: u64) -> CMat {
        let mut rng = crate::rng::seeded(seed);
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z;
            }
        }
        m
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn small_examples() {
        assert_eq!(hafnian(&CMat::zeros(0, 0)).unwrap(), ONE);
        assert_eq!(hafnian_by_matchings(&CMat::zeros(0, 0)).unwrap(), ONE);
        let swap = CMat::from_fn(2, 2, |i, j| if i == j { ZERO } else { ONE });
        assert!(rel(hafnian(&swap).unwrap(), ONE) < 1e-14);
        let ones = CMat::from_element(4, 4, ONE);
        assert!(rel(hafnian(&ones).unwrap(), Complex::new(3.0, 0.0)) < 1e-14);
        assert_eq!(hafnian_by_matchings(&ones).unwrap(), Complex::new(3.0, 0.0));
    }

    #[test]
    fn all_ones_counts_matchings() {
        // (2n - 1)!!
        let mut expect = 1.0;
        for n in 1..=6 {
            expect *= (2 * n - 1) as f64;
            let ones = CMat::from_element(2 * n, 2 * n, ONE);
            assert!(rel(hafnian(&ones).unwrap(), Complex::new(expect, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(hafnian(&CMat::zeros(3, 3)), Err(Error::Shape(_))));
        assert!(matches!(hafnian(&CMat::zeros(2, 4)), Err(Error::Shape(_))));
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(hafnian(&m), Err(Error::Shape(_))));
        assert!(matches!(hafnian_by_matchings(&m), Err(Error::Shape(_))));
        assert!(matches!(hafnian_by_matchings(&CMat::zeros(14, 14)), Err(Error::Capacity(_))));
        assert!(matches!(hafnian(&CMat::zeros(34, 34)), Err(Error::Capacity(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn evaluators_agree(half in 1usize..=6, seed in any::<u64>()) {
            let m = random_symmetric(2 * half, seed);
            let a = hafnian(&m).unwrap();
            let b = hafnian_by_matchings(&m).unwrap();
            prop_assert!(rel(a, b) < 1e-9, "{a} vs {b}");
        }

        #[test]
        fn direct_sum_squares(d in 1usize..=4, seed in any::<u64>()) {
            let a = random_symmetric(2 * d, seed);
            let n = 2 * d;
            let sum = CMat::from_fn(2 * n, 2 * n, |i, j| {
                if i < n && j < n { a[(i, j)] } else if i >= n && j >= n { a[(i - n, j - n)] } else { ZERO }
            });
            let h = hafnian(&a).unwrap();
            prop_assert!(rel(hafnian(&sum).unwrap(), h * h) < 1e-9);
        }
    }
}
