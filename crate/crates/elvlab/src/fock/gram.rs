//! Mode Gram matrix of the deformed color bosons.
//!
//! The free-field realization uses `n` color bosons `B^j_m` (colors
//! `j = 1..=n`, modes `m != 0`) with commutators diagonal in the mode index,
//!
//! ```text
//! [B^j_m, B^k_{m'}] = gram(j, k, m) * delta_{m + m', 0}        (m >= 1),
//! ```
//!
//! where
//!
//! ```text
//! gram(j, j, m) =  m [(n-1)m]_x [(r-1)m]_x / ([n m]_x [r m]_x)
//! gram(j, k, m) = -m x^{sgn(j-k) n m} [m]_x [(r-1)m]_x / ([n m]_x [r m]_x)   (j != k)
//! ```
//!
//! in terms of the symmetric `x`-integer `[a]_x = (x^a - x^{-a})/(x - x^{-1})`.
//!
//! Only `n - 1` colors are independent: the combination
//! `sum_{j=1}^n x^{-2 j m} B^j_m` commutes with everything and is set to
//! zero.  The Gram matrix above is exactly the rank-`(n-1)` extension
//! consistent with that constraint, which is what allows operator exponents
//! to use color `n` on the same footing as the others.

use super::precise::{mp, mp_f64, x_number_mp, xpow_mp, Mp};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Symmetric `x`-integer `[a]_x = (x^a - x^{-a}) / (x - x^{-1})`.
///
/// Defined for real `a` and `x` in `(0, 1)`; `[1]_x = 1` exactly and
/// `[a]_x > 0` for `a > 0`.  Every mode-space norm in the boson algebra, as
/// well as the level transforms between the two screening families, is a
/// ratio of these.
pub fn x_number(a: f64, x: f64) -> f64 {
    (x.powf(a) - x.powf(-a)) / (x - 1.0 / x)
}

/// Commutator norm `[B^j_m, B^k_{-m}]` of the color bosons, `m >= 1`.
///
/// Colors `j, k` run over `1..=n`.  Errors on out-of-range colors or `m = 0`
/// (the zero modes live in the momentum lattice, not here).
///
/// The entries grow like `x^{-(n + r - 2) m}` for large `m`, so residual
/// checks against this matrix should always be *relative* to the largest
/// participating term.
pub fn boson_gram(j: usize, k: usize, m: usize, params: &ModelParams) -> Result<f64> {
    let x = mp(params.x());
    Ok(mp_f64(&boson_gram_mp(j, k, m, &x, params)?))
}

/// [`boson_gram`] at extended working precision.
///
/// The mode contractions in [`super::ope`] sum these entries against terms
/// of the opposite sign and nearly the same astronomic magnitude; evaluating
/// the whole sum at extended precision (see [`super::precise`]) is what keeps
/// the final `f64` coefficients accurate.  `x` is passed in pre-lifted so a
/// contraction loop lifts it once.
pub(crate) fn boson_gram_mp(
    j: usize,
    k: usize,
    m: usize,
    x: &Mp,
    params: &ModelParams,
) -> Result<Mp> {
    let n = params.n;
    if j < 1 || j > n || k < 1 || k > n {
        return Err(Error::domain(format!(
            "boson colors must lie in 1..={n}, got ({j}, {k})"
        )));
    }
    if m == 0 {
        return Err(Error::domain(
            "boson Gram matrix is defined for modes m >= 1 only",
        ));
    }
    let r = params.r;
    let mf = m as f64;
    let nf = n as f64;
    let common =
        x_number_mp((r - 1.0) * mf, x) / (x_number_mp(nf * mf, x) * x_number_mp(r * mf, x));
    let value = if j == k {
        mp(mf) * x_number_mp((nf - 1.0) * mf, x) * common
    } else {
        let sgn = if j > k { 1.0 } else { -1.0 };
        -(mp(mf) * xpow_mp(x, sgn * nf * mf) * x_number_mp(mf, x) * common)
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn desk(n: usize) -> ModelParams {
        ModelParams::from_x(n, 5.5, 0.3).unwrap()
    }

    #[test]
    fn x_number_basics() {
        let x = 0.3;
        assert_eq!(x_number(1.0, x), 1.0);
        assert_relative_eq!(x_number(2.0, x), x + 1.0 / x, max_relative = 1e-15);
        // [a]_x is odd in a.
        assert_relative_eq!(x_number(-3.2, x), -x_number(3.2, x), max_relative = 1e-15);
    }

    #[test]
    fn diagonal_entries_positive() {
        for n in 2..=4 {
            let params = desk(n);
            for j in 1..=n {
                for m in 1..=20 {
                    let g = boson_gram(j, j, m, &params).unwrap();
                    assert!(g > 0.0, "gram({j},{j},{m}) = {g} at n = {n}");
                }
            }
        }
    }

    #[test]
    fn color_sum_constraint_vanishes() {
        // sum_j x^{-2jm} [B^j_m, B^k_{-m}] = 0: the dependent color is wired
        // consistently into the Gram matrix.  Entries reach ~1e90 at the top
        // mode, so compare the cancellation against the largest term.
        for n in 2..=4 {
            let params = desk(n);
            let x = params.x();
            for k in 1..=n {
                for m in 1..=20 {
                    let terms: Vec<f64> = (1..=n)
                        .map(|j| {
                            x.powf(-2.0 * (j * m) as f64) * boson_gram(j, k, m, &params).unwrap()
                        })
                        .collect();
                    let sum: f64 = terms.iter().sum();
                    let scale = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
                    assert!(
                        sum.abs() / scale < 1e-13,
                        "color sum residual {} at n={n} k={k} m={m}",
                        sum.abs() / scale
                    );
                }
            }
        }
    }

    #[test]
    fn off_diagonal_symmetry_under_sign_conjugation() {
        // gram(j,k,m) x^{-sgn(j-k) n m} is symmetric in (j,k): transposing
        // the pair only swaps the x^{±nm} prefactors.
        let params = desk(3);
        let x = params.x();
        let nf = 3.0;
        for m in 1..=12 {
            for j in 1..=3usize {
                for k in 1..=3usize {
                    if j == k {
                        continue;
                    }
                    let sgn_jk = if j > k { 1.0 } else { -1.0 };
                    let lhs = boson_gram(j, k, m, &params).unwrap()
                        * x.powf(-sgn_jk * nf * m as f64);
                    let rhs = boson_gram(k, j, m, &params).unwrap()
                        * x.powf(sgn_jk * nf * m as f64);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let params = desk(2);
        assert!(boson_gram(0, 1, 1, &params).is_err());
        assert!(boson_gram(1, 3, 1, &params).is_err());
        assert!(boson_gram(1, 1, 0, &params).is_err());
    }
}
