//! Elliptic special functions: theta functions with characteristics,
//! multi-nome infinite products, the two-level bracket system, hopping
//! kernels and commutation factors.
//!
//! Everything downstream (lattice weights, intertwiners, tail operators,
//! operator products) reduces to the functions in this module, so each one
//! is pinned by an independent oracle in the test block: classical closed
//! values, brute-force product/series evaluations, quasi-periodicity laws
//! and a modular-transformation consistency check.
//!
//! Conventions (fixed crate-wide):
//!
//! * `x = exp(-eps)`, `z = x^{2v} = exp(-2 eps v)`, and fractional powers
//!   `z^gamma := exp(-2 eps gamma v)` are always keyed to `v`.
//! * `theta(a, b, v, tau) = sum_m exp{ pi i (m+a) [ (m+a) tau + 2 (v+b) ] }`
//!   with `Im tau > 0`.
//! * `Theta_q(z) = (z; q) (q/z; q) (q; q)` is the multiplicative theta
//!   function, and `[v]` / `[v]'` are the level-`r` / level-`(r-1)` brackets
//!   built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{Level, ModelParams, C};

/// Absolute magnitude below which a kernel denominator counts as a pole.
const POLE_ABS: f64 = 1e-11;

/// Theta function with real characteristics `(a, b)`:
///
/// ```text
/// theta(a, b, v, tau) = sum_{m in Z} exp{ pi i (m+a) [ (m+a) tau + 2 (v+b) ] }
/// ```
///
/// The sum is taken over a window of half-width `terms` centered on the
/// index where the Gaussian factor peaks, so strongly shifted arguments
/// (as in the half-period brackets and the vertex weights, where the peak
/// sits far from `m = 0`) lose no accuracy.
pub fn theta(a: f64, b: f64, v: C, tau: C, terms: usize) -> Result<C> {
    if !(tau.im > 0.0) {
        return Err(Error::domain(format!(
            "theta requires Im tau > 0, got tau = {tau}"
        )));
    }
    // Re(exponent) = -pi Im(tau) (m+a)^2 - 2 pi (m+a) Im(v+b) peaks at
    // m + a = -Im(v+b) / Im(tau).
    let center = (-a - (v + b).im / tau.im).round();
    let ipi = C::new(0.0, PI);
    let mut sum = C::new(0.0, 0.0);
    let t = terms as i64;
    let c0 = center as i64;
    for m in (c0 - t)..=(c0 + t) {
        let ma = m as f64 + a;
        let expo = ipi * ma * (ma * tau + 2.0 * (v + b));
        sum += expo.exp();
    }
    Ok(sum)
}

/// Multi-nome infinite product
///
/// ```text
/// (z; q_1, ..., q_m) = prod_{i_1, ..., i_m >= 0} (1 - z q_1^{i_1} ... q_m^{i_m})
/// ```
///
/// For an empty nome list this degenerates to the single factor `1 - z`,
/// which lets rational factors share the product representation used by the
/// operator-product tables.  Factors are dropped once `|z q^i| < cutoff`.
pub fn qpoch(z: C, nomes: &[f64], cutoff: f64) -> Result<C> {
    for &q in nomes {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!(
                "qpoch nomes must lie in (0,1), got {q}"
            )));
        }
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::domain(format!("bad qpoch cutoff {cutoff}")));
    }
    Ok(qpoch_rec(z, nomes, cutoff))
}

fn qpoch_rec(z: C, nomes: &[f64], cutoff: f64) -> C {
    match nomes.split_first() {
        None => C::new(1.0, 0.0) - z,
        Some((&q, rest)) => {
            let mut acc = C::new(1.0, 0.0);
            let mut zz = z;
            // |z q^i| decreases strictly; once below the cutoff the remaining
            // factors differ from 1 by less than cutoff / (1 - q).
            let mut guard = 0usize;
            while zz.norm() >= cutoff {
                acc *= qpoch_rec(zz, rest, cutoff);
                zz *= q;
                guard += 1;
                if guard > 100_000 {
                    break;
                }
            }
            acc
        }
    }
}

/// Multiplicative theta function `Theta_q(z) = (z; q) (q/z; q) (q; q)`.
pub fn theta_q(z: C, q: f64, cutoff: f64) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(Error::domain("theta_q requires z != 0".to_string()));
    }
    let a = qpoch(z, &[q], cutoff)?;
    let b = qpoch(C::new(q, 0.0) / z, &[q], cutoff)?;
    let c = qpoch(C::new(q, 0.0), &[q], cutoff)?;
    Ok(a * b * c)
}

/// Level-tagged elliptic bracket
///
/// ```text
/// [v]  = x^{v^2/r - v}       Theta_{x^{2r}}  (x^{2v})        (Level::R)
/// [v]' = x^{v^2/(r-1) - v}   Theta_{x^{2r-2}}(x^{2v})        (Level::RMinus1)
/// ```
pub fn bracket(v: C, level: Level, params: &ModelParams) -> Result<C> {
    let l = params.level_value(level);
    let z = params.z_of_v(v);
    let q = params.xpow(2.0 * l);
    let pre = params.xpow_c(v * v / l - v);
    Ok(pre * theta_q(z, q, params.prod_tol)?)
}

/// Exact bracket at a half-period-shifted argument:
///
/// ```text
/// [v + sigma * pi*i/(2 eps)]_L
///   = sigma * i * exp(pi^2/(4 eps L)) * exp(-sigma * pi * i * v / L)
///     * x^{v^2/L - v} * Theta_{x^{2L}}(-x^{2v})
/// ```
///
/// The shift `pi*i/(2 eps)` flips the sign of `z = x^{2v}`; evaluating the
/// flipped theta product directly avoids summing thetas with enormous
/// imaginary arguments.
pub fn bracket_half(v: C, sigma: i32, level: Level, params: &ModelParams) -> Result<C> {
    if sigma != 1 && sigma != -1 {
        return Err(Error::domain(format!(
            "bracket_half sigma must be +1 or -1, got {sigma}"
        )));
    }
    let s = sigma as f64;
    let l = params.level_value(level);
    let z = params.z_of_v(v);
    let q = params.xpow(2.0 * l);
    let pre = params.xpow_c(v * v / l - v);
    let phase = (C::new(0.0, -s * PI) * v / l).exp();
    let amp = (PI * PI / (4.0 * params.eps * l)).exp();
    let si = C::new(0.0, s);
    Ok(si * amp * phase * pre * theta_q(-z, q, params.prod_tol)?)
}

/// Which hopping kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `f(v, w) = [v + 1/2 - w] / [v - 1/2]`.
    F,
    /// `h(v) = [v - 1] / [v + 1]` (the `w` argument is ignored).
    H,
    /// `f*(v, w) = [v - 1/2 + w]' / [v + 1/2]'`.
    FStar,
    /// `h*(v) = [v + 1]' / [v - 1]'` (the `w` argument is ignored).
    HStar,
}

/// Evaluate a hopping kernel; a vanishing denominator bracket is reported
/// as [`Error::Pole`] rather than an infinity.
pub fn kernel(which: KernelKind, v: C, w: C, params: &ModelParams) -> Result<C> {
    let half = C::new(0.5, 0.0);
    let one = C::new(1.0, 0.0);
    let (num, den, name) = match which {
        KernelKind::F => (
            bracket(v + half - w, Level::R, params)?,
            bracket(v - half, Level::R, params)?,
            "f",
        ),
        KernelKind::H => (
            bracket(v - one, Level::R, params)?,
            bracket(v + one, Level::R, params)?,
            "h",
        ),
        KernelKind::FStar => (
            bracket(v - half + w, Level::RMinus1, params)?,
            bracket(v + half, Level::RMinus1, params)?,
            "f*",
        ),
        KernelKind::HStar => (
            bracket(v + one, Level::RMinus1, params)?,
            bracket(v - one, Level::RMinus1, params)?,
            "h*",
        ),
    };
    if den.norm() < POLE_ABS {
        return Err(Error::Pole {
            function: name,
            location: format!("v = {v}"),
            denominator_abs: den.norm(),
        });
    }
    Ok(num / den)
}

/// Which commutation factor to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommFactorKind {
    /// `r_j(v)`, the level-`r` factor (defined for `1 <= j <= n`).
    RJ,
    /// `r*_j(v)`, the level-`(r-1)` factor (defined for `1 <= j <= n`).
    RStarJ,
    /// `chi_j(v)`, the mixed factor (defined for `1 <= j <= n-1`).
    ChiJ,
}

/// Double-nome brace product `{z} = (z; x^{2r}, x^{2n})`.
fn brace(z: C, params: &ModelParams) -> Result<C> {
    qpoch(
        z,
        &[params.xpow(2.0 * params.r), params.xpow(2.0 * params.n as f64)],
        params.prod_tol,
    )
}

/// Primed brace product `{z}' = (z; x^{2r-2}, x^{2n})`.
fn brace_prime(z: C, params: &ModelParams) -> Result<C> {
    qpoch(
        z,
        &[
            params.xpow(2.0 * (params.r - 1.0)),
            params.xpow(2.0 * params.n as f64),
        ],
        params.prod_tol,
    )
}

/// `g_j(z) = {x^{2n+2r-j-1} z} {x^{j+1} z} / ( {x^{2n-j+1} z} {x^{2r+j-1} z} )`.
///
/// Entire in `z` up to the explicit denominator products; this is both the
/// building block of the commutation factor `r_j` and the closed scalar form
/// of the weight-type operator products in the boson calculus.
pub fn g_j(j: usize, z: C, params: &ModelParams) -> Result<C> {
    let n2 = 2.0 * params.n as f64;
    let r2 = 2.0 * params.r;
    let jj = j as f64;
    let num = brace(params.xpow(n2 + r2 - jj - 1.0) * z, params)?
        * brace(params.xpow(jj + 1.0) * z, params)?;
    let den = brace(params.xpow(n2 - jj + 1.0) * z, params)?
        * brace(params.xpow(r2 + jj - 1.0) * z, params)?;
    Ok(num / den)
}

/// `g*_j(z) = {x^{2n+2r-j-1} z}' {x^{j-1} z}' / ( {x^{2n-j-1} z}' {x^{2r+j-1} z}' )`.
pub fn g_star_j(j: usize, z: C, params: &ModelParams) -> Result<C> {
    let n2 = 2.0 * params.n as f64;
    let r2 = 2.0 * params.r;
    let jj = j as f64;
    let num = brace_prime(params.xpow(n2 + r2 - jj - 1.0) * z, params)?
        * brace_prime(params.xpow(jj - 1.0) * z, params)?;
    let den = brace_prime(params.xpow(n2 - jj - 1.0) * z, params)?
        * brace_prime(params.xpow(r2 + jj - 1.0) * z, params)?;
    Ok(num / den)
}

/// `rho_j(z)`, the mixed-factor product at nomes `(x^2, x^{2n})`.
pub fn rho_j(j: usize, z: C, params: &ModelParams) -> Result<C> {
    let nomes = [params.xpow(2.0), params.xpow(2.0 * params.n as f64)];
    let n2 = 2.0 * params.n as f64;
    let jj = j as f64;
    let cutoff = params.prod_tol;
    let num = qpoch(-params.xpow(2.0 * jj + 1.0) * z, &nomes, cutoff)?
        * qpoch(-params.xpow(n2 - 2.0 * jj + 1.0) * z, &nomes, cutoff)?;
    let den = qpoch(-params.xpow(1.0) * z, &nomes, cutoff)?
        * qpoch(-params.xpow(n2 + 1.0) * z, &nomes, cutoff)?;
    Ok(num / den)
}

/// Evaluate a commutation factor at spectral argument `v`.
///
/// ```text
/// r_j(v)   = z^{ (r-1)/r   * (n-j)/n } g_j(1/z)   / g_j(z)
/// r*_j(v)  = z^{ r/(r-1)   * (n-j)/n } g*_j(1/z)  / g*_j(z)
/// chi_j(v) = z^{ -j(n-j)/n }           rho_j(1/z) / rho_j(z)
/// ```
///
/// with `z = x^{2v}` and `z^gamma := exp(-2 eps gamma v)`.
pub fn comm_factor(which: CommFactorKind, j: usize, v: C, params: &ModelParams) -> Result<C> {
    let n = params.n;
    let jmax = match which {
        CommFactorKind::RJ | CommFactorKind::RStarJ => n,
        CommFactorKind::ChiJ => n - 1,
    };
    if j < 1 || j > jmax {
        return Err(Error::domain(format!(
            "comm_factor index j = {j} outside 1..={jmax}"
        )));
    }
    // Every factor is unitary: c(0) = z^gamma g(1/z)/g(z) |_{z=1} = 1.  At
    // exactly v = 0 the ratio for r*_1 is 0/0 (its `{z}'` factor vanishes at
    // z = 1), so the common limit is returned directly.
    if v.norm() == 0.0 {
        return Ok(C::new(1.0, 0.0));
    }
    let z = params.z_of_v(v);
    let zi = C::new(1.0, 0.0) / z;
    let nf = n as f64;
    let jf = j as f64;
    let (gamma, ratio) = match which {
        CommFactorKind::RJ => (
            (params.r - 1.0) / params.r * (nf - jf) / nf,
            g_j(j, zi, params)? / g_j(j, z, params)?,
        ),
        CommFactorKind::RStarJ => (
            params.r / (params.r - 1.0) * (nf - jf) / nf,
            g_star_j(j, zi, params)? / g_star_j(j, z, params)?,
        ),
        CommFactorKind::ChiJ => (
            -jf * (nf - jf) / nf,
            rho_j(j, zi, params)? / rho_j(j, z, params)?,
        ),
    };
    let zg = (-2.0 * params.eps * gamma * v).exp();
    Ok(zg * ratio)
}

/// Which vanishing-sum identity to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumIdentityKind {
    /// The level-`r` sum built from `f` kernels and `[.]` brackets.
    SumF,
    /// The level-`(r-1)` sum built from `f*` kernels and `[.]'` brackets.
    SumFStar,
}

/// Residual of the telescoping kernel-sum identity.
///
/// With `v_n := v + n/2` appended to `v_list` and `sum(p_list) = 0`:
///
/// ```text
/// SumF:     sum_nu prod_{j != nu} f (v_{j+1} - v_j, 1 - p_nu + p_j) / [p_nu - p_j]   = 0
/// SumFStar: sum_nu prod_{j != nu} f*(v_j - v_{j+1}, 1 - p_j + p_nu) / [p_nu - p_j]'  = 0
/// ```
///
/// The identity holds on the alignment locus `v = v_list[0]`; callers that
/// want a negative control detune `v` away from it.  The residual is
/// `|sum| / max_nu |term_nu|`.
pub fn identity_residual(
    which: SumIdentityKind,
    v: f64,
    v_list: &[f64],
    p_list: &[f64],
    params: &ModelParams,
) -> Result<f64> {
    let n = params.n;
    if v_list.len() != n || p_list.len() != n {
        return Err(Error::domain(format!(
            "identity_residual needs v_list and p_list of length n = {n}"
        )));
    }
    let psum: f64 = p_list.iter().sum();
    if psum.abs() > 1e-9 {
        return Err(Error::domain(format!(
            "p_list must sum to zero, got {psum:.3e}"
        )));
    }
    let mut vs: Vec<f64> = v_list.to_vec();
    vs.push(v + n as f64 / 2.0);

    let (kern, lev) = match which {
        SumIdentityKind::SumF => (KernelKind::F, Level::R),
        SumIdentityKind::SumFStar => (KernelKind::FStar, Level::RMinus1),
    };

    let mut terms: Vec<C> = Vec::with_capacity(n);
    for nu in 0..n {
        let mut term = C::new(1.0, 0.0);
        for j in 0..n {
            if j == nu {
                continue;
            }
            let arg = match which {
                SumIdentityKind::SumF => C::new(vs[j + 1] - vs[j], 0.0),
                SumIdentityKind::SumFStar => C::new(vs[j] - vs[j + 1], 0.0),
            };
            let w = match which {
                SumIdentityKind::SumF => C::new(1.0 - p_list[nu] + p_list[j], 0.0),
                SumIdentityKind::SumFStar => C::new(1.0 - p_list[j] + p_list[nu], 0.0),
            };
            let k = kernel(kern, arg, w, params)?;
            let b = bracket(C::new(p_list[nu] - p_list[j], 0.0), lev, params)?;
            if b.norm() < POLE_ABS {
                return Err(Error::Pole {
                    function: "identity_residual",
                    location: format!("[p_{nu} - p_{j}] with p diff {}", p_list[nu] - p_list[j]),
                    denominator_abs: b.norm(),
                });
            }
            term *= k / b;
        }
        terms.push(term);
    }
    let total: C = terms.iter().sum();
    let scale = terms
        .iter()
        .map(|t| t.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    Ok(total.norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn desk(n: usize) -> ModelParams {
        ModelParams::from_x(n, 5.5, 0.3).unwrap()
    }

    /// Series oracle for `Theta_q(z) = sum_m q^{m(m-1)/2} (-z)^m`.
    fn theta_q_series(z: C, q: f64) -> C {
        let mut sum = C::new(0.0, 0.0);
        for m in -80i64..=80 {
            let e = (m * (m - 1)) as f64 / 2.0;
            let coeff = q.powf(e);
            if coeff == 0.0 || !coeff.is_finite() {
                continue;
            }
            sum += coeff * (-z).powi(m as i32);
        }
        sum
    }

    /// Brute-force double-loop oracle for the two-nome product.
    fn qpoch2_brute(z: C, q1: f64, q2: f64) -> C {
        let mut acc = C::new(1.0, 0.0);
        for i in 0..60 {
            for j in 0..60 {
                acc *= C::new(1.0, 0.0) - z * q1.powi(i) * q2.powi(j);
            }
        }
        acc
    }

    #[test]
    fn theta_classical_value() {
        // theta[0,0](0; i) = pi^{1/4} / Gamma(3/4).
        let t = theta(0.0, 0.0, C::new(0.0, 0.0), C::new(0.0, 1.0), 40).unwrap();
        assert_relative_eq!(t.re, 1.0864348112133080, max_relative = 1e-14);
        assert!(t.im.abs() < 1e-15);
    }

    #[test]
    fn theta_rejects_lower_half_plane() {
        assert!(theta(0.0, 0.0, C::new(0.0, 0.0), C::new(0.0, -1.0), 40).is_err());
    }

    #[test]
    fn theta_characteristic_shift_flips_sign_at_half() {
        // theta[1/2, b+1] = -theta[1/2, b]: the reason vertex-weight
        // characteristics must never be reduced modulo n.
        let tau = C::new(0.1, 0.47);
        let v = C::new(0.23, 0.05);
        for k in 0..4 {
            let b = -0.5 + k as f64 / 3.0;
            let t0 = theta(0.5, b, v, tau, 40).unwrap();
            let t1 = theta(0.5, b + 1.0, v, tau, 40).unwrap();
            assert_relative_eq!((t1 + t0).norm(), 0.0, epsilon = 1e-12 * t0.norm());
        }
    }

    #[test]
    fn theta_q_product_matches_series() {
        for &q in &[0.3, 0.09, 0.0009] {
            for &z in &[C::new(0.7, 0.2), C::new(-1.3, 0.4), C::new(0.02, -0.6)] {
                let p = theta_q(z, q, 1e-16).unwrap();
                let s = theta_q_series(z, q);
                assert_relative_eq!(p.re, s.re, max_relative = 1e-12);
                assert_relative_eq!(p.im, s.im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn qpoch_two_nomes_matches_brute_force() {
        let z = C::new(0.4, -0.3);
        let got = qpoch(z, &[0.2, 0.35], 1e-16).unwrap();
        let want = qpoch2_brute(z, 0.2, 0.35);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-13);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-13);
    }

    #[test]
    fn qpoch_empty_nome_list_is_single_factor() {
        let z = C::new(0.3, 0.7);
        let got = qpoch(z, &[], 1e-16).unwrap();
        assert_relative_eq!((got - (C::new(1.0, 0.0) - z)).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn qpoch_rejects_bad_nome() {
        assert!(qpoch(C::new(0.5, 0.0), &[1.1], 1e-16).is_err());
    }

    #[test]
    fn bracket_vanishes_at_zero_and_at_level() {
        let p = desk(3);
        for lev in [Level::R, Level::RMinus1] {
            let b0 = bracket(C::new(0.0, 0.0), lev, &p).unwrap();
            assert!(b0.norm() < 1e-14);
            let l = p.level_value(lev);
            let bl = bracket(C::new(l, 0.0), lev, &p).unwrap();
            assert!(bl.norm() < 1e-12);
        }
    }

    #[test]
    fn bracket_modular_consistency() {
        // theta[1/2,-1/2](v/r, pi i/(eps r)) = sqrt(eps r / pi) e^{-eps r/4} [v],
        // tying the additive theta to the multiplicative bracket.
        let p = desk(3);
        for lev in [Level::R, Level::RMinus1] {
            let l = p.level_value(lev);
            for &v in &[0.17, 0.62, 1.31, 2.4] {
                let tau = C::new(0.0, PI / (p.eps * l));
                let lhs = theta(0.5, -0.5, C::new(v / l, 0.0), tau, p.theta_terms).unwrap();
                let rhs = (p.eps * l / PI).sqrt()
                    * (-p.eps * l / 4.0).exp()
                    * bracket(C::new(v, 0.0), lev, &p).unwrap();
                assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-10);
                assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
            }
        }
    }

    #[test]
    fn bracket_half_matches_direct_theta_sum() {
        // Independent check of the exact half-period formula against the
        // additive theta representation of the bracket via the modular
        // identity, evaluated at the complex-shifted argument.
        let p = desk(3);
        for lev in [Level::R, Level::RMinus1] {
            let l = p.level_value(lev);
            for &(v, sigma) in &[(0.37, 1), (0.81, -1), (1.9, 1)] {
                let shifted = C::new(v, 0.0) + C::new(0.0, sigma as f64 * PI / (2.0 * p.eps));
                let tau = C::new(0.0, PI / (p.eps * l));
                let lhs = theta(0.5, -0.5, shifted / l, tau, p.theta_terms).unwrap();
                let rhs = (p.eps * l / PI).sqrt() * (-p.eps * l / 4.0).exp()
                    * bracket_half(C::new(v, 0.0), sigma, lev, &p).unwrap();
                assert!(
                    (lhs - rhs).norm() <= 1e-10 * rhs.norm(),
                    "half-period bracket mismatch at v={v}, sigma={sigma}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn kernel_h_at_zero_is_minus_one() {
        let p = desk(2);
        let h = kernel(KernelKind::H, C::new(0.0, 0.0), C::new(0.0, 0.0), &p).unwrap();
        assert_relative_eq!(h.re, -1.0, max_relative = 1e-13);
        assert!(h.im.abs() < 1e-13);
        let hs = kernel(KernelKind::HStar, C::new(0.0, 0.0), C::new(0.0, 0.0), &p).unwrap();
        assert_relative_eq!(hs.re, -1.0, max_relative = 1e-13);
    }

    #[test]
    fn kernel_f_reports_pole_at_half() {
        let p = desk(2);
        let err = kernel(KernelKind::F, C::new(0.5, 0.0), C::new(0.3, 0.0), &p).unwrap_err();
        match err {
            Error::Pole { function, .. } => assert_eq!(function, "f"),
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn comm_factor_unitarity_and_normalization() {
        let p = desk(3);
        let one = C::new(1.0, 0.0);
        for j in 1..=3 {
            for kind in [CommFactorKind::RJ, CommFactorKind::RStarJ] {
                let a = comm_factor(kind, j, C::new(0.41, 0.0), &p).unwrap();
                let b = comm_factor(kind, j, C::new(-0.41, 0.0), &p).unwrap();
                assert_relative_eq!((a * b - one).norm(), 0.0, epsilon = 1e-12);
                let at0 = comm_factor(kind, j, C::new(0.0, 0.0), &p).unwrap();
                assert_relative_eq!((at0 - one).norm(), 0.0, epsilon = 1e-12);
            }
        }
        for j in 1..=2 {
            let c0 = comm_factor(CommFactorKind::ChiJ, j, C::new(0.0, 0.0), &p).unwrap();
            assert_relative_eq!((c0 - one).norm(), 0.0, epsilon = 1e-12);
        }
        assert!(comm_factor(CommFactorKind::ChiJ, 3, C::new(0.1, 0.0), &p).is_err());
        assert!(comm_factor(CommFactorKind::RJ, 0, C::new(0.1, 0.0), &p).is_err());
    }

    #[test]
    fn sum_identity_vanishes_on_alignment_locus() {
        for n in [2usize, 3, 4] {
            let p = desk(n);
            // Deterministic generic draws.
            let v_list: Vec<f64> = (0..n).map(|k| 0.21 + 0.17 * k as f64).collect();
            let mut p_list: Vec<f64> = (0..n).map(|k| 0.3 * (k as f64 + 1.0).sin()).collect();
            let mean = p_list.iter().sum::<f64>() / n as f64;
            for q in p_list.iter_mut() {
                *q -= mean;
            }
            for kind in [SumIdentityKind::SumF, SumIdentityKind::SumFStar] {
                let res = identity_residual(kind, v_list[0], &v_list, &p_list, &p).unwrap();
                assert!(res < 1e-10, "n={n} {kind:?} residual {res:.3e}");
                let detuned =
                    identity_residual(kind, v_list[0] + 0.37, &v_list, &p_list, &p).unwrap();
                assert!(detuned > 1e-3, "n={n} {kind:?} control {detuned:.3e}");
            }
        }
    }

    #[test]
    fn sum_identity_validates_input() {
        let p = desk(2);
        let err = identity_residual(SumIdentityKind::SumF, 0.2, &[0.2, 0.4], &[0.3, 0.1], &p);
        assert!(err.is_err());
        let err2 = identity_residual(SumIdentityKind::SumF, 0.2, &[0.2], &[0.3, -0.3], &p);
        assert!(err2.is_err());
    }

    proptest! {
        #[test]
        fn bracket_is_odd(v in -2.5f64..2.5) {
            let p = desk(3);
            for lev in [Level::R, Level::RMinus1] {
                let a = bracket(C::new(v, 0.0), lev, &p).unwrap();
                let b = bracket(C::new(-v, 0.0), lev, &p).unwrap();
                prop_assert!((a + b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn bracket_quasi_period(v in -2.0f64..2.0) {
            let p = desk(3);
            for lev in [Level::R, Level::RMinus1] {
                let l = p.level_value(lev);
                let a = bracket(C::new(v + l, 0.0), lev, &p).unwrap();
                let b = bracket(C::new(v, 0.0), lev, &p).unwrap();
                prop_assert!((a + b).norm() <= 1e-11 * (1.0 + b.norm()));
            }
        }

        #[test]
        fn bracket_reflection(v in -2.0f64..2.0) {
            // [L - v] = [v] at level L.
            let p = desk(2);
            for lev in [Level::R, Level::RMinus1] {
                let l = p.level_value(lev);
                let a = bracket(C::new(l - v, 0.0), lev, &p).unwrap();
                let b = bracket(C::new(v, 0.0), lev, &p).unwrap();
                prop_assert!((a - b).norm() <= 1e-11 * (1.0 + b.norm()));
            }
        }

        #[test]
        fn theta_integer_characteristic_periodicity(
            da in proptest::sample::select(vec![1.0f64, 2.0]),
            v in -0.8f64..0.8,
        ) {
            // theta[a+1, b] = theta[a, b].
            let tau = C::new(0.13, 0.61);
            let t0 = theta(0.5, 0.25, C::new(v, 0.0), tau, 40).unwrap();
            let t1 = theta(0.5 + da, 0.25, C::new(v, 0.0), tau, 40).unwrap();
            prop_assert!((t1 - t0).norm() <= 1e-11 * (1.0 + t0.norm()));
        }
    }
}
